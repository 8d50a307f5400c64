"""Best LC phase range per user as the phase shifter's figure of merit varies.

    python3 scripts/fom_sweep.py [scenario.json] [--fom 25 50 75 100 150]
"""

import argparse
import math

from lcris.channel import watts_to_dbm
from lcris.cli import parse_scenario
from lcris.scenario import scenario_from_dict
from lcris.sweep import fom_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario", nargs="?")
    ap.add_argument("--fom", type=float, nargs="+")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    sc = parse_scenario(args.scenario) if args.scenario else scenario_from_dict({})
    foms = args.fom or list(sc.sweeps.fom_values)
    print("fom_deg_per_db user omega_star_deg required_power_dbm")
    for r in fom_sweep(sc, foms, threads=args.threads):
        print(f"{r.fom:14g} {r.user + 1:4d} {math.degrees(r.omega_star):14.0f} "
              f"{watts_to_dbm(r.required_power_w):18.3f}")


if __name__ == "__main__":
    main()
