"""Required power and best phase range as one user's coverage disc grows.

    python3 scripts/radius_sweep.py [scenario.json] [--user 1] [--radii 0 0.5 1 2]
"""

import argparse
import math

from lcris.channel import watts_to_dbm
from lcris.cli import parse_scenario
from lcris.scenario import scenario_from_dict
from lcris.sweep import radius_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario", nargs="?")
    ap.add_argument("--user", type=int, help="1-based user index")
    ap.add_argument("--radii", type=float, nargs="+")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    sc = parse_scenario(args.scenario) if args.scenario else scenario_from_dict({})
    k = (args.user or sc.sweeps.radius_user) - 1
    rows, _ = radius_sweep(sc, args.radii or list(sc.sweeps.radii), k, args.threads)
    print("radius_m points omega_star_deg required_power_dbm")
    for r in rows:
        print(f"{r.radius:8g} {r.n_points:6d} {math.degrees(r.omega_star):14.0f} "
              f"{watts_to_dbm(r.required_power_w):18.3f}")


if __name__ == "__main__":
    main()
