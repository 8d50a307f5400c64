"""Required transmit power against the LC phase range for every user of a scenario.

    python3 scripts/power_vs_omega.py [scenario.json] [--threads n]
"""

import argparse
import math

from lcris.channel import watts_to_dbm
from lcris.cli import parse_scenario
from lcris.scenario import scenario_from_dict
from lcris.sweep import run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario", nargs="?")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    sc = parse_scenario(args.scenario) if args.scenario else scenario_from_dict({})
    sols = run(sc, args.threads)
    print("omega_deg " + " ".join(f"user{s.user + 1}_dBm".rjust(11) for s in sols))
    for j, omega in enumerate(sc.omega_grid):
        powers = (watts_to_dbm(s.curve[j].required_power_w) for s in sols)
        print(f"{math.degrees(omega):9.1f} " + " ".join(f"{p:11.3f}" for p in powers))
    for s in sols:
        print(f"user {s.user + 1}: omega* = {math.degrees(s.omega_star):.0f} deg, "
              f"P = {watts_to_dbm(s.required_power_w):.2f} dBm")


if __name__ == "__main__":
    main()
