"""Worst-case area SNR of the LOS-optimized design under Rician fading draws.

    python3 scripts/rician_rescore.py [scenario.json] [--draws 200]
"""

import argparse

import numpy as np

from lcris.beamform import db
from lcris.cli import parse_scenario
from lcris.scenario import scenario_from_dict
from lcris.sweep import rescore_rician, run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("scenario", nargs="?")
    ap.add_argument("--draws", type=int, default=200)
    args = ap.parse_args()
    sc = parse_scenario(args.scenario) if args.scenario else scenario_from_dict({})
    print(f"target SNR {sc.snr_thr_db:g} dB")
    for sol in run(sc):
        snrs = rescore_rician(sc, sol, args.draws, sc.seed)
        lo, med = np.percentile(snrs, [10, 50])
        print(f"user {sol.user + 1}: median {db(med):.2f} dB, 10th percentile {db(lo):.2f} dB, "
              f"outage {np.mean(snrs < sc.snr_thr):.1%}")


if __name__ == "__main__":
    main()
