"""Sweep the steering angle and tabulate 1-bit pattern metrics.

    python3 scripts/beam_scan.py [--lo 0] [--hi 75] [--step 5] [--csv scan.csv]

Incidence is taken from the default scene geometry (radar seen from the panel).
"""

import argparse
import math

import numpy as np

from corner_ris_sim.config import ScenarioConfig
from corner_ris_sim.ris import (
    RisPanel, coding_for_angle, continuous_pattern, continuous_phase_profile, pattern_metrics,
    reradiation_pattern,
)


def scan(angles, freq=5.5e9, theta_i=None):
    panel = RisPanel()
    if theta_i is None:
        theta_i = ScenarioConfig().incidence_deg()
    rows = []
    for thr in angles:
        coding = coding_for_angle(panel, theta_i, thr)
        pat = reradiation_pattern(panel, coding, theta_i, freq)
        m = pattern_metrics(pat)
        cont = continuous_pattern(panel, continuous_phase_profile(panel, theta_i, thr), theta_i, freq)
        loss = 20 * math.log10(np.abs(cont.gain).max() / np.abs(pat.gain).max())
        rows.append((thr, m.peak_angle, m.beamwidth_3db, m.highest_sidelobe_db, loss))
    return theta_i, rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lo", type=float, default=0.0)
    ap.add_argument("--hi", type=float, default=75.0)
    ap.add_argument("--step", type=float, default=5.0)
    ap.add_argument("--freq", type=float, default=5.5e9)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args(argv)

    angles = np.arange(args.lo, args.hi + 1e-9, args.step)
    theta_i, rows = scan(angles, args.freq)
    print(f"incidence {theta_i:.1f} deg, f = {args.freq / 1e9:.2f} GHz")
    print(f"{'target':>7}{'peak':>8}{'bw3dB':>8}{'SLL dB':>8}{'q-loss':>8}")
    for r in rows:
        print(f"{r[0]:7.1f}{r[1]:8.1f}{r[2]:8.2f}{r[3]:8.1f}{r[4]:8.2f}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("theta_r,peak_deg,beamwidth_deg,sidelobe_db,quant_loss_db\n")
            for r in rows:
                fh.write(",".join(f"{v:.4f}" for v in r) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
