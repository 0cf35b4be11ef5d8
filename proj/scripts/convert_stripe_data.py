#!/usr/bin/env python3
"""Convert a stripe-compression mean curve into homeo's experiment CSV and band CSV.

Input: CSV with columns time_h, S11_mean, S11_se (second Piola-Kirchhoff
stress in uN/mm^2), or with --from-force columns time_h, force_mean,
force_se (uN), converted via P = F / area and S11 = P / sqrt(C11).
One row per sample, any time grid. Output: an experiment file on the input grid
with C11 = 1 up to the perturbation time and the compression stretch
after, plus a copy of the band in the layout the acceptance test reads.
"""

import argparse
import csv
import sys

STRIPE_COMPRESSION = 0.99505347
PERTURBATION_TIME_H = 17.0
EXPERIMENT_HEADER = ["time_h", "C11", "C22", "C33", "S11", "S22", "S33", "mask1", "mask2", "mask3"]
BAND_HEADER = ["time_h", "S11_mean", "S11_se"]
FORCE_HEADER = ["time_h", "force_mean", "force_se"]
CROSS_SECTION_MM2 = 40.0


def read_rows(path, header):
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = [c for c in header if c not in (reader.fieldnames or [])]
        if missing:
            sys.exit(f"{path}: missing columns {', '.join(missing)}")
        rows = [tuple(float(r[c]) for c in header) for r in reader]
    rows.sort()
    if not rows or rows[0][0] != 0.0:
        sys.exit(f"{path}: the first sample must be at time_h = 0")
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("source", help="CSV with time_h,S11_mean,S11_se")
    ap.add_argument("--experiment", required=True, help="output experiment CSV")
    ap.add_argument("--band", required=True, help="output band CSV")
    ap.add_argument("--stretch", type=float, default=STRIPE_COMPRESSION, help="C11 after the perturbation")
    ap.add_argument("--switch", type=float, default=PERTURBATION_TIME_H, help="perturbation time in hours")
    ap.add_argument("--from-force", action="store_true", help="input holds force in uN instead of S11")
    ap.add_argument("--area", type=float, default=CROSS_SECTION_MM2, help="cross-section in mm^2")
    args = ap.parse_args()

    def c11(t):
        return 1.0 if t <= args.switch else args.stretch

    if args.from_force:
        rows = []
        for t, force, se in read_rows(args.source, FORCE_HEADER):
            scale = 1.0 / (args.area * c11(t) ** 0.5)
            rows.append((t, force * scale, se * scale))
    else:
        rows = read_rows(args.source, BAND_HEADER)
    with open(args.experiment, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(EXPERIMENT_HEADER)
        for t, mean, _ in rows:
            w.writerow([repr(t), repr(c11(t)), "1", "1", repr(mean), "0", "0", "M", "Z", "Z"])
    with open(args.band, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(BAND_HEADER)
        for row in rows:
            w.writerow([repr(x) for x in row])


if __name__ == "__main__":
    main()
