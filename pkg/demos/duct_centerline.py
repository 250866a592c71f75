"""Plane wave in a duct with a matched end.

The inlet is driven with unit normal velocity and the outlet carries the
characteristic admittance, so the exact field is a travelling wave of
magnitude rho*c = 442 Pa.  Prints |p| along the axis and the worst
deviation.

    python3 demos/duct_centerline.py --h 0.05 --freqs 240 480
"""

import argparse

import numpy as np

from helmbem.benchmarks import duct_centerline


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=0.05, help="element edge length in m")
    ap.add_argument("--freqs", type=float, nargs="+", default=[240.0, 480.0])
    ap.add_argument("--points", type=int, default=18)
    a = ap.parse_args()

    for f in a.freqs:
        rec, pts, p, ref = duct_centerline(a.h, f, a.points)
        print(f"f = {f:g} Hz, N = {rec.n}: max deviation {100 * rec.max_deviation:.2f}%, "
              f"mean complex error {100 * rec.mean_error:.2f}%")
        for x, pv, rv in zip(pts[:, 0], p, ref):
            print(f"  x = {x:5.3f} m  |p| = {abs(pv):7.2f} Pa  phase error {np.angle(pv / rv):+.4f} rad")


if __name__ == "__main__":
    main()
