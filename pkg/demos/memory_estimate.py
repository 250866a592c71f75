"""Memory needed by the FMM matrices, without assembling anything.

Builds the cluster tree for a cube-sphere and prints structural non-zero
counts next to the closed-form estimates, for both FMM variants.

    python3 demos/memory_estimate.py --n 19 --freq 200
    python3 demos/memory_estimate.py --n 112 --freq 5000   # about 150k elements
"""

import argparse

from helmbem.bench import gen_sphere_cube
from helmbem.estimate import estimate_step


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=19, help="cube-sphere subdivisions (N = 12 n^2)")
    ap.add_argument("--freq", type=float, default=200.0)
    a = ap.parse_args()

    mesh = gen_sphere_cube(a.n)
    print(f"cube-sphere with {mesh.n_elements} elements")
    for method in ("SLFMM", "MLFMM"):
        for line in estimate_step(mesh, a.freq, method).lines():
            print(line)


if __name__ == "__main__":
    main()
