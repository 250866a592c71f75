"""Write an input deck for a small sphere problem and run the solver on it.

The deck, mesh files and results land in the given directory.  The run is
split into two step ranges to show that partial runs compose: the result
folders are the same as for one full run.

    python3 demos/cli_deck.py /tmp/sphere_case
    numcalc-py /tmp/sphere_case/NC.inp          # the same, from the shell
"""

import argparse
from pathlib import Path

from helmbem.bench import gen_sphere_cube, line_grid, with_evaluation_grid
from helmbem.cli import main as numcalc
from helmbem.deck import SourceSpec, make_job, write_job
from helmbem.postprocess import read_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory")
    a = ap.parse_args()
    d = Path(a.directory)
    d.mkdir(parents=True, exist_ok=True)

    pts, conn = line_grid((0, 0, 1.5), (0, 0, 4.0), 10)
    mesh = with_evaluation_grid(gen_sphere_cube(9), pts, conn)
    job = make_job(mesh, [100.0, 200.0, 300.0, 400.0], sources=[SourceSpec("plane", (0, 0, 1), 1.0)],
                   solver="direct", title=("sphere", "plane wave along +z"))
    deck = write_job(job, str(d))
    print(f"deck written to {deck}")

    print("exit code, steps 1-2:", numcalc([deck, "-istart", "1", "-iend", "2", "-q"]))
    print("exit code, steps 3-4:", numcalc([deck, "-istart", "3", "-iend", "4", "-q"]))
    ids, p = read_outputs(d, 4)["pEvalGrid"]
    print("step 4, |p| on the evaluation line:")
    for i, v in zip(ids, p[:, 0]):
        print(f"  node {i}: {abs(v):.4f} Pa")
    print(f"log files: {sorted(x.name for x in d.glob('NC*.out'))}")


if __name__ == "__main__":
    main()
