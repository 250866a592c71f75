"""Command-line entry point.

Exit status: 0 all steps solved, 1 deck or mesh could not be read,
2 usage error or at least one frequency step failed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from .deck import DeckError, read_deck
from .estimate import estimate_job
from .mesh import MeshError
from .run import RunSettings, run_job

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_STEPS = 2


@dataclass(frozen=True)
class RunOptions:
    deck: str = "NC.inp"
    istart: int | None = None
    iend: int | None = None
    estimate_ram: bool = False
    threads: int = 1
    output: str | None = None
    quiet: bool = False


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="numcalc-py", description="Boundary element solver for the Helmholtz equation.")
    p.add_argument("deck", nargs="?", default="NC.inp", help="input deck (default: NC.inp)")
    p.add_argument("-istart", type=int, help="first frequency step to solve")
    p.add_argument("-iend", type=int, help="last frequency step to solve")
    p.add_argument("--estimate_ram", action="store_true",
                   help="report the memory needed per step from the clustering only")
    p.add_argument("--threads", type=int, default=1, help="number of frequency steps solved concurrently")
    p.add_argument("--output", help="output root (default: the deck's directory)")
    p.add_argument("-q", "--quiet", action="store_true", help="do not echo the log to stdout")
    return p


def step_range(opts: RunOptions, num_steps: int):
    """(first, last, is_partial) after checking 1 <= istart <= iend <= num_steps."""
    first = 1 if opts.istart is None else opts.istart
    last = num_steps if opts.iend is None else opts.iend
    if not 1 <= first <= last <= num_steps:
        raise ValueError(f"step range {first}..{last} outside 1..{num_steps}")
    return first, last, opts.istart is not None or opts.iend is not None


def run(opts: RunOptions) -> int:
    if opts.istart is not None and opts.iend is not None and opts.iend < opts.istart:
        print(f"error: -iend {opts.iend} is smaller than -istart {opts.istart}", file=sys.stderr)
        return EXIT_STEPS
    if opts.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_STEPS
    try:
        job = read_deck(opts.deck)
    except (DeckError, MeshError, OSError) as exc:
        print(f"error reading {opts.deck}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        first, last, partial = step_range(opts, job.plan.num_steps)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STEPS
    steps = range(first, last + 1)
    echo = None if opts.quiet else print
    if opts.estimate_ram:
        for est in estimate_job(job, steps):
            for line in est.lines():
                print(line)
        return EXIT_OK
    out = Path(opts.output) if opts.output else Path(job.base_dir)
    results = run_job(job, steps, out, RunSettings(), opts.threads,
                      (first, last) if partial else None, echo)
    return EXIT_OK if all(r.ok for r in results) else EXIT_STEPS


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    return run(RunOptions(a.deck, a.istart, a.iend, a.estimate_ram, a.threads, a.output, a.quiet))


if __name__ == "__main__":
    sys.exit(main())
