"""Write the CSV for every figure family into one directory.

Usage: python3 scripts/reproduce_figures.py [outdir] [--workers N]
"""
import argparse
import os
import time
from pathlib import Path

from drivenqubits.sweeps import FIGURES, run_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="figures")
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--only", nargs="*", choices=sorted(FIGURES), help="subset of figure ids")
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for fig_id in args.only or FIGURES:
        t0 = time.perf_counter()
        run_figure(fig_id, out / f"{fig_id}.csv", workers=args.workers)
        print(f"{fig_id:<24s} {time.perf_counter() - t0:6.1f} s  {FIGURES[fig_id].description}")


if __name__ == "__main__":
    main()
