"""Write every registered figure as CSV tables under one output directory.

    python3 scripts/reproduce_figures.py --out results/ [--points 20] [--only 3a 8b]
"""

import argparse
import time
from pathlib import Path

from lambda_memory.figures import FIGURES, figure


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results")
    ap.add_argument("--points", type=int, help="override every axis length (quick look)")
    ap.add_argument("--only", nargs="*", help="figure ids to run")
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()

    for fid in args.only or list(FIGURES):
        t = time.perf_counter()
        res = figure(fid, points=args.points, workers=args.workers)
        res.write(Path(args.out) / f"fig{fid}")
        print(f"fig {fid:>3}: {len(res.tables)} table(s) in {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
