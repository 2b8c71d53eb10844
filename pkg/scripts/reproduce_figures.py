"""Write the CSV data behind every figure into one directory.

    python3 scripts/reproduce_figures.py [out_dir] [--workers K]
"""
import argparse
import sys

from zetasections.cli import main


def parse():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("out", nargs="?", default="out/figures")
    p.add_argument("--workers", type=int, default=1)
    return p.parse_args()


if __name__ == "__main__":
    args = parse()
    sys.exit(main(["figure", "all", "--out", args.out, "--workers", str(args.workers)]))
