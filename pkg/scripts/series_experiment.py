"""Ball sizes of F_2/F_2'' and F_2/gamma_3' side by side, written as CSV.

    python scripts/series_experiment.py --n-max 9 --threads 8 > series.csv
"""

import argparse
import csv
import logging
import sys

from derivedgrowth.cli import series_rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)

    rows, first, _ = series_rows(args.n_max, threads=args.threads)
    out = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]))
    out.writeheader()
    out.writerows(rows)
    logging.info("first n with a strict gap: %s", first)


if __name__ == "__main__":
    main()
