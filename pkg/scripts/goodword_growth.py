"""Print d_k, the counting bound and d_k^(1/k) for a range of k.

    python scripts/goodword_growth.py -m 2 --kmax 12
"""

import argparse
import csv
import sys

from derivedgrowth.bounds import goods_bound, thm1_bound
from derivedgrowth.words import PhiSpec, enumerate_good


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("-m", type=int, default=2)
    p.add_argument("--phi", help="comma-separated images, default 1,0,...")
    p.add_argument("--kmax", type=int, default=10)
    args = p.parse_args()

    images = tuple(int(x) for x in args.phi.split(",")) if args.phi else (1,) + (0,) * (args.m - 1)
    phi = PhiSpec(images)
    out = csv.writer(sys.stdout)
    out.writerow(["k", "d_k", "bound", "root", "thm1_bound"])
    for k in range(1, args.kmax + 1):
        d = len(enumerate_good(phi, k))
        if k >= 4:
            out.writerow([k, d, goods_bound(phi.m, k), d ** (1 / k), thm1_bound(phi.m, k)])
        else:
            out.writerow([k, d, "", d ** (1 / k), ""])


if __name__ == "__main__":
    main()
