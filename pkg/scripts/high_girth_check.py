"""Search for a subdirect quotient with large girth, then run both checks on it.

    python scripts/high_girth_check.py --degree 32 --target 27 --t 3
"""

import argparse
import json
import logging

from derivedgrowth.bounds import bound_report
from derivedgrowth.config import config_for_oracle, dump_config
from derivedgrowth.growth import distinctness_check, saw_check
from derivedgrowth.quotient import find_girth
from derivedgrowth.words import PhiSpec

log = logging.getLogger("high_girth_check")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--phi", default="1,0")
    p.add_argument("--degree", type=int, default=32)
    p.add_argument("--target", type=int, default=27)
    p.add_argument("--tries", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-k", type=int, default=4)
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--threads", type=int, default=1)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    phi = PhiSpec(tuple(int(x) for x in args.phi.split(",")))
    o, res, used = find_girth(phi, args.degree, args.tries, args.target, args.seed,
                              threads=args.threads)
    log.info("after %d tries: %s", used, res.describe())
    print(dump_config(config_for_oracle(o)), end="")
    if res.lower_bound < args.target:
        log.warning("target not reached; checks below will report an unverified precondition")

    # the search result already certifies the girth, so pass it on instead of searching again
    saw = saw_check(o, phi, args.k, args.t, rho=res, threads=args.threads)
    dist = distinctness_check(o, phi, args.k, min(args.t, 2), rho=res, threads=args.threads)
    rho_value = res.rho if res.found else res.lower_bound
    print(json.dumps({
        "sawcheck": saw.to_dict(),
        "distinct": dist.to_dict(),
        "bound": bound_report(phi.m, phi.C, rho_value).to_dict(),
    }, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
