"""Command-line entry point.

Exit codes: 0 success, 2 bad input, 3 relation not found, 4 state budget
exhausted, 5 a checked invariant was falsified.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .bounds import DomainError, bound_report, goods_bound
from .config import ConfigError, ExperimentConfig, config_for_oracle, dump_config, \
    load_config, set_value
from .growth import distinctness_check, enumerate_balls_FmodRprime, enumerate_balls_G, saw_check
from .quotient import DEFAULT_MAX_STATES, BudgetExceeded, compute_rho, find_girth, \
    make_free_abelian, make_nilpotent_class2
from .words import enumerate_good, format_compact, format_word

log = logging.getLogger("derivedgrowth")

EXIT_OK, EXIT_INPUT, EXIT_NOT_FOUND, EXIT_BUDGET, EXIT_FALSIFIED = 0, 2, 3, 4, 5


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    for key in ("kind", "m", "phi", "degree", "k", "t", "n_max", "budget", "seed",
                "max_len", "max_states"):
        v = getattr(args, key, None)
        if v is not None:
            set_value(cfg, key, str(v))
    for item in getattr(args, "perm", None) or []:
        if "=" not in item:
            raise ConfigError(f"--perm expects NAME=IMAGES, got {item!r}")
        name, images = item.split("=", 1)
        set_value(cfg, "perm." + name, images)
    return cfg


def _common(p, oracle=True):
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--dump-config", action="store_true",
                   help="print the effective config in canonical form and exit")
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    p.add_argument("--max-states", dest="max_states", type=int, default=None)
    if oracle:
        p.add_argument("--kind")
        p.add_argument("-m", type=int, dest="m")
        p.add_argument("--phi")
        p.add_argument("--degree", type=int)
        p.add_argument("--perm", action="append", metavar="NAME=IMAGES",
                       help="1-based images of a generator, e.g. a=2,1,3")


def _states(cfg):
    return cfg.max_states if cfg.max_states is not None else DEFAULT_MAX_STATES


# --- commands -----------------------------------------------------------------

def cmd_goodwords(args, cfg):
    phi = cfg.phi_spec()
    if cfg.k is None:
        raise ConfigError("goodwords needs -k")
    good = enumerate_good(phi, cfg.k)
    lines = []
    if not args.count_only:
        fmt = format_compact if phi.m <= 26 else format_word
        lines += [fmt(w) for w in good]
    summary = f"d_k={len(good)}"
    code = EXIT_OK
    if cfg.k >= 4 and phi.m >= 2:
        b = goods_bound(phi.m, cfg.k)
        ok = len(good) >= b
        summary += f" bound={b} {'PASS' if ok else 'FAIL'}"
        code = EXIT_OK if ok else EXIT_FALSIFIED
    lines.append(summary)
    _emit(args, "\n".join(lines) + "\n")
    return code


def cmd_rho(args, cfg):
    o = cfg.build_oracle()
    max_len = cfg.max_len if cfg.max_len is not None else 10
    res = compute_rho(o, max_len, _states(cfg), args.threads)
    if args.format == "json":
        if res.found:
            doc = {"rho": res.rho, "witness": format_word(res.witness),
                   "exhaustive_up_to": res.exhaustive_up_to}
        else:
            doc = {"rho": None, "lower_bound": res.lower_bound, "exhaustive_up_to": res.max_len}
        _emit(args, _json(doc))
    else:
        if res.found:
            _emit(args, f"rho={res.rho} witness={format_word(res.witness)} "
                        f"exhaustive_up_to={res.exhaustive_up_to}\n")
        else:
            _emit(args, f"rho>{res.max_len} exhaustive_up_to={res.max_len}\n")
    return EXIT_OK if res.found else EXIT_NOT_FOUND


def _report_text(args, report):
    return report.to_json() + "\n" if args.format == "json" else report.to_csv()


def cmd_ball(args, cfg):
    o = cfg.build_oracle()
    n_max = cfg.n_max if cfg.n_max is not None else 4
    fn = enumerate_balls_FmodRprime if args.lifted else enumerate_balls_G
    try:
        report = fn(o, n_max, _states(cfg), args.threads)
    except BudgetExceeded as exc:
        log.error("%s", exc)
        if exc.partial is not None:
            _emit(args, _report_text(args, exc.partial))
        return EXIT_BUDGET
    _emit(args, _report_text(args, report))
    return EXIT_OK


def cmd_bound(args, cfg):
    if args.C is None or args.rho is None or cfg.m is None:
        raise ConfigError("bound needs -m, -C and --rho")
    _emit(args, _json(bound_report(cfg.m, args.C, args.rho).to_dict()))
    return EXIT_OK


def cmd_sawcheck(args, cfg):
    o = cfg.build_oracle()
    phi = cfg.phi_spec()
    k = cfg.k if cfg.k is not None else 4
    t = cfg.t if cfg.t is not None else 2
    budget = cfg.budget if cfg.budget is not None else 100_000
    seed = cfg.seed if cfg.seed is not None else 0
    report = saw_check(o, phi, k, t, budget, seed, max_states=_states(cfg), threads=args.threads)
    _emit(args, report.to_json() + "\n")
    if report.violations_total and report.precondition == "verified":
        log.error("self-avoidance failed although rho is above the threshold")
        return EXIT_FALSIFIED
    return EXIT_OK


def cmd_distinct(args, cfg):
    o = cfg.build_oracle()
    phi = cfg.phi_spec()
    k = cfg.k if cfg.k is not None else 4
    t = cfg.t if cfg.t is not None else 2
    budget = cfg.budget if cfg.budget is not None else 1_000_000
    seed = cfg.seed if cfg.seed is not None else 0
    report = distinctness_check(o, phi, k, t, budget, args.samples, seed,
                                max_states=_states(cfg), threads=args.threads)
    _emit(args, _json(report.to_dict()))
    if report.precondition == "verified" and not report.ok:
        log.error("distinct products or their lengths fell short although rho is large enough")
        return EXIT_FALSIFIED
    return EXIT_OK


def series_rows(n_max, max_states=DEFAULT_MAX_STATES, threads=1):
    """Lifted ball tables for F_2/F_2'' and F_2/gamma_3' side by side."""
    code = EXIT_OK
    low = enumerate_balls_FmodRprime(make_free_abelian(2), n_max, max_states, threads)
    high = enumerate_balls_FmodRprime(make_nilpotent_class2(2), n_max, max_states, threads)
    rows = []
    first_strict = None
    for n in range(n_max + 1):
        a, b = low.ball_sizes[n], high.ball_sizes[n]
        if b > a and first_strict is None:
            first_strict = n
        rows.append({"n": n, "ball_metabelian": a, "ball_class2": b,
                     "rate_root_metabelian": low.rate_root[n],
                     "rate_root_class2": high.rate_root[n],
                     "monotone": "PASS" if b >= a else "FAIL"})
    if any(r["monotone"] == "FAIL" for r in rows):
        code = EXIT_FALSIFIED
    return rows, first_strict, code


def cmd_series(args, cfg):
    n_max = cfg.n_max if cfg.n_max is not None else 4
    try:
        rows, first_strict, code = series_rows(n_max, _states(cfg), args.threads)
    except BudgetExceeded as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    if args.format == "json":
        _emit(args, _json({"rows": rows, "first_strict": first_strict}))
    else:
        cols = list(rows[0])
        out = [",".join(cols)]
        for r in rows:
            out.append(",".join("" if r[c] is None else repr(r[c]) if isinstance(r[c], float)
                                else str(r[c]) for c in cols))
        _emit(args, "\n".join(out) + "\n")
    log.info("first strict separation: %s", "none up to n=%d" % n_max
             if first_strict is None else f"n={first_strict}")
    return code


def cmd_find_girth(args, cfg):
    phi = cfg.phi_spec()
    if cfg.degree is None:
        raise ConfigError("find-girth needs --degree")
    seed = cfg.seed if cfg.seed is not None else 0
    o, res, used = find_girth(phi, cfg.degree, args.tries, args.target, seed,
                              screen=args.screen, max_states=_states(cfg),
                              threads=args.threads)
    text = dump_config(config_for_oracle(o))
    log.info("best after %d tries: %s", used, res.describe())
    if args.format == "json":
        _emit(args, _json({"config": text, "tries": used, "rho": res.rho if res.found else None,
                           "lower_bound": res.lower_bound, "target": args.target}))
    else:
        _emit(args, text)
    return EXIT_OK if res.lower_bound >= args.target else EXIT_NOT_FOUND


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="derivedgrowth",
                                description="Growth experiments for F_m/R' over exact quotients F_m/R.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("goodwords", help="enumerate good words and compare with the counting bound")
    _common(s)
    s.add_argument("-k", type=int)
    s.add_argument("--count-only", action="store_true")
    s.set_defaults(func=cmd_goodwords)

    s = sub.add_parser("rho", help="shortest relation length of the configured quotient")
    _common(s)
    s.add_argument("--max-len", dest="max_len", type=int)
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("ball", help="sphere and ball sizes of G, or of F_m/R' with --lifted")
    _common(s)
    s.add_argument("-n", "--n-max", dest="n_max", type=int)
    s.add_argument("--lifted", action="store_true")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_ball)

    s = sub.add_parser("bound", help="growth lower bound from rank, C and rho")
    _common(s, oracle=False)
    s.add_argument("-m", type=int, dest="m")
    s.add_argument("-C", type=int, dest="C")
    s.add_argument("--rho", type=int)
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("sawcheck", help="check that products of good words trace self-avoiding paths")
    _common(s)
    s.add_argument("-k", type=int)
    s.add_argument("-t", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_sawcheck)

    s = sub.add_parser("distinct", help="count distinct F_m/R' elements among products of good words")
    _common(s)
    s.add_argument("-k", type=int)
    s.add_argument("-t", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int, default=100)
    s.set_defaults(func=cmd_distinct)

    s = sub.add_parser("series", help="F_2/F_2'' against F_2/gamma_3' ball sizes")
    _common(s, oracle=False)
    s.add_argument("-n", "--n-max", dest="n_max", type=int)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_series)

    s = sub.add_parser("find-girth", help="random search for permutation images with large girth")
    _common(s)
    s.add_argument("--tries", type=int, default=20)
    s.add_argument("--target", type=int, default=27)
    s.add_argument("--screen", type=int, default=12)
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=("config", "json"), default="config")
    s.set_defaults(func=cmd_find_girth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        if args.dump_config:
            _emit(args, dump_config(cfg))
            return EXIT_OK
        return args.func(args, cfg)
    except (ConfigError, DomainError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
