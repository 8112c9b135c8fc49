"""Exact ball growth for G and F_m/R', and checks on products of good words.

Both searches are level-synchronous BFS in a Cayley graph. Neighbours of
sphere n lie in spheres n-1, n and n+1, so deduplicating new states against
the previous and current sphere is exact and only three spheres are ever
held in memory.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _frontier
from .bounds import saw_threshold
from .magnus import flow_encode, flow_from_word, flow_step, identity_flow
from .quotient import DEFAULT_MAX_STATES, BudgetExceeded, GroupOracle, compute_rho
from .words import PhiSpec, alphabet, check_rank, enumerate_good, format_word


@dataclass
class GrowthReport:
    n_max: int
    sphere_sizes: list
    complete: bool = True
    ball_sizes: list = field(init=False)
    rate_root: list = field(init=False)
    rate_ratio: list = field(init=False)

    def __post_init__(self):
        self.ball_sizes = list(itertools.accumulate(self.sphere_sizes))
        self.rate_root = [None] + [b ** (1.0 / n) for n, b in enumerate(self.ball_sizes) if n > 0]
        s = self.sphere_sizes
        self.rate_ratio = [s[n + 1] / s[n] if n + 1 < len(s) and s[n] > 0 else None
                           for n in range(len(s))]

    @property
    def depth_reached(self) -> int:
        return len(self.sphere_sizes) - 1

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "sphere", "ball", "rate_root", "rate_ratio"])
        for n, (s, b) in enumerate(zip(self.sphere_sizes, self.ball_sizes)):
            w.writerow([n, s, b, _fmt(self.rate_root[n]), _fmt(self.rate_ratio[n])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["depth_reached"] = self.depth_reached
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _fmt(v):
    return "" if v is None else repr(v)


def enumerate_balls_G(o: GroupOracle, n_max: int, max_states: int = DEFAULT_MAX_STATES,
                      threads: int = 1) -> GrowthReport:
    """Sphere sizes of G up to radius ``n_max``.

    Raises :class:`BudgetExceeded` carrying the partial report when a sphere
    would need more than ``max_states`` rows.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    letters = alphabet(o.m)
    prev = np.zeros((0, o.width), dtype=np.uint8)
    cur = o.encode_batch([o.identity()])
    spheres = [1]
    for n in range(n_max):
        if cur.shape[0] == 0:
            spheres.append(0)
            continue
        held = prev.shape[0] + cur.shape[0] * (len(letters) + 1)
        if held > max_states:
            raise BudgetExceeded(f"sphere {n + 1} needs {held} states", depth=n,
                                 partial=GrowthReport(n_max, spheres, complete=False))
        cand = np.vstack([p[2] for p in _frontier.expand(o, cur, letters, threads=threads)])
        known = prev.shape[0] + cur.shape[0]
        labels, ngroups = _frontier.group_rows(np.vstack([prev, cur, cand]))
        seen = np.zeros(ngroups, dtype=bool)
        seen[labels[:known]] = True
        cl = labels[known:]
        fresh = ~seen[cl]
        # one representative per new group, ordered by group id
        ids, first = np.unique(cl[fresh], return_index=True)
        nxt = cand[np.flatnonzero(fresh)[first]]
        prev, cur = cur, nxt
        spheres.append(int(ids.size))
    return GrowthReport(n_max, spheres)


def flow_levels(o: GroupOracle, n_max: int, max_states: int = DEFAULT_MAX_STATES,
                threads: int = 1):
    """Yield the spheres of F_m/R' as dicts ``{flow_encode(x): x}``, radius 0..n_max."""
    letters = alphabet(o.m)
    e = identity_flow(o)
    prev: dict = {}
    cur = {flow_encode(e): e}
    yield cur
    for n in range(n_max):
        held = len(prev) + len(cur) * (len(letters) + 1)
        if held > max_states:
            raise BudgetExceeded(f"sphere {n + 1} needs {held} states", depth=n)
        items = sorted(cur.items(), key=lambda kv: kv[0])

        def expand(chunk):
            out = []
            for _, x in chunk:
                for s in letters:
                    y = flow_step(x, s)
                    out.append((flow_encode(y), y))
            return out

        if threads > 1 and len(items) > 1:
            size = -(-len(items) // threads)
            chunks = [items[i:i + size] for i in range(0, len(items), size)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(expand, chunks))
        else:
            results = [expand(items)]
        nxt: dict = {}
        for part in results:
            for key, y in part:
                if key not in prev and key not in cur and key not in nxt:
                    nxt[key] = y
        prev, cur = cur, dict(sorted(nxt.items(), key=lambda kv: kv[0]))
        yield cur


def enumerate_balls_FmodRprime(o: GroupOracle, n_max: int,
                               max_states: int = DEFAULT_MAX_STATES,
                               threads: int = 1) -> GrowthReport:
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    spheres: list[int] = []
    try:
        for level in flow_levels(o, n_max, max_states, threads):
            spheres.append(len(level))
    except BudgetExceeded as exc:
        exc.partial = GrowthReport(n_max, spheres, complete=False)
        raise
    return GrowthReport(n_max, spheres)


def trace_path(o: GroupOracle, w) -> tuple[list, bool]:
    """Encodings of the |w|+1 vertices visited by the path of ``w`` from the identity."""
    check_rank(w, o.m)
    v = o.identity()
    verts = [o.encode(v)]
    for x in w:
        v = o.step(v, x)
        verts.append(o.encode(v))
    return verts, len(set(verts)) == len(verts)


def first_repeat(verts) -> int | None:
    seen = set()
    for i, v in enumerate(verts):
        if v in seen:
            return i
        seen.add(v)
    return None


def _precondition(o, threshold, rho, max_states, threads):
    """Decide whether rho > threshold, searching for relations if no result is given.

    Returns ``(status, rho_text)`` with status "verified", "false" or "unverified".
    """
    if rho is None:
        try:
            rho = compute_rho(o, max(threshold, 1), max_states, threads)
        except BudgetExceeded:
            return "unverified", "unknown"
    text = str(rho.rho) if rho.found else f">{rho.max_len}"
    if rho.lower_bound > threshold:
        return "verified", text
    if rho.found:
        return "false", text
    return "unverified", text


def _products(good, t, budget, seed):
    total = len(good) ** t
    if total <= budget:
        return total, False, (sum(p, ()) for p in itertools.product(good, repeat=t))
    rng = random.Random(seed)
    return total, True, (sum((rng.choice(good) for _ in range(t)), ()) for _ in range(budget))


MAX_LISTED = 100


@dataclass
class SawReport:
    k: int
    t: int
    d_k: int
    words_checked: int
    sampled: bool
    seed: int
    precondition: str  # "verified", "false" or "unverified"
    rho: str
    violations: list
    violations_total: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def saw_check(o: GroupOracle, phi: PhiSpec, k: int, t: int, budget: int = 100_000,
              seed: int = 0, rho=None, max_states: int = DEFAULT_MAX_STATES,
              threads: int = 1) -> SawReport:
    """Trace every product of ``t`` good words of length ``k`` (or a seeded sample).

    ``rho`` may be a :class:`RhoCertificate` / :class:`NotFound` already in
    hand; otherwise a relation search up to the self-avoidance threshold is
    run first. Violations are reported as ``(word, index of the first
    repeated vertex)``.
    """
    if phi.m != o.m:
        raise ValueError(f"phi has rank {phi.m}, oracle has rank {o.m}")
    good = enumerate_good(phi, k)
    if not good:
        raise ValueError(f"there are no good words of length {k}")
    if k >= 2:
        status, rho_text = _precondition(o, saw_threshold(phi.C, k), rho, max_states, threads)
    else:
        status, rho_text = "not_applicable", "" if rho is None else rho.describe()
    total, sampled, words = _products(good, t, budget, seed)
    violations = []
    n_bad = 0
    checked = 0
    for w in words:
        checked += 1
        verts, ok = trace_path(o, w)
        if not ok:
            n_bad += 1
            if len(violations) < MAX_LISTED:
                violations.append((format_word(w), first_repeat(verts)))
    return SawReport(k=k, t=t, d_k=len(good), words_checked=checked, sampled=sampled,
                     seed=seed, precondition=status, rho=rho_text,
                     violations=violations, violations_total=n_bad)


@dataclass
class DistinctnessReport:
    k: int
    t: int
    expected: int
    observed: int
    precondition: str
    lengths_checked: int
    lengths_ok: int

    @property
    def ok(self) -> bool:
        return self.observed == self.expected and self.lengths_ok == self.lengths_checked

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        return d


def distinctness_check(o: GroupOracle, phi: PhiSpec, k: int, t: int,
                       budget: int = 1_000_000, samples: int = 100, seed: int = 0,
                       rho=None, max_states: int = DEFAULT_MAX_STATES,
                       threads: int = 1) -> DistinctnessReport:
    """Count distinct F_m/R' elements among all products of ``t`` good words of length ``k``.

    ``samples`` of the products are also located by BFS in F_m/R' to confirm
    that their word length is exactly ``k*t``; pass ``samples=0`` to skip.
    """
    good = enumerate_good(phi, k)
    expected = len(good) ** t
    if expected > budget:
        raise BudgetExceeded(f"{expected} products exceed the budget of {budget}")
    if k >= 4:
        # Ck(2k-3)+2k-1 <= rho is the same as rho > saw_threshold(C, k)
        status, _ = _precondition(o, saw_threshold(phi.C, k), rho, max_states, threads)
    else:
        status = "not_applicable"
    encodings = {}
    for p in itertools.product(good, repeat=t):
        w = sum(p, ())
        encodings.setdefault(flow_encode(flow_from_word(o, w)), w)
    checked = ok = 0
    if samples > 0:
        rng = random.Random(seed)
        keys = sorted(encodings)
        picked = keys if len(keys) <= samples else rng.sample(keys, samples)
        sphere = None
        for n, level in enumerate(flow_levels(o, k * t, max_states, threads)):
            if n == k * t:
                sphere = level
        checked = len(picked)
        ok = sum(1 for key in picked if key in sphere)
    return DistinctnessReport(k=k, t=t, expected=expected, observed=len(encodings),
                              precondition=status, lengths_checked=checked, lengths_ok=ok)
