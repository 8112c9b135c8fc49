"""Elements of F_m/R' as (endpoint, edge flow) pairs over the Cayley graph of G = F_m/R.

The flow of a word counts, for each positively oriented edge
``v -> v*a_i``, how many more times the path of the word crosses it
forwards than backwards. A word lies in R' exactly when its flow is zero,
so the pair is a faithful normal form for F_m/R'.

Edge keys are ``(encode(v), i)`` with ``i`` the 1-based generator index.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Sequence

from .quotient import GroupOracle
from .words import check_rank


class OracleMismatch(ValueError):
    pass


@dataclass(frozen=True)
class FlowElement:
    oracle: GroupOracle = field(compare=False, repr=False)
    endpoint: object
    flow: tuple  # ((source_bytes, gen), weight) sorted by key, no zero weights

    def __post_init__(self):
        if not self.flow and not self.oracle.is_identity(self.endpoint):
            raise AssertionError("zero flow with a nontrivial endpoint breaks the boundary identity")

    def as_dict(self) -> dict:
        return dict(self.flow)


def _build(o: GroupOracle, endpoint, flow: dict) -> FlowElement:
    items = tuple(sorted((k, w) for k, w in flow.items() if w != 0))
    return FlowElement(o, endpoint, items)


def identity_flow(o: GroupOracle) -> FlowElement:
    return FlowElement(o, o.identity(), ())


def _trace_into(o: GroupOracle, v, w: Sequence[int], flow: dict):
    for x in w:
        if x > 0:
            key = (o.encode(v), x)
            flow[key] = flow.get(key, 0) + 1
            v = o.step(v, x)
        else:
            v = o.step(v, x)
            key = (o.encode(v), -x)
            flow[key] = flow.get(key, 0) - 1
    return v


def flow_from_word(o: GroupOracle, w: Sequence[int]) -> FlowElement:
    check_rank(w, o.m)
    flow: dict = {}
    end = _trace_into(o, o.identity(), w, flow)
    return _build(o, end, flow)


def flow_step(x: FlowElement, letter: int) -> FlowElement:
    """``x`` times a single letter; cheaper than a general product."""
    o = x.oracle
    flow = dict(x.flow)
    end = _trace_into(o, x.endpoint, (letter,), flow)
    return _build(o, end, flow)


def _translate(o: GroupOracle, g, flow) -> dict:
    out = {}
    for (src, i), w in flow:
        out[(o.encode(o.mul(g, o.decode(src))), i)] = w
    return out


def flow_mul(x: FlowElement, y: FlowElement) -> FlowElement:
    if x.oracle is not y.oracle:
        raise OracleMismatch("flow elements come from different oracles")
    o = x.oracle
    flow = dict(x.flow)
    for k, w in _translate(o, x.endpoint, y.flow).items():
        flow[k] = flow.get(k, 0) + w
    return _build(o, o.mul(x.endpoint, y.endpoint), flow)


def flow_inv(x: FlowElement) -> FlowElement:
    o = x.oracle
    g_inv = o.inv(x.endpoint)
    moved = _translate(o, g_inv, x.flow)
    return _build(o, g_inv, {k: -w for k, w in moved.items()})


def in_R_prime(x: FlowElement) -> bool:
    if not x.flow:
        assert x.oracle.is_identity(x.endpoint)
        return True
    return False


def flow_encode(x: FlowElement) -> bytes:
    """Endpoint bytes, entry count, then (source, gen, weight) per entry in key order."""
    parts = [x.oracle.encode(x.endpoint), struct.pack("<I", len(x.flow))]
    for (src, i), w in x.flow:
        parts.append(src)
        parts.append(struct.pack("<Hq", i, w))
    return b"".join(parts)


def boundary(x: FlowElement) -> dict:
    """Net inflow minus outflow at every vertex touched by the flow."""
    o = x.oracle
    net: dict = {}
    for (src, i), w in x.flow:
        dst = o.encode(o.step(o.decode(src), i))
        net[src] = net.get(src, 0) - w
        net[dst] = net.get(dst, 0) + w
    return {v: c for v, c in net.items() if c != 0}


def boundary_ok(x: FlowElement) -> bool:
    o = x.oracle
    expected: dict = {}
    start, end = o.encode(o.identity()), o.encode(x.endpoint)
    if start != end:
        expected = {start: -1, end: 1}
    return boundary(x) == expected


def format_element(x) -> str:
    return repr(x).replace(" ", "")


def flow_text(x: FlowElement) -> str:
    o = x.oracle
    lines = [f"endpoint {format_element(x.endpoint)}"]
    for (src, i), w in x.flow:
        lines.append(f"edge {format_element(o.decode(src))} {i} {w}")
    return "\n".join(lines) + "\n"
