"""Closed-form growth bounds for F_m/R' in terms of the shortest relation length rho.

Integer conditions are evaluated exactly; only the final growth bound is a float.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass


class DomainError(ValueError):
    pass


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def goods_bound(m: int, k: int) -> int:
    """Lower bound 4m(m-1)^2(2m-1)^(k-4) on the number of good words of length k."""
    _need(m >= 2 and k >= 4, f"goods_bound needs m >= 2 and k >= 4, got m={m}, k={k}")
    return 4 * m * (m - 1) ** 2 * (2 * m - 1) ** (k - 4)


def saw_threshold(C: int, k: int) -> int:
    """Products of good words of length k are self-avoiding once rho exceeds this."""
    return C * k * (2 * k - 3) + 2 * k - 2


def rhok_holds(C: int, k: int, rho: int) -> bool:
    _need(C >= 1 and k >= 2, f"rhok_holds needs C >= 1 and k >= 2, got C={C}, k={k}")
    return rho > saw_threshold(C, k)


def rhock_holds(C: int, k: int, rho: int) -> bool:
    _need(C >= 1 and k >= 4, f"rhock_holds needs C >= 1 and k >= 4, got C={C}, k={k}")
    return rho >= C * k * (2 * k - 3) + 2 * k - 1


def max_valid_k(C: int, rho: int) -> int | None:
    """Largest k >= 4 with rho >= Ck(2k-3)+2k-1, or None."""
    _need(C >= 1, f"C must be >= 1, got {C}")
    if not rhock_holds(C, 4, rho):
        return None
    # the threshold is strictly increasing in k
    k = 4
    while rhock_holds(C, k + 1, rho):
        k += 1
    return k


def thm1_bound(m: int, k: int) -> float:
    """(2m-1) * (4m(m-1)^2 / (2m-1)^4)^(1/k); equals goods_bound(m, k)^(1/k)."""
    _need(m >= 2 and k >= 4, f"thm1_bound needs m >= 2 and k >= 4, got m={m}, k={k}")
    q = 2 * m - 1
    return q * (4 * m * (m - 1) ** 2 / q ** 4) ** (1.0 / k)


def chain_k(C: int, rho: int) -> int:
    """floor(sqrt(rho / 2C)) in exact integer arithmetic."""
    _need(C >= 1 and rho >= 1, f"chain_k needs C >= 1 and rho >= 1, got C={C}, rho={rho}")
    # floor(sqrt(x)) == isqrt(floor(x)) for x >= 0
    return math.isqrt(rho // (2 * C))


@dataclass
class BoundReport:
    m: int
    C: int
    rho: int
    k_used: int | None
    lemma2_ok: bool
    thm1_ok: bool
    lower_bound: float | None
    dk_bound: int | None
    chain_k: int
    vacuous: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.lower_bound is not None:
            d["lower_bound"] = float(f"{self.lower_bound:.10g}")
        return d


def bound_report(m: int, C: int, rho: int) -> BoundReport:
    _need(m >= 2, f"m must be >= 2, got {m}")
    _need(C >= 1, f"C must be >= 1, got {C}")
    _need(rho >= 1, f"rho must be >= 1, got {rho}")
    k = max_valid_k(C, rho)
    if k is None:
        return BoundReport(m, C, rho, None, False, False, None, None, chain_k(C, rho), True)
    return BoundReport(
        m=m, C=C, rho=rho, k_used=k,
        lemma2_ok=rhok_holds(C, k, rho),
        thm1_ok=rhock_holds(C, k, rho),
        lower_bound=thm1_bound(m, k),
        dk_bound=goods_bound(m, k),
        chain_k=chain_k(C, rho),
        vacuous=False,
    )
