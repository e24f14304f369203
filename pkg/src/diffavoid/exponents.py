"""Closed-form density exponents for the digit constructions and baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

SUBPOLYNOMIAL = "sub-polynomial"


def _log(base: int, x: float) -> float:
    return math.log(x) / math.log(base)


def _check_size(r: int, m: int, what: str = "set size") -> None:
    if not 1 <= r <= m:
        raise ValueError(f"{what} {r} outside [1, {m}]")


def gamma_ruzsa(m: int, k: int, r: int) -> float:
    """``(k - 1 + log_m r) / k`` for a residue set of size ``r`` avoiding k-th powers."""
    if m < 2 or k < 2:
        raise ValueError("need m >= 2 and k >= 2")
    _check_size(r, m)
    return (k - 1 + _log(m, r)) / k


def gamma_chain(m: int, k: int, preperiod: Sequence[int], period: Sequence[int]) -> float:
    """``(k-1) * sum_n log_m|R_n| / k^(n+1)`` for an eventually periodic size sequence.

    The periodic tail is summed as a geometric series, so there is no
    truncation error.
    """
    if m < 2 or k < 2:
        raise ValueError("need m >= 2 and k >= 2")
    if not period:
        raise ValueError("period must be non-empty")
    for r in list(preperiod) + list(period):
        _check_size(r, m)
    P, L = len(preperiod), len(period)
    head = sum(_log(m, r) / k ** (n + 1) for n, r in enumerate(preperiod))
    cycle = sum(_log(m, r) / k ** (P + j + 1) for j, r in enumerate(period))
    tail = cycle / (1.0 - k ** (-L))
    return (k - 1) * (head + tail)


def gamma_chain_pair(m: int, k: int, r1: int, r2: int) -> float:
    """Chain ``(full, R1, R2, R1, R2, ...)``:
    ``(k-1)/k + log_m r1/(k+1) + log_m r2/(k(k+1))``."""
    _check_size(r1, m)
    _check_size(r2, m)
    return (k - 1) / k + _log(m, r1) / (k + 1) + _log(m, r2) / (k * (k + 1))


def chain_partial_sum(m: int, k: int, sizes: Sequence[int]) -> float:
    """Truncated series over the given leading terms only."""
    return (k - 1) * sum(_log(m, r) / k ** (n + 1) for n, r in enumerate(sizes))


def terms_for_epsilon(eps: float) -> int:
    """Smallest ``n`` with ``sum_{j >= n} 2^-j = 2^(1-n) <= eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = 1
    while 2.0 ** (1 - n) > eps:
        n += 1
    return n


def gamma_inhom(m: int, d: int, r: int) -> float:
    """``(d - 1 + log_m r) / d``."""
    if m < 2 or d < 2:
        raise ValueError("need m >= 2 and d >= 2")
    _check_size(r, m)
    return (d - 1 + _log(m, r)) / d


def gamma_multivariate(m: int, k: int, rp: int) -> float:
    """``log_m |R'| / k`` with ``R'`` a residue set modulo ``m^k``."""
    if m < 2 or k < 2:
        raise ValueError("need m >= 2 and k >= 2")
    _check_size(rp, m**k, "R' size")
    return _log(m, rp) / k


def observed_exponent(size: int, N: int) -> float:
    if N < 2 or size < 1:
        raise ValueError("need N >= 2 and a non-empty set")
    return math.log(size) / math.log(N)


@dataclass(frozen=True)
class ExponentReport:
    formula: str
    parameters: dict = field(hash=False)
    value: float
    source: str


def report(formula: str, **params) -> ExponentReport:
    """Evaluate a named formula: ruzsa, chain, chain_periodic2, inhom, multivariate, greedy."""
    if formula == "ruzsa":
        v = gamma_ruzsa(params["m"], params["k"], params["r"])
        src = "digit construction with a k-th-power-free residue set"
    elif formula == "chain":
        v = gamma_chain(params["m"], params["k"], params["preperiod"], params["period"])
        src = "digit construction driven by a residue chain"
    elif formula == "chain_periodic2":
        v = gamma_chain_pair(params["m"], params["k"], params["r1"], params["r2"])
        src = "chain (full, R1, R2, R1, R2, ...)"
    elif formula == "inhom":
        v = gamma_inhom(params["m"], params["d"], params["r"])
        src = "inhomogeneous polynomial digit construction"
    elif formula == "multivariate":
        v = gamma_multivariate(params["m"], params["k"], params["rp"])
        src = "base m^k digit construction for homogeneous forms"
    elif formula == "greedy":
        # |A| >= N / (|B| + 1) with |B| ~ N^(1/d) values below N
        d = params["d"]
        v = 1.0 - 1.0 / d
        src = "greedy scan against a degree-d value set"
    else:
        raise ValueError(f"unknown formula {formula!r}")
    if not 0.0 <= v <= 1.0 + 1e-15:
        raise AssertionError(f"exponent {v} out of range")
    return ExponentReport(formula, dict(params), v, src)


@dataclass(frozen=True)
class CompareRow:
    label: str
    greedy: float | str
    predicted: float
    observed: float
    size: int
    N: int


def compare_report(rows: Sequence[CompareRow]) -> str:
    """Aligned plain-text table sorted by predicted exponent."""
    rows = sorted(rows, key=lambda r: (r.predicted, r.label))
    header = ("instance", "greedy", "predicted", "observed", "|A|", "N")
    body = []
    for r in rows:
        g = r.greedy if isinstance(r.greedy, str) else f"{r.greedy:.4f}"
        body.append((r.label, g, f"{r.predicted:.4f}", f"{r.observed:.4f}", str(r.size), str(r.N)))
    widths = [max(len(x) for x in col) for col in zip(header, *body)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in body]
    return "\n".join(lines)
