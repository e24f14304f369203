"""Brute-force oracles: difference avoidance, the ``{x, x+y, x+y^k}`` configuration,
value sieves, and exact small-modulus ``r_k``.

Nothing here shares code with the clique search; the oracles are meant to
check it.
"""

from __future__ import annotations

import enum
import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .polynomials import UnivariatePolynomial
from .residues import HypothesisError, is_prime

_CHUNK_CELLS = 1 << 22
SIEVE_LIMIT = 10**8
BRUTE_FORCE_LIMIT = 40


class Verdict(str, enum.Enum):
    EXHAUSTIVE = "verified-exhaustive"
    SAMPLED = "verified-sampled"
    REFUTED = "refuted"


@dataclass(frozen=True)
class AvoidanceCertificate:
    set_digest: str
    N: int
    variant: str
    parameters: dict = field(hash=False)
    verdict: Verdict
    witness: tuple[int, ...] | None
    checked: int
    method: str
    elapsed: float

    @property
    def verified(self) -> bool:
        return self.verdict is not Verdict.REFUTED

    def to_dict(self) -> dict:
        return {
            "setDigest": self.set_digest,
            "N": self.N,
            "variant": self.variant,
            "parameters": self.parameters,
            "verdict": self.verdict.value,
            "witness": list(self.witness) if self.witness is not None else None,
            "checked": self.checked,
            "method": self.method,
            "elapsed": self.elapsed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AvoidanceCertificate":
        w = d.get("witness")
        return cls(
            set_digest=d["setDigest"],
            N=d["N"],
            variant=d["variant"],
            parameters=d["parameters"],
            verdict=Verdict(d["verdict"]),
            witness=tuple(w) if w is not None else None,
            checked=d["checked"],
            method=d["method"],
            elapsed=d["elapsed"],
        )


def set_digest(elements: Iterable[int]) -> str:
    h = hashlib.sha256()
    for x in elements:
        h.update(b"%d\n" % int(x))
    return "sha256:" + h.hexdigest()


def _as_sorted_array(A) -> np.ndarray:
    arr = np.asarray(A.array() if hasattr(A, "array") else list(A), dtype=np.int64)
    if len(arr) > 1 and np.any(np.diff(arr) <= 0):
        raise ValueError("set must be strictly increasing")
    return arr


def _first_hits(chunks, scan, threads: int):
    """Run ``scan`` over chunks; return the earliest (lowest chunk index) hit."""
    if threads <= 1 or len(chunks) == 1:
        for c in chunks:
            hit = scan(c)
            if hit is not None:
                return hit
        return None
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(scan, chunks))
    return next((h for h in results if h is not None), None)


# --- polynomial values ---------------------------------------------------------


def poly_value_bound(f: UnivariatePolynomial, N: int) -> int:
    """``B`` with ``|f(x)| > N`` whenever ``|x| > B`` (leading-term domination)."""
    d = f.degree
    if d == 0:
        return 0
    lead = abs(f.leading_coefficient)
    lower = sum(abs(c) for e, c in f.terms if e < d)
    B = max(1, -(-2 * lower // lead))
    while lead * B**d < 2 * N:
        B += 1
    return B


def enumerate_poly_values(f: UnivariatePolynomial, N: int) -> np.ndarray:
    """Sorted distinct values of ``f`` on the integers that lie in ``[1, N]``."""
    if N < 1:
        raise ValueError("N must be positive")
    B = poly_value_bound(f, N)
    vals = {v for x in range(-B, B + 1) if 1 <= (v := f(x)) <= N}
    return np.array(sorted(vals), dtype=np.int64)


def sums_of_two_squares_sieve(N: int) -> np.ndarray:
    """Boolean array over ``[0, N]`` marking ``x^2 + y^2`` (0 itself excluded)."""
    if N < 1:
        raise ValueError("N must be positive")
    marks = np.zeros(N + 1, dtype=bool)
    r = math.isqrt(N)
    for x in range(r + 1):
        top = math.isqrt(N - x * x)
        if top < x:
            break
        y = np.arange(x, top + 1, dtype=np.int64)
        marks[x * x + y * y] = True
    marks[0] = False
    return marks


def sums_of_k_powers_sieve(N: int, k: int, s: int) -> np.ndarray:
    """Boolean array over ``[0, N]`` marking sums of ``s`` non-negative ``k``-th powers
    (terms may be zero; the all-zero sum is excluded)."""
    if N < 1 or k < 1 or s < 1:
        raise ValueError("need N, k, s >= 1")
    if N > SIEVE_LIMIT:
        raise MemoryError(f"sieve up to {N} exceeds the {SIEVE_LIMIT} limit")
    powers = []
    x = 0
    while x**k <= N:
        powers.append(x**k)
        x += 1
    reach = np.zeros(N + 1, dtype=bool)
    reach[0] = True
    for _ in range(s):
        nxt = np.zeros_like(reach)
        for p in powers:
            nxt[p:] |= reach[: N + 1 - p]
        reach = nxt
    reach[0] = False
    return reach


def values_from_marks(marks: np.ndarray) -> np.ndarray:
    return np.flatnonzero(marks).astype(np.int64)


# --- difference avoidance --------------------------------------------------------


def verify_difference_avoidance(
    A,
    values,
    *,
    N: int | None = None,
    variant: str = "explicit",
    parameters: dict | None = None,
    threads: int = 1,
) -> AvoidanceCertificate:
    """Exhaustively check ``a + v not in A`` for all ``a`` in ``A`` and ``v`` in ``values``.

    Chooses between scanning element/value pairs and scanning element pairs,
    whichever is cheaper; both report the violation with the smallest
    ``(a, v)``, as the witness ``(a, a + v, v)``.
    """
    start = time.perf_counter()
    arr = _as_sorted_array(A)
    vals = np.unique(np.asarray(values, dtype=np.int64))
    if len(vals) and vals[0] < 1:
        raise ValueError("values must be positive")
    digest = set_digest(arr)
    if N is None:
        N = int(arr[-1]) if len(arr) else 0
    params = dict(parameters or {})

    def cert(verdict, witness, checked, method):
        return AvoidanceCertificate(
            digest, N, variant, params, verdict, witness, checked, method,
            time.perf_counter() - start,
        )

    if len(arr) < 2 or not len(vals):
        return cert(Verdict.EXHAUSTIVE, None, 0, "trivial")

    top = int(arr[-1])
    n = len(arr)
    by_values = n * len(vals) <= n * (n - 1) // 2
    if by_values:
        member = np.zeros(top + 1, dtype=bool)
        member[arr] = True
        rows = max(1, _CHUNK_CELLS // len(vals))

        def scan(lo):
            a = arr[lo : lo + rows]
            s = a[:, None] + vals[None, :]
            inside = s <= top
            hit = inside & member[np.where(inside, s, 0)]
            if hit.any():
                i, j = divmod(int(np.argmax(hit)), hit.shape[1])
                return int(a[i]), int(vals[j])
            return None

        method = "element-value scan"
        checked = n * len(vals)
    else:
        vmax = int(vals[-1])
        is_value = np.zeros(vmax + 1, dtype=bool)
        is_value[vals] = True
        rows = max(1, _CHUNK_CELLS // n)

        def scan(lo):
            a = arr[lo : lo + rows]
            diff = arr[None, :] - a[:, None]
            inside = (diff > 0) & (diff <= vmax)
            hit = inside & is_value[np.where(inside, diff, 0)]
            if hit.any():
                i, j = divmod(int(np.argmax(hit)), hit.shape[1])
                return int(a[i]), int(arr[j] - a[i])
            return None

        method = "pairwise difference scan"
        checked = n * (n - 1) // 2

    hit = _first_hits(list(range(0, n, rows)), scan, threads)
    if hit is not None:
        a, v = hit
        return cert(Verdict.REFUTED, (a, a + v, v), checked, method)
    return cert(Verdict.EXHAUSTIVE, None, checked, method)


def replay_difference_witness(A, values, witness: Sequence[int]) -> bool:
    """True iff the witness ``(a, b, v)`` really is a violation."""
    a, b, v = witness
    members = set(int(x) for x in _as_sorted_array(A))
    return a in members and b in members and b - a == v and v in set(int(x) for x in values)


def verify_difference_sampled(cs, values, *, samples: int = 10**6, seed: int = 0) -> AvoidanceCertificate:
    """Random ``(element, value)`` spot checks through digit membership.

    For sets too large to materialise; never counts as exhaustive.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    vals = np.unique(np.asarray(values, dtype=np.int64))
    b = cs.spec.base
    digits = cs.digits
    elem = np.ones(samples, dtype=np.int64)
    w = 1
    for D in digits:
        elem += np.asarray(D.elements, dtype=np.int64)[rng.integers(0, len(D), samples)] * w
        w *= b
    v = vals[rng.integers(0, len(vals), samples)]
    target = elem + v - 1
    ok = target < w  # beyond the top digit means outside the set
    rest = target.copy()
    for D in digits:
        allowed = np.zeros(b, dtype=bool)
        allowed[list(D.elements)] = True
        ok &= allowed[rest % b]
        rest //= b
    violations = np.flatnonzero(ok)
    witness = None
    verdict = Verdict.SAMPLED
    if len(violations):
        i = int(violations[0])
        witness = (int(elem[i]), int(elem[i] + v[i]), int(v[i]))
        verdict = Verdict.REFUTED
    return AvoidanceCertificate(
        "sha256:lazy", cs.N, cs.spec.variant.value, cs.spec.to_dict(), verdict,
        witness, samples, "uniform sampling", time.perf_counter() - start,
    )


def sample_difference_avoidance(
    A, values, *, samples: int = 10**6, seed: int = 0, N: int | None = None
) -> AvoidanceCertificate:
    """Random ``(element, value)`` spot checks on an explicit set."""
    start = time.perf_counter()
    arr = _as_sorted_array(A)
    vals = np.unique(np.asarray(values, dtype=np.int64))
    rng = np.random.default_rng(seed)
    witness = None
    if len(arr) and len(vals):
        a = arr[rng.integers(0, len(arr), samples)]
        v = vals[rng.integers(0, len(vals), samples)]
        pos = np.searchsorted(arr, a + v)
        hit = (pos < len(arr)) & (arr[np.minimum(pos, len(arr) - 1)] == a + v)
        if hit.any():
            i = int(np.argmax(hit))
            witness = (int(a[i]), int(a[i] + v[i]), int(v[i]))
    return AvoidanceCertificate(
        set_digest(arr), N if N is not None else (int(arr[-1]) if len(arr) else 0),
        "explicit", {}, Verdict.REFUTED if witness else Verdict.SAMPLED,
        witness, samples, "uniform sampling", time.perf_counter() - start,
    )


# --- non-linear Roth ---------------------------------------------------------------


def _shift_order(k: int, N: int) -> np.ndarray:
    """Nonzero ``y`` with ``|y^k| <= N - 1``, ordered 1, -1, 2, -2, ..."""
    r = 1
    while (r + 1) ** k <= N - 1:
        r += 1
    if r**k > N - 1:
        return np.zeros(0, dtype=np.int64)
    ys = []
    for t in range(1, r + 1):
        ys.extend((t, -t))
    return np.array(ys, dtype=np.int64)


def verify_nonlinear_roth(A, k: int, N: int, *, threads: int = 1) -> AvoidanceCertificate:
    """Search for ``x, x + y, x + y^k`` all in ``A`` with ``y != 0`` (either sign)."""
    start = time.perf_counter()
    if k < 1:
        raise ValueError("k must be positive")
    arr = _as_sorted_array(A)
    if len(arr) and (arr[0] < 1 or arr[-1] > N):
        raise ValueError("set must lie in [1, N]")
    digest = set_digest(arr)
    ys = _shift_order(k, N)
    yk = ys**k
    member = np.zeros(N + 1, dtype=bool)
    member[arr] = True
    rows = max(1, _CHUNK_CELLS // max(1, len(ys)))
    counted = 0

    def scan(lo):
        x = arr[lo : lo + rows][:, None]
        far = x + yk[None, :]
        near = x + ys[None, :]
        inside = (far >= 1) & (far <= N) & (near >= 1) & (near <= N)
        hit = inside & member[np.where(inside, far, 0)] & member[np.where(inside, near, 0)]
        if hit.any():
            i, j = divmod(int(np.argmax(hit)), hit.shape[1])
            return int(x[i, 0]), int(ys[j])
        return None

    if len(ys) and len(arr):
        # range checks only depend on x; count them for the certificate
        for lo in range(0, len(arr), rows):
            x = arr[lo : lo + rows][:, None]
            far = x + yk[None, :]
            counted += int(((far >= 1) & (far <= N)).sum())
        hit = _first_hits(list(range(0, len(arr), rows)), scan, threads)
    else:
        hit = None
    verdict = Verdict.REFUTED if hit is not None else Verdict.EXHAUSTIVE
    return AvoidanceCertificate(
        digest, N, "nonlinear-roth", {"k": k}, verdict,
        hit, counted, "element-shift scan", time.perf_counter() - start,
    )


def replay_roth_witness(A, k: int, witness: Sequence[int]) -> bool:
    x, y = witness
    members = set(int(v) for v in _as_sorted_array(A))
    return y != 0 and x in members and x + y in members and x + y**k in members


# --- exact r_k by subset enumeration --------------------------------------------


def brute_force_r_k(m: int, k: int) -> tuple[int, tuple[int, ...]]:
    """Exact ``max |R|`` over subsets of Z/m whose nonzero differences avoid k-th powers.

    Depth-first subset enumeration with an explicit pairwise difference test;
    by translation invariance the subset may be assumed to contain 0.
    """
    if not 2 <= m <= BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force supports 2 <= m <= {BRUTE_FORCE_LIMIT}, got {m}")
    powers = {pow(x, k, m) for x in range(m)} - {0}

    def compatible(a: int, b: int) -> bool:
        return (a - b) % m not in powers and (b - a) % m not in powers

    best: list[int] = [0]

    def extend(chosen: list[int], options: list[int]) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        for i, c in enumerate(options):
            if len(chosen) + len(options) - i <= len(best):
                return
            rest = [o for o in options[i + 1 :] if compatible(c, o)]
            chosen.append(c)
            extend(chosen, rest)
            chosen.pop()

    extend([0], [x for x in range(1, m) if compatible(0, x)])
    return len(best), tuple(best)


@dataclass(frozen=True)
class PrimePowerReport:
    p: int
    k: int
    lhs: int
    rhs: int

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def check_prime_power_identity(p: int, k: int) -> PrimePowerReport:
    """Compare ``r_k(p^k)`` with ``p^(k-1) r_k(p)`` using exact oracles."""
    if not is_prime(p):
        raise HypothesisError(f"{p} is not prime")
    if k < 2:
        raise ValueError("k must be at least 2")
    if k % p == 0:
        raise HypothesisError(f"p={p} divides k={k}")
    M = p**k
    if M <= BRUTE_FORCE_LIMIT:
        lhs = brute_force_r_k(M, k)[0]
    else:
        from .search import r_k

        res = r_k(M, k)
        if not res.optimal:
            raise RuntimeError("clique search did not finish")
        lhs = res.size
    rhs = p ** (k - 1) * brute_force_r_k(p, k)[0]
    return PrimePowerReport(p, k, lhs, rhs)


# name used by existing callers
check_prop_51 = check_prime_power_identity
