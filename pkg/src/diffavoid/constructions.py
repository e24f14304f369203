"""Digit-based set builders and the greedy baseline.

Every builder returns a :class:`ConstructedSet` whose elements are
``1 + sum u_i b^i`` over digits ``u_i`` drawn from per-position residue sets.
"""

from __future__ import annotations

import enum
import itertools
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .polynomials import HomogeneousForm, UnivariatePolynomial
from .residues import (
    HypothesisError,
    ResidueSet,
    form_image_mod,
    poly_image_mod,
    power_residues,
    require_squarefree,
    root_condition_form,
    root_condition_univariate,
)
from .search import ChainSpec, successor_conflicts

MAX_MATERIALIZED = 10**7
MAX_ELEMENT = 2**63 - 1


class RootConditionError(HypothesisError):
    pass


class CoefficientError(HypothesisError):
    pass


class ResidueSetError(HypothesisError):
    pass


class DigitThresholdError(HypothesisError):
    pass


class ChainNotValidatedError(HypothesisError):
    pass


class Variant(str, enum.Enum):
    RUZSA = "ruzsa"
    NONLINEAR_ROTH = "nonlinear-roth"
    INHOM = "inhom"
    MULTIVARIATE = "multivariate"
    GREEDY = "greedy"


def digit_class(i: int, k: int) -> int:
    """Chain index used at digit position ``i``: 1 at ``i = 0``, 0 when ``k`` does not
    divide ``i``, otherwise the exact power of ``k`` dividing ``i``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if i < 0:
        raise ValueError("digit index must be non-negative")
    if i == 0:
        return 1
    n = 0
    while i % k == 0:
        i //= k
        n += 1
    return n


def _ceil(x: Fraction | int) -> int:
    return math.ceil(x)


@dataclass(frozen=True)
class ConstructionSpec:
    variant: Variant
    Y: int | None = None
    m: int | None = None
    k: int | None = None
    poly: UnivariatePolynomial | None = None
    form: HomogeneousForm | None = None
    residues: ResidueSet | None = None
    chain: ChainSpec | None = None
    X: Fraction | None = None
    N: int | None = None
    forbidden: tuple[int, ...] | None = None

    @property
    def base(self) -> int | None:
        if self.variant is Variant.MULTIVARIATE:
            return self.m**self.k
        return self.m

    def to_dict(self) -> dict:
        d: dict = {"variant": self.variant.value, "N": self.N}
        for name in ("Y", "m", "k"):
            v = getattr(self, name)
            if v is not None:
                d[name] = v
        if self.poly is not None:
            d["f"] = str(self.poly)
        if self.form is not None:
            d["F"] = str(self.form)
        if self.residues is not None:
            d["Rp" if self.variant is Variant.MULTIVARIATE else "R"] = self.residues.render()
        if self.chain is not None:
            d["chain"] = self.chain.render()
        if self.X is not None:
            d["X"] = str(self.X)
        if self.forbidden is not None:
            d["forbidden"] = list(self.forbidden)
        return d

    def render(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True, eq=False)
class ConstructedSet:
    """A constructed subset of ``[1, N]``.

    ``elements`` is a sorted int64 array, or ``None`` when the set exceeds
    :data:`MAX_MATERIALIZED`; ``digits`` (low position first) then supports
    lazy iteration and membership.
    """

    spec: ConstructionSpec
    size: int
    size_bound: int
    elements: np.ndarray | None = None
    digits: tuple[ResidueSet, ...] | None = field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.spec.N

    def __len__(self) -> int:
        return self.size

    @property
    def materialized(self) -> bool:
        return self.elements is not None

    def __contains__(self, x: int) -> bool:
        x = int(x)
        if not 1 <= x <= self.N:
            return False
        if self.elements is not None:
            i = int(np.searchsorted(self.elements, x))
            return i < len(self.elements) and int(self.elements[i]) == x
        b = self.spec.base
        x -= 1
        for D in self.digits:
            if x % b not in D:
                return False
            x //= b
        return x == 0

    def __iter__(self) -> Iterator[int]:
        if self.elements is not None:
            yield from (int(x) for x in self.elements)
            return
        b = self.spec.base
        weights = [b**i for i in range(len(self.digits))]
        high_first = [tuple(D) for D in reversed(self.digits)]
        for combo in itertools.product(*high_first):
            yield 1 + sum(u * w for u, w in zip(combo, reversed(weights)))

    def array(self) -> np.ndarray:
        if self.elements is None:
            raise ValueError(f"set of size {self.size} is not materialised")
        return self.elements


def _digit_elements(base: int, digits: Sequence[ResidueSet]) -> np.ndarray:
    """Sorted ``1 + sum u_i base^i``; built from the top digit down so the result is ordered."""
    arr = np.zeros(1, dtype=np.int64)
    for D in reversed(digits):
        d = np.asarray(D.elements, dtype=np.int64)
        arr = (arr[:, None] * base + d[None, :]).ravel()
    return arr + 1


def _finish(spec: ConstructionSpec, digits: Sequence[ResidueSet], bound: int) -> ConstructedSet:
    base = spec.base
    Y = len(digits)
    if base**Y > MAX_ELEMENT:
        raise ValueError(f"{base}^{Y} exceeds the 63-bit element range")
    size = math.prod(len(D) for D in digits)
    elements = _digit_elements(base, digits) if size <= MAX_MATERIALIZED else None
    if size < bound:
        raise AssertionError(f"constructed {size} elements, below the counting bound {bound}")
    return ConstructedSet(spec, size, bound, elements, tuple(digits))


def _check_Y(Y: int) -> None:
    if not isinstance(Y, int) or Y < 1:
        raise ValueError(f"digit length must be a positive integer, got {Y!r}")


# --- non-linear Roth -----------------------------------------------------------


def build_nonlinear_roth(chain: ChainSpec, Y: int) -> ConstructedSet:
    """Digits ``u_i`` drawn from ``R_{digit_class(i, k)}``; no ``{x, x+y, x+y^k}`` with ``y != 0``."""
    _check_Y(Y)
    if not chain.validated:
        raise ChainNotValidatedError("chain must pass validate_chain before building")
    k = chain.k
    if k is None:
        raise HypothesisError("non-linear Roth construction needs the chain map x^k")
    require_squarefree(chain.modulus)
    m = chain.modulus
    # digit 0 draws from R_1 and meets R_1 itself; automatic when R_0 is full
    bad = successor_conflicts(chain.poly, chain[1], chain[1])
    if bad:
        raise HypothesisError(f"differences {sorted(bad)} of R_1 lie in f(R_1 - R_1)")
    digits = [chain[digit_class(i, k)] for i in range(Y)]
    spec = ConstructionSpec(Variant.NONLINEAR_ROTH, Y=Y, m=m, k=k, chain=chain, N=m**Y)
    return _finish(spec, digits, size_lower_bound(spec))


# --- inhomogeneous polynomials -------------------------------------------------


def inhom_cutoff(Y: int, k: int, d: int) -> Fraction:
    """Digits below this position with ``k | i`` are constrained."""
    return Fraction(k * (Y + 1), d) if d > k else Fraction(Y)


def _dominates(m: int, f: UnivariatePolynomial, Y: int) -> bool:
    """Whether every ``x`` reachable in the high-digit case satisfies ``|f(x)| >= m^Y``.

    The smallest such ``|x|`` is ``m^ceil(j0/k)`` with ``j0 = ceil(X)``; once
    ``|x| > 2 sum_{i<d} |a_i| / |a_d|`` the leading term dominates and
    ``|f(x)| > |a_d| |x|^d / 2 >= |a_d| m^(Y+1) / 2 >= m^Y``.
    """
    k, d = f.low_degree, f.degree
    X = inhom_cutoff(Y, k, d)
    j0 = _ceil(X)
    if j0 >= Y:
        return True
    x_min = m ** _ceil(Fraction(j0, k))
    lower = sum(abs(c) for e, c in f.terms if e < d)
    return x_min * abs(f.leading_coefficient) > 2 * lower


def inhom_admissible(m: int, f: UnivariatePolynomial, Y: int) -> bool:
    return Y >= 1 and _dominates(m, f, Y)


def inhom_digit_threshold(m: int, f: UnivariatePolynomial) -> int:
    """Smallest ``Y0`` such that every ``Y >= Y0`` is admissible."""
    k, d = f.low_degree, f.degree
    if d == k:
        return 1
    # once ceil(X) < Y the domination test is monotone in Y
    Y, last_fail = 1, 0
    while True:
        if _ceil(inhom_cutoff(Y, k, d)) < Y:
            if _dominates(m, f, Y):
                return last_fail + 1
            last_fail = Y
        Y += 1


def check_inhom_hypotheses(m: int, f: UnivariatePolynomial, R: ResidueSet) -> None:
    require_squarefree(m)
    k = f.low_degree
    if k < 2:
        raise HypothesisError(f"lowest degree of {f} must be at least 2, got {k}")
    if not root_condition_univariate(f, m):
        raise RootConditionError(f"{f} has a nonzero root modulo {m}")
    a_k = f.coefficient(k)
    if math.gcd(a_k, m) != 1:
        raise CoefficientError(f"gcd(a_k={a_k}, m={m}) != 1")
    if R.modulus != m:
        raise ResidueSetError(f"R has modulus {R.modulus}, expected {m}")
    powers = set(power_residues(m, k)) - {0}
    bad = R.nonzero_differences() & powers
    if bad:
        raise ResidueSetError(f"differences {sorted(bad)} of R are {k}th powers mod {m}")
    # digit 0 is compared against f itself, not just a_k x^k
    image = set(poly_image_mod(f, m)) - {0}
    bad = R.scaled(a_k).nonzero_differences() & image
    if bad:
        raise ResidueSetError(
            f"differences {sorted(bad)} of a_k*R are values of {f} mod {m}"
        )


def build_inhom_poly(m: int, f: UnivariatePolynomial, R: ResidueSet, Y: int) -> ConstructedSet:
    """Differences avoid ``f(Z) \\ {0}``: constrained digits (``i < X``, ``k | i``) come from ``a_k R``."""
    _check_Y(Y)
    check_inhom_hypotheses(m, f, R)
    if not inhom_admissible(m, f, Y):
        raise DigitThresholdError(
            f"Y={Y} is too small for {f} mod {m}; need Y >= {inhom_digit_threshold(m, f)}"
        )
    k, d = f.low_degree, f.degree
    X = inhom_cutoff(Y, k, d)
    scaled = R.scaled(f.coefficient(k))
    full = ResidueSet.full(m)
    digits = [scaled if (i < X and i % k == 0) else full for i in range(Y)]
    variant = Variant.RUZSA if f.is_monomial and f.leading_coefficient == 1 else Variant.INHOM
    spec = ConstructionSpec(variant, Y=Y, m=m, k=k, poly=f, residues=R, X=X, N=m**Y)
    return _finish(spec, digits, size_lower_bound(spec))


def build_ruzsa(m: int, k: int, R: ResidueSet, Y: int) -> ConstructedSet:
    return build_inhom_poly(m, UnivariatePolynomial.monomial(k), R, Y)


# --- homogeneous forms -------------------------------------------------------


def check_multivariate_hypotheses(m: int, k: int, Rp: ResidueSet, form: HomogeneousForm) -> None:
    if m < 2:
        raise ValueError("m must be at least 2")
    M = m**k
    if form.degree != k:
        raise HypothesisError(f"form degree {form.degree} != k={k}")
    if Rp.modulus != M:
        raise ResidueSetError(f"R' has modulus {Rp.modulus}, expected m^k = {M}")
    if not root_condition_form(form, m, k):
        raise RootConditionError(f"{form} has a root modulo {M} not divisible by {m}")
    image = set(form_image_mod(form, M)) - {0}
    bad = Rp.nonzero_differences() & image
    if bad:
        raise ResidueSetError(f"differences {sorted(bad)} of R' are values of {form} mod {M}")


def build_multivariate(m: int, k: int, Rp: ResidueSet, Y: int, form: HomogeneousForm) -> ConstructedSet:
    """Base ``m^k`` digits all drawn from ``R'``; differences avoid ``F(Z^n) \\ {0}``."""
    _check_Y(Y)
    check_multivariate_hypotheses(m, k, Rp, form)
    spec = ConstructionSpec(Variant.MULTIVARIATE, Y=Y, m=m, k=k, form=form, residues=Rp, N=(m**k) ** Y)
    return _finish(spec, [Rp] * Y, size_lower_bound(spec))


# --- greedy -------------------------------------------------------------------


def build_greedy(N: int, forbidden: Sequence[int]) -> ConstructedSet:
    """Scan ``1..N`` keeping ``x`` unless ``x - a`` is forbidden for a kept ``a``."""
    if N < 1:
        raise ValueError("N must be positive")
    vals = np.unique(np.asarray(list(forbidden), dtype=np.int64))
    if len(vals) and (vals[0] < 1 or vals[-1] > N):
        raise ValueError("forbidden values must lie in [1, N]")
    blocked = np.zeros(N + 1, dtype=bool)
    kept = []
    for x in range(1, N + 1):
        if blocked[x]:
            continue
        kept.append(x)
        hit = x + vals
        blocked[hit[hit <= N]] = True
    spec = ConstructionSpec(Variant.GREEDY, N=N, forbidden=tuple(int(v) for v in vals))
    elements = np.asarray(kept, dtype=np.int64)
    bound = size_lower_bound(spec)
    if len(elements) < bound:
        raise AssertionError("greedy scan fell below its guarantee")
    return ConstructedSet(spec, len(elements), bound, elements)


# --- counting ---------------------------------------------------------------


def size_lower_bound(spec: ConstructionSpec) -> int:
    """Counting lower bound from the construction's digit census."""
    v = spec.variant
    if v is Variant.NONLINEAR_ROTH:
        k, Y, chain = spec.k, spec.Y, spec.chain
        # position 0 uses R_1; among 1 <= i < Y exactly
        # ceil(Y/k^n) - ceil(Y/k^(n+1)) positions have k-adic valuation n
        total = len(chain[1])
        n = 0
        while _ceil(Fraction(Y, k**n)) > 1:
            count = _ceil(Fraction(Y, k**n)) - _ceil(Fraction(Y, k ** (n + 1)))
            total *= len(chain[n]) ** count
            n += 1
        return total
    if v in (Variant.INHOM, Variant.RUZSA):
        m, Y, k = spec.m, spec.Y, spec.k
        constrained = _ceil(min(spec.X, Fraction(Y)) / k)
        r = len(spec.residues)
        return r**constrained * m ** (Y - constrained)
    if v is Variant.MULTIVARIATE:
        return len(spec.residues) ** spec.Y
    if v is Variant.GREEDY:
        return -(-spec.N // (len(spec.forbidden) + 1))
    raise ValueError(f"unknown variant {v}")


# --- set files ----------------------------------------------------------------


def write_set_file(path: str | os.PathLike, cs: ConstructedSet) -> None:
    """Newline-delimited decimals after a ``#`` header carrying the spec."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + cs.spec.render() + "\n")
        for x in cs:
            fh.write(f"{x}\n")


class SetFileError(ValueError):
    pass


def read_set_file(path: str | os.PathLike) -> tuple[dict, np.ndarray]:
    header: dict = {}
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if lineno == 1 and body.startswith("{"):
                    try:
                        header = json.loads(body)
                    except json.JSONDecodeError as exc:
                        raise SetFileError(f"{path}: bad header: {exc}") from None
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise SetFileError(f"{path}:{lineno}: not an integer: {line!r}") from None
    arr = np.asarray(values, dtype=np.int64)
    if len(arr) and (np.any(np.diff(arr) <= 0) or arr[0] < 1):
        raise SetFileError(f"{path}: elements must be positive and strictly increasing")
    return header, arr
