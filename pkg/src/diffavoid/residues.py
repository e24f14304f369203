"""Modular arithmetic substrate: residue sets, power/polynomial/form images,
root conditions, and Hensel lifting."""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .polynomials import HomogeneousForm, UnivariatePolynomial

# Largest number of lattice points the general (non-diagonal) form path may visit.
ENUMERATION_BUDGET = 2**30
_TAIL_CHUNK = 2**22


class HypothesisError(ValueError):
    """An input violates a hypothesis that a construction relies on."""


class NotSquareFreeError(HypothesisError):
    pass


class CostBudgetError(ValueError):
    pass


class NotARootError(HypothesisError):
    pass


class SingularRootError(HypothesisError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def is_squarefree(n: int) -> bool:
    if n < 1:
        raise ValueError("square-freeness is defined for positive integers")
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        if n % d == 0:
            n //= d
        d += 1
    return True


def require_squarefree(m: int) -> None:
    if not is_squarefree(m):
        raise NotSquareFreeError(f"modulus {m} is not square-free")


def _check_modulus(m: int) -> None:
    if not isinstance(m, (int, np.integer)) or m < 2:
        raise ValueError(f"modulus must be an integer >= 2, got {m!r}")


@dataclass(frozen=True)
class ResidueSet:
    """Sorted set of residues in ``[0, modulus)``."""

    modulus: int
    elements: tuple[int, ...]

    def __post_init__(self):
        _check_modulus(self.modulus)
        els = tuple(int(e) for e in self.elements)
        for e in els:
            if not 0 <= e < self.modulus:
                raise ValueError(f"residue {e} outside [0, {self.modulus})")
        if any(a >= b for a, b in zip(els, els[1:])):
            raise ValueError("residues must be strictly increasing")
        object.__setattr__(self, "modulus", int(self.modulus))
        object.__setattr__(self, "elements", els)

    @classmethod
    def of(cls, modulus: int, values: Iterable[int]) -> "ResidueSet":
        """Reduce, deduplicate and sort arbitrary integers."""
        _check_modulus(modulus)
        return cls(modulus, tuple(sorted({int(v) % modulus for v in values})))

    @classmethod
    def full(cls, modulus: int) -> "ResidueSet":
        return cls(modulus, tuple(range(modulus)))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, (int, np.integer)) and int(x) in self._members

    @property
    def _members(self) -> frozenset[int]:
        # frozen dataclass: cache by hand
        try:
            return self.__dict__["_member_cache"]
        except KeyError:
            s = frozenset(self.elements)
            object.__setattr__(self, "_member_cache", s)
            return s

    def differences(self) -> set[int]:
        """Ordered-pair difference set ``{(a - b) mod m}``, including 0 when non-empty."""
        m = self.modulus
        return {(a - b) % m for a in self.elements for b in self.elements}

    def nonzero_differences(self) -> set[int]:
        return self.differences() - {0}

    def scaled(self, factor: int) -> "ResidueSet":
        return ResidueSet.of(self.modulus, (factor * e for e in self.elements))

    def shifted(self, offset: int) -> "ResidueSet":
        return ResidueSet.of(self.modulus, (e + offset for e in self.elements))

    def is_full(self) -> bool:
        return len(self.elements) == self.modulus

    def render(self) -> str:
        return f"m={self.modulus}:{{{','.join(map(str, self.elements))}}}"

    __str__ = render

    @classmethod
    def parse(cls, text: str) -> "ResidueSet":
        match = re.fullmatch(r"\s*m=(\d+):\{([\d,\s]*)\}\s*", text)
        if not match:
            raise ValueError(f"not a residue set rendering: {text!r}")
        body = [int(t) for t in re.split(r"[,\s]+", match.group(2)) if t]
        return cls(int(match.group(1)), tuple(body))


def power_residues(m: int, k: int) -> ResidueSet:
    """``{x^k mod m : x in [0, m)}``."""
    _check_modulus(m)
    if k < 1:
        raise ValueError("power must be >= 1")
    return ResidueSet.of(m, (pow(x, k, m) for x in range(m)))


def poly_image_mod(f: UnivariatePolynomial, m: int) -> ResidueSet:
    _check_modulus(m)
    return ResidueSet.of(m, (f.eval_mod(x, m) for x in range(m)))


def root_condition_univariate(f: UnivariatePolynomial, m: int) -> bool:
    """True iff ``f(x) = 0 (mod m)`` only for ``x = 0`` in ``[0, m)``.

    Raises :class:`NotSquareFreeError` for non-square-free ``m``.
    """
    _check_modulus(m)
    require_squarefree(m)
    return all(f.eval_mod(x, m) != 0 for x in range(1, m))


# --- forms -----------------------------------------------------------------


def _sumset_mod(a: int, values: Iterable[int], M: int) -> int:
    """Bitset sumset ``A + V`` in Z/M, with ``A`` given as an M-bit mask."""
    full = (1 << M) - 1
    out = 0
    for v in set(values):
        v %= M
        out |= ((a << v) | (a >> (M - v))) & full if v else a
    return out


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _diagonal_image(F: HomogeneousForm, M: int) -> ResidueSet:
    k = F.degree
    powers = {pow(x, k, M) for x in range(M)}
    acc = 1  # {0}
    for c in F.diagonal_coefficients():
        acc = _sumset_mod(acc, (c * p for p in powers), M)
    return ResidueSet(M, tuple(_bits(acc)))


def _general_chunks(F: HomogeneousForm, M: int, m: int | None, budget: int):
    """Yield ``(values, nonzero_mask)`` arrays covering ``[0, M)^n``.

    ``nonzero_mask`` marks points with some coordinate not divisible by ``m``
    (``None`` when ``m`` is not given).
    """
    n = F.arity
    if M**n > budget:
        raise CostBudgetError(
            f"general form enumeration needs {M}^{n} points, over the budget of {budget}"
        )
    if M > 2**31:
        raise CostBudgetError("modulus too large for vectorised enumeration")
    tail = 1
    while tail < n and M ** (tail + 1) <= _TAIL_CHUNK:
        tail += 1
    head = n - tail
    grid = np.indices((M,) * tail).reshape(tail, -1).astype(np.int64)
    tail_terms = []
    for exps, c in F.terms:
        arr = np.ones(grid.shape[1], dtype=np.int64)
        for j in range(tail):
            e = exps[head + j]
            if e:
                table = np.array([pow(x, e, M) for x in range(M)], dtype=np.int64)
                arr = (arr * table[grid[j]]) % M
        tail_terms.append((exps[:head], c % M, arr))
    tail_zero = None
    if m is not None:
        tail_zero = np.all(grid % m == 0, axis=0)
    for hx in itertools.product(range(M), repeat=head):
        acc = np.zeros(grid.shape[1], dtype=np.int64)
        for hexps, c, arr in tail_terms:
            hf = c
            for x, e in zip(hx, hexps):
                if e:
                    hf = hf * pow(x, e, M) % M
            if hf:
                acc = (acc + hf * arr) % M
        mask = None
        if m is not None:
            if all(x % m == 0 for x in hx):
                mask = ~tail_zero
            else:
                mask = np.ones_like(tail_zero)
        yield acc, mask


def form_image_mod(F: HomogeneousForm, M: int, *, budget: int = ENUMERATION_BUDGET) -> ResidueSet:
    """``{F(x) mod M : x in [0, M)^n}``; diagonal forms fold one variable at a time."""
    _check_modulus(M)
    if F.is_diagonal:
        return _diagonal_image(F, M)
    seen = np.zeros(M, dtype=bool)
    for values, _ in _general_chunks(F, M, None, budget):
        seen[values] = True
    return ResidueSet(M, tuple(int(v) for v in np.flatnonzero(seen)))


def form_image_mod_enumerated(
    F: HomogeneousForm, M: int, *, budget: int = ENUMERATION_BUDGET
) -> ResidueSet:
    """Image by brute-force enumeration regardless of shape (cross-check path)."""
    _check_modulus(M)
    seen = np.zeros(M, dtype=bool)
    for values, _ in _general_chunks(F, M, None, budget):
        seen[values] = True
    return ResidueSet(M, tuple(int(v) for v in np.flatnonzero(seen)))


def _diagonal_root_condition(F: HomogeneousForm, m: int, M: int) -> bool:
    k = F.degree
    zero_class = {pow(x, k, M) for x in range(0, M, m)}
    unit_class = {pow(x, k, M) for x in range(M) if x % m}
    # s0: sums using only coordinates = 0 (mod m); s1: sums using at least one other
    s0, s1 = 1, 0
    for c in F.diagonal_coefficients():
        z = [c * v for v in zero_class]
        u = [c * v for v in unit_class]
        s0, s1 = (
            _sumset_mod(s0, z, M),
            _sumset_mod(s1, z + u, M) | _sumset_mod(s0, u, M),
        )
    return not (s1 & 1)


def root_condition_form(
    F: HomogeneousForm, m: int, k: int, *, budget: int = ENUMERATION_BUDGET
) -> bool:
    """True iff every root of ``F`` modulo ``m^k`` has all coordinates divisible by ``m``."""
    _check_modulus(m)
    if k != F.degree:
        raise ValueError(f"k={k} does not match the form degree {F.degree}")
    M = m**k
    if F.is_diagonal:
        return _diagonal_root_condition(F, m, M)
    return root_condition_form_enumerated(F, m, k, budget=budget)


def root_condition_form_enumerated(
    F: HomogeneousForm, m: int, k: int, *, budget: int = ENUMERATION_BUDGET
) -> bool:
    M = m**k
    for values, nonzero in _general_chunks(F, M, m, budget):
        if np.any((values == 0) & nonzero):
            return False
    return True


# --- univariate lifting ----------------------------------------------------


def lemma_divide_check(f: UnivariatePolynomial, m: int, j: int, bound: int) -> bool:
    """Scan ``x in [0, bound]``: ``f(x) = 0 (mod m^j)`` must force ``m^ceil(j/k) | x``.

    ``k`` is the lowest degree of ``f``. Requires the univariate root condition.
    """
    if j < 1 or bound < 0:
        raise ValueError("need j >= 1 and bound >= 0")
    if not root_condition_univariate(f, m):
        raise HypothesisError(f"{f} has a nonzero root modulo {m}")
    k = f.low_degree
    mj = m**j
    need = m ** (-(-j // k))
    return all(x % need == 0 for x in range(bound + 1) if f.eval_mod(x, mj) == 0)


def hensel_lift(f: UnivariatePolynomial, a: int, p: int, N: int) -> int:
    """Lift a simple root ``a`` of ``f`` modulo ``p`` to a root modulo ``p^N``.

    The result is congruent to ``a`` modulo ``p`` and lies in ``[0, p^N)``.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if N < 1:
        raise ValueError("N must be positive")
    if f.eval_mod(a, p) != 0:
        raise NotARootError(f"{a} is not a root of {f} modulo {p}")
    df = f.derivative()
    if df is None or df.eval_mod(a, p) == 0:
        raise SingularRootError(f"f'({a}) = 0 modulo {p}; root is singular")
    root = a % p
    q = p
    for _ in range(1, N):
        q *= p
        # f'(root) stays a unit mod p since root = a (mod p)
        root = (root - f(root) * pow(df(root), -1, q)) % q
    return root


def is_kth_power_residue_stable(w: int, p: int, k: int, N: int) -> bool:
    """Whether ``w`` is a ``k``-th power modulo ``p^N`` (for ``p`` not dividing ``k`` or ``w``).

    Decided modulo ``p`` and, when a root exists, lifted to ``p^N`` to produce
    an explicit witness.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1 or N < 1:
        raise ValueError("need k >= 1 and N >= 1")
    if k % p == 0:
        raise HypothesisError(f"p={p} divides k={k}")
    if w % p == 0:
        raise HypothesisError(f"p={p} divides w={w}")
    base = next((x for x in range(1, p) if pow(x, k, p) == w % p), None)
    if base is None:
        return False
    f = UnivariatePolynomial(((k, 1), (0, -w)))
    root = hensel_lift(f, base, p, N)
    q = p**N
    assert pow(root, k, q) == w % q
    return True


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def unit_gcd(a: int, m: int) -> bool:
    return math.gcd(a, m) == 1
