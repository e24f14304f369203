"""Sparse integer polynomials: univariate ``f(x)`` and homogeneous forms ``F(x1..xn)``.

Both types are immutable and evaluate with exact Python integers. A small
parser reads the textual grammar used on the command line::

    expr     := ['+'|'-'] monomial (('+'|'-') monomial)*
    monomial := [integer ['*']] factor ('*'? factor)*  |  integer
    factor   := variable ['^' integer]

Univariate polynomials use the variable ``x``; forms use ``x1, x2, ...``.
Parentheses are not supported.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class PolynomialSyntaxError(ValueError):
    pass


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")
_FACTOR = re.compile(r"(x\d*)(?:\s*(?:\^|\*\*)\s*(\d+))?")
_COEF = re.compile(r"(\d+)\s*\*?\s*")


def _split_terms(text: str) -> list[tuple[int, str]]:
    text = text.strip()
    if not text:
        raise PolynomialSyntaxError("empty polynomial")
    if text[0] not in "+-":
        text = "+" + text
    parts = _TERM_SPLIT.split(text)
    # parts = ['', sign, body, sign, body, ...]
    if parts[0].strip():
        raise PolynomialSyntaxError(f"cannot parse {text!r}")
    out = []
    for sign, body in zip(parts[1::2], parts[2::2]):
        body = body.strip()
        if not body:
            raise PolynomialSyntaxError(f"dangling sign in {text!r}")
        out.append((-1 if sign == "-" else 1, body))
    return out


def _parse_monomial(body: str) -> tuple[int, dict[str, int]]:
    pos = 0
    coef = 1
    m = _COEF.match(body)
    if m:
        coef = int(m.group(1))
        pos = m.end()
    powers: dict[str, int] = {}
    while pos < len(body):
        if body[pos] in " *":
            pos += 1
            continue
        f = _FACTOR.match(body, pos)
        if not f:
            raise PolynomialSyntaxError(f"unexpected {body[pos:]!r} in monomial {body!r}")
        var, exp = f.group(1), f.group(2)
        powers[var] = powers.get(var, 0) + (int(exp) if exp is not None else 1)
        pos = f.end()
    if body.rstrip().endswith("*"):
        raise PolynomialSyntaxError(f"dangling '*' in {body!r}")
    return coef, powers


@dataclass(frozen=True)
class UnivariatePolynomial:
    """``f(x) = sum a_i x^i`` stored as sorted ``(exponent, coefficient)`` pairs."""

    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        merged: dict[int, int] = {}
        for e, c in self.terms:
            if e < 0:
                raise ValueError("negative exponent")
            merged[e] = merged.get(e, 0) + c
        canon = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        if not canon:
            raise ValueError("zero polynomial")
        object.__setattr__(self, "terms", canon)

    @classmethod
    def from_coefficients(cls, coeffs: dict[int, int]) -> "UnivariatePolynomial":
        return cls(tuple(coeffs.items()))

    @classmethod
    def monomial(cls, k: int, coefficient: int = 1) -> "UnivariatePolynomial":
        return cls(((k, coefficient),))

    @classmethod
    def parse(cls, text: str) -> "UnivariatePolynomial":
        coeffs: dict[int, int] = {}
        for sign, body in _split_terms(text):
            c, powers = _parse_monomial(body)
            extra = set(powers) - {"x"}
            if extra:
                raise PolynomialSyntaxError(f"unknown variable(s) {sorted(extra)} in {text!r}")
            e = powers.get("x", 0)
            coeffs[e] = coeffs.get(e, 0) + sign * c
        try:
            return cls.from_coefficients(coeffs)
        except ValueError as exc:
            raise PolynomialSyntaxError(str(exc)) from None

    @property
    def low_degree(self) -> int:
        return self.terms[0][0]

    @property
    def degree(self) -> int:
        return self.terms[-1][0]

    @property
    def leading_coefficient(self) -> int:
        return self.terms[-1][1]

    def coefficient(self, i: int) -> int:
        for e, c in self.terms:
            if e == i:
                return c
        return 0

    @property
    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __call__(self, x: int) -> int:
        return sum(c * x**e for e, c in self.terms)

    def eval_mod(self, x: int, m: int) -> int:
        return sum(c * pow(x, e, m) for e, c in self.terms) % m

    def derivative(self) -> "UnivariatePolynomial | None":
        """Formal derivative; ``None`` for a constant."""
        d = {e - 1: e * c for e, c in self.terms if e > 0}
        return UnivariatePolynomial.from_coefficients(d) if d else None

    def __str__(self) -> str:
        out = []
        for e, c in self.terms:
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                var = "x" if e == 1 else f"x^{e}"
                body = var if a == 1 else f"{a}{var}"
            out.append((sign, body))
        first_sign, first = out[0]
        s = ("-" if first_sign == "-" else "") + first
        return s + "".join(f"{sg}{b}" for sg, b in out[1:])


@dataclass(frozen=True)
class HomogeneousForm:
    """Homogeneous integer form of degree ``degree`` in ``arity`` variables.

    ``terms`` holds ``(exponent_vector, coefficient)`` pairs; each exponent
    vector has length ``arity`` and sums to ``degree``.
    """

    arity: int
    degree: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be positive")
        if self.degree < 2:
            raise ValueError("form degree must be at least 2")
        merged: dict[tuple[int, ...], int] = {}
        for exps, c in self.terms:
            exps = tuple(exps)
            if len(exps) != self.arity or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps}")
            if sum(exps) != self.degree:
                raise ValueError(f"monomial {exps} is not of degree {self.degree}")
            merged[exps] = merged.get(exps, 0) + c
        canon = tuple(sorted(((e, c) for e, c in merged.items() if c != 0), reverse=True))
        if not canon:
            raise ValueError("form has no nonzero coefficient")
        object.__setattr__(self, "terms", canon)

    @classmethod
    def diagonal(cls, coefficients: Sequence[int], degree: int) -> "HomogeneousForm":
        """``sum c_i x_i^degree``."""
        n = len(coefficients)
        terms = []
        for i, c in enumerate(coefficients):
            exps = [0] * n
            exps[i] = degree
            terms.append((tuple(exps), c))
        return cls(n, degree, tuple(terms))

    @classmethod
    def power_sum(cls, count: int, degree: int) -> "HomogeneousForm":
        return cls.diagonal([1] * count, degree)

    @classmethod
    def parse(cls, text: str, arity: int | None = None) -> "HomogeneousForm":
        raw: list[tuple[int, dict[int, int]]] = []
        top = 0
        for sign, body in _split_terms(text):
            c, powers = _parse_monomial(body)
            idx: dict[int, int] = {}
            for var, e in powers.items():
                if var == "x" or not var[1:].isdigit() or int(var[1:]) < 1:
                    raise PolynomialSyntaxError(f"forms use variables x1, x2, ...; got {var!r}")
                i = int(var[1:])
                idx[i] = idx.get(i, 0) + e
                top = max(top, i)
            raw.append((sign * c, idx))
        n = arity if arity is not None else top
        if n < top:
            raise PolynomialSyntaxError(f"variable x{top} exceeds arity {n}")
        degrees = {sum(idx.values()) for _, idx in raw}
        if len(degrees) != 1:
            raise PolynomialSyntaxError(f"{text!r} is not homogeneous")
        k = degrees.pop()
        terms = []
        for c, idx in raw:
            exps = [0] * n
            for i, e in idx.items():
                exps[i - 1] = e
            terms.append((tuple(exps), c))
        try:
            return cls(n, k, tuple(terms))
        except ValueError as exc:
            raise PolynomialSyntaxError(str(exc)) from None

    def __call__(self, xs: Sequence[int]) -> int:
        total = 0
        for exps, c in self.terms:
            v = c
            for x, e in zip(xs, exps):
                if e:
                    v *= x**e
            total += v
        return total

    @property
    def is_diagonal(self) -> bool:
        seen = set()
        for exps, _ in self.terms:
            nz = [i for i, e in enumerate(exps) if e]
            if len(nz) != 1 or nz[0] in seen:
                return False
            seen.add(nz[0])
        return True

    def diagonal_coefficients(self) -> list[int]:
        """Per-variable coefficient of ``x_i^k`` (0 where absent). Diagonal forms only."""
        if not self.is_diagonal:
            raise ValueError("form is not diagonal")
        coeffs = [0] * self.arity
        for exps, c in self.terms:
            i = next(i for i, e in enumerate(exps) if e)
            coeffs[i] = c
        return coeffs

    def __str__(self) -> str:
        parts = []
        for exps, c in self.terms:
            factors = [f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
            a = abs(c)
            body = ("" if a == 1 else str(a)) + "*".join(factors)
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return s + "".join(sg + b for sg, b in parts[1:])


def parse_int_list(text: str) -> list[int]:
    """Parse ``"0,3,6"`` (braces and whitespace tolerated)."""
    text = text.strip().strip("{}[]")
    if not text:
        return []
    return [int(t) for t in re.split(r"[,\s]+", text) if t]


def as_tuple(values: Iterable[int]) -> tuple[int, ...]:
    return tuple(int(v) for v in values)
