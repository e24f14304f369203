"""Difference-constraint graphs over Z/m and exact maximum-clique search.

Graphs are stored as Python-int bitsets (one adjacency mask per vertex). The
clique solver is a branch-and-bound over a degeneracy vertex order with a
greedy-colouring upper bound recomputed at every node.
"""

from __future__ import annotations

import io
import os
import time
from dataclasses import dataclass, replace, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence, TextIO

from .exponents import gamma_chain_pair
from .polynomials import UnivariatePolynomial
from .residues import (
    HypothesisError,
    ResidueSet,
    power_residues,
    require_squarefree,
)

DEFAULT_MAX_MAXIMAL_CLIQUES = 10**6


def _low_index(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Graph:
    """Undirected simple graph on vertices ``0..n-1`` with bitset adjacency."""

    def __init__(self, n: int, adj: Sequence[int]):
        if n < 2:
            raise ValueError("graphs need at least two vertices")
        if len(adj) != n:
            raise ValueError("adjacency length mismatch")
        self.n = n
        self.adj = tuple(adj)
        for v, mask in enumerate(self.adj):
            if mask >> v & 1:
                raise ValueError(f"self-loop at {v}")
            if mask >> n:
                raise ValueError(f"vertex {v} has a neighbour out of range")
            for u in _members(mask):
                if not self.adj[u] >> v & 1:
                    raise ValueError(f"asymmetric edge {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, adj)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in _members(self.adj[u] >> (u + 1)):
                yield u, u + 1 + v

    @property
    def edge_count(self) -> int:
        return sum(mask.bit_count() for mask in self.adj) // 2

    def is_clique(self, vertices: Iterable[int]) -> bool:
        vs = list(vertices)
        if len(set(vs)) != len(vs):
            return False
        return all(self.has_edge(a, b) for i, a in enumerate(vs) for b in vs[i + 1 :])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))


class DifferenceGraph(Graph):
    """Circulant graph on Z/m: ``a ~ b`` iff neither ``a-b`` nor ``b-a`` is a forbidden nonzero residue."""

    def __init__(self, modulus: int, forbidden: ResidueSet):
        if forbidden.modulus != modulus:
            raise ValueError(
                f"forbidden set has modulus {forbidden.modulus}, graph has {modulus}"
            )
        self.modulus = modulus
        self.forbidden = forbidden
        bad = {d for d in forbidden if d} | {(-d) % modulus for d in forbidden if d}
        allowed = 0
        for d in range(1, modulus):
            if d not in bad:
                allowed |= 1 << d
        full = (1 << modulus) - 1
        adj = []
        for a in range(modulus):
            # rotate the allowed-difference mask so bit b is set iff (b - a) allowed
            rot = ((allowed << a) | (allowed >> (modulus - a))) & full if a else allowed
            adj.append(rot)
        super().__init__(modulus, adj)


def build_difference_graph(m: int, forbidden: ResidueSet) -> DifferenceGraph:
    return DifferenceGraph(m, forbidden)


# --- DIMACS --------------------------------------------------------------------


def write_dimacs(graph: Graph, out: TextIO | str | os.PathLike) -> None:
    """DIMACS clique format: ``p edge n e`` then 1-indexed ``e u v`` lines."""
    if isinstance(out, (str, os.PathLike)):
        with open(out, "w", encoding="utf-8") as fh:
            write_dimacs(graph, fh)
        return
    if isinstance(graph, DifferenceGraph):
        out.write(f"c difference graph, forbidden {graph.forbidden.render()}\n")
    out.write(f"p edge {graph.n} {graph.edge_count}\n")
    for u, v in graph.edges():
        out.write(f"e {u + 1} {v + 1}\n")


def dimacs_text(graph: Graph) -> str:
    buf = io.StringIO()
    write_dimacs(graph, buf)
    return buf.getvalue()


def read_dimacs(source: TextIO | str | os.PathLike) -> Graph:
    if isinstance(source, (str, os.PathLike)) and Path(source).exists():
        with open(source, encoding="utf-8") as fh:
            return read_dimacs(fh)
    if isinstance(source, str):
        source = io.StringIO(source)
    n = None
    declared = None
    edges = []
    for lineno, line in enumerate(source, 1):
        parts = line.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "col"):
                raise ValueError(f"line {lineno}: bad problem line {line.strip()!r}")
            n, declared = int(parts[2]), int(parts[3])
        elif parts[0] == "e":
            if n is None:
                raise ValueError(f"line {lineno}: edge before problem line")
            u, v = int(parts[1]), int(parts[2])
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"line {lineno}: vertex out of range")
            edges.append((u - 1, v - 1))
        else:
            raise ValueError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise ValueError("missing problem line")
    g = Graph.from_edges(n, edges)
    if declared is not None and declared not in (g.edge_count, len(edges)):
        raise ValueError(f"header declares {declared} edges, found {g.edge_count}")
    return g


# --- maximum clique -----------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    witness: ResidueSet
    size: int
    optimal: bool
    nodes: int
    elapsed: float

    def __post_init__(self):
        if self.size != len(self.witness):
            raise ValueError("size does not match witness")


class _BudgetExhausted(Exception):
    pass


def degeneracy_order(graph: Graph) -> list[int]:
    """Reverse of the min-degree peeling order, so the densest core comes first.

    Ties break on the smallest vertex label.
    """
    n = graph.n
    deg = [mask.bit_count() for mask in graph.adj]
    alive = (1 << n) - 1
    removed = []
    for _ in range(n):
        v = min(_members(alive), key=lambda x: (deg[x], x))
        removed.append(v)
        alive &= ~(1 << v)
        for u in _members(graph.adj[v] & alive):
            deg[u] -= 1
    return removed[::-1]


def _greedy_clique(adj: Sequence[int], n: int) -> list[int]:
    cand = (1 << n) - 1
    clique = []
    while cand:
        v = _low_index(cand)
        clique.append(v)
        cand &= adj[v]
    return clique


def max_clique(
    graph: Graph,
    *,
    time_limit: float | None = None,
    node_limit: int | None = None,
    floor: int = 0,
) -> SearchResult:
    """Largest clique by branch and bound.

    ``floor`` prunes every branch that cannot beat a clique of that size; if
    no clique larger than ``floor`` exists the returned witness is just the
    best clique seen (possibly smaller than ``floor``) and ``optimal`` means
    the search space was exhausted. Budget exhaustion returns the incumbent
    with ``optimal=False``.
    """
    start = time.perf_counter()
    n = graph.n
    order = degeneracy_order(graph)
    pos = {v: i for i, v in enumerate(order)}
    adj = [0] * n
    for v in range(n):
        mask = 0
        for u in _members(graph.adj[v]):
            mask |= 1 << pos[u]
        adj[pos[v]] = mask

    best = _greedy_clique(adj, n)
    best_size = max(len(best), floor)
    nodes = 0
    deadline = None if time_limit is None else start + time_limit
    cur: list[int] = []

    def colour_sort(p: int) -> tuple[list[int], list[int]]:
        verts, bounds = [], []
        colour = 0
        uncoloured = p
        while uncoloured:
            colour += 1
            q = uncoloured
            while q:
                low = q & -q
                v = low.bit_length() - 1
                q &= ~low & ~adj[v]
                uncoloured &= ~low
                verts.append(v)
                bounds.append(colour)
        return verts, bounds

    def expand(p: int) -> None:
        nonlocal best, best_size, nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise _BudgetExhausted
        if deadline is not None and nodes & 255 == 0 and time.perf_counter() > deadline:
            raise _BudgetExhausted
        verts, bounds = colour_sort(p)
        depth = len(cur)
        for i in range(len(verts) - 1, -1, -1):
            if depth + bounds[i] <= best_size:
                return
            v = verts[i]
            cur.append(v)
            np_ = p & adj[v]
            if np_:
                expand(np_)
            elif depth + 1 > best_size:
                best = list(cur)
                best_size = depth + 1
            cur.pop()
            p &= ~(1 << v)

    optimal = True
    try:
        expand((1 << n) - 1)
    except _BudgetExhausted:
        optimal = False

    witness = sorted(order[i] for i in best)
    if not graph.is_clique(witness):
        raise AssertionError("search returned a non-clique")
    return SearchResult(
        witness=ResidueSet(n, tuple(witness)),
        size=len(witness),
        optimal=optimal,
        nodes=nodes,
        elapsed=time.perf_counter() - start,
    )


def r_k(m: int, k: int, *, time_limit: float | None = None, node_limit: int | None = None) -> SearchResult:
    """Largest subset of Z/m whose nonzero differences avoid the nonzero ``k``-th powers.

    The witness is reported as its least translate containing 0.
    """
    if m < 2 or k < 2:
        raise ValueError("need m >= 2 and k >= 2")
    g = build_difference_graph(m, power_residues(m, k))
    res = max_clique(g, time_limit=time_limit, node_limit=node_limit)
    witness = ResidueSet(m, canonical_translate(res.witness, m))
    if not g.is_clique(witness):
        raise AssertionError("translate of a clique is not a clique")
    return replace(res, witness=witness)


def lift_r_set(R: ResidueSet, m: int, k: int) -> ResidueSet:
    """``{u0 + u1 m + ... + u_{k-1} m^{k-1} : u0 in R}`` as a residue set mod ``m^k``."""
    if R.modulus != m:
        raise ValueError(f"set modulus {R.modulus} differs from m={m}")
    require_squarefree(m)
    M = m**k
    step = m
    out = [r for r in R]
    for _ in range(1, k):
        out = [x + u * step for u in range(m) for x in out]
        step *= m
    return ResidueSet.of(M, out)


# --- chains -------------------------------------------------------------------


@dataclass(frozen=True)
class ChainSpec:
    """Eventually periodic sequence ``R_0, R_1, ...`` of residue sets mod ``modulus``.

    ``R_n`` is ``preperiod[n]`` for ``n < len(preperiod)`` and then cycles
    through ``period``.
    """

    modulus: int
    poly: UnivariatePolynomial
    preperiod: tuple[ResidueSet, ...]
    period: tuple[ResidueSet, ...]
    validated: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise ValueError("period must be non-empty")
        for R in self.preperiod + self.period:
            if R.modulus != self.modulus:
                raise ValueError(f"set {R.render()} does not have modulus {self.modulus}")
            if not len(R):
                raise ValueError("chain sets must be non-empty")

    @classmethod
    def power(
        cls, m: int, k: int, preperiod: Sequence[ResidueSet], period: Sequence[ResidueSet]
    ) -> "ChainSpec":
        return cls(m, UnivariatePolynomial.monomial(k), tuple(preperiod), tuple(period))

    @property
    def k(self) -> int | None:
        """The exponent when the chain map is ``x^k``, else ``None``."""
        if self.poly.is_monomial and self.poly.leading_coefficient == 1:
            return self.poly.degree
        return None

    def __getitem__(self, n: int) -> ResidueSet:
        if n < 0:
            raise IndexError(n)
        if n < len(self.preperiod):
            return self.preperiod[n]
        return self.period[(n - len(self.preperiod)) % len(self.period)]

    def validate(self) -> "ChainSpec":
        """Return a copy flagged as validated, or raise :class:`HypothesisError`."""
        check = validate_chain(self)
        if not check.valid:
            raise HypothesisError(
                f"chain fails at index {check.failing_index}: {check.reason}"
            )
        return ChainSpec(self.modulus, self.poly, self.preperiod, self.period, validated=True)

    def render(self) -> str:
        pre = ";".join(R.render() for R in self.preperiod)
        per = ";".join(R.render() for R in self.period)
        return f"f={self.poly} pre=[{pre}] period=[{per}]"


@dataclass(frozen=True)
class ChainCheck:
    valid: bool
    failing_index: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.valid


def _image_of_differences(f: UnivariatePolynomial, R: ResidueSet) -> set[int]:
    m = R.modulus
    return {f.eval_mod(d, m) for d in R.differences()}


def successor_conflicts(f: UnivariatePolynomial, prev: ResidueSet, nxt: ResidueSet) -> set[int]:
    """Nonzero residues in ``(nxt - nxt) & f(prev - prev)``."""
    return nxt.nonzero_differences() & _image_of_differences(f, prev)


def validate_chain(chain: ChainSpec) -> ChainCheck:
    """Check ``(R_{n+1} - R_{n+1}) & f(R_n - R_n) <= {0}`` for every consecutive pair,
    including the wrap from the last period set back to the first."""
    f = chain.poly
    last = len(chain.preperiod) + len(chain.period)
    for n in range(last):
        bad = successor_conflicts(f, chain[n], chain[n + 1])
        if bad:
            return ChainCheck(False, n, f"differences {sorted(bad)} of R_{n + 1} lie in f(R_{n} - R_{n})")
    return ChainCheck(True)


def pair_forbidden(f: UnivariatePolynomial, R1: ResidueSet) -> ResidueSet:
    """Residues ``d`` ruled out as differences of a set alternating with ``R1``.

    ``d`` is forbidden when ``d`` lies in ``f(R1 - R1)`` (the set follows R1) or
    ``f(d)`` lies in ``R1 - R1`` (R1 follows the set); 0 is never reported.
    """
    m = R1.modulus
    D = R1.nonzero_differences()
    fD = _image_of_differences(f, R1) - {0}
    return ResidueSet(m, tuple(d for d in range(1, m) if d in fD or f.eval_mod(d, m) in D))


def maximal_cliques(
    graph: Graph, *, containing: int | None = None, limit: int | None = None,
    deadline: float | None = None,
) -> Iterator[list[int]]:
    """Bron-Kerbosch with Tomita pivoting. Raises :class:`_BudgetExhausted` past ``limit``/``deadline``."""
    adj = graph.adj
    count = 0

    def bk(r: list[int], p: int, x: int) -> Iterator[list[int]]:
        nonlocal count
        if not p and not x:
            count += 1
            if limit is not None and count > limit:
                raise _BudgetExhausted
            if deadline is not None and time.perf_counter() > deadline:
                raise _BudgetExhausted
            yield list(r)
            return
        px = p | x
        pivot = max(_members(px), key=lambda u: (p & adj[u]).bit_count())
        for v in _members(p & ~adj[pivot]):
            r.append(v)
            yield from bk(r, p & adj[v], x & adj[v])
            r.pop()
            p &= ~(1 << v)
            x |= 1 << v

    full = (1 << graph.n) - 1
    if containing is None:
        yield from bk([], full, 0)
    else:
        yield from bk([containing], adj[containing], 0)


def canonical_translate(R: Sequence[int], m: int) -> tuple[int, ...]:
    """Lexicographically least translate of ``R`` that contains 0."""
    return min(tuple(sorted((r - t) % m for r in R)) for t in R)


@dataclass(frozen=True)
class ChainPairResult:
    R1: ResidueSet
    R2: ResidueSet
    gamma: float
    optimal: bool
    candidates_examined: int
    elapsed: float

    @property
    def sizes(self) -> tuple[int, int]:
        return len(self.R1), len(self.R2)


def r1_candidates(
    m: int, k: int, *, limit: int = DEFAULT_MAX_MAXIMAL_CLIQUES, deadline: float | None = None
) -> tuple[list[ResidueSet], bool]:
    """Maximal cliques of the k-th-power graph up to translation, largest first.

    Returns ``(candidates, complete)``; ``complete`` is False if the
    enumeration hit ``limit`` or ``deadline``.
    """
    g = build_difference_graph(m, power_residues(m, k))
    seen: set[tuple[int, ...]] = set()
    complete = True
    try:
        for c in maximal_cliques(g, containing=0, limit=limit, deadline=deadline):
            seen.add(canonical_translate(c, m))
    except _BudgetExhausted:
        complete = False
    ordered = sorted(seen, key=lambda t: (-len(t), t))
    return [ResidueSet(m, t) for t in ordered], complete


def search_chain_pair(
    m: int,
    k: int = 2,
    *,
    time_limit: float | None = None,
    max_cliques: int = DEFAULT_MAX_MAXIMAL_CLIQUES,
    R1: ResidueSet | None = None,
) -> ChainPairResult:
    """Best ``(R1, R2)`` for the chain ``(full, R1, R2, R1, R2, ...)`` under ``x^k``.

    Candidates for ``R1`` are maximal cliques of the ``k``-th-power difference
    graph, visited by decreasing size; each is paired with a maximum clique
    of its ``R2`` constraint graph. The exponent is increasing in
    ``|R1|^k * |R2|``, which is compared exactly. Pass ``R1`` to pin the first
    set and only solve the second stage.
    """
    require_squarefree(m)
    if k < 2:
        raise ValueError("k must be at least 2")
    start = time.perf_counter()
    deadline = None if time_limit is None else start + time_limit
    f = UnivariatePolynomial.monomial(k)

    if R1 is not None:
        if R1.modulus != m:
            raise ValueError("pinned R1 has the wrong modulus")
        if R1.nonzero_differences() & (set(power_residues(m, k)) - {0}):
            raise HypothesisError(f"{R1.render()} has a difference that is a {k}th power mod {m}")
        candidates, optimal = [R1], True
    else:
        candidates, optimal = r1_candidates(m, k, limit=max_cliques, deadline=deadline)

    best: tuple[ResidueSet, ResidueSet] | None = None
    best_key = 0
    examined = 0
    for cand in candidates:
        weight = len(cand) ** k
        if weight * m <= best_key:
            break
        remaining = None
        if deadline is not None:
            remaining = deadline - time.perf_counter()
            if remaining <= 0:
                optimal = False
                break
        g2 = build_difference_graph(m, pair_forbidden(f, cand))
        res = max_clique(g2, time_limit=remaining, floor=best_key // weight)
        examined += 1
        if weight * res.size > best_key:
            best = (cand, ResidueSet(m, canonical_translate(res.witness, m)))
            best_key = weight * res.size
        if not res.optimal:
            optimal = False
            break

    if best is None:
        # budget ran out before the first candidate finished
        first = candidates[0] if candidates else ResidueSet(m, (0,))
        best = (first, ResidueSet(m, (0,)))
    R1_best, R2_best = best
    return ChainPairResult(
        R1=R1_best,
        R2=R2_best,
        gamma=gamma_chain_pair(m, k, len(R1_best), len(R2_best)),
        optimal=optimal,
        candidates_examined=examined,
        elapsed=time.perf_counter() - start,
    )
