"""Pointwise and global p-energy quantities on vertex functions.

Conventions, for an exponent p > 1 and a function f on S u dS:

    |Df(x)|^p   = sum_{y ~ x} |f(y) - f(x)|^p
    I_p(f, S)   = sum_{x in S} |Df(x)|^p
    Lap_p f(x)  = sum_{y ~ x} |f(y) - f(x)|^{p-2} (f(y) - f(x))

with the convention that a term with f(y) = f(x) contributes exactly zero for
every p > 1 (this matters for 1 < p < 2, where the bare power would blow up).
Signed powers are computed as sign(t) * |t|^{p-1}, which encodes that
convention with no special case, and every sum is accumulated exactly with
math.fsum so the algebraic identities hold to near machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainMismatchError, MissingValueError
from .graphs import Graph, VertexSet


@dataclass(frozen=True)
class Exponent:
    """An exponent p > 1 together with its conjugate q (1/p + 1/q = 1)."""

    p: float
    q: float

    @classmethod
    def of(cls, p) -> "Exponent":
        if isinstance(p, Exponent):
            return p
        p = float(p)
        if not math.isfinite(p) or p <= 1.0:
            raise ValueError(f"exponent must be a finite real > 1, got {p}")
        return cls(p=p, q=p / (p - 1.0))


def as_p(p) -> float:
    return Exponent.of(p).p


def signed_power(t: float, p: float) -> float:
    """sign(t) * |t|^(p-1); exactly zero at t = 0 for every p > 1."""
    if t > 0.0:
        return t ** (p - 1.0)
    if t < 0.0:
        return -((-t) ** (p - 1.0))
    return 0.0


class VertexFunction:
    """A finite real-valued function on a vertex set of one graph."""

    __slots__ = ("domain", "_values")

    def __init__(self, domain: VertexSet, values):
        if isinstance(values, Mapping):
            try:
                vals = {int(v): float(values[v]) for v in domain.ids}
            except KeyError as exc:
                raise MissingValueError(f"no value for vertex {exc.args[0]}") from None
        else:
            seq = list(values)
            if len(seq) != len(domain):
                raise DomainMismatchError(
                    f"{len(seq)} values for a domain of {len(domain)} vertices"
                )
            vals = {v: float(t) for v, t in zip(domain.ids, seq)}
        for v, t in vals.items():
            if not math.isfinite(t):
                raise ValueError(f"non-finite value {t} at vertex {v}")
        self.domain = domain
        self._values = vals

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_dict(cls, graph: Graph, mapping: Mapping[int, float]) -> "VertexFunction":
        return cls(VertexSet(graph, mapping.keys()), mapping)

    @classmethod
    def constant(cls, domain: VertexSet, c: float) -> "VertexFunction":
        return cls(domain, {v: c for v in domain.ids})

    @classmethod
    def indicator(cls, domain: VertexSet, ones: Iterable[int]) -> "VertexFunction":
        ones = set(int(v) for v in ones)
        return cls(domain, {v: 1.0 if v in ones else 0.0 for v in domain.ids})

    # -- access -------------------------------------------------------------

    def __call__(self, v: int) -> float:
        try:
            return self._values[v]
        except KeyError:
            raise MissingValueError(f"vertex {v} outside function domain") from None

    __getitem__ = __call__

    def get(self, v: int, default: float | None = None):
        return self._values.get(v, default)

    def __contains__(self, v) -> bool:
        return v in self._values

    def items(self):
        for v in self.domain.ids:
            yield v, self._values[v]

    def values_on(self, ids: Sequence[int]) -> np.ndarray:
        return np.array([self(v) for v in ids], dtype=float)

    def min(self) -> float:
        return min(self._values.values())

    def max(self) -> float:
        return max(self._values.values())

    def sup_abs(self) -> float:
        return max(abs(t) for t in self._values.values())

    # -- algebra (same domain required) --------------------------------------

    def _binary(self, other, op):
        if isinstance(other, VertexFunction):
            if other.domain != self.domain:
                raise DomainMismatchError("vertex functions on different domains")
            return VertexFunction(
                self.domain, {v: op(self._values[v], other._values[v]) for v in self.domain.ids}
            )
        c = float(other)
        return VertexFunction(self.domain, {v: op(self._values[v], c) for v in self.domain.ids})

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __radd__ = __add__
    __rmul__ = __mul__

    def restrict(self, subset: VertexSet) -> "VertexFunction":
        return VertexFunction(subset, {v: self(v) for v in subset.ids})

    def __repr__(self) -> str:
        return f"VertexFunction(on {len(self.domain)} vertices)"


def _check_neighborhood(f: VertexFunction, x: int, g: Graph) -> None:
    if x not in f:
        raise MissingValueError(f"vertex {x} outside function domain")
    for y in g.neighbors(x):
        if int(y) not in f:
            raise MissingValueError(f"neighbor {int(y)} of {x} outside function domain")


def gradient_p(f: VertexFunction, x: int, p) -> float:
    """|Df(x)|^p, the p-th gradient power at x."""
    p = as_p(p)
    g = f.domain.graph
    _check_neighborhood(f, x, g)
    fx = f(x)
    return math.fsum(abs(f(int(y)) - fx) ** p for y in g.neighbors(x))


def dirichlet_sum(f: VertexFunction, S: VertexSet, p) -> float:
    """I_p(f, S): the vertex-based p-Dirichlet sum over S."""
    p = as_p(p)
    g = S.graph
    for x in S.ids:
        _check_neighborhood(f, x, g)
    return math.fsum(
        abs(f(int(y)) - f(x)) ** p for x in S.ids for y in g.neighbors(x)
    )


def p_laplacian(f: VertexFunction, x: int, p) -> float:
    p = as_p(p)
    g = f.domain.graph
    _check_neighborhood(f, x, g)
    fx = f(x)
    return math.fsum(signed_power(f(int(y)) - fx, p) for y in g.neighbors(x))


def pairing(h: VertexFunction, f: VertexFunction, p) -> float:
    """<Lap_p h, f>: the double sum of |dh|^{p-2} dh * df over directed edges.

    Both functions must cover the full vertex set of one finite graph.
    """
    p = as_p(p)
    g = h.domain.graph
    if f.domain.graph is not g:
        raise DomainMismatchError("functions live on different graphs")
    if len(h.domain) != g.n or len(f.domain) != g.n:
        raise MissingValueError("pairing requires functions on the full vertex set")

    def terms():
        for x in range(g.n):
            hx = h(x)
            fx = f(x)
            for y in g.neighbors(x):
                y = int(y)
                yield signed_power(h(y) - hx, p) * (f(y) - fx)

    return math.fsum(terms())


def edge_energy(f: VertexFunction, g: Graph, p) -> float:
    """Sum over undirected edges of |df|^p; equals I_p(f, V) / 2 on all of V."""
    p = as_p(p)
    return math.fsum(abs(f(int(b)) - f(int(a))) ** p for a, b in g.edges)


def norm(f: VertexFunction, o: int, p, kind: str) -> float:
    """Dp norm (I_p(f,V) + |f(o)|^p)^(1/p) or BDp norm I_p^(1/p) + sup|f|."""
    p = as_p(p)
    g = f.domain.graph
    if len(f.domain) != g.n:
        raise MissingValueError("norms are taken over the full vertex set")
    energy = dirichlet_sum(f, VertexSet(g, range(g.n)), p)
    if kind == "Dp":
        return (energy + abs(f(o)) ** p) ** (1.0 / p)
    if kind == "BDp":
        return energy ** (1.0 / p) + f.sup_abs()
    raise ValueError(f"kind must be 'Dp' or 'BDp', got {kind!r}")
