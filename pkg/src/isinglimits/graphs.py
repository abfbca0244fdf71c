"""Graphs on ``p`` labelled vertices stored as edge bitmasks.

Vertex pairs ``(s, t)`` with ``s < t`` are numbered lexicographically from 0,
so on ``p = 4`` the pairs are ``(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)``.
Bit ``i`` of :attr:`Graph.edges` is set iff pair ``i`` is an edge.  This
numbering is also the index of every parameter vector in :mod:`isinglimits.ising`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Literal, Optional

from .errors import (
    DimensionMismatch,
    EmptyClass,
    InfeasibleEnumeration,
    PreconditionViolated,
)

MAX_P = 24
MAX_ENUM_P = 8


@lru_cache(maxsize=None)
def pair_list(p: int) -> tuple[tuple[int, int], ...]:
    """All vertex pairs ``(s, t)``, ``s < t``, in canonical order."""
    return tuple((s, t) for s in range(p) for t in range(s + 1, p))


def n_pairs(p: int) -> int:
    return p * (p - 1) // 2


def pair_index(s: int, t: int, p: int) -> int:
    """Canonical index of the unordered pair ``{s, t}``."""
    if s == t:
        raise PreconditionViolated("self-loops have no pair index")
    if s > t:
        s, t = t, s
    if not (0 <= s and t < p):
        raise PreconditionViolated(f"pair ({s},{t}) out of range for p={p}")
    # pairs before row s: sum_{r<s} (p-1-r)
    return s * (2 * p - s - 1) // 2 + (t - s - 1)


@lru_cache(maxsize=None)
def incidence_masks(p: int) -> tuple[int, ...]:
    """Per-vertex bitmask of the pairs touching that vertex."""
    masks = [0] * p
    for i, (s, t) in enumerate(pair_list(p)):
        masks[s] |= 1 << i
        masks[t] |= 1 << i
    return tuple(masks)


@dataclass(frozen=True)
class Graph:
    p: int
    edges: int = 0

    def __post_init__(self):
        if not 1 <= self.p <= MAX_P:
            raise PreconditionViolated(f"p must lie in [1, {MAX_P}], got {self.p}")
        if self.edges < 0 or self.edges >> n_pairs(self.p):
            raise PreconditionViolated("edge bitmask has bits beyond C(p,2)")

    @classmethod
    def from_edges(cls, p: int, edges: Iterable[tuple[int, int]]) -> Graph:
        mask = 0
        for s, t in edges:
            mask |= 1 << pair_index(s, t, p)
        return cls(p, mask)

    @classmethod
    def empty(cls, p: int) -> Graph:
        return cls(p, 0)

    @classmethod
    def complete(cls, p: int) -> Graph:
        return cls(p, (1 << n_pairs(p)) - 1)

    def edge_indices(self) -> list[int]:
        mask, out, i = self.edges, [], 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return out

    def edge_list(self) -> list[tuple[int, int]]:
        pairs = pair_list(self.p)
        return [pairs[i] for i in self.edge_indices()]

    @property
    def n_edges(self) -> int:
        return bin(self.edges).count("1")

    def has_edge(self, s: int, t: int) -> bool:
        return bool(self.edges >> pair_index(s, t, self.p) & 1)

    def degree(self, s: int) -> int:
        return bin(self.edges & incidence_masks(self.p)[s]).count("1")

    def degrees(self) -> list[int]:
        return [self.degree(s) for s in range(self.p)]

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def neighbors(self, s: int) -> list[int]:
        return [t for t in range(self.p) if t != s and self.has_edge(s, t)]

    def to_text(self) -> str:
        body = ",".join(f"{s}-{t}" for s, t in self.edge_list())
        return f"p={self.p};edges={body}"

    @classmethod
    def from_text(cls, text: str) -> Graph:
        """Parse ``p=<int>;edges=<s-t,...>`` (0-based vertices)."""
        try:
            head, body = text.strip().split(";", 1)
            key, pval = head.split("=", 1)
            ekey, elist = body.split("=", 1)
            if key.strip() != "p" or ekey.strip() != "edges":
                raise ValueError
            p = int(pval)
            edges = []
            for tok in filter(None, (e.strip() for e in elist.split(","))):
                s, t = tok.split("-")
                edges.append((int(s), int(t)))
        except ValueError as exc:
            raise PreconditionViolated(f"malformed graph text {text!r}") from exc
        return cls.from_edges(p, edges)

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class GraphClassSpec:
    """One of the two structural classes, with its weight constraints.

    ``kind`` is ``"degree"`` (max degree at most ``bound``) or ``"edge"``
    (at most ``bound`` edges).  ``lam`` is the minimum edge weight and
    ``omega`` the maximum neighbourhood weight; it defaults to
    ``lam * max_possible_degree``, the smallest value that admits uniform
    weight ``lam`` on every graph of the class.
    """

    kind: Literal["degree", "edge"]
    p: int
    bound: int
    lam: float = 1.0
    omega: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("degree", "edge"):
            raise PreconditionViolated(f"unknown class kind {self.kind!r}")
        if self.p < 1:
            raise PreconditionViolated("p must be at least 1")
        if self.bound < 1:
            raise EmptyClass("class bound must be at least 1")
        if not self.lam > 0:
            raise EmptyClass("lambda must be positive")
        if self.omega is None:
            object.__setattr__(self, "omega", self.lam * self.max_possible_degree)
        if self.kind == "degree" and self.lam * self.bound > self.omega + 1e-12:
            raise EmptyClass(f"lambda*d = {self.lam * self.bound} exceeds omega = {self.omega}")
        if self.lam > self.omega + 1e-12:
            raise EmptyClass(f"lambda = {self.lam} exceeds omega = {self.omega}")

    @classmethod
    def degree(cls, p: int, d: int, lam: float = 1.0, omega: Optional[float] = None):
        return cls("degree", p, d, lam, omega)

    @classmethod
    def edge(cls, p: int, k: int, lam: float = 1.0, omega: Optional[float] = None):
        return cls("edge", p, k, lam, omega)

    @property
    def d(self) -> Optional[int]:
        return self.bound if self.kind == "degree" else None

    @property
    def k(self) -> Optional[int]:
        return self.bound if self.kind == "edge" else None

    @property
    def max_possible_degree(self) -> int:
        """``d`` for the degree class, ``min(k, p-1)`` for the edge class (at least 1)."""
        if self.kind == "degree":
            return self.bound
        return max(1, min(self.bound, self.p - 1))

    def contains(self, g: Graph) -> bool:
        if g.p != self.p or g.edges == 0:
            return False
        if self.kind == "degree":
            return g.max_degree <= self.bound
        return g.n_edges <= self.bound

    def to_dict(self) -> dict:
        return {"kind": self.kind, "p": self.p, "bound": self.bound,
                "lam": self.lam, "omega": self.omega}

    @classmethod
    def from_dict(cls, data: dict) -> GraphClassSpec:
        return cls(data["kind"], int(data["p"]), int(data["bound"]),
                   float(data["lam"]), None if data.get("omega") is None else float(data["omega"]))


def enumerate_class(spec: GraphClassSpec) -> Iterator[Graph]:
    """Yield every non-empty graph of the class in ascending bitmask order.

    Bits are decided from the highest pair index down, trying "absent" before
    "present", which is exactly ascending numeric order of the mask.

    Raises:
        InfeasibleEnumeration: if ``spec.p`` exceeds the enumeration guard.
    """
    p = spec.p
    if p > MAX_ENUM_P:
        raise InfeasibleEnumeration(f"full enumeration is limited to p <= {MAX_ENUM_P}")
    pairs = pair_list(p)
    npairs = len(pairs)
    bound = spec.bound
    by_degree = spec.kind == "degree"
    deg = [0] * p

    def walk(i: int, mask: int, count: int) -> Iterator[int]:
        if i < 0:
            if mask:
                yield mask
            return
        yield from walk(i - 1, mask, count)
        s, t = pairs[i]
        if by_degree:
            if deg[s] < bound and deg[t] < bound:
                deg[s] += 1
                deg[t] += 1
                yield from walk(i - 1, mask | (1 << i), count + 1)
                deg[s] -= 1
                deg[t] -= 1
        elif count < bound:
            yield from walk(i - 1, mask | (1 << i), count + 1)

    for mask in walk(npairs - 1, 0, 0):
        yield Graph(p, mask)


def cardinality_bounds(spec: GraphClassSpec) -> tuple[int, int]:
    """Closed-form lower and upper bounds on the class size.

    For the edge class: ``(C(N,k), k*C(N,k))`` with ``N = C(p,2)``, valid for
    ``k <= N/2``.  For the degree class: ``(floor(p/(d+1))!^(d(d+1)/2),
    K*C(N,K))`` with ``K = floor(p*d/2)``, valid for ``d <= (p-1)/2``.
    """
    p = spec.p
    npairs = n_pairs(p)
    if spec.kind == "edge":
        k = spec.bound
        if 2 * k > npairs:
            raise PreconditionViolated(f"need k <= C(p,2)/2 = {npairs / 2}, got k={k}")
        c = math.comb(npairs, k)
        return c, k * c
    d = spec.bound
    if 2 * d > p - 1:
        raise PreconditionViolated(f"need d <= (p-1)/2 = {(p - 1) / 2}, got d={d}")
    lower = math.factorial(p // (d + 1)) ** (d * (d + 1) // 2)
    kmax = (p * d) // 2
    return lower, kmax * math.comb(npairs, kmax)


def symmetric_difference(g: Graph, h: Graph) -> Graph:
    if g.p != h.p:
        raise DimensionMismatch(f"graphs on {g.p} and {h.p} vertices")
    return Graph(g.p, g.edges ^ h.edges)


@lru_cache(maxsize=1 << 16)
def _max_matching(p: int, mask: int) -> tuple[int, ...]:
    if not mask:
        return ()
    inc = incidence_masks(p)
    pairs = pair_list(p)
    low = (mask & -mask).bit_length() - 1
    s = pairs[low][0]
    # either s stays unmatched ...
    best = _max_matching(p, mask & ~inc[s])
    # ... or s is matched to one of its neighbours
    rest = mask & inc[s]
    while rest:
        i = (rest & -rest).bit_length() - 1
        rest &= rest - 1
        t = pairs[i][1] if pairs[i][0] == s else pairs[i][0]
        cand = _max_matching(p, mask & ~inc[s] & ~inc[t])
        if len(cand) + 1 > len(best):
            best = (i,) + cand
    return best


def maximum_matching(g: Graph) -> list[tuple[int, int]]:
    """A maximum matching of ``g`` as a list of edges (exact)."""
    pairs = pair_list(g.p)
    return sorted(pairs[i] for i in _max_matching(g.p, g.edges))


def matching_number(g: Graph) -> int:
    return len(_max_matching(g.p, g.edges))
