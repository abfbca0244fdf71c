"""Adversarial model families used in Fano-type lower bounds.

Three families are built here:

* single-edge models (one per vertex pair), ``label="A"``;
* cliques with one edge removed, either several ``(d+1)``-cliques side by
  side for the degree class (``"B_degree"``) or a single ``m``-clique for the
  edge class (``"B_edge"``);
* every graph of a small class with uniform weight (``"C"``).

The module also evaluates the separation bounds that control how close
these models are, and checks them against exact inference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .divergences import sym_kl, sym_kl_from_means
from .errors import PreconditionViolated, TooLarge
from .graphs import Graph, GraphClassSpec, enumerate_class, pair_index
from .ising import IsingParams, spin_table

MAX_CLIQUE = 8


@dataclass(frozen=True, eq=False)
class Ensemble:
    models: list
    label: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.models) < 2:
            raise PreconditionViolated("an ensemble needs at least two models")
        ps = {m.p for m in self.models}
        if len(ps) != 1:
            raise PreconditionViolated("ensemble models must share p")
        spec = self.class_spec
        for m in self.models:
            if not spec.contains(m.support):
                raise PreconditionViolated(f"model support {m.support} is outside the class")
            if not m.in_class(m.support, spec.lam, spec.omega):
                raise PreconditionViolated("model weights violate the lambda/omega constraints")

    @property
    def M(self) -> int:
        return len(self.models)

    @property
    def p(self) -> int:
        return self.models[0].p

    @property
    def class_spec(self) -> GraphClassSpec:
        pr = self.params
        return GraphClassSpec(pr["kind"], pr["p"], pr["bound"], pr["lam"], pr["omega"])

    def pairwise_sym_kl(self, closed_form: bool = True) -> np.ndarray:
        """``(M, M)`` matrix of exact symmetrised KL divergences."""
        f = sym_kl_from_means if closed_form else sym_kl
        out = np.zeros((self.M, self.M))
        for i, j in combinations(range(self.M), 2):
            out[i, j] = out[j, i] = f(self.models[i], self.models[j])
        return out

    def average_sym_kl(self) -> float:
        """``(2/M^2) sum_{k<l} S(k, l)``, the average entering the pairwise Fano bound."""
        s = self.pairwise_sym_kl()
        return float(s.sum() / self.M ** 2)


def ensemble_a(p: int, lam: float) -> Ensemble:
    """One model per vertex pair: a single edge of weight ``lam``."""
    if p < 2 or not lam > 0:
        raise PreconditionViolated("need p >= 2 and lambda > 0")
    models = [IsingParams.from_graph(Graph(p, 1 << i), lam) for i in range(p * (p - 1) // 2)]
    if len(models) < 2:
        raise PreconditionViolated("need at least two vertex pairs (p >= 3)")
    return Ensemble(models, "A", dict(kind="edge", p=p, bound=1, lam=lam, omega=lam))


def _clique_edges(vertices) -> list[tuple[int, int]]:
    return list(combinations(sorted(vertices), 2))


def ensemble_b_degree(p: int, d: int, lam: float) -> Ensemble:
    """Disjoint ``(d+1)``-cliques with one edge removed per model.

    Vertices left over when ``d+1`` does not divide ``p`` stay isolated.
    """
    if d < 1 or p < 2 * (d + 1) or not lam > 0:
        raise PreconditionViolated("need d >= 1, p >= 2(d+1) and lambda > 0")
    groups = [range(g * (d + 1), (g + 1) * (d + 1)) for g in range(p // (d + 1))]
    base = [e for grp in groups for e in _clique_edges(grp)]
    full = Graph.from_edges(p, base)
    models = []
    for s, t in base:
        g = Graph(p, full.edges & ~(1 << pair_index(s, t, p)))
        models.append(IsingParams.from_graph(g, lam))
    if len(models) < p * d / 4:
        raise PreconditionViolated("ensemble smaller than pd/4")
    return Ensemble(models, "B_degree", dict(kind="degree", p=p, bound=d, lam=lam, omega=lam * d))


def clique_size_for_edges(k: int) -> int:
    """Largest ``m`` with ``C(m, 2) <= k + 1``."""
    m = 2
    while math.comb(m + 1, 2) <= k + 1:
        m += 1
    return m


def clique_minus_edge_models(p: int, m: int, lam: float) -> list[IsingParams]:
    """Models on ``K_m`` (vertices ``0..m-1``) minus each edge in turn, weight ``lam``."""
    edges = _clique_edges(range(m))
    full = Graph.from_edges(p, edges)
    return [IsingParams.from_graph(Graph(p, full.edges & ~(1 << pair_index(s, t, p))), lam)
            for s, t in edges]


def ensemble_b_edge(p: int, k: int, lam: float) -> Ensemble:
    """A single ``m``-clique minus one edge per model, ``m = max{m : C(m,2) <= k+1}``."""
    m = clique_size_for_edges(k)
    if m < 3 or m > p:
        raise PreconditionViolated(f"clique size m={m} must satisfy 3 <= m <= p={p}")
    if not lam > 0:
        raise PreconditionViolated("lambda must be positive")
    models = clique_minus_edge_models(p, m, lam)
    return Ensemble(models, "B_edge",
                    dict(kind="edge", p=p, bound=k, lam=lam, omega=lam * (m - 1), m=m))


WEIGHT_POLICIES = ("uniform", "random_sign")


def policy_weights(g: Graph, lam: float, policy: str = "uniform", seed: int = 0) -> np.ndarray:
    """Edge weights for ``g`` (one per edge, index order) under a weight policy.

    ``"uniform"`` puts ``+lam`` on every edge.  ``"random_sign"`` puts
    ``+-lam`` with signs drawn from a stream keyed by ``(seed, g.edges)``, so a
    graph always receives the same signs for a given seed.
    """
    k = g.n_edges
    if policy == "uniform":
        return np.full(k, float(lam))
    if policy == "random_sign":
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), g.edges])))
        return lam * (2.0 * rng.integers(0, 2, size=k) - 1.0)
    raise PreconditionViolated(f"unknown weight policy {policy!r}")


def class_models(spec: GraphClassSpec, policy: str = "uniform", seed: int = 0) -> list[IsingParams]:
    """One model per graph of the class, weights ``+-lam`` per ``policy``.

    Graphs whose max degree times ``lam`` exceeds ``omega`` cannot carry
    weights of magnitude ``lam`` inside the class and are skipped.
    """
    return [IsingParams.from_graph(g, policy_weights(g, spec.lam, policy, seed))
            for g in enumerate_class(spec)
            if g.max_degree * spec.lam <= spec.omega + 1e-12]


def ensemble_c(spec: GraphClassSpec, policy: str = "uniform", seed: int = 0) -> Ensemble:
    """Every graph of the class, carrying weights of magnitude ``spec.lam``."""
    return Ensemble(class_models(spec, policy, seed), "C", spec.to_dict())


# ------------------------------------------------------------ key separation

def key_separation_ratio(m: int, lam: float) -> tuple[float, float]:
    """Edge likelihood ratio ``q/(1-q)`` on ``K_m`` minus ``(s,t)``, and its lower bound.

    ``q = P[X_s X_t = +1]``.  Summing over the number ``j`` of ``+1`` spins
    among the ``r = m-2`` other vertices,

        q/(1-q) = sum_j C(r,j) exp(lam/2 [(2j-r+2)^2 - 4])
                  / sum_j C(r,j) exp(lam/2 (2j-r)^2).

    The bound is ``exp(omega/2 - 3 lam/2) / (m+1)`` with ``omega = lam*m``;
    it is guaranteed once ``lam*m >= 2``.
    """
    if m < 2:
        raise PreconditionViolated("clique size must be at least 2")
    r = m - 2
    j = np.arange(r + 1)
    logc = np.array([math.log(math.comb(r, int(i))) for i in j])
    num = logc + lam / 2 * ((2 * j - r + 2) ** 2 - 4)
    den = logc + lam / 2 * (2 * j - r) ** 2
    top = max(num.max(), den.max())
    ratio = float(np.exp(num - top).sum() / np.exp(den - top).sum())
    bound = math.exp(lam * m / 2 - 1.5 * lam) / (m + 1)
    return ratio, bound


def printed_ratio(m: int, lam: float) -> float:
    """The binomial sum over ``j = 0..m`` with ``(2j-m+1)`` in the numerator.

    Kept only for comparison: it does not equal the exact edge likelihood
    ratio for any clique size (see :func:`key_separation_ratio`).
    """
    j = np.arange(m + 1)
    c = np.array([math.comb(m, int(i)) for i in j], dtype=float)
    num = (c * np.exp(lam / 2 * ((2 * j - m + 1) ** 2 - 4))).sum()
    den = (c * np.exp(lam / 2 * (2 * j - m) ** 2)).sum()
    return float(num / den)


def edge_log_odds(model: IsingParams, s: int, t: int) -> float:
    """Exact ``log(P[X_s X_t = +1] / P[X_s X_t = -1])`` by log-sum-exp over states."""
    x = spin_table(model.p)
    agree = x[:, s] * x[:, t] > 0
    e = model.energies
    return float(logsumexp(e[agree]) - logsumexp(e[~agree]))


def exact_separation_ratio(m: int, lam: float) -> float:
    """``q/(1-q)`` by enumeration on ``K_m`` minus edge ``(0, 1)``."""
    if m > MAX_CLIQUE:
        raise TooLarge(f"exact clique checks limited to m <= {MAX_CLIQUE}")
    model = clique_minus_edge_models(m, m, lam)[0]
    return math.exp(edge_log_odds(model, 0, 1))


def mean_lower_bound(m: int, lam: float) -> float:
    """``1 - 2(m+1)e^{3 lam/2} / (e^{omega/2} + (m+1) e^{3 lam/2})``, ``omega = lam*m``."""
    a = (m + 1) * math.exp(1.5 * lam)
    return 1.0 - 2 * a / (math.exp(lam * m / 2) + a)


def fkg_ratio_check(m: int, lam: float, rtol: float = 1e-12) -> bool:
    """Check ``ratio_{G^uv}(s,t) <= e^{2 lam} ratio_{G^st}(s,t)`` for all distinct edge pairs of ``K_m``."""
    if m > MAX_CLIQUE:
        raise TooLarge(f"exact clique checks limited to m <= {MAX_CLIQUE}")
    edges = _clique_edges(range(m))
    models = clique_minus_edge_models(m, m, lam)
    slack = 2 * lam + math.log1p(rtol)
    for a, (s, t) in enumerate(edges):      # model G^{st}
        own = edge_log_odds(models[a], s, t)
        for b in range(len(edges)):         # model G^{uv}
            if b != a and edge_log_odds(models[b], s, t) > own + slack:
                return False
    return True


# ------------------------------------------------------------ divergence bounds

def degree_sym_kl_bound(d: int, lam: float) -> float:
    """``8 lam d e^{3 lam/2} / e^{lam d/2}``; meaningful for ``lam*d >= 2``."""
    return 8 * lam * d * math.exp(1.5 * lam - lam * d / 2)


def edge_sym_kl_bound(m: int, lam: float, omega: Optional[float] = None) -> float:
    """``16 omega e^{5 lam/2} sinh(lam) / e^{omega/2}`` with ``omega = lam*m`` by default."""
    omega = lam * m if omega is None else omega
    return 16 * omega * math.exp(2.5 * lam) * math.sinh(lam) / math.exp(omega / 2)


def max_pairwise_sym_kl(ens: Ensemble) -> float:
    return float(ens.pairwise_sym_kl().max())
