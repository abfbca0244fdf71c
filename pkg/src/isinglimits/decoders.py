"""Graph decoders: exhaustive maximum likelihood and mean-parameter projection.

Both decoders depend on the data only through the empirical pairwise
correlations, so they accept either a :class:`SampleSet` or a
:class:`MeanParams` holding ``mu_hat``.  Equal best scores are reported as a
tie; callers that follow the conservative convention count a tie as a
decoding failure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .divergences import j_from_log_partition
from .errors import DimensionMismatch, EmptyCandidates, InfeasibleConstraints, TooLarge
from .graphs import Graph, n_pairs
from .ising import IsingParams, MeanParams, SampleSet, _check_exact, mean_params_batch, state_index

Data = Union[SampleSet, MeanParams]

MAX_PROJECTION_P = 12
MAX_PROJECTION_EDGES = 6
FULL_GRID_LIMIT = 4096
TIE_TOL = 1e-12


@dataclass(frozen=True)
class FeasibleSet:
    """Couplings supported on ``graph`` with ``|theta_e| >= lam`` on edges
    and per-vertex absolute sums at most ``omega``."""

    graph: Graph
    lam: float
    omega: float

    def check(self) -> None:
        if self.graph.edges and self.lam * self.graph.max_degree > self.omega + 1e-12:
            raise InfeasibleConstraints(
                f"lambda * degree = {self.lam * self.graph.max_degree} exceeds omega = {self.omega}")

    def contains(self, m: IsingParams, tol: float = 1e-12) -> bool:
        if m.p != self.graph.p or m.support.edges != self.graph.edges:
            return False
        if not self.graph.edges:
            return True
        return m.lambda_star >= self.lam - tol and m.omega_star <= self.omega + tol


@dataclass(frozen=True)
class DecodeResult:
    chosen: Graph
    score: float
    runner_up_gap: float
    ties: int
    index: int

    @property
    def ambiguous(self) -> bool:
        return self.ties > 0

    def to_dict(self) -> dict:
        return {"chosen": self.chosen.to_text(), "score": self.score,
                "runner_up_gap": self.runner_up_gap, "ties": self.ties, "index": self.index}


def empirical_mean_params(samples: SampleSet) -> MeanParams:
    """``mu_hat_st = (1/n) sum_i x_s^(i) x_t^(i)``."""
    x = samples.data.astype(np.int64)
    corr = x.T @ x
    iu = np.triu_indices(samples.p, 1)
    return MeanParams(samples.p, corr[iu] / samples.n)


def _mu_hat(data: Data) -> MeanParams:
    return data if isinstance(data, MeanParams) else empirical_mean_params(data)


def log_likelihood(m: IsingParams, data: Data) -> float:
    """Rescaled log-likelihood ``<theta, mu_hat> - log Z(theta)``."""
    mu = _mu_hat(data)
    if mu.p != m.p:
        raise DimensionMismatch("sample dimension differs from model")
    _check_exact(m.p)
    return float(m.theta @ mu.mu - m.log_partition)


def log_likelihood_naive(m: IsingParams, samples: SampleSet) -> float:
    """``(1/n) sum_i log P(x^(i))`` evaluated one sample at a time."""
    if samples.p != m.p:
        raise DimensionMismatch("sample dimension differs from model")
    lp = m.log_probabilities
    return float(np.mean([lp[state_index(row)] for row in samples.data]))


def _select(scores: np.ndarray, masks: Sequence[int], maximise: bool, tol: float):
    """Best index with canonical tie-break, tie count and gap to the runner-up."""
    s = scores if maximise else -scores
    top = s.max()
    near = np.flatnonzero(s >= top - tol * max(1.0, abs(top)))
    best = int(min(near, key=lambda i: (masks[i], i)))
    ties = len(near) - 1
    others = np.delete(s, best)
    gap = 0.0 if ties or others.size == 0 else float(top - others.max())
    return best, ties, gap


def ml_decode(models: Sequence[IsingParams], data: Data, tol: float = TIE_TOL) -> DecodeResult:
    """Candidate with the largest log-likelihood.

    Scores within ``tol`` (relative) of the best count as ties; the smallest
    canonical bitmask among them is returned.
    """
    if len(models) < 2:
        raise EmptyCandidates("maximum likelihood decoding needs at least two candidates")
    mu = _mu_hat(data)
    if any(m.p != mu.p for m in models):
        raise DimensionMismatch("candidates and data must share p")
    scores = np.array([log_likelihood(m, mu) for m in models])
    masks = [m.support.edges for m in models]
    best, ties, gap = _select(scores, masks, True, tol)
    return DecodeResult(models[best].support, float(scores[best]), gap, ties, best)


def pairwise_error_bound(a: IsingParams, b: IsingParams, n: int) -> float:
    """``exp(-(n/2) J(a, b))`` bounds ``P_a[l_b >= l_a]`` for ``n`` samples."""
    return math.exp(-0.5 * n * j_from_log_partition(a, b))


# ------------------------------------------------------------ projection decoder

def _mu_of(thetas: np.ndarray, p: int) -> np.ndarray:
    return mean_params_batch(thetas, p)[0]


def _axis_values(lam: float, omega: float, r: float) -> np.ndarray:
    if omega <= lam or r <= 0:
        mags = np.array([lam])
    else:
        mags = np.unique(np.clip(np.append(np.arange(lam, omega, r), omega), lam, omega))
    return np.concatenate([-mags[::-1], mags])


def _feasible_rows(rows: np.ndarray, incidence: np.ndarray, omega: float) -> np.ndarray:
    return (np.abs(rows) @ incidence.T <= omega + 1e-12).all(axis=1)


def _search(axes: list, idx: list, p: int, mu_hat: np.ndarray, incidence: np.ndarray,
            omega: float, start: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimise ``||mu_hat - mu(theta)||_inf`` over the product grid ``axes``.

    The full grid is scanned when it has at most ``FULL_GRID_LIMIT`` points;
    otherwise coordinate descent from ``start`` is used.
    """
    npairs = n_pairs(p)
    size = math.prod(len(a) for a in axes)

    def score(rows: np.ndarray) -> np.ndarray:
        th = np.zeros((rows.shape[0], npairs))
        th[:, idx] = rows
        ok = _feasible_rows(rows, incidence, omega)
        d = np.full(rows.shape[0], np.inf)
        if ok.any():
            d[ok] = np.abs(_mu_of(th[ok], p) - mu_hat).max(axis=1)
        return d

    if size <= FULL_GRID_LIMIT:
        rows = np.array(list(itertools.product(*axes)), dtype=float)
        d = score(rows)
        i = int(np.argmin(d))
        return float(d[i]), rows[i]
    cur = start.copy()
    best = float(score(cur[None])[0])
    for _ in range(20):
        improved = False
        for e, vals in enumerate(axes):
            rows = np.repeat(cur[None], len(vals), axis=0)
            rows[:, e] = vals
            d = score(rows)
            i = int(np.argmin(d))
            if d[i] < best - 1e-15:
                best, cur = float(d[i]), rows[i].copy()
                improved = True
        if not improved:
            break
    return best, cur


def projection_distance(g: Graph, feasible: FeasibleSet, mu_hat: Union[MeanParams, SampleSet],
                        resolution: float | None = None) -> tuple[float, IsingParams]:
    """Approximate ``min_theta ||mu_hat - mu(theta)||_inf`` over couplings feasible for ``g``.

    Each edge weight ranges over ``[-omega, -lam] U [lam, omega]``.  A grid of
    spacing ``r = (omega - lam)/8`` is searched, then refined twice around the
    incumbent at spacings ``r/5`` and ``r/25``.  The result is an upper bound
    on the true minimum (grid search, not a certificate).
    """
    mu = _mu_hat(mu_hat)
    p = g.p
    if mu.p != p or feasible.graph.p != p:
        raise DimensionMismatch("graph, feasible set and data must share p")
    if p > MAX_PROJECTION_P:
        raise TooLarge(f"projection search limited to p <= {MAX_PROJECTION_P}")
    if g.n_edges > MAX_PROJECTION_EDGES:
        raise TooLarge(f"projection search limited to {MAX_PROJECTION_EDGES} edges")
    fs = FeasibleSet(g, feasible.lam, feasible.omega)
    fs.check()
    lam, omega = fs.lam, fs.omega
    idx = g.edge_indices()
    if not idx:
        return float(np.abs(mu.mu).max(initial=0.0)), IsingParams.zeros(p)
    pairs = [(s, t) for s, t in g.edge_list()]
    incidence = np.zeros((p, len(idx)))
    for e, (s, t) in enumerate(pairs):
        incidence[s, e] = incidence[t, e] = 1.0
    r = (omega - lam) / 8 if resolution is None else resolution
    signs = np.where(mu.mu[idx] < 0, -1.0, 1.0)
    start = signs * lam
    axes = [_axis_values(lam, omega, r)] * len(idx)
    best, theta = _search(axes, idx, p, mu.mu, incidence, omega, start)
    step = r
    for _ in range(2):
        if omega <= lam or step <= 0:
            break
        fine = step / 5
        axes = []
        for w in theta:
            mags = np.arange(abs(w) - step, abs(w) + step + fine / 2, fine)
            mags = np.unique(np.clip(mags, lam, omega))
            axes.append(np.sign(w) * mags)
        d, th = _search(axes, idx, p, mu.mu, incidence, omega, theta)
        if d <= best:
            best, theta = d, th
        step = fine
    full = np.zeros(n_pairs(p))
    full[idx] = theta
    return best, IsingParams(p, full)


def mean_decode(candidates: Sequence, data: Data, tol: float = TIE_TOL) -> DecodeResult:
    """Candidate graph whose feasible set comes closest to ``mu_hat``.

    ``candidates`` holds :class:`FeasibleSet` objects or ``(Graph, FeasibleSet)``
    pairs.  ``runner_up_gap`` is ``J_G'(mu_hat) - J_G(mu_hat)`` for the best
    competitor ``G'``.
    """
    if len(candidates) < 2:
        raise EmptyCandidates("projection decoding needs at least two candidates")
    mu = _mu_hat(data)
    sets = [c if isinstance(c, FeasibleSet) else FeasibleSet(c[0], c[1].lam, c[1].omega)
            for c in candidates]
    dists = np.array([projection_distance(fs.graph, fs, mu)[0] for fs in sets])
    masks = [fs.graph.edges for fs in sets]
    best, ties, gap = _select(dists, masks, False, tol)
    return DecodeResult(sets[best].graph, float(dists[best]), gap, ties, best)
