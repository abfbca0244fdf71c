"""KL, symmetrised KL and the midpoint divergence ``J`` between Ising models.

Each divergence has two independent routes: a definitional sum over all
``2**p`` states, and a closed form through mean parameters or the
log-partition function.  Tests hold the two routes to ``EQ_TOL``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import BadSpinValue, DimensionMismatch, EndpointConditioned
from .graphs import Graph, maximum_matching, symmetric_difference
from .ising import IsingParams, _check_exact, mean_params_exact

EQ_TOL = 1e-10


def _pair(a: IsingParams, b: IsingParams) -> None:
    if a.p != b.p:
        raise DimensionMismatch(f"models on {a.p} and {b.p} vertices")
    _check_exact(a.p)


def kl(a: IsingParams, b: IsingParams) -> float:
    """``D(a || b) = sum_x P_a(x) log(P_a(x) / P_b(x))`` by enumeration."""
    _pair(a, b)
    la, lb = a.log_probabilities, b.log_probabilities
    return max(float(np.exp(la) @ (la - lb)), 0.0)


def kl_from_means(a: IsingParams, b: IsingParams) -> float:
    """Exponential-family form ``<theta - theta', mu(theta)> - log Z(theta) + log Z(theta')``."""
    _pair(a, b)
    mu = mean_params_exact(a).mu
    return float((a.theta - b.theta) @ mu - a.log_partition + b.log_partition)


def sym_kl(a: IsingParams, b: IsingParams) -> float:
    return kl(a, b) + kl(b, a)


def sym_kl_from_means(a: IsingParams, b: IsingParams) -> float:
    """``sum_{s<t} (theta_st - theta'_st)(mu_st - mu'_st)``."""
    _pair(a, b)
    return float((a.theta - b.theta) @ (mean_params_exact(a).mu - mean_params_exact(b).mu))


def j_divergence(a: IsingParams, b: IsingParams) -> float:
    """``D(mid || a) + D(mid || b)`` where ``mid`` averages the two couplings."""
    _pair(a, b)
    mid = a.midpoint(b)
    return kl(mid, a) + kl(mid, b)


def j_from_log_partition(a: IsingParams, b: IsingParams) -> float:
    """``log[Z(a) Z(b) / Z(mid)^2]``."""
    _pair(a, b)
    return a.log_partition + b.log_partition - 2.0 * a.midpoint(b).log_partition


# ---------------------------------------------------------------- conditionals

def _log_tensor(energies: np.ndarray, p: int) -> np.ndarray:
    """Reshape ``(B, 2**p)`` log-weights to ``(B, 2, ..., 2)`` with axis ``1+s`` for vertex ``s``."""
    e = np.atleast_2d(energies)
    t = e.reshape((e.shape[0],) + (2,) * p)
    # flat index = sum_s bit_s 2**s, so C-order axis 1 is vertex p-1
    return np.transpose(t, (0,) + tuple(range(p, 0, -1)))


def _pair_conditionals(logw: np.ndarray, u: int, v: int, cond: Sequence[int],
                       joint: bool = False) -> np.ndarray:
    """Log tables of ``(X_u, X_v)`` for every assignment of ``cond``.

    ``logw`` comes from :func:`_log_tensor`.  Returns shape
    ``(B, 2**len(cond), 2, 2)``; row ``r`` corresponds to the assignment whose
    bit ``i`` (LSB first) is the spin of ``cond[i]`` (bit set = +1).  Table
    index 0 means spin -1.  Rows are conditionals unless ``joint`` is set, in
    which case each batch entry is ``log P(x_cond, x_u, x_v)``.
    """
    p = logw.ndim - 1
    keep = list(cond) + [u, v]
    drop = tuple(1 + a for a in range(p) if a not in keep)
    marg = logsumexp(logw, axis=drop) if drop else logw
    # remaining axes are in increasing vertex order; reorder to (cond reversed..., u, v)
    remaining = sorted(keep)
    order = [remaining.index(c) for c in reversed(list(cond))] + [remaining.index(u), remaining.index(v)]
    marg = np.transpose(marg, [0] + [1 + o for o in order]).reshape(marg.shape[0], -1, 2, 2)
    axes = (1, 2, 3) if joint else (2, 3)
    return marg - logsumexp(marg, axis=axes, keepdims=True)


def _j_tables(la: np.ndarray, lb: np.ndarray) -> np.ndarray:
    """Midpoint divergence between normalised tables: ``-2 log sum sqrt(P_a P_b)``."""
    return np.maximum(-2.0 * logsumexp(0.5 * (la + lb), axis=(-2, -1)), 0.0)


def conditional_j_min_batch(energies_a: np.ndarray, energies_b: np.ndarray, p: int,
                            edge: tuple[int, int], by_size: bool = False) -> np.ndarray:
    """Per row, the smallest conditional divergence on ``edge`` over all conditionings.

    ``energies_a`` and ``energies_b`` are ``(B, 2**p)`` unnormalised log-weights.
    The minimum runs over every subset of the other vertices and every spin
    assignment on it.  With ``by_size`` the result has shape ``(B, p-1)``,
    column ``r`` holding the minimum over conditioning sets of size ``r``.
    """
    u, v = edge
    others = [w for w in range(p) if w not in (u, v)]
    la, lb = _log_tensor(energies_a, p), _log_tensor(energies_b, p)
    out = np.full((la.shape[0], len(others) + 1), np.inf)
    for r in range(len(others) + 1):
        for cond in combinations(others, r):
            j = _j_tables(_pair_conditionals(la, u, v, cond), _pair_conditionals(lb, u, v, cond))
            out[:, r] = np.minimum(out[:, r], j.min(axis=1))
    return out if by_size else out.min(axis=1)


def _check_cond(p: int, edge: tuple[int, int], cond: Mapping[int, int]) -> None:
    u, v = edge
    if u == v or not (0 <= u < p and 0 <= v < p):
        raise DimensionMismatch(f"bad edge {edge} for p={p}")
    if u in cond or v in cond:
        raise EndpointConditioned(f"edge endpoints {edge} may not be conditioned on")
    for s, x in cond.items():
        if not 0 <= s < p:
            raise DimensionMismatch(f"conditioned vertex {s} out of range")
        if x not in (-1, 1):
            raise BadSpinValue(f"conditioned spin must be +-1, got {x!r}")


def conditional_pair_distribution(m: IsingParams, edge: tuple[int, int],
                                  cond: Mapping[int, int]) -> np.ndarray:
    """``P(X_u, X_v | X_A = x_A)`` as a 2x2 table (index 0 = spin -1)."""
    _check_exact(m.p)
    _check_cond(m.p, edge, cond)
    verts = sorted(cond)
    row = sum(1 << i for i, s in enumerate(verts) if cond[s] == 1)
    logw = _log_tensor(m.energies, m.p)
    return np.exp(_pair_conditionals(logw, edge[0], edge[1], verts)[0, row])


def conditional_j(a: IsingParams, b: IsingParams, edge: tuple[int, int],
                  cond: Mapping[int, int]) -> float:
    """Midpoint divergence between the two conditionals of ``(X_u, X_v)`` given ``x_A``.

    Each conditional is a full exponential family on two spins; averaging its
    natural parameters gives the normalised geometric mean of the tables, and
    the result is ``KL(mid || P_a) + KL(mid || P_b)``.
    """
    _pair(a, b)
    pa = conditional_pair_distribution(a, edge, cond)
    pb = conditional_pair_distribution(b, edge, cond)
    if np.array_equal(pa, pb):
        return 0.0
    mid = np.sqrt(pa * pb)
    mid /= mid.sum()
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(mid > 0, mid * (2 * np.log(mid) - np.log(pa) - np.log(pb)), 0.0)
    return max(float(terms.sum()), 0.0)


def conditional_j_all(a: IsingParams, b: IsingParams, edge: tuple[int, int]) -> np.ndarray:
    """Conditional divergences for every subset ``U`` of the other vertices and every ``x_U``."""
    _pair(a, b)
    u, v = edge
    others = [w for w in range(a.p) if w not in (u, v)]
    la, lb = _log_tensor(a.energies, a.p), _log_tensor(b.energies, b.p)
    out = []
    for r in range(len(others) + 1):
        for cond in combinations(others, r):
            out.append(_j_tables(_pair_conditionals(la, u, v, cond),
                                 _pair_conditionals(lb, u, v, cond))[0])
    return np.concatenate(out)


def separation_floor(lam, omega):
    """``sinh^2(lam/4) / (3 exp(2 omega) + 1)``; broadcasts over arrays."""
    v = np.sinh(np.asarray(lam) / 4) ** 2 / (3 * np.exp(2 * np.asarray(omega)) + 1)
    return float(v) if v.ndim == 0 else v


def conditional_separation_margin(a: IsingParams, b: IsingParams) -> float:
    """Smallest ``conditional_j - floor`` over all edges in ``E \\ E'`` and all conditionings.

    The floor uses ``lambda = lambda*(a)`` and ``omega = max(omega*(a), omega*(b))``.
    Returns ``inf`` when ``E \\ E'`` is empty.
    """
    floor = separation_floor(a.lambda_star, max(a.omega_star, b.omega_star))
    only_a = Graph(a.p, a.support.edges & ~b.support.edges)
    worst = np.inf
    for edge in only_a.edge_list():
        j = conditional_j_min_batch(a.energies, b.energies, a.p, edge)[0]
        worst = min(worst, float(j) - floor)
    return worst


def matching_chain_sum(a: IsingParams, b: IsingParams) -> float:
    """Sum over a maximum matching of ``E xor E'`` of midpoint-averaged conditional divergences.

    Edge ``e_l`` is conditioned on the unmatched vertices plus the endpoints
    of ``e_1 .. e_{l-1}``; the average is under the midpoint model.  By the KL
    chain rule this never exceeds ``J(a, b)``.
    """
    _pair(a, b)
    diff = symmetric_difference(a.support, b.support)
    matching = maximum_matching(diff)
    covered = {w for e in matching for w in e}
    base = [w for w in range(a.p) if w not in covered]
    la, lb = _log_tensor(a.energies, a.p), _log_tensor(b.energies, b.p)
    lmid = _log_tensor(a.midpoint(b).energies, a.p)
    total = 0.0
    prefix: list[int] = []
    for (u, v) in matching:
        cond = sorted(base + prefix)
        j = _j_tables(_pair_conditionals(la, u, v, cond), _pair_conditionals(lb, u, v, cond))[0]
        # midpoint marginal of x_cond, rows in the same order as j
        pm = np.exp(logsumexp(_pair_conditionals(lmid, u, v, cond, joint=True)[0], axis=(1, 2)))
        total += float(pm @ j)
        prefix += [u, v]
    return total


# ---------------------------------------------------------------- flip statistic

def flip_delta(a: IsingParams, b: IsingParams, x: Sequence[int]) -> float:
    """``sum_E theta_uv x_u x_v - sum_E' theta'_uv x_u x_v``."""
    if a.p != b.p:
        raise DimensionMismatch(f"models on {a.p} and {b.p} vertices")
    return a.energy(x) - b.energy(x)


def flip_margin(a: IsingParams, b: IsingParams) -> float:
    """Worst case of ``max_flip |change in delta| - |theta_st|``.

    Minimised over every state and every edge ``(s,t)`` in ``E \\ E'``, where
    the flips are ``x_s``, ``x_t`` or both.  Non-negative iff the flipping
    property holds.  Exhaustive, so ``p <= 16``.
    """
    _pair(a, b)
    delta = a.energies - b.energies
    states = np.arange(1 << a.p)
    only_a = Graph(a.p, a.support.edges & ~b.support.edges)
    pairs = only_a.edge_list()
    worst = np.inf
    for (s, t), i in zip(pairs, only_a.edge_indices()):
        bs, bt = 1 << s, 1 << t
        change = np.maximum.reduce([np.abs(delta[states ^ f] - delta) for f in (bs, bt, bs | bt)])
        worst = min(worst, float(change.min()) - abs(a.theta[i]))
    return worst
