"""Brute-force verification of the inequalities behind the sample-size bounds.

Each ``check_*`` function sweeps a grid of small configurations and returns
one :class:`LemmaCheck` per configuration, holding the worst case found by
exact enumeration (or Monte Carlo, for the probabilistic statements) next to
the bound it is compared against.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .divergences import (
    conditional_j_min_batch,
    j_from_log_partition,
    matching_chain_sum,
    sym_kl_from_means,
)
from .ensembles import (
    class_models,
    clique_minus_edge_models,
    degree_sym_kl_bound,
    edge_sym_kl_bound,
    ensemble_b_degree,
    exact_separation_ratio,
    fkg_ratio_check,
    key_separation_ratio,
    max_pairwise_sym_kl,
    mean_lower_bound,
    printed_ratio,
)
from .errors import PreconditionViolated
from .graphs import (
    GraphClassSpec,
    _max_matching,
    cardinality_bounds,
    enumerate_class,
    incidence_masks,
    n_pairs,
    pair_list,
)
from .ising import IsingParams, mean_params_exact, pair_products, rng_for

LAMBDAS = (0.25, 0.5, 1.0)
POLICIES = ("uniform", "random_sign")


@dataclass
class LemmaCheck:
    lemma: str
    config: dict
    value: float
    bound: float
    relation: str
    passed: bool
    note: str = ""
    cases: int = 1

    def to_dict(self) -> dict:
        return asdict(self)


def _check(lemma, config, value, bound, relation, note="", cases=1, tol=0.0) -> LemmaCheck:
    if relation == ">=":
        ok = value >= bound - tol
    elif relation == "<=":
        ok = value <= bound + tol
    else:
        raise ValueError(relation)
    return LemmaCheck(lemma, config, float(value), float(bound), relation, bool(ok), note, cases)


def format_table(checks: Sequence[LemmaCheck]) -> str:
    rows = [("lemma", "config", "value", "rel", "bound", "cases", "result")]
    for c in checks:
        cfg = ",".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in c.config.items())
        rows.append((c.lemma, cfg, f"{c.value:.6g}", c.relation, f"{c.bound:.6g}", str(c.cases),
                     "PASS" if c.passed else "FAIL"))
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(x.ljust(w) for x, w in zip(r, widths)) for r in rows)


# ------------------------------------------------------------ helpers

def _bank(spec: GraphClassSpec, policy: str, seed: int):
    """Class models with their energies, log-partitions and omega*."""
    models = class_models(spec, policy, seed)
    thetas = np.array([m.theta for m in models])
    energies = thetas @ pair_products(spec.p).T
    log_z = logsumexp(energies, axis=1)
    omega = np.array([m.omega_star for m in models])
    masks = np.array([m.support.edges for m in models], dtype=np.int64)
    return models, thetas, energies, log_z, omega, masks


def _matching_table(p: int) -> np.ndarray:
    return np.array([len(_max_matching(p, x)) for x in range(1 << n_pairs(p))], dtype=np.int64)


# ------------------------------------------------------------ class sizes

def check_cardinality(p_max: int = 6, k_max: int = 3, d_max: int = 2) -> list[LemmaCheck]:
    """Enumerated class sizes against the closed-form lower and upper bounds."""
    out = []
    for p in range(2, p_max + 1):
        for kind, bmax in (("edge", k_max), ("degree", d_max)):
            for b in range(1, bmax + 1):
                spec = GraphClassSpec(kind, p, b)
                try:
                    lo, hi = cardinality_bounds(spec)
                except PreconditionViolated:
                    continue
                count = sum(1 for _ in enumerate_class(spec))
                cfg = {"kind": kind, "p": p, "bound": b}
                out.append(_check("cardinality_lower", cfg, count, lo, ">="))
                out.append(_check("cardinality_upper", cfg, count, hi, "<="))
    return out


# ------------------------------------------------------------ key separation

def check_key_separation(ms: Iterable[int] = range(3, 9), lams: Sequence[float] | None = None,
                         rtol: float = 1e-9) -> list[LemmaCheck]:
    """Binomial-sum ratio versus exact inference, ratio bound and mean bound, for ``lam*m >= 2``."""
    out = []
    for m in ms:
        grid = sorted(set(lams or (2.0 / m, 0.5, 1.0)))
        for lam in grid:
            if lam * m < 2 - 1e-12:
                continue
            cfg = {"m": m, "lam": lam}
            ratio, bound = key_separation_ratio(m, lam)
            exact = exact_separation_ratio(m, lam)
            rel = abs(ratio - exact) / exact
            out.append(_check("ratio_formula", cfg, rel, rtol, "<=",
                              note=f"typeset sum gives {printed_ratio(m, lam):.6g} vs exact {exact:.6g}"))
            out.append(_check("ratio_bound", cfg, exact, bound, ">="))
            mu = math.tanh(0.5 * math.log(exact))  # 2q - 1 from the log-odds
            out.append(_check("mean_bound", cfg, mu, mean_lower_bound(m, lam), ">="))
    return out


def check_fkg(ms: Iterable[int] = range(3, 7), lams: Sequence[float] = (0.25, 0.5, 1.0, 2.0)) -> list[LemmaCheck]:
    out = []
    for m in ms:
        for lam in lams:
            ok = fkg_ratio_check(m, lam)
            out.append(LemmaCheck("fkg_ratio", {"m": m, "lam": lam}, float(ok), 1.0, ">=", ok))
    return out


# ------------------------------------------------------------ ensemble divergence bounds

DEGREE_CONFIGS = ((8, 3, 0.7), (6, 2, 1.0), (6, 2, 1.5), (8, 3, 1.0), (9, 2, 1.2), (8, 1, 2.0))


def check_degree_ensemble(configs=DEGREE_CONFIGS) -> list[LemmaCheck]:
    """Largest pairwise S in the clique-minus-edge degree family against ``8 lam d e^{3lam/2} / e^{lam d/2}``."""
    out = []
    for p, d, lam in configs:
        if lam * d < 2:
            continue
        ens = ensemble_b_degree(p, d, lam)
        s = max_pairwise_sym_kl(ens)
        out.append(_check("degree_sym_kl", {"p": p, "d": d, "lam": lam}, s,
                          degree_sym_kl_bound(d, lam), "<=", cases=ens.M * (ens.M - 1) // 2))
    return out


def check_edge_ensemble(ms: Iterable[int] = (3, 4, 5), lams: Sequence[float] | None = None) -> list[LemmaCheck]:
    """Largest pairwise S in the single-clique family against ``16 w e^{5lam/2} sinh(lam) / e^{w/2}``, ``w = lam m``."""
    out = []
    for m in ms:
        for lam in (lams or (0.5, 2.0 / m)):
            models = clique_minus_edge_models(m, m, lam)
            s = max(sym_kl_from_means(a, b) for a, b in combinations(models, 2))
            out.append(_check("edge_sym_kl", {"m": m, "lam": lam}, s, edge_sym_kl_bound(m, lam), "<=",
                              cases=len(models) * (len(models) - 1) // 2))
    return out


# ------------------------------------------------------------ matching lower bound on J

def check_matching_bound(ps: Iterable[int] = range(3, 7), ds: Sequence[int] = (1, 2),
                         lams: Sequence[float] = LAMBDAS, policies: Sequence[str] = POLICIES,
                         seed: int = 0) -> list[LemmaCheck]:
    """``J >= m(G,G') sinh^2(lam/4) / (3 e^{2w} + 1)`` over all pairs of each class.

    ``w`` is the larger of the two models' maximum neighbourhood weights, the
    smallest admissible class parameter for the pair.
    """
    out = []
    for p in ps:
        table = _matching_table(p)
        for d in ds:
            if d > p - 1:
                continue
            for lam in lams:
                for policy in policies:
                    spec = GraphClassSpec.degree(p, d, lam)
                    _, _, e, lz, om, masks = _bank(spec, policy, seed)
                    worst = np.inf
                    cases = 0
                    for i in range(len(masks) - 1):
                        mid = 0.5 * (e[i] + e[i + 1:])
                        j = lz[i] + lz[i + 1:] - 2 * logsumexp(mid, axis=1)
                        w = np.maximum(om[i], om[i + 1:])
                        mm = table[masks[i] ^ masks[i + 1:]]
                        bound = mm * np.sinh(lam / 4) ** 2 / (3 * np.exp(2 * w) + 1)
                        worst = min(worst, float((j - bound).min()))
                        cases += len(j)
                    out.append(_check("matching_J", {"p": p, "d": d, "lam": lam, "weights": policy},
                                      worst, 0.0, ">=", cases=cases, note="min of J - bound"))
    return out


def check_chain_rule(n_pairs_: int = 40, ps: Sequence[int] = (4, 5, 6), seed: int = 0) -> list[LemmaCheck]:
    """``J`` dominates the matching chain of averaged conditional divergences on random pairs."""
    out = []
    for p in ps:
        rng = rng_for(seed, p)
        worst = np.inf
        for _ in range(n_pairs_):
            th = []
            for _ in range(2):
                mask = rng.random(n_pairs(p)) < 0.4
                th.append(np.where(mask, rng.uniform(0.2, 1.2, n_pairs(p)) * rng.choice([-1, 1], n_pairs(p)), 0.0))
            a, b = IsingParams(p, th[0]), IsingParams(p, th[1])
            worst = min(worst, j_from_log_partition(a, b) - matching_chain_sum(a, b))
        out.append(_check("chain_rule", {"p": p}, worst, 0.0, ">=", cases=n_pairs_, tol=1e-12,
                          note="min of J - chain sum"))
    return out


# ------------------------------------------------------------ conditional separation

def check_conditional_separation(ps: Iterable[int] = range(3, 7), ds: Sequence[int] = (1, 2),
                                 lams: Sequence[float] = LAMBDAS, policies: Sequence[str] = POLICIES,
                                 seed: int = 0, max_pairs: int = 4000) -> list[LemmaCheck]:
    """Every conditional divergence on an edge of ``E \\ E'`` is at least ``sinh^2(lam/4)/(3e^{2w}+1)``.

    All conditionings are enumerated.  Ordered graph pairs are exhaustive
    when there are at most ``max_pairs`` of them, otherwise a seeded sample
    of that size is used (noted in the result).
    """
    out = []
    for p in ps:
        pairs = pair_list(p)
        for d in ds:
            if d > p - 1:
                continue
            for lam in lams:
                for policy in policies:
                    spec = GraphClassSpec.degree(p, d, lam)
                    _, _, e, _, om, masks = _bank(spec, policy, seed)
                    M = len(masks)
                    ii, jj = np.nonzero(~np.eye(M, dtype=bool))
                    note = "all ordered pairs"
                    if len(ii) > max_pairs:
                        pick = rng_for(seed, p, d).choice(len(ii), max_pairs, replace=False)
                        ii, jj = ii[pick], jj[pick]
                        note = f"{max_pairs} sampled ordered pairs"
                    worst, worst_full, cases = np.inf, np.inf, 0
                    only = masks[ii] & ~masks[jj]
                    for idx, edge in enumerate(pairs):
                        sel = (only >> idx) & 1 == 1
                        if not sel.any():
                            continue
                        a, b = ii[sel], jj[sel]
                        jr = conditional_j_min_batch(e[a], e[b], p, edge, by_size=True)
                        floor = np.sinh(lam / 4) ** 2 / (3 * np.exp(2 * np.maximum(om[a], om[b])) + 1)
                        worst = min(worst, float((jr.min(axis=1) - floor).min()))
                        # diagnostic only: conditioning on every other vertex
                        jfull = jr[:, -1]
                        worst_full = min(worst_full, float((jfull - floor).min()))
                        cases += int(sel.sum())
                    out.append(_check("conditional_J", {"p": p, "d": d, "lam": lam, "weights": policy},
                                      worst, 0.0, ">=", cases=cases,
                                      note=f"{note}; min of J_cond - floor; "
                                           f"with all other vertices fixed: {worst_full:.4g}"))
    return out


# ------------------------------------------------------------ flipping

def _flip_weights(g, seed: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), g.edges, 7])))
    return rng.uniform(0.1, 1.5, g.n_edges) * rng.choice([-1.0, 1.0], g.n_edges)


def check_flipping(ps: Iterable[int] = range(2, 6), d: int = 2, seed: int = 0) -> list[LemmaCheck]:
    """One of the three flips of ``(x_s, x_t)`` moves ``Delta(x)`` by at least ``|theta_st|``.

    Exhaustive over states, edges of ``E \\ E'`` and ordered pairs of the
    degree class, with uniform unit weights and with random signed weights.
    """
    out = []
    for p in ps:
        spec = GraphClassSpec.degree(p, min(d, p - 1), 1.0)
        graphs = list(enumerate_class(spec))
        phi = pair_products(p)
        states = np.arange(1 << p)
        for policy in ("uniform", "random"):
            if policy == "uniform":
                thetas = np.array([IsingParams.from_graph(g, 1.0).theta for g in graphs])
            else:
                thetas = np.array([IsingParams.from_graph(g, _flip_weights(g, seed)).theta for g in graphs])
            e = thetas @ phi.T
            masks = np.array([g.edges for g in graphs], dtype=np.int64)
            M = len(graphs)
            ii, jj = np.nonzero(~np.eye(M, dtype=bool))
            only = masks[ii] & ~masks[jj]
            worst, cases = np.inf, 0
            for idx, (s, t) in enumerate(pair_list(p)):
                sel = (only >> idx) & 1 == 1
                if not sel.any():
                    continue
                delta = e[ii[sel]] - e[jj[sel]]
                bs, bt = 1 << s, 1 << t
                change = np.max([np.abs(delta[:, states ^ f] - delta) for f in (bs, bt, bs | bt)], axis=0)
                margin = change.min(axis=1) - np.abs(thetas[ii[sel], idx])
                worst = min(worst, float(margin.min()))
                cases += int(sel.sum()) * len(states)
            out.append(_check("flipping", {"p": p, "d": spec.bound, "weights": policy}, worst, 0.0, ">=",
                              tol=1e-12, cases=cases, note="min over states of best flip change - |theta_st|"))
    return out


# ------------------------------------------------------------ Monte Carlo statements

def _binomial_margin(prob: float, trials: int, k: float = 3.0) -> float:
    q = min(max(prob, 0.0), 1.0)
    return k * math.sqrt(q * (1 - q) / trials)


def _sample_mu(model: IsingParams, n: int, trials: int, rng) -> np.ndarray:
    """``(trials, C(p,2))`` empirical mean parameters from multinomial state counts."""
    prob = np.exp(model.log_probabilities)
    counts = rng.multinomial(n, prob / prob.sum(), size=trials)
    return counts @ pair_products(model.p) / n


def large_deviation_pairs() -> list[tuple[str, IsingParams, IsingParams]]:
    def e(p, w):
        return IsingParams.from_edges(p, w)
    return [
        ("edge_vs_empty", e(2, {(0, 1): 1.0}), IsingParams.zeros(2)),
        ("disjoint_edges", e(4, {(0, 1): 0.5}), e(4, {(2, 3): 0.5})),
        ("path_vs_triangle", e(3, {(0, 1): 0.8, (1, 2): 0.8}), e(3, {(0, 1): 0.8, (1, 2): 0.8, (0, 2): 0.8})),
        ("sign_flip", e(3, {(0, 1): 0.6, (1, 2): -0.6}), e(3, {(0, 1): 0.6, (1, 2): 0.6})),
        ("star_vs_path", e(4, {(0, 1): 0.4, (0, 2): 0.4, (0, 3): 0.4}), e(4, {(0, 1): 0.4, (1, 2): 0.4, (2, 3): 0.4})),
    ]


def check_large_deviation(ns: Sequence[int] = (10, 50), trials: int = 10_000, seed: int = 0) -> list[LemmaCheck]:
    """Frequency of ``l_b >= l_a`` under ``P_a`` against ``exp(-n J / 2)`` plus a 3-sigma margin."""
    out = []
    for k, (name, a, b) in enumerate(large_deviation_pairs()):
        j = j_from_log_partition(a, b)
        for n in ns:
            mu = _sample_mu(a, n, trials, rng_for(seed, 7, k, n))
            diff = mu @ (b.theta - a.theta) - (b.log_partition - a.log_partition)
            freq = float(np.mean(diff >= -1e-12))
            bound = math.exp(-0.5 * n * j)
            out.append(_check("large_deviation", {"pair": name, "n": n}, freq,
                              bound + _binomial_margin(bound, trials), "<=", cases=trials,
                              note=f"bound {bound:.4g} + 3 sigma"))
    return out


HOEFFDING_CONFIGS = ((4, 100, 0.5), (3, 50, 0.5), (4, 200, 0.3), (5, 100, 0.6), (6, 400, 0.3))


def check_elementwise_deviation(configs=HOEFFDING_CONFIGS, trials: int = 10_000, lam: float = 0.5,
                                seed: int = 0) -> list[LemmaCheck]:
    """``P[max |mu_hat - mu| >= t] <= 2 exp(-n t^2/2 + 2 log p)`` at the 3-sigma level."""
    out = []
    for k, (p, n, t) in enumerate(configs):
        model = IsingParams.from_edges(p, {(s, s + 1): lam for s in range(p - 1)})
        mu_true = mean_params_exact(model).mu
        mu_hat = _sample_mu(model, n, trials, rng_for(seed, 9, k))
        freq = float(np.mean(np.abs(mu_hat - mu_true).max(axis=1) >= t))
        bound = 2 * math.exp(-n * t * t / 2 + 2 * math.log(p))
        out.append(_check("elementwise_tail", {"p": p, "n": n, "t": t}, freq,
                          bound + _binomial_margin(bound, trials), "<=", cases=trials,
                          note=f"bound {bound:.4g} + 3 sigma"))
    return out


def check_pairwise_separation(ps: Iterable[int] = range(3, 6), ds: Sequence[int] = (1, 2),
                              lams: Sequence[float] = LAMBDAS, policies: Sequence[str] = POLICIES,
                              seed: int = 0) -> list[LemmaCheck]:
    """``max |mu_uv - mu'_uv|`` over ``u`` touching ``E xor E'`` is at least ``sinh^2(lam/4)/(2w(3e^{2w}+1))``."""
    out = []
    for p in ps:
        inc = incidence_masks(p)
        # pair index -> bitmask of its two endpoints
        ends = np.array([(1 << s) | (1 << t) for s, t in pair_list(p)], dtype=np.int64)
        vert_of_mask = np.array([sum(1 << v for v in range(p) if x & inc[v]) for x in range(1 << n_pairs(p))],
                                dtype=np.int64)
        for d in ds:
            if d > p - 1:
                continue
            for lam in lams:
                for policy in policies:
                    spec = GraphClassSpec.degree(p, d, lam)
                    _, th, e, lz, om, masks = _bank(spec, policy, seed)
                    mu = np.exp(e - lz[:, None]) @ pair_products(p)
                    worst, cases = np.inf, 0
                    for i in range(len(masks) - 1):
                        touched = vert_of_mask[masks[i] ^ masks[i + 1:]]
                        allowed = (touched[:, None] & ends[None, :]) != 0
                        diff = np.where(allowed, np.abs(mu[i] - mu[i + 1:]), 0.0).max(axis=1)
                        w = np.maximum(om[i], om[i + 1:])
                        floor = np.sinh(lam / 4) ** 2 / (2 * w * (3 * np.exp(2 * w) + 1))
                        worst = min(worst, float((diff - floor).min()))
                        cases += len(diff)
                    out.append(_check("mean_separation", {"p": p, "d": d, "lam": lam, "weights": policy},
                                      worst, 0.0, ">=", cases=cases, note="min of separation - floor"))
    return out


# ------------------------------------------------------------ registry

REGISTRY: dict[str, Callable[..., list[LemmaCheck]]] = {
    "cardinality": check_cardinality,
    "key-separation": check_key_separation,
    "degree-ensemble": check_degree_ensemble,
    "edge-ensemble": check_edge_ensemble,
    "large-deviation": check_large_deviation,
    "matching-bound": check_matching_bound,
    "elementwise-deviation": check_elementwise_deviation,
    "pairwise-separation": check_pairwise_separation,
    "conditional-separation": check_conditional_separation,
    "flipping": check_flipping,
    "fkg": check_fkg,
    "chain-rule": check_chain_rule,
}

# numeric identifiers accepted by the command line
NUMERIC_IDS = {
    "1": "cardinality", "4": "key-separation", "5": "degree-ensemble", "6": "edge-ensemble",
    "7": "large-deviation", "8": "matching-bound", "9": "elementwise-deviation",
    "10": "pairwise-separation", "11": "conditional-separation", "12": "flipping",
}


def verify_lemma(lemma_id, **params) -> list[LemmaCheck]:
    key = NUMERIC_IDS.get(str(lemma_id), str(lemma_id))
    if key not in REGISTRY:
        raise PreconditionViolated(
            f"unknown check {lemma_id!r}; choose from {sorted(REGISTRY)} or {sorted(NUMERIC_IDS, key=int)}")
    return REGISTRY[key](**params)
