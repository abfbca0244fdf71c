"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py`` (the lines appear in the terminal
summary) or ``python tests/test_acceptance.py`` to print them directly.
"""

import math
import time

import numpy as np
import pytest

from isinglimits import verify
from isinglimits.bounds import ensemble_a_threshold, sufficient_threshold
from isinglimits.divergences import j_divergence, j_from_log_partition, sym_kl, sym_kl_from_means
from isinglimits.ensembles import ensemble_a
from isinglimits.graphs import GraphClassSpec, n_pairs
from isinglimits.harness import ExperimentConfig, emit, run_sweep
from isinglimits.ising import IsingParams, rng_for

RESULTS: dict[int, str] = {}


def _record(num, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    RESULTS[num] = f"{'PASS' if ok else 'FAIL'} criterion {num}: {detail} ({elapsed:.1f}s, limit {limit:.0f}s)"
    return ok


def _failures(checks):
    return [c for c in checks if not c.passed]


def _summary(checks):
    bad = _failures(checks)
    text = f"{len(checks) - len(bad)}/{len(checks)} checks hold"
    if bad:
        text += "; failing: " + ", ".join(sorted({f"{c.lemma}{c.config}" for c in bad})[:4])
    return text


# ------------------------------------------------------------ criteria

def criterion_1():
    t = time.perf_counter()
    rng = rng_for(2024, 1)
    worst = 0.0
    for _ in range(500):
        p = int(rng.integers(2, 9))
        th = []
        for _ in range(2):
            mask = rng.random(n_pairs(p)) < 0.5
            th.append(np.where(mask, rng.uniform(-1.5, 1.5, n_pairs(p)), 0.0))
        a, b = IsingParams(p, th[0]), IsingParams(p, th[1])
        worst = max(worst, abs(sym_kl(a, b) - sym_kl_from_means(a, b)),
                    abs(j_divergence(a, b) - j_from_log_partition(a, b)))
    return _record(1, worst <= 1e-10, f"500 pairs p<=8, max route gap {worst:.2e} (tol 1e-10)",
                   time.perf_counter() - t, 10)


def criterion_2():
    t = time.perf_counter()
    worst = 0.0
    for p in range(3, 9):
        for lam in (0.1, 0.5, 1.0):
            s = ensemble_a(p, lam).pairwise_sym_kl(closed_form=False)
            off = s[~np.eye(len(s), dtype=bool)]
            worst = max(worst, float(np.abs(off - 2 * lam * math.tanh(lam)).max()))
    return _record(2, worst <= 1e-10, f"single-edge ensemble S = 2 lam tanh lam, max error {worst:.2e}",
                   time.perf_counter() - t, 5)


def criterion_3():
    t = time.perf_counter()
    checks = verify.check_key_separation(range(3, 9)) + verify.check_fkg()
    return _record(3, not _failures(checks), "clique-minus-edge ratio formula, ratio and mean bounds: "
                   + _summary(checks), time.perf_counter() - t, 5)


def criterion_4():
    t = time.perf_counter()
    parts = {
        "degree ensemble S": verify.check_degree_ensemble(),
        "edge ensemble S": verify.check_edge_ensemble(),
        "matching bound on J": verify.check_matching_bound(),
        "conditional pair separation": verify.check_conditional_separation(),
    }
    detail = "; ".join(f"{k}: {_summary(v)}" for k, v in parts.items())
    ok = all(not _failures(v) for v in parts.values())
    return _record(4, ok, detail, time.perf_counter() - t, 120)


def criterion_5():
    t = time.perf_counter()
    checks = verify.check_flipping(range(2, 6), d=2)
    return _record(5, not _failures(checks), "edge flip changes the log-ratio by at least |theta|: "
                   + _summary(checks), time.perf_counter() - t, 60)


def criterion_6():
    t = time.perf_counter()
    checks = verify.check_cardinality(6, 3, 2)
    return _record(6, not _failures(checks), "class sizes within bounds: " + _summary(checks),
                   time.perf_counter() - t, 30)


def criterion_7():
    t = time.perf_counter()
    checks = verify.check_large_deviation(ns=(10, 50), trials=10_000)
    pairs = {c.config.get("pair") for c in checks}
    ok = not _failures(checks) and len(pairs) >= 5
    return _record(7, ok, f"pairwise error vs exp(-nJ/2), {len(pairs)} pairs: " + _summary(checks),
                   time.perf_counter() - t, 60)


def criterion_8():
    t = time.perf_counter()
    checks = verify.check_elementwise_deviation() + verify.check_pairwise_separation()
    return _record(8, not _failures(checks), "Hoeffding tail and projection separation: " + _summary(checks),
                   time.perf_counter() - t, 120)


BRACKET_TRIALS = 500
BRACKET_DELTA = 0.1


def bracket_config(p, lam, n_grid):
    return ExperimentConfig("edge", p, 1, lam, tuple(n_grid), BRACKET_TRIALS, delta=BRACKET_DELTA, seed=9)


def criterion_9():
    t = time.perf_counter()
    notes, ok = [], True
    for p in (4, 6, 8):
        for lam in (0.5, 1.0):
            lower = ensemble_a_threshold(p, lam)
            n_suf = math.ceil(sufficient_threshold(GraphClassSpec.edge(p, 1, lam), BRACKET_DELTA).value)
            below = [n for n in range(1, math.ceil(lower)) if n < lower]
            rows = run_sweep(bracket_config(p, lam, below + [n_suf])).rows
            hi_below = f"{max(r.wilson_hi for r in rows[:-1]):.3f}" if below else "none"
            lo_suf = rows[-1].wilson_lo
            ok &= all(r.wilson_hi <= 0.5 for r in rows[:-1]) and lo_suf >= 1 - BRACKET_DELTA
            notes.append(f"p={p} lam={lam}: {len(below)} n below {lower:.2f} (max hi {hi_below}),"
                         f" n={n_suf} lo {lo_suf:.3f}")
    return _record(9, ok, "; ".join(notes), time.perf_counter() - t, 600)


def criterion_10():
    t = time.perf_counter()
    cfg = bracket_config(6, 0.5, (1, 2, 3, 5, 8, 13, 21))
    first = emit(run_sweep(cfg, workers=1), "csv")
    again = emit(run_sweep(ExperimentConfig.from_json(cfg.to_json()), workers=2), "csv")
    same = first == again
    return _record(10, same, f"rerun of config {cfg.config_hash} {'byte-identical' if same else 'differs'}",
                   time.perf_counter() - t, 600)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion):
    ok = criterion()
    num = CRITERIA.index(criterion) + 1
    print(RESULTS[num])
    assert ok, RESULTS[num]


if __name__ == "__main__":
    for c in CRITERIA:
        c()
        print(RESULTS[CRITERIA.index(c) + 1], flush=True)
