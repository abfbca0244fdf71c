"""Monte Carlo sweeps of decoder success probability against sample size.

A sweep is a pure function of its :class:`ExperimentConfig`.  Every trial
draws from its own Philox stream keyed by ``(seed, n, trial_index)`` (plus
the graph index in worst-case mode), so results do not depend on how trials
are split across worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.stats import binomtest

from .bounds import necessary_threshold, sufficient_threshold
from .decoders import TIE_TOL, FeasibleSet, _select, mean_decode
from .ensembles import WEIGHT_POLICIES, class_models
from .errors import ConfigError
from .graphs import GraphClassSpec
from .ising import MeanParams, pair_products, rng_for

WORKERS_ENV = "ISINGLIMITS_WORKERS"
DECODERS = ("ml", "projection")
CSV_COLUMNS = ("n", "successes", "trials", "success_rate", "wilson_lo", "wilson_hi",
               "necessary_n", "sufficient_n", "seed", "config_hash")


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    p: int
    bound: int
    lam: float
    n_grid: tuple
    trials: int
    omega: Optional[float] = None
    decoder: str = "ml"
    weight_policy: str = "uniform"
    seed: int = 0
    delta: float = 0.1
    worst_case: bool = False
    ties_as_failure: bool = True

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if not self.n_grid:
            raise ConfigError("n_grid must not be empty")
        if self.n_grid[0] < 1 or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid must be strictly increasing positive integers")
        if int(self.trials) < 1:
            raise ConfigError("trials must be at least 1")
        if self.decoder not in DECODERS:
            raise ConfigError(f"decoder must be one of {DECODERS}")
        if self.weight_policy not in WEIGHT_POLICIES:
            raise ConfigError(f"weight_policy must be one of {WEIGHT_POLICIES}")
        if not 0 <= int(self.seed) < 1 << 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        # resolve the default omega so equal experiments hash equally
        object.__setattr__(self, "omega", self.spec.omega)

    @property
    def spec(self) -> GraphClassSpec:
        return GraphClassSpec(self.kind, self.p, self.bound, self.lam, self.omega)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = list(self.n_grid)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        return cls.from_dict(json.loads(text))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence, method="wilson")
    return float(ci.low), float(ci.high)


# ------------------------------------------------------------ model bank

@dataclass(frozen=True, eq=False)
class _Bank:
    models: list
    thetas: np.ndarray
    log_z: np.ndarray
    probs: np.ndarray
    masks: list
    phi: np.ndarray
    feasible: list


@lru_cache(maxsize=16)
def _bank(kind: str, p: int, bound: int, lam: float, omega: float, policy: str, seed: int) -> _Bank:
    spec = GraphClassSpec(kind, p, bound, lam, omega)
    models = class_models(spec, policy, seed)
    if len(models) < 2:
        raise ConfigError("the class must contain at least two graphs")
    thetas = np.array([m.theta for m in models])
    phi = pair_products(p)
    energies = thetas @ phi.T
    top = energies.max(axis=1, keepdims=True)
    w = np.exp(energies - top)
    z = w.sum(axis=1, keepdims=True)
    log_z = (np.log(z) + top)[:, 0]
    feasible = [FeasibleSet(m.support, lam, omega) for m in models]
    return _Bank(models, thetas, log_z, w / z, [m.support.edges for m in models], phi, feasible)


def _bank_for(cfg: ExperimentConfig) -> _Bank:
    return _bank(cfg.kind, cfg.p, cfg.bound, cfg.lam, cfg.omega, cfg.weight_policy, cfg.seed)


def _decode_once(cfg: ExperimentConfig, bank: _Bank, truth: int, n: int, rng) -> bool:
    counts = rng.multinomial(n, bank.probs[truth])
    mu = bank.phi.T @ counts / n
    if cfg.decoder == "ml":
        scores = bank.thetas @ mu - bank.log_z
        best, ties, _ = _select(scores, bank.masks, True, TIE_TOL)
    else:
        res = mean_decode(bank.feasible, MeanParams(cfg.p, np.clip(mu, -1.0, 1.0)))
        best, ties = res.index, res.ties
    if ties and cfg.ties_as_failure:
        return False
    return bank.masks[best] == bank.masks[truth]


def run_trial(config: ExperimentConfig, n: int, trial_index: int,
              graph_index: Optional[int] = None) -> bool:
    """One decoding trial; ``True`` when the decoder returns the true graph.

    The truth is drawn uniformly from the class unless ``graph_index`` pins
    it (worst-case mode).  The outcome depends only on the config, ``n``,
    ``trial_index`` and ``graph_index``.
    """
    if n < 1:
        raise ConfigError("n must be at least 1")
    bank = _bank_for(config)
    if graph_index is None:
        rng = rng_for(config.seed, n, trial_index)
        truth = int(rng.integers(len(bank.models)))
    else:
        if not 0 <= graph_index < len(bank.models):
            raise ConfigError(f"graph_index {graph_index} out of range")
        rng = rng_for(config.seed, n, trial_index, graph_index + 1)
        truth = graph_index
    return _decode_once(config, bank, truth, n, rng)


def _count_successes(args) -> tuple[int, Optional[str]]:
    cfg, n = args
    if not cfg.worst_case:
        return sum(run_trial(cfg, n, i) for i in range(cfg.trials)), None
    bank = _bank_for(cfg)
    per_graph = [sum(run_trial(cfg, n, i, g) for i in range(cfg.trials)) for g in range(len(bank.models))]
    g = int(np.argmin(per_graph))
    return per_graph[g], bank.models[g].support.to_text()


# ------------------------------------------------------------ sweeps

@dataclass
class SweepRow:
    n: int
    successes: int
    trials: int
    success_rate: float
    wilson_lo: float
    wilson_hi: float
    worst_graph: Optional[str] = None


@dataclass
class SweepResult:
    config: dict
    config_hash: str
    seed: int
    necessary_n: float
    sufficient_n: float
    label: str
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rows"] = [asdict(r) for r in self.rows]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> SweepResult:
        d = dict(d)
        d["rows"] = [SweepRow(**r) for r in d.get("rows", [])]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> SweepResult:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.n, r.successes, r.trials, repr(r.success_rate), repr(r.wilson_lo),
                        repr(r.wilson_hi), repr(self.necessary_n), repr(self.sufficient_n),
                        self.seed, self.config_hash])
        return buf.getvalue()


def _workers(workers: Optional[int]) -> int:
    if workers is None:
        raw = os.environ.get(WORKERS_ENV, "1")
        try:
            workers = int(raw)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, workers)


def overlays(config: ExperimentConfig) -> tuple[float, float]:
    """Necessary and sufficient sample sizes for the config's class.

    The sufficient side uses the known-weight formula for the likelihood
    decoder and the unknown-weight formula for the projection decoder.
    """
    spec = config.spec
    nec = necessary_threshold(spec, strict=False).value
    variant = "known" if config.decoder == "ml" else "unknown"
    return nec, sufficient_threshold(spec, config.delta, variant).value


def run_sweep(config: ExperimentConfig, workers: Optional[int] = None) -> SweepResult:
    """Success counts for every ``n`` in the grid.

    ``workers`` (or the ``ISINGLIMITS_WORKERS`` environment variable) sets
    the number of processes; the output is identical for any value.
    """
    _bank_for(config)  # fail fast on infeasible classes
    jobs = [(config, n) for n in config.n_grid]
    nw = min(_workers(workers), len(jobs))
    if nw > 1:
        with ProcessPoolExecutor(nw) as pool:
            counts = list(pool.map(_count_successes, jobs))
    else:
        counts = [_count_successes(j) for j in jobs]
    rows = []
    for n, (s, worst) in zip(config.n_grid, counts):
        lo, hi = wilson_interval(s, config.trials)
        rows.append(SweepRow(n, int(s), config.trials, s / config.trials, lo, hi, worst))
    nec, suf = overlays(config)
    slice_ = "uniform +lambda" if config.weight_policy == "uniform" else "random-sign +-lambda"
    label = ("worst case over graphs" if config.worst_case else "uniform random graph") + f", {slice_} weights"
    return SweepResult(config.to_dict(), config.config_hash, int(config.seed), nec, suf, label, rows)


def emit(result: SweepResult, fmt: str = "csv", path=None) -> str:
    """Serialise ``result`` as ``"csv"`` or ``"json"``; also write it to ``path`` if given."""
    if fmt == "csv":
        text = result.to_csv()
    elif fmt == "json":
        text = result.to_json()
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
