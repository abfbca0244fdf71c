"""Zero-field Ising models: exact inference by enumeration, and sampling.

States are enumerated as integers ``0 .. 2**p - 1``; bit ``s`` of the state
index set means ``x_s = +1``.  All exact routines stream over the full table
and are therefore guarded at ``p <= 16``.

Randomness contract
-------------------
Every sampler takes an explicit 64-bit ``seed``.  Streams are produced by
:func:`rng_for`, which feeds ``SeedSequence(seed, spawn_key=keys)`` into the
counter-based Philox-4x64 bit generator.  Distinct ``keys`` tuples (for
example ``(n, trial_index)``) give independent, platform-stable streams, so
parallel and sequential execution produce identical draws.
"""

from __future__ import annotations

import csv
import io
import math
import struct
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .errors import BadSpinValue, DimensionMismatch, PreconditionViolated, TooLarge
from .graphs import Graph, n_pairs, pair_index, pair_list

MAX_EXACT_P = 16
SAMPLE_MAGIC = b"ISGS"
SAMPLE_VERSION = 1
_HEADER = struct.Struct("<4sHHQQ")


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator for the stream ``(seed, *keys)``."""
    if seed < 0 or seed >= 1 << 64:
        raise PreconditionViolated("seed must be an unsigned 64-bit integer")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def _check_exact(p: int) -> None:
    if p > MAX_EXACT_P:
        raise TooLarge(f"exact enumeration limited to p <= {MAX_EXACT_P}, got p={p}")


@lru_cache(maxsize=None)
def spin_table(p: int) -> np.ndarray:
    """``(2**p, p)`` float array of all spin configurations (read-only)."""
    _check_exact(p)
    idx = np.arange(1 << p, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(p)) & 1
    table = (2 * bits - 1).astype(np.float64)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def pair_products(p: int) -> np.ndarray:
    """``(2**p, C(p,2))`` table of ``x_s x_t`` per state, canonical pair order."""
    if p > 12:
        raise TooLarge("pair-product table limited to p <= 12")
    x = spin_table(p)
    pairs = pair_list(p)
    if not pairs:
        out = np.zeros((1 << p, 0))
    else:
        s_idx = np.array([s for s, _ in pairs])
        t_idx = np.array([t for _, t in pairs])
        out = x[:, s_idx] * x[:, t_idx]
    out.setflags(write=False)
    return out


def state_index(x: Sequence[int]) -> int:
    idx = 0
    for s, v in enumerate(x):
        if v == 1:
            idx |= 1 << s
        elif v != -1:
            raise BadSpinValue(f"spin values must be +-1, got {v!r}")
    return idx


@dataclass(frozen=True, eq=False)
class IsingParams:
    """Couplings ``theta`` aligned to the canonical pair index."""

    p: int
    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=np.float64).reshape(-1)
        if theta.shape[0] != n_pairs(self.p):
            raise DimensionMismatch(
                f"theta has length {theta.shape[0]}, expected C({self.p},2) = {n_pairs(self.p)}")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def zeros(cls, p: int) -> IsingParams:
        return cls(p, np.zeros(n_pairs(p)))

    @classmethod
    def from_graph(cls, g: Graph, weight: Union[float, Sequence[float]] = 1.0) -> IsingParams:
        """Place ``weight`` (scalar, or one value per edge in index order) on the edges of ``g``."""
        theta = np.zeros(n_pairs(g.p))
        idx = g.edge_indices()
        theta[idx] = weight
        return cls(g.p, theta)

    @classmethod
    def from_edges(cls, p: int, weights: dict) -> IsingParams:
        theta = np.zeros(n_pairs(p))
        for (s, t), w in weights.items():
            theta[pair_index(s, t, p)] = w
        return cls(p, theta)

    @cached_property
    def support(self) -> Graph:
        mask = 0
        for i in np.flatnonzero(self.theta):
            mask |= 1 << int(i)
        return Graph(self.p, mask)

    @property
    def lambda_star(self) -> float:
        """Smallest ``|theta_st|`` over the edges (0 for an empty support)."""
        nz = np.abs(self.theta[self.theta != 0])
        return float(nz.min()) if nz.size else 0.0

    @property
    def omega_star(self) -> float:
        """Largest per-vertex sum of ``|theta_st|``."""
        return float(np.abs(self.coupling_matrix()).sum(axis=1).max(initial=0.0))

    def coupling_matrix(self) -> np.ndarray:
        w = np.zeros((self.p, self.p))
        for i, (s, t) in enumerate(pair_list(self.p)):
            w[s, t] = w[t, s] = self.theta[i]
        return w

    def in_class(self, g: Graph, lam: float, omega: float, tol: float = 1e-12) -> bool:
        return (self.support.edges == g.edges
                and self.lambda_star >= lam - tol
                and self.omega_star <= omega + tol)

    def midpoint(self, other: IsingParams) -> IsingParams:
        _same_p(self, other)
        return IsingParams(self.p, 0.5 * (self.theta + other.theta))

    def energy(self, x: Sequence[int]) -> float:
        xs = np.asarray(x, dtype=np.float64)
        if xs.shape != (self.p,) or not np.all(np.abs(xs) == 1):
            raise BadSpinValue("x must be a length-p vector of +-1")
        return float(0.5 * xs @ self.coupling_matrix() @ xs)

    @cached_property
    def energies(self) -> np.ndarray:
        """``sum_{s<t} theta_st x_s x_t`` for every state."""
        _check_exact(self.p)
        x = spin_table(self.p)
        e = 0.5 * np.einsum("ij,ij->i", x @ self.coupling_matrix(), x)
        e.setflags(write=False)
        return e

    @cached_property
    def log_partition(self) -> float:
        return float(logsumexp(self.energies))

    @cached_property
    def log_probabilities(self) -> np.ndarray:
        lp = self.energies - self.log_partition
        lp.setflags(write=False)
        return lp


def _same_p(a: IsingParams, b: IsingParams) -> None:
    if a.p != b.p:
        raise DimensionMismatch(f"models on {a.p} and {b.p} vertices")


@dataclass(frozen=True, eq=False)
class MeanParams:
    """Pairwise correlations ``E[X_s X_t]`` in canonical pair order."""

    p: int
    mu: np.ndarray

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64).reshape(-1)
        if mu.shape[0] != n_pairs(self.p):
            raise DimensionMismatch("mu must have length C(p,2)")
        if np.any(np.abs(mu) > 1 + 1e-12):
            raise PreconditionViolated("mean parameters must lie in [-1, 1]")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    def matrix(self) -> np.ndarray:
        m = np.eye(self.p)
        for i, (s, t) in enumerate(pair_list(self.p)):
            m[s, t] = m[t, s] = self.mu[i]
        return m


def log_partition(m: IsingParams) -> float:
    """``log Z(theta)`` via a max-shifted log-sum-exp over all states."""
    return m.log_partition


def partition_function(m: IsingParams) -> float:
    """``Z(theta) = sum_x exp(sum_{s<t} theta_st x_s x_t)``."""
    return math.exp(m.log_partition)


def probability(m: IsingParams, x: Sequence[int]) -> float:
    _check_exact(m.p)
    if len(x) != m.p:
        raise DimensionMismatch("spin vector length differs from p")
    return math.exp(m.log_probabilities[state_index(x)])


def probabilities(m: IsingParams) -> np.ndarray:
    """Probability of every state, indexed by state number."""
    return np.exp(m.log_probabilities)


def mean_params_exact(m: IsingParams) -> MeanParams:
    x = spin_table(m.p)
    prob = probabilities(m)
    corr = x.T @ (prob[:, None] * x)
    iu = np.triu_indices(m.p, 1)
    return MeanParams(m.p, np.clip(corr[iu], -1.0, 1.0))


def mean_params_batch(thetas: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact mean parameters and log-partitions for a stack of couplings.

    Args:
        thetas: ``(K, C(p,2))`` array, one model per row.
        p: vertex count, at most 12.

    Returns:
        ``(mu, log_z)`` with shapes ``(K, C(p,2))`` and ``(K,)``.
    """
    phi = pair_products(p)
    e = np.atleast_2d(thetas) @ phi.T
    log_z = logsumexp(e, axis=1)
    prob = np.exp(e - log_z[:, None])
    return prob @ phi, log_z


@dataclass(frozen=True, eq=False)
class SampleSet:
    """``n`` spin vectors (rows of +-1, int8) plus the seed that produced them."""

    data: np.ndarray
    seed: int = 0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.int8)
        if data.ndim != 2 or data.shape[0] < 1:
            raise PreconditionViolated("a SampleSet needs at least one row of spins")
        if not np.all(np.abs(data) == 1):
            raise BadSpinValue("every sample entry must be +-1")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def p(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return self.seed == other.seed and np.array_equal(self.data, other.data)

    def to_bytes(self) -> bytes:
        bits = (self.data > 0).astype(np.uint8)
        packed = np.packbits(bits, axis=1, bitorder="little")
        return _HEADER.pack(SAMPLE_MAGIC, SAMPLE_VERSION, self.p, self.n, self.seed) + packed.tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> SampleSet:
        if len(blob) < _HEADER.size:
            raise PreconditionViolated("truncated sample file")
        magic, version, p, n, seed = _HEADER.unpack_from(blob)
        if magic != SAMPLE_MAGIC or version != SAMPLE_VERSION:
            raise PreconditionViolated("not a sample file (bad magic or version)")
        row_bytes = (p + 7) // 8
        body = np.frombuffer(blob, dtype=np.uint8, offset=_HEADER.size)
        if body.size != n * row_bytes:
            raise PreconditionViolated("sample file body has the wrong length")
        bits = np.unpackbits(body.reshape(n, row_bytes), axis=1, count=p, bitorder="little")
        return cls(2 * bits.astype(np.int8) - 1, seed)

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path) -> SampleSet:
        return cls.from_bytes(Path(path).read_bytes())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerows(self.data.tolist())
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, seed: int = 0) -> SampleSet:
        rows = [list(map(int, r)) for r in csv.reader(io.StringIO(text)) if r]
        return cls(np.array(rows, dtype=np.int8), seed)


def _states_to_spins(states: np.ndarray, p: int) -> np.ndarray:
    bits = (states[:, None] >> np.arange(p)) & 1
    return (2 * bits - 1).astype(np.int8)


def sample_exact(m: IsingParams, n: int, seed: int) -> SampleSet:
    """``n`` i.i.d. draws by inverse-CDF lookup in the full probability table."""
    _check_exact(m.p)
    if n < 1:
        raise PreconditionViolated("n must be at least 1")
    cdf = np.cumsum(probabilities(m))
    cdf[-1] = 1.0
    u = rng_for(seed).random(n)
    states = np.searchsorted(cdf, u, side="right")
    return SampleSet(_states_to_spins(states, m.p), seed)


def sample_counts(m: IsingParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """Histogram over the ``2**p`` states of ``n`` i.i.d. draws.

    Distributionally identical to tallying :func:`sample_exact` output, but
    costs ``O(2**p)`` regardless of ``n``.
    """
    _check_exact(m.p)
    prob = probabilities(m)
    return rng.multinomial(n, prob / prob.sum())


def counts_mean_params(counts: np.ndarray, p: int) -> MeanParams:
    """Empirical pairwise correlations from a state histogram."""
    n = counts.sum()
    x = spin_table(p)
    corr = x.T @ (counts[:, None] * x) / n
    iu = np.triu_indices(p, 1)
    return MeanParams(p, np.clip(corr[iu], -1.0, 1.0))


def sample_gibbs(m: IsingParams, n: int, burn_in: Optional[int] = None,
                 thin: Optional[int] = None, seed: int = 0) -> SampleSet:
    """Single-site Gibbs chain with a systematic sweep order ``0 .. p-1``.

    The chain starts from uniform random spins, runs ``burn_in`` sweeps, and
    then records the state after every ``thin``-th sweep until ``n`` rows are
    collected.  Defaults are ``100 * p`` burn-in sweeps and ``thin = p``.
    """
    p = m.p
    burn_in = 100 * p if burn_in is None else burn_in
    thin = p if thin is None else thin
    if burn_in < 0 or thin < 1 or n < 1:
        raise PreconditionViolated("need burn_in >= 0, thin >= 1, n >= 1")
    rng = rng_for(seed)
    w = m.coupling_matrix()
    nbrs = [[(t, 2.0 * w[s, t]) for t in range(p) if w[s, t] != 0.0] for s in range(p)]
    x = list((2 * rng.integers(0, 2, size=p) - 1).tolist())
    out = np.empty((n, p), dtype=np.int8)
    total = burn_in + n * thin
    block = 4096
    exp = math.exp
    sweep = 0
    row = 0
    while sweep < total:
        nb = min(block, total - sweep)
        u = rng.random((nb, p)).tolist()
        for b in range(nb):
            ub = u[b]
            for s in range(p):
                h2 = 0.0
                for t, w2 in nbrs[s]:
                    h2 += w2 * x[t]
                # P(x_s = +1 | rest) = 1 / (1 + exp(-2 h))
                x[s] = 1 if ub[s] * (1.0 + exp(-h2)) < 1.0 else -1
            sweep += 1
            if sweep > burn_in and (sweep - burn_in) % thin == 0:
                out[row] = x
                row += 1
    return SampleSet(out, seed)
