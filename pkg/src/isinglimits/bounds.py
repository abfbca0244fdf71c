"""Sample-size thresholds: Fano lower bounds and decoder upper bounds.

Every evaluator returns a real number of samples; round up for experiment
design.  Terms whose logarithm has a non-positive argument carry no
information and are reported as 0 and listed under ``vacuous``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Optional

from .errors import HypothesisViolated, PreconditionViolated
from .graphs import GraphClassSpec

Variant = Literal["known", "unknown"]


@dataclass
class ThresholdPart:
    terms: dict
    value: float
    vacuous: list = field(default_factory=list)
    hypothesis_ok: bool = True


@dataclass
class ThresholdReport:
    spec: dict
    delta: float
    necessary: ThresholdPart
    sufficient: dict

    def to_dict(self) -> dict:
        return {"spec": self.spec, "delta": self.delta,
                "necessary": asdict(self.necessary),
                "sufficient": {k: asdict(v) for k, v in self.sufficient.items()}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        rows = [(f"necessary.{k}", v) for k, v in self.necessary.terms.items()]
        rows.append(("necessary.max", self.necessary.value))
        for name, part in self.sufficient.items():
            rows.append((f"sufficient.{name}", part.value))
        width = max(len(r[0]) for r in rows)
        head = " ".join(f"{k}={v}" for k, v in self.spec.items()) + f" delta={self.delta}"
        lines = [head] + [f"{name.ljust(width)}  {val:>14.6g}" for name, val in rows]
        if self.necessary.vacuous:
            lines.append("vacuous terms: " + ", ".join(self.necessary.vacuous))
        if not self.necessary.hypothesis_ok:
            lines.append("note: omega < 1, outside the range where the lower bound is proven")
        return "\n".join(lines)


# ------------------------------------------------------------ Fano forms

def fano_pairwise(M: int, avg_sym_kl: float) -> float:
    """``log(M/4) / avg_S`` where ``avg_S = (2/M^2) sum_{k<l} S(k,l)``.

    Below this many samples every decoder errs with probability >= 1/2 on
    some member of the family.
    """
    if M < 5:
        raise PreconditionViolated("need M >= 5 so that log(M/4) > 0")
    if not avg_sym_kl > 0:
        raise PreconditionViolated("average symmetrised KL must be positive")
    return math.log(M / 4) / avg_sym_kl


def ensemble_a_threshold(p: int, lam: float) -> float:
    """Closed form ``log(C(p,2)/4) / (lam tanh lam)`` for the single-edge family.

    Dividing by ``lam tanh lam`` rather than by the exact average
    ``2 lam tanh lam (M-1)/M`` makes this about twice :func:`fano_pairwise`
    applied to the same family.
    """
    m = p * (p - 1) / 2
    return math.log(m / 4) / (lam * math.tanh(lam))


def fano_trivial_entropy(p: int, log_class_size: float) -> float:
    """Fano threshold with the mutual information bounded by ``n p``.

    The error stays above 1/2 while the information ``n p`` is at most half
    of ``log|G|``, i.e. for ``n < log|G| / (2p)``.  Inserting the class-size
    lower bound ``(dp/4) log(p/(8d))`` recovers
    :func:`trivial_entropy_closed_form`.  Returns 0 at ``log_class_size = 0``.
    """
    if log_class_size < 0:
        raise PreconditionViolated("log class size must be non-negative")
    return log_class_size / (2 * p)


def trivial_entropy_closed_form(p: int, d: int) -> float:
    """``(d/8) log(p/(8d))``, the specialisation for the degree class."""
    return d / 8 * math.log(p / (8 * d))


# ------------------------------------------------------------ sample-size thresholds

def single_edge_term(p: float, lam: float) -> float:
    """``log p / (2 lam tanh lam)``, shared by both classes."""
    return math.log(p) / (2 * lam * math.tanh(lam))


def necessary_threshold(spec: GraphClassSpec, strict: bool = True) -> ThresholdPart:
    """Largest sample size at which every decoder still fails half the time.

    Degree class terms: ``log p / (2 lam tanh lam)``,
    ``e^{omega/4} d lam log(pd/4 - 1) / (128 e^{3 lam/2})`` and
    ``(d/8) log(p/(8d))``.  Edge class terms: the first of these and
    ``e^{omega/2} log(k/8) / (64 omega e^{5 lam/2} sinh lam)``.

    Raises:
        HypothesisViolated: if ``omega < 1`` and ``strict`` is set.
    """
    p, lam, omega = spec.p, spec.lam, spec.omega
    ok = omega >= 1
    if not ok and strict:
        raise HypothesisViolated(f"lower bounds need omega >= 1, got {omega}")
    terms: dict[str, float] = {}
    vacuous: list[str] = []

    def put(name: str, log_arg: float, build):
        if log_arg <= 0:
            terms[name] = 0.0
            vacuous.append(name)
            return
        v = build(math.log(log_arg))
        if v <= 0:
            vacuous.append(name)
        terms[name] = max(v, 0.0)

    put("single_edge", p, lambda lg: lg / (2 * lam * math.tanh(lam)))
    if spec.kind == "degree":
        d = spec.bound
        put("clique_minus_edge", p * d / 4 - 1,
            lambda lg: math.exp(omega / 4) * d * lam * lg / (128 * math.exp(1.5 * lam)))
        put("class_entropy", p / (8 * d), lambda lg: d / 8 * lg)
    else:
        k = spec.bound
        put("clique_minus_edge", k / 8,
            lambda lg: math.exp(omega / 2) * lg / (64 * omega * math.exp(2.5 * lam) * math.sinh(lam)))
    return ThresholdPart(terms, max(terms.values()), vacuous, ok)


def sufficient_threshold(spec: GraphClassSpec, delta: float, variant: Variant = "known",
                         literal_unknown: bool = False) -> ThresholdPart:
    """Sample size at which a decoder attains worst-case error at most ``delta``.

    * degree, known weights: ``3(3e^{2w}+1)/sinh^2(lam/2) * d * (3 log p + log 2d + log 1/delta)``
    * edge, known weights: ``(3e^{2w}+1)/sinh^2(lam/4) * ((k+1) log p + log 1/delta)``
    * either class, unknown weights:
      ``[w (3e^{2w}+1) / sinh^2(lam/4)]^2 * (16 log p + 4 log(2/delta))``

    ``literal_unknown`` replaces ``3e^{2w}+1`` by ``3e^{2w+1}`` in the
    unknown-weight formula, the other reading of its typeset form.
    """
    if not 0 < delta < 1:
        raise PreconditionViolated("delta must lie in (0, 1)")
    if variant not in ("known", "unknown"):
        raise PreconditionViolated(f"unknown variant {variant!r}")
    p, lam, w = spec.p, spec.lam, spec.omega
    core = 3 * math.exp(2 * w) + 1
    lp = math.log(p)
    if variant == "unknown":
        c = 3 * math.exp(2 * w + 1) if literal_unknown else core
        val = (w * c / math.sinh(lam / 4) ** 2) ** 2 * (16 * lp + 4 * math.log(2 / delta))
        name = "unknown_literal" if literal_unknown else "unknown"
    elif spec.kind == "degree":
        d = spec.bound
        val = 3 * core / math.sinh(lam / 2) ** 2 * d * (3 * lp + math.log(2 * d) + math.log(1 / delta))
        name = "known"
    else:
        k = spec.bound
        val = core / math.sinh(lam / 4) ** 2 * ((k + 1) * lp + math.log(1 / delta))
        name = "known"
    return ThresholdPart({name: val}, val)


def threshold_report(spec: GraphClassSpec, delta: float = 0.1, strict: bool = False,
                     literal_unknown: bool = False) -> ThresholdReport:
    suff = {"known": sufficient_threshold(spec, delta, "known"),
            "unknown": sufficient_threshold(spec, delta, "unknown")}
    if literal_unknown:
        suff["unknown_literal"] = sufficient_threshold(spec, delta, "unknown", literal_unknown=True)
    return ThresholdReport(spec.to_dict(), delta, necessary_threshold(spec, strict=strict), suff)


# ------------------------------------------------------------ scaling laws

def scaling_laws(kind: str, bound: int, lam: float, log_p: float, c: float = 1.0) -> dict:
    """Order-of-magnitude sample sizes with every unspecified constant set to ``c``.

    Degree class: necessary ``max{d^2, lam^-2} log p`` and sufficient
    ``max{d^2, lam^-2} d log p``.  Edge class: necessary
    ``max{k, lam^-2} log p`` and sufficient ``k^2 log p`` (the latter
    assumes ``lam`` of order ``k^-1/2``).
    """
    inv = lam ** -2
    out = {"constant": c, "up_to_constants": True}
    if kind == "degree":
        out["necessary"] = c * max(bound * bound, inv) * log_p
        out["sufficient"] = c * max(bound * bound, inv) * bound * log_p
        out["lambda_le_inv_d"] = lam <= 1.0 / bound
    else:
        out["necessary"] = c * max(bound, inv) * log_p
        out["sufficient"] = c * bound * bound * log_p
        # lam ~ k^{-1/2}, read as within a factor 2 either side
        out["lambda_order_inv_sqrt_k"] = 0.5 <= lam * math.sqrt(bound) <= 2.0
    return out


def corollary_scalings(spec: GraphClassSpec, c: float = 1.0,
                       regime: Optional[str] = None) -> dict:
    out = scaling_laws(spec.kind, spec.bound, spec.lam, math.log(spec.p), c)
    out["regime"] = regime or "default"
    return out
