"""Command-line entry point.

Exit codes: 0 on success, 1 when a verification check fails, 2 on invalid
input, 3 when the requested size exceeds an enumeration guard.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bounds, divergences, harness, verify
from .decoders import FeasibleSet, mean_decode, ml_decode
from .ensembles import WEIGHT_POLICIES, class_models
from .errors import ConfigError, IsingLimitsError, ScaleError
from .graphs import Graph, GraphClassSpec, enumerate_class
from .ising import SAMPLE_MAGIC, IsingParams, SampleSet, sample_exact, sample_gibbs

KINDS = {"deg": "degree", "degree": "degree", "edge": "edge"}


def _class_args(ap: argparse.ArgumentParser, required: bool = True) -> None:
    ap.add_argument("--class", dest="kind", choices=sorted(KINDS), required=required)
    ap.add_argument("--p", type=int, required=required)
    ap.add_argument("--d", type=int, help="degree bound (degree class)")
    ap.add_argument("--k", type=int, help="edge bound (edge class)")
    ap.add_argument("--lambda", dest="lam", type=float, default=1.0)
    ap.add_argument("--omega", type=float, default=None)


def _spec(a) -> GraphClassSpec:
    kind = KINDS[a.kind]
    bound = a.d if kind == "degree" else a.k
    if bound is None:
        raise ConfigError(f"--{'d' if kind == 'degree' else 'k'} is required for the {kind} class")
    return GraphClassSpec(kind, a.p, bound, a.lam, a.omega)


def _model(text: str, weights: str | None, lam: float) -> IsingParams:
    g = Graph.from_text(text)
    if weights:
        w = [float(x) for x in weights.split(",")]
        if len(w) != g.n_edges:
            raise ConfigError(f"{len(w)} weights given for {g.n_edges} edges")
        return IsingParams.from_graph(g, w)
    return IsingParams.from_graph(g, lam)


def _load_samples(path: str) -> SampleSet:
    blob = Path(path).read_bytes()
    if blob[:4] == SAMPLE_MAGIC:
        return SampleSet.from_bytes(blob)
    return SampleSet.from_csv(blob.decode())


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# ------------------------------------------------------------ subcommands

def cmd_enumerate(a) -> int:
    spec = _spec(a)
    graphs = list(enumerate_class(spec))
    if a.count:
        print(len(graphs))
    else:
        for g in graphs:
            print(g.to_text())
    return 0


def cmd_bounds(a) -> int:
    rep = bounds.threshold_report(_spec(a), a.delta, strict=a.strict, literal_unknown=a.literal_unknown)
    if a.format in ("json", "both"):
        print(rep.to_json())
    if a.format in ("text", "both"):
        print(rep.to_text())
    return 0


def cmd_divergence(a) -> int:
    m1 = _model(a.model_a, a.weights_a, a.lam)
    m2 = _model(a.model_b, a.weights_b, a.lam)
    _print_json({
        "kl_ab": divergences.kl(m1, m2), "kl_ab_means": divergences.kl_from_means(m1, m2),
        "kl_ba": divergences.kl(m2, m1), "kl_ba_means": divergences.kl_from_means(m2, m1),
        "sym_kl": divergences.sym_kl(m1, m2), "sym_kl_means": divergences.sym_kl_from_means(m1, m2),
        "j": divergences.j_divergence(m1, m2), "j_log_partition": divergences.j_from_log_partition(m1, m2),
    })
    return 0


def cmd_verify(a) -> int:
    params = json.loads(a.params) if a.params else {}
    checks = verify.verify_lemma(a.id, **params)
    if a.json:
        _print_json([c.to_dict() for c in checks])
    else:
        print(verify.format_table(checks))
    return 0 if all(c.passed for c in checks) else 1


def cmd_sample(a) -> int:
    m = _model(a.graph, a.weights, a.lam)
    s = sample_gibbs(m, a.n, seed=a.seed) if a.gibbs else sample_exact(m, a.n, a.seed)
    if a.csv:
        Path(a.out).write_text(s.to_csv())
    else:
        s.save(a.out)
    return 0


def cmd_decode(a) -> int:
    spec = _spec(a)
    samples = _load_samples(a.samples)
    models = class_models(spec, a.policy, a.seed)
    if a.variant == "known":
        res = ml_decode(models, samples)
    else:
        res = mean_decode([FeasibleSet(m.support, spec.lam, spec.omega) for m in models], samples)
    _print_json(res.to_dict())
    return 0


def _config_from_args(a) -> harness.ExperimentConfig:
    if a.config:
        return harness.ExperimentConfig.from_json(Path(a.config).read_text())
    if a.kind is None or a.p is None or not a.n_grid:
        raise ConfigError("give --config or --class, --p and --n-grid")
    spec = _spec(a)
    return harness.ExperimentConfig(spec.kind, spec.p, spec.bound, spec.lam, a.n_grid, a.trials,
                                    omega=a.omega, decoder=a.decoder, weight_policy=a.policy,
                                    seed=a.seed, delta=a.delta, worst_case=a.worst_case,
                                    ties_as_failure=not a.ties_as_success)


def cmd_sweep(a) -> int:
    cfg = _config_from_args(a)
    res = harness.run_sweep(cfg, workers=a.workers)
    if a.json:
        harness.emit(res, "json", a.json)
    text = harness.emit(res, "csv", a.out)
    if a.out is None:
        sys.stdout.write(text)
    return 0


def cmd_emit(a) -> int:
    res = harness.SweepResult.from_json(Path(a.result).read_text())
    text = harness.emit(res, a.format, a.out)
    if a.out is None:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isinglimits",
                                 description="Exact small-scale tools for Ising graph selection limits.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("enumerate", help="list the graphs of a class")
    _class_args(p)
    p.add_argument("--count", action="store_true", help="print only the number of graphs")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("bounds", help="necessary and sufficient sample sizes")
    _class_args(p)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--strict", action="store_true", help="reject omega < 1")
    p.add_argument("--literal-unknown", action="store_true")
    p.add_argument("--format", choices=("json", "text", "both"), default="both")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("divergence", help="KL, symmetrised KL and J between two models")
    p.add_argument("--model-a", required=True, help="graph as p=<int>;edges=s-t,...")
    p.add_argument("--model-b", required=True)
    p.add_argument("--weights-a", help="comma-separated edge weights (default: lambda)")
    p.add_argument("--weights-b")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("verify-lemma", help="brute-force an inequality and print a pass/fail table")
    p.add_argument("--id", required=True,
                   help=f"one of {sorted(verify.NUMERIC_IDS, key=int)} or {sorted(verify.REGISTRY)}")
    p.add_argument("--params", help="JSON object of keyword overrides")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="draw samples from a model")
    p.add_argument("--graph", required=True)
    p.add_argument("--weights")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gibbs", action="store_true")
    p.add_argument("--csv", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("decode", help="recover the graph from a sample file")
    _class_args(p)
    p.add_argument("--samples", required=True, help="binary sample file or CSV of +-1 rows")
    p.add_argument("--variant", choices=("known", "unknown"), default="known")
    p.add_argument("--policy", choices=WEIGHT_POLICIES, default="uniform")
    p.add_argument("--seed", type=int, default=0, help="seed of the random-sign weight policy")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte Carlo success rate against n")
    _class_args(p, required=False)
    p.add_argument("--config", help="ExperimentConfig JSON file (overrides the flags)")
    p.add_argument("--n-grid", type=int, nargs="+")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--decoder", choices=harness.DECODERS, default="ml")
    p.add_argument("--policy", choices=WEIGHT_POLICIES, default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--worst-case", action="store_true")
    p.add_argument("--ties-as-success", action="store_true", help="accept a tie containing the truth")
    p.add_argument("--workers", type=int, default=None, help=f"default: ${harness.WORKERS_ENV} or 1")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--json", help="also write the full result as JSON")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("emit", help="convert a stored sweep result")
    p.add_argument("--result", required=True, help="SweepResult JSON")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_emit)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return a.func(a)
    except ScaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (IsingLimitsError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
