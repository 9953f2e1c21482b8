"""Command-line interface: synth, train, evaluate, explain, stats.

A thin client over the workflow layer. All randomness comes from
explicit seed flags; exit codes are 0 (success), 2 (usage error) and
1 (runtime error), with single-line `error:`-prefixed messages on
standard error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .dataset import (
    FEATURE_NAMES,
    DatasetError,
    class_feature_stats,
    load_dataset,
    save_dataset,
)
from .explain import ExplainConfig, ExplainError
from .linsolve import LinsolveError
from .models import ModelError, ModelIOError, load_model, save_model
from .report import (
    ReportError,
    render_distribution_report,
    render_explanation_svg,
    render_explanation_text,
)
from .synthgen import DEFAULT_PRIOR, FeatureParams, GeneratorError, GeneratorParams
from .workflows import (
    evaluate_model,
    explain_records,
    format_train_report,
    select_explain_ids,
    synthesize,
    train_pipeline,
)

_COMPONENT_OF = {
    DatasetError: "dataset",
    GeneratorError: "synthgen",
    LinsolveError: "linsolve",
    ModelIOError: "models",
    ModelError: "models",
    ExplainError: "explain",
    ReportError: "report",
    OSError: "io",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Single-line diagnostics and a plain exception instead of SystemExit.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="prospect-explain", add_help=True)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p_synth = sub.add_parser("synth", help="generate a synthetic prospect CSV")
    p_synth.add_argument("--n", type=int, default=258)
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--prior", type=float, default=DEFAULT_PRIOR)
    p_synth.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="FEATURE:MEAN1,MEAN0,STD",
        help="override one feature's class-conditional parameters",
    )

    p_train = sub.add_parser("train", help="train a classifier and save it")
    p_train.add_argument("--data", required=True)
    p_train.add_argument("--model", required=True, choices=("logreg", "svm", "mlp"))
    p_train.add_argument("--test-fraction", type=float, default=0.5)
    p_train.add_argument("--split-seed", type=int, required=True)
    p_train.add_argument("--train-seed", type=int, required=True)
    p_train.add_argument("--out", required=True)

    p_eval = sub.add_parser("evaluate", help="accuracy of a saved model on a CSV")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--data", required=True)

    p_explain = sub.add_parser("explain", help="explain one instance or the test split")
    p_explain.add_argument("--model", required=True)
    p_explain.add_argument("--data", required=True)
    which = p_explain.add_mutually_exclusive_group(required=True)
    which.add_argument("--index", type=int)
    which.add_argument("--all-test", action="store_true")
    p_explain.add_argument("--samples", type=int, default=5000)
    p_explain.add_argument("--sigma", type=float, default=3.375)
    p_explain.add_argument("--lambda", dest="l1", type=float, default=0.001)
    p_explain.add_argument("--seed", type=int, required=True)
    p_explain.add_argument("--out-dir", required=True)

    p_stats = sub.add_parser("stats", help="class-conditional feature statistics")
    p_stats.add_argument("--data", required=True)
    p_stats.add_argument("--out", required=True)

    return parser


def _parse_param_override(spec: str) -> tuple[str, FeatureParams]:
    try:
        name, rest = spec.split(":", 1)
        mean1, mean0, std = (float(v) for v in rest.split(","))
    except ValueError:
        raise _UsageError(
            f"--param expects FEATURE:MEAN1,MEAN0,STD, got '{spec}'"
        ) from None
    return name, FeatureParams(mean_success=mean1, mean_failure=mean0, std=std)


def _cmd_synth(args) -> int:
    params = GeneratorParams(prior=args.prior)
    for spec in args.param:
        name, fp = _parse_param_override(spec)
        if name not in FEATURE_NAMES:
            raise _UsageError(f"--param names unknown feature '{name}'")
        params = params.with_feature(name, fp)
    ds = synthesize(args.n, args.seed, params)
    _ensure_parent(args.out)
    save_dataset(ds, args.out)
    n0, n1 = ds.class_counts()
    print(f"wrote {len(ds)} records ({n1} successes, {n0} failures) to {args.out}")
    return 0


def _cmd_train(args) -> int:
    ds = load_dataset(args.data)
    result = train_pipeline(
        ds,
        args.model,
        test_fraction=args.test_fraction,
        split_seed=args.split_seed,
        train_seed=args.train_seed,
    )
    _ensure_parent(args.out)
    save_model(result.model, args.out)
    sys.stdout.write(format_train_report(result.report))
    return 0


def _cmd_evaluate(args) -> int:
    model = load_model(args.model)
    ds = load_dataset(args.data)
    print(format(evaluate_model(model, ds), ".6g"))
    return 0


def _cmd_explain(args) -> int:
    model = load_model(args.model)
    ds = load_dataset(args.data)
    cfg = ExplainConfig(n_samples=args.samples, sigma=args.sigma, l1=args.l1, seed=args.seed)
    ids = select_explain_ids(model, ds, args.index, args.all_test)
    os.makedirs(args.out_dir, exist_ok=True)
    explanations = explain_records(model, ds, ids, cfg)
    for explanation in explanations:
        base = os.path.join(args.out_dir, str(explanation.instance_id))
        with open(base + ".tsv", "w", encoding="utf-8", newline="") as fh:
            fh.write(render_explanation_text(explanation))
        with open(base + ".svg", "w", encoding="utf-8", newline="") as fh:
            fh.write(render_explanation_svg(explanation))
    print(f"explained {len(explanations)} instance(s) into {args.out_dir}")
    return 0


def _cmd_stats(args) -> int:
    ds = load_dataset(args.data)
    stats = class_feature_stats(ds)
    _ensure_parent(args.out)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_distribution_report(stats))
    print(f"wrote distribution report to {args.out}")
    return 0


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


_DISPATCH = {
    "synth": _cmd_synth,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "explain": _cmd_explain,
    "stats": _cmd_stats,
}


def run(argv) -> int:
    """Parse argv (without the program name) and execute one subcommand."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help paths
        return 0 if exc.code in (0, None) else int(exc.code)
    if args.command is None:
        print("error: usage: a subcommand is required (synth, train, evaluate, explain, stats)", file=sys.stderr)
        return 2
    try:
        return _DISPATCH[args.command](args)
    except _UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except tuple(_COMPONENT_OF) as exc:
        component = next(
            name for klass, name in _COMPONENT_OF.items() if isinstance(exc, klass)
        )
        print(f"error: {component}: {_one_line(exc)}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {args.command}: {_one_line(exc)}", file=sys.stderr)
        return 1


def _one_line(exc: Exception) -> str:
    return " ".join(str(exc).split())


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
