"""Command-line front end.

Every command reads the delimited input formats of :mod:`multiplicity.io`,
computes everything first and only then writes its outputs.  Exit codes:
0 success, 1 input error, 2 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import SCORES
from .ensemble import STRATEGIES, ambiguity_curve, selective_curve
from .errors import ComputationError, InputError, MissingValMetric, MultiplicityError
from .io import (
    file_digest,
    fmt,
    load_rashomon_set,
    read_metadata,
    read_points,
    read_values,
    write_csv,
    write_rashomon_set,
)
from .kde import kde_grid
from .metrics import expected_pairwise_agreement, model_accuracies, model_roc_aucs, relaxed_ambiguity
from .stats import analytic_ambiguity, f_test_variance, simulate_independent_accuracies
from .synth import SynthConfig, generate
from .voting import ConsensusRule


def _float_list(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _int_list(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def _tau_tag(tau):
    return f"{tau:g}"


def _add_inputs(parser, validation=True):
    parser.add_argument("--predictions", required=True, help="test-split prediction log")
    parser.add_argument("--truth", required=True, help="test-split ground truth")
    parser.add_argument("--metadata", required=True, help="model metadata")
    if validation:
        parser.add_argument("--val-predictions", help="validation-split prediction log")
        parser.add_argument("--val-truth", help="validation-split ground truth")
    parser.add_argument("--num-classes", type=int, help="override the number of classes")
    parser.add_argument("--threshold", type=float, default=0.5,
                        help="score threshold for binary and multi-label tasks (default 0.5)")


def _load(args):
    return load_rashomon_set(args.predictions, args.truth, args.metadata,
                             getattr(args, "val_predictions", None),
                             getattr(args, "val_truth", None),
                             args.num_classes, args.threshold)


def _input_paths(args):
    names = ["predictions", "truth", "metadata", "val_predictions", "val_truth"]
    return {n: getattr(args, n) for n in names if getattr(args, n, None)}


def _out_dir(path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_validate(args):
    rset, score_set = _load(args)
    print(f"ok: {rset.n_models} models, {rset.n_samples} test samples, "
          f"{rset.ground_truth_test.num_classes} "
          f"{'targets' if rset.multilabel else 'classes'}, "
          f"{'scores' if score_set is not None else 'labels'}"
          + (f", {rset.ground_truth_val.n_samples} validation samples"
             if rset.ground_truth_val is not None else ""))
    return 0


def _curve_rows(curve, seed):
    return [[int(k), m, lo, hi, curve.strategy, curve.tau, curve.repetitions, seed]
            for k, m, lo, hi in curve.points]


def cmd_ambiguity(args):
    rset, _ = _load(args)
    outputs = []
    for strategy in args.strategy:
        for tau in args.tau:
            curve = ambiguity_curve(rset, strategy, tau, args.repetitions, args.seed)
            outputs.append((f"ambiguity_{strategy}_tau{_tau_tag(tau)}.csv", curve))
    out = _out_dir(args.out)
    header = ["num_models", "mean", "iqr25", "iqr75", "strategy", "tau", "repetitions", "seed"]
    for name, curve in outputs:
        write_csv(out / name, header, _curve_rows(curve, args.seed))
    return 0


def _agreement_criterion(rset):
    return "correct" if rset.multilabel else "match"


def cmd_agreement(args):
    rset, _ = _load(args)
    rule = ConsensusRule(args.tau)
    summaries = [expected_pairwise_agreement(rset, m, rule, args.pairs, args.normalize, args.seed,
                                             _agreement_criterion(rset))
                 for m in args.ensemble_size]
    out = _out_dir(args.out)
    write_csv(out / "agreement_summary.csv",
              ["ensemble_size", "tau", "normalized", "criterion", "num_pairs", "seed",
               "mean_agreement", "std_agreement", "mean_coverage", "std_coverage"],
              [[s.ensemble_size, s.tau, s.normalized, s.criterion, s.num_pairs, s.rng_seed,
                s.mean_agreement, s.std_agreement, s.mean_coverage, s.std_coverage]
               for s in summaries])
    write_csv(out / "agreement_pairs.csv",
              ["ensemble_size", "pair", "agreement", "joint_coverage", "first_accuracy",
               "tau", "normalized", "seed"],
              [[s.ensemble_size, r, a, c, acc, s.tau, s.normalized, s.rng_seed]
               for s in summaries
               for r, (a, c, acc) in enumerate(zip(s.agreements, s.coverages, s.first_accuracies))])
    return 0


def cmd_selective(args):
    rset, _ = _load(args)
    members = [m for m in args.members.split(",") if m] if args.members else None
    curves = [selective_curve(rset, args.strategy, tau, args.repetitions, args.seed,
                              members=members, max_models=args.ensemble_size)
              for tau in args.tau]
    out = _out_dir(args.out)
    header = ["num_models", "coverage_mean", "coverage_iqr25", "coverage_iqr75",
              "accuracy_mean", "accuracy_iqr25", "accuracy_iqr75", "best_single_accuracy",
              "strategy", "tau", "repetitions", "seed"]
    for c in curves:
        rows = [[int(c.num_models[i]), c.coverage_mean[i], c.coverage_iqr25[i],
                 c.coverage_iqr75[i], c.accuracy_mean[i], c.accuracy_iqr25[i],
                 c.accuracy_iqr75[i], c.best_single_accuracy, c.strategy, c.tau,
                 c.repetitions, args.seed]
                for i in range(c.num_models.size)]
        write_csv(out / f"selective_{c.strategy}_tau{_tau_tag(c.tau)}.csv", header, rows)
    return 0


def cmd_simulate(args):
    sample = simulate_independent_accuracies(args.p, args.n_samples, args.n_models, args.seed)
    write_csv(args.out, ["accuracy", "model", "p", "n_samples", "seed"],
              [[a, j, sample.p, sample.n_samples, sample.rng_seed]
               for j, a in enumerate(sample.accuracies)])
    return 0


def cmd_ftest(args):
    result = f_test_variance(read_values(args.file_a), read_values(args.file_b))
    header = ["f_statistic", "p_value", "df_num", "df_den"]
    row = [result.f_statistic, result.p_value, result.df_num, result.df_den]
    if args.out:
        write_csv(args.out, header, [row])
    else:
        print(",".join(header))
        print(",".join(fmt(v) for v in row))
    return 0


def cmd_kde(args):
    if bool(args.points) == bool(args.metadata):
        raise InputError("give exactly one of --points or --metadata")
    if args.points:
        points = read_points(args.points)
    else:
        records = read_metadata(args.metadata)
        if any(r.val_metric is None or r.test_metric is None for r in records):
            raise MissingValMetric("every model needs val_metric and test_metric")
        points = np.array([[r.val_metric, r.test_metric] for r in records])
    grid = kde_grid(points, args.bw_adjust, tuple(args.grid), args.thresh,
                    relative=not args.absolute_thresh)
    rows = [[grid.x[i], grid.y[j], grid.density[j, i]]
            for j in range(grid.y.size) for i in range(grid.x.size)]
    write_csv(args.out, ["x", "y", "density"], rows)
    return 0


def cmd_synth(args):
    config = SynthConfig(args.n_models, args.n_samples, args.num_classes, args.p, args.rho,
                         args.seed, args.n_val_samples, args.val_rho)
    rset = generate(config)
    write_rashomon_set(rset, args.out)
    return 0


def _clean(value):
    """JSON-safe copy: numpy scalars/arrays to Python, NaN to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return None if np.isnan(value) else value
    return value


def build_report(args) -> dict:
    rset, score_set = _load(args)
    taus = args.taus
    acc_test = model_accuracies(rset, "test")
    scalars = {
        "n_models": rset.n_models,
        "n_test_samples": rset.n_samples,
        "test_accuracy": dict(zip(rset.model_ids, acc_test)),
        "mean_test_accuracy": float(acc_test.mean()),
        "ambiguity": {_tau_tag(t): relaxed_ambiguity(rset, rset.model_ids, t) for t in taus},
        "analytic_ambiguity": analytic_ambiguity(float(acc_test.mean()), rset.n_models),
    }
    if score_set is not None:
        scalars["test_mean_roc_auc"] = dict(zip(rset.model_ids, model_roc_aucs(score_set)))
    if rset.val_predictions is not None:
        acc_val = model_accuracies(rset, "val")
        scalars["val_accuracy"] = dict(zip(rset.model_ids, acc_val))
        scalars["mean_val_accuracy"] = float(acc_val.mean())

    strategies = ["random"]
    if all(r.val_metric is not None for r in rset.records):
        strategies += ["ascending_val", "descending_val"]
    curves = []
    for strategy in strategies:
        for tau in taus:
            c = ambiguity_curve(rset, strategy, tau, args.repetitions, args.seed)
            curves.append({"strategy": c.strategy, "tau": c.tau, "repetitions": c.repetitions,
                           "rng_seed": c.rng_seed, "num_models": c.num_models,
                           "mean": c.mean, "iqr25": c.iqr25, "iqr75": c.iqr75})

    summaries = []
    for m in args.ensemble_sizes:
        if 2 * m > rset.n_models:
            continue
        for normalize in (False, True):
            s = expected_pairwise_agreement(rset, m, ConsensusRule(1.0), args.pairs, normalize,
                                            args.seed, _agreement_criterion(rset))
            summaries.append({k: getattr(s, k) for k in s.__dataclass_fields__})

    ftests = []
    splits = [("test", acc_test, rset.n_samples)]
    if rset.val_predictions is not None:
        splits.insert(0, ("val", acc_val, rset.ground_truth_val.n_samples))
    for split, acc, n in splits:
        if rset.n_models < 2:
            continue
        sim = simulate_independent_accuracies(float(acc.mean()), n, rset.n_models, args.seed)
        entry = {"split": split, "p": float(acc.mean()), "n_samples": n,
                 "n_models": rset.n_models, "rng_seed": args.seed}
        try:
            r = f_test_variance(acc, sim.accuracies)
            entry.update(f_statistic=r.f_statistic, p_value=r.p_value,
                         df_num=r.df_num, df_den=r.df_den)
        except ComputationError as exc:
            entry["error"] = str(exc)
        ftests.append(entry)

    provenance = {
        "toolkit_version": __version__,
        "inputs": {name: {"path": str(p), "sha256": file_digest(p)}
                   for name, p in _input_paths(args).items()},
        "seed": args.seed,
        "parameters": {"repetitions": args.repetitions, "pairs": args.pairs,
                       "ensemble_sizes": args.ensemble_sizes, "taus": taus,
                       "threshold": args.threshold,
                       "mode": SCORES if score_set is not None else "labels"},
    }
    return _clean({"scalar_metrics": scalars, "curves": curves,
                   "agreement_summaries": summaries, "ftests": ftests,
                   "provenance": provenance})


def cmd_report(args):
    report = build_report(args)
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
    Path(args.out).write_text(text, encoding="utf-8", newline="")
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); 2 is reserved for computation errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="multiplicity",
        description="Predictive multiplicity analysis of a set of competing classifiers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and cross-check input files")
    _add_inputs(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ambiguity", help="ambiguity versus number of models")
    _add_inputs(p)
    p.add_argument("--tau", type=_float_list, default=[1.0],
                   help="comma-separated consensus thresholds (default 1)")
    p.add_argument("--strategy", type=lambda s: s.split(","), default=["random"],
                   help=f"comma-separated orders from {', '.join(STRATEGIES)}")
    p.add_argument("--repetitions", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_ambiguity)

    p = sub.add_parser("agreement", help="expected pairwise agreement of models/ensembles")
    _add_inputs(p)
    p.add_argument("--ensemble-size", type=_int_list, default=[1],
                   help="comma-separated ensemble sizes (default 1)")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--normalize", action="store_true",
                   help="divide agreement by joint coverage")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("selective", help="coverage and accuracy of consensus ensembles")
    _add_inputs(p)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--members", help="comma-separated model ids, added in this order")
    group.add_argument("--ensemble-size", type=int, help="largest ensemble considered")
    p.add_argument("--tau", type=_float_list, default=[1.0])
    p.add_argument("--strategy", default="random", choices=STRATEGIES)
    p.add_argument("--repetitions", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_selective)

    p = sub.add_parser("simulate", help="accuracies of models with independent errors")
    p.add_argument("--p", type=float, required=True, help="per-sample accuracy")
    p.add_argument("--n-samples", type=int, required=True)
    p.add_argument("--n-models", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ftest", help="two-sided F-test of variances")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_ftest)

    p = sub.add_parser("kde", help="2-D KDE grid of scatter points")
    p.add_argument("--points", help="file with x,y columns")
    p.add_argument("--metadata", help="use (val_metric, test_metric) of each model")
    p.add_argument("--bw-adjust", type=float, default=0.5)
    p.add_argument("--grid", type=int, nargs=2, default=[200, 200], metavar=("NX", "NY"))
    p.add_argument("--thresh", type=float, default=0.05)
    p.add_argument("--absolute-thresh", action="store_true",
                   help="treat --thresh as an absolute density instead of a fraction of the max")
    p.add_argument("--out", required=True, help="output file")
    p.set_defaults(func=cmd_kde)

    p = sub.add_parser("synth", help="write a synthetic Rashomon set")
    p.add_argument("--n-models", type=int, default=50)
    p.add_argument("--n-samples", type=int, default=1000)
    p.add_argument("--n-val-samples", type=int)
    p.add_argument("--num-classes", type=int, default=2)
    p.add_argument("--p", type=float, default=0.9, help="target accuracy")
    p.add_argument("--rho", type=float, default=0.0, help="error correlation")
    p.add_argument("--val-rho", type=float, help="validation error correlation (default --rho)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", help="aggregate JSON report of all analyses")
    _add_inputs(p)
    p.add_argument("--taus", type=_float_list, default=[0.8, 0.9, 1.0])
    p.add_argument("--ensemble-sizes", type=_int_list, default=[1, 2, 5])
    p.add_argument("--repetitions", type=int, default=50)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output JSON file")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except MultiplicityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
