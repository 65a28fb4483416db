"""``ccasched`` command-line entry point.

Every subcommand accepts ``--arch``, ``--seed`` and ``--out``. Errors are
reported on stderr and mapped to exit codes: 2 validation, 3 data,
4 numerical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config_space import Architecture, load_architecture
from .dataset import N_HPC, build_training_table, load_measurements, load_oracle, split, write_measurements, write_oracle
from .errors import CcaError, DataError, ValidationError
from .features import FEATURE_MODES, select_features
from .models import ALGORITHMS, Predictor, rmae, train
from .pipeline import default_config_doc, load_config, parse_config, run_pipeline
from .scheduler import (
    distribution,
    oracle_best,
    read_decision_configs,
    regret,
    schedule_application,
    write_decisions,
)
from .synthetic import SyntheticSpec, generate_synthetic
from .tradeoff import load_accuracies, load_costs, tradeoff, write_tradeoff

DEFAULT_SEED = 42


def _arch(args) -> Architecture:
    return load_architecture(args.arch) if args.arch else Architecture()


def _seed(args) -> int:
    return DEFAULT_SEED if args.seed is None else args.seed


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_distribution(report, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("class", "freq_ghz", "count", "fraction"))
        for cell in report.to_dict()["cells"]:
            w.writerow((cell["class"], repr(cell["freq_ghz"]), cell["count"], repr(cell["fraction"])))


def _print_distribution(report) -> None:
    for cls, frac in report.to_dict()["class_fractions"].items():
        print(f"{cls:<18} {100 * frac:6.2f}%")
    print(f"{'composed':<18} {100 * report.composed_fraction:6.2f}%")


def _split_tables(args, arch: Architecture, selected):
    ds = load_measurements(args.data)
    table = build_training_table(ds, arch, selected)
    return ds, split(table, args.train_fraction, _seed(args))


def cmd_gen(args) -> int:
    arch = _arch(args)
    spec = SyntheticSpec(
        n_workloads=args.n_workloads,
        rois_per_workload=args.rois_per_workload,
        noise_sd=args.noise_sd,
        seed=_seed(args),
    )
    ds, oracle = generate_synthetic(spec, arch)
    out = _out(args)
    write_measurements(ds, out / "measurements.csv")
    write_oracle(oracle, out / "oracle.csv")
    print(f"wrote {len(ds)} measurements for {len(ds.rois())} ROIs to {out}")
    return 0


def cmd_train(args) -> int:
    arch = _arch(args)
    ds = load_measurements(args.data)
    full = build_training_table(ds, arch, list(range(N_HPC)))
    full_train, _ = split(full, args.train_fraction, _seed(args))
    selected = select_features(full_train, args.k, args.features)
    table = build_training_table(ds, arch, selected)
    tr, _ = split(table, args.train_fraction, _seed(args))
    models = _out(args) / "models"
    models.mkdir(exist_ok=True)
    hyper = json.loads(args.hyperparameters) if args.hyperparameters else {}
    for alg in args.algorithm or ALGORITHMS:
        p = train(alg, tr, hyper.get(alg), _seed(args))
        p.save(models / f"{alg}.json")
        print(f"{alg:<18} trained on {len(tr.roi_keys())} ROIs, features {list(p.feature_names)}")
    return 0


def cmd_evaluate(args) -> int:
    arch = _arch(args)
    rows = []
    for path in args.model:
        p = Predictor.load(path)
        _, (tr, te) = _split_tables(args, arch, list(p.selected))
        target = tr if args.on == "train" else te
        err = rmae(p.predict_rows(target.X), target.y)
        rows.append((p.algorithm, err, 100.0 - err))
    with open(_out(args) / "evaluation.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("algorithm", "rmae", "accuracy"))
        for alg, err, acc in rows:
            w.writerow((alg, repr(err), repr(acc)))
    for alg, err, acc in rows:
        print(f"{alg:<18} RMAE {err:7.3f}%  accuracy {acc:7.3f}%")
    return 0


def cmd_schedule(args) -> int:
    arch = _arch(args)
    p = Predictor.load(args.model)
    ds, (_, te) = _split_tables(args, arch, list(p.selected))
    target = ds if args.rois == "all" else ds.subset(te.roi_keys())
    decisions = schedule_application(p, target, arch)
    out = _out(args)
    write_decisions(decisions, out / "decisions.csv")
    print(f"scheduled {len(decisions)} ROIs with {p.algorithm}")
    _print_distribution(distribution(decisions, arch))
    if args.oracle:
        print(f"regret {regret(decisions, load_oracle(args.oracle, arch), ds):.3f}%")
    return 0


def cmd_characterize(args) -> int:
    arch = _arch(args)
    ds = load_measurements(args.data)
    decisions = [oracle_best(ds, key, arch) for key in ds.rois()]
    out = _out(args)
    write_decisions(decisions, out / "characterization.csv")
    report = distribution(decisions, arch)
    _write_distribution(report, out / "distribution.csv")
    _print_distribution(report)
    return 0


def cmd_distribution(args) -> int:
    arch = _arch(args)
    report = distribution([cfg for _, cfg in read_decision_configs(args.decisions, arch)], arch)
    _write_distribution(report, _out(args) / "distribution.csv")
    _print_distribution(report)
    return 0


def cmd_tradeoff(args) -> int:
    costs = load_costs(args.costs)
    if args.uniform is not None:
        accuracies = {alg: args.uniform for alg in costs}
    else:
        accuracies = load_accuracies(args.accuracy)
    report = tradeoff(accuracies, costs)
    write_tradeoff(report, _out(args) / "tradeoff.csv")
    for i, e in enumerate(report.entries, start=1):
        print(f"{i}. {e.algorithm:<18} accuracy {e.accuracy:6.2f}%  ratio {e.ratio:.6f}  latency {e.latency_cycles}")
    return 0


def cmd_pipeline(args) -> int:
    if args.config:
        cfg = load_config(args.config, args.seed)
    else:
        cfg = parse_config(default_config_doc(), seed=_seed(args))
    if args.arch:
        cfg = replace(cfg, arch=load_architecture(args.arch))
    summary = run_pipeline(cfg, args.out)
    print(f"train ROIs {summary['train_rois']}, test ROIs {summary['test_rois']}")
    for alg, r in summary["algorithms"].items():
        print(f"{alg:<18} RMAE {r['rmae']:7.3f}%  regret {r['regret']:7.3f}%")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--arch", help="architecture JSON (default 8 base / 4 composed cores)")
    common.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED}; pipeline: the config's)")
    common.add_argument("--out", default="ccasched-out", help="output directory")

    split_opts = argparse.ArgumentParser(add_help=False)
    split_opts.add_argument("--data", required=True, help="measurements CSV")
    split_opts.add_argument("--train-fraction", type=float, default=0.7)

    parser = argparse.ArgumentParser(prog="ccasched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate a synthetic dataset and oracle")
    p.add_argument("--n-workloads", type=int, default=20)
    p.add_argument("--rois-per-workload", type=int, default=5)
    p.add_argument("--noise-sd", type=float, default=0.05)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", parents=[common, split_opts], help="train EDP predictors")
    p.add_argument("--algorithm", action="append", choices=ALGORITHMS, help="repeatable; default all")
    p.add_argument("--features", choices=FEATURE_MODES, default="paper_fixed")
    p.add_argument("--k", type=int, default=4, help="counters to keep in auto mode")
    p.add_argument("--hyperparameters", help='JSON object, e.g. {"M5Tree": {"min_leaf": 8}}')
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common, split_opts], help="RMAE of saved models")
    p.add_argument("--model", action="append", required=True, help="model JSON, repeatable")
    p.add_argument("--on", choices=("test", "train"), default="test")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("schedule", parents=[common, split_opts], help="pick a configuration per ROI")
    p.add_argument("--model", required=True)
    p.add_argument("--oracle", help="oracle CSV; reports regret when given")
    p.add_argument("--rois", choices=("test", "all"), default="test")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("characterize", parents=[common], help="measured optimum per ROI and its distribution")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("distribution", parents=[common], help="class/frequency distribution of a decisions CSV")
    p.add_argument("--decisions", required=True)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("tradeoff", parents=[common], help="rank predictors by accuracy per area")
    p.add_argument("--costs", help="cost CSV (default: shipped FPGA table)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--accuracy", help="CSV algorithm,accuracy (default: shipped reference)")
    group.add_argument("--uniform", type=float, help="same accuracy for every costed algorithm")
    p.set_defaults(func=cmd_tradeoff)

    p = sub.add_parser("pipeline", parents=[common], help="run the full experiment from a JSON config")
    p.add_argument("--config", help="pipeline JSON (default: synthetic suite, all algorithms)")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CcaError as exc:
        print(f"ccasched: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print(f"ccasched: error: bad JSON: {exc}", file=sys.stderr)
        return ValidationError.exit_code
    except OSError as exc:
        print(f"ccasched: error: {exc}", file=sys.stderr)
        return DataError.exit_code


if __name__ == "__main__":
    sys.exit(main())
