"""End-to-end experiment: data, feature selection, split, train, evaluate, schedule.

A run is described by a JSON document. Everything is written to a scratch
directory first and moved into place only when every stage succeeded, so a
failed run leaves no partial artifacts behind.
"""

from __future__ import annotations

import json
import shutil
import tempfile
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .config_space import Architecture, load_architecture
from .dataset import (
    N_HPC,
    Dataset,
    OracleEntry,
    OracleTable,
    build_training_table,
    load_measurements,
    load_oracle,
    split,
    write_measurements,
    write_oracle,
)
from .errors import CcaError, ConfigError, DataError, NumericalError
from .features import FEATURE_MODES, feature_report
from .models import ALGORITHMS, check_algorithm, make_params, rmae, train
from .scheduler import distribution, oracle_best, regret, schedule_application, write_decisions
from .synthetic import SyntheticSpec, generate_synthetic
from .tradeoff import load_costs, tradeoff

SUMMARY_NAME = "summary.json"


@dataclass(frozen=True)
class PipelineConfig:
    arch: Architecture = field(default_factory=Architecture)
    synthetic: SyntheticSpec | None = field(default_factory=SyntheticSpec)
    measurements: str | None = None
    oracle: str | None = None
    algorithms: tuple[str, ...] = ALGORITHMS
    seed: int = 42
    train_fraction: float = 0.7
    feature_mode: str = "paper_fixed"
    n_features: int = 4
    hyperparameters: dict[str, dict[str, Any]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("no algorithms requested")
        for alg in self.algorithms:
            check_algorithm(alg)
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ConfigError("algorithms must not repeat")
        for alg, hp in self.hyperparameters.items():
            check_algorithm(alg)
            make_params(alg, hp, self.seed)
        if self.feature_mode not in FEATURE_MODES:
            raise ConfigError(f"feature_mode must be one of {FEATURE_MODES}, got {self.feature_mode!r}")
        if not 1 <= self.n_features <= N_HPC:
            raise ConfigError(f"n_features must be in [1, {N_HPC}]")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if (self.synthetic is None) == (self.measurements is None):
            raise ConfigError("give exactly one of 'synthetic' or 'measurements'")
        if self.oracle is not None and self.measurements is None:
            raise ConfigError("'oracle' only applies to loaded measurements")


_KEYS = {"arch", "data", "algorithms", "seed", "train_fraction", "feature_mode", "n_features", "hyperparameters"}


def parse_config(doc: dict[str, Any], base_dir: Path | None = None, seed: int | None = None) -> PipelineConfig:
    """Build a config from its JSON form; relative paths resolve against ``base_dir``."""
    if not isinstance(doc, dict):
        raise ConfigError("pipeline config must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise ConfigError(f"unknown pipeline config key(s): {sorted(unknown)}")
    base_dir = base_dir or Path(".")

    def resolve(p: str) -> str:
        return str(base_dir / p)

    arch_doc = doc.get("arch")
    if arch_doc is None:
        arch = Architecture()
    elif isinstance(arch_doc, str):
        arch = load_architecture(resolve(arch_doc))
    else:
        arch = Architecture.from_dict(arch_doc)

    run_seed = int(doc.get("seed", 42)) if seed is None else seed
    data = doc.get("data", {"synthetic": {}})
    if not isinstance(data, dict):
        raise ConfigError("'data' must be an object")
    synthetic = measurements = oracle = None
    if "synthetic" in data:
        allowed = {f.name for f in fields(SyntheticSpec)}
        spec_doc = dict(data["synthetic"])
        bad = set(spec_doc) - allowed
        if bad:
            raise ConfigError(f"unknown synthetic field(s): {sorted(bad)}")
        spec_doc.setdefault("seed", run_seed)
        for name in ("parallel_fraction", "memory_intensity", "composed_ipc_uplift"):
            if name in spec_doc:
                spec_doc[name] = tuple(spec_doc[name])
        synthetic = SyntheticSpec(**spec_doc)
    if "measurements" in data:
        measurements = resolve(data["measurements"])
        if data.get("oracle") is not None:
            oracle = resolve(data["oracle"])

    try:
        return PipelineConfig(
            arch=arch,
            synthetic=synthetic,
            measurements=measurements,
            oracle=oracle,
            algorithms=tuple(doc.get("algorithms", ALGORITHMS)),
            seed=run_seed,
            train_fraction=float(doc.get("train_fraction", 0.7)),
            feature_mode=doc.get("feature_mode", "paper_fixed"),
            n_features=int(doc.get("n_features", 4)),
            hyperparameters=dict(doc.get("hyperparameters", {})),
        )
    except TypeError as exc:
        raise ConfigError(f"bad pipeline config: {exc}") from exc


def load_config(path: str | Path, seed: int | None = None) -> PipelineConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise DataError(f"cannot read pipeline config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"pipeline config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc, path.parent, seed)


class StageError(CcaError):
    """A pipeline stage failed; carries the stage name and the original exit code."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", NumericalError.exit_code)


@contextmanager
def stage(name: str) -> Iterator[None]:
    try:
        yield
    except StageError:
        raise
    except CcaError as exc:
        raise StageError(name, exc) from exc
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        raise StageError(name, NumericalError(str(exc))) from exc
    except OSError as exc:
        raise StageError(name, DataError(str(exc))) from exc


def oracle_from_dataset(ds: Dataset, arch: Architecture) -> OracleTable:
    """Ground truth from measured EDPs, for loaded data shipped without an oracle."""
    table = OracleTable()
    for key in ds.rois():
        d = oracle_best(ds, key, arch)
        table.add(OracleEntry(d.workload, d.roi, d.chosen, d.predicted_edp))
    return table


def _write_json(path: Path, doc: Any) -> None:
    path.write_text(json.dumps(doc, indent=1) + "\n")


def run_pipeline(config: PipelineConfig, out_dir: str | Path) -> dict[str, Any]:
    """Run every stage and return the summary that was written to ``summary.json``."""
    out_dir = Path(out_dir)
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=".ccasched-", dir=out_dir.parent))
    try:
        summary = _run(config, scratch)
        out_dir.mkdir(exist_ok=True)
        for item in sorted(scratch.iterdir()):
            target = out_dir / item.name
            if target.is_dir():
                shutil.rmtree(target)
            elif target.exists():
                target.unlink()
            shutil.move(str(item), str(target))
        return summary
    finally:
        shutil.rmtree(scratch, ignore_errors=True)


def _run(cfg: PipelineConfig, work: Path) -> dict[str, Any]:
    arch = cfg.arch
    with stage("data"):
        if cfg.synthetic is not None:
            ds, oracle = generate_synthetic(cfg.synthetic, arch)
            write_measurements(ds, work / "measurements.csv")
            write_oracle(oracle, work / "oracle.csv")
            source: dict[str, Any] = {"source": "synthetic", **_spec_dict(cfg.synthetic)}
        else:
            ds = load_measurements(cfg.measurements)
            oracle = load_oracle(cfg.oracle, arch) if cfg.oracle else oracle_from_dataset(ds, arch)
            source = {"source": "measurements", "n_rows": len(ds)}
        if len(ds.rois()) < 2:
            raise DataError("need at least two ROIs to split into train and test")

    with stage("split"):
        full = build_training_table(ds, arch, list(range(N_HPC)))
        full_train, full_test = split(full, cfg.train_fraction, cfg.seed)
        train_keys, test_keys = full_train.roi_keys(), full_test.roi_keys()

    with stage("features"):
        report = feature_report(full_train, cfg.n_features, cfg.feature_mode)
        table = build_training_table(ds, arch, report.selected)
        tr, te = table.subset(train_keys), table.subset(test_keys)

    test_ds = ds.subset(test_keys)
    (work / "models").mkdir()
    results: dict[str, Any] = {}
    for alg in cfg.algorithms:
        with stage(f"train:{alg}"):
            predictor = train(alg, tr, cfg.hyperparameters.get(alg), cfg.seed)
            predictor.save(work / "models" / f"{alg}.json")
        with stage(f"evaluate:{alg}"):
            err = rmae(predictor.predict_rows(te.X), te.y)
            train_err = rmae(predictor.predict_rows(tr.X), tr.y)
        with stage(f"schedule:{alg}"):
            decisions = schedule_application(predictor, test_ds, arch)
            write_decisions(decisions, work / f"decisions_{alg}.csv")
            results[alg] = {
                "hyperparameters": predictor.hyperparams,
                "train_rmae": train_err,
                "rmae": err,
                "accuracy": 100.0 - err,
                "regret": regret(decisions, oracle, ds),
                "distribution": distribution(decisions, arch).to_dict(),
                "decisions": [d.to_dict() for d in decisions],
            }

    with stage("report"):
        costs = load_costs()
        accuracies = {a: r["accuracy"] for a, r in results.items() if a in costs}
        summary = {
            "arch": arch.to_dict(),
            "seed": cfg.seed,
            "train_fraction": cfg.train_fraction,
            "data": source,
            "n_rois": len(ds.rois()),
            "train_rois": len(train_keys),
            "test_rois": len(test_keys),
            "features": report.to_dict(),
            "oracle_distribution": distribution([oracle[k].cfg for k in test_keys], arch).to_dict(),
            "algorithms": results,
            "tradeoff": tradeoff(accuracies, costs).to_dict() if accuracies else None,
        }
        _write_json(work / SUMMARY_NAME, summary)
    return summary


def _spec_dict(spec: SyntheticSpec) -> dict[str, Any]:
    doc = {f.name: getattr(spec, f.name) for f in fields(spec)}
    return {k: list(v) if isinstance(v, tuple) else v for k, v in doc.items()}


def default_config_doc() -> dict[str, Any]:
    return {
        "data": {"synthetic": {}},
        "algorithms": list(ALGORITHMS),
        "seed": 42,
        "train_fraction": 0.7,
        "feature_mode": "paper_fixed",
        "n_features": 4,
    }


__all__ = [
    "PipelineConfig",
    "StageError",
    "default_config_doc",
    "load_config",
    "oracle_from_dataset",
    "parse_config",
    "run_pipeline",
]
