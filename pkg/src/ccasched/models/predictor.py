"""Trained EDP predictors: one contract over the five learners, plus JSON I/O."""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..config_space import Configuration
from ..dataset import HPC_NAMES, N_HPC, HpcVector, TrainTable
from ..errors import LoadError, ValidationError
from ..features import Scaler
from .linear import LinearModel, LmsParams, fit_linear, fit_lms
from .m5 import M5ModelTree, M5Params, fit_m5
from .mlp import MlpParams, MultilayerPerceptron, fit_mlp
from .reptree import REPTree, RepParams, fit_reptree

FORMAT_VERSION = 1

ALGORITHMS = ("LinearReg", "LeastSqMed", "MultiLayerPercep", "M5Tree", "REPTree")

_MODEL_TYPES = {
    "LinearReg": LinearModel,
    "LeastSqMed": LinearModel,
    "MultiLayerPercep": MultilayerPerceptron,
    "M5Tree": M5ModelTree,
    "REPTree": REPTree,
}
_PARAM_TYPES = {
    "LinearReg": None,
    "LeastSqMed": LmsParams,
    "MultiLayerPercep": MlpParams,
    "M5Tree": M5Params,
    "REPTree": RepParams,
}


def check_algorithm(name: str) -> str:
    if name not in ALGORITHMS:
        raise ValidationError(f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}")
    return name


def make_params(algorithm: str, overrides: dict[str, Any] | None = None, seed: int | None = None):
    """Hyperparameter bundle with defaults; a pipeline seed fills in an unset seed."""
    cls = _PARAM_TYPES[check_algorithm(algorithm)]
    overrides = dict(overrides or {})
    if cls is None:
        if overrides:
            raise ValidationError(f"{algorithm} takes no hyperparameters, got {sorted(overrides)}")
        return None
    fields = cls.__dataclass_fields__
    unknown = set(overrides) - set(fields)
    if unknown:
        raise ValidationError(f"unknown {algorithm} hyperparameter(s): {sorted(unknown)}")
    if "seed" in fields and "seed" not in overrides and seed is not None:
        overrides["seed"] = seed
    try:
        return cls(**overrides)
    except TypeError as exc:
        raise ValidationError(f"bad {algorithm} hyperparameters: {exc}") from exc


@dataclass
class Predictor:
    algorithm: str
    model: Any
    feature_names: tuple[str, ...]
    selected: tuple[int, ...] = ()
    scaler: Scaler | None = None
    hyperparams: dict[str, Any] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return len(self.feature_names)

    def predict_rows(self, X: np.ndarray) -> np.ndarray:
        """Predicted EDP for full feature rows, clamped at zero."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.width:
            raise ValidationError(f"predictor expects {self.width} features per row, got {X.shape[1]}")
        if self.scaler is not None:
            X = self.scaler.apply(X)
        return np.maximum(self.model.predict(X), 0.0)

    def _counter_values(self, hpcs: HpcVector | Sequence[float]) -> np.ndarray:
        values = hpcs.as_array() if isinstance(hpcs, HpcVector) else np.asarray(hpcs, dtype=float)
        if values.shape == (N_HPC,) and len(self.selected) != N_HPC:
            return values[list(self.selected)]
        if values.shape == (len(self.selected),):
            return values
        raise ValidationError(
            f"expected {N_HPC} counters or the {len(self.selected)} selected ones, got {values.shape}"
        )

    def predict_many(self, hpcs: HpcVector | Sequence[float], configs: Sequence[Configuration]) -> np.ndarray:
        feats = self._counter_values(hpcs)
        X = np.array([np.concatenate([feats, c.encode()]) for c in configs], dtype=float)
        return self.predict_rows(X.reshape(len(configs), -1))

    def predict(self, hpcs: HpcVector | Sequence[float], cfg: Configuration) -> float:
        return float(self.predict_many(hpcs, [cfg])[0])

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": "ccasched-model",
            "version": FORMAT_VERSION,
            "algorithm": self.algorithm,
            "hyperparameters": self.hyperparams,
            "feature_names": list(self.feature_names),
            "selected": list(self.selected),
            "scaler": None if self.scaler is None else self.scaler.to_dict(),
            "parameters": self.model.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Predictor":
        if doc.get("format") != "ccasched-model":
            raise LoadError("not a ccasched model document")
        if doc.get("version") != FORMAT_VERSION:
            raise LoadError(f"unsupported model format version {doc.get('version')}")
        algorithm = check_algorithm(doc["algorithm"])
        return cls(
            algorithm=algorithm,
            model=_MODEL_TYPES[algorithm].from_dict(doc["parameters"]),
            feature_names=tuple(doc["feature_names"]),
            selected=tuple(int(i) for i in doc["selected"]),
            scaler=None if doc["scaler"] is None else Scaler.from_dict(doc["scaler"]),
            hyperparams=dict(doc.get("hyperparameters") or {}),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Predictor":
        try:
            return cls.from_dict(json.loads(text))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise LoadError(f"malformed model document: {exc}") from exc

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Predictor":
        return cls.from_json(Path(path).read_text())


def _selected_from(table: TrainTable) -> tuple[int, ...]:
    return tuple(HPC_NAMES.index(n) for n in table.feature_names if n in HPC_NAMES)


def _wrap(algorithm: str, model, table: TrainTable, params, scaler: Scaler | None = None) -> Predictor:
    return Predictor(
        algorithm, model, tuple(table.feature_names), _selected_from(table), scaler,
        {} if params is None else asdict(params),
    )


def train_linear(table: TrainTable) -> Predictor:
    return _wrap("LinearReg", fit_linear(table.X, table.y), table, None)


def train_lms(table: TrainTable, params: LmsParams = LmsParams()) -> Predictor:
    return _wrap("LeastSqMed", fit_lms(table.X, table.y, params), table, params)


def train_mlp(table: TrainTable, params: MlpParams = MlpParams()) -> Predictor:
    scaler = Scaler.fit(table.X)
    return _wrap("MultiLayerPercep", fit_mlp(scaler.apply(table.X), table.y, params), table, params, scaler)


def train_m5(table: TrainTable, params: M5Params = M5Params()) -> Predictor:
    return _wrap("M5Tree", fit_m5(table.X, table.y, params), table, params)


def train_reptree(table: TrainTable, params: RepParams = RepParams()) -> Predictor:
    return _wrap("REPTree", fit_reptree(table.X, table.y, params), table, params)


_TRAINERS = {
    "LinearReg": lambda t, p: train_linear(t),
    "LeastSqMed": train_lms,
    "MultiLayerPercep": train_mlp,
    "M5Tree": train_m5,
    "REPTree": train_reptree,
}


def train(
    algorithm: str, table: TrainTable, hyperparams: dict[str, Any] | None = None, seed: int | None = None
) -> Predictor:
    params = make_params(algorithm, hyperparams, seed)
    return _TRAINERS[algorithm](table, params)
