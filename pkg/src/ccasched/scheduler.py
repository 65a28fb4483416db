"""Per-ROI configuration selection.

Both the measured-data oracle and the predictive scheduler reduce a ROI to
its best Base and best Composed configuration, then compose cores only if
the relative EDP gain of the composed optimum clears the architecture's
variation threshold.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Protocol

import numpy as np

from .config_space import (
    Architecture,
    ConfigClass,
    Configuration,
    CoreType,
    classify_config,
    enumerate_configs,
    feasible,
)
from .dataset import Dataset, HpcVector, OracleTable, RoiKey
from .errors import DataError, DomainError, LoadError, ValidationError

DECISION_HEADER = ("workload", "roi", "core_type", "freq_ghz", "threads", "predicted_edp", "variation", "rule")


class Rule(str, Enum):
    BASE = "BaseByThreshold"
    COMPOSED = "ComposedByThreshold"


@dataclass(frozen=True)
class SchedulingDecision:
    workload: str
    roi: int
    chosen: Configuration
    predicted_edp: float
    best_base: tuple[Configuration, float]
    best_comp: tuple[Configuration, float]
    variation: float
    rule: Rule

    @property
    def key(self) -> RoiKey:
        return (self.workload, self.roi)

    def to_dict(self) -> dict[str, Any]:
        return {
            "workload": self.workload,
            "roi": self.roi,
            "core_type": self.chosen.core.value,
            "freq_ghz": self.chosen.freq_ghz,
            "threads": self.chosen.threads,
            "predicted_edp": self.predicted_edp,
            "variation": self.variation if math.isfinite(self.variation) else None,
            "rule": self.rule.value,
        }


def variation(best_base_edp: float, best_comp_edp: float) -> float:
    """Relative EDP gain of the best composed over the best base config."""
    if best_base_edp == 0:
        raise DomainError("variation is undefined for a zero best-base EDP")
    return (best_base_edp - best_comp_edp) / best_base_edp


def decide_core(var: float, threshold: float) -> CoreType:
    if not 0 < threshold < 1:
        raise ValidationError(f"threshold must be in (0, 1), got {threshold}")
    return CoreType.COMPOSED if var >= threshold else CoreType.BASE


def _decide(key: RoiKey, scored: Iterable[tuple[Configuration, float]], arch: Architecture) -> SchedulingDecision:
    best: dict[CoreType, tuple[Configuration, float]] = {}
    for cfg, value in scored:
        # strict < keeps the first config in scan order on ties
        if cfg.core not in best or value < best[cfg.core][1]:
            best[cfg.core] = (cfg, value)
    missing = [c.value for c in CoreType if c not in best]
    if missing:
        raise DataError(f"ROI {key[0]}#{key[1]} has no feasible {'/'.join(missing)} configuration")
    base_edp, comp_edp = best[CoreType.BASE][1], best[CoreType.COMPOSED][1]
    if base_edp > 0:
        var = variation(base_edp, comp_edp)
    else:
        # nothing beats a zero base estimate
        var = 0.0 if comp_edp <= 0 else -math.inf
    core = decide_core(var, arch.variation_threshold)
    chosen, value = best[core]
    rule = Rule.COMPOSED if core is CoreType.COMPOSED else Rule.BASE
    return SchedulingDecision(key[0], key[1], chosen, value, best[CoreType.BASE], best[CoreType.COMPOSED], var, rule)


def oracle_best(ds: Dataset, key: RoiKey, arch: Architecture) -> SchedulingDecision:
    """Exhaustive choice over the ROI's measured EDPs."""
    order = {cfg.key: i for i, cfg in enumerate(enumerate_configs(arch, max(arch.n_base, 1)))}
    samples = [m for m in ds.samples(key) if feasible(m.cfg, arch)]
    samples.sort(key=lambda m: order.get(m.cfg.key, len(order)))
    return _decide(key, ((m.cfg, m.edp) for m in samples), arch)


class EdpModel(Protocol):
    def predict_many(self, hpcs: HpcVector, configs: Sequence[Configuration]) -> np.ndarray: ...


def schedule_roi(
    model: EdpModel, aggressive_hpcs: HpcVector, arch: Architecture, key: RoiKey = ("", 1)
) -> SchedulingDecision:
    """Predict every feasible configuration from one profiling run and pick by rule."""
    configs = [c for c in enumerate_configs(arch) if feasible(c, arch)]
    preds = np.asarray(model.predict_many(aggressive_hpcs, configs), dtype=float)
    if preds.shape != (len(configs),):
        raise ValidationError(f"model returned {preds.shape} predictions for {len(configs)} configurations")
    return _decide(key, zip(configs, preds.tolist()), arch)


def schedule_application(
    model: EdpModel, source: Dataset | Mapping[RoiKey, HpcVector], arch: Architecture
) -> list[SchedulingDecision]:
    """One independent decision per ROI, in ROI order."""
    if isinstance(source, Dataset):
        profiles = {key: source.aggressive(key, arch).hpcs for key in source.rois()}
    else:
        profiles = dict(source)
    return [schedule_roi(model, hpcs, arch, key) for key, hpcs in profiles.items()]


@dataclass(frozen=True)
class DistributionReport:
    counts: dict[tuple[ConfigClass, float], int]
    total: int

    @property
    def fractions(self) -> dict[tuple[ConfigClass, float], float]:
        return {cell: n / self.total for cell, n in self.counts.items()}

    @property
    def class_totals(self) -> dict[ConfigClass, int]:
        out = {c: 0 for c in ConfigClass}
        for (cls, _), n in self.counts.items():
            out[cls] += n
        return out

    def class_fraction(self, *classes: ConfigClass) -> float:
        totals = self.class_totals
        return sum(totals[c] for c in classes) / self.total

    @property
    def composed_fraction(self) -> float:
        return self.class_fraction(ConfigClass.FULLY_COMPOSED, ConfigClass.PARTIALLY_COMPOSED)

    def to_dict(self) -> dict[str, Any]:
        return {
            "total": self.total,
            "cells": [
                {"class": cls.value, "freq_ghz": f, "count": n, "fraction": n / self.total}
                for (cls, f), n in self.counts.items()
            ],
            "class_fractions": {c.value: n / self.total for c, n in self.class_totals.items()},
            "composed_fraction": self.composed_fraction,
        }


def distribution(items: Iterable[SchedulingDecision | Configuration], arch: Architecture) -> DistributionReport:
    configs = [it.chosen if isinstance(it, SchedulingDecision) else it for it in items]
    if not configs:
        raise ValidationError("distribution needs at least one configuration")
    tally = Counter((classify_config(c, arch), c.freq_ghz) for c in configs)
    class_order = {c: i for i, c in enumerate(ConfigClass)}
    cells = sorted(tally, key=lambda cell: (class_order[cell[0]], cell[1]))
    return DistributionReport({cell: tally[cell] for cell in cells}, len(configs))


def regret(decisions: Sequence[SchedulingDecision], oracle: OracleTable, ds: Dataset) -> float:
    """Mean relative EDP excess (percent) of chosen configs over the oracle's."""
    if not decisions:
        raise ValidationError("regret needs at least one decision")
    total = 0.0
    for d in decisions:
        if d.key not in oracle:
            raise DataError(f"oracle has no entry for ROI {d.workload}#{d.roi}")
        best = ds.measured_edp(d.key, oracle[d.key].cfg)
        total += (ds.measured_edp(d.key, d.chosen) - best) / best
    return 100.0 * total / len(decisions)


def write_decisions(decisions: Iterable[SchedulingDecision], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DECISION_HEADER)
        for d in decisions:
            w.writerow([
                d.workload, d.roi, d.chosen.core.value, repr(float(d.chosen.freq_ghz)), d.chosen.threads,
                repr(float(d.predicted_edp)), repr(float(d.variation)), d.rule.value,
            ])


def read_decision_configs(path: str | Path, arch: Architecture) -> list[tuple[RoiKey, Configuration]]:
    """Chosen configurations from a decisions or oracle CSV (shared leading columns)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = ("workload", "roi", "core_type", "freq_ghz", "threads")
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in need):
            raise LoadError(f"{path}: expected columns {','.join(need)}", row=1)
        for rowno, row in enumerate(reader, start=2):
            try:
                cfg = Configuration(
                    CoreType.parse(row["core_type"]), arch.op_for(float(row["freq_ghz"])), int(row["threads"])
                )
            except ValueError as exc:
                raise LoadError(str(exc), row=rowno) from exc
            out.append(((row["workload"], int(row["roi"])), cfg))
    return out
