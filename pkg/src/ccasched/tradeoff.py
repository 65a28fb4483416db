"""Accuracy against hardware cost for the predictor implementations."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import DataError, LoadError, ValidationError

COST_HEADER = ("algorithm", "latency_cycles", "power_w", "area_units")
ACCURACY_HEADER = ("algorithm", "accuracy")


@dataclass(frozen=True)
class CostRow:
    algorithm: str
    latency_cycles: int
    power_w: float
    area_units: int

    def __post_init__(self):
        if self.latency_cycles <= 0 or self.power_w <= 0 or self.area_units <= 0:
            raise ValidationError(f"cost row for {self.algorithm} must be positive")


CostTable = dict[str, CostRow]


def _read_csv(path: str | Path | None, default: str, header: tuple[str, ...]) -> list[tuple[int, dict[str, str]]]:
    if path is None:
        text = resources.files("ccasched").joinpath("data", default).read_text()
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(text.splitlines())
    if tuple(reader.fieldnames or ()) != header:
        raise LoadError(f"expected header {','.join(header)}", row=1)
    return [(i, rec) for i, rec in enumerate(reader, start=2)]


def load_costs(path: str | Path | None = None) -> CostTable:
    """Read a cost CSV; the shipped default holds reference FPGA figures."""
    table: CostTable = {}
    for row, rec in _read_csv(path, "fpga_costs.csv", COST_HEADER):
        try:
            entry = CostRow(
                rec["algorithm"], int(rec["latency_cycles"]), float(rec["power_w"]), int(rec["area_units"])
            )
        except ValueError as exc:
            raise LoadError(str(exc), row) from exc
        if entry.algorithm in table:
            raise LoadError(f"duplicate algorithm {entry.algorithm}", row)
        table[entry.algorithm] = entry
    return table


def load_accuracies(path: str | Path | None = None) -> dict[str, float]:
    """Read an accuracy CSV; the default only has a reference M5Tree figure."""
    out: dict[str, float] = {}
    for row, rec in _read_csv(path, "reference_accuracy.csv", ACCURACY_HEADER):
        try:
            out[rec["algorithm"]] = float(rec["accuracy"])
        except ValueError as exc:
            raise LoadError(str(exc), row) from exc
    return out


@dataclass(frozen=True)
class TradeoffEntry:
    algorithm: str
    accuracy: float
    ratio: float
    latency_cycles: int
    power_w: float
    area_units: int


@dataclass(frozen=True)
class TradeoffReport:
    entries: tuple[TradeoffEntry, ...]

    @property
    def ranking(self) -> list[str]:
        return [e.algorithm for e in self.entries]

    def to_dict(self) -> dict[str, Any]:
        return {"ranking": self.ranking, "entries": [vars(e) for e in self.entries]}


def tradeoff(accuracies: dict[str, float], costs: CostTable) -> TradeoffReport:
    """Rank by accuracy per area unit, best first; lower latency breaks ties."""
    if not accuracies:
        raise ValidationError("no accuracies given")
    missing = sorted(set(accuracies) - set(costs))
    if missing:
        raise ValidationError(f"no cost row for {', '.join(missing)}")
    entries = []
    for alg, acc in accuracies.items():
        c = costs[alg]
        entries.append(TradeoffEntry(alg, float(acc), float(acc) / c.area_units, c.latency_cycles, c.power_w, c.area_units))
    entries.sort(key=lambda e: (-e.ratio, e.latency_cycles))
    return TradeoffReport(tuple(entries))


def write_tradeoff(report: TradeoffReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("rank", "algorithm", "accuracy", "ratio", "latency_cycles", "power_w", "area_units"))
        for i, e in enumerate(report.entries, start=1):
            w.writerow((i, e.algorithm, repr(e.accuracy), repr(e.ratio), e.latency_cycles, repr(e.power_w), e.area_units))
