"""Tuning space of a composite-cores processor.

A configuration picks a core type, a paired frequency/voltage operating
point and a thread count. Threads are bound one per core, so a
configuration is feasible only if the chosen core type has at least that
many cores.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from .errors import ConfigError, DomainError, UnknownFrequencyError

COMPOSITION_RATIO = 2


class CoreType(str, Enum):
    BASE = "base"
    COMPOSED = "comp"

    @property
    def code(self) -> int:
        return 0 if self is CoreType.BASE else 1

    @classmethod
    def parse(cls, text: str) -> "CoreType":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ConfigError(f"unknown core type {text!r} (expected 'base' or 'comp')") from None


class ConfigClass(str, Enum):
    FULLY_BASE = "FullyBase"
    PARTIALLY_BASE = "PartiallyBase"
    FULLY_COMPOSED = "FullyComposed"
    PARTIALLY_COMPOSED = "PartiallyComposed"

    @property
    def is_composed(self) -> bool:
        return self in (ConfigClass.FULLY_COMPOSED, ConfigClass.PARTIALLY_COMPOSED)


@dataclass(frozen=True)
class OperatingPoint:
    freq_ghz: float
    voltage_v: float

    def __post_init__(self):
        if not self.freq_ghz > 0 or not self.voltage_v > 0:
            raise ConfigError(f"operating point must be positive, got {self}")


@dataclass(frozen=True)
class Configuration:
    core: CoreType
    op: OperatingPoint
    threads: int

    def __post_init__(self):
        if int(self.threads) != self.threads or self.threads < 1:
            raise ConfigError(f"threads must be an integer >= 1, got {self.threads!r}")

    @property
    def freq_ghz(self) -> float:
        return self.op.freq_ghz

    @property
    def key(self) -> tuple[str, float, int]:
        return (self.core.value, self.op.freq_ghz, self.threads)

    def encode(self) -> tuple[float, float, float]:
        """Numeric encoding appended to model features: (core, GHz, threads)."""
        return (float(self.core.code), float(self.op.freq_ghz), float(self.threads))

    def __str__(self) -> str:
        return f"{self.core.value}/{self.op.freq_ghz:g}GHz/{self.threads}T"


DEFAULT_DVFS = (
    OperatingPoint(1.6, 0.7),
    OperatingPoint(2.0, 0.8),
    OperatingPoint(2.4, 0.9),
    OperatingPoint(2.8, 1.0),
)


@dataclass(frozen=True)
class Architecture:
    n_base: int = 8
    n_composed: int = 4
    dvfs: tuple[OperatingPoint, ...] = field(default=DEFAULT_DVFS)
    variation_threshold: float = 0.20

    def __post_init__(self):
        object.__setattr__(self, "dvfs", tuple(self.dvfs))
        if self.n_base < 1:
            raise ConfigError("invariant violated: n_base >= 1")
        if self.n_base % COMPOSITION_RATIO or self.n_composed * COMPOSITION_RATIO != self.n_base:
            raise ConfigError(
                f"invariant violated: n_composed == n_base / {COMPOSITION_RATIO} "
                f"(got n_base={self.n_base}, n_composed={self.n_composed})"
            )
        if not self.dvfs:
            raise ConfigError("invariant violated: DVFS table must not be empty")
        freqs = [op.freq_ghz for op in self.dvfs]
        volts = [op.voltage_v for op in self.dvfs]
        if any(b <= a for a, b in zip(freqs, freqs[1:])):
            raise ConfigError("invariant violated: dvfs sorted strictly ascending by frequency")
        if any(b <= a for a, b in zip(volts, volts[1:])):
            raise ConfigError("invariant violated: voltage strictly increasing with frequency")
        if not 0 < self.variation_threshold < 1:
            raise ConfigError("invariant violated: 0 < variation_threshold < 1")

    def cores(self, core: CoreType) -> int:
        return self.n_base if core is CoreType.BASE else self.n_composed

    @property
    def max_freq(self) -> OperatingPoint:
        return self.dvfs[-1]

    def aggressive_config(self) -> Configuration:
        """Composed core, top operating point, every composed core busy."""
        return Configuration(CoreType.COMPOSED, self.max_freq, self.n_composed)

    def op_for(self, freq_ghz: float) -> OperatingPoint:
        for op in self.dvfs:
            if abs(op.freq_ghz - freq_ghz) < 1e-9:
                return op
        raise UnknownFrequencyError(f"frequency {freq_ghz} GHz is not in the DVFS table")

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_base": self.n_base,
            "n_composed": self.n_composed,
            "dvfs": [{"freq_ghz": op.freq_ghz, "voltage_v": op.voltage_v} for op in self.dvfs],
            "variation_threshold": self.variation_threshold,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Architecture":
        if not isinstance(doc, dict):
            raise ConfigError("architecture document must be a JSON object")
        unknown = set(doc) - {"n_base", "n_composed", "dvfs", "variation_threshold"}
        if unknown:
            raise ConfigError(f"unknown architecture keys: {sorted(unknown)}")
        try:
            dvfs = tuple(
                OperatingPoint(float(p["freq_ghz"]), float(p["voltage_v"]))
                for p in doc.get("dvfs", [op.__dict__ for op in DEFAULT_DVFS])
            )
            return cls(
                n_base=int(doc.get("n_base", 8)),
                n_composed=int(doc.get("n_composed", 4)),
                dvfs=dvfs,
                variation_threshold=float(doc.get("variation_threshold", 0.20)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed architecture document: {exc}") from exc


def load_architecture(path: str | Path) -> Architecture:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return Architecture.from_dict(doc)


def enumerate_configs(arch: Architecture, max_threads: int | None = None) -> list[Configuration]:
    """All (core, operating point, threads) combinations in scan order.

    Order is core (Base first), then frequency ascending, then threads
    ascending. Argmin scans over this list therefore prefer the cheaper
    configuration on exact ties.
    """
    if max_threads is None:
        max_threads = arch.n_base
    if max_threads < 1:
        raise ConfigError("max_threads must be >= 1")
    if not arch.dvfs:
        raise ConfigError("empty DVFS table")
    return [
        Configuration(core, op, t)
        for core in (CoreType.BASE, CoreType.COMPOSED)
        for op in arch.dvfs
        for t in range(1, max_threads + 1)
    ]


def feasible(cfg: Configuration, arch: Architecture) -> bool:
    return cfg.threads <= arch.cores(cfg.core)


def feasible_configs(arch: Architecture, max_threads: int | None = None) -> list[Configuration]:
    return [c for c in enumerate_configs(arch, max_threads) if feasible(c, arch)]


def classify_config(cfg: Configuration, arch: Architecture) -> ConfigClass:
    if not feasible(cfg, arch):
        raise DomainError(f"configuration {cfg} is infeasible on {arch.n_base}B/{arch.n_composed}C")
    full = cfg.threads == arch.cores(cfg.core)
    if cfg.core is CoreType.BASE:
        return ConfigClass.FULLY_BASE if full else ConfigClass.PARTIALLY_BASE
    return ConfigClass.FULLY_COMPOSED if full else ConfigClass.PARTIALLY_COMPOSED


def dvfs_voltage(freq_ghz: float, arch: Architecture) -> float:
    return arch.op_for(freq_ghz).voltage_v
