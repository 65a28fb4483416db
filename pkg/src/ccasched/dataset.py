"""Per-ROI measurements, EDP targets and training tables."""

from __future__ import annotations

import csv
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config_space import Architecture, Configuration, CoreType, OperatingPoint
from .errors import ConfigError, DataError, DomainError, LoadError, ValidationError

HPC_NAMES = (
    "l1d_access",
    "l1d_miss",
    "l1i_access",
    "l1i_miss",
    "l2_access",
    "l2_miss",
    "itlb_miss",
    "dtlb_miss",
    "int_issue",
    "fp_issue",
    "br_inst",
    "br_mispred",
)
N_HPC = len(HPC_NAMES)
CONFIG_FEATURES = ("core", "freq_ghz", "threads")

MEASUREMENT_HEADER = (
    "workload",
    "roi",
    "core_type",
    "freq_ghz",
    "voltage_v",
    "threads",
    "time_s",
    "power_w",
) + HPC_NAMES
ORACLE_HEADER = ("workload", "roi", "core_type", "freq_ghz", "threads", "edp")

# (miss, access) pairs that must satisfy miss <= access
_BOUNDED = (("l1d_miss", "l1d_access"), ("l2_miss", "l2_access"), ("br_mispred", "br_inst"))

RoiKey = tuple[str, int]


@dataclass(frozen=True)
class HpcVector:
    """Twelve hardware counter readings, typically per kilo-instruction."""

    l1d_access: float
    l1d_miss: float
    l1i_access: float
    l1i_miss: float
    l2_access: float
    l2_miss: float
    itlb_miss: float
    dtlb_miss: float
    int_issue: float
    fp_issue: float
    br_inst: float
    br_mispred: float

    def __post_init__(self):
        for name in HPC_NAMES:
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValidationError(f"counter {name} must be finite and >= 0, got {v}")
        for miss, access in _BOUNDED:
            if getattr(self, miss) > getattr(self, access):
                raise ValidationError(f"counter invariant violated: {miss} <= {access}")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in HPC_NAMES], dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "HpcVector":
        if len(values) != N_HPC:
            raise ValidationError(f"expected {N_HPC} counter values, got {len(values)}")
        return cls(*(float(v) for v in values))


@dataclass(frozen=True)
class RoiMeasurement:
    workload: str
    roi: int
    cfg: Configuration
    time_s: float
    power_w: float
    hpcs: HpcVector

    def __post_init__(self):
        if self.roi < 1:
            raise ValidationError(f"roi index must be >= 1, got {self.roi}")
        if not self.time_s > 0 or not math.isfinite(self.time_s):
            raise ValidationError(f"time_s must be > 0, got {self.time_s}")
        if not self.power_w > 0 or not math.isfinite(self.power_w):
            raise ValidationError(f"power_w must be > 0, got {self.power_w}")

    @property
    def key(self) -> RoiKey:
        return (self.workload, self.roi)

    @property
    def edp(self) -> float:
        return edp(self.time_s, self.power_w)


def edp(time_s: float, power_w: float) -> float:
    """Energy-delay product in J*s: energy (P*T) times delay (T)."""
    if not time_s > 0 or not power_w > 0:
        raise DomainError(f"EDP needs positive time and power, got time={time_s}, power={power_w}")
    return power_w * time_s * time_s


class Dataset:
    """Measurements grouped by ROI, in first-seen order."""

    def __init__(self, measurements: Iterable[RoiMeasurement] = ()):
        self._rois: dict[RoiKey, dict[tuple, RoiMeasurement]] = {}
        for m in measurements:
            self.add(m)

    def add(self, m: RoiMeasurement) -> None:
        samples = self._rois.setdefault(m.key, {})
        if m.cfg.key in samples:
            raise DataError(f"duplicate measurement for workload={m.workload} roi={m.roi} cfg={m.cfg}")
        samples[m.cfg.key] = m

    def __len__(self) -> int:
        return sum(len(s) for s in self._rois.values())

    def __iter__(self) -> Iterator[RoiMeasurement]:
        for samples in self._rois.values():
            yield from samples.values()

    def __contains__(self, key: RoiKey) -> bool:
        return key in self._rois

    def rois(self) -> list[RoiKey]:
        return list(self._rois)

    def samples(self, key: RoiKey) -> list[RoiMeasurement]:
        try:
            return list(self._rois[key].values())
        except KeyError:
            raise DataError(f"unknown ROI {key}") from None

    def get(self, key: RoiKey, cfg: Configuration) -> RoiMeasurement | None:
        return self._rois.get(key, {}).get(cfg.key)

    def measured_edp(self, key: RoiKey, cfg: Configuration) -> float:
        m = self.get(key, cfg)
        if m is None:
            raise DataError(f"ROI {key} has no measurement for {cfg}")
        return m.edp

    def aggressive(self, key: RoiKey, arch: Architecture) -> RoiMeasurement:
        cfg = arch.aggressive_config()
        m = self.get(key, cfg)
        if m is None:
            raise DataError(
                f"ROI {key[0]}#{key[1]} lacks the aggressive-configuration sample {cfg}"
            )
        return m

    def subset(self, keys: Iterable[RoiKey]) -> "Dataset":
        return Dataset(m for k in keys for m in self.samples(k))


def _fmt(x: float) -> str:
    return repr(float(x))


def write_measurements(ds: Dataset, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MEASUREMENT_HEADER)
        for m in ds:
            w.writerow(
                [m.workload, m.roi, m.cfg.core.value, _fmt(m.cfg.freq_ghz), _fmt(m.cfg.op.voltage_v),
                 m.cfg.threads, _fmt(m.time_s), _fmt(m.power_w)]
                + [_fmt(v) for v in m.hpcs.as_array()]
            )


def load_measurements(path: str | Path) -> Dataset:
    """Read a measurements CSV. Row numbers in errors count the header as row 1."""
    path = Path(path)
    if not path.exists():
        raise LoadError(f"{path}: no such file")
    ds = Dataset()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise LoadError(f"{path}: empty file")
        header = [h.strip() for h in header]
        missing = [c for c in MEASUREMENT_HEADER if c not in header]
        if missing:
            raise LoadError(f"{path}: missing column(s) {', '.join(missing)}", row=1)
        col = {name: header.index(name) for name in MEASUREMENT_HEADER}
        for rowno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise LoadError(f"expected {len(header)} fields, got {len(row)}", row=rowno)
            try:
                freq = float(row[col["freq_ghz"]])
                cfg = Configuration(
                    CoreType.parse(row[col["core_type"]]),
                    OperatingPoint(freq, float(row[col["voltage_v"]])),
                    int(row[col["threads"]]),
                )
                m = RoiMeasurement(
                    workload=row[col["workload"]].strip(),
                    roi=int(row[col["roi"]]),
                    cfg=cfg,
                    time_s=float(row[col["time_s"]]),
                    power_w=float(row[col["power_w"]]),
                    hpcs=HpcVector.from_array([float(row[col[n]]) for n in HPC_NAMES]),
                )
                ds.add(m)
            except (ValueError, DataError) as exc:
                raise LoadError(str(exc), row=rowno) from exc
    return ds


@dataclass(frozen=True)
class OracleEntry:
    workload: str
    roi: int
    cfg: Configuration
    edp: float

    @property
    def key(self) -> RoiKey:
        return (self.workload, self.roi)


class OracleTable(dict):
    """Mapping RoiKey -> OracleEntry holding the ground-truth choice per ROI."""

    def add(self, entry: OracleEntry) -> None:
        self[entry.key] = entry


def write_oracle(table: OracleTable, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ORACLE_HEADER)
        for e in table.values():
            w.writerow([e.workload, e.roi, e.cfg.core.value, _fmt(e.cfg.freq_ghz), e.cfg.threads, _fmt(e.edp)])


def load_oracle(path: str | Path, arch: Architecture) -> OracleTable:
    table = OracleTable()
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or any(c not in reader.fieldnames for c in ORACLE_HEADER):
            raise LoadError(f"{path}: oracle header must be {','.join(ORACLE_HEADER)}", row=1)
        for rowno, row in enumerate(reader, start=2):
            try:
                cfg = Configuration(
                    CoreType.parse(row["core_type"]), arch.op_for(float(row["freq_ghz"])), int(row["threads"])
                )
                table.add(OracleEntry(row["workload"], int(row["roi"]), cfg, float(row["edp"])))
            except ValueError as exc:
                raise LoadError(str(exc), row=rowno) from exc
    return table


@dataclass
class TrainTable:
    """Model-ready rows: selected counters from the aggressive run + config encoding."""

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    groups: list[RoiKey] = field(default_factory=list)
    configs: list[Configuration] = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise ValidationError(f"table shape mismatch: X{self.X.shape} vs y{self.y.shape}")
        if self.X.shape[1] != len(self.feature_names):
            raise ValidationError("feature_names length must equal row width")
        if not np.all(np.isfinite(self.y)) or np.any(self.y < 0):
            raise ValidationError("targets must be finite and >= 0")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def width(self) -> int:
        return self.X.shape[1]

    def roi_keys(self) -> list[RoiKey]:
        return list(dict.fromkeys(self.groups))

    def subset(self, keys: Iterable[RoiKey]) -> "TrainTable":
        keep = set(keys)
        idx = [i for i, g in enumerate(self.groups) if g in keep]
        return TrainTable(
            self.X[idx], self.y[idx], self.feature_names,
            [self.groups[i] for i in idx], [self.configs[i] for i in idx],
        )


def feature_row(hpcs: np.ndarray | HpcVector, selected: Sequence[int], cfg: Configuration) -> np.ndarray:
    values = hpcs.as_array() if isinstance(hpcs, HpcVector) else np.asarray(hpcs, dtype=float)
    return np.concatenate([values[list(selected)], cfg.encode()])


def build_training_table(ds: Dataset, arch: Architecture, selected: Sequence[int]) -> TrainTable:
    """One row per measured configuration of every ROI.

    Counter features come from the ROI's aggressive-configuration run and
    are replicated across all of that ROI's rows; the row's own
    configuration encoding is appended and its measured EDP is the target.
    """
    selected = list(selected)
    if not selected or len(set(selected)) != len(selected) or not all(0 <= i < N_HPC for i in selected):
        raise ConfigError(f"selected counter indices must be unique and in [0, {N_HPC}), got {selected}")
    rows, targets, groups, configs = [], [], [], []
    for key in ds.rois():
        base = ds.aggressive(key, arch).hpcs.as_array()[selected]
        for m in ds.samples(key):
            rows.append(np.concatenate([base, m.cfg.encode()]))
            targets.append(m.edp)
            groups.append(key)
            configs.append(m.cfg)
    names = tuple(HPC_NAMES[i] for i in selected) + CONFIG_FEATURES
    X = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return TrainTable(X, np.array(targets, dtype=float), names, groups, configs)


def split(table: TrainTable, train_fraction: float, seed: int) -> tuple[TrainTable, TrainTable]:
    """Partition by ROI so that test ROIs are never seen during training."""
    if not 0 < train_fraction < 1:
        raise ValidationError(f"train_fraction must be in (0, 1), got {train_fraction}")
    keys = table.roi_keys()
    if len(keys) < 2:
        raise DataError("need at least 2 ROIs to split")
    n_train = int(math.floor(train_fraction * len(keys) + 0.5))
    n_train = min(max(n_train, 1), len(keys) - 1)
    perm = np.random.default_rng(seed).permutation(len(keys))
    train_keys = {keys[i] for i in perm[:n_train]}
    train = table.subset(k for k in keys if k in train_keys)
    test = table.subset(k for k in keys if k not in train_keys)
    return train, test
