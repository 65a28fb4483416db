"""Closed-form workload generator standing in for a cycle-accurate simulator.

Each ROI gets latent traits (parallel fraction, memory intensity, ILP that
sets the composed-core IPC uplift, branchiness, FP mix). Time and power for
any configuration follow from those traits in closed form; counters are
derived from the same traits plus multiplicative Gaussian noise. Time and
power are noiseless, so the ground-truth optimum per ROI is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config_space import Architecture, Configuration, CoreType, enumerate_configs, feasible
from .dataset import Dataset, HPC_NAMES, HpcVector, OracleEntry, OracleTable, RoiMeasurement, edp
from .errors import ValidationError

WORK_INSTRUCTIONS = 1e9
MEMORY_CLOCK_GHZ = 1.6
# per-core switching capacitance (W / (GHz V^2)) and leakage (W)
C_DYN = {CoreType.BASE: 0.5, CoreType.COMPOSED: 1.25}
P_STATIC = {CoreType.BASE: 0.45, CoreType.COMPOSED: 1.0}
# larger caches on the composed core
MISS_SCALE = {CoreType.BASE: 1.0, CoreType.COMPOSED: 0.8}
BRANCH_BIAS_WEIGHT = 0.1


@dataclass(frozen=True)
class SyntheticSpec:
    n_workloads: int = 20
    rois_per_workload: int = 5
    parallel_fraction: tuple[float, float] = (0.6, 1.0)
    memory_intensity: tuple[float, float] = (0.0, 0.6)
    composed_ipc_uplift: tuple[float, float] = (0.2, 1.0)
    noise_sd: float = 0.05
    seed: int = 42

    def __post_init__(self):
        if self.n_workloads < 1 or self.rois_per_workload < 1:
            raise ValidationError("n_workloads and rois_per_workload must be >= 1")
        for name in ("parallel_fraction", "memory_intensity", "composed_ipc_uplift"):
            lo, hi = getattr(self, name)
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValidationError(f"{name} must satisfy 0 <= lo <= hi <= 1, got {(lo, hi)}")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if not 0.0 <= self.noise_sd <= 1.0:
            raise ValidationError(f"noise_sd must be in [0, 1], got {self.noise_sd}")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")

    @property
    def n_rois(self) -> int:
        return self.n_workloads * self.rois_per_workload


@dataclass(frozen=True)
class RoiTraits:
    parallel_fraction: float
    memory_intensity: float
    ilp: float
    uplift: float
    branchiness: float = 0.5
    fp_mix: float = 0.3


def ipc(core: CoreType, traits: RoiTraits) -> float:
    m = traits.memory_intensity
    if core is CoreType.BASE:
        return 1.0 / (1.0 + 0.5 * m)
    return (1.0 + traits.uplift) / (1.0 + 0.25 * m)


def effective_freq(freq_ghz: float, memory_intensity: float) -> float:
    """Memory-bound share of the work runs at a fixed memory clock."""
    m = memory_intensity
    return 1.0 / ((1.0 - m) / freq_ghz + m / MEMORY_CLOCK_GHZ)


def amdahl_speedup(threads: int, parallel_fraction: float) -> float:
    p = parallel_fraction
    return 1.0 / ((1.0 - p) + p / threads)


def active_cores(cfg: Configuration, arch: Architecture) -> int:
    # oversubscribed threads time-share the available cores
    return min(cfg.threads, arch.cores(cfg.core))


def roi_time(traits: RoiTraits, cfg: Configuration, arch: Architecture) -> float:
    rate = (
        ipc(cfg.core, traits)
        * effective_freq(cfg.freq_ghz, traits.memory_intensity)
        * 1e9
        * amdahl_speedup(active_cores(cfg, arch), traits.parallel_fraction)
    )
    return WORK_INSTRUCTIONS / rate


def roi_power(traits: RoiTraits, cfg: Configuration, arch: Architecture) -> float:
    activity = 1.0 - 0.4 * traits.memory_intensity
    v = cfg.op.voltage_v
    per_core = C_DYN[cfg.core] * v * v * cfg.freq_ghz * activity + P_STATIC[cfg.core]
    return active_cores(cfg, arch) * per_core


def roi_hpcs(traits: RoiTraits, cfg: Configuration, rng: np.random.Generator | None, noise_sd: float) -> HpcVector:
    """Counters per kilo-instruction."""
    m, b, ilp = traits.memory_intensity, traits.branchiness, traits.ilp
    miss = MISS_SCALE[cfg.core]
    contention = 1.0 + 0.02 * (cfg.threads - 1)

    l1d_access = 420.0 - 180.0 * ilp
    l1d_miss = l1d_access * (0.01 + 0.12 * m) * miss
    l1i_access = 150.0 + 100.0 * b
    l1i_miss = l1i_access * 0.01 * (1.0 + b)
    l2_miss = 25.0 * m * miss * contention
    l2_access = l1d_miss + l1i_miss + l2_miss
    br_inst = 120.0 + 60.0 * b
    values = {
        "l1d_access": l1d_access,
        "l1d_miss": l1d_miss,
        "l1i_access": l1i_access,
        "l1i_miss": l1i_miss,
        "l2_access": l2_access,
        "l2_miss": l2_miss,
        "itlb_miss": 0.05 + 0.2 * b,
        "dtlb_miss": 0.2 + 3.0 * m,
        "int_issue": 100.0 + 600.0 * (1.0 - traits.fp_mix),
        "fp_issue": 400.0 * traits.fp_mix,
        "br_inst": br_inst,
        "br_mispred": 0.1 * br_inst * b,
    }
    arr = np.array([values[n] for n in HPC_NAMES])
    if rng is not None and noise_sd > 0:
        arr = arr * (1.0 + rng.normal(0.0, noise_sd, size=arr.shape))
    arr = np.maximum(arr, 0.0)
    idx = {n: i for i, n in enumerate(HPC_NAMES)}
    for miss_name, access_name in (("l1d_miss", "l1d_access"), ("l2_miss", "l2_access"), ("br_mispred", "br_inst")):
        arr[idx[miss_name]] = min(arr[idx[miss_name]], arr[idx[access_name]])
    return HpcVector.from_array(arr)


def draw_traits(spec: SyntheticSpec, rng: np.random.Generator, branch_bias: float, fp_mix: float) -> RoiTraits:
    p = rng.uniform(*spec.parallel_fraction)
    m = rng.uniform(*spec.memory_intensity)
    ilp = rng.uniform()
    lo, hi = spec.composed_ipc_uplift
    # spin-waiting in serial sections adds hard-to-predict branches
    branchiness = min(1.0, BRANCH_BIAS_WEIGHT * branch_bias + (1.0 - p))
    return RoiTraits(p, m, ilp, lo + (hi - lo) * ilp, branchiness, fp_mix)


def oracle_entry(workload: str, roi: int, traits: RoiTraits, arch: Architecture) -> OracleEntry:
    """Exhaustive noiseless evaluation, then the variation-threshold rule."""
    from .scheduler import decide_core, variation

    best: dict[CoreType, tuple[float, Configuration]] = {}
    for cfg in enumerate_configs(arch):
        if not feasible(cfg, arch):
            continue
        e = edp(roi_time(traits, cfg, arch), roi_power(traits, cfg, arch))
        if cfg.core not in best or e < best[cfg.core][0]:
            best[cfg.core] = (e, cfg)
    var = variation(best[CoreType.BASE][0], best[CoreType.COMPOSED][0])
    e, cfg = best[decide_core(var, arch.variation_threshold)]
    return OracleEntry(workload, roi, cfg, e)


def synthesize_roi(
    workload: str,
    roi: int,
    traits: RoiTraits,
    arch: Architecture,
    rng: np.random.Generator | None = None,
    noise_sd: float = 0.0,
) -> list[RoiMeasurement]:
    return [
        RoiMeasurement(
            workload, roi, cfg,
            roi_time(traits, cfg, arch), roi_power(traits, cfg, arch),
            roi_hpcs(traits, cfg, rng, noise_sd),
        )
        for cfg in enumerate_configs(arch)
    ]


def generate_synthetic(spec: SyntheticSpec, arch: Architecture) -> tuple[Dataset, OracleTable]:
    rng = np.random.default_rng(spec.seed)
    ds = Dataset()
    oracle = OracleTable()
    for w in range(spec.n_workloads):
        workload = f"w{w:02d}"
        branch_bias = rng.uniform()
        fp_mix = rng.uniform(0.0, 0.6)
        for roi in range(1, spec.rois_per_workload + 1):
            traits = draw_traits(spec, rng, branch_bias, fp_mix)
            for m in synthesize_roi(workload, roi, traits, arch, rng, spec.noise_sd):
                ds.add(m)
            oracle.add(oracle_entry(workload, roi, traits, arch))
    return ds, oracle
