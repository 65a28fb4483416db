import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from oracles import LookupPredictor, exhaustive_choice

from ccasched.config_space import ConfigClass, Configuration, CoreType, enumerate_configs, feasible
from ccasched.dataset import Dataset, HpcVector, OracleEntry, OracleTable, RoiMeasurement
from ccasched.errors import DataError, DomainError, ValidationError
from ccasched.scheduler import (
    Rule,
    SchedulingDecision,
    decide_core,
    distribution,
    oracle_best,
    read_decision_configs,
    regret,
    schedule_application,
    schedule_roi,
    variation,
    write_decisions,
)
from ccasched.synthetic import RoiTraits, synthesize_roi

HPCS = HpcVector.from_array([10, 1, 10, 1, 10, 1, 1, 1, 1, 1, 10, 1])


class ConstantModel:
    def predict_many(self, hpcs, configs):
        return np.full(len(configs), 3.0)


class TransformedModel:
    def __init__(self, inner, fn):
        self.inner, self.fn = inner, fn

    def predict_many(self, hpcs, configs):
        return self.fn(self.inner.predict_many(hpcs, configs))


def test_variation_examples():
    assert variation(100, 100) == 0.0
    assert variation(100, 72) == pytest.approx(0.28)
    assert variation(100, 180) == pytest.approx(-0.8)
    with pytest.raises(DomainError):
        variation(0, 1)


def test_decide_core_examples():
    assert decide_core(0.28, 0.2) is CoreType.COMPOSED
    assert decide_core(0.022, 0.2) is CoreType.BASE
    assert decide_core(-4.448, 0.2) is CoreType.BASE
    assert decide_core(0.2, 0.2) is CoreType.COMPOSED
    with pytest.raises(ValidationError):
        decide_core(0.5, 1.0)


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0.01, 0.99))
def test_decide_core_monotone(v1, v2, t):
    lo, hi = sorted((v1, v2))
    if decide_core(lo, t) is CoreType.COMPOSED:
        assert decide_core(hi, t) is CoreType.COMPOSED


def two_point_roi(arch, base_edp, comp_edp):
    ds = Dataset()
    op = arch.dvfs[0]
    ds.add(RoiMeasurement("w", 1, Configuration(CoreType.BASE, op, 1), 1.0, base_edp, HPCS))
    ds.add(RoiMeasurement("w", 1, Configuration(CoreType.COMPOSED, op, 1), 1.0, comp_edp, HPCS))
    return ds


def test_oracle_best_two_points(arch):
    d = oracle_best(two_point_roi(arch, 5.0, 3.0), ("w", 1), arch)
    assert d.variation == pytest.approx(0.4)
    assert d.chosen.core is CoreType.COMPOSED and d.rule is Rule.COMPOSED
    d = oracle_best(two_point_roi(arch, 5.0, 9.0), ("w", 1), arch)
    assert d.rule is Rule.BASE and d.variation < 0


def test_oracle_best_needs_both_sides(arch):
    ds = Dataset([RoiMeasurement("w", 1, Configuration(CoreType.BASE, arch.dvfs[0], 1), 1.0, 1.0, HPCS)])
    with pytest.raises(DataError):
        oracle_best(ds, ("w", 1), arch)


def test_oracle_best_equals_independent_scan(arch, small_suite):
    ds, _ = small_suite
    for key in ds.rois():
        assert oracle_best(ds, key, arch).chosen == exhaustive_choice(ds, key, arch)


def test_lookup_schedule_equals_oracle(arch, noiseless_suite):
    ds, oracle = noiseless_suite
    model = LookupPredictor(ds, arch)
    decisions = schedule_application(model, ds, arch)
    assert [d.key for d in decisions] == ds.rois()
    for d in decisions:
        assert d.chosen == oracle_best(ds, d.key, arch).chosen == oracle[d.key].cfg
    assert regret(decisions, oracle, ds) == 0.0


def test_constant_predictor_tie_break(arch):
    d = schedule_roi(ConstantModel(), HPCS, arch)
    first = enumerate_configs(arch)
    assert d.best_base[0] == first[0]
    assert d.best_comp[0] == next(c for c in first if c.core is CoreType.COMPOSED)
    assert d.variation == 0.0 and d.chosen == first[0]


@pytest.mark.parametrize("fn", [np.log, np.sqrt, lambda v: 3 * v + 7, np.exp])
def test_argmin_invariance_under_monotone_transform(arch, small_suite, fn):
    ds, _ = small_suite
    model = LookupPredictor(ds, arch)
    for key in ds.rois()[:4]:
        hpcs = ds.aggressive(key, arch).hpcs
        a = schedule_roi(model, hpcs, arch, key)
        b = schedule_roi(TransformedModel(model, fn), hpcs, arch, key)
        assert a.best_base[0] == b.best_base[0] and a.best_comp[0] == b.best_comp[0]


def test_decision_invariants(arch, small_suite):
    ds, _ = small_suite
    rng = np.random.default_rng(0)

    class Noisy:
        def predict_many(self, hpcs, configs):
            return rng.uniform(0.1, 2.0, len(configs))

    for key in ds.rois():
        d = schedule_roi(Noisy(), ds.aggressive(key, arch).hpcs, arch, key)
        assert feasible(d.chosen, arch)
        assert d.chosen in (d.best_base[0], d.best_comp[0])
        assert (d.rule is Rule.COMPOSED) == (d.variation >= arch.variation_threshold)


def test_schedule_rejects_wrong_prediction_count(arch):
    class Bad:
        def predict_many(self, hpcs, configs):
            return np.ones(3)

    with pytest.raises(ValidationError):
        schedule_roi(Bad(), HPCS, arch)


def test_zero_base_prediction_keeps_base(arch):
    class ZeroBase:
        def predict_many(self, hpcs, configs):
            return np.array([0.0 if c.core is CoreType.BASE else 1.0 for c in configs])

    d = schedule_roi(ZeroBase(), HPCS, arch)
    assert d.chosen.core is CoreType.BASE and d.variation == -math.inf


def test_application_decisions_are_independent(arch):
    ds = Dataset()
    serial = synthesize_roi("app", 1, RoiTraits(0.0, 0.1, 0.5, 0.6), arch)
    parallel = synthesize_roi("app", 2, RoiTraits(1.0, 0.0, 0.5, 0.6), arch)
    twin = synthesize_roi("app", 3, RoiTraits(1.0, 0.0, 0.5, 0.6), arch)
    for m in serial + parallel + twin:
        ds.add(m)
    decisions = schedule_application(LookupPredictor(ds, arch), ds, arch)
    assert len(decisions) == 3
    assert decisions[0].chosen.threads == 1
    assert decisions[1].chosen.threads == arch.cores(decisions[1].chosen.core)
    assert decisions[1].chosen == decisions[2].chosen


def labels(arch, counts):
    f = arch.dvfs[2]
    pick = {
        ConfigClass.FULLY_BASE: Configuration(CoreType.BASE, f, arch.n_base),
        ConfigClass.PARTIALLY_BASE: Configuration(CoreType.BASE, f, 1),
        ConfigClass.FULLY_COMPOSED: Configuration(CoreType.COMPOSED, f, arch.n_composed),
        ConfigClass.PARTIALLY_COMPOSED: Configuration(CoreType.COMPOSED, f, 1),
    }
    return [pick[c] for c, n in counts.items() for _ in range(n)]


def test_distribution_fractions(arch, small_arch):
    rep = distribution(labels(arch, {ConfigClass.FULLY_BASE: 10, ConfigClass.FULLY_COMPOSED: 6}), arch)
    assert rep.class_fraction(ConfigClass.FULLY_BASE) == 0.625
    assert rep.composed_fraction == 0.375
    rep = distribution(labels(small_arch, {ConfigClass.FULLY_BASE: 14, ConfigClass.FULLY_COMPOSED: 2}), small_arch)
    assert rep.composed_fraction == 0.125
    single = distribution(labels(arch, {ConfigClass.PARTIALLY_BASE: 5}), arch)
    assert list(single.fractions.values()) == [1.0]


def test_distribution_errors(arch):
    with pytest.raises(ValidationError):
        distribution([], arch)
    with pytest.raises(DomainError):
        distribution([Configuration(CoreType.COMPOSED, arch.dvfs[0], 8)], arch)


@given(st.permutations(list(range(12))))
def test_distribution_permutation_invariant(order):
    from ccasched.config_space import Architecture

    arch = Architecture()
    items = [c for c in enumerate_configs(arch) if feasible(c, arch)][::4]
    items = [items[i] for i in order]
    rep = distribution(items, arch)
    assert sum(rep.fractions.values()) == pytest.approx(1.0, abs=1e-9)
    assert rep.counts == distribution(sorted(items, key=lambda c: c.key), arch).counts


def test_regret_examples(arch):
    ds = Dataset()
    op = arch.dvfs[0]
    a = Configuration(CoreType.BASE, op, 1)
    b = Configuration(CoreType.BASE, op, 2)
    ds.add(RoiMeasurement("w", 1, a, 1.0, 100.0, HPCS))
    ds.add(RoiMeasurement("w", 1, b, 1.0, 110.0, HPCS))
    oracle = OracleTable()
    oracle.add(OracleEntry("w", 1, a, 100.0))
    pick_b = SchedulingDecision("w", 1, b, 110.0, (b, 110.0), (b, 110.0), 0.0, Rule.BASE)
    exact = SchedulingDecision("w", 1, a, 100.0, (a, 100.0), (a, 100.0), 0.0, Rule.BASE)
    assert regret([exact], oracle, ds) == 0.0
    assert regret([pick_b], oracle, ds) == pytest.approx(10.0)
    with pytest.raises(DataError):
        regret([pick_b], OracleTable(), ds)
    with pytest.raises(ValidationError):
        regret([], oracle, ds)


def test_decision_csv_round_trip(tmp_path, arch, small_suite):
    ds, _ = small_suite
    decisions = [oracle_best(ds, k, arch) for k in ds.rois()]
    path = tmp_path / "d.csv"
    write_decisions(decisions, path)
    assert path.read_text().splitlines()[0] == "workload,roi,core_type,freq_ghz,threads,predicted_edp,variation,rule"
    assert [cfg for _, cfg in read_decision_configs(path, arch)] == [d.chosen for d in decisions]
