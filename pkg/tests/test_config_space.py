import json

import pytest
from hypothesis import given, strategies as st

from ccasched.config_space import (
    DEFAULT_DVFS,
    Architecture,
    ConfigClass,
    Configuration,
    CoreType,
    OperatingPoint,
    classify_config,
    dvfs_voltage,
    enumerate_configs,
    feasible,
    feasible_configs,
    load_architecture,
)
from ccasched.errors import ConfigError, DomainError, UnknownFrequencyError, ValidationError


def cfg(arch, core, freq, threads):
    return Configuration(core, arch.op_for(freq), threads)


def test_default_space_has_64_configs(arch):
    assert len(enumerate_configs(arch)) == 64


def test_space_sizes_scale_with_axes():
    two_points = Architecture(dvfs=(OperatingPoint(1.6, 0.7), OperatingPoint(2.0, 0.8)))
    assert len(enumerate_configs(Architecture(), max_threads=1)) == 8
    assert len(enumerate_configs(two_points, max_threads=4)) == 16


def test_enumeration_order_and_uniqueness(arch):
    configs = enumerate_configs(arch)
    keys = [(c.core.code, c.freq_ghz, c.threads) for c in configs]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    assert configs == enumerate_configs(arch)


def test_empty_dvfs_rejected():
    with pytest.raises(ConfigError):
        Architecture(dvfs=())


def test_max_threads_must_be_positive(arch):
    with pytest.raises(ValidationError):
        enumerate_configs(arch, max_threads=0)


def test_feasibility_examples(arch, small_arch):
    assert feasible(cfg(arch, CoreType.BASE, 2.8, 8), arch)
    assert not feasible(cfg(arch, CoreType.COMPOSED, 2.8, 8), arch)
    assert feasible(cfg(small_arch, CoreType.COMPOSED, 2.4, 2), small_arch)
    assert len(feasible_configs(arch)) == 4 * (8 + 4)


def test_classification_examples(arch):
    assert classify_config(cfg(arch, CoreType.BASE, 2.4, 8), arch) is ConfigClass.FULLY_BASE
    assert classify_config(cfg(arch, CoreType.COMPOSED, 2.8, 4), arch) is ConfigClass.FULLY_COMPOSED
    assert classify_config(cfg(arch, CoreType.BASE, 2.0, 5), arch) is ConfigClass.PARTIALLY_BASE
    assert classify_config(cfg(arch, CoreType.COMPOSED, 1.6, 1), arch) is ConfigClass.PARTIALLY_COMPOSED


def test_classification_of_infeasible_is_domain_error(arch):
    with pytest.raises(DomainError):
        classify_config(cfg(arch, CoreType.COMPOSED, 2.8, 8), arch)


def test_classification_total_over_feasible(arch, small_arch):
    for a in (arch, small_arch):
        for c in feasible_configs(a):
            k = classify_config(c, a)
            assert k.is_composed == (c.core is CoreType.COMPOSED)


def test_voltage_pairs(arch):
    assert dvfs_voltage(1.6, arch) == 0.7
    assert dvfs_voltage(2.0, arch) == 0.8
    assert dvfs_voltage(2.8, arch) == 1.0
    with pytest.raises(UnknownFrequencyError):
        dvfs_voltage(3.0, arch)
    with pytest.raises(LookupError):
        dvfs_voltage(3.0, arch)


def test_default_table_has_four_points():
    assert [p.freq_ghz for p in DEFAULT_DVFS] == [1.6, 2.0, 2.4, 2.8]


@pytest.mark.parametrize(
    "doc, fragment",
    [
        ({"n_base": 8, "n_composed": 3}, "n_composed == n_base / 2"),
        ({"variation_threshold": 1.5}, "variation_threshold"),
        ({"dvfs": [{"freq_ghz": 2.0, "voltage_v": 0.8}, {"freq_ghz": 1.6, "voltage_v": 0.7}]}, "ascending"),
        ({"dvfs": [{"freq_ghz": 1.6, "voltage_v": 0.8}, {"freq_ghz": 2.0, "voltage_v": 0.7}]}, "voltage"),
    ],
)
def test_loader_names_violated_invariant(tmp_path, doc, fragment):
    path = tmp_path / "arch.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError, match=fragment):
        load_architecture(path)


def test_architecture_json_round_trip(tmp_path, small_arch):
    path = tmp_path / "arch.json"
    path.write_text(json.dumps(small_arch.to_dict()))
    assert load_architecture(path) == small_arch


def test_aggressive_config(arch):
    a = arch.aggressive_config()
    assert (a.core, a.freq_ghz, a.threads) == (CoreType.COMPOSED, 2.8, 4)


@given(st.integers(1, 8), st.integers(1, 16))
def test_cardinality_property(half, max_threads):
    a = Architecture(n_base=2 * half, n_composed=half)
    configs = enumerate_configs(a, max_threads)
    assert len(configs) == 2 * len(a.dvfs) * max_threads
    for c in configs:
        if feasible(c, a):
            classify_config(c, a)
        if c.core is CoreType.BASE:
            assert feasible(c, a) == (c.threads <= a.n_base)
