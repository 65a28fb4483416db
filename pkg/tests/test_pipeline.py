import json

import pytest

from ccasched.errors import ConfigError, ValidationError
from ccasched.pipeline import StageError, load_config, parse_config, run_pipeline

SMALL = {
    "data": {"synthetic": {"n_workloads": 4, "rois_per_workload": 5}},
    "algorithms": ["LinearReg", "M5Tree", "REPTree"],
    "seed": 42,
    "train_fraction": 0.7,
}


def test_twenty_rois_split_14_6(tmp_path):
    summary = run_pipeline(parse_config(SMALL), tmp_path / "out")
    assert (summary["n_rois"], summary["train_rois"], summary["test_rois"]) == (20, 14, 6)
    out = tmp_path / "out"
    for alg in SMALL["algorithms"]:
        assert (out / "models" / f"{alg}.json").exists()
        assert (out / f"decisions_{alg}.csv").exists()
        r = summary["algorithms"][alg]
        assert r["accuracy"] == 100.0 - r["rmae"]
        assert len(r["decisions"]) == 6
    assert json.loads((out / "summary.json").read_text()) == summary
    assert summary["features"]["selected"] == ["l1d_access", "l2_access", "l2_miss", "br_mispred"]


def test_runs_are_byte_identical(tmp_path):
    run_pipeline(parse_config(SMALL), tmp_path / "a")
    run_pipeline(parse_config(SMALL), tmp_path / "b")
    for name in ("summary.json", "decisions_M5Tree.csv", "models/REPTree.json", "measurements.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_unknown_algorithm_rejected_before_work(tmp_path):
    with pytest.raises(ValidationError, match="Foo"):
        parse_config({**SMALL, "algorithms": ["M5Tree", "Foo"]})
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize(
    "patch",
    [
        {"train_fraction": 1.5},
        {"feature_mode": "pca"},
        {"bogus": 1},
        {"data": {"synthetic": {"colour": 1}}},
        {"hyperparameters": {"M5Tree": {"depth": 2}}},
        {"algorithms": []},
    ],
)
def test_config_validation(patch):
    with pytest.raises(ValidationError):
        parse_config({**SMALL, **patch})


def test_stage_failure_names_stage_and_leaves_nothing(tmp_path):
    cfg = parse_config({**SMALL, "hyperparameters": {"REPTree": {"min_leaf": 5000}}})
    with pytest.raises(StageError, match="train:REPTree") as info:
        run_pipeline(cfg, tmp_path / "out")
    assert info.value.exit_code == 2
    assert not (tmp_path / "out").exists()
    assert list(tmp_path.iterdir()) == []


def test_loaded_measurements_without_oracle(tmp_path):
    run_pipeline(parse_config(SMALL), tmp_path / "gen")
    doc = {**SMALL, "data": {"measurements": "gen/measurements.csv"}, "algorithms": ["REPTree"]}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    loaded = run_pipeline(load_config(path), tmp_path / "loaded")
    with_oracle = {**doc, "data": {"measurements": "gen/measurements.csv", "oracle": "gen/oracle.csv"}}
    path.write_text(json.dumps(with_oracle))
    ref = run_pipeline(load_config(path), tmp_path / "ref")
    assert loaded["algorithms"]["REPTree"]["regret"] == ref["algorithms"]["REPTree"]["regret"]


def test_missing_config_file(tmp_path):
    from ccasched.errors import DataError

    with pytest.raises(DataError):
        load_config(tmp_path / "none.json")
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.json")
