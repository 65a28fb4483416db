import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccasched import kernels

BACKENDS = [("python", kernels.python_best_split)]
if kernels.compiled_best_split is not None:
    BACKENDS.append(("cython", kernels.compiled_best_split))


def gain_at(x, y, i, criterion):
    spread = np.std if criterion == 0 else np.var
    n = len(y)
    return spread(y) - (i * spread(y[:i]) + (n - i) * spread(y[i:])) / n


def brute_force_split(x, y, min_leaf, criterion):
    """Every admissible boundary, spread recomputed from scratch with numpy."""
    n = len(y)
    best = (-np.inf, 0)
    for i in range(1, n):
        if i < min_leaf or n - i < min_leaf or not x[i] > x[i - 1]:
            continue
        gain = gain_at(x, y, i, criterion)
        if gain > best[0]:
            best = (gain, i)
    return best


def sorted_sample(rng, n, distinct):
    x = np.sort(rng.integers(0, distinct, n).astype(float))
    y = rng.normal(size=n)
    return x, y - y.mean()


@pytest.mark.parametrize("name, fn", BACKENDS)
@pytest.mark.parametrize("criterion", [0, 1])
def test_matches_brute_force(name, fn, criterion):
    rng = np.random.default_rng(0)
    for trial in range(40):
        n = int(rng.integers(2, 60))
        x, y = sorted_sample(rng, n, int(rng.integers(1, n + 1)))
        min_leaf = int(rng.integers(1, 5))
        gain, pos = fn(x, y, min_leaf, criterion)
        ref_gain, ref_pos = brute_force_split(x, y, min_leaf, criterion)
        if ref_pos == 0:
            assert pos == 0
            continue
        assert gain == pytest.approx(ref_gain, abs=1e-9)
        # rounding can reorder near-ties; the chosen boundary must still be optimal
        assert gain_at(x, y, pos, criterion) == pytest.approx(ref_gain, abs=1e-9)


@pytest.mark.parametrize("name, fn", BACKENDS)
def test_no_admissible_split(name, fn):
    x = np.ones(10)
    assert fn(x, np.arange(10.0) - 4.5, 1, 0)[1] == 0
    assert fn(np.arange(3.0), np.array([-1.0, 0.0, 1.0]), 2, 0)[1] == 0
    assert fn(np.array([1.0]), np.array([0.0]), 1, 1)[1] == 0


@pytest.mark.parametrize("name, fn", BACKENDS)
def test_obvious_step(name, fn):
    x = np.arange(10.0)
    y = np.where(x < 4, -1.0, 1.0)
    y -= y.mean()
    assert fn(x, y, 1, 1)[1] == 4


@pytest.mark.skipif(kernels.compiled_best_split is None, reason="extension not built")
@settings(max_examples=200, deadline=None)
@given(st.integers(2, 200), st.integers(1, 6), st.integers(0, 1), st.integers(0, 2**32 - 1))
def test_backends_bit_identical(n, min_leaf, criterion, seed):
    x, y = sorted_sample(np.random.default_rng(seed), n, max(1, n // 3))
    assert kernels.compiled_best_split(x, y, min_leaf, criterion) == kernels.python_best_split(
        x, y, min_leaf, criterion
    )


def test_env_var_forces_fallback():
    env = dict(os.environ, CCASCHED_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from ccasched import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.skipif(kernels.compiled_best_split is None, reason="extension not built")
def test_compiled_backend_is_default():
    if os.environ.get("CCASCHED_PURE_PYTHON"):
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "cython"


def test_trees_identical_under_both_backends(monkeypatch, small_suite, arch):
    if kernels.compiled_best_split is None:
        pytest.skip("extension not built")
    from ccasched.dataset import build_training_table
    from ccasched.features import PAPER_FEATURE_INDICES
    from ccasched.models import train

    table = build_training_table(small_suite[0], arch, PAPER_FEATURE_INDICES)
    docs = []
    for fn in (kernels.python_best_split, kernels.compiled_best_split):
        monkeypatch.setattr(kernels, "best_split", fn)
        docs.append([train(a, table, seed=1).to_json() for a in ("M5Tree", "REPTree")])
    assert docs[0] == docs[1]
