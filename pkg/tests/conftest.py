import pytest

from ccasched.config_space import Architecture
from ccasched.synthetic import SyntheticSpec, generate_synthetic


@pytest.fixture(scope="session")
def arch():
    return Architecture()


@pytest.fixture(scope="session")
def small_arch():
    return Architecture(n_base=4, n_composed=2)


@pytest.fixture(scope="session")
def small_suite(arch):
    """12 noisy ROIs: enough for training smoke tests, fast to build."""
    return generate_synthetic(SyntheticSpec(n_workloads=4, rois_per_workload=3, seed=7), arch)


@pytest.fixture(scope="session")
def noiseless_suite(arch):
    return generate_synthetic(SyntheticSpec(n_workloads=10, rois_per_workload=5, noise_sd=0.0, seed=42), arch)
