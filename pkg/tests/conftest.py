import math

import numpy as np
import pytest

from gamow2d import (
    OptimizerConfig,
    StarShape,
    constant_kernel,
    disk,
    gauss_power_kernel,
    indicator_kernel,
    power_kernel,
)


@pytest.fixture
def k_half():
    return power_kernel(-0.5)


@pytest.fixture
def k_const():
    return constant_kernel()


@pytest.fixture
def k_gauss():
    return gauss_power_kernel(kappa=1.0, alpha=0.5)


@pytest.fixture
def k_ind():
    return indicator_kernel(radius=1.0)


@pytest.fixture
def unit_disk():
    return disk()


@pytest.fixture
def perturbed():
    s = StarShape(center=(0.0, 0.0), r0=1.0, modes=((2, 0.1, 0.0), (3, 0.0, 0.05)))
    from gamow2d import project_volume

    return project_volume(s, math.pi)


@pytest.fixture
def fast_cfg():
    return OptimizerConfig(n_modes=4, max_iters=30, n_theta=48, n_radial=5,
                           tol_step=5e-4, seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
