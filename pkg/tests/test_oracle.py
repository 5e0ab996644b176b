import math

import numpy as np
import pytest

from photonbound.errors import SizeLimitError
from photonbound.modes import ANGULAR_INTEGRAL_EXACT, Direction, X_HAT, Z_HAT, build_grid
from photonbound.optimize import RateOperator
from photonbound.oracle import (
    OracleConfig,
    dense_operator_matrix,
    dense_rate,
    dense_top_eigenpair,
    flat_norm2,
    mc_angular_integral,
    symmetric_basis,
)
from photonbound.rates import fock_rate
from photonbound.states import random_symmetric_state, weighted_inner


@pytest.mark.parametrize("p", [Z_HAT, X_HAT, Direction.from_vector([1, 1j, 0])])
def test_mc_angular_integral_within_three_sigma(p):
    est, err = mc_angular_integral(p, 1_000_000, seed=2)
    assert abs(est - ANGULAR_INTEGRAL_EXACT) <= 3 * err


def test_mc_seed_reproducible():
    assert mc_angular_integral(Z_HAT, 1000, 5) == mc_angular_integral(Z_HAT, 1000, 5)
    assert mc_angular_integral(Z_HAT, 1000, 5) != mc_angular_integral(Z_HAT, 1000, 6)


def test_mc_stderr_scaling():
    _, e_small = mc_angular_integral(Z_HAT, 10_000, 1)
    _, e_big = mc_angular_integral(Z_HAT, 1_000_000, 1)
    assert abs(e_small / e_big / 10 - 1) < 0.2


def test_mc_needs_two_samples():
    with pytest.raises(ValueError):
        mc_angular_integral(Z_HAT, 1)


def test_symmetric_basis_orthonormal():
    b = symmetric_basis(4, 3)
    assert b.shape == (64, math.comb(6, 3))
    np.testing.assert_allclose(b.T @ b, np.eye(b.shape[1]), atol=1e-14)


def test_dense_matrix_psd_and_hermitian(tiny_grid):
    op = RateOperator(tiny_grid, 2, 1, Direction.from_vector([1, 2j, 0.5]))
    mat, _ = dense_operator_matrix(op)
    assert np.allclose(mat, mat.conj().T, atol=1e-16)
    assert np.linalg.eigvalsh(mat).min() >= -1e-12


def test_top_vector_rayleigh_quotient(tiny_grid):
    op = RateOperator(tiny_grid, 2, 2, X_HAT)
    lam, vec = dense_top_eigenpair(op)
    assert abs(flat_norm2(vec) - 1) < 1e-12
    assert abs(fock_rate(vec, 2, X_HAT) - lam) <= 1e-12 * lam
    assert abs(dense_rate(vec, 2, X_HAT) - lam) <= 1e-12 * lam


def test_dense_cap_enforced():
    op = RateOperator(build_grid(4, 4), 2, 1, Z_HAT)
    with pytest.raises(SizeLimitError):
        dense_top_eigenpair(op)


def test_loop_budget_enforced():
    g = build_grid(4, 4)
    amp = random_symmetric_state(g, 3, 0)
    with pytest.raises(SizeLimitError):
        dense_rate(amp, 1, Z_HAT, config=OracleConfig(loop_budget=1000))


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(mc_samples=0)
