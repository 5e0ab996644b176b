"""Slow reference implementations for cross-checking the fast paths.

Nothing here calls into ``rates``, ``bounds`` or ``optimize``: couplings are
rebuilt from the cylindrical polarization basis at the observation azimuth,
phases from the Cartesian ``k . r``, and sums are spelled out as loops.
Only the grid and amplitude containers are shared.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError
from .modes import Direction, ModeGrid
from .rates import FieldPoint
from .states import FockAmplitude


@dataclass(frozen=True)
class OracleConfig:
    mc_samples: int = 1_000_000
    mc_seed: int = 0
    dense_mode_cap: int = 32
    loop_budget: int = 2_000_000

    def __post_init__(self):
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")
        if self.dense_mode_cap < 1:
            raise ValueError("dense_mode_cap must be >= 1")


DEFAULT_ORACLE = OracleConfig()


def _cyl_coupling(alpha, beta, gamma, sigma, p, obs_phi):
    """Coupling in the (rho, phi, zeta) basis tied to the observation azimuth."""
    d = beta - obs_phi
    if sigma == "s":
        e_rho, e_phi, e_z = -math.sin(d), math.cos(d), 0.0
    else:
        c = -gamma * math.sqrt(1.0 - alpha * alpha)
        e_rho, e_phi, e_z = c * math.cos(d), c * math.sin(d), alpha
    px, py, pz = p
    p_rho = px * math.cos(obs_phi) + py * math.sin(obs_phi)
    p_phi = -px * math.sin(obs_phi) + py * math.cos(obs_phi)
    dot = p_rho * e_rho + p_phi * e_phi + pz * e_z
    return (alpha * alpha / (1.0 - alpha * alpha)) ** 0.25 * dot


def _cart_phase(alpha, beta, gamma, point):
    x = point.rho * math.cos(point.phi)
    y = point.rho * math.sin(point.phi)
    kz = gamma * math.sqrt(1.0 - alpha * alpha)
    return cmath.exp(1j * (alpha * math.cos(beta) * x + alpha * math.sin(beta) * y + kz * point.zeta))


def _mode_couplings(grid: ModeGrid, p: Direction, point) -> list[complex]:
    pv = (complex(p.x), complex(p.y), complex(p.z))
    return [
        _cyl_coupling(m.alpha, m.beta, m.gamma, m.sigma, pv, point.phi)
        * _cart_phase(m.alpha, m.beta, m.gamma, point)
        for m in grid.modes
    ]


def dense_rate(amplitude: FockAmplitude, m_photons: int, p: Direction, point=None,
               config: OracleConfig = DEFAULT_ORACLE) -> float:
    """Nested-loop transcription of the rate formula, in units of ``I0**M``."""
    point = point or FieldPoint()
    n = amplitude.n_photons
    if m_photons > n:
        return 0.0
    grid = amplitude.grid
    k = grid.size
    if k**n > config.loop_budget:
        raise SizeLimitError(
            f"oracle loop over {k}^{n} terms exceeds budget {config.loop_budget}",
            limit=config.loop_budget,
            requested=k**n,
        )
    phi = amplitude.dense()
    w = [float(x) for x in grid.weights]
    g = _mode_couplings(grid, p, point)

    total = 0.0
    for tail in itertools.product(range(k), repeat=n - m_photons):
        tail_w = 1.0
        for t in tail:
            tail_w *= w[t]
        inner = 0j
        for head in itertools.product(range(k), repeat=m_photons):
            term = complex(phi[head + tail])
            for h in head:
                term *= w[h] * g[h]
            inner += term
        total += tail_w * abs(inner) ** 2
    return (1.0 / (8.0 * math.pi**2)) ** m_photons * math.factorial(n) / math.factorial(
        n - m_photons
    ) * total


def mc_angular_integral(p: Direction, samples: int, seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo estimate of the angular weight integral and its standard error.

    Samples ``(theta, beta, gamma, sigma)`` uniformly; in ``theta`` the
    integrand ``sin(theta) |p.eps|^2`` is bounded.
    """
    if samples < 2:
        raise ValueError("need at least two samples for a standard error")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, math.pi / 2, samples)
    beta = rng.uniform(0.0, 2 * math.pi, samples)
    gamma = rng.choice([-1.0, 1.0], samples)
    is_p = rng.integers(0, 2, samples).astype(bool)
    st, ct = np.sin(theta), np.cos(theta)
    sb, cb = np.sin(beta), np.cos(beta)
    px, py, pz = complex(p.x), complex(p.y), complex(p.z)
    dot_s = -px * sb + py * cb
    dot_p = -gamma * ct * (px * cb + py * sb) + pz * st
    dot = np.where(is_p, dot_p, dot_s)
    f = st * np.abs(dot) ** 2
    volume = (math.pi / 2) * (2 * math.pi) * 4
    return float(volume * f.mean()), float(volume * f.std(ddof=1) / math.sqrt(samples))


def symmetric_basis(k: int, n: int) -> np.ndarray:
    """Orthonormal basis of the symmetric subspace, shape ``(k**n, dim)``."""
    combos = list(itertools.combinations_with_replacement(range(k), n))
    basis = np.zeros((k**n, len(combos)))
    strides = [k ** (n - 1 - i) for i in range(n)]
    for col, combo in enumerate(combos):
        perms = set(itertools.permutations(combo))
        amp = 1.0 / math.sqrt(len(perms))
        for perm in perms:
            basis[sum(i * s for i, s in zip(perm, strides)), col] = amp
    return basis


def dense_operator_matrix(op, config: OracleConfig = DEFAULT_ORACLE):
    """Rate operator restricted to the symmetric subspace in orthonormal coordinates.

    Returns ``(matrix, basis)``.
    """
    grid: ModeGrid = op.grid
    k, n, m = grid.size, op.n_photons, op.m_photons
    if k > config.dense_mode_cap:
        raise SizeLimitError(
            f"dense eigensolve over {k} modes exceeds cap {config.dense_mode_cap}",
            limit=config.dense_mode_cap,
            requested=k,
        )
    basis = symmetric_basis(k, n)
    if m > n:
        return np.zeros((basis.shape[1],) * 2, dtype=complex), basis
    point = op.point
    g = np.array(_mode_couplings(grid, op.direction, point))
    ghat = np.sqrt(grid.weights) * g
    head = np.ones(1, dtype=complex)
    for _ in range(m):
        head = np.kron(head, ghat)
    # L = head^T (x) I maps the symmetric basis onto tail-space vectors.
    lifted = np.tensordot(head, basis.reshape(k**m, k ** (n - m), -1), axes=(0, 0))
    c = (op.constants.intensity_unit / (8.0 * math.pi**2)) ** m * math.factorial(n) / math.factorial(n - m)
    matrix = c * (lifted.conj().T @ lifted)
    return matrix, basis


def dense_top_eigenpair(op, config: OracleConfig = DEFAULT_ORACLE) -> tuple[float, FockAmplitude]:
    """Largest eigenvalue and eigenvector by a dense Hermitian eigensolve."""
    matrix, basis = dense_operator_matrix(op, config)
    vals, vecs = np.linalg.eigh(matrix)
    top = basis @ vecs[:, -1]
    grid = op.grid
    n = op.n_photons
    tensor = top.reshape((grid.size,) * n)
    isw = 1.0 / np.sqrt(grid.weights)
    for ax in range(n):
        shape = [1] * n
        shape[ax] = -1
        tensor = tensor * isw.reshape(shape)
    return float(vals[-1]), FockAmplitude(grid, n, values=tensor)


def flat_norm2(amplitude: FockAmplitude) -> float:
    """Discrete norm by one flat loop over every index tuple."""
    w = amplitude.grid.weights
    phi = amplitude.dense()
    total = 0.0
    for idx in itertools.product(range(amplitude.grid.size), repeat=amplitude.n_photons):
        wt = 1.0
        for i in idx:
            wt *= w[i]
        total += wt * abs(phi[idx]) ** 2
    return total
