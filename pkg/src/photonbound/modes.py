"""Discretized plane-wave modes of a monochromatic field.

A mode is labelled by ``(alpha, beta, gamma, sigma)``: the transverse
direction-cosine radius ``alpha = sin(theta)``, the azimuth ``beta``, the
sign ``gamma`` of the axial wave-vector component and the polarization
``sigma`` (``"s"`` or ``"p"``).  The wave vector of a mode points along
``(alpha cos beta, alpha sin beta, gamma sqrt(1 - alpha**2))``.

Grid ordering is lexicographic in (alpha node, beta node, gamma, sigma)
with ``gamma`` running over ``(+1, -1)`` and ``sigma`` over ``("s", "p")``,
so the flat index of a mode is::

    ((i_alpha * n_beta + i_beta) * 2 + i_gamma) * 2 + i_sigma
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import roots_legendre

GAMMAS = (1, -1)
SIGMAS = ("s", "p")

# Exact value of sum_{gamma,sigma} int dalpha dbeta sqrt(alpha^2/(1-alpha^2)) |p.eps|^2.
ANGULAR_INTEGRAL_EXACT = 8.0 * math.pi / 3.0


@dataclass(frozen=True)
class Mode:
    alpha: float
    beta: float
    gamma: int
    sigma: str

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha!r}")
        if not 0.0 <= self.beta < 2.0 * math.pi:
            raise ValueError(f"beta must lie in [0, 2pi), got {self.beta!r}")
        if self.gamma not in GAMMAS:
            raise ValueError(f"gamma must be +1 or -1, got {self.gamma!r}")
        if self.sigma not in SIGMAS:
            raise ValueError(f"sigma must be 's' or 'p', got {self.sigma!r}")

    @property
    def cos_theta(self) -> float:
        """``sqrt(1 - alpha**2)`` without cancellation near grazing incidence."""
        return math.sqrt((1.0 - self.alpha) * (1.0 + self.alpha))


@dataclass(frozen=True)
class Constants:
    """Physical scale of the problem.

    Every rate is expressed in powers of ``intensity_unit`` (``I0``, one
    photon of pulse width ``T`` focused onto ``lambda**2``).  ``hbar``,
    ``omega``, ``T`` and ``lambda`` never appear on their own.
    """

    intensity_unit: float = 1.0

    def __post_init__(self):
        if not self.intensity_unit > 0:
            raise ValueError("intensity_unit must be positive")


DEFAULT_CONSTANTS = Constants()


@dataclass(frozen=True)
class Direction:
    """Unit (possibly complex) vector along which the field is measured."""

    x: complex
    y: complex
    z: complex

    def __post_init__(self):
        norm2 = abs(self.x) ** 2 + abs(self.y) ** 2 + abs(self.z) ** 2
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"direction must have unit norm, |p|^2 = {norm2!r}")

    @classmethod
    def from_vector(cls, components: Sequence[complex], normalize: bool = True) -> Direction:
        v = np.asarray(components, dtype=complex)
        if v.shape != (3,):
            raise ValueError("a direction needs exactly three components")
        if normalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise ValueError("cannot normalize the zero vector")
            v = v / n
        return cls(complex(v[0]), complex(v[1]), complex(v[2]))

    @classmethod
    def random(cls, rng: np.random.Generator, complex_valued: bool = True) -> Direction:
        v = rng.standard_normal(3)
        if complex_valued:
            v = v + 1j * rng.standard_normal(3)
        return cls.from_vector(v)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=complex)

    def to_pairs(self) -> list[list[float]]:
        return [[c.real, c.imag] for c in (complex(self.x), complex(self.y), complex(self.z))]


X_HAT = Direction(1, 0, 0)
Y_HAT = Direction(0, 1, 0)
Z_HAT = Direction(0, 0, 1)


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ModeGrid:
    """Product quadrature over ``sum_{gamma sigma} int_0^1 dalpha int_0^2pi dbeta``.

    The per-mode arrays are read-only and share the documented ordering.
    ``cos_theta`` stores ``sqrt(1 - alpha**2)`` computed from the node
    angle directly, which keeps the coupling factor accurate next to
    ``alpha = 1``.
    """

    n_alpha: int
    n_beta: int
    alpha: np.ndarray
    cos_theta: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    sigma: np.ndarray  # 0 for s, 1 for p
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @functools.cached_property
    def modes(self) -> tuple[Mode, ...]:
        return tuple(
            Mode(float(a), float(b), int(g), SIGMAS[int(s)])
            for a, b, g, s in zip(self.alpha, self.beta, self.gamma, self.sigma)
        )

    def index(self, i_alpha: int, i_beta: int, gamma: int, sigma: str) -> int:
        """Flat index of a mode from its node indices and labels."""
        i_gamma = GAMMAS.index(gamma)
        i_sigma = SIGMAS.index(sigma)
        return ((i_alpha * self.n_beta + i_beta) * 2 + i_gamma) * 2 + i_sigma

    def same_as(self, other: ModeGrid) -> bool:
        return self.n_alpha == other.n_alpha and self.n_beta == other.n_beta

    def to_dict(self, include_nodes: bool = True) -> dict:
        d = {"n_alpha": self.n_alpha, "n_beta": self.n_beta}
        if include_nodes:
            d["modes"] = [
                {"alpha": m.alpha, "beta": m.beta, "gamma": m.gamma, "sigma": m.sigma}
                for m in self.modes
            ]
            d["weights"] = [float(w) for w in self.weights]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> ModeGrid:
        return build_grid(int(d["n_alpha"]), int(d["n_beta"]))


@functools.lru_cache(maxsize=32)
def build_grid(n_alpha: int, n_beta: int) -> ModeGrid:
    """Build the mode grid.

    Alpha nodes are Gauss-Legendre nodes in ``theta = arcsin(alpha)`` on
    ``[0, pi/2]``; the ``dalpha = cos(theta) dtheta`` Jacobian is folded into
    the weights.  Beta nodes are uniform, ``2 pi j / n_beta``, which is
    exact for trigonometric polynomials of degree below ``n_beta``.
    """
    if int(n_alpha) != n_alpha or int(n_beta) != n_beta:
        raise ValueError("grid sizes must be integers")
    n_alpha, n_beta = int(n_alpha), int(n_beta)
    if n_alpha < 1 or n_beta < 1:
        raise ValueError(f"grid sizes must be >= 1, got ({n_alpha}, {n_beta})")

    x, wx = roots_legendre(n_alpha)
    theta = (x + 1.0) * (math.pi / 4.0)
    w_theta = wx * (math.pi / 4.0)
    a_nodes = np.sin(theta)
    c_nodes = np.cos(theta)
    a_weights = w_theta * c_nodes

    b_nodes = 2.0 * math.pi * np.arange(n_beta) / n_beta
    b_weight = 2.0 * math.pi / n_beta

    shape = (n_alpha, n_beta, 2, 2)
    ia, ib, ig, isg = np.indices(shape).reshape(4, -1)
    return ModeGrid(
        n_alpha=n_alpha,
        n_beta=n_beta,
        alpha=_readonly(a_nodes[ia]),
        cos_theta=_readonly(c_nodes[ia]),
        beta=_readonly(b_nodes[ib]),
        gamma=_readonly(np.array(GAMMAS)[ig]),
        sigma=_readonly(isg.copy()),
        weights=_readonly(a_weights[ia] * b_weight),
    )


def polarization(mode: Mode) -> np.ndarray:
    """Unit polarization vector of ``mode`` in the fixed Cartesian basis.

    ``s``: ``(-sin b, cos b, 0)``;
    ``p``: ``(-g c cos b, -g c sin b, alpha)`` with ``c = sqrt(1 - alpha**2)``.
    """
    sb, cb = math.sin(mode.beta), math.cos(mode.beta)
    if mode.sigma == "s":
        return np.array([-sb, cb, 0.0])
    c = mode.gamma * mode.cos_theta
    return np.array([-c * cb, -c * sb, mode.alpha])


def polarizations(grid: ModeGrid) -> np.ndarray:
    """Polarization vectors of every grid mode, shape ``(K, 3)``."""
    sb, cb = np.sin(grid.beta), np.cos(grid.beta)
    gc = grid.gamma * grid.cos_theta
    is_p = grid.sigma == 1
    eps = np.empty((grid.size, 3))
    eps[:, 0] = np.where(is_p, -gc * cb, -sb)
    eps[:, 1] = np.where(is_p, -gc * sb, cb)
    eps[:, 2] = np.where(is_p, grid.alpha, 0.0)
    return eps


def coupling_weight(mode: Mode, p: Direction) -> complex:
    """``(alpha^2/(1-alpha^2))^(1/4) * (p . eps)``, the per-photon coupling."""
    amp = math.sqrt(mode.alpha / mode.cos_theta)
    return amp * complex(np.dot(p.vector, polarization(mode)))


def coupling_vector(grid: ModeGrid, p: Direction) -> np.ndarray:
    """:func:`coupling_weight` for every grid mode, shape ``(K,)``."""
    amp = np.sqrt(grid.alpha / grid.cos_theta)
    return amp * (polarizations(grid) @ p.vector)


def angular_weight_integral(grid: ModeGrid, p: Direction) -> float:
    """Quadrature of ``|coupling_weight|^2`` over all modes; tends to 8 pi/3."""
    g = coupling_vector(grid, p)
    return float(np.sum(grid.weights * (g.real**2 + g.imag**2)))
