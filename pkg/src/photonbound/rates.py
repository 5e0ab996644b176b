"""Normal-ordered M-photon absorption rates and spatial patterns.

For an ``N``-photon amplitude the rate at a field point is::

    (I0 / 8 pi^2)^M  N!/(N-M)!  sum_tail W_tail | sum_head W_head G_head phi[head, tail] |^2

where ``G_head`` is the product of per-photon couplings times plane-wave
phases over the ``M`` head slots.  The head sum is a partial tensor
contraction, so a rate costs ``O(K^N)``.
"""
from __future__ import annotations

import cmath
import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .modes import DEFAULT_CONSTANTS, Constants, Direction, Mode, ModeGrid, coupling_vector
from .states import FockAmplitude, LightState


@dataclass(frozen=True)
class FieldPoint:
    """Cylindrical field point in units of ``1/k``."""

    rho: float = 0.0
    phi: float = 0.0
    zeta: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.rho, self.phi, self.zeta)):
            raise ValueError("field point coordinates must be finite")
        if self.rho < 0:
            raise ValueError("rho must be non-negative")

    def to_dict(self) -> dict:
        return {"rho": self.rho, "phi": self.phi, "zeta": self.zeta}


ORIGIN = FieldPoint()


@dataclass(frozen=True)
class RateReport:
    rate: float
    bound: float
    ratio: float
    m_photons: int
    direction: Direction
    point: FieldPoint
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "bound": self.bound,
            "ratio": self.ratio,
            "m_photons": self.m_photons,
            "direction": self.direction.to_pairs(),
            "point": self.point.to_dict(),
            "tolerance": self.tolerance,
        }


def mode_phase(mode: Mode, point: FieldPoint) -> complex:
    """Plane-wave phase factor of ``mode`` at ``point``."""
    arg = mode.alpha * point.rho * math.cos(mode.beta - point.phi)
    arg += mode.gamma * mode.cos_theta * point.zeta
    return cmath.exp(1j * arg)


def phase_vector(grid: ModeGrid, point: FieldPoint) -> np.ndarray:
    if point.rho == 0 and point.zeta == 0:
        return np.ones(grid.size, dtype=complex)
    arg = grid.alpha * point.rho * np.cos(grid.beta - point.phi)
    arg = arg + grid.gamma * grid.cos_theta * point.zeta
    return np.exp(1j * arg)


def head_vector(grid: ModeGrid, p: Direction, point: FieldPoint = ORIGIN) -> np.ndarray:
    """Weighted single-slot contraction vector ``w * g * phase``."""
    return grid.weights * coupling_vector(grid, p) * phase_vector(grid, point)


def contract_head(values: np.ndarray, u: np.ndarray, m_photons: int) -> np.ndarray:
    """Contract the first ``m_photons`` axes of ``values`` with ``u``."""
    t = values
    for _ in range(m_photons):
        t = np.tensordot(u, t, axes=(0, 0))
    return t


def _rate_prefactor(n: int, m: int, constants: Constants) -> float:
    return (constants.intensity_unit / (8.0 * math.pi**2)) ** m * math.perm(n, m)


def _fock_rate_with(amplitude: FockAmplitude, m_photons: int, u: np.ndarray, constants) -> float:
    n = amplitude.n_photons
    if m_photons < 0:
        raise ValueError("photon order M must be non-negative")
    if m_photons > n:
        return 0.0
    w = amplitude.grid.weights
    if amplitude.is_product:
        f = amplitude.factor
        head = complex(np.dot(u, f)) ** m_photons
        tail = float(np.sum(w * np.abs(f) ** 2)) ** (n - m_photons)
        s = abs(head) ** 2 * tail
    else:
        h = contract_head(amplitude.values, u, m_photons)
        s = h.real**2 + h.imag**2
        for _ in range(n - m_photons):
            s = np.tensordot(w, s, axes=(0, 0))
        s = float(s)
    return _rate_prefactor(n, m_photons, constants) * s


def fock_rate(
    amplitude: FockAmplitude,
    m_photons: int,
    p: Direction,
    point: FieldPoint = ORIGIN,
    constants: Constants = DEFAULT_CONSTANTS,
) -> float:
    """M-photon rate of a single Fock component, in units of ``I0**M``.

    Returns 0 when ``M > N``; ``M = 0`` gives the squared norm (1 for a
    normalized amplitude).
    """
    u = head_vector(amplitude.grid, p, point)
    return _fock_rate_with(amplitude, m_photons, u, constants)


def state_rate(
    state: LightState,
    m_photons: int,
    p: Direction,
    point: FieldPoint = ORIGIN,
    constants: Constants = DEFAULT_CONSTANTS,
) -> float:
    u = head_vector(state.grid, p, point)
    return _state_rate_with(state, m_photons, u, constants)


def _state_rate_with(state, m_photons, u, constants) -> float:
    total = 0.0
    for c, amp in state.components:
        if abs(c) == 0:
            continue
        total += abs(c) ** 2 * _fock_rate_with(amp, m_photons, u, constants)
    return total


def pattern(
    state: LightState,
    m_photons: int,
    p: Direction,
    points: Sequence[FieldPoint],
    constants: Constants = DEFAULT_CONSTANTS,
    threads: int = 1,
) -> list[float]:
    """State rate at every point, in input order.

    Points are independent work items; each uses a fixed summation order,
    so the result does not depend on ``threads``.
    """
    g = state.grid.weights * coupling_vector(state.grid, p)

    def one(point):
        return _state_rate_with(state, m_photons, g * phase_vector(state.grid, point), constants)

    if threads <= 1 or len(points) < 2:
        return [one(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, points))


def raster(rho=(0.0, 0.0, 1), phi=(0.0, 0.0, 1), zeta=(0.0, 0.0, 1)) -> list[FieldPoint]:
    """Points on a ``(start, stop, count)`` raster, ``zeta`` varying fastest."""
    axes = [np.linspace(a, b, int(n)) for a, b, n in (rho, phi, zeta)]
    return [
        FieldPoint(float(r), float(f), float(z))
        for r in axes[0]
        for f in axes[1]
        for z in axes[2]
    ]


def pattern_to_csv(points: Sequence[FieldPoint], values: Sequence[float]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rho", "phi", "zeta", "rate"])
    for pt, v in zip(points, values):
        writer.writerow([repr(pt.rho), repr(pt.phi), repr(pt.zeta), repr(float(v))])
    return buf.getvalue()


def pattern_to_json(points: Sequence[FieldPoint], values: Sequence[float]) -> str:
    rows = [{**pt.to_dict(), "rate": float(v)} for pt, v in zip(points, values)]
    return json.dumps({"columns": ["rho", "phi", "zeta", "rate"], "rows": rows}, indent=2)
