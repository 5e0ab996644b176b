"""The photon-number bound on multiphoton absorption and its diagnostics.

For any state, ``<:I^M:> <= (I0/3pi)^M sum_N |C_N|^2 N!/(N-M)!``.  The
bound is independent of the measurement direction, so the same value is
used for every ``p``.  It is computed with the exact ``1/(3 pi)``; the
grid's own angular integral is reported separately as a discretization
diagnostic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import rates
from .errors import BoundViolationError
from .modes import (
    DEFAULT_CONSTANTS,
    Constants,
    Direction,
    ModeGrid,
    Z_HAT,
    angular_weight_integral,
    build_grid,
)
from .rates import ORIGIN, FieldPoint, RateReport
from .states import LightState, state_digest

# (n_alpha, n_beta) -> default saturation tolerance; ratio accuracy is
# quadrature-limited, not arithmetic-limited.
TOLERANCE_TABLE = {(16, 8): 1e-4, (32, 16): 1e-6, (64, 32): 1e-8}


def default_tolerance(grid: ModeGrid) -> float:
    """Tolerance from :data:`TOLERANCE_TABLE`, by the finest row the grid reaches."""
    tol = 1e-2
    for (na, nb), t in sorted(TOLERANCE_TABLE.items()):
        if grid.n_alpha >= na and grid.n_beta >= nb:
            tol = t
    return tol


def fock_bound(n_photons: int, m_photons: int, constants: Constants = DEFAULT_CONSTANTS) -> float:
    if m_photons < 0 or n_photons < 0:
        raise ValueError("photon numbers must be non-negative")
    if m_photons > n_photons:
        return 0.0
    return (constants.intensity_unit / (3.0 * math.pi)) ** m_photons * math.perm(
        n_photons, m_photons
    )


def number_factor(state: LightState, m_photons: int) -> float:
    """``sum_N |C_N|^2 N!/(N-M)!``, the factorial moment of the photon number."""
    return sum(
        abs(c) ** 2 * math.perm(a.n_photons, m_photons)
        for c, a in state.components
        if a.n_photons >= m_photons
    )


@dataclass(frozen=True)
class BoundReport:
    bound: float
    number_factor: float
    geometric_factor: float
    m_photons: int
    per_fock_ratios: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "bound": self.bound,
            "number_factor": self.number_factor,
            "geometric_factor": self.geometric_factor,
            "exact_geometric_factor": (1.0 / (3.0 * math.pi)) ** self.m_photons,
            "m_photons": self.m_photons,
            "per_fock_ratios": [[n, r] for n, r in self.per_fock_ratios],
        }


def geometric_factor(grid: ModeGrid, m_photons: int, p: Direction = Z_HAT) -> float:
    """Grid estimate of ``(1/3pi)^M`` from the angular integral."""
    return (angular_weight_integral(grid, p) / (8.0 * math.pi**2)) ** m_photons


def state_bound(
    state: LightState,
    m_photons: int,
    p: Direction = Z_HAT,
    constants: Constants = DEFAULT_CONSTANTS,
) -> BoundReport:
    nf = number_factor(state, m_photons)
    ratios = []
    for _, amp in state.components:
        b = fock_bound(amp.n_photons, m_photons, constants)
        if b > 0:
            r = rates.fock_rate(amp, m_photons, p, ORIGIN, constants)
            ratios.append((amp.n_photons, r / b))
    return BoundReport(
        bound=(constants.intensity_unit / (3.0 * math.pi)) ** m_photons * nf,
        number_factor=nf,
        geometric_factor=geometric_factor(state.grid, m_photons, p),
        m_photons=m_photons,
        per_fock_ratios=ratios,
    )


def certify(rate: float, bound: float, tolerance: float) -> float:
    """Return ``rate/bound`` (0 when both vanish) or raise on violation."""
    if bound > 0:
        ratio = rate / bound
    else:
        ratio = 0.0 if rate <= 0 else math.inf
    if ratio > 1.0 + tolerance:
        raise BoundViolationError(f"rate/bound = {ratio!r} exceeds 1 + {tolerance!r}")
    return ratio


def check_bound(
    state: LightState,
    m_photons: int,
    p: Direction,
    tolerance: float | None = None,
    point: FieldPoint = ORIGIN,
    constants: Constants = DEFAULT_CONSTANTS,
) -> RateReport:
    """Rate at ``point`` against the bound; raises :class:`BoundViolationError`."""
    if tolerance is None:
        tolerance = default_tolerance(state.grid)
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    rate = rates.state_rate(state, m_photons, p, point, constants)
    bound = (constants.intensity_unit / (3.0 * math.pi)) ** m_photons * number_factor(
        state, m_photons
    )
    try:
        ratio = certify(rate, bound, tolerance)
    except BoundViolationError as exc:
        report = RateReport(rate, bound, rate / bound if bound else math.inf,
                            m_photons, p, point, tolerance)
        digest = state_digest(state)
        raise BoundViolationError(
            f"{exc} for state {digest} (M={m_photons})", state_hash=digest, report=report
        ) from None
    return RateReport(rate, bound, ratio, m_photons, p, point, tolerance)


# Relative error below which double-precision sums cannot resolve further gains.
ROUNDOFF_FLOOR = 1e-14


def geometric_error_series(sizes=(8, 16, 32, 64), p: Direction = Z_HAT, m_photons: int = 1):
    """Relative error of the grid geometric factor on ``n x n`` grids."""
    exact = (1.0 / (3.0 * math.pi)) ** m_photons
    return [abs(geometric_factor(build_grid(n, n), m_photons, p) / exact - 1.0) for n in sizes]


def errors_monotone(errors, floor: float = ROUNDOFF_FLOOR) -> bool:
    """Each refinement lowers the error, unless it already sits at the roundoff floor."""
    return all(b <= a or b <= floor for a, b in zip(errors, errors[1:]))
