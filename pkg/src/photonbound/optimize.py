"""Numerical rediscovery of the rate-maximizing amplitude.

The rate of an ``N``-photon amplitude is a Hermitian positive semidefinite
quadratic form ``<phi|A|phi>`` in the weighted inner product
``<a|b> = sum W conj(a) b``.  ``A`` is applied matrix-free with the same
head contraction used by :func:`photonbound.rates.fock_rate`, and its top
eigenvector is found by power iteration inside the symmetric subspace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError
from .modes import DEFAULT_CONSTANTS, Constants, Direction, ModeGrid, coupling_vector
from .rates import ORIGIN, FieldPoint, contract_head, phase_vector
from .states import (
    FockAmplitude,
    random_symmetric_state,
    symmetrize_tensor,
    weighted_inner,
    weighted_norm2,
)


@dataclass(frozen=True, eq=False)
class RateOperator:
    grid: ModeGrid
    n_photons: int
    m_photons: int
    direction: Direction
    point: FieldPoint = ORIGIN
    constants: Constants = DEFAULT_CONSTANTS

    def __post_init__(self):
        if self.n_photons < 1:
            raise ValueError("the rate operator needs at least one photon")
        if self.m_photons < 0:
            raise ValueError("photon order M must be non-negative")

    @property
    def prefactor(self) -> float:
        if self.m_photons > self.n_photons:
            return 0.0
        scale = self.constants.intensity_unit / (8.0 * math.pi**2)
        return scale**self.m_photons * math.perm(self.n_photons, self.m_photons)

    def coupling(self) -> np.ndarray:
        """Coupling times phase for every mode, ``g * exp(i k.r)``."""
        return coupling_vector(self.grid, self.direction) * phase_vector(self.grid, self.point)


def apply_operator(op: RateOperator, amplitude) -> np.ndarray:
    """``A phi`` as a raw-value tensor, with ``<phi|A phi> = fock_rate(phi)``."""
    if isinstance(amplitude, FockAmplitude):
        if not amplitude.grid.same_as(op.grid) or amplitude.n_photons != op.n_photons:
            raise ValueError("amplitude does not match the operator's grid or photon number")
        values = amplitude.dense()
    else:
        values = np.asarray(amplitude, dtype=complex)
    shape = (op.grid.size,) * op.n_photons
    if values.shape != shape:
        raise ValueError(f"expected tensor of shape {shape}, got {values.shape}")
    if op.m_photons > op.n_photons:
        return np.zeros(shape, dtype=complex)

    g = op.coupling()
    h = contract_head(values, op.grid.weights * g, op.m_photons)
    gc = np.conj(g)
    out = h
    for _ in range(op.m_photons):
        out = np.multiply.outer(gc, out)
    return op.prefactor * symmetrize_tensor(out)


@dataclass
class OptimizationResult:
    max_rate: float
    argmax: FockAmplitude
    iterations: int
    residual: float
    rank_one_defect: float
    residual_history: list[float] = field(default_factory=list)
    rayleigh_history: list[float] = field(default_factory=list)
    second_ritz: float = 0.0
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "max_rate": self.max_rate,
            "iterations": self.iterations,
            "residual": self.residual,
            "rank_one_defect": self.rank_one_defect,
            "second_ritz": self.second_ritz,
            "degenerate": self.degenerate,
            "n_photons": self.argmax.n_photons,
            "residual_history": self.residual_history,
            "rayleigh_history": self.rayleigh_history,
        }


def _unit(t: np.ndarray, w: np.ndarray) -> np.ndarray:
    n2 = weighted_norm2(t, w)
    return t / math.sqrt(n2) if n2 > 0 else t


def power_iteration(
    op: RateOperator,
    seed: int = 0,
    max_iters: int = 1000,
    residual_tol: float = 1e-10,
    degeneracy_tol: float = 1e-6,
) -> OptimizationResult:
    """Top eigenpair of the rate operator.

    Iterates ``phi <- normalize(symmetrize(A phi))`` from
    ``random_symmetric_state(seed)`` until ``||A phi - lam phi|| <=
    residual_tol * lam``.  A companion vector, kept orthogonal to ``phi``,
    estimates the second Ritz value; the top eigenvalue is flagged
    degenerate when the two agree to ``degeneracy_tol`` relative.
    """
    w = op.grid.weights
    start = random_symmetric_state(op.grid, op.n_photons, seed)
    phi = start.values
    if op.m_photons > op.n_photons:
        return OptimizationResult(0.0, start, 0, 0.0, rank_one_defect(start)
                                  if op.n_photons >= 2 else 0.0)

    psi = random_symmetric_state(op.grid, op.n_photons, seed + 1).values
    residuals, rayleighs = [], []
    lam = mu = 0.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        y = apply_operator(op, phi)
        lam = weighted_inner(phi, y, w).real
        res = math.sqrt(weighted_norm2(y - lam * phi, w))
        rel = res / lam if lam > 0 else res
        if rayleighs and lam < rayleighs[-1] * (1.0 - 1e-12):
            raise ConvergenceError(
                f"Rayleigh quotient decreased at iteration {it}: "
                f"{rayleighs[-1]!r} -> {lam!r}",
                history=residuals,
            )
        residuals.append(rel)
        rayleighs.append(lam)

        psi = psi - weighted_inner(phi, psi, w) * phi
        psi = _unit(psi, w)
        z = apply_operator(op, psi)
        mu = weighted_inner(psi, z, w).real
        if rel <= residual_tol:
            converged = True
            break
        phi = _unit(symmetrize_tensor(y), w)
        psi = symmetrize_tensor(z)

    if not converged:
        raise ConvergenceError(
            f"power iteration stopped after {max_iters} iterations with "
            f"relative residual {residuals[-1]:.3e} > {residual_tol:.1e}",
            history=residuals,
        )

    argmax = FockAmplitude(op.grid, op.n_photons, values=phi)
    defect = rank_one_defect(argmax) if op.n_photons >= 2 else 0.0
    return OptimizationResult(
        max_rate=lam,
        argmax=argmax,
        iterations=it,
        residual=residuals[-1],
        rank_one_defect=defect,
        residual_history=residuals,
        rayleigh_history=rayleighs,
        second_ritz=mu,
        degenerate=bool(lam > 0 and abs(lam - mu) <= degeneracy_tol * lam),
    )


def _contract_except(t: np.ndarray, vecs: list[np.ndarray], keep: int) -> np.ndarray:
    for j in reversed(range(t.ndim)):
        if j != keep:
            t = np.tensordot(t, np.conj(vecs[j]), axes=(j, 0))
    return t


def rank_one_defect(amplitude: FockAmplitude, tol: float = 1e-15, max_iters: int = 2000) -> float:
    """``1 - |<u1 x ... x uN | phi>|^2`` for the best product approximation.

    Alternating single-slot maximization (higher-order power method) in
    orthonormal coordinates ``sqrt(W) phi``.  Zero means the amplitude
    factorizes, i.e. describes a coherent field.
    """
    n = amplitude.n_photons
    if n < 2:
        raise ValueError("rank-one defect needs at least two photons")
    sw = np.sqrt(amplitude.grid.weights)
    psi = amplitude.dense()
    for ax in range(n):
        shape = [1] * n
        shape[ax] = -1
        psi = psi * sw.reshape(shape)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("zero amplitude has no rank-one approximation")
    psi = psi / norm

    unfold = psi.reshape(psi.shape[0], -1)
    col = unfold[:, np.argmax(np.sum(np.abs(unfold) ** 2, axis=0))]
    u = col / np.linalg.norm(col)
    vecs = [u.copy() for _ in range(n)]

    trace = []
    overlap = 0.0
    for _ in range(max_iters):
        for k in range(n):
            v = _contract_except(psi, vecs, k)
            nv = np.linalg.norm(v)
            if nv == 0:
                raise ConvergenceError("alternating update collapsed to zero", history=trace)
            vecs[k] = v / nv
        new = float(nv)
        trace.append(new)
        if abs(new - overlap) <= tol:
            return min(1.0, max(0.0, 1.0 - new**2))
        overlap = new
    raise ConvergenceError(
        f"rank-one alternating scheme did not settle in {max_iters} sweeps", history=trace
    )
