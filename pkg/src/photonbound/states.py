"""N-photon momentum amplitudes and photon-number superpositions.

Amplitudes hold raw values at grid nodes.  Quadrature weights enter only
through inner products, so the discrete norm of an ``N``-photon tensor is::

    sum_{m1..mN} w[m1] ... w[mN] |phi[m1, ..., mN]|^2

Coherent (factorized) amplitudes are kept in product form, a single-mode
vector ``f`` plus the photon number, and never densified unless asked.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import poisson

from .errors import DegenerateStateError, SizeLimitError, TruncationError
from .modes import Direction, ModeGrid, build_grid, coupling_vector

# Element budget for dense tensors: N <= 3 photons at K <= 256 modes.
MAX_DENSE_ELEMENTS = 256**3

STATE_FORMAT = "photonbound.state"
STATE_FORMAT_VERSION = 1


def check_dense_size(k: int, n: int, limit: int = MAX_DENSE_ELEMENTS) -> None:
    requested = k**n
    if requested > limit:
        raise SizeLimitError(
            f"dense {n}-photon tensor over {k} modes needs {requested} elements, "
            f"limit is {limit}",
            limit=limit,
            requested=requested,
        )


def weighted_norm2(values: np.ndarray, weights: np.ndarray) -> float:
    """Discrete norm squared, reducing one tensor axis at a time."""
    s = values.real**2 + values.imag**2
    for _ in range(values.ndim):
        s = np.tensordot(weights, s, axes=(0, 0))
    return float(s)


def weighted_inner(a: np.ndarray, b: np.ndarray, weights: np.ndarray) -> complex:
    """``<a|b>`` with the product weight on every axis (antilinear in ``a``)."""
    s = np.conj(a) * b
    for _ in range(a.ndim):
        s = np.tensordot(weights, s, axes=(0, 0))
    return complex(s)


@dataclass(frozen=True, eq=False)
class SingleModeFunction:
    grid: ModeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    def norm2(self) -> float:
        return float(np.sum(self.grid.weights * np.abs(self.values) ** 2))

    def normalized(self) -> SingleModeFunction:
        n2 = self.norm2()
        if n2 == 0:
            raise DegenerateStateError("single-mode function is identically zero")
        return SingleModeFunction(self.grid, self.values / math.sqrt(n2))


@dataclass(frozen=True, eq=False)
class FockAmplitude:
    """Discretized ``N``-photon amplitude, either dense or in product form.

    Exactly one of ``values`` (rank-``N`` tensor, shape ``(K,)*N``) and
    ``factor`` (length-``K`` vector ``f`` with ``phi = f x f x ... x f``)
    is set.
    """

    grid: ModeGrid
    n_photons: int
    values: np.ndarray | None = None
    factor: np.ndarray | None = None

    def __post_init__(self):
        if self.n_photons < 0:
            raise ValueError("photon number must be non-negative")
        if (self.values is None) == (self.factor is None):
            raise ValueError("give exactly one of values or factor")
        k = self.grid.size
        if self.values is not None:
            v = np.asarray(self.values, dtype=complex)
            if v.shape != (k,) * self.n_photons:
                raise ValueError(
                    f"tensor shape {v.shape} does not match N={self.n_photons}, K={k}"
                )
            object.__setattr__(self, "values", v)
        else:
            f = np.asarray(self.factor, dtype=complex)
            if f.shape != (k,):
                raise ValueError(f"factor must have shape ({k},), got {f.shape}")
            object.__setattr__(self, "factor", f)

    @classmethod
    def product(cls, grid: ModeGrid, factor, n_photons: int) -> FockAmplitude:
        return cls(grid, n_photons, factor=factor)

    @property
    def is_product(self) -> bool:
        return self.factor is not None

    def dense(self, limit: int = MAX_DENSE_ELEMENTS) -> np.ndarray:
        if not self.is_product:
            return self.values
        check_dense_size(self.grid.size, self.n_photons, limit)
        t = np.ones((), dtype=complex)
        for _ in range(self.n_photons):
            t = np.multiply.outer(t, self.factor)
        return t

    def to_dense(self, limit: int = MAX_DENSE_ELEMENTS) -> FockAmplitude:
        return FockAmplitude(self.grid, self.n_photons, values=self.dense(limit))

    def norm2(self) -> float:
        if self.is_product:
            f2 = float(np.sum(self.grid.weights * np.abs(self.factor) ** 2))
            return f2**self.n_photons
        return weighted_norm2(self.values, self.grid.weights)

    def scaled(self, c: complex) -> FockAmplitude:
        if self.is_product:
            if self.n_photons == 0:
                return self
            root = complex(c) ** (1.0 / self.n_photons)
            return FockAmplitude.product(self.grid, self.factor * root, self.n_photons)
        return FockAmplitude(self.grid, self.n_photons, values=self.values * c)


@dataclass(frozen=True, eq=False)
class LightState:
    """Superposition ``sum_N C_N |N>`` with distinct photon numbers."""

    grid: ModeGrid
    components: tuple[tuple[complex, FockAmplitude], ...] = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple((complex(c), a) for c, a in self.components)
        ns = [a.n_photons for _, a in comps]
        if len(set(ns)) != len(ns):
            raise ValueError(f"photon numbers must be distinct, got {ns}")
        for _, a in comps:
            if not a.grid.same_as(self.grid):
                raise ValueError("component amplitude lives on a different grid")
        total = sum(abs(c) ** 2 for c, _ in comps)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"sum |C_N|^2 = {total!r}, expected 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_components(cls, grid: ModeGrid, components: Iterable, normalize: bool = True):
        comps = [(complex(c), a) for c, a in components if c != 0]
        if normalize:
            total = math.sqrt(sum(abs(c) ** 2 for c, _ in comps))
            if total == 0:
                raise DegenerateStateError("all photon-number coefficients vanish")
            comps = [(c / total, a) for c, a in comps]
        return cls(grid, tuple(comps))

    @property
    def photon_numbers(self) -> list[int]:
        return [a.n_photons for _, a in self.components]

    def probabilities(self) -> dict[int, float]:
        return {a.n_photons: abs(c) ** 2 for c, a in self.components}


def fock_state(amplitude: FockAmplitude) -> LightState:
    return LightState(amplitude.grid, ((1.0, amplitude),))


def vacuum(grid: ModeGrid) -> LightState:
    return fock_state(FockAmplitude(grid, 0, values=np.ones((), dtype=complex)))


def normalize(amplitude: FockAmplitude) -> FockAmplitude:
    n2 = amplitude.norm2()
    if not n2 > 0:
        raise DegenerateStateError(
            f"{amplitude.n_photons}-photon amplitude has zero norm"
        )
    return amplitude.scaled(1.0 / math.sqrt(n2))


def symmetrize_tensor(t: np.ndarray) -> np.ndarray:
    """Average of ``t`` over every permutation of its axes."""
    if t.ndim < 2:
        return t.copy()
    acc = np.zeros_like(t)
    perms = list(itertools.permutations(range(t.ndim)))
    for perm in perms:
        acc += t.transpose(perm)
    return acc / len(perms)


def symmetrize(amplitude: FockAmplitude) -> FockAmplitude:
    """Bosonic projection followed by renormalization."""
    if amplitude.n_photons < 1:
        raise ValueError("symmetrization needs at least one photon")
    if amplitude.is_product:
        return normalize(amplitude)
    sym = FockAmplitude(
        amplitude.grid, amplitude.n_photons, values=symmetrize_tensor(amplitude.values)
    )
    if sym.norm2() <= 1e-28 * max(amplitude.norm2(), 1e-300):
        raise DegenerateStateError("amplitude has no bosonic (symmetric) part")
    return normalize(sym)


def coherent_amplitude(f: SingleModeFunction, n_photons: int) -> FockAmplitude:
    """Factorized amplitude ``prod_n f(mode_n)``, normalized, in product form."""
    if n_photons < 0:
        raise ValueError("photon number must be non-negative")
    f = f.normalized()
    return FockAmplitude.product(f.grid, f.values, n_photons)


def optimal_coherent_mode(grid: ModeGrid, p: Direction) -> SingleModeFunction:
    """Single-photon factor proportional to the conjugated coupling weight."""
    return SingleModeFunction(grid, np.conj(coupling_vector(grid, p))).normalized()


def poisson_cutoff(mean_photons: float, tail: float = 1e-16) -> int:
    """Smallest cutoff whose discarded Poisson tail is below ``tail``."""
    n = int(math.ceil(mean_photons))
    while poisson.sf(n, mean_photons) >= tail:
        n += 1
    return n


def poisson_superposition(
    f: SingleModeFunction, mean_photons: float, cutoff: int | None = None
) -> LightState:
    """Coherent field with Poissonian photon-number amplitudes.

    ``C_N = exp(-nbar/2) nbar^(N/2) / sqrt(N!)`` for ``N <= cutoff``,
    renormalized.  Raises :class:`TruncationError` when the discarded tail
    probability is ``>= 1e-12``.  The default cutoff drops less than
    ``1e-16``, which keeps factorial moments up to third order accurate to
    about ``1e-12``.
    """
    if not mean_photons > 0:
        raise ValueError("mean photon number must be positive")
    if cutoff is None:
        cutoff = poisson_cutoff(mean_photons)
    tail = float(poisson.sf(cutoff, mean_photons))
    if tail >= 1e-12:
        raise TruncationError(
            f"cutoff {cutoff} drops probability {tail:.3e} for mean {mean_photons}"
        )
    f = f.normalized()
    log_nbar = math.log(mean_photons)
    comps = []
    for n in range(cutoff + 1):
        c = math.exp(0.5 * (n * log_nbar - mean_photons - math.lgamma(n + 1)))
        comps.append((c, coherent_amplitude(f, n)))
    return LightState.from_components(f.grid, comps)


def random_symmetric_state(
    grid: ModeGrid, n_photons: int, seed: int, limit: int = MAX_DENSE_ELEMENTS
) -> FockAmplitude:
    """Complex Gaussian tensor, symmetrized and normalized; deterministic in ``seed``."""
    check_dense_size(grid.size, n_photons, limit)
    rng = np.random.default_rng(seed)
    shape = (grid.size,) * n_photons
    t = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    amp = FockAmplitude(grid, n_photons, values=t)
    if n_photons == 0:
        return normalize(amp)
    return symmetrize(amp)


def basis_vector(grid: ModeGrid, index: int) -> np.ndarray:
    """Unit-norm single-photon function concentrated on one mode."""
    e = np.zeros(grid.size, dtype=complex)
    e[index] = 1.0 / math.sqrt(grid.weights[index])
    return e


def noon_amplitude(grid: ModeGrid, a: int, b: int, n_photons: int) -> FockAmplitude:
    """``(|N,0> + |0,N>)/sqrt(2)`` on modes ``a`` and ``b``."""
    if a == b:
        raise ValueError("NOON state needs two distinct modes")
    ea, eb = basis_vector(grid, a), basis_vector(grid, b)
    ta = FockAmplitude.product(grid, ea, n_photons).dense()
    tb = FockAmplitude.product(grid, eb, n_photons).dense()
    return normalize(FockAmplitude(grid, n_photons, values=ta + tb))


def two_mode_coherent_mode(grid: ModeGrid, a: int, b: int) -> SingleModeFunction:
    return SingleModeFunction(grid, basis_vector(grid, a) + basis_vector(grid, b)).normalized()


# --- serialization ---------------------------------------------------------


def _pairs(a: np.ndarray) -> list[list[float]]:
    flat = np.asarray(a, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in flat]


def _from_pairs(pairs: Sequence) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    out = np.empty(len(arr), dtype=complex)
    out.real, out.imag = arr[:, 0], arr[:, 1]  # keeps signed zeros
    return out


def amplitude_to_dict(amp: FockAmplitude) -> dict:
    d = {"n_photons": amp.n_photons}
    if amp.is_product:
        d["form"] = "product"
        d["factor"] = _pairs(amp.factor)
    else:
        d["form"] = "tensor"
        d["values"] = _pairs(amp.values)
    return d


def amplitude_from_dict(grid: ModeGrid, d: dict) -> FockAmplitude:
    n = int(d["n_photons"])
    form = d.get("form", "tensor")
    if form == "product":
        return FockAmplitude.product(grid, _from_pairs(d["factor"]), n)
    if form == "tensor":
        check_dense_size(grid.size, n)
        values = _from_pairs(d["values"]).reshape((grid.size,) * n)
        return FockAmplitude(grid, n, values=values)
    raise ValueError(f"unknown amplitude form {form!r}")


def state_to_dict(state: LightState) -> dict:
    return {
        "format": STATE_FORMAT,
        "version": STATE_FORMAT_VERSION,
        "grid": state.grid.to_dict(include_nodes=False),
        "components": [
            {"coefficient": [c.real, c.imag], **amplitude_to_dict(a)}
            for c, a in state.components
        ],
    }


def state_from_dict(d: dict) -> LightState:
    if d.get("format") != STATE_FORMAT:
        raise ValueError(f"not a {STATE_FORMAT} document")
    if d.get("version") != STATE_FORMAT_VERSION:
        raise ValueError(f"unsupported state format version {d.get('version')!r}")
    grid = build_grid(int(d["grid"]["n_alpha"]), int(d["grid"]["n_beta"]))
    comps = []
    for c in d["components"]:
        coef = complex(c["coefficient"][0], c["coefficient"][1])
        comps.append((coef, amplitude_from_dict(grid, c)))
    return LightState(grid, tuple(comps))


def state_digest(state: LightState) -> str:
    """Short content hash used to name offending states in error reports."""
    blob = json.dumps(state_to_dict(state), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
