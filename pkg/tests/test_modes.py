import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photonbound.modes import (
    ANGULAR_INTEGRAL_EXACT,
    Direction,
    Mode,
    X_HAT,
    Z_HAT,
    angular_weight_integral,
    build_grid,
    coupling_vector,
    coupling_weight,
    polarization,
    polarizations,
)

modes_st = st.builds(
    Mode,
    alpha=st.floats(0.0, 0.999999),
    beta=st.floats(0.0, 2 * math.pi, exclude_max=True),
    gamma=st.sampled_from([1, -1]),
    sigma=st.sampled_from(["s", "p"]),
)


def test_build_grid_counts():
    g = build_grid(1, 1)
    assert g.size == 4
    assert len(g.modes) == 4
    g = build_grid(3, 5)
    assert g.size == len(g.modes) == len(g.weights) == 3 * 5 * 2 * 2
    assert np.all(g.weights > 0)
    assert np.all(g.alpha < 1) and np.all(g.alpha > 0)


@pytest.mark.parametrize("na, nb", [(0, 1), (1, 0), (-2, 3)])
def test_build_grid_rejects_empty(na, nb):
    with pytest.raises(ValueError):
        build_grid(na, nb)


def test_constant_integrand():
    g = build_grid(32, 32)
    assert abs(g.weights.sum() - 8 * math.pi) < 1e-10


def test_mode_ordering_is_lexicographic():
    g = build_grid(3, 4)
    keys = [(m.alpha, m.beta, -m.gamma, "sp".index(m.sigma)) for m in g.modes]
    assert keys == sorted(keys)
    i = g.index(2, 3, -1, "p")
    m = g.modes[i]
    assert (m.gamma, m.sigma) == (-1, "p")
    assert m.beta == pytest.approx(2 * math.pi * 3 / 4)


@pytest.mark.parametrize("k", [0, 1, 2, 5])
@pytest.mark.parametrize("j", [0, 1, 3])
def test_quadrature_polynomial_times_trig(k, j):
    # int_0^1 a^k da * int cos(j b)^2 db, summed over gamma and sigma
    g = build_grid(32, 16)
    f = g.alpha**k * np.cos(j * g.beta) ** 2 * np.where(g.gamma > 0, 1.0, 2.0)
    exact = (1.0 / (k + 1)) * (2 * math.pi if j == 0 else math.pi) * (1 + 2) * 2
    assert abs(np.sum(g.weights * f) - exact) < 1e-10


def test_quadrature_random_trig_polynomials(rng):
    g = build_grid(32, 16)
    for _ in range(20):
        c = rng.standard_normal(4)
        s = rng.standard_normal(3)
        deg = rng.integers(0, 6)
        f = g.alpha**deg * (c[0] + c[1] * np.cos(g.beta) + c[2] * np.sin(2 * g.beta)
                            + c[3] * np.cos(5 * g.beta))
        f = f * (s[0] + s[1] * (g.sigma == 1) + s[2] * (g.gamma < 0))
        exact = (1 / (deg + 1)) * 2 * math.pi * c[0] * (4 * s[0] + 2 * s[1] + 2 * s[2])
        assert abs(np.sum(g.weights * f) - exact) < 1e-10


def test_polarization_at_beta_zero():
    np.testing.assert_allclose(polarization(Mode(0.3, 0.0, 1, "s")), [0, 1, 0], atol=0)


@given(modes_st)
def test_polarization_unit_norm(m):
    assert abs(np.linalg.norm(polarization(m)) - 1) < 1e-12


@given(modes_st)
def test_polarization_orthogonal_and_transverse(m):
    es = polarization(Mode(m.alpha, m.beta, m.gamma, "s"))
    ep = polarization(Mode(m.alpha, m.beta, m.gamma, "p"))
    k = np.array([m.alpha * math.cos(m.beta), m.alpha * math.sin(m.beta), m.gamma * m.cos_theta])
    assert abs(es @ ep) < 1e-12
    assert abs(es @ k) < 1e-12
    assert abs(ep @ k) < 1e-12


@given(modes_st, st.floats(0, 2 * math.pi))
def test_cartesian_matches_cylindrical_basis(m, phi):
    # eps written on (rho_hat, phi_hat, z_hat) at observation azimuth phi
    d = m.beta - phi
    rho_hat = np.array([math.cos(phi), math.sin(phi), 0.0])
    phi_hat = np.array([-math.sin(phi), math.cos(phi), 0.0])
    z_hat = np.array([0.0, 0.0, 1.0])
    if m.sigma == "s":
        cyl = -math.sin(d) * rho_hat + math.cos(d) * phi_hat
    else:
        c = -m.gamma * math.sqrt(1 - m.alpha**2)
        cyl = c * (math.cos(d) * rho_hat + math.sin(d) * phi_hat) + m.alpha * z_hat
    np.testing.assert_allclose(polarization(m), cyl, atol=1e-12)


def test_vectorized_polarizations_match_scalar():
    g = build_grid(3, 5)
    eps = polarizations(g)
    for i, m in enumerate(g.modes):
        np.testing.assert_allclose(eps[i], polarization(m), atol=1e-15)


def test_coupling_vanishes_at_normal_incidence(rng):
    p = Direction.random(rng)
    for sigma in "sp":
        assert coupling_weight(Mode(0.0, 1.0, 1, sigma), p) == 0


@given(modes_st)
def test_coupling_s_modes_blind_to_z(m):
    assert coupling_weight(Mode(m.alpha, m.beta, m.gamma, "s"), Z_HAT) == 0


def test_coupling_closed_form():
    a = math.sin(math.pi / 4)
    expected = math.tan(math.pi / 4) ** 0.5 * math.sin(math.pi / 4)
    assert abs(coupling_weight(Mode(a, 0.0, 1, "p"), Z_HAT) - expected) < 1e-15
    assert abs(expected - 1 / math.sqrt(2)) < 1e-15


def test_coupling_vector_matches_scalar(rng):
    g = build_grid(4, 6)
    p = Direction.random(rng)
    gv = coupling_vector(g, p)
    for i, m in enumerate(g.modes):
        assert abs(gv[i] - coupling_weight(m, p)) < 1e-14
    assert np.all(np.isfinite(gv))


def _angular_integral_2d(p, n=400):
    """Midpoint rule in (theta, beta) at much higher resolution than the grid."""
    th = (np.arange(n) + 0.5) * (math.pi / 2) / n
    be = (np.arange(n) + 0.5) * (2 * math.pi) / n
    T, B = np.meshgrid(th, be, indexing="ij")
    total = 0.0
    pv = p.vector
    for gamma in (1, -1):
        es = np.stack([-np.sin(B), np.cos(B), 0 * B], -1)
        ep = np.stack([-gamma * np.cos(T) * np.cos(B), -gamma * np.cos(T) * np.sin(B), np.sin(T)], -1)
        for e in (es, ep):
            total += np.sum(np.sin(T) * np.abs(e @ pv) ** 2)
    return total * (math.pi / 2 / n) * (2 * math.pi / n)


@pytest.mark.parametrize(
    "p", [Z_HAT, X_HAT, Direction.from_vector([1, 1j, 0])], ids=["z", "x", "circular"]
)
def test_angular_weight_integral(p):
    g = build_grid(32, 16)
    value = angular_weight_integral(g, p)
    assert abs(value - ANGULAR_INTEGRAL_EXACT) < 1e-10
    assert abs(_angular_integral_2d(p) - ANGULAR_INTEGRAL_EXACT) < 1e-4


def test_angular_weight_integral_direction_independent(rng):
    g = build_grid(32, 16)
    values = [angular_weight_integral(g, Direction.random(rng, complex_valued=bool(i % 2)))
              for i in range(24)]
    assert np.ptp(values) < 1e-12


def test_direction_requires_unit_norm():
    with pytest.raises(ValueError):
        Direction(1, 1, 0)
    d = Direction.from_vector([3, 4j, 0])
    assert abs(abs(d.x) ** 2 + abs(d.y) ** 2 - 1) < 1e-12


@pytest.mark.parametrize("bad", [dict(alpha=1.0), dict(alpha=-0.1), dict(beta=2 * math.pi),
                                 dict(gamma=0), dict(sigma="q")])
def test_mode_invariants(bad):
    kw = dict(alpha=0.5, beta=0.1, gamma=1, sigma="s")
    kw.update(bad)
    with pytest.raises(ValueError):
        Mode(**kw)


def test_grid_json_round_trip():
    g = build_grid(3, 4)
    d = json.loads(json.dumps(g.to_dict()))
    assert len(d["modes"]) == g.size
    assert [w for w in d["weights"]] == [float(w) for w in g.weights]
    assert d["modes"][5]["alpha"] == float(g.alpha[5])
    assert g.from_dict(d).same_as(g)


def test_grid_arrays_read_only():
    g = build_grid(2, 2)
    with pytest.raises(ValueError):
        g.weights[0] = 1.0
