"""Elastic, gravity, and film energies plus the parameter basis."""

import math

import numpy as np
import pytest

from conftest import hopf_link, ring_link
from kplateau.energy import (
    ElasticDensity,
    ParameterBasis,
    elastic_energy,
    film_energy,
    gravity_energy,
    loop_energy,
    loop_energy_gradient,
    realize,
    total_energy,
)
from kplateau.errors import InvalidInput
from kplateau.mesh import TriMesh
from kplateau.rod import CrossSection, DensityField, FramedCurve, constant_density

ED = ElasticDensity(1.0, 2.0, 0.5)


def test_circle_energy_closed_form():
    for R, a1 in ((1.0, 1.0), (2.0, 3.5), (0.5, 0.2)):
        df = constant_density(2 * np.pi * R, 256, kappa1=1.0 / R)
        ed = ElasticDensity(a1, 1.0, 1.0)
        e = elastic_energy(df, ed, CrossSection(0.01))
        assert abs(e - np.pi * a1 / R) / (np.pi * a1 / R) < 1e-6


def test_gravity_energy_tracks_height():
    link = ring_link(rho=0.7, gravity=(0.0, 0.0, -2.0))
    fc = realize(link)[0]
    assert abs(gravity_energy(fc, 0.7, link.gravity)) < 1e-9
    lifted = fc.r + np.array([0.0, 0.0, 1.3])
    fc_up = FramedCurve(fc.h, lifted, fc.frames)
    expect = 0.7 * 2.0 * 1.3 * fc.length
    assert abs(gravity_energy(fc_up, 0.7, link.gravity) - expect) / expect < 1e-12


def test_film_energy_two_sided():
    square = TriMesh.free(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]),
        np.array([[0, 1, 2], [0, 2, 3]]),
    )
    assert abs(film_energy(square, 0.25) - 0.5) < 1e-12
    assert film_energy(1.0, 0.25) == 0.5
    with pytest.raises(InvalidInput):
        film_energy(square, -0.1)


def test_coercivity_witnesses():
    rng = np.random.default_rng(42)
    L, n = 2.0, 64
    h = L / (n - 1)
    alpha = 0.5 * min(ED.a1, ED.a2, ED.a3)
    cs = CrossSection(1e-4)
    for _ in range(10_000):
        k1, k2, tw = rng.normal(scale=2.0, size=(3, n))
        df = DensityField(L, k1, k2, tw)
        e = elastic_energy(df, ED, cs)
        sq = k1**2 + k2**2 + tw**2
        norm_sq = h * (0.5 * (sq[0] + sq[-1]) + sq[1:-1].sum())
        assert e >= alpha * norm_sq - 1e-12


def test_midpoint_convexity_witnesses():
    rng = np.random.default_rng(43)
    L, n = 2.0, 64
    cs = CrossSection(1e-4)
    for _ in range(10_000):
        fa = rng.normal(scale=2.0, size=(3, n))
        fb = rng.normal(scale=2.0, size=(3, n))
        ea = elastic_energy(DensityField(L, *fa), ED, cs)
        eb = elastic_energy(DensityField(L, *fb), ED, cs)
        em = elastic_energy(DensityField(L, *(0.5 * (fa + fb))), ED, cs)
        assert em <= 0.5 * (ea + eb) + 1e-12


def test_barrier_diverges_at_unit_margin():
    ed = ElasticDensity(1.0, 1.0, 1.0, barrier_eps=0.1)
    df = constant_density(2 * np.pi, 64, kappa1=1.0)
    energies = [elastic_energy(df, ed, CrossSection(a)) for a in (0.5, 0.9, 0.99, 0.999)]
    assert all(b > a for a, b in zip(energies, energies[1:]))
    assert energies[-1] > 50.0
    assert elastic_energy(df, ed, CrossSection(1.0)) == math.inf
    assert elastic_energy(df, ed, CrossSection(1.2)) == math.inf


def test_total_energy_components_sum():
    link = hopf_link(rho=(0.1, 0.3), gravity=(0.0, 0.0, -1.0))
    ed1 = ElasticDensity(2.0, 2.0, 2.0)
    ed2 = ElasticDensity(0.5, 0.5, 0.5)
    square = TriMesh.free(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]),
        np.array([[0, 1, 2], [0, 2, 3]]),
    )
    rep = total_energy(link, ed1, ed2, sigma=0.3, mesh=square)
    parts = rep.e_el1 + rep.e_el2 + rep.e_g1 + rep.e_g2 + rep.e_film
    assert abs(rep.e_total - parts) < 1e-12
    assert abs(rep.e_film - 0.6) < 1e-12
    assert not rep.barrier_active


def test_loop_energy_matches_total_without_film():
    link = hopf_link(rho=(0.1, 0.3), gravity=(0.0, 0.0, -1.0))
    ed1 = ElasticDensity(2.0, 2.0, 2.0)
    ed2 = ElasticDensity(0.5, 0.5, 0.5)
    rep = total_energy(link, ed1, ed2)
    assert abs(loop_energy(link, ed1, ed2) - rep.e_total) < 1e-12


def test_parameter_basis_round_trip():
    link = hopf_link()
    basis = ParameterBasis(link, harmonics=2)
    theta = basis.encode(link)
    assert theta.shape == (basis.param_count,)
    back = basis.decode(theta, link)
    for df_a, df_b in zip((link.rod1[0], link.rod2[0]), (back.rod1[0], back.rod2[0])):
        assert np.allclose(df_a.kappa1, df_b.kappa1, atol=1e-10)
        assert np.allclose(df_a.kappa2, df_b.kappa2, atol=1e-10)
        assert np.allclose(df_a.twist, df_b.twist, atol=1e-10)
    assert np.allclose(theta[-6:], 0.0)


def test_parameter_basis_placement_offsets():
    link = hopf_link()
    basis = ParameterBasis(link, harmonics=1)
    theta = basis.encode(link)
    theta[-6:-3] = np.array([0.1, -0.2, 0.05])
    moved = basis.decode(theta, link)
    r_base = realize(link)[1].r
    r_moved = realize(moved)[1].r
    assert np.allclose(r_moved - r_base, np.array([0.1, -0.2, 0.05]), atol=1e-9)


def test_circle_gradient_is_single_spike():
    # energy is exactly quadratic in the coefficients, so the only nonzero
    # entry sits on the constant kappa1 coefficient with value a1 * L
    link = ring_link(a=0.01)
    ed = ElasticDensity(1.0, 1.0, 1.0)
    basis = ParameterBasis(link, harmonics=1)
    grad = loop_energy_gradient(link, ed, None, basis=basis)
    assert grad.shape == (basis.param_count,)
    assert abs(grad[0] - 2.0 * np.pi) < 1e-5
    assert np.max(np.abs(grad[1:])) < 1e-5
