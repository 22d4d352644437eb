"""Linking numbers, writhe, twist, self-linking, probes, certificates."""

import numpy as np
import pytest

from conftest import circle_curve, circle_points, random_rotation
from kplateau.errors import KPlateauError, OffsetTooLarge
from kplateau.rod import (
    CrossSection,
    DensityField,
    Frame,
    FramedCurve,
    Placement,
    constant_density,
    integrate_frame,
)
from kplateau.topology import (
    ClosedPolyline,
    InvariantRecord,
    crossing_linking_number,
    gauss_linking_number,
    hausdorff_distance,
    make_probe_family,
    min_polyline_distance,
    self_linking,
    spanning_certificate,
    total_twist,
    writhe,
)


def torus_double_loop(rho, n=460):
    """(1,2) curve on the torus around the unit circle; links the core twice."""
    t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return np.stack(
        [
            (1.0 + rho * np.cos(2 * t)) * np.cos(t),
            (1.0 + rho * np.cos(2 * t)) * np.sin(t),
            rho * np.sin(2 * t),
        ],
        axis=1,
    )


def random_pair(rng):
    """Disjoint closed-curve pair with a known linking number."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        c1 = circle_points(220, radius=rng.uniform(0.5, 1.5))
        c2 = circle_points(220, radius=rng.uniform(0.5, 1.5), plane="xz")
        c2 = c2 @ random_rotation(rng).T
        c2 = c2 + np.array([4.0 + rng.uniform(0.0, 2.0), 0.0, 0.0])
        lk = 0
    elif kind == 1:
        r1 = rng.uniform(0.7, 1.3)
        c1 = circle_points(220, radius=r1)
        c2 = circle_points(220, radius=rng.uniform(0.7, 1.3), center=(r1, 0.0, 0.0), plane="xz")
        lk = -1
    else:
        c1 = circle_points(220)
        c2 = torus_double_loop(rng.uniform(0.2, 0.45))
        lk = -2
    rot = random_rotation(rng)
    shift = rng.normal(size=3) * 2.0
    scale = rng.uniform(0.6, 1.6)
    c1 = scale * (c1 @ rot.T) + shift
    c2 = scale * (c2 @ rot.T) + shift
    if rng.uniform() < 0.5:
        c2 = c2[::-1].copy()
        lk = -lk
    return c1, c2, lk


def random_framed_loop(rng, nn=700):
    """Closed framed loop: perturbed circle, projected frame, integer winds."""
    t = np.linspace(0.0, 2.0 * np.pi, 4001)
    pts = np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)
    for k in (2, 3, 4):
        amp = rng.uniform(0.04, 0.12, size=3)
        phase = rng.uniform(0.0, 2.0 * np.pi, size=3)
        pts = pts + amp * np.cos(k * t[:, None] + phase)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    se = np.linspace(0.0, cum[-1], nn)
    r = np.stack([np.interp(se, cum, pts[:, k]) for k in range(3)], axis=1)
    r[-1] = r[0]
    w = np.zeros((nn, 3))
    w[1:-1] = r[2:] - r[:-2]
    w[0] = r[1] - r[-2]
    w[-1] = w[0]
    w /= np.linalg.norm(w, axis=1, keepdims=True)
    g = np.array([rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 1.0])
    u = g - (w @ g)[:, None] * w
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    winds = int(rng.integers(-2, 3))
    ang = winds * 2.0 * np.pi * se / cum[-1]
    v = np.cross(w, u)
    u = np.cos(ang)[:, None] * u + np.sin(ang)[:, None] * v
    v = np.cross(w, u)
    return FramedCurve(cum[-1] / (nn - 1), r, np.stack([u, v, w], axis=1))


def test_hopf_pair_links_once():
    c1 = circle_points(256)
    c2 = circle_points(256, center=(1.0, 0.0, 0.0), plane="xz")
    g = gauss_linking_number(c1, c2)
    assert abs(abs(g) - 1.0) < 1e-6
    assert crossing_linking_number(c1, c2) == round(g)


def test_reversal_flips_sign():
    c1 = circle_points(256)
    c2 = circle_points(256, center=(1.0, 0.0, 0.0), plane="xz")
    g = gauss_linking_number(c1, c2)
    g_rev = gauss_linking_number(c1[::-1].copy(), c2)
    assert abs(g + g_rev) < 1e-9
    assert crossing_linking_number(c1[::-1].copy(), c2) == -crossing_linking_number(c1, c2)


def test_double_wrap_links_twice():
    c1 = circle_points(256)
    c2 = torus_double_loop(0.3, n=600)
    g = gauss_linking_number(c1, c2)
    assert abs(abs(g) - 2.0) < 1e-4
    assert crossing_linking_number(c1, c2) == round(g)


def test_far_apart_loops_unlinked():
    c1 = circle_points(128)
    c2 = circle_points(128, center=(5.0, 0.0, 0.0), plane="xz")
    assert abs(gauss_linking_number(c1, c2)) < 1e-6
    assert crossing_linking_number(c1, c2) == 0


def test_randomized_pairs_agree():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        c1, c2, lk = random_pair(rng)
        assert min_polyline_distance(c1, c2) > 0.0
        g = gauss_linking_number(c1, c2)
        assert abs(g - lk) < 1e-3
        assert crossing_linking_number(c1, c2) == lk


def test_framed_curves_accepted_directly():
    fc1, _ = circle_curve()
    fc2, _ = circle_curve(center=(5.0, 0.0, 0.0))
    assert crossing_linking_number(fc1, fc2) == 0


def test_writhe_of_plane_circle_vanishes():
    assert abs(writhe(circle_points(256))) < 1e-10


def test_writhe_mirror_antisymmetry():
    t = np.linspace(0.0, 2.0 * np.pi, 800, endpoint=False)
    tref = np.stack(
        [np.sin(t) + 2 * np.sin(2 * t), np.cos(t) - 2 * np.cos(2 * t), -np.sin(3 * t)],
        axis=1,
    )
    w = writhe(tref)
    w_mirror = writhe(tref * np.array([1.0, 1.0, -1.0]))
    assert abs(w) > 1.0
    assert abs(w + w_mirror) < 1e-12


def test_total_twist_of_uniform_rate():
    # twist density 1 per unit arclength over length 2*pi gives one turn
    pl = Placement(
        np.array([1.0, 0.0, 0.0]),
        Frame(np.array([-1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0])),
    )
    for m in (1, 2):
        df = constant_density(2 * np.pi, 512, kappa1=1.0, twist=m)
        fc = integrate_frame(df, pl)
        assert abs(total_twist(fc) - m) < 1e-4


def test_calugareanu_twisted_circles():
    # curvature vector counter-rotates against the frame twist, so the
    # midline stays a plane circle while the frame makes m turns
    pl = Placement(
        np.array([1.0, 0.0, 0.0]),
        Frame(np.array([-1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0])),
    )
    n, L = 1024, 2 * np.pi
    s = np.linspace(0.0, L, n)
    for m in (1, 2):
        df = DensityField(L, np.cos(m * s), -np.sin(m * s), np.full(n, float(m)))
        fc = integrate_frame(df, pl)
        sl = self_linking(fc, 0.02)
        assert sl == m
        assert sl == round(writhe(fc) + total_twist(fc))


def test_calugareanu_random_loops():
    rng = np.random.default_rng(7)
    for _ in range(10):
        fc = random_framed_loop(rng)
        sl = self_linking(fc, 0.02)
        assert sl == round(writhe(fc) + total_twist(fc))


def test_self_linking_rejects_fat_offset():
    # a push-off of two radii sweeps straight through the opposite side
    fc, _ = circle_curve(n=256)
    with pytest.raises(OffsetTooLarge):
        self_linking(fc, 2.0)


def test_invariant_record_equality():
    a = InvariantRecord(1, 0, 0)
    b = InvariantRecord(1, 0, 0)
    c = InvariantRecord(2, 0, 0)
    assert a == b
    assert a != c


def test_probe_family_tags_and_links():
    fc1, cs1 = circle_curve(a=0.05, n=192)
    df = constant_density(2 * np.pi, 192, kappa1=1.0)
    pl2 = Placement(
        np.array([2.0, 0.0, 0.0]),
        Frame(np.array([-1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, -1.0])),
    )
    fc2 = integrate_frame(df, pl2)
    cs2 = CrossSection(0.05)
    fam = make_probe_family(fc1, cs1, fc2, cs2, counts=6, want_d_class=True)
    tags = {loop.tag for loop in fam.loops}
    assert tags == {"around_rod1", "around_rod2", "d_class"}
    for loop in fam.by_tag("around_rod1"):
        assert abs(loop.lk_rod1) == 1 and loop.lk_rod2 == 0
    for loop in fam.by_tag("d_class"):
        assert abs(loop.lk_rod1) == 1 and abs(loop.lk_rod2) == 1


def test_probe_family_needs_linked_pair_for_d_class():
    fc1, cs1 = circle_curve(a=0.05)
    fc3, cs3 = circle_curve(a=0.05, center=(5.0, 0.0, 0.0))
    with pytest.raises(KPlateauError):
        make_probe_family(fc1, cs1, fc3, cs3, want_d_class=True)


def test_spanning_certificate_fails_on_empty_mesh():
    from kplateau.mesh import TriMesh

    fc1, cs1 = circle_curve(a=0.05)
    fam = make_probe_family(fc1, cs1)
    empty = TriMesh.free(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
    report = spanning_certificate(empty, fam)
    assert not report.passed


def test_hausdorff_distance_of_shifted_cloud():
    rng = np.random.default_rng(3)
    pts = rng.normal(size=(50, 3))
    shifted = pts + np.array([0.25, 0.0, 0.0])
    d = hausdorff_distance(pts, shifted)
    assert d <= 0.25 + 1e-12
    assert d > 0.0


def test_closed_polyline_validation():
    from kplateau.errors import InvalidInput

    with pytest.raises(InvalidInput):
        ClosedPolyline(np.zeros((2, 3)))
    pts = circle_points(16)
    loop = ClosedPolyline(pts)
    assert loop.n == 16
