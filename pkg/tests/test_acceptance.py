"""End-to-end acceptance run, one test per published criterion.

Run with -v for the per-criterion pass/fail lines; each test also prints its
headline numbers when it finishes.
"""

import math
import time

import numpy as np
from scipy.optimize import brentq

from conftest import RING_FRAME, circle_curve, hopf_link
from test_cli import MINI
from test_constraints import disk_lens_area, hairpin
from test_topology import random_framed_loop, random_pair

from kplateau import constraints as cn
from kplateau import film as fm
from kplateau.config import build_elastics, build_link, build_options, load_preset, parse_config
from kplateau.energy import ElasticDensity, elastic_energy, realize
from kplateau.io import export_mesh, export_trace
from kplateau.mesh import area
from kplateau.rod import (
    CrossSection,
    DensityField,
    Placement,
    closure_residual,
    constant_density,
    integrate_frame,
)
from kplateau.solver import SolveOptions, solve_kirchhoff_plateau
from kplateau.topology import (
    crossing_linking_number,
    gauss_linking_number,
    hausdorff_distance,
    make_probe_family,
    self_linking,
    spanning_certificate,
    total_twist,
    writhe,
)

CIRCLE_PLACEMENT = Placement(np.array([1.0, 0.0, 0.0]), RING_FRAME)


def test_criterion_1_circle_closure():
    t0 = time.monotonic()
    residuals = {}
    for n in (64, 128, 256, 512):
        fc = integrate_frame(constant_density(2 * np.pi, n, kappa1=1.0), CIRCLE_PLACEMENT)
        residuals[n] = closure_residual(fc)
    elapsed = time.monotonic() - t0
    pos512, tan512 = residuals[512]
    assert pos512 < 1e-8 and tan512 < 1e-8
    seq = np.array([residuals[n][0] for n in (64, 128, 256)])
    orders = np.log2(seq[:-1] / seq[1:])
    assert np.all(orders > 3.5)
    assert elapsed < 1.0
    print(f"criterion 1: PASS (residual {pos512:.2e}, orders {np.round(orders, 2)}, {elapsed * 1e3:.0f} ms)")


def test_criterion_2_linking_numbers_agree():
    t0 = time.monotonic()
    rng = np.random.default_rng(2025)
    seen = {0: 0, 1: 0, 2: 0}
    for _ in range(200):
        c1, c2, lk = random_pair(rng)
        g = gauss_linking_number(c1, c2)
        assert abs(g - lk) < 1e-3
        assert crossing_linking_number(c1, c2) == lk
        seen[abs(lk)] += 1
    elapsed = time.monotonic() - t0
    assert seen[1] > 0 and seen[2] > 0
    assert elapsed < 30.0
    print(f"criterion 2: PASS (200 pairs, families {seen}, {elapsed:.1f} s)")


def test_criterion_3_calugareanu_identity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        fc = random_framed_loop(rng)
        sl = self_linking(fc, 0.02)
        assert sl == round(writhe(fc) + total_twist(fc))
    print("criterion 3: PASS (50 framed loops)")


def test_criterion_4_elastic_energy():
    for R, a1 in ((1.0, 1.0), (2.0, 3.0)):
        df = constant_density(2 * np.pi * R, 256, kappa1=1.0 / R)
        e = elastic_energy(df, ElasticDensity(a1, 1.0, 1.0), CrossSection(0.01))
        assert abs(e - np.pi * a1 / R) / (np.pi * a1 / R) < 1e-6

    ed = ElasticDensity(1.0, 2.0, 0.5)
    cs = CrossSection(1e-4)
    alpha = 0.5 * min(ed.a1, ed.a2, ed.a3)
    rng = np.random.default_rng(4)
    L, n = 2.0, 64
    h = L / (n - 1)
    for _ in range(5000):
        fields = rng.normal(scale=2.0, size=(3, n))
        e = elastic_energy(DensityField(L, *fields), ed, cs)
        sq = (fields**2).sum(axis=0)
        norm_sq = h * (0.5 * (sq[0] + sq[-1]) + sq[1:-1].sum())
        assert e >= alpha * norm_sq - 1e-12
    for _ in range(5000):
        fa = rng.normal(scale=2.0, size=(3, n))
        fb = rng.normal(scale=2.0, size=(3, n))
        ea = elastic_energy(DensityField(L, *fa), ed, cs)
        eb = elastic_energy(DensityField(L, *fb), ed, cs)
        em = elastic_energy(DensityField(L, *(0.5 * (fa + fb))), ed, cs)
        assert em <= 0.5 * (ea + eb) + 1e-12

    barrier = ElasticDensity(1.0, 1.0, 1.0, barrier_eps=0.1)
    df = constant_density(2 * np.pi, 64, kappa1=1.0)
    ramp = [elastic_energy(df, barrier, CrossSection(a)) for a in (0.5, 0.9, 0.99, 0.999)]
    assert all(b > a for a, b in zip(ramp, ramp[1:]))
    assert elastic_energy(df, barrier, CrossSection(1.0)) == math.inf
    print("criterion 4: PASS (closed form, 10000 witnesses, barrier divergence)")


def test_criterion_5_film_relaxation():
    t0 = time.monotonic()
    fc, cs = circle_curve(a=0.001)
    mesh = fm.init_spanning_mesh([(fc, cs)], stations=128, rings=12)
    disk = fm.relax_area(mesh, [(fc, cs)], steps=2000)
    disk_err = abs(disk.area - np.pi) / np.pi
    assert disk_err < 5e-3
    assert all(b <= a + 1e-15 for a, b in zip(disk.areas, disk.areas[1:]))

    a = 0.002
    fc1, cs1 = circle_curve(a=a)
    df = constant_density(2 * np.pi, 256, kappa1=1.0)
    fc2 = integrate_frame(df, Placement(np.array([1.0, 0.0, 1.0]), RING_FRAME))
    tubes = [(fc1, cs1), (fc2, CrossSection(a))]
    mesh = fm.init_spanning_mesh(tubes, stations=64, rings=12, probes=())
    cat = fm.relax_area(mesh, tubes, steps=4000)
    c = brentq(lambda c: c * np.cosh(0.5 / c) - (1.0 - a), 0.5, 1.5)
    oracle = 2 * np.pi * c * (0.5 + 0.5 * c * np.sinh(1.0 / c))
    cat_err = abs(cat.area - oracle) / oracle
    assert cat_err < 0.01

    link = hopf_link()
    curves = realize(link)
    hopf_tubes = [(curves[0], link.rod1[2]), (curves[1], link.rod2[2])]
    probes = make_probe_family(curves[0], link.rod1[2], curves[1], link.rod2[2], want_d_class=True)
    mesh = fm.init_spanning_mesh(hopf_tubes, stations=48, rings=10, probes=probes)
    clearance = fm.probe_rim_clearance(mesh, probes)
    band = fm.relax_area(mesh, hopf_tubes, steps=400, max_step=0.5 * clearance)
    cert = spanning_certificate(band.mesh, probes)
    assert cert.passed
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    hit = sum(1 for h in cert.hits if h)
    print(
        f"criterion 5: PASS (disk err {disk_err:.2%}, catenoid err {cat_err:.2%}, "
        f"certificate {hit}/{len(cert.hits)}, {elapsed:.1f} s)"
    )


def test_criterion_6_interpenetration_checks():
    a = 0.05
    cs = CrossSection(a)
    fc, _ = circle_curve(a=a, n=256)
    df = constant_density(fc.length, 256, kappa1=1.0)
    for vox in (a / 4, a / 8):
        res = cn.ciarlet_necas_residual(fc, df, cs, vox)
        assert abs(res) <= cn.cn_tolerance(fc, cs, vox)

    ah = 0.1
    csh = CrossSection(ah)
    d, R, ell, ramp = 0.02, 0.15, 2.0, 0.15
    pin = hairpin(d, R=R, ell=ell, ramp=ramp)
    dfh = constant_density(pin.length, 8)
    res = cn.ciarlet_necas_residual(pin, dfh, csh, ah / 20)
    tol = cn.cn_tolerance(pin, csh, ah / 20)
    assert res < -tol
    lam = np.linspace(0, 1, 40001)
    z = 2 * R + (d - 2 * R) * 0.5 * (1 - np.cos(np.pi * lam))
    v_overlap = np.trapezoid(disk_lens_area(z, ah) * ramp, lam)
    v_overlap += disk_lens_area(np.array([d]), ah)[0] * (ell - ramp)
    assert abs(res / (-v_overlap) - 1.0) < 0.1

    a1, a2 = 0.04, 0.07
    for dz in (0.5, 0.05):
        t1 = circle_curve(a=a1)[0]
        t2 = circle_curve(a=a2, center=(0.0, 0.0, dz))[0]
        gap = cn.tube_disjointness(t1, CrossSection(a1), t2, CrossSection(a2))
        assert abs(gap - (dz - a1 - a2)) < 1e-9
        swapped = cn.tube_disjointness(t2, CrossSection(a2), t1, CrossSection(a1))
        assert swapped == gap
    print(f"criterion 6: PASS (embedded within band, overlap {res:.4f} < -{tol:.4f}, gaps exact)")


def test_criterion_7_rigid_limit():
    link = hopf_link()
    stiff = ElasticDensity(1e6, 1e6, 1e6)
    opts = SolveOptions(outer_iters=6, harmonics=1, film_steps_per_outer=400, mesh_stations=48, mesh_rings=6)
    out, mesh, trace = solve_kirchhoff_plateau(link, stiff, stiff, 0.0, opts)

    before = realize(link)
    after = realize(out)
    move = max(hausdorff_distance(x.r, y.r) for x, y in zip(before, after))
    assert move < 1e-4

    tubes = [(before[0], link.rod1[2]), (before[1], link.rod2[2])]
    probes = make_probe_family(before[0], link.rod1[2], before[1], link.rod2[2])
    seed = fm.init_spanning_mesh(tubes, stations=48, rings=6, probes=probes)
    fixed = fm.relax_area(seed, tubes, steps=2400)
    rel = abs(area(mesh) - fixed.area) / fixed.area
    assert rel < 1e-3

    links = {row.invariants.lk12 for row in trace.rows}
    assert links == {1}
    print(f"criterion 7: PASS (rod motion {move:.2e}, area rel {rel:.2e}, Lk12 constant)")


def test_criterion_8_clamped_plus_free_preset():
    cfg = load_preset("clamped-plus-free")
    link = build_link(cfg)
    ed1, ed2 = build_elastics(cfg)
    opts = build_options(cfg)
    out, mesh, trace = solve_kirchhoff_plateau(link, ed1, ed2, cfg.sigma, opts)
    last = trace.rows[-1]
    assert last.constraints.admissible
    assert trace.penalized_monotone()
    assert trace.invariants_constant()
    assert {row.invariants.lk12 for row in trace.rows} == {1}
    curves = realize(out)
    probes = make_probe_family(curves[0], out.rod1[2], curves[1], out.rod2[2])
    cert = spanning_certificate(mesh, probes)
    assert cert.passed
    hit = sum(1 for h in cert.hits if h)
    print(
        f"criterion 8: PASS (admissible, E {trace.rows[0].penalized:.3f} -> {last.penalized:.3f}, "
        f"certificate {hit}/{len(cert.hits)})"
    )


def test_criterion_9_deterministic_exports(tmp_path):
    cfg = parse_config(MINI)
    snapshots = []
    for tag in ("first", "second"):
        link = build_link(cfg)
        ed1, ed2 = build_elastics(cfg)
        out, mesh, trace = solve_kirchhoff_plateau(link, ed1, ed2, cfg.sigma, build_options(cfg))
        d = tmp_path / tag
        d.mkdir()
        export_trace(trace, d / "trace.csv")
        export_mesh(mesh, d / "film.obj")
        snapshots.append(d)
    for name in ("trace.csv", "film.obj"):
        b1 = (snapshots[0] / name).read_bytes()
        b2 = (snapshots[1] / name).read_bytes()
        assert b1 == b2, name
    print("criterion 9: PASS (trace.csv and film.obj byte-identical across runs)")
