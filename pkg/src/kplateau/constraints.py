"""Constraint functionals: injectivity, global non-interpenetration, gaps.

The global check follows the volume identity: an injective thickening of a
loop fills exactly pi a^2 L of space, so comparing a voxel estimate of the
occupied volume against the closed form exposes interpenetration as a
negative residual close to the overlap volume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .energy import ElasticDensity, loop_energy
from .errors import ResolutionError
from .rod import (
    CrossSection,
    DensityField,
    FramedCurve,
    LinkConfig,
    closure_residual,
    is_closed,
    margin_samples,
    tube_frame_at,
)
from .topology import InvariantRecord, crossing_linking_number, self_linking
from .util import segment_segment_distance

__all__ = [
    "local_injectivity_margin",
    "ciarlet_necas_residual",
    "cn_tolerance",
    "tube_disjointness",
    "nonlocal_self_clearance",
    "embedded_certificate",
    "ConstraintReport",
    "admissibility",
]


def local_injectivity_margin(df: DensityField, cs: CrossSection) -> float:
    """Largest value of a*sqrt(kappa1^2+kappa2^2); below one is injective."""
    return float(margin_samples(df, cs).max())


def _section_offsets(radius: float, spacing: float) -> np.ndarray:
    half = np.arange(spacing / 2, radius + spacing, spacing)
    ticks = np.concatenate([-half[::-1], half])
    z1, z2 = np.meshgrid(ticks, ticks, indexing="ij")
    keep = z1**2 + z2**2 <= radius**2
    inner = np.column_stack([z1[keep], z2[keep]])
    # Ring exactly on the section boundary, so voxels holding only a thin
    # sliver of tube still receive a sample; without it the occupancy set
    # systematically misses them and the estimate drifts low.
    m = max(8, int(np.ceil(2.0 * np.pi * radius / spacing)))
    ang = 2.0 * np.pi * np.arange(m) / m
    rim = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return np.concatenate([inner, rim], axis=0)


def _voxel_codes(points: np.ndarray, voxel: float):
    cells = np.floor(points / voxel).astype(np.int64)
    lo = cells.min(axis=0)
    cells -= lo
    span = cells.max(axis=0) + 3
    code = (cells[:, 0] * span[1] + cells[:, 1]) * span[2] + cells[:, 2]
    return code, span


def ciarlet_necas_residual(
    fc: FramedCurve, df: DensityField, cs: CrossSection, voxel: float | None = None
) -> float:
    """Voxel volume estimate of the tube minus the exact section-swept volume.

    The exact side integrates the tube Jacobian 1 - z1*kappa1 - z2*kappa2
    over section and arclength; over a centered disk the linear terms vanish
    node by node, leaving pi a^2 L regardless of the densities. Near zero
    (within cn_tolerance) for an embedded tube; self-overlap makes the voxel
    estimate fall short by roughly the overlap volume, so the residual
    reports approximately -V_overlap. Voxels straddling the surface are on
    average only half inside, hence the half-count of boundary voxels.
    """
    a = cs.radius
    if voxel is None:
        voxel = a / 4.0
    if voxel > a / 4.0 * (1 + 1e-12):
        raise ResolutionError(f"voxel {voxel} too coarse for radius {a} (need <= a/4)")
    L = df.L
    n_s = int(np.ceil(L / (voxel / 4.0))) + 1
    s = np.linspace(0.0, L, n_s)
    offsets = _section_offsets(a, voxel / 2.0)
    chunk = max(1, int(2e6) // max(1, offsets.shape[0]))
    pts_all = []
    for lo in range(0, n_s, chunk):
        sl = s[lo : lo + chunk]
        # one interpolated frame per station, broadcast over the section
        mid, U = tube_frame_at(fc, sl)
        pts = (
            mid[:, None, :]
            + offsets[None, :, 0, None] * U[:, None, 0, :]
            + offsets[None, :, 1, None] * U[:, None, 1, :]
        )
        pts_all.append(pts.reshape(-1, 3))
    points = np.concatenate(pts_all, axis=0)
    code, span = _voxel_codes(points, voxel)
    occupied = np.unique(code)
    neighbor_steps = np.array(
        [span[1] * span[2], -span[1] * span[2], span[2], -span[2], 1, -1], dtype=np.int64
    )
    surface = np.zeros(occupied.shape[0], dtype=bool)
    for step in neighbor_steps:
        idx = np.searchsorted(occupied, occupied + step)
        idx = np.clip(idx, 0, occupied.shape[0] - 1)
        missing = occupied[idx] != occupied + step
        surface |= missing
    measured = voxel**3 * (occupied.shape[0] - 0.5 * surface.sum())
    exact = np.pi * a * a * L
    return float(measured - exact)


def cn_tolerance(fc: FramedCurve, cs: CrossSection, voxel: float | None = None) -> float:
    """Acceptance band for the volume residual of an embedded tube."""
    a = cs.radius
    if voxel is None:
        voxel = a / 4.0
    return 3.0 * voxel * (2.0 * np.pi * a * fc.length)


def _segment_gap(fc1: FramedCurve, fc2: FramedCurve) -> float:
    p = fc1.r[:-1]
    p1 = fc1.r[1:]
    q = fc2.r[:-1]
    q1 = fc2.r[1:]
    d = segment_segment_distance(p[:, None, :], p1[:, None, :], q[None, :, :], q1[None, :, :])
    return float(d.min())


def tube_disjointness(fc1: FramedCurve, cs1: CrossSection, fc2: FramedCurve, cs2: CrossSection) -> float:
    """Midline clearance minus the sum of radii; positive keeps tubes apart."""
    return _segment_gap(fc1, fc2) - (cs1.radius + cs2.radius)


def nonlocal_self_clearance(fc: FramedCurve, cs: CrossSection) -> float:
    """Clearance of arc-distant midline pairs minus the tube diameter.

    Pairs closer along the curve than half the section circumference are the
    business of the local margin; everything farther apart must clear twice
    the radius for the thickened tube to be embedded. Positive return values
    certify no distant self-contact.
    """
    window = np.pi * cs.radius
    p = fc.r[:-1]
    p1 = fc.r[1:]
    n = p.shape[0]
    d = segment_segment_distance(p[:, None, :], p1[:, None, :], p[None, :, :], p1[None, :, :])
    idx = np.arange(n)
    arc = np.abs(idx[:, None] - idx[None, :]) * fc.h
    if is_closed(fc, pos_tol_rel=1e-4, tan_tol=1e-4):
        arc = np.minimum(arc, fc.length - arc)
    # segments span one step beyond their start index, so the true arc
    # separation of their closest points is one h shorter
    near = arc <= window + fc.h
    d = np.where(near, np.inf, d)
    return float(d.min() - 2.0 * cs.radius)


def embedded_certificate(fc: FramedCurve, df: DensityField, cs: CrossSection) -> bool:
    """Cheap sufficient condition for an embedded tube (no voxel pass)."""
    return local_injectivity_margin(df, cs) < 1.0 and nonlocal_self_clearance(fc, cs) > 0.0


@dataclass(frozen=True)
class ConstraintReport:
    margins: tuple
    cn_residuals: tuple
    tube_gap: float | None
    closure: tuple
    invariants: InvariantRecord
    e_loop: float | None
    checks: dict
    admissible: bool


def admissibility(
    link: LinkConfig,
    curves=None,
    targets: InvariantRecord | None = None,
    energy_bound: float | None = None,
    ed1: ElasticDensity | None = None,
    ed2: ElasticDensity | None = None,
    voxel: float | None = None,
    pos_tol_rel: float = 1e-6,
    tan_tol: float = 1e-6,
) -> ConstraintReport:
    """Full admissibility audit of a configuration.

    Verifies closure of every loop, local and global non-interpenetration,
    mutual clearance, conservation of the topological invariants against
    `targets` (the linking number must be one when two rods are present and
    no explicit target is given), and optionally the energy bound that keeps
    minimizing sequences compact.
    """
    if curves is None:
        from .energy import realize

        curves = realize(link)
    rods = link.rods
    margins = tuple(local_injectivity_margin(df, cs) for df, _, cs in rods)
    cn_residuals = tuple(
        ciarlet_necas_residual(fc, df, cs, voxel) for fc, (df, _, cs) in zip(curves, rods)
    )
    closure = tuple(closure_residual(fc) for fc in curves)
    checks = {}
    for i, (fc, rod) in enumerate(zip(curves, rods), start=1):
        df, _, cs = rod
        pos, tan = closure[i - 1]
        checks[f"closed_rod{i}"] = bool(pos <= pos_tol_rel * df.L and tan <= tan_tol)
        checks[f"margin_rod{i}"] = bool(margins[i - 1] <= 1.0)
        checks[f"volume_rod{i}"] = bool(
            cn_residuals[i - 1] >= -cn_tolerance(fc, cs, voxel)
        )

    two = link.rod2 is not None
    tube_gap = None
    lk12 = None
    sl2 = None
    if two:
        tube_gap = tube_disjointness(curves[0], rods[0][2], curves[1], rods[1][2])
        checks["tube_gap"] = bool(tube_gap > 0.0)
        lk12 = crossing_linking_number(curves[0], curves[1])
    sl1 = self_linking(curves[0], rods[0][2].radius / 2.0)
    if two:
        sl2 = self_linking(curves[1], rods[1][2].radius / 2.0)
    invariants = InvariantRecord(lk12, sl1, sl2)

    if targets is not None:
        checks["linking"] = bool(invariants.lk12 == targets.lk12)
        checks["self_link_rod1"] = bool(invariants.self_link1 == targets.self_link1)
        if two:
            checks["self_link_rod2"] = bool(invariants.self_link2 == targets.self_link2)
    elif two:
        checks["linking"] = bool(lk12 == 1)

    e_loop = None
    if energy_bound is not None:
        if ed1 is None or (two and ed2 is None):
            raise ValueError("energy bound check needs the stiffness densities")
        e_loop = loop_energy(link, ed1, ed2 if ed2 is not None else ed1, curves)
        checks["energy_bound"] = bool(e_loop < energy_bound)

    return ConstraintReport(
        margins=margins,
        cn_residuals=cn_residuals,
        tube_gap=tube_gap,
        closure=closure,
        invariants=invariants,
        e_loop=e_loop,
        checks=checks,
        admissible=bool(all(checks.values())),
    )
