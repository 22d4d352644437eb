"""Linking invariants, probe loops and spanning certificates.

Linking numbers are computed two independent ways: the pairwise-exact solid
angle evaluation of the double line integral, and signed crossings in a
generic projection. Both operate on closed polylines with implicit closure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    CurvesTouch,
    DegenerateProjection,
    InvalidInput,
    OffsetTooLarge,
    ProbeConstructionFailed,
)
from .mesh import TriMesh
from .rod import CrossSection, FramedCurve, is_closed
from .util import chunked_sum, normalized, segment_segment_distance

__all__ = [
    "ClosedPolyline",
    "ProbeLoop",
    "ProbeFamily",
    "InvariantRecord",
    "SpanningReport",
    "gauss_linking_number",
    "crossing_linking_number",
    "writhe",
    "self_linking",
    "total_twist",
    "hausdorff_distance",
    "make_probe_family",
    "spanning_certificate",
    "min_polyline_distance",
]

# Seed for the generic projection direction; fixed so results are reproducible.
_PROJECTION_SEED = 20240614


@dataclass(frozen=True)
class ClosedPolyline:
    """Ordered points with implicit closure (last connects back to first)."""

    points: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 3:
            raise InvalidInput("closed polyline needs at least 3 points of shape (n, 3)")
        if not np.all(np.isfinite(pts)):
            raise InvalidInput("polyline contains non-finite points")
        gaps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        if np.any(gaps == 0.0):
            raise InvalidInput("consecutive polyline points coincide")
        if self.orientation not in (1, -1):
            raise InvalidInput("orientation must be +1 or -1")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def oriented_points(self) -> np.ndarray:
        if self.orientation == 1:
            return self.points
        return self.points[::-1].copy()

    def reversed(self) -> "ClosedPolyline":
        return ClosedPolyline(self.points, -self.orientation)


def _loop_points(curve) -> np.ndarray:
    """Accept ClosedPolyline, FramedCurve (closed) or raw (n, 3) arrays."""
    if isinstance(curve, ClosedPolyline):
        return curve.oriented_points()
    if isinstance(curve, FramedCurve):
        if not is_closed(curve, pos_tol_rel=1e-4, tan_tol=1e-4):
            raise InvalidInput("framed curve is not closed")
        return curve.r[:-1]
    pts = np.asarray(curve, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidInput("expected points of shape (n, 3)")
    return pts


def min_polyline_distance(c1, c2) -> float:
    """Minimum distance between the segments of two closed polylines."""
    p = _loop_points(c1)
    q = _loop_points(c2)
    p1 = np.roll(p, -1, axis=0)
    q1 = np.roll(q, -1, axis=0)
    d = segment_segment_distance(
        p[:, None, :], p1[:, None, :], q[None, :, :], q1[None, :, :]
    )
    return float(d.min())


def _solid_angle_tri(A, B, C):
    """Signed solid angle of the spherical triangle with unit vertices A,B,C."""
    num = np.einsum("...i,...i", A, np.cross(B, C))
    den = (
        1.0
        + np.einsum("...i,...i", A, B)
        + np.einsum("...i,...i", B, C)
        + np.einsum("...i,...i", C, A)
    )
    return 2.0 * np.arctan2(num, den)


def _segment_pair_angles(p0, p1, q0, q1):
    """Exact double line integral of the linking kernel per segment pair.

    Equals the signed solid angle of the spherical quadrilateral spanned by
    the four normalized difference vectors.
    """
    a = normalized(q0 - p0)
    b = normalized(q1 - p0)
    c = normalized(q1 - p1)
    d = normalized(q0 - p1)
    return -(_solid_angle_tri(a, b, c) + _solid_angle_tri(a, c, d))


def gauss_linking_number(curve1, curve2, require_separation: float = 1e-9) -> float:
    """Double-integral linking number of two disjoint closed curves.

    Evaluated with the exact per-segment-pair solid angle formula; the result
    is within rounding of an integer for genuinely disjoint loops.
    """
    p = _loop_points(curve1)
    q = _loop_points(curve2)
    if min_polyline_distance(p, q) <= require_separation:
        raise CurvesTouch("curves closer than the required separation")
    p1 = np.roll(p, -1, axis=0)
    q1 = np.roll(q, -1, axis=0)

    def partial(lo, hi):
        w = _segment_pair_angles(
            p[lo:hi, None, :], p1[lo:hi, None, :], q[None, :, :], q1[None, :, :]
        )
        return float(w.sum())

    total = chunked_sum(partial, p.shape[0])
    return total / (4.0 * np.pi)


def writhe(curve, require_separation: float = 1e-9) -> float:
    """Gauss self-integral of one closed curve.

    Adjacent segment pairs are coplanar with their connecting vector, so
    their exact contribution vanishes and only non-adjacent pairs are summed.
    """
    p = _loop_points(curve)
    n = p.shape[0]
    p1 = np.roll(p, -1, axis=0)
    idx = np.arange(n)
    sep = np.minimum((idx[:, None] - idx[None, :]) % n, (idx[None, :] - idx[:, None]) % n)
    nonadj = sep >= 2
    close = segment_segment_distance(
        p[:, None, :], p1[:, None, :], p[None, :, :], p1[None, :, :]
    )
    if np.any((close <= require_separation) & nonadj):
        raise CurvesTouch("curve self-intersects within the required separation")

    def partial(lo, hi):
        w = _segment_pair_angles(
            p[lo:hi, None, :], p1[lo:hi, None, :], p[None, :, :], p1[None, :, :]
        )
        return float(np.where(nonadj[lo:hi], w, 0.0).sum())

    total = chunked_sum(partial, n)
    return total / (4.0 * np.pi)


def _projection_basis(direction):
    d = normalized(np.asarray(direction, dtype=float))
    helper = np.array([1.0, 0.0, 0.0])
    if abs(d @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = normalized(np.cross(d, helper))
    e2 = np.cross(d, e1)
    return d, e1, e2


def _count_signed_crossings(p2, p3d_depth, dp2, q2, q3d_depth, dq2, margin):
    """Signed crossing sum between projected segment families.

    Returns (sum, ok); ok is False when a crossing is too close to an
    endpoint or a nearly parallel overlapping pair makes the direction
    non-generic.
    """
    denom = dp2[:, None, 0] * dq2[None, :, 1] - dp2[:, None, 1] * dq2[None, :, 0]
    rel = q2[None, :, :] - p2[:, None, :]
    tnum = rel[..., 0] * dq2[None, :, 1] - rel[..., 1] * dq2[None, :, 0]
    unum = rel[..., 0] * dp2[None, :, 1].swapaxes(0, 1) - rel[..., 1] * dp2[None, :, 0].swapaxes(0, 1)
    scale = np.linalg.norm(dp2, axis=1)[:, None] * np.linalg.norm(dq2, axis=1)[None, :]
    parallel = np.abs(denom) <= 1e-12 * scale
    if np.any(parallel):
        # A parallel projected pair is only a problem if the segments overlap.
        pp = np.concatenate([p2, 0.0 * p2[:, :1]], axis=1)
        pq = np.concatenate([q2, 0.0 * q2[:, :1]], axis=1)
        pi, qi = np.nonzero(parallel)
        d2 = segment_segment_distance(
            pp[pi], pp[pi] + np.concatenate([dp2[pi], 0 * dp2[pi][:, :1]], axis=1),
            pq[qi], pq[qi] + np.concatenate([dq2[qi], 0 * dq2[qi][:, :1]], axis=1),
        )
        if np.any(d2 <= 1e-9 * np.maximum(scale[pi, qi], 1e-300) ** 0.5 + 1e-12):
            return 0.0, False
    safe = np.where(parallel, 1.0, denom)
    t = tnum / safe
    u = unum / safe
    hits = (~parallel) & (t > 0.0) & (t < 1.0) & (u > 0.0) & (u < 1.0)
    near_edge = (~parallel) & (
        (np.abs(t) < margin) | (np.abs(t - 1.0) < margin) | (np.abs(u) < margin) | (np.abs(u - 1.0) < margin)
    ) & (t > -margin) & (t < 1.0 + margin) & (u > -margin) & (u < 1.0 + margin)
    if np.any(near_edge):
        return 0.0, False
    if not np.any(hits):
        return 0.0, True
    ti, qi = np.nonzero(hits)
    th = t[hits]
    uh = u[hits]
    depth1 = p3d_depth[ti] * (1.0 - th) + np.roll(p3d_depth, -1)[ti] * th
    depth2 = q3d_depth[qi] * (1.0 - uh) + np.roll(q3d_depth, -1)[qi] * uh
    tie = 1e-12 * (1.0 + np.abs(depth1) + np.abs(depth2))
    if np.any(np.abs(depth1 - depth2) < tie):
        return 0.0, False
    cross = dp2[ti, 0] * dq2[qi, 1] - dp2[ti, 1] * dq2[qi, 0]
    # Crossing sign: +sign(det) when the first family passes over, negated
    # when it passes under; the overall orientation matches the Gauss
    # double-integral convention.
    sgn = np.sign(cross)
    sign = np.where(depth1 > depth2, sgn, -sgn)
    return float(sign.sum()), True


def crossing_linking_number(curve1, curve2, seed: int = _PROJECTION_SEED, max_tries: int = 16) -> int:
    """Linking number as half the signed crossing sum in a generic projection.

    Directions are drawn pseudo-randomly from a fixed seed; degenerate
    projections are retried up to max_tries before DegenerateProjection.
    """
    p = _loop_points(curve1)
    q = _loop_points(curve2)
    if min_polyline_distance(p, q) <= 1e-9:
        raise CurvesTouch("curves closer than the required separation")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        direction = rng.normal(size=3)
        if np.linalg.norm(direction) < 1e-6:
            continue
        d, e1, e2 = _projection_basis(direction)
        p2 = np.column_stack([p @ e1, p @ e2])
        q2 = np.column_stack([q @ e1, q @ e2])
        dp2 = np.roll(p2, -1, axis=0) - p2
        dq2 = np.roll(q2, -1, axis=0) - q2
        total, ok = _count_signed_crossings(p2, p @ d, dp2, q2, q @ d, dq2, margin=1e-9)
        if not ok:
            continue
        half = 0.5 * total
        if abs(half - round(half)) > 1e-9:
            continue
        return int(round(half))
    raise DegenerateProjection("no generic projection direction found")


def total_twist(fc: FramedCurve) -> float:
    """Rotation count of the first director about the tangent.

    Computed by parallel transporting u across each step and measuring the
    residual rotation angle; returns the accumulated angle over 2*pi.
    """
    w = fc.w
    u = fc.u
    axis = np.cross(w[:-1], w[1:])
    sin_a = np.linalg.norm(axis, axis=1)
    cos_a = np.clip(np.einsum("ni,ni->n", w[:-1], w[1:]), -1.0, 1.0)
    u_t = u[:-1].copy()
    mask = sin_a > 1e-15
    k = np.zeros_like(axis)
    k[mask] = axis[mask] / sin_a[mask][:, None]
    # Rodrigues rotation of u by the angle taking w_i to w_{i+1}.
    kxu = np.cross(k, u[:-1])
    kdotu = np.einsum("ni,ni->n", k, u[:-1])
    rotated = (
        u[:-1] * cos_a[:, None]
        + kxu * sin_a[:, None]
        + k * (kdotu * (1.0 - cos_a))[:, None]
    )
    u_t[mask] = rotated[mask]
    ang = np.arctan2(
        np.einsum("ni,ni->n", np.cross(u_t, u[1:]), w[1:]),
        np.einsum("ni,ni->n", u_t, u[1:]),
    )
    return float(ang.sum() / (2.0 * np.pi))


def self_linking(fc: FramedCurve, offset: float) -> int:
    """Linking number of the midline with its push-off along the u director."""
    if offset <= 0:
        raise InvalidInput("push-off offset must be positive")
    if not is_closed(fc, pos_tol_rel=1e-4, tan_tol=1e-4):
        raise InvalidInput("self-linking needs a closed curve")
    mid = fc.r[:-1]
    push = mid + offset * fc.u[:-1]
    if min_polyline_distance(mid, push) <= 1e-9:
        raise OffsetTooLarge("push-off touches the midline")
    lk = gauss_linking_number(mid, push)
    if abs(lk - round(lk)) > 0.1:
        raise OffsetTooLarge("push-off linking is far from an integer; offset too large")
    return int(round(lk))


def hausdorff_distance(points_a, points_b) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.atleast_2d(np.asarray(points_a, dtype=float))
    b = np.atleast_2d(np.asarray(points_b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise InvalidInput("point sets must be non-empty")
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))


@dataclass(frozen=True)
class InvariantRecord:
    """Integer topological invariants of a two-loop configuration."""

    lk12: int | None
    self_link1: int
    self_link2: int | None

    def __eq__(self, other):
        if not isinstance(other, InvariantRecord):
            return NotImplemented
        return (
            self.lk12 == other.lk12
            and self.self_link1 == other.self_link1
            and self.self_link2 == other.self_link2
        )


@dataclass(frozen=True)
class ProbeLoop:
    """Verified probe loop with its class tag and measured linking numbers."""

    loop: ClosedPolyline
    tag: str
    lk_rod1: int
    lk_rod2: int | None


@dataclass(frozen=True)
class ProbeFamily:
    loops: tuple[ProbeLoop, ...]

    def by_tag(self, tag: str) -> list[ProbeLoop]:
        return [p for p in self.loops if p.tag == tag]


def _meridian_loop(fc: FramedCurve, s: float, radius: float, segments: int = 24) -> ClosedPolyline:
    from .rod import tube_frame_at

    pt, U = tube_frame_at(fc, s)
    beta = np.arange(segments) * (2.0 * np.pi / segments)
    pts = pt[None, :] + radius * (np.cos(beta)[:, None] * U[0] + np.sin(beta)[:, None] * U[1])
    return ClosedPolyline(pts)


def _verify_loop(loop, fc_list, cs_list):
    """Linking numbers of a candidate loop with each midline, or None on contact."""
    lks = []
    for fc, cs in zip(fc_list, cs_list):
        mid = fc.r[:-1]
        if min_polyline_distance(loop.points, mid) <= cs.radius:
            return None
        lks.append(crossing_linking_number(loop, mid))
    return lks


def make_probe_family(
    fc1: FramedCurve,
    cs1: CrossSection,
    fc2: FramedCurve | None = None,
    cs2: CrossSection | None = None,
    counts: int = 8,
    want_d_class: bool | None = None,
    segments: int = 24,
) -> ProbeFamily:
    """Construct and verify simple-link probes and (optionally) d-class loops.

    Simple links are meridian circles around one loop (linking +-1 with it,
    0 with the other). The d-class loop is the mid-curve of the band sweep
    between the two loops; it must verify to linking +1 with both, which is
    only realizable when the loops are singly linked.
    """
    fcs = [fc1] if fc2 is None else [fc1, fc2]
    css = [cs1] if fc2 is None else [cs1, cs2]
    if want_d_class is None:
        want_d_class = fc2 is not None
    loops: list[ProbeLoop] = []
    for rod_idx, (fc, cs) in enumerate(zip(fcs, css)):
        stations = (np.arange(counts) + 0.5) * (fc.length / counts)
        for s in stations:
            built = None
            for factor in (1.5, 1.25, 1.1):
                cand = _meridian_loop(fc, float(s), factor * cs.radius, segments)
                lks = _verify_loop(cand, fcs, css)
                if lks is None:
                    continue
                own = lks[rod_idx]
                others = [lk for i, lk in enumerate(lks) if i != rod_idx]
                if abs(own) == 1 and all(lk == 0 for lk in others):
                    built = ProbeLoop(cand, f"around_rod{rod_idx + 1}", lks[0], lks[1] if len(lks) > 1 else None)
                    break
            if built is None:
                raise ProbeConstructionFailed(
                    f"no simple link realizable around rod {rod_idx + 1} at s = {s:.4g}"
                )
            loops.append(built)
    if want_d_class:
        if fc2 is None:
            raise ProbeConstructionFailed("d-class loops need two rods")
        from .loft import band_mid_curve

        cand = ClosedPolyline(band_mid_curve(fc1, cs1, fc2, cs2))
        lks = _verify_loop(cand, fcs, css)
        if lks is not None and lks[0] == -1 and lks[1] == -1:
            cand = cand.reversed()
            lks = [1, 1]
        if lks is None or lks[0] != 1 or lks[1] != 1:
            raise ProbeConstructionFailed(
                "d-class loop could not be realized with linking +1 to both rods"
            )
        loops.append(ProbeLoop(cand, "d_class", 1, 1))
    return ProbeFamily(tuple(loops))


@dataclass(frozen=True)
class SpanningReport:
    hits: tuple[int, ...]
    tags: tuple[str, ...]
    passed: bool


def _segment_triangle_hits(p0, p1, tri_pts):
    """Count segments hitting any triangle (Moller-Trumbore, inclusive ends)."""
    eps = 1e-12
    d = p1 - p0  # (S, 3)
    v0 = tri_pts[:, 0]
    e1 = tri_pts[:, 1] - v0
    e2 = tri_pts[:, 2] - v0
    pvec = np.cross(d[:, None, :], e2[None, :, :])
    det = np.einsum("fi,sfi->sf", e1, pvec)
    ok = np.abs(det) > eps
    inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tvec = p0[:, None, :] - v0[None, :, :]
    u = np.einsum("sfi,sfi->sf", tvec, pvec) * inv
    qvec = np.cross(tvec, e1[None, :, :])
    v = np.einsum("si,sfi->sf", d, qvec) * inv
    t = np.einsum("fi,sfi->sf", e2, qvec) * inv
    hit = ok & (u >= -1e-10) & (v >= -1e-10) & (u + v <= 1.0 + 1e-10) & (t >= -1e-10) & (t <= 1.0 + 1e-10)
    return hit.any(axis=1)


def spanning_certificate(mesh: TriMesh, probes: ProbeFamily) -> SpanningReport:
    """Check that every probe loop intersects the mesh."""
    tri_pts = mesh.vertices[mesh.triangles]
    hits = []
    for probe in probes.loops:
        pts = probe.loop.oriented_points()
        nxt = np.roll(pts, -1, axis=0)
        if mesh.n_triangles == 0:
            hits.append(0)
            continue
        hit_mask = _segment_triangle_hits(pts, nxt, tri_pts)
        hits.append(int(hit_mask.sum()))
    tags = tuple(p.tag for p in probes.loops)
    return SpanningReport(tuple(hits), tags, bool(all(h > 0 for h in hits)))
