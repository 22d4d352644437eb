"""Framed space curves for inextensible elastic loops.

A loop is described in material coordinates by two flexural strain densities
and a twist density sampled on a uniform arc-length grid. Realizing the shape
means integrating the moving orthonormal frame (u, v, w) along arc length,
with w the unit tangent. The frame evolves by the skew system

    u' = tw * v - k1 * w
    v' = -tw * u - k2 * w
    w' = k1 * u + k2 * v

which preserves orthonormality exactly and gives the tube map
p = r + z1*u + z2*v the Jacobian determinant 1 - z1*k1 - z2*k2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, NotClosed, OutOfSection
from .mesh import TriMesh
from .util import normalized

__all__ = [
    "CrossSection",
    "DensityField",
    "Frame",
    "Placement",
    "FramedCurve",
    "LinkConfig",
    "integrate_frame",
    "closure_residual",
    "tube_point",
    "tube_points",
    "tube_frame_at",
    "tube_mesh",
    "resample",
]


@dataclass(frozen=True)
class Frame:
    """Right-handed orthonormal director triple; w is the tangent."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        for name in ("u", "v", "w"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
            if getattr(self, name).shape != (3,):
                raise InvalidInput(f"frame vector {name} must have shape (3,)")
        m = self.matrix
        gram = m @ m.T
        if np.max(np.abs(gram - np.eye(3))) >= 1e-9:
            raise InvalidInput("frame is not orthonormal within 1e-9")
        if np.max(np.abs(np.cross(self.u, self.v) - self.w)) >= 1e-9:
            raise InvalidInput("frame is not right-handed (u x v != w)")

    @property
    def matrix(self) -> np.ndarray:
        """Rows are u, v, w."""
        return np.stack([self.u, self.v, self.w])


@dataclass(frozen=True)
class CrossSection:
    """Disk cross-section of radius `radius`, bounded by `max_thickness`."""

    radius: float
    max_thickness: float | None = None

    def __post_init__(self):
        if self.max_thickness is None:
            object.__setattr__(self, "max_thickness", float(self.radius))
        if not (0.0 < self.radius <= self.max_thickness):
            raise InvalidInput("need 0 < radius <= max_thickness")

    def contains(self, z1, z2) -> np.ndarray:
        rr = np.asarray(z1, dtype=float) ** 2 + np.asarray(z2, dtype=float) ** 2
        return rr <= self.radius**2 * (1.0 + 1e-12)


@dataclass(frozen=True)
class DensityField:
    """Flexural and twist densities sampled on the uniform grid i*L/(n-1)."""

    L: float
    kappa1: np.ndarray
    kappa2: np.ndarray
    twist: np.ndarray

    def __post_init__(self):
        if self.L <= 0:
            raise InvalidInput("rod length must be positive")
        for name in ("kappa1", "kappa2", "twist"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.ndim != 1:
                raise InvalidInput(f"{name} must be one-dimensional")
            if not np.all(np.isfinite(arr)):
                raise InvalidInput(f"{name} contains non-finite samples")
        if not (self.kappa1.shape == self.kappa2.shape == self.twist.shape):
            raise InvalidInput("density channels must share one grid")
        if self.n < 8:
            raise InvalidInput("need at least 8 density nodes")

    @property
    def n(self) -> int:
        return self.kappa1.shape[0]

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n)

    def stacked(self) -> np.ndarray:
        """(3, n) array in channel order kappa1, kappa2, twist."""
        return np.stack([self.kappa1, self.kappa2, self.twist])


def constant_density(L: float, n: int, kappa1=0.0, kappa2=0.0, twist=0.0) -> DensityField:
    """Density field with constant channels."""
    ones = np.ones(n)
    return DensityField(L, kappa1 * ones, kappa2 * ones, twist * ones)


@dataclass(frozen=True)
class Placement:
    """Clamp data: position and director frame of the s = 0 end."""

    origin: np.ndarray
    frame: Frame

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        if self.origin.shape != (3,):
            raise InvalidInput("placement origin must have shape (3,)")


@dataclass(frozen=True)
class FramedCurve:
    """Realized curve: node positions and frames on a uniform arc grid.

    frames[i] stacks u_i, v_i, w_i as rows. Chord lengths may fall short of
    the arc step h by the usual circular-arc defect, so the inextensibility
    check allows a curvature-dependent slack on top of the 1e-6*h tolerance.
    """

    h: float
    r: np.ndarray
    frames: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        fr = np.asarray(self.frames, dtype=float)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "frames", fr)
        if r.ndim != 2 or r.shape[1] != 3 or r.shape[0] < 2:
            raise InvalidInput("r must have shape (n, 3) with n >= 2")
        if fr.shape != (r.shape[0], 3, 3):
            raise InvalidInput("frames must have shape (n, 3, 3)")
        if self.h <= 0:
            raise InvalidInput("arc step h must be positive")
        gram = np.einsum("nij,nkj->nik", fr, fr)
        defect = np.max(np.abs(gram - np.eye(3)))
        if defect >= 1e-9:
            raise InvalidInput(f"frames not orthonormal, Gram defect {defect:.2e}")
        handed = np.einsum("ni,ni->n", np.cross(fr[:, 0], fr[:, 1]), fr[:, 2])
        if np.min(handed) <= 0:
            raise InvalidInput("frames must be right-handed")
        chords = np.linalg.norm(np.diff(r, axis=0), axis=1)
        # Turning angle per step bounds the chord defect of a unit-speed arc:
        # a circular arc of angle t has chord h*(1 - t^2/24 + ...).
        cosang = np.clip(np.einsum("ni,ni->n", fr[:-1, 2], fr[1:, 2]), -1.0, 1.0)
        turn = np.arccos(cosang)
        slack = self.h * (turn**2 / 8.0 + 1e-6)
        if np.any(chords > self.h * (1.0 + 1e-6)) or np.any(chords < self.h - slack):
            raise InvalidInput("node spacing violates inextensibility tolerance")

    @property
    def n(self) -> int:
        return self.r.shape[0]

    @property
    def length(self) -> float:
        return self.h * (self.n - 1)

    @property
    def u(self) -> np.ndarray:
        return self.frames[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.frames[:, 1]

    @property
    def w(self) -> np.ndarray:
        return self.frames[:, 2]


@dataclass(frozen=True)
class LinkConfig:
    """Two-loop scenario: densities, clamps, sections, weight and gravity.

    rod1 is clamped; rod2's placement is the free rigid placement the solver
    may move. rod2 may be omitted for single-loop scenarios, in which case
    every pairwise quantity is skipped downstream.
    """

    rod1: tuple[DensityField, Placement, CrossSection]
    rod2: tuple[DensityField, Placement, CrossSection] | None
    rho: tuple[float, float]
    gravity: np.ndarray
    slenderness_ratio: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "gravity", np.asarray(self.gravity, dtype=float))
        if self.gravity.shape != (3,):
            raise InvalidInput("gravity must be a 3-vector")
        for idx, rod in enumerate(self.rods, start=1):
            df, placement, cs = rod
            if cs.max_thickness * self.slenderness_ratio > df.L * (1 + 1e-12):
                raise InvalidInput(
                    f"rod{idx} section thickness {cs.max_thickness} too large for "
                    f"length {df.L} (limit L/{self.slenderness_ratio:g})"
                )
        if any(rho < 0 for rho in self.rho[: len(self.rods)]):
            raise InvalidInput("mass density must be non-negative")

    @property
    def rods(self):
        return (self.rod1,) if self.rod2 is None else (self.rod1, self.rod2)


def _density_stages(values: np.ndarray):
    """Node and midpoint samples used by the integrator stages."""
    mids = 0.5 * (values[..., :-1] + values[..., 1:])
    return values, mids


def _skew_matrices(k1, k2, tw):
    """Frame evolution matrices A with U' = A @ U, for (...,) density arrays."""
    k1, k2, tw = np.broadcast_arrays(k1, k2, tw)
    A = np.zeros(k1.shape + (3, 3))
    A[..., 0, 1] = tw
    A[..., 0, 2] = -k1
    A[..., 1, 0] = -tw
    A[..., 1, 2] = -k2
    A[..., 2, 0] = k1
    A[..., 2, 1] = k2
    return A


def _orthonormalize_rows(U: np.ndarray) -> np.ndarray:
    u = normalized(U[..., 0, :])
    v = U[..., 1, :] - np.einsum("...i,...i->...", U[..., 1, :], u)[..., None] * u
    v = normalized(v)
    w = np.cross(u, v)
    return np.stack([u, v, w], axis=-2)


def integrate_frame_batch(
    L: float,
    kappa1: np.ndarray,
    kappa2: np.ndarray,
    twist: np.ndarray,
    origin: np.ndarray,
    frame0: np.ndarray,
):
    """Integrate a batch of density fields sharing one grid.

    kappa1/kappa2/twist have shape (B, n); origin (B, 3); frame0 (B, 3, 3).
    Returns positions (B, n, 3) and frames (B, n, 3, 3). Classical RK4 with
    linear density interpolation at half steps, frames re-orthonormalized
    after every step.
    """
    B, n = kappa1.shape
    h = L / (n - 1)
    node = _skew_matrices(kappa1, kappa2, twist)  # (B, n, 3, 3)
    k1m, k2m, twm = (_density_stages(x)[1] for x in (kappa1, kappa2, twist))
    mid = _skew_matrices(k1m, k2m, twm)  # (B, n-1, 3, 3)

    r = np.empty((B, n, 3))
    frames = np.empty((B, n, 3, 3))
    r[:, 0] = origin
    frames[:, 0] = _orthonormalize_rows(frame0)
    U = frames[:, 0].copy()
    pos = r[:, 0].copy()
    for i in range(n - 1):
        A1 = node[:, i]
        A2 = mid[:, i]
        A4 = node[:, i + 1]
        k1U = A1 @ U
        k1r = U[:, 2]
        U2 = U + (0.5 * h) * k1U
        k2U = A2 @ U2
        k2r = U2[:, 2]
        U3 = U + (0.5 * h) * k2U
        k3U = A2 @ U3
        k3r = U3[:, 2]
        U4 = U + h * k3U
        k4U = A4 @ U4
        k4r = U4[:, 2]
        U = U + (h / 6.0) * (k1U + 2.0 * k2U + 2.0 * k3U + k4U)
        pos = pos + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        U = _orthonormalize_rows(U)
        r[:, i + 1] = pos
        frames[:, i + 1] = U
    return r, frames


def integrate_frame(df: DensityField, placement: Placement) -> FramedCurve:
    """Realize the curve determined by a density field and a clamp."""
    r, frames = integrate_frame_batch(
        df.L,
        df.kappa1[None, :],
        df.kappa2[None, :],
        df.twist[None, :],
        placement.origin[None, :],
        placement.frame.matrix[None, :, :],
    )
    return FramedCurve(df.L / (df.n - 1), r[0], frames[0])


def closure_residual(fc: FramedCurve) -> tuple[float, float]:
    """(position gap, tangent gap) between the two ends."""
    pos = float(np.linalg.norm(fc.r[-1] - fc.r[0]))
    tan = float(np.linalg.norm(fc.w[-1] - fc.w[0]))
    return pos, tan


def is_closed(fc: FramedCurve, pos_tol_rel: float = 1e-6, tan_tol: float = 1e-6) -> bool:
    pos, tan = closure_residual(fc)
    return pos < pos_tol_rel * fc.length and tan < tan_tol


def tube_frame_at(fc: FramedCurve, s) -> tuple[np.ndarray, np.ndarray]:
    """Interpolated midline point(s) and frame(s) at arc positions s.

    Positions interpolate linearly between nodes; frames interpolate linearly
    and are re-orthonormalized. Returns (points (..., 3), frames (..., 3, 3)).
    """
    s = np.asarray(s, dtype=float)
    if np.any(s < -1e-9) or np.any(s > fc.length * (1 + 1e-12) + 1e-9):
        raise InvalidInput("arc position outside [0, L]")
    x = np.clip(s / fc.h, 0.0, fc.n - 1 - 1e-12)
    i = x.astype(int)
    t = (x - i)[..., None]
    pts = (1.0 - t) * fc.r[i] + t * fc.r[i + 1]
    U = (1.0 - t[..., None]) * fc.frames[i] + t[..., None] * fc.frames[i + 1]
    return pts, _orthonormalize_rows(U)


def tube_points(fc: FramedCurve, s, z1, z2, cs: CrossSection | None = None) -> np.ndarray:
    """Vectorized tube map r(s) + z1*u(s) + z2*v(s)."""
    s, z1, z2 = np.broadcast_arrays(
        np.asarray(s, dtype=float), np.asarray(z1, dtype=float), np.asarray(z2, dtype=float)
    )
    if cs is not None and not np.all(cs.contains(z1, z2)):
        raise OutOfSection("section coordinates outside the cross-section disk")
    pts, U = tube_frame_at(fc, s)
    return pts + z1[..., None] * U[..., 0, :] + z2[..., None] * U[..., 1, :]


def tube_point(fc: FramedCurve, s: float, z1: float, z2: float, cs: CrossSection | None = None) -> np.ndarray:
    """Tube map at a single material point."""
    return tube_points(fc, s, z1, z2, cs)


def tube_mesh(fc: FramedCurve, cs: CrossSection, m: int, stations: int | None = None) -> TriMesh:
    """Watertight triangulated tube surface around a closed midline.

    Rings of m vertices are placed at `stations` equally spaced arc positions
    i*L/N (no duplicate seam ring), so the mesh has N*m vertices, 2*N*m
    triangles and Euler characteristic zero.
    """
    if m < 3:
        raise InvalidInput("need at least 3 vertices per ring")
    # Meshing only needs the seam to be tight relative to the ring spacing,
    # so the closure test here is looser than the admissibility default.
    if not is_closed(fc, pos_tol_rel=1e-4, tan_tol=1e-4):
        raise NotClosed("tube_mesh requires a closed midline")
    N = fc.n if stations is None else int(stations)
    if N < 3:
        raise InvalidInput("need at least 3 rings")
    s = (np.arange(N) * (fc.length / N))[:, None]
    theta = (np.arange(m) * (2.0 * np.pi / m))[None, :]
    z1 = cs.radius * np.cos(theta) + 0.0 * s
    z2 = cs.radius * np.sin(theta) + 0.0 * s
    verts = tube_points(fc, s + 0.0 * theta, z1, z2, cs).reshape(-1, 3)

    ii, jj = np.meshgrid(np.arange(N), np.arange(m), indexing="ij")
    v00 = ii * m + jj
    v10 = ((ii + 1) % N) * m + jj
    v01 = ii * m + (jj + 1) % m
    v11 = ((ii + 1) % N) * m + (jj + 1) % m
    tri_a = np.stack([v00, v10, v11], axis=-1).reshape(-1, 3)
    tri_b = np.stack([v00, v11, v01], axis=-1).reshape(-1, 3)
    tris = np.concatenate([tri_a, tri_b], axis=0)
    return TriMesh.free(verts, tris)


def margin_samples(df: DensityField, cs: CrossSection) -> np.ndarray:
    """Per-node local injectivity margin a * sqrt(kappa1^2 + kappa2^2).

    The tube map Jacobian determinant is 1 - z1*kappa1 - z2*kappa2, so over
    the section disk of half-thickness a its worst value is 1 minus this
    margin; samples below one certify local injectivity.
    """
    return cs.max_thickness * np.hypot(df.kappa1, df.kappa2)


def resample(df: DensityField, n2: int) -> DensityField:
    """Linear resampling of every channel onto an n2-node grid."""
    if n2 < 8:
        raise InvalidInput("need at least 8 density nodes")
    old = df.grid
    new = np.linspace(0.0, df.L, n2)
    return DensityField(
        df.L,
        np.interp(new, old, df.kappa1),
        np.interp(new, old, df.kappa2),
        np.interp(new, old, df.twist),
    )
