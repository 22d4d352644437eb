"""Elastic, weight and film energies plus the reduced parameter basis.

The loop energy lives on density fields and placements; the reduced basis
maps a flat coefficient vector (truncated Fourier series per density channel
plus the rigid placement of the second loop) to full configurations so that
finite differences stay low-dimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GradientUndefined, InvalidInput
from .mesh import TriMesh, area
from .rod import (
    CrossSection,
    DensityField,
    Frame,
    FramedCurve,
    LinkConfig,
    Placement,
    integrate_frame,
    integrate_frame_batch,
    margin_samples,
)
from .util import rodrigues

__all__ = [
    "ElasticDensity",
    "EnergyReport",
    "ParameterBasis",
    "elastic_energy",
    "gravity_energy",
    "film_energy",
    "total_energy",
    "loop_energy",
    "realize",
    "loop_energy_gradient",
]


@dataclass(frozen=True)
class ElasticDensity:
    """Quadratic stiffness coefficients and the self-contact barrier weight."""

    a1: float
    a2: float
    a3: float
    barrier_eps: float = 0.0

    def __post_init__(self):
        if min(self.a1, self.a2, self.a3) <= 0:
            raise InvalidInput("stiffness coefficients must be positive")
        if not 0.0 <= self.barrier_eps <= 0.2:
            raise InvalidInput("barrier_eps must lie in [0, 0.2]")


def _trapezoid(values: np.ndarray, dx: float) -> float:
    return float(dx * (0.5 * (values[0] + values[-1]) + values[1:-1].sum()))


def energy_density_samples(df: DensityField, ed: ElasticDensity, cs: CrossSection) -> np.ndarray:
    """Pointwise stored-energy density along the rod.

    Quadratic in the flexural densities and the twist; when barrier_eps is
    positive a rational barrier in the injectivity margin g = a*|kappa| is
    added, diverging as g -> 1 and +inf beyond.
    """
    quad = 0.5 * (ed.a1 * df.kappa1**2 + ed.a2 * df.kappa2**2 + ed.a3 * df.twist**2)
    if ed.barrier_eps == 0.0:
        return quad
    g = margin_samples(df, cs)
    out = np.full_like(quad, np.inf)
    ok = g < 1.0
    gg = g[ok] ** 2
    out[ok] = quad[ok] + ed.barrier_eps * ed.a1 * gg / (1.0 - gg)
    return out


def elastic_energy(df: DensityField, ed: ElasticDensity, cs: CrossSection) -> float:
    f = energy_density_samples(df, ed, cs)
    if not np.all(np.isfinite(f)):
        return math.inf
    return _trapezoid(f, df.L / (df.n - 1))


def gravity_energy(fc: FramedCurve, rho: float, gravity: np.ndarray) -> float:
    """Weight potential -rho * integral of gravity . r over arclength."""
    g = np.asarray(gravity, dtype=float)
    return -rho * _trapezoid(fc.r @ g, fc.h)


def film_energy(mesh_or_area, sigma: float) -> float:
    """Lateral surface energy 2 * sigma * area of the two-sided film."""
    if sigma < 0:
        raise InvalidInput("surface tension must be non-negative")
    a = area(mesh_or_area) if isinstance(mesh_or_area, TriMesh) else float(mesh_or_area)
    return 2.0 * sigma * a


def realize(link: LinkConfig):
    """Integrate every rod of a configuration into framed curves."""
    return tuple(integrate_frame(df, placement) for df, placement, _ in link.rods)


def loop_energy(link: LinkConfig, ed1: ElasticDensity, ed2: ElasticDensity, curves=None) -> float:
    """Elastic plus weight energy of the rods alone."""
    if curves is None:
        curves = realize(link)
    eds = (ed1, ed2)
    total = 0.0
    for idx, (rod, fc) in enumerate(zip(link.rods, curves)):
        df, _, cs = rod
        total += elastic_energy(df, eds[idx], cs)
        total += gravity_energy(fc, link.rho[idx], link.gravity)
    return total


@dataclass(frozen=True)
class EnergyReport:
    e_el1: float
    e_el2: float
    e_g1: float
    e_g2: float
    e_film: float
    e_total: float
    barrier_active: bool


def total_energy(
    link: LinkConfig,
    ed1: ElasticDensity,
    ed2: ElasticDensity,
    sigma: float = 0.0,
    mesh: TriMesh | None = None,
    curves=None,
) -> EnergyReport:
    if curves is None:
        curves = realize(link)
    df1, _, cs1 = link.rod1
    e_el1 = elastic_energy(df1, ed1, cs1)
    e_g1 = gravity_energy(curves[0], link.rho[0], link.gravity)
    if link.rod2 is not None:
        df2, _, cs2 = link.rod2
        e_el2 = elastic_energy(df2, ed2, cs2)
        e_g2 = gravity_energy(curves[1], link.rho[1], link.gravity)
    else:
        e_el2 = 0.0
        e_g2 = 0.0
    e_film = film_energy(mesh, sigma) if mesh is not None else 0.0
    hot = margin_samples(df1, cs1).max() >= 1.0
    if link.rod2 is not None:
        hot = hot or margin_samples(link.rod2[0], link.rod2[2]).max() >= 1.0
    return EnergyReport(
        e_el1=e_el1,
        e_el2=e_el2,
        e_g1=e_g1,
        e_g2=e_g2,
        e_film=e_film,
        e_total=e_el1 + e_el2 + e_g1 + e_g2 + e_film,
        barrier_active=bool(hot),
    )


def fourier_columns(L: float, n: int, harmonics: int) -> np.ndarray:
    """Constant plus cos/sin pairs sampled on the uniform arclength grid."""
    s = np.linspace(0.0, L, n)
    cols = [np.ones(n)]
    for j in range(1, harmonics + 1):
        arg = 2.0 * np.pi * j * s / L
        cols.append(np.cos(arg))
        cols.append(np.sin(arg))
    return np.stack(cols, axis=1)


class ParameterBasis:
    """Flat parameter vector <-> configuration map.

    Layout: three density channels per rod, each with 2*harmonics + 1
    Fourier coefficients, followed (when a second rod exists) by its rigid
    placement as translation plus rotation vector. Placement entries are
    offsets from the companion configuration handed to decode, so encode
    always returns zeros there.
    """

    def __init__(self, link: LinkConfig, harmonics: int = 1):
        if harmonics < 0:
            raise InvalidInput("harmonics must be non-negative")
        self.harmonics = harmonics
        self.m = 2 * harmonics + 1
        df1 = link.rod1[0]
        self.b1 = fourier_columns(df1.L, df1.n, harmonics)
        self.has_rod2 = link.rod2 is not None
        if self.has_rod2:
            df2 = link.rod2[0]
            self.b2 = fourier_columns(df2.L, df2.n, harmonics)
        else:
            self.b2 = None

    @property
    def param_count(self) -> int:
        count = 3 * self.m
        if self.has_rod2:
            count += 3 * self.m + 6
        return count

    def _fit(self, basis: np.ndarray, samples: np.ndarray) -> np.ndarray:
        coeffs, *_ = np.linalg.lstsq(basis, samples, rcond=None)
        return coeffs

    def encode(self, link: LinkConfig) -> np.ndarray:
        df1 = link.rod1[0]
        parts = [
            self._fit(self.b1, df1.kappa1),
            self._fit(self.b1, df1.kappa2),
            self._fit(self.b1, df1.twist),
        ]
        if self.has_rod2:
            df2 = link.rod2[0]
            parts += [
                self._fit(self.b2, df2.kappa1),
                self._fit(self.b2, df2.kappa2),
                self._fit(self.b2, df2.twist),
                np.zeros(6),
            ]
        return np.concatenate(parts)

    def decode(self, theta: np.ndarray, link: LinkConfig) -> LinkConfig:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.param_count,):
            raise InvalidInput(f"expected {self.param_count} parameters")
        m = self.m
        df1, pl1, cs1 = link.rod1
        new1 = DensityField(
            df1.L,
            self.b1 @ theta[0 * m : 1 * m],
            self.b1 @ theta[1 * m : 2 * m],
            self.b1 @ theta[2 * m : 3 * m],
        )
        rod2 = None
        if self.has_rod2:
            df2, pl2, cs2 = link.rod2
            new2 = DensityField(
                df2.L,
                self.b2 @ theta[3 * m : 4 * m],
                self.b2 @ theta[4 * m : 5 * m],
                self.b2 @ theta[5 * m : 6 * m],
            )
            shift = theta[6 * m : 6 * m + 3]
            rot = rodrigues(theta[6 * m + 3 : 6 * m + 6])
            mat = pl2.frame.matrix @ rot.T
            frame = Frame(mat[0], mat[1], mat[2])
            rod2 = (new2, Placement(pl2.origin + shift, frame), cs2)
        return LinkConfig(
            rod1=(new1, pl1, cs1),
            rod2=rod2,
            rho=link.rho,
            gravity=link.gravity,
            slenderness_ratio=link.slenderness_ratio,
        )


def _rigid_curves(fc: FramedCurve, origin: np.ndarray, shift: np.ndarray, phi: np.ndarray) -> FramedCurve:
    """Apply the placement offset (shift, rotation vector) to a realized curve."""
    rot = rodrigues(phi)
    r = (fc.r - origin) @ rot.T + origin + shift
    frames = fc.frames @ rot.T
    return FramedCurve(fc.h, r, frames)


def loop_energy_gradient(
    link: LinkConfig,
    ed1: ElasticDensity,
    ed2: ElasticDensity,
    basis: ParameterBasis | None = None,
    extra=None,
    fd_step: float = 1e-5,
) -> np.ndarray:
    """Central-difference gradient of the reduced loop energy.

    `extra(link_variant, curves_variant)` lets callers append penalty or
    coupling terms; density perturbations re-integrate the affected rod in a
    single batch, placement perturbations reuse the base curve rigidly.
    """
    if basis is None:
        basis = ParameterBasis(link)
    theta0 = basis.encode(link)
    base = basis.decode(theta0, link)
    curves0 = realize(base)
    p = basis.param_count
    steps = fd_step * np.maximum(1.0, np.abs(theta0))

    thetas = np.repeat(theta0[None, :], 2 * p, axis=0)
    rows = np.arange(p)
    thetas[2 * rows, rows] += steps
    thetas[2 * rows + 1, rows] -= steps

    links = [basis.decode(t, link) for t in thetas]

    m = basis.m
    n_rod1 = 3 * m
    curves = [None] * (2 * p)

    def integrate_block(indices, rod_idx):
        if not indices:
            return
        dfs = [links[i].rods[rod_idx][0] for i in indices]
        placement = links[indices[0]].rods[rod_idx][1]
        k1 = np.stack([d.kappa1 for d in dfs])
        k2 = np.stack([d.kappa2 for d in dfs])
        tw = np.stack([d.twist for d in dfs])
        B = len(indices)
        origins = np.repeat(placement.origin[None, :], B, axis=0)
        frames0 = np.repeat(placement.frame.matrix[None, :, :], B, axis=0)
        r, fr = integrate_frame_batch(dfs[0].L, k1, k2, tw, origins, frames0)
        h = dfs[0].L / (dfs[0].n - 1)
        for j, i in enumerate(indices):
            fc = FramedCurve(h, r[j], fr[j])
            pair = list(curves0)
            pair[rod_idx] = fc
            curves[i] = tuple(pair)

    rod1_vars = [i for i in range(2 * p) if (i // 2) < n_rod1]
    integrate_block(rod1_vars, 0)
    if basis.has_rod2:
        rod2_density = [i for i in range(2 * p) if n_rod1 <= (i // 2) < 2 * n_rod1]
        integrate_block(rod2_density, 1)
        origin2 = link.rod2[1].origin
        for i in range(2 * p):
            if (i // 2) >= 2 * n_rod1:
                shift = thetas[i, 6 * m : 6 * m + 3]
                phi = thetas[i, 6 * m + 3 : 6 * m + 6]
                fc2 = _rigid_curves(curves0[1], origin2, shift, phi)
                curves[i] = (curves0[0], fc2)

    energies = np.empty(2 * p)
    for i in range(2 * p):
        e = loop_energy(links[i], ed1, ed2, curves[i])
        if extra is not None:
            e += extra(links[i], curves[i])
        energies[i] = e
    if not np.all(np.isfinite(energies)):
        bad = int(np.argmax(~np.isfinite(energies)))
        raise GradientUndefined(f"energy not finite at stencil point {bad}")
    return (energies[0::2] - energies[1::2]) / (2.0 * steps)
