"""Outer minimization: alternating film relaxation and rod-parameter descent.

The film block runs gradient descent on area at frozen rods. The rod block
takes one projected-gradient step on the reduced parameters (Fourier density
coefficients plus the free placement), where the projection removes
first-order closure violation and a Newton correction knocks the residual
back down after the step. Constraints enter as quadratic penalties; the
topological invariants are protected by outright step rejection, never by a
penalty, because an integer cannot be nudged.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constraints import (
    ConstraintReport,
    admissibility,
    cn_tolerance,
    embedded_certificate,
    ciarlet_necas_residual,
    local_injectivity_margin,
    nonlocal_self_clearance,
    tube_disjointness,
)
from .energy import (
    ElasticDensity,
    EnergyReport,
    ParameterBasis,
    loop_energy,
    loop_energy_gradient,
    realize,
    total_energy,
)
from .errors import (
    InitInadmissible,
    InvalidInput,
    InvariantBroken,
    KPlateauError,
    ProbeConstructionFailed,
)
from .film import _embed, init_spanning_mesh, probe_rim_clearance, relax_area
from .mesh import FREE, TriMesh, area, triangle_areas
from .rod import LinkConfig, closure_residual
from .topology import (
    InvariantRecord,
    crossing_linking_number,
    hausdorff_distance,
    make_probe_family,
    self_linking,
    spanning_certificate,
)

__all__ = [
    "PenaltyWeights",
    "SolveOptions",
    "TraceRow",
    "SolveTrace",
    "penalty_energy",
    "solve_kirchhoff_plateau",
    "minimize_loop_only",
]


@dataclass(frozen=True)
class PenaltyWeights:
    """Quadratic penalty weights for the four continuous constraint groups."""

    closure: float = 1.0
    margin: float = 1.0
    cn: float = 1.0
    gap: float = 1.0

    def __post_init__(self):
        for name in ("closure", "margin", "cn", "gap"):
            if getattr(self, name) < 0:
                raise InvalidInput(f"penalty weight {name} must be non-negative")

    def scaled(self, factor: float) -> "PenaltyWeights":
        return PenaltyWeights(
            self.closure * factor,
            self.margin * factor,
            self.cn * factor,
            self.gap * factor,
        )


@dataclass(frozen=True)
class SolveOptions:
    outer_iters: int = 40
    film_steps_per_outer: int = 200
    weights: PenaltyWeights = field(default_factory=PenaltyWeights)
    growth: float = 4.0
    step_clamp: float | None = None
    grad_tol: float = 1e-8
    outer_tol: float = 1e-10
    margin_eps: float = 0.05
    fd_step: float = 1e-5
    harmonics: int = 1
    mesh_stations: int = 48
    mesh_rings: int = 8
    voxel: float | None = None
    energy_bound: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.outer_iters < 1:
            raise InvalidInput("need at least one outer iteration")
        if self.growth < 1.0:
            raise InvalidInput("penalty growth factor must be >= 1")
        if self.step_clamp is not None and self.step_clamp <= 0:
            raise InvalidInput("step clamp must be positive")
        if not (0.0 < self.margin_eps < 1.0):
            raise InvalidInput("margin_eps must lie in (0, 1)")


def _penalty_parts(
    link: LinkConfig,
    curves,
    margin_eps: float = 0.05,
    voxel: float | None = None,
) -> dict:
    """Unweighted quadratic violation terms, zero when satisfied with margin.

    The volume term trusts the cheap embeddedness certificate first and only
    falls back to the voxel estimate when the certificate cannot vouch for
    the tube; the estimate is then charged only beyond its own tolerance so
    sampling noise never shows up as a violation.
    """
    rods = link.rods
    closure = 0.0
    margin = 0.0
    cn = 0.0
    for fc, (df, _, cs) in zip(curves, rods):
        pos, tan = closure_residual(fc)
        # hinge at the admissibility band so a closed-to-tolerance rod pays
        # nothing; raises from integration roundoff would otherwise never
        # let the penalty reach zero
        closure += max(0.0, pos / df.L - 1e-6) ** 2 + max(0.0, tan - 1e-6) ** 2
        margin += max(0.0, local_injectivity_margin(df, cs) - 1.0 + margin_eps) ** 2
        if not embedded_certificate(fc, df, cs):
            res = ciarlet_necas_residual(fc, df, cs, voxel)
            cn += max(0.0, -(res + cn_tolerance(fc, cs, voxel))) ** 2
    gap = 0.0
    if link.rod2 is not None:
        g = tube_disjointness(curves[0], rods[0][2], curves[1], rods[1][2])
        gap = max(0.0, -g) ** 2
    return {"closure": closure, "margin": margin, "cn": cn, "gap": gap}


def penalty_energy(
    link: LinkConfig,
    mesh: TriMesh | None,
    weights: PenaltyWeights,
    curves=None,
    margin_eps: float = 0.05,
    voxel: float | None = None,
) -> float:
    """Weighted sum of the quadratic constraint penalties.

    `mesh` is accepted for call-site symmetry with the energy bookkeeping but
    carries no penalty of its own: the film enters the objective through its
    area, and the spanning class is guarded by certificates, not weights.
    """
    if curves is None:
        curves = realize(link)
    parts = _penalty_parts(link, curves, margin_eps, voxel)
    return (
        weights.closure * parts["closure"]
        + weights.margin * parts["margin"]
        + weights.cn * parts["cn"]
        + weights.gap * parts["gap"]
    )


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    energy: EnergyReport
    constraints: ConstraintReport
    invariants: InvariantRecord
    penalties: float
    area: float
    hausdorff_step: float
    grad_norm: float
    weight_scale: float

    @property
    def penalized(self) -> float:
        return self.energy.e_total + self.penalties


@dataclass
class SolveTrace:
    rows: list = field(default_factory=list)
    converged: bool = False

    def invariants_constant(self) -> bool:
        if not self.rows:
            return True
        first = self.rows[0].invariants
        return all(row.invariants == first for row in self.rows)

    def penalized_monotone(self, slack: float = 0.0) -> bool:
        """Non-increasing penalized energy within fixed-weight stretches."""
        rows = self.rows
        for prev, cur in zip(rows, rows[1:]):
            if cur.weight_scale != prev.weight_scale:
                continue
            if cur.penalized > prev.penalized + slack:
                return False
        return True


def _invariants_of(curves, link: LinkConfig) -> InvariantRecord:
    lk12 = None
    sl2 = None
    if link.rod2 is not None:
        lk12 = crossing_linking_number(curves[0], curves[1])
        sl2 = self_linking(curves[1], link.rod2[2].radius / 2.0)
    sl1 = self_linking(curves[0], link.rod1[2].radius / 2.0)
    return InvariantRecord(lk12, sl1, sl2)


def _closure_vector(curves, lengths) -> np.ndarray:
    parts = []
    for fc, L in zip(curves, lengths):
        parts.append((fc.r[-1] - fc.r[0]) / L)
        parts.append(fc.w[-1] - fc.w[0])
    return np.concatenate(parts)


def _null_project(J: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Remove from g the directions changing the constraints to first order."""
    JJt = J @ J.T
    lam, *_ = np.linalg.lstsq(JJt, J @ g, rcond=None)
    return g - J.T @ lam


def _restore(theta, J, cvec) -> np.ndarray:
    """One Gauss-Newton correction pushing the closure residual toward zero."""
    JJt = J @ J.T
    lam, *_ = np.linalg.lstsq(JJt, cvec, rcond=None)
    return theta - J.T @ lam


def _max_node_shift(curves_a, curves_b) -> float:
    return max(
        float(np.abs(fb.r - fa.r).max()) for fa, fb in zip(curves_a, curves_b)
    )


class _FilmState:
    """Mutable film mesh bookkeeping shared by the outer blocks."""

    def __init__(self, mesh: TriMesh):
        self.mesh = mesh
        self.refresh()

    def refresh(self):
        m = self.mesh
        self.bnd = m.attach_rod != FREE
        self.rod_ids = m.attach_rod[self.bnd]
        self.s = m.attach_s[self.bnd]
        self.theta = m.attach_theta[self.bnd]

    def deformed_area(self, curves, sections) -> float:
        tubes = [(fc, cs) for fc, cs in zip(curves, sections)]
        verts = self.mesh.vertices.copy()
        verts[self.bnd] = _embed(tubes, self.rod_ids, self.s, self.theta)
        return float(triangle_areas(verts, self.mesh.triangles).sum())

    def reattach(self, curves, sections):
        tubes = [(fc, cs) for fc, cs in zip(curves, sections)]
        verts = self.mesh.vertices.copy()
        verts[self.bnd] = _embed(tubes, self.rod_ids, self.s, self.theta)
        self.mesh = self.mesh.with_vertices(verts)


def _solve_outer(
    link: LinkConfig,
    ed1: ElasticDensity,
    ed2: ElasticDensity | None,
    sigma: float,
    opts: SolveOptions,
    with_film: bool,
):
    ed2_eff = ed2 if ed2 is not None else ed1
    curves = realize(link)
    sections = [cs for _, _, cs in link.rods]
    report0 = admissibility(
        link,
        curves,
        energy_bound=opts.energy_bound,
        ed1=ed1,
        ed2=ed2_eff,
        voxel=opts.voxel,
    )
    if not report0.admissible:
        failed = sorted(k for k, v in report0.checks.items() if not v)
        raise InitInadmissible(f"initial configuration fails: {', '.join(failed)}")
    targets = report0.invariants

    basis = ParameterBasis(link, opts.harmonics)
    projected = basis.decode(basis.encode(link), link)
    proj_curves = realize(projected)
    if _max_node_shift(curves, proj_curves) > 1e-6 * max(df.L for df, _, _ in link.rods):
        raise InitInadmissible(
            "parameter basis cannot represent the initial densities; "
            "raise `harmonics` or resample the input"
        )
    link = projected
    curves = proj_curves

    probes = None
    film = None
    if with_film:
        try:
            probes = make_probe_family(
                curves[0],
                sections[0],
                curves[1] if link.rod2 is not None else None,
                sections[1] if link.rod2 is not None else None,
            )
        except ProbeConstructionFailed as exc:
            raise InitInadmissible(f"no spanning class certificate: {exc}") from exc
        tubes = list(zip(curves, sections))
        film = _FilmState(
            init_spanning_mesh(
                tubes, stations=opts.mesh_stations, rings=opts.mesh_rings, probes=probes
            )
        )

    trace = SolveTrace()
    weights = opts.weights
    weight_scale = 1.0
    tau = None
    prev_mesh_pts = film.mesh.vertices.copy() if with_film else curves[0].r.copy()

    def record(iteration: int, grad_norm: float):
        nonlocal prev_mesh_pts
        mesh = film.mesh if with_film else None
        energy = total_energy(link, ed1, ed2_eff, sigma, mesh, curves)
        constraints = admissibility(
            link,
            curves,
            targets=targets,
            energy_bound=opts.energy_bound,
            ed1=ed1,
            ed2=ed2_eff,
            voxel=opts.voxel,
        )
        pen = penalty_energy(
            link, mesh, weights, curves, opts.margin_eps, opts.voxel
        )
        pts = mesh.vertices if with_film else curves[0].r
        step = hausdorff_distance(prev_mesh_pts, pts) if trace.rows else 0.0
        prev_mesh_pts = pts.copy()
        row = TraceRow(
            iteration=iteration,
            energy=energy,
            constraints=constraints,
            invariants=constraints.invariants,
            penalties=pen,
            area=area(mesh) if mesh is not None else 0.0,
            hausdorff_step=step,
            grad_norm=grad_norm,
            weight_scale=weight_scale,
        )
        trace.rows.append(row)
        if constraints.invariants != targets:
            raise InvariantBroken(
                f"invariants drifted to {constraints.invariants} at iteration {iteration}",
                trace,
            )
        return constraints

    record(0, np.inf)

    for outer in range(1, opts.outer_iters + 1):
        # film block: descend area at frozen rods, step bounded so the rim
        # cannot cross a probe loop or another tube within one update
        if with_film:
            clamps = [probe_rim_clearance(film.mesh, probes) * 0.5]
            if link.rod2 is not None:
                clamps.append(
                    0.25
                    * (
                        tube_disjointness(curves[0], sections[0], curves[1], sections[1])
                        + sections[0].radius
                        + sections[1].radius
                    )
                )
            tubes = list(zip(curves, sections))
            res = relax_area(
                film.mesh,
                tubes,
                steps=opts.film_steps_per_outer,
                max_step=min(clamps),
            )
            film.mesh = res.mesh
            film.refresh()
            film_converged = res.converged
        else:
            film_converged = True

        # rod block: projected FD gradient with closure restoration
        theta0 = basis.encode(link)
        p = basis.param_count
        steps_vec = opts.fd_step * np.maximum(1.0, np.abs(theta0))
        lengths = [df.L for df, _, _ in link.rods]
        closures: list[np.ndarray] = []

        def extra(lnk, crv):
            closures.append(_closure_vector(crv, lengths))
            e = penalty_energy(lnk, None, weights, crv, opts.margin_eps, opts.voxel)
            if with_film and sigma > 0.0:
                e += 2.0 * sigma * film.deformed_area(crv, sections)
            return e

        grad = loop_energy_gradient(
            link, ed1, ed2_eff, basis=basis, extra=extra, fd_step=opts.fd_step
        )
        J = np.stack(
            [(closures[2 * j] - closures[2 * j + 1]) / (2.0 * steps_vec[j]) for j in range(p)],
            axis=1,
        )
        g_proj = _null_project(J, grad)
        grad_norm = float(np.linalg.norm(g_proj))
        # below this level the central differences are cancellation noise,
        # so the safe reading of the gradient is "stationary"
        e_scale = abs(loop_energy(link, ed1, ed2_eff, curves))
        noise_floor = 4e-16 * e_scale * float(np.linalg.norm(1.0 / steps_vec))
        grad_tol_eff = max(opts.grad_tol, noise_floor)

        def penalized_at(lnk, crv) -> float:
            e = loop_energy(lnk, ed1, ed2_eff, crv)
            e += penalty_energy(lnk, None, weights, crv, opts.margin_eps, opts.voxel)
            if with_film and sigma > 0.0:
                e += 2.0 * sigma * film.deformed_area(crv, sections)
            return e

        e_now = penalized_at(link, curves)

        clamp = opts.step_clamp
        if clamp is None:
            scale = 0.0
            if link.rod2 is not None:
                scale = 0.25 * max(
                    tube_disjointness(curves[0], sections[0], curves[1], sections[1]),
                    0.0,
                )
            self_scale = 0.25 * max(
                nonlocal_self_clearance(curves[0], sections[0]), 0.0
            )
            clamp = max(scale, self_scale, 1e-3 * min(lengths))

        moved = False
        if grad_norm > grad_tol_eff:
            if tau is None:
                tau = 0.05 * max(1.0, float(np.abs(theta0).max())) / max(
                    grad_norm, 1e-30
                )
            trial = tau
            for _ in range(40):
                theta_c = theta0 - trial * g_proj
                try:
                    link_c = basis.decode(theta_c, link)
                    curves_c = realize(link_c)
                    cvec = _closure_vector(curves_c, lengths)
                    if float(np.abs(cvec).max()) > 1e-12:
                        theta_c = _restore(theta_c, J, cvec)
                        link_c = basis.decode(theta_c, link)
                        curves_c = realize(link_c)
                except KPlateauError:
                    trial *= 0.5
                    continue
                pos_ok = all(
                    closure_residual(fc)[0] <= 0.5e-6 * L and closure_residual(fc)[1] <= 0.5e-6
                    for fc, L in zip(curves_c, lengths)
                )
                if not pos_ok or _max_node_shift(curves, curves_c) > clamp:
                    trial *= 0.5
                    continue
                try:
                    inv_c = _invariants_of(curves_c, link_c)
                except KPlateauError:
                    trial *= 0.5
                    continue
                if inv_c != targets:
                    trial *= 0.5
                    continue
                e_c = penalized_at(link_c, curves_c)
                if e_c < e_now - max(1e-4 * trial * grad_norm**2, 1e-12 * abs(e_now)):
                    link = link_c
                    curves = curves_c
                    tau = trial * 1.5
                    moved = True
                    break
                trial *= 0.5
            else:
                tau = None

        if moved and with_film:
            film.reattach(curves, sections)
            try:
                probes = make_probe_family(
                    curves[0],
                    sections[0],
                    curves[1] if link.rod2 is not None else None,
                    sections[1] if link.rod2 is not None else None,
                )
            except ProbeConstructionFailed as exc:
                raise InvariantBroken(
                    f"probe family lost after re-attachment: {exc}", trace
                ) from exc
            if not spanning_certificate(film.mesh, probes).passed:
                raise InvariantBroken(
                    "film stopped spanning the prescribed class after re-attachment",
                    trace,
                )

        constraints = record(outer, grad_norm)

        parts = _penalty_parts(link, curves, opts.margin_eps, opts.voxel)
        violated = any(v > 0.0 for v in parts.values())
        if violated and not moved:
            weights = weights.scaled(opts.growth)
            weight_scale *= opts.growth
            tau = None
            continue

        if not moved and film_converged and not violated:
            trace.converged = True
            break

        if len(trace.rows) >= 2:
            a, b = trace.rows[-2].penalized, trace.rows[-1].penalized
            if (
                not violated
                and film_converged
                and abs(a - b) <= opts.outer_tol * max(1.0, abs(a))
                and grad_norm <= max(np.sqrt(opts.grad_tol), grad_tol_eff)
            ):
                trace.converged = True
                break

    final_constraints = trace.rows[-1].constraints
    if with_film:
        if not spanning_certificate(film.mesh, probes).passed:
            raise InvariantBroken("final film fails the spanning certificate", trace)
        return link, film.mesh, trace, final_constraints
    return link, trace, final_constraints


def solve_kirchhoff_plateau(
    link: LinkConfig,
    ed1: ElasticDensity,
    ed2: ElasticDensity | None,
    sigma: float,
    opts: SolveOptions | None = None,
):
    """Minimize rod energy plus film area over admissible configurations.

    Returns the final configuration, the relaxed film, and the trace. The
    film is rebuilt from the initial curves and follows the rods through the
    run; every accepted outer step keeps the topological invariants and the
    spanning certificate, and the penalized energy never increases while the
    weights are held fixed.
    """
    opts = opts or SolveOptions()
    link_f, mesh, trace, _ = _solve_outer(link, ed1, ed2, sigma, opts, with_film=True)
    return link_f, mesh, trace


def minimize_loop_only(
    link: LinkConfig,
    ed1: ElasticDensity,
    ed2: ElasticDensity | None = None,
    opts: SolveOptions | None = None,
):
    """Same outer loop with no film and no surface tension.

    The Hausdorff column of the trace tracks the clamped rod's midline
    instead of film vertices, since there is no film to follow.
    """
    opts = opts or SolveOptions()
    link_f, trace, _ = _solve_outer(link, ed1, None if ed2 is None else ed2, 0.0, opts, with_film=False)
    return link_f, trace
