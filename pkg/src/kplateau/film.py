"""Spanning film: seed meshes, area gradient descent, local remeshing.

The film is one triangulated manifold-with-boundary. Interior vertices move
freely along the negative area gradient; boundary vertices slide on their
tube surface, so the contact line is an outcome of the descent rather than
a prescription.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateMesh, InitFailed, InvalidInput, ProbeConstructionFailed
from .loft import band_attachments, disk_attachment
from .mesh import FREE, TriMesh, triangle_areas
from .rod import tube_frame_at, tube_points
from .topology import make_probe_family, spanning_certificate

__all__ = [
    "init_spanning_mesh",
    "relax_area",
    "remesh",
    "RelaxResult",
    "film_quality",
    "probe_rim_clearance",
    "verify_attachments",
]


def film_quality(vertices: np.ndarray, triangles: np.ndarray) -> float:
    """Worst triangle shape quality 4*sqrt(3)*A / sum(edge^2); 1 is equilateral."""
    if triangles.shape[0] == 0:
        return 1.0
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    areas = triangle_areas(vertices, triangles)
    l2 = (
        np.sum((b - a) ** 2, axis=1)
        + np.sum((c - b) ** 2, axis=1)
        + np.sum((a - c) ** 2, axis=1)
    )
    with np.errstate(invalid="ignore", divide="ignore"):
        q = 4.0 * np.sqrt(3.0) * areas / l2
    return float(np.nanmin(np.where(l2 > 0, q, 0.0)))


def _embed(tubes, rod_ids, s, theta):
    """Positions on tube surfaces for per-vertex (rod, s, theta) coordinates."""
    out = np.empty((s.shape[0], 3))
    for k, (fc, cs) in enumerate(tubes):
        sel = rod_ids == k
        if not np.any(sel):
            continue
        sk = np.mod(s[sel], fc.length)
        out[sel] = tube_points(
            fc, sk, cs.radius * np.cos(theta[sel]), cs.radius * np.sin(theta[sel])
        )
    return out


def verify_attachments(mesh: TriMesh, tubes, tol_factor: float = 1e-8) -> None:
    """Check every attached vertex sits on its tube surface."""
    attached = mesh.attach_rod >= 0
    if not np.any(attached):
        return
    pos = _embed(tubes, mesh.attach_rod[attached], mesh.attach_s[attached], mesh.attach_theta[attached])
    err = np.linalg.norm(pos - mesh.vertices[attached], axis=1)
    radii = np.array([tubes[k][1].radius for k in mesh.attach_rod[attached]])
    if np.any(err > tol_factor * radii + 1e-14):
        raise InvalidInput("attached vertex off its tube surface")


def _disk_seed(tubes, stations: int, rings: int):
    fc, cs = tubes[0]
    s, theta, rim = disk_attachment(fc, cs, stations)
    center = rim.mean(axis=0)
    rows = [rim]
    for k in range(1, rings):
        lam = k / rings
        rows.append((1.0 - lam) * rim + lam * center)
    verts = np.concatenate(rows + [center[None, :]], axis=0)
    n = stations
    tris = []
    for k in range(rings - 1):
        base0 = k * n
        base1 = (k + 1) * n
        for j in range(n):
            jn = (j + 1) % n
            tris.append([base0 + j, base0 + jn, base1 + j])
            tris.append([base0 + jn, base1 + jn, base1 + j])
    base = (rings - 1) * n
    centre_idx = rings * n
    for j in range(n):
        jn = (j + 1) % n
        tris.append([base + j, base + jn, centre_idx])
    attach_rod = np.full(verts.shape[0], FREE, dtype=np.int64)
    attach_s = np.zeros(verts.shape[0])
    attach_theta = np.zeros(verts.shape[0])
    attach_rod[:n] = 0
    attach_s[:n] = s
    attach_theta[:n] = theta
    return TriMesh(verts, np.asarray(tris, dtype=np.int64), attach_rod, attach_s, attach_theta)


def _band_seed(tubes, stations: int, rings: int):
    (fc1, cs1), (fc2, cs2) = tubes
    (s1, t1, ring1), (s2, t2, ring2) = band_attachments(fc1, cs1, fc2, cs2, stations)
    rows = []
    for k in range(rings + 1):
        lam = k / rings
        rows.append((1.0 - lam) * ring1 + lam * ring2)
    verts = np.concatenate(rows, axis=0)
    n = stations
    tris = []
    for k in range(rings):
        base0 = k * n
        base1 = (k + 1) * n
        for j in range(n):
            jn = (j + 1) % n
            tris.append([base0 + j, base0 + jn, base1 + j])
            tris.append([base0 + jn, base1 + jn, base1 + j])
    nv = verts.shape[0]
    attach_rod = np.full(nv, FREE, dtype=np.int64)
    attach_s = np.zeros(nv)
    attach_theta = np.zeros(nv)
    attach_rod[:n] = 0
    attach_s[:n] = s1
    attach_theta[:n] = t1
    attach_rod[rings * n :] = 1
    attach_s[rings * n :] = s2
    attach_theta[rings * n :] = t2
    return TriMesh(verts, np.asarray(tris, dtype=np.int64), attach_rod, attach_s, attach_theta)


def init_spanning_mesh(tubes, stations: int = 48, rings: int = 8, probes=None) -> TriMesh:
    """Seed surface spanning one loop (disk fan) or two loops (ruled band).

    When `probes` is None a probe family is constructed on the spot for the
    certificate; pass an existing family to reuse it, or an empty tuple to
    skip verification.
    """
    if len(tubes) not in (1, 2):
        raise InvalidInput("need one or two tubes")
    if stations < 3 or rings < 1:
        raise InvalidInput("resolution too small")
    mesh = _disk_seed(tubes, stations, rings) if len(tubes) == 1 else _band_seed(tubes, stations, rings)
    if probes is None:
        try:
            if len(tubes) == 1:
                probes = make_probe_family(tubes[0][0], tubes[0][1])
            else:
                probes = make_probe_family(
                    tubes[0][0], tubes[0][1], tubes[1][0], tubes[1][1], want_d_class=True
                )
        except ProbeConstructionFailed as exc:
            raise InitFailed(f"no valid probe family: {exc}") from exc
    if probes:
        report = spanning_certificate(mesh, probes)
        if not report.passed:
            raise InitFailed("seed surface misses a probe loop")
    return mesh


def _area_gradient(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Exact gradient of total triangle area with respect to each vertex."""
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    c = np.cross(p1 - p0, p2 - p0)
    nrm = np.linalg.norm(c, axis=1, keepdims=True)
    nhat = np.divide(c, nrm, out=np.zeros_like(c), where=nrm > 0)
    g = np.zeros_like(vertices)
    np.add.at(g, triangles[:, 0], 0.5 * np.cross(p1 - p2, nhat))
    np.add.at(g, triangles[:, 1], 0.5 * np.cross(p2 - p0, nhat))
    np.add.at(g, triangles[:, 2], 0.5 * np.cross(p0 - p1, nhat))
    return g


def _rim_neighbors(tris: np.ndarray, n_vertices: int):
    """Two boundary-polyline neighbors per rim vertex (-1 when not on a rim)."""
    prev = np.full(n_vertices, -1, dtype=np.int64)
    nxt = np.full(n_vertices, -1, dtype=np.int64)
    if tris.size == 0:
        return prev, nxt
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]], axis=0)
    uniq, counts = np.unique(np.sort(edges, axis=1), axis=0, return_counts=True)
    rim = uniq[counts == 1]
    nb: list[list[int]] = [[] for _ in range(n_vertices)]
    for a, b in rim:
        nb[a].append(int(b))
        nb[b].append(int(a))
    for v, ns in enumerate(nb):
        if len(ns) == 2:
            prev[v], nxt[v] = ns[0], ns[1]
    return prev, nxt


def _boundary_tangents(tubes, rod_ids, s, theta):
    """Surface tangents along the station direction and around the section."""
    t_s = np.empty((s.shape[0], 3))
    t_th = np.empty_like(t_s)
    for k, (fc, cs) in enumerate(tubes):
        sel = rod_ids == k
        if not np.any(sel):
            continue
        a = cs.radius
        sk = np.mod(s[sel], fc.length)
        th = theta[sel]
        _, U = tube_frame_at(fc, sk)
        t_th[sel] = a * (-np.sin(th)[:, None] * U[:, 0] + np.cos(th)[:, None] * U[:, 1])
        delta = 1e-6 * fc.length
        z1 = a * np.cos(th)
        z2 = a * np.sin(th)
        hi = tube_points(fc, np.mod(sk + delta, fc.length), z1, z2)
        lo = tube_points(fc, np.mod(sk - delta, fc.length), z1, z2)
        t_s[sel] = (hi - lo) / (2.0 * delta)
    return t_s, t_th


@dataclass
class RelaxResult:
    mesh: TriMesh
    areas: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    min_quality: float = 1.0
    remesh_events: int = 0

    @property
    def area(self) -> float:
        return self.areas[-1] if self.areas else 0.0


def relax_area(
    mesh: TriMesh,
    tubes,
    steps: int = 200,
    step_size: float | None = None,
    max_step: float | None = None,
    grad_tol: float = 1e-10,
    quality_floor: float = 1e-3,
) -> RelaxResult:
    """Backtracking gradient descent on total area.

    Free vertices follow the exact area gradient; attached vertices slide in
    tube coordinates via the projected gradient. Accepted steps strictly
    decrease area. A quality collapse triggers one remesh attempt before
    DegenerateMesh.
    """
    verts = mesh.vertices.copy()
    tris = mesh.triangles.copy()
    rod_ids = mesh.attach_rod.copy()
    s = mesh.attach_s.copy()
    theta = mesh.attach_theta.copy()
    free = rod_ids == FREE
    bnd = ~free
    rim_prev, rim_next = _rim_neighbors(tris, verts.shape[0])

    result = RelaxResult(mesh=mesh)
    area_now = float(triangle_areas(verts, tris).sum())
    result.areas.append(area_now)
    tau = step_size
    remeshed = False

    for it in range(steps):
        g = _area_gradient(verts, tris)
        dec_rate = float(np.sum(g[free] ** 2))
        ds = np.zeros(s.shape[0])
        dth = np.zeros(s.shape[0])
        if np.any(bnd):
            t_s, t_th = _boundary_tangents(tubes, rod_ids[bnd], s[bnd], theta[bnd])
            # orthonormal basis of the tube tangent plane at each rim vertex
            e_a = t_s / np.linalg.norm(t_s, axis=1, keepdims=True)
            e_b = t_th - np.sum(t_th * e_a, axis=1, keepdims=True) * e_a
            e_b /= np.maximum(np.linalg.norm(e_b, axis=1, keepdims=True), 1e-300)
            gb = g[bnd]
            c_a = -np.sum(gb * e_a, axis=1)
            c_b = -np.sum(gb * e_b, axis=1)
            # Drop the component along the rim itself: sliding vertices along
            # their own boundary polyline only reparametrizes the discrete
            # contact line and shrinks the spanned polygon by bunching.
            idx_b = np.nonzero(bnd)[0]
            has_rim = (rim_prev[idx_b] >= 0) & (rim_next[idx_b] >= 0)
            t_rim = np.zeros_like(gb)
            t_rim[has_rim] = (
                verts[rim_next[idx_b[has_rim]]] - verts[rim_prev[idx_b[has_rim]]]
            )
            r_a = np.sum(t_rim * e_a, axis=1)
            r_b = np.sum(t_rim * e_b, axis=1)
            r_len = np.hypot(r_a, r_b)
            keep = r_len > 1e-12
            r_a = np.where(keep, r_a / np.where(keep, r_len, 1.0), 0.0)
            r_b = np.where(keep, r_b / np.where(keep, r_len, 1.0), 0.0)
            proj = c_a * r_a + c_b * r_b
            c_a -= proj * r_a
            c_b -= proj * r_b
            dvec = c_a[:, None] * e_a + c_b[:, None] * e_b
            # back to (s, theta) coefficients through the tangent metric
            a11 = np.sum(t_s * t_s, axis=1)
            a12 = np.sum(t_s * t_th, axis=1)
            a22 = np.sum(t_th * t_th, axis=1)
            r1 = np.sum(dvec * t_s, axis=1)
            r2 = np.sum(dvec * t_th, axis=1)
            det = a11 * a22 - a12 * a12
            det = np.where(det > 1e-300, det, 1.0)
            ds_b = (a22 * r1 - a12 * r2) / det
            dth_b = (a11 * r2 - a12 * r1) / det
            ds[bnd] = ds_b
            dth[bnd] = dth_b
            dec_rate += float(np.sum(c_a**2 + c_b**2))
            disp_b = np.hypot(c_a, c_b)
        else:
            disp_b = np.zeros(0)

        if dec_rate <= grad_tol**2:
            result.converged = True
            break

        disp_f = np.linalg.norm(g[free], axis=1)
        unit_disp = max(
            disp_f.max() if disp_f.size else 0.0, disp_b.max() if disp_b.size else 0.0
        )
        if unit_disp == 0.0:
            result.converged = True
            break
        if tau is None:
            edges = verts[tris[:, 1]] - verts[tris[:, 0]]
            tau = 0.25 * float(np.linalg.norm(edges, axis=1).mean()) / unit_disp
        if max_step is not None and tau * unit_disp > max_step:
            tau = max_step / unit_disp

        accepted = False
        trial = tau
        # The decrease floor keeps float rounding in the area sum from being
        # mistaken for progress once the surface is stationary.
        floor = 1e-13 * max(area_now, 1.0)
        for _ in range(30):
            cand = verts.copy()
            cand[free] = verts[free] - trial * g[free]
            if np.any(bnd):
                s_c = s[bnd] + trial * ds[bnd]
                th_c = theta[bnd] + trial * dth[bnd]
                cand[bnd] = _embed(tubes, rod_ids[bnd], s_c, th_c)
            area_c = float(triangle_areas(cand, tris).sum())
            if area_c < area_now - max(1e-4 * trial * dec_rate, floor):
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            result.converged = True
            break

        verts = cand
        if np.any(bnd):
            periods = np.array([fc.length for fc, _ in tubes])
            s[bnd] = np.mod(s_c, periods[rod_ids[bnd]])
            theta[bnd] = np.mod(th_c + np.pi, 2.0 * np.pi) - np.pi
        area_now = area_c
        result.areas.append(area_now)
        result.iterations = it + 1
        tau = trial * 1.3

        q = film_quality(verts, tris)
        result.min_quality = q
        if q < quality_floor:
            if remeshed:
                raise DegenerateMesh(f"triangle quality {q:.2e} after remesh")
            interim = TriMesh(verts, tris, rod_ids, s, theta)
            edges_all = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
            med = float(
                np.median(np.linalg.norm(verts[edges_all[:, 1]] - verts[edges_all[:, 0]], axis=1))
            )
            interim = remesh(interim, med, tubes=tubes)
            verts = interim.vertices.copy()
            tris = interim.triangles.copy()
            rod_ids = interim.attach_rod.copy()
            s = interim.attach_s.copy()
            theta = interim.attach_theta.copy()
            free = rod_ids == FREE
            bnd = ~free
            rim_prev, rim_next = _rim_neighbors(tris, verts.shape[0])
            area_now = float(triangle_areas(verts, tris).sum())
            result.areas.append(area_now)
            result.remesh_events += 1
            remeshed = True
            if film_quality(verts, tris) < quality_floor:
                raise DegenerateMesh("remesh could not recover triangle quality")

    result.mesh = TriMesh(verts, tris, rod_ids, s, theta)
    result.min_quality = film_quality(verts, tris)
    return result


def _wrap_half(delta: np.ndarray | float, period: float):
    return (delta + period / 2.0) % period - period / 2.0


def remesh(mesh: TriMesh, target_edge: float, tubes=None, probes=None, passes: int = 3) -> TriMesh:
    """Split long edges, collapse short ones, flip for quality.

    Attached vertices are never moved or removed; boundary edges between
    same-rod attached vertices split in tube coordinates (needs `tubes`),
    and are left alone otherwise. With `probes` the spanning certificate is
    re-verified at the end.
    """
    if target_edge <= 0:
        raise InvalidInput("target edge must be positive")
    verts = [v for v in mesh.vertices]
    tris = [tuple(t) for t in mesh.triangles]
    rod = list(mesh.attach_rod)
    att_s = list(mesh.attach_s)
    att_t = list(mesh.attach_theta)

    def edge_map():
        em = {}
        for f, t in enumerate(tris):
            if t is None:
                continue
            for i in range(3):
                e = tuple(sorted((t[i], t[(i + 1) % 3])))
                em.setdefault(e, []).append(f)
        return em

    def split_pass():
        em = edge_map()
        changed = False
        order = sorted(
            em.keys(),
            key=lambda e: -float(np.linalg.norm(verts[e[0]] - verts[e[1]])),
        )
        for e in order:
            a, b = e
            length = float(np.linalg.norm(verts[a] - verts[b]))
            if length <= 1.5 * target_edge:
                break
            faces = em[e]
            if any(tris[f] is None for f in faces):
                continue
            on_boundary = len(faces) == 1
            same_rod = rod[a] == rod[b] and rod[a] != FREE
            if on_boundary and not (same_rod and tubes is not None):
                continue
            if on_boundary and same_rod and tubes is not None:
                fc, cs = tubes[rod[a]]
                L = fc.length
                sm = (att_s[a] + _wrap_half(att_s[b] - att_s[a], L) / 2.0) % L
                tm = att_t[a] + _wrap_half(att_t[b] - att_t[a], 2 * np.pi) / 2.0
                pos = _embed(tubes, np.array([rod[a]]), np.array([sm]), np.array([tm]))[0]
                verts.append(pos)
                rod.append(rod[a])
                att_s.append(sm)
                att_t.append(tm)
            else:
                verts.append(0.5 * (verts[a] + verts[b]))
                rod.append(FREE)
                att_s.append(0.0)
                att_t.append(0.0)
            mid = len(verts) - 1
            for f in faces:
                t = tris[f]
                c = [v for v in t if v not in e][0]
                # keep orientation of the original triple
                i_a = t.index(a)
                if t[(i_a + 1) % 3] == b:
                    tris[f] = None
                    tris.append((a, mid, c))
                    tris.append((mid, b, c))
                else:
                    tris[f] = None
                    tris.append((b, mid, c))
                    tris.append((mid, a, c))
            changed = True
        return changed

    def neighbors():
        nb = {}
        for t in tris:
            if t is None:
                continue
            for v in t:
                nb.setdefault(v, set()).update(t)
        for v, ns in nb.items():
            ns.discard(v)
        return nb

    def collapse_pass():
        em = edge_map()
        nb = neighbors()
        changed = False
        dead = set()
        for e, faces in sorted(
            em.items(), key=lambda kv: float(np.linalg.norm(verts[kv[0][0]] - verts[kv[0][1]]))
        ):
            a, b = e
            if a in dead or b in dead:
                continue
            if any(tris[f] is None for f in faces):
                continue
            length = float(np.linalg.norm(verts[a] - verts[b]))
            if length >= 0.5 * target_edge:
                break
            a_fix = rod[a] != FREE
            b_fix = rod[b] != FREE
            if a_fix and b_fix:
                continue
            opp = set()
            for f in faces:
                opp.update(v for v in tris[f] if v not in e)
            if nb.get(a, set()) & nb.get(b, set()) != opp:
                continue
            keep, drop = (a, b) if a_fix else ((b, a) if b_fix else (a, b))
            ok = True
            new_faces = []
            for f, t in enumerate(tris):
                if t is None or drop not in t:
                    continue
                if keep in t:
                    new_faces.append((f, None))
                    continue
                nt = tuple(keep if v == drop else v for v in t)
                p0, p1, p2 = (verts[v] for v in nt)
                c_new = np.cross(p1 - p0, p2 - p0)
                if 0.5 * np.linalg.norm(c_new) < 1e-14:
                    ok = False
                    break
                q0, q1, q2 = (verts[v] for v in t)
                # the rewired face must not flip over its old orientation
                if float(c_new @ np.cross(q1 - q0, q2 - q0)) <= 0.0:
                    ok = False
                    break
                new_faces.append((f, nt))
            if not ok:
                continue
            for f, nt in new_faces:
                tris[f] = nt
            dead.add(drop)
            nb = neighbors()
            changed = True
        return changed

    def tri_quality(t):
        p0, p1, p2 = (verts[v] for v in t)
        area2 = np.linalg.norm(np.cross(p1 - p0, p2 - p0))
        l2 = (
            np.sum((p1 - p0) ** 2)
            + np.sum((p2 - p1) ** 2)
            + np.sum((p0 - p2) ** 2)
        )
        return 2.0 * np.sqrt(3.0) * area2 / l2 if l2 > 0 else 0.0

    def _follows(tri, a, b):
        return tri[(tri.index(a) + 1) % 3] == b

    def _normal(t):
        p0, p1, p2 = (verts[v] for v in t)
        c = np.cross(p1 - p0, p2 - p0)
        n = np.linalg.norm(c)
        return c / n if n > 0 else c

    def flip_pass():
        em = edge_map()
        changed = False
        existing = set(em.keys())
        for e, faces in em.items():
            if len(faces) != 2:
                continue
            f1, f2 = faces
            if tris[f1] is None or tris[f2] is None:
                continue
            a, b = e
            # earlier flips this pass may have rewired these faces
            if a not in tris[f1] or b not in tris[f1] or a not in tris[f2] or b not in tris[f2]:
                continue
            c = [v for v in tris[f1] if v not in e][0]
            d = [v for v in tris[f2] if v not in e][0]
            if c == d or tuple(sorted((c, d))) in existing:
                continue
            # only flip across nearly flat edges, never over a crease
            n1 = _normal(tris[f1])
            n2 = _normal(tris[f2])
            if float(n1 @ n2) < 0.9:
                continue
            old_q = min(tri_quality(tris[f1]), tri_quality(tris[f2]))
            if _follows(tris[f1], a, b):
                t1, t2 = (c, a, d), (d, b, c)
            else:
                t1, t2 = (c, b, d), (d, a, c)
            new_q = min(tri_quality(t1), tri_quality(t2))
            if new_q <= old_q * 1.05:
                continue
            # a flip across a non-convex quad folds the surface over itself
            ref = n1 + n2
            folded = False
            for t in (t1, t2):
                p0, p1, p2 = (verts[v] for v in t)
                if float(np.cross(p1 - p0, p2 - p0) @ ref) <= 0.0:
                    folded = True
                    break
            if folded:
                continue
            tris[f1] = t1
            tris[f2] = t2
            existing.discard(e)
            existing.add(tuple(sorted((c, d))))
            changed = True
        return changed

    for _ in range(passes):
        did = split_pass()
        did |= collapse_pass()
        did |= flip_pass()
        if not did:
            break

    # compact arrays
    live = [t for t in tris if t is not None]
    used = sorted({v for t in live for v in t})
    index = {v: i for i, v in enumerate(used)}
    new_verts = np.array([verts[v] for v in used])
    new_tris = np.array([[index[v] for v in t] for t in live], dtype=np.int64)
    new_rod = np.array([rod[v] for v in used], dtype=np.int64)
    new_s = np.array([att_s[v] for v in used])
    new_t = np.array([att_t[v] for v in used])
    out = TriMesh(new_verts, new_tris, new_rod, new_s, new_t)
    if film_quality(out.vertices, out.triangles) < 1e-3:
        raise DegenerateMesh("remesh produced a degenerate triangle")
    if probes:
        if not spanning_certificate(out, probes).passed:
            raise DegenerateMesh("remesh broke the spanning certificate")
    return out


def probe_rim_clearance(mesh: TriMesh, probes) -> float:
    """Distance from the probe loops to the mesh boundary rim.

    A film displacement smaller than this cannot slide an intersection off
    the surface past its boundary, so it bounds safe relaxation steps.
    """
    from .util import segment_segment_distance

    tris = mesh.triangles
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]], axis=0)
    uniq, counts = np.unique(np.sort(edges, axis=1), axis=0, return_counts=True)
    rim = uniq[counts == 1]
    if rim.size == 0:
        return np.inf
    p0 = mesh.vertices[rim[:, 0]]
    p1 = mesh.vertices[rim[:, 1]]
    best = np.inf
    for probe in probes.loops:
        pts = probe.loop.points
        q0 = pts
        q1 = np.roll(pts, -1, axis=0)
        d = segment_segment_distance(
            p0[:, None, :], p1[:, None, :], q0[None, :, :], q1[None, :, :]
        )
        best = min(best, float(d.min()))
    return best
