"""Mesh and trace exports: OBJ triangle meshes, CSV iteration traces.

Both writers are byte-deterministic: the output is a pure function of the
data, with no timestamps or environment-dependent formatting.
"""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from .errors import InvalidInput
from .mesh import TriMesh

__all__ = ["export_mesh", "read_obj", "export_trace", "TRACE_COLUMNS"]

TRACE_COLUMNS = (
    "iter",
    "e_el1",
    "e_el2",
    "e_g1",
    "e_g2",
    "e_film",
    "e_total",
    "penalties",
    "lk12",
    "n1",
    "n2",
    "area",
    "hausdorff_step",
)


def export_mesh(mesh: TriMesh, path) -> None:
    """Write `mesh` as Wavefront OBJ.

    Vertex lines carry 17 significant digits, enough for float64 round trips.
    Face indices are 1-based. An empty mesh produces the header only.
    """
    lines = [
        "# kplateau surface mesh",
        f"# vertices {mesh.n_vertices} triangles {mesh.n_triangles}",
    ]
    for x, y, z in np.asarray(mesh.vertices, dtype=float):
        lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
    for i, j, k in np.asarray(mesh.triangles, dtype=np.int64):
        lines.append(f"f {i + 1} {j + 1} {k + 1}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_obj(path) -> TriMesh:
    """Read an OBJ file written by `export_mesh`.

    Only `v` and triangular `f` records are understood; boundary attachment
    data is not part of the format, so every vertex comes back free.
    """
    verts: list[list[float]] = []
    tris: list[list[int]] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.strip()
        if not body or body.startswith("#"):
            continue
        parts = body.split()
        try:
            if parts[0] == "v":
                if len(parts) != 4:
                    raise ValueError
                verts.append([float(p) for p in parts[1:]])
            elif parts[0] == "f":
                if len(parts) != 4:
                    raise ValueError
                # tolerate v/vt/vn syntax by keeping the vertex index
                tris.append([int(p.split("/")[0]) - 1 for p in parts[1:]])
            else:
                raise ValueError
        except ValueError:
            raise InvalidInput(f"unsupported OBJ record on line {lineno}: {body!r}") from None
    return TriMesh.free(
        np.asarray(verts, dtype=float).reshape(len(verts), 3),
        np.asarray(tris, dtype=np.int64).reshape(len(tris), 3),
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def export_trace(trace, path) -> None:
    """Write a solve trace as CSV in the fixed column order TRACE_COLUMNS.

    Missing topology entries (single-rod problems have no lk12 or n2) become
    empty fields. Energies are written with full float64 precision.
    """
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for row in trace.rows:
        e = row.energy
        inv = row.invariants
        writer.writerow(
            [
                str(row.iteration),
                _cell(e.e_el1),
                _cell(e.e_el2),
                _cell(e.e_g1),
                _cell(e.e_g2),
                _cell(e.e_film),
                _cell(e.e_total),
                _cell(row.penalties),
                _cell(inv.lk12),
                _cell(inv.self_link1),
                _cell(inv.self_link2),
                _cell(row.area),
                _cell(row.hausdorff_step),
            ]
        )
    Path(path).write_text(buf.getvalue())
