"""Triangle mesh value type with optional sliding boundary attachments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

__all__ = ["TriMesh", "area", "triangle_areas", "edge_counts", "boundary_vertices"]

FREE = -1


@dataclass(frozen=True)
class TriMesh:
    """Oriented manifold-with-boundary triangle mesh.

    Attached vertices carry tube coordinates (attach_rod >= 0, arc position
    attach_s, section angle attach_theta) and are expected to sit on the
    corresponding tube surface; free vertices have attach_rod == -1.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    attach_rod: np.ndarray
    attach_s: np.ndarray
    attach_theta: np.ndarray

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        tris = np.asarray(self.triangles, dtype=np.int64)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "attach_rod", np.asarray(self.attach_rod, dtype=np.int64))
        object.__setattr__(self, "attach_s", np.asarray(self.attach_s, dtype=float))
        object.__setattr__(self, "attach_theta", np.asarray(self.attach_theta, dtype=float))
        if verts.ndim != 2 or verts.shape[1] != 3:
            raise InvalidInput("vertices must have shape (V, 3)")
        if tris.ndim != 2 or (tris.size and tris.shape[1] != 3):
            raise InvalidInput("triangles must have shape (F, 3)")
        V = verts.shape[0]
        for name in ("attach_rod", "attach_s", "attach_theta"):
            if getattr(self, name).shape != (V,):
                raise InvalidInput(f"{name} must have shape (V,)")
        if tris.size:
            if tris.min() < 0 or tris.max() >= V:
                raise InvalidInput("triangle index out of range")
            if np.any((tris[:, 0] == tris[:, 1]) | (tris[:, 1] == tris[:, 2]) | (tris[:, 0] == tris[:, 2])):
                raise InvalidInput("degenerate triangle (repeated vertex)")
            counts = edge_counts(tris)
            if counts.max(initial=0) > 2:
                raise InvalidInput("non-manifold edge (more than two incident triangles)")

    @staticmethod
    def free(vertices: np.ndarray, triangles: np.ndarray) -> "TriMesh":
        """Mesh with no boundary attachments."""
        V = np.asarray(vertices).shape[0]
        return TriMesh(
            vertices,
            triangles,
            np.full(V, FREE, dtype=np.int64),
            np.zeros(V),
            np.zeros(V),
        )

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    def with_vertices(self, vertices, attach_s=None, attach_theta=None) -> "TriMesh":
        return TriMesh(
            vertices,
            self.triangles,
            self.attach_rod,
            self.attach_s if attach_s is None else attach_s,
            self.attach_theta if attach_theta is None else attach_theta,
        )

    def euler_characteristic(self) -> int:
        if self.n_triangles == 0:
            return self.n_vertices
        edges = _sorted_edges(self.triangles)
        n_edges = np.unique(edges, axis=0).shape[0]
        return self.n_vertices - n_edges + self.n_triangles

    def is_watertight(self) -> bool:
        if self.n_triangles == 0:
            return False
        return bool(np.all(edge_counts(self.triangles) == 2))


def _sorted_edges(tris: np.ndarray) -> np.ndarray:
    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]], axis=0)
    return np.sort(edges, axis=1)


def edge_counts(tris: np.ndarray) -> np.ndarray:
    """Multiplicity of each undirected edge (sorted-unique order)."""
    if tris.size == 0:
        return np.zeros(0, dtype=np.int64)
    edges = _sorted_edges(tris)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    return counts


def boundary_vertices(tris: np.ndarray, n_vertices: int) -> np.ndarray:
    """Boolean mask of vertices on at least one boundary edge."""
    mask = np.zeros(n_vertices, dtype=bool)
    if tris.size == 0:
        return mask
    edges = _sorted_edges(tris)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    rim = uniq[counts == 1]
    mask[rim.ravel()] = True
    return mask


def triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    if triangles.size == 0:
        return np.zeros(0)
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    return 0.5 * np.linalg.norm(np.cross(p1 - p0, p2 - p0), axis=1)


def area(mesh: TriMesh) -> float:
    """Total surface area."""
    return float(triangle_areas(mesh.vertices, mesh.triangles).sum())
