"""Triangle mesh container invariants."""

import numpy as np
import pytest

from kplateau.errors import InvalidInput
from kplateau.mesh import FREE, TriMesh, area, boundary_vertices, edge_counts, triangle_areas


def fan_disk(n=12):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    verts = np.concatenate([[[0.0, 0.0, 0.0]], np.stack([np.cos(t), np.sin(t), np.zeros(n)], axis=1)])
    tris = np.array([[0, 1 + i, 1 + (i + 1) % n] for i in range(n)])
    return TriMesh.free(verts, tris)


def tetrahedron():
    verts = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    tris = np.array([[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]])
    return TriMesh.free(verts, tris)


def test_validation_rejects_bad_input():
    verts = np.zeros((3, 3))
    with pytest.raises(InvalidInput):
        TriMesh.free(np.zeros((3, 2)), np.array([[0, 1, 2]]))
    with pytest.raises(InvalidInput):
        TriMesh.free(verts, np.array([[0, 1, 5]]))
    with pytest.raises(InvalidInput):
        TriMesh.free(verts, np.array([[0, 1, 1]]))
    with pytest.raises(InvalidInput):
        TriMesh(verts, np.array([[0, 1, 2]]), np.zeros(2, dtype=np.int64), np.zeros(3), np.zeros(3))


def test_validation_rejects_nonmanifold_edge():
    verts = np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 1, 0], [0.0, 0, 1], [1.0, 1, 1]])
    tris = np.array([[0, 1, 2], [0, 1, 3], [0, 1, 4]])
    with pytest.raises(InvalidInput):
        TriMesh.free(verts, tris)


def test_euler_characteristic():
    assert fan_disk().euler_characteristic() == 1
    assert tetrahedron().euler_characteristic() == 2
    assert not fan_disk().is_watertight()
    assert tetrahedron().is_watertight()


def test_boundary_and_areas():
    disk = fan_disk(64)
    rim = boundary_vertices(disk.triangles, disk.n_vertices)
    assert not rim[0] and rim[1:].all()
    assert edge_counts(tetrahedron().triangles).tolist() == [2] * 6
    per = triangle_areas(disk.vertices, disk.triangles)
    assert per.shape == (64,)
    assert abs(area(disk) - 32 * np.sin(2 * np.pi / 64)) < 1e-12


def test_empty_mesh():
    empty = TriMesh.free(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
    assert empty.n_vertices == 0 and empty.n_triangles == 0
    assert not empty.is_watertight()
    assert area(empty) == 0.0


def test_free_marks_all_vertices():
    disk = fan_disk()
    assert (disk.attach_rod == FREE).all()
    moved = disk.with_vertices(disk.vertices + 1.0)
    assert moved.triangles is disk.triangles
    assert abs(area(moved) - area(disk)) < 1e-12
