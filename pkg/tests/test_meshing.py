"""Triangulation, grading, refinement and mesh dumps."""
import numpy as np
import pytest

from src.lab.errors import MeshError
from src.lab.gallery import gallery_domain
from src.lab.meshing import dump_mesh, mesh_quality, refine, triangulate


def test_square_mesh_is_conforming(square, square_mesh):
    mesh = square_mesh
    assert np.all(mesh.nodes[mesh.origin_index] == 0.0)
    assert mesh.areas.min() > 0.0
    assert mesh.areas.sum() == pytest.approx(4.0, rel=1e-12)
    assert mesh.max_edge <= 0.25 + 1e-12
    # Every polygon edge is covered by boundary edges of matching total length.
    lengths = np.linalg.norm(mesh.nodes[mesh.boundary_edges[:, 1]] - mesh.nodes[mesh.boundary_edges[:, 0]], axis=1)
    per_side = np.bincount(mesh.boundary_tags, weights=lengths, minlength=4)
    np.testing.assert_allclose(per_side, 2.0, rtol=1e-12)


def test_minimum_angle_is_enforced(lshape):
    quality = mesh_quality(triangulate(lshape, 0.2))
    assert quality.min_angle >= 20.0
    assert quality.area == pytest.approx(3.0, rel=1e-12)


def test_mesh_is_graded_toward_origin(square):
    mesh = triangulate(square, 0.2)
    centroids = mesh.coords.mean(axis=1)
    radius = np.linalg.norm(centroids, axis=1)
    longest = np.linalg.norm(np.roll(mesh.coords, -1, axis=1) - mesh.coords, axis=2).max(axis=1)
    assert longest[radius < 0.1].max() < longest[radius > 0.8].max()


def test_refine_halves_mesh(square_mesh):
    fine = refine(square_mesh)
    assert fine.n_triangles == 4 * square_mesh.n_triangles
    assert fine.h == pytest.approx(0.5 * square_mesh.h)
    assert fine.areas.sum() == pytest.approx(4.0, rel=1e-12)
    assert fine.max_edge == pytest.approx(0.5 * square_mesh.max_edge, rel=1e-12)
    assert fine.boundary_edges.shape[0] == 2 * square_mesh.boundary_edges.shape[0]
    assert fine.origin_index == square_mesh.origin_index
    # Children keep the parent angles.
    assert mesh_quality(fine).min_angle == pytest.approx(mesh_quality(square_mesh).min_angle, rel=1e-9)


def test_refined_boundary_lies_on_polygon(square_mesh):
    fine = refine(square_mesh)
    boundary_nodes = fine.nodes[np.unique(fine.boundary_edges)]
    assert np.allclose(np.abs(boundary_nodes).max(axis=1), 1.0)


@pytest.mark.parametrize("h", [0.0, -0.1, 3.0, float("inf")])
def test_invalid_mesh_size(square, h):
    with pytest.raises(MeshError):
        triangulate(square, h)


def test_pentagon_boundary_tags():
    domain = gallery_domain("ngon:5:1")
    mesh = triangulate(domain, 0.3)
    assert mesh.n_triangles > 0
    assert set(np.unique(mesh.boundary_tags)) == set(range(5))


def test_dump_mesh_sections(tmp_path, square_mesh):
    path = dump_mesh(square_mesh, tmp_path / "mesh" / "square.txt")
    lines = path.read_text().splitlines()
    assert lines[0] == f"nodes {square_mesh.n_nodes}"
    assert f"triangles {square_mesh.n_triangles}" in lines
    assert lines[-1 - square_mesh.boundary_edges.shape[0]] == f"boundary {square_mesh.boundary_edges.shape[0]}"
