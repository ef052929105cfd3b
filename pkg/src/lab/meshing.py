"""Graded conforming triangulations of weighted domains.

Meshes are produced with Triangle's quality-constrained Delaunay refinement:
the polygon is given as a planar straight-line graph together with the
origin as a forced vertex, then refined with per-element area bounds until
every element meets the size criterion

    longest edge <= clip(h * (r / diam) ** gamma, h / ratio, h),

where r is the distance from the origin to the closest element vertex.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np

from src.lab.errors import MeshError
from src.lab.geometry import WeightedDomain
from src.lab.quadrature import cross2
from src.settings import settings

try:  # Optional dependency for quality meshing.
    import triangle as _triangle_lib
except Exception:  # noqa: BLE001
    _triangle_lib = None

logger = logging.getLogger(__name__)

# Area bound 0.1 * target**2 keeps the longest edge below target once all angles are >= 30 degrees.
_AREA_FACTOR = 0.1


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Conforming triangulation with tagged boundary edges.

    ``boundary_tags[k]`` is the index of the polygon edge that boundary edge
    ``boundary_edges[k]`` discretizes. ``origin_index`` is the node placed
    at the origin.
    """

    nodes: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray
    h: float
    origin_index: int

    def __post_init__(self) -> None:
        for name in ("nodes", "triangles", "boundary_edges", "boundary_tags"):
            getattr(self, name).setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return int(self.nodes.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @cached_property
    def coords(self) -> np.ndarray:
        """Vertex coordinates per element, shape (T, 3, 2)."""
        return self.nodes[self.triangles]

    @cached_property
    def areas(self) -> np.ndarray:
        c = self.coords
        return 0.5 * cross2(c[:, 1] - c[:, 0], c[:, 2] - c[:, 0])

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        c = self.coords
        return np.linalg.norm(np.roll(c, -1, axis=1) - c, axis=2)

    @property
    def max_edge(self) -> float:
        return float(self.edge_lengths.max())

    @cached_property
    def boundary_nodes(self) -> np.ndarray:
        return np.unique(self.boundary_edges)


class MeshQuality(NamedTuple):
    min_angle: float
    max_edge: float
    area: float


def mesh_quality(mesh: TriangleMesh) -> MeshQuality:
    """Smallest interior angle in degrees, longest edge and total area."""
    c = mesh.coords
    angles = []
    for k in range(3):
        a = c[:, (k + 1) % 3] - c[:, k]
        b = c[:, (k + 2) % 3] - c[:, k]
        cosine = np.einsum("td,td->t", a, b) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
        angles.append(np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0))))
    return MeshQuality(
        min_angle=float(np.min(angles)),
        max_edge=mesh.max_edge,
        area=float(mesh.areas.sum()),
    )


def _orient_tris_ccw(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    """Ensure CCW orientation and drop zero-area triangles."""
    if tris.size == 0:
        return tris
    a, b, c = nodes[tris[:, 0]], nodes[tris[:, 1]], nodes[tris[:, 2]]
    two_area = cross2(b - a, c - a)
    tris = tris.copy()
    flip = two_area < 0.0
    tris[flip] = tris[flip][:, [0, 2, 1]]
    return tris[np.abs(two_area) > 0.0]


def _size_targets(nodes: np.ndarray, tris: np.ndarray, h: float, diameter: float) -> np.ndarray:
    gamma = settings.LAB_GRADING_EXPONENT
    h_min = h / settings.LAB_H_MIN_RATIO
    r = np.linalg.norm(nodes[tris], axis=2).min(axis=1)
    return np.clip(h * (r / diameter) ** gamma, h_min, h)


def _longest_edges(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    c = nodes[tris]
    return np.linalg.norm(np.roll(c, -1, axis=1) - c, axis=2).max(axis=1)


def _boundary_edges(tris: np.ndarray) -> np.ndarray:
    edges = np.sort(np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]]), axis=1)
    unique, counts = np.unique(edges, axis=0, return_counts=True)
    if counts.max(initial=0) > 2:
        raise MeshError("non-manifold edge shared by more than two triangles")
    return unique[counts == 1]


def _tag_boundary(nodes: np.ndarray, edges: np.ndarray, domain: WeightedDomain) -> np.ndarray:
    """Index of the polygon edge carrying each boundary edge."""
    start, end = domain.edges
    direction = end - start
    length2 = np.einsum("sd,sd->s", direction, direction)
    tol = 1e-9 * domain.diameter
    tags = np.empty(edges.shape[0], dtype=np.int64)
    rows = max(1, 4 * settings.LAB_CHUNK_SIZE // start.shape[0])
    for k0 in range(0, edges.shape[0], rows):
        chunk = edges[k0:k0 + rows]
        worst = np.zeros((chunk.shape[0], start.shape[0]))
        for end_point in (nodes[chunk[:, 0]], nodes[chunk[:, 1]]):
            rel = end_point[:, None, :] - start[None, :, :]
            t = np.clip(np.einsum("esd,sd->es", rel, direction) / length2, 0.0, 1.0)
            closest = start[None, :, :] + t[:, :, None] * direction[None, :, :]
            worst = np.maximum(worst, np.linalg.norm(end_point[:, None, :] - closest, axis=2))
        best = worst.argmin(axis=1)
        if np.any(worst[np.arange(chunk.shape[0]), best] > tol):
            raise MeshError("boundary edge does not lie on any polygon edge")
        tags[k0:k0 + chunk.shape[0]] = best
    return tags


def _run_triangle(data: dict, opts: str) -> dict:
    try:
        return _triangle_lib.triangulate(data, opts)
    except Exception as exc:  # noqa: BLE001
        raise MeshError(f"Triangle failed with options {opts!r}: {exc}") from exc


def triangulate(domain: WeightedDomain, h: float) -> TriangleMesh:
    """Conforming mesh of ``domain`` with max edge <= h, graded toward the origin."""
    if _triangle_lib is None:
        raise MeshError("the 'triangle' package is required for meshing")
    diameter = domain.diameter
    if not (h > 0.0) or not math.isfinite(h):
        raise MeshError(f"mesh size must be positive, got {h}")
    if h >= diameter:
        raise MeshError(f"mesh size {h} is not smaller than the domain diameter {diameter:.6g}")

    n = domain.vertices.shape[0]
    vertices = np.vstack([domain.vertices, [[0.0, 0.0]]])
    segments = np.column_stack([np.arange(n), (np.arange(n) + 1) % n]).astype(np.int32)
    angle = settings.LAB_MIN_ANGLE
    pslg = {"vertices": vertices, "segments": segments}
    result = _run_triangle(pslg, f"pq{angle:g}a{_AREA_FACTOR * h * h:.12g}Q")

    for attempt in range(settings.LAB_MESH_MAX_PASSES):
        nodes = np.asarray(result["vertices"], dtype=float)
        tris = np.asarray(result["triangles"], dtype=np.int64)
        targets = _size_targets(nodes, tris, h, diameter)
        bad = _longest_edges(nodes, tris) > targets
        if not bad.any():
            break
        logger.debug(f"Mesh pass {attempt}: {int(bad.sum())} of {len(tris)} triangles exceed target size")
        refine_input = {
            "vertices": nodes,
            "triangles": tris.astype(np.int32),
            "segments": np.asarray(result["segments"], dtype=np.int32),
            "triangle_max_area": (_AREA_FACTOR * targets ** 2).reshape(-1, 1),
        }
        result = _run_triangle(refine_input, f"rpq{angle:g}aQ")
    else:
        raise MeshError(f"size criterion not met after {settings.LAB_MESH_MAX_PASSES} passes")

    tris = _orient_tris_ccw(nodes, tris)
    at_origin = np.flatnonzero((nodes[:, 0] == 0.0) & (nodes[:, 1] == 0.0))
    if at_origin.size != 1:
        raise MeshError("origin is not a mesh node")
    edges = _boundary_edges(tris)
    tags = _tag_boundary(nodes, edges, domain)
    mesh = TriangleMesh(
        nodes=nodes,
        triangles=tris,
        boundary_edges=edges,
        boundary_tags=tags,
        h=float(h),
        origin_index=int(at_origin[0]),
    )
    logger.info(
        f"Meshed {domain.name}: h={h:g}, {mesh.n_nodes} nodes, {mesh.n_triangles} triangles, max edge {mesh.max_edge:.4g}"
    )
    return mesh


def refine(mesh: TriangleMesh) -> TriangleMesh:
    """Uniform red refinement: every triangle splits into four congruent children."""
    tris = mesh.triangles
    n_nodes = mesh.n_nodes
    local = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    keyed = np.sort(local, axis=1)
    unique, inverse = np.unique(keyed, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    midpoints = 0.5 * (mesh.nodes[unique[:, 0]] + mesh.nodes[unique[:, 1]])
    nodes = np.vstack([mesh.nodes, midpoints])

    t = tris.shape[0]
    m01 = n_nodes + inverse[:t]
    m12 = n_nodes + inverse[t:2 * t]
    m20 = n_nodes + inverse[2 * t:]
    v0, v1, v2 = tris[:, 0], tris[:, 1], tris[:, 2]
    children = np.concatenate(
        [
            np.column_stack([v0, m01, m20]),
            np.column_stack([m01, v1, m12]),
            np.column_stack([m20, m12, v2]),
            np.column_stack([m01, m12, m20]),
        ]
    )

    # Boundary edges map to their midpoint through the same sorted-edge lookup.
    bkeys = np.sort(mesh.boundary_edges, axis=1)
    position = np.searchsorted(unique[:, 0] * (n_nodes + 1) + unique[:, 1], bkeys[:, 0] * (n_nodes + 1) + bkeys[:, 1])
    mid = n_nodes + position
    a, b = mesh.boundary_edges[:, 0], mesh.boundary_edges[:, 1]
    boundary = np.concatenate([np.column_stack([a, mid]), np.column_stack([mid, b])])
    tags = np.concatenate([mesh.boundary_tags, mesh.boundary_tags])

    return TriangleMesh(
        nodes=nodes,
        triangles=children,
        boundary_edges=boundary,
        boundary_tags=tags,
        h=0.5 * mesh.h,
        origin_index=mesh.origin_index,
    )


def dump_mesh(mesh: TriangleMesh, path: Union[str, Path]) -> Path:
    """Write the plain-text "nodes / triangles / boundary" dump."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"nodes {mesh.n_nodes}"]
    lines.extend(f"{x!r} {y!r}" for x, y in mesh.nodes.tolist())
    lines.append(f"triangles {mesh.n_triangles}")
    lines.extend(f"{i} {j} {k}" for i, j, k in mesh.triangles.tolist())
    lines.append(f"boundary {mesh.boundary_edges.shape[0]}")
    lines.extend(
        f"{i} {j} {tag}"
        for (i, j), tag in zip(mesh.boundary_edges.tolist(), mesh.boundary_tags.tolist())
    )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
