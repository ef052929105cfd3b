"""Helpers shared by the command modules."""
from __future__ import annotations

import logging
from typing import Any, Dict, Optional

from src.lab.gallery import gallery_domain
from src.lab.geometry import WeightedDomain
from src.lab.meshing import TriangleMesh, dump_mesh, mesh_quality
from src.schemas import RunConfig

logger = logging.getLogger(__name__)

# JSON-schema fragments reused by the COMMAND metadata of every subcommand.
DOMAIN_PROPERTIES: Dict[str, Any] = {
    "shape": {"type": "string", "description": "Gallery shape, e.g. square, rectangle, ngon:64:1, disk, lshape", "default": "square"},
    "vertices": {"type": "string", "description": "Vertex file (one 'x y' pair per line); overrides shape"},
    "l_values": {"type": "array", "items": {"type": "number"}, "description": "Weight exponents l in (-2, 0]", "default": [0.0]},
    "beta_values": {"type": "array", "items": {"type": "number"}, "description": "Robin parameters beta > 0", "default": [1.0]},
}
MESH_PROPERTIES: Dict[str, Any] = {
    "h": {"type": "number", "description": "Target mesh size"},
    "mesh_dump": {"type": "boolean", "description": "Also write the mesh as a text dump", "default": False},
}


def build_domain(config: RunConfig, l: Optional[float] = None, beta: Optional[float] = None) -> WeightedDomain:
    return gallery_domain(
        config.shape,
        config.l if l is None else l,
        config.beta if beta is None else beta,
        vertices_path=config.vertices,
    )


def log_mesh(mesh: TriangleMesh, config: RunConfig, name: str = "mesh.txt") -> None:
    quality = mesh_quality(mesh)
    logger.info(
        f"Mesh: {mesh.n_nodes} nodes, {mesh.n_triangles} triangles, "
        f"min angle {quality.min_angle:.2f} deg, max edge {quality.max_edge:.4g}"
    )
    if config.mesh_dump:
        dump_mesh(mesh, config.out / name)
