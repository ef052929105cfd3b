"""Self-convergence study on the disk against the closed-form solutions."""
import logging
import math
from typing import Any, List

import numpy as np

from src.commands.common import MESH_PROPERTIES, log_mesh
from src.lab import fem, geometry
from src.lab.compare import richardson_margin
from src.lab.gallery import regular_ngon
from src.lab.geometry import WeightedDomain
from src.lab.meshing import refine, triangulate
from src.lab.radial import exact_disk_eigenvalue, exact_disk_torsion
from src.lab.sources import one
from src.schemas import CommandResult, CsvTable, RunConfig
from src.settings import settings

logger = logging.getLogger(__name__)

COMMAND = {
    "name": "convergence",
    "title": "Disk Convergence Study",
    "description": "Torsion and eigenvalue errors on nested meshes of the unit disk with observed orders",
    "input_schema": {
        "type": "object",
        "properties": {
            "l_values": {"type": "array", "items": {"type": "number"}, "default": [0.0]},
            "beta_values": {"type": "array", "items": {"type": "number"}, "default": [1.0]},
            **MESH_PROPERTIES,
            "refinements": {"type": "integer", "description": "Number of mesh levels (1-6)", "default": 3},
        },
        "required": [],
    },
}


async def run(config: RunConfig) -> CommandResult:
    """Solve f = 1 and the eigenproblem on ``refinements`` uniformly refined meshes.

    The order column is present only when more than one level is run.
    """
    sides = settings.LAB_CONVERGENCE_SIDES
    domain = WeightedDomain(
        vertices=regular_ngon(sides, 1.0),
        l=config.l,
        beta=config.beta,
        name=f"ngon:{sides}:1",
    )
    disk = geometry.domain_disk(domain)
    exact_lambda = exact_disk_eigenvalue(disk.radius, domain.l, domain.beta)
    with_order = config.refinements > 1

    rows: List[List[Any]] = []
    mesh = triangulate(domain, config.h)
    previous_error = previous_lambda = None
    for level in range(config.refinements):
        if level:
            mesh = refine(mesh)
        log_mesh(mesh, config, name=f"mesh_{level}.txt")
        system = fem.assemble_system(mesh, domain)
        u = fem.solve_robin(mesh, domain, one, system)
        radii = np.linalg.norm(mesh.nodes, axis=1)
        error = u.values - exact_disk_torsion(radii, disk.radius, domain.l, domain.beta)
        l2_error = math.sqrt(max(float(error @ (system.mass @ error)), 0.0))
        linf_error = float(np.abs(error).max())
        eigenvalue = fem.smallest_eigenpair(mesh, domain, system).eigenvalue

        row: List[Any] = [level, mesh.h, mesh.n_nodes, l2_error, linf_error]
        if with_order:
            order = "" if previous_error is None else math.log2(previous_error / l2_error)
            row.append(order)
        margin = "" if previous_lambda is None else richardson_margin(previous_lambda, eigenvalue)
        row.extend([eigenvalue, abs(eigenvalue - exact_lambda), margin])
        rows.append(row)
        logger.info(f"Level {level}: h={mesh.h:.4g} L2 error {l2_error:.3e}, lambda {eigenvalue:.10g}")
        previous_error, previous_lambda = l2_error, eigenvalue

    header = ["level", "h", "n_nodes", "l2_error", "linf_error"]
    if with_order:
        header.append("order")
    header.extend(["lambda", "lambda_error", "margin"])
    payload = {
        "domain": domain.name,
        "l": domain.l,
        "beta": domain.beta,
        "R": disk.radius,
        "lambda_exact": exact_lambda,
        "levels": config.refinements,
        "observed_order": rows[-1][5] if with_order else None,
    }
    table = CsvTable(name="convergence.csv", header=header, rows=rows)
    return CommandResult(command="convergence", ok=True, payload=payload, tables=[table])
