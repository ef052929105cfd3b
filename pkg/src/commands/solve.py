"""Solve the weighted Robin problem on the domain."""
from src.commands.common import DOMAIN_PROPERTIES, MESH_PROPERTIES, build_domain, log_mesh
from src.lab import fem
from src.lab.export import field_rows
from src.lab.meshing import triangulate
from src.lab.sources import resolve_source
from src.schemas import CommandResult, CsvTable, RunConfig, SolveSummary

COMMAND = {
    "name": "solve",
    "title": "Solve Robin Problem",
    "description": "P1 solution u_h of -div grad u = f |x|^l with Robin data; nodal CSV plus min/max/L1/L2",
    "input_schema": {
        "type": "object",
        "properties": {
            **DOMAIN_PROPERTIES,
            **MESH_PROPERTIES,
            "source": {"type": "string", "description": "one, zero, nonradial, radial or const:c", "default": "one"},
        },
        "required": [],
    },
}


async def run(config: RunConfig) -> CommandResult:
    domain = build_domain(config)
    mesh = triangulate(domain, config.h)
    log_mesh(mesh, config)
    system = fem.assemble_system(mesh, domain)
    field = fem.solve_robin(mesh, domain, resolve_source(config.source), system)
    norms = fem.weighted_norms(field, domain.l, system.mass)
    summary = SolveSummary(
        domain=domain.name,
        l=domain.l,
        beta=domain.beta,
        h=config.h,
        source=config.source,
        n_nodes=mesh.n_nodes,
        n_triangles=mesh.n_triangles,
        min=field.min,
        max=field.max,
        L1=norms.l1,
        L2=norms.l2,
    )
    table = CsvTable(name="solution.csv", header=["x", "y", "value"], rows=field_rows(field))
    return CommandResult(command="solve", ok=True, payload=summary.model_dump(), tables=[table])
