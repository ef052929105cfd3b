"""Distribution, rearrangement and symmetrized solution for one run."""
from src.commands.common import DOMAIN_PROPERTIES, MESH_PROPERTIES, build_domain, log_mesh
from src.lab import fem, geometry
from src.lab.meshing import triangulate
from src.lab.radial import solve_symmetrized
from src.lab.rearrange import decreasing_rearrangement, distribution_function, rearranged_source
from src.lab.sources import resolve_source
from src.schemas import CommandResult, CsvTable, RadialSummary, RunConfig

COMMAND = {
    "name": "symmetrize",
    "title": "Symmetrize Solution",
    "description": "mu(t) and u*(s) of the domain solution, and the symmetrized solution v(r) on the disk",
    "input_schema": {
        "type": "object",
        "properties": {
            **DOMAIN_PROPERTIES,
            **MESH_PROPERTIES,
            "source": {"type": "string", "description": "Nonnegative source tag", "default": "one"},
            "n_levels": {"type": "integer", "description": "Number of distribution levels"},
            "n_grid": {"type": "integer", "description": "Radial grid intervals"},
        },
        "required": [],
    },
}


async def run(config: RunConfig) -> CommandResult:
    """Write "t,mu", "s,u_star" and "r,v" tables.

    Raises:
        SourceError: If the source is negative somewhere on the domain
    """
    domain = build_domain(config)
    source = resolve_source(config.source)
    mesh = triangulate(domain, config.h)
    log_mesh(mesh, config)
    field = fem.solve_robin(mesh, domain, source)

    curve = distribution_function(field, domain.l, config.n_levels)
    profile = decreasing_rearrangement(curve)
    disk = geometry.domain_disk(domain)
    fsharp = rearranged_source(source, domain, n_levels=config.n_levels, mesh=mesh)
    v = solve_symmetrized(fsharp, disk, config.n_grid)

    summary = RadialSummary(R=disk.radius, l=disk.l, beta=disk.beta, v0=v.center_value, vR=v.boundary_value)
    payload = summary.model_dump(by_alias=True)
    payload.update({"u_max": field.max, "u_min": field.min, "L1_u_star": profile.norm(1), "L1_v": v.norm(1)})
    tables = [
        CsvTable(name="distribution.csv", header=["t", "mu"], rows=curve.rows()),
        CsvTable(name="rearrangement.csv", header=["s", "u_star"], rows=profile.rows()),
        CsvTable(name="radial.csv", header=["r", "v"], rows=v.rows()),
    ]
    return CommandResult(command="symmetrize", ok=True, payload=payload, tables=tables)
