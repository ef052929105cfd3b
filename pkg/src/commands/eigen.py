"""First Robin eigenvalue of the domain against the symmetrized disk."""
from src.commands.common import DOMAIN_PROPERTIES, MESH_PROPERTIES, build_domain, log_mesh
from src.lab import fem, geometry
from src.lab.meshing import triangulate
from src.lab.radial import radial_eigen
from src.schemas import CommandResult, CsvTable, EigenSummary, RadialSummary, RunConfig

COMMAND = {
    "name": "eigen",
    "title": "Robin Eigenvalues",
    "description": "lambda(Omega) by P1 inverse iteration and lambda(Omega^sharp) by the radial solver",
    "input_schema": {
        "type": "object",
        "properties": {
            **DOMAIN_PROPERTIES,
            **MESH_PROPERTIES,
            "eigen_grid": {"type": "integer", "description": "Radial eigen grid intervals (doubled once for extrapolation)"},
        },
        "required": [],
    },
}


async def run(config: RunConfig) -> CommandResult:
    domain = build_domain(config)
    mesh = triangulate(domain, config.h)
    log_mesh(mesh, config)
    result = fem.smallest_eigenpair(mesh, domain)
    disk = geometry.domain_disk(domain)
    radial = radial_eigen(disk, config.eigen_grid)
    eigenfunction = radial.field

    summary = EigenSummary(
        domain=domain.name,
        l=domain.l,
        beta=domain.beta,
        h=config.h,
        lambda_domain=result.eigenvalue,
        lambda_disk=radial.eigenvalue,
        ratio=result.eigenvalue / radial.eigenvalue,
        residual=result.residual,
        iterations=result.iterations,
        radial=RadialSummary(**eigenfunction.scalars(radial.eigenvalue)),
    )
    tables = [CsvTable(name="eigenfunction.csv", header=["r", "v"], rows=eigenfunction.rows())]
    # Reported only; the certified comparison with margins lives in the compare command.
    return CommandResult(command="eigen", ok=True, payload=summary.model_dump(by_alias=True), tables=tables)
