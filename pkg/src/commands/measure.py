"""Weighted measure, perimeter and isoperimetric data of a domain."""
import math

from src.commands.common import DOMAIN_PROPERTIES, build_domain
from src.lab import geometry
from src.schemas import CommandResult, MeasureReport, RunConfig

COMMAND = {
    "name": "measure",
    "title": "Measure Domain",
    "description": "Weighted area |Omega|_l, weighted perimeter, symmetrized radius and isoperimetric ratio",
    "input_schema": {
        "type": "object",
        "properties": dict(DOMAIN_PROPERTIES),
        "required": [],
    },
}


async def run(config: RunConfig) -> CommandResult:
    """Measure the configured domain for the first (l, beta) of the config.

    Raises:
        DomainError: If the polygon or the parameters are invalid
    """
    domain = build_domain(config)
    area = geometry.weighted_area(domain)
    perimeter = geometry.weighted_perimeter(domain)
    disk = geometry.symmetrized_disk(area, domain.l, domain.beta)
    c_l = 2.0 * math.pi * (domain.l + 2.0)
    report = MeasureReport(
        domain=domain.name,
        l=domain.l,
        beta=domain.beta,
        area_l=area,
        perimeter=perimeter,
        r_sharp=disk.radius,
        isoperimetric_ratio=perimeter ** 2 / (c_l * area),
        isoperimetric_deficit=perimeter - disk.perimeter,
        C_l=c_l,
    )
    return CommandResult(command="measure", ok=True, payload=report.model_dump())
