"""Certified comparison suite over a sweep of (l, beta)."""
import asyncio
import itertools
import logging
from typing import List

from src.commands.common import DOMAIN_PROPERTIES, MESH_PROPERTIES, build_domain
from src.lab.compare import full_suite
from src.schemas import CHECK_KINDS, CommandResult, ComparisonReport, RunConfig, SuiteDocument

logger = logging.getLogger(__name__)

COMMAND = {
    "name": "compare",
    "title": "Compare Domain and Symmetrized Disk",
    "description": "Norm, pointwise, eigenvalue, minimum and Hardy-Littlewood checks with Richardson margins",
    "input_schema": {
        "type": "object",
        "properties": {
            **DOMAIN_PROPERTIES,
            **MESH_PROPERTIES,
            "checks": {
                "type": "array",
                "items": {"type": "string", "enum": list(CHECK_KINDS)},
                "description": "Subset of checks to run (default: all)",
            },
            "n_radii": {"type": "integer", "description": "Radii sampled by the pointwise check"},
            "n_subsets": {"type": "integer", "description": "Random element subsets for Hardy-Littlewood"},
            "seed": {"type": "integer", "description": "Seed of the subset generator", "default": 42},
        },
        "required": [],
    },
}


def _run_one(config: RunConfig, l: float, beta: float) -> List[ComparisonReport]:
    domain = build_domain(config, l, beta)
    logger.info(f"Comparison suite for {domain.name}, l={l:g}, beta={beta:g}")
    return full_suite(
        domain,
        config.h,
        config.checks,
        n_radii=config.n_radii,
        n_subsets=config.n_subsets,
        seed=config.seed,
    )


async def run(config: RunConfig) -> CommandResult:
    """Run the suite for every (l, beta) of the sweep in worker threads.

    Reports are concatenated in sweep order (l outer, beta inner) regardless
    of completion order.
    """
    combos = list(itertools.product(config.l_values, config.beta_values))
    batches = await asyncio.gather(
        *[asyncio.to_thread(_run_one, config, l, beta) for l, beta in combos]
    )
    document = SuiteDocument.from_reports([report for batch in batches for report in batch])
    if not document.passed:
        logger.warning(f"Failed checks: {', '.join(document.failed_checks)}")
    return CommandResult(
        command="compare",
        ok=document.passed,
        payload=document.model_dump(by_alias=True),
        failed_checks=document.failed_checks,
    )
