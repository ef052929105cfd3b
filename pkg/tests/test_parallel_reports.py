"""Verify a compare sweep runs its (l, beta) suites concurrently (asyncio.gather)."""
import time
from unittest.mock import patch

import pytest

from src.commands import compare as compare_command
from src.schemas import Check, ComparisonReport, ReportConstants, RunConfig


def _report(l: float, beta: float, passed: bool = True) -> ComparisonReport:
    return ComparisonReport(
        report="isoperimetric",
        domain="square",
        l=l,
        beta=beta,
        h=0.1,
        checks=[Check.of("isoperimetric", 1.0 if passed else 0.0, 0.5)],
        constants=ReportConstants(area_l=4.0, r_sharp=1.128, C_l=12.566),
    )


@pytest.mark.asyncio
async def test_parallel_suite_execution_timing(tmp_path):
    """Two 80ms suites should finish in ~80ms parallel, not ~160ms sequential."""
    call_delay = 0.08

    def slow_suite(config, l, beta):
        time.sleep(call_delay)
        return [_report(l, beta)]

    config = RunConfig(l_values=[0.0, -1.0], beta_values=[1.0], out=tmp_path)
    with patch.object(compare_command, "_run_one", side_effect=slow_suite):
        t0 = time.monotonic()
        result = await compare_command.run(config)
        elapsed = time.monotonic() - t0

    assert result.ok
    assert len(result.payload["reports"]) == 2
    # parallel: upper bound a bit above single sleep; sequential would be ~2*call_delay
    assert elapsed < call_delay * 1.6, f"expected parallel ~{call_delay}s, got {elapsed}s"


@pytest.mark.asyncio
async def test_report_order_matches_sweep(tmp_path):
    delays = {(0.0, 0.5): 0.06, (0.0, 2.0): 0.0, (-0.5, 0.5): 0.03, (-0.5, 2.0): 0.0}

    def suite_in_any_order(config, l, beta):
        time.sleep(delays[(l, beta)])
        return [_report(l, beta, passed=(l, beta) != (-0.5, 2.0))]

    config = RunConfig(l_values=[0.0, -0.5], beta_values=[0.5, 2.0], out=tmp_path)
    with patch.object(compare_command, "_run_one", side_effect=suite_in_any_order):
        result = await compare_command.run(config)

    pairs = [(r["l"], r["beta"]) for r in result.payload["reports"]]
    assert pairs == [(0.0, 0.5), (0.0, 2.0), (-0.5, 0.5), (-0.5, 2.0)]
    assert not result.ok
    assert result.failed_checks == ["isoperimetric:isoperimetric[square,l=-0.5,beta=2]"]
