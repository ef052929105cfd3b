"""Command modules driven directly with RunConfig objects."""
import math

import pytest

from src.commands import COMMANDS_REGISTRY
from src.lab.errors import DomainError
from src.schemas import RunConfig


async def _run(name: str, **fields):
    return await COMMANDS_REGISTRY[name].run(RunConfig(**fields))


def test_registry_metadata():
    assert list(COMMANDS_REGISTRY) == ["measure", "solve", "symmetrize", "eigen", "compare", "convergence"]
    for name, module in COMMANDS_REGISTRY.items():
        assert module.COMMAND["name"] == name
        assert module.COMMAND["input_schema"]["type"] == "object"


@pytest.mark.asyncio
async def test_measure_square(tmp_path):
    result = await _run("measure", shape="square", out=tmp_path)
    assert result.ok
    assert result.payload["area_l"] == pytest.approx(4.0)
    assert result.payload["perimeter"] == pytest.approx(8.0)
    assert result.payload["isoperimetric_ratio"] == pytest.approx(4.0 / math.pi)


@pytest.mark.asyncio
async def test_measure_weighted_square(tmp_path):
    result = await _run("measure", shape="square", l_values=[-1.0], out=tmp_path)
    assert result.payload["area_l"] == pytest.approx(7.0510, abs=1e-4)


@pytest.mark.asyncio
async def test_measure_fine_polygon_is_nearly_a_disk(tmp_path):
    result = await _run("measure", shape="ngon:1024:1", out=tmp_path)
    assert result.payload["isoperimetric_ratio"] == pytest.approx(1.0, abs=1e-5)
    assert result.payload["isoperimetric_deficit"] >= 0.0


@pytest.mark.asyncio
async def test_measure_unknown_shape(tmp_path):
    with pytest.raises(DomainError):
        await _run("measure", shape="hexagram", out=tmp_path)


@pytest.mark.asyncio
async def test_solve_disk(tmp_path):
    result = await _run("solve", shape="ngon:128:1", h=0.1, out=tmp_path)
    assert result.payload["max"] == pytest.approx(0.75, abs=1e-2)
    table = result.tables[0]
    assert table.name == "solution.csv"
    assert table.header == ["x", "y", "value"]
    assert len(table.rows) == result.payload["n_nodes"]


@pytest.mark.asyncio
async def test_solve_zero_source(tmp_path):
    result = await _run("solve", shape="square", source="zero", h=0.25, out=tmp_path)
    assert result.payload["max"] == 0.0
    assert all(row[2] == 0.0 for row in result.tables[0].rows)


@pytest.mark.asyncio
async def test_solve_is_reproducible(tmp_path):
    first = await _run("solve", shape="square", l_values=[-1.0], h=0.25, out=tmp_path)
    second = await _run("solve", shape="square", l_values=[-1.0], h=0.25, out=tmp_path)
    assert first.payload["L1"] == second.payload["L1"]
    assert first.tables == second.tables


@pytest.mark.asyncio
async def test_symmetrize_tables(tmp_path, fast_settings):
    result = await _run("symmetrize", shape="lshape", h=0.25, n_levels=128, n_grid=256, out=tmp_path)
    headers = {t.name: t.header for t in result.tables}
    assert headers == {
        "distribution.csv": ["t", "mu"],
        "rearrangement.csv": ["s", "u_star"],
        "radial.csv": ["r", "v"],
    }
    assert result.payload["v0"] >= result.payload["vR"] > 0.0
    assert result.payload["L1_v"] >= result.payload["L1_u_star"] * (1.0 - 1e-2)


@pytest.mark.asyncio
async def test_eigen_square(tmp_path):
    result = await _run("eigen", shape="square", h=0.25, eigen_grid=512, out=tmp_path)
    payload = result.payload
    assert payload["lambda_domain"] > payload["lambda_disk"] > 0.0
    assert payload["radial"]["lambda"] == payload["lambda_disk"]
    assert result.tables[0].header == ["r", "v"]


@pytest.mark.asyncio
async def test_compare_square(tmp_path, fast_settings):
    result = await _run("compare", shape="square", h=0.25, n_radii=32, n_subsets=10, out=tmp_path)
    assert result.ok, result.failed_checks
    assert len(result.payload["reports"]) == 7
    assert result.payload["passed"] is True


@pytest.mark.asyncio
async def test_compare_only_selected_checks(tmp_path):
    result = await _run("compare", shape="square", checks=["isoperimetric"], l_values=[0.0, -0.5], out=tmp_path)
    assert [r["report"] for r in result.payload["reports"]] == ["isoperimetric", "isoperimetric"]


@pytest.mark.asyncio
async def test_convergence_single_level(tmp_path):
    result = await _run("convergence", h=0.4, refinements=1, out=tmp_path)
    table = result.tables[0]
    assert "order" not in table.header
    assert len(table.rows) == 1
    assert result.payload["observed_order"] is None


@pytest.mark.asyncio
async def test_convergence_observed_order(tmp_path):
    result = await _run("convergence", h=0.4, refinements=3, out=tmp_path)
    table = result.tables[0]
    column = {name: i for i, name in enumerate(table.header)}
    assert table.header == ["level", "h", "n_nodes", "l2_error", "linf_error", "order", "lambda", "lambda_error", "margin"]
    assert result.payload["observed_order"] >= 1.8
    errors = [row[column["lambda_error"]] for row in table.rows]
    assert errors[0] > errors[1] > errors[2]
