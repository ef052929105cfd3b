"""Assembly, Robin solves, eigenpairs and weighted norms."""
import math

import numpy as np
import pytest

from src.lab import fem, geometry
from src.lab.errors import SolverError
from src.lab.gallery import gallery_domain
from src.lab.meshing import triangulate
from src.lab.radial import exact_disk_eigenvalue, exact_disk_torsion
from src.lab.sources import nonradial, one, resolve_source
from src.settings import settings


def test_stiffness_annihilates_constants(square_mesh):
    stiffness = fem.assemble_stiffness(square_mesh)
    np.testing.assert_allclose(stiffness @ np.ones(square_mesh.n_nodes), 0.0, atol=1e-12)
    assert abs(stiffness - stiffness.T).max() < 1e-14


def test_unweighted_mass_integrates_quadratics(square_mesh):
    mass = fem.assemble_weighted_mass(square_mesh, 0.0)
    ones = np.ones(square_mesh.n_nodes)
    x = square_mesh.nodes[:, 0]
    assert ones @ (mass @ ones) == pytest.approx(4.0, rel=1e-12)
    assert x @ (mass @ x) == pytest.approx(4.0 / 3.0, rel=1e-10)


def test_weighted_mass_total_is_weighted_area(square_weighted, weighted_mesh):
    mass = fem.assemble_weighted_mass(weighted_mesh, square_weighted.l)
    ones = np.ones(weighted_mesh.n_nodes)
    assert ones @ (mass @ ones) == pytest.approx(geometry.weighted_area(square_weighted), rel=1e-9)
    assert abs(mass - mass.T).max() < 1e-14


@pytest.mark.parametrize("l", [0.0, -1.0])
def test_boundary_mass_total_is_weighted_perimeter(square, l):
    domain = square.replace(l=l)
    mesh = triangulate(domain, 0.25)
    boundary = fem.assemble_boundary_mass(mesh, l)
    ones = np.ones(mesh.n_nodes)
    assert ones @ (boundary @ ones) == pytest.approx(geometry.weighted_perimeter(domain), rel=1e-9)


def test_load_sums_to_weighted_area_for_unit_source(square_weighted, weighted_mesh):
    load = fem.assemble_load(weighted_mesh, one, square_weighted.l)
    assert load.sum() == pytest.approx(geometry.weighted_area(square_weighted), rel=1e-9)


def test_zero_source_gives_zero_solution(square, square_mesh):
    field = fem.solve_robin(square_mesh, square, resolve_source("zero"))
    assert not np.any(field.values)


def test_disk_torsion_centre_and_boundary_values():
    domain = gallery_domain("ngon:1024:1")
    mesh = triangulate(domain, 0.05)
    field = fem.solve_robin(mesh, domain, one)
    assert field.values[mesh.origin_index] == pytest.approx(0.75, abs=5e-3)
    on_boundary = np.linalg.norm(mesh.nodes, axis=1) > 1.0 - 1e-9
    assert on_boundary.sum() >= 1024
    np.testing.assert_allclose(field.values[on_boundary], 0.5, atol=5e-3)
    assert field.min > 0.0


@pytest.mark.parametrize("l, beta", [(0.0, 1.0), (-1.0, 0.5), (-0.5, 2.0)])
def test_disk_torsion_matches_closed_form(l, beta):
    domain = gallery_domain("ngon:128:1", l=l, beta=beta)
    mesh = triangulate(domain, 0.1)
    field = fem.solve_robin(mesh, domain, one)
    radius = geometry.domain_disk(domain).radius
    exact = exact_disk_torsion(np.linalg.norm(mesh.nodes, axis=1), radius, l, beta)
    assert np.abs(field.values - exact).max() < 2e-2 * exact.max()


def test_solution_is_deterministic(square_weighted, weighted_mesh):
    first = fem.solve_robin(weighted_mesh, square_weighted, one)
    second = fem.solve_robin(weighted_mesh, square_weighted, one)
    assert np.array_equal(first.values, second.values)
    l1 = fem.weighted_norms(first, square_weighted.l).l1
    assert l1 == fem.weighted_norms(second, square_weighted.l).l1


def test_solve_satisfies_discrete_system(square, square_mesh):
    system = fem.assemble_system(square_mesh, square)
    field = fem.solve_robin(square_mesh, square, nonradial, system)
    load = fem.assemble_load(square_mesh, nonradial, square.l, system.mass)
    residual = np.linalg.norm(system.operator @ field.values - load)
    assert residual <= 1e-10 * np.linalg.norm(load)


def test_constant_beta_fn_matches_scaled_beta(square, square_mesh):
    doubled = fem.solve_robin(square_mesh, square.replace(beta=2.0), one)
    variable = fem.solve_robin(
        square_mesh, square.replace(beta_fn=lambda pts: np.full(pts.shape[0], 2.0)), one
    )
    np.testing.assert_allclose(variable.values, doubled.values, rtol=1e-9)


def test_cg_iteration_cap_raises(square, square_mesh):
    settings.LAB_CG_MAXITER_FACTOR = 0
    with pytest.raises(SolverError):
        fem.solve_robin(square_mesh, square, one)


def test_disk_eigenvalue_matches_bessel_root():
    domain = gallery_domain("ngon:128:1")
    result = fem.smallest_eigenpair(triangulate(domain, 0.1), domain)
    radius = geometry.domain_disk(domain).radius
    assert result.eigenvalue == pytest.approx(exact_disk_eigenvalue(radius, 0.0, 1.0), rel=1e-2)
    assert result.residual <= settings.LAB_EIGEN_TOL
    assert result.field.min > -1e-12


def test_eigenpair_normalization_and_rayleigh(square_weighted, weighted_mesh):
    system = fem.assemble_system(weighted_mesh, square_weighted)
    result = fem.smallest_eigenpair(weighted_mesh, square_weighted, system)
    x = result.field.values
    assert x @ (system.mass @ x) == pytest.approx(1.0, rel=1e-10)
    assert fem.rayleigh_quotient(system, x) == pytest.approx(result.eigenvalue, rel=1e-12)
    assert fem.eigen_residual(system, x, result.eigenvalue) <= settings.LAB_EIGEN_TOL


def test_eigenvalue_increases_with_beta(square, square_mesh):
    low = fem.smallest_eigenpair(square_mesh, square.replace(beta=0.5)).eigenvalue
    high = fem.smallest_eigenpair(square_mesh, square.replace(beta=2.0)).eigenvalue
    assert 0.0 < low < high


def test_weighted_norms_of_constant(square_weighted, weighted_mesh):
    field = fem.FemField(mesh=weighted_mesh, values=np.full(weighted_mesh.n_nodes, -2.0))
    norms = fem.weighted_norms(field, square_weighted.l)
    area = geometry.weighted_area(square_weighted)
    assert norms.l1 == pytest.approx(2.0 * area, rel=1e-9)
    assert norms.l2 == pytest.approx(2.0 * math.sqrt(area), rel=1e-9)


def test_field_rejects_wrong_shape(square_mesh):
    with pytest.raises(ValueError):
        fem.FemField(mesh=square_mesh, values=np.zeros(3))
