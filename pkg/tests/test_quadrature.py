"""Fan-rule moments, Gauss rules and exact superlevel clipping."""
import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from src.lab.quadrature import adaptive_gauss, gauss_legendre, superlevel_integrals, triangle_moments


def test_composite_gauss_is_exact_for_polynomials():
    nodes, weights = gauss_legendre(3, panels=2)
    assert weights.sum() == pytest.approx(1.0)
    assert float(weights @ nodes ** 5) == pytest.approx(1.0 / 6.0, rel=1e-14)


def test_adaptive_gauss_handles_endpoint_singularity():
    value = adaptive_gauss(np.sqrt, 0.0, 1.0, order=7, tol=1e-12)
    assert value == pytest.approx(2.0 / 3.0, rel=1e-10)


@pytest.mark.parametrize("l", [0.0, -0.5, -1.5])
def test_triangle_moments_match_dblquad(l):
    a, b, c = np.array([[0.2, 0.1]]), np.array([[1.0, 0.3]]), np.array([[0.4, 0.9]])
    moments = triangle_moments(a, b, c, l, degree=2)

    def over_triangle(g):
        # Below: edge a-b. Above: edge a-c, then edge c-b.
        def lower(x):
            return 0.1 + (x - 0.2) * 0.2 / 0.8

        def upper(x):
            return 0.1 + (x - 0.2) * 0.8 / 0.2 if x <= 0.4 else 0.9 + (x - 0.4) * (0.3 - 0.9) / 0.6

        def weighted(y, x):
            return g(x, y) * math.hypot(x, y) ** l

        left, _ = dblquad(weighted, 0.2, 0.4, lower, upper, epsabs=1e-14, epsrel=1e-12)
        right, _ = dblquad(weighted, 0.4, 1.0, lower, upper, epsabs=1e-14, epsrel=1e-12)
        return left + right

    assert moments.zeroth[0] == pytest.approx(over_triangle(lambda x, y: 1.0), rel=1e-9)
    assert moments.first[0, 0] == pytest.approx(over_triangle(lambda x, y: x), rel=1e-9)
    assert moments.second[0, 0, 1] == pytest.approx(over_triangle(lambda x, y: x * y), rel=1e-9)


def test_moments_are_signed_by_orientation():
    a, b, c = np.array([[-0.5, -0.5]]), np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])
    ccw = triangle_moments(a, b, c, -1.0).zeroth[0]
    cw = triangle_moments(a, c, b, -1.0).zeroth[0]
    assert ccw > 0.0
    assert cw == pytest.approx(-ccw, rel=1e-12)


def test_superlevel_of_linear_field_on_square(square_mesh):
    coords = square_mesh.coords
    values = square_mesh.nodes[:, 0][square_mesh.triangles]
    levels = np.array([-1.5, -0.5, 0.0, 0.25, 0.9, 1.0])
    measure, integral = superlevel_integrals(coords, values, levels, 0.0)
    expected_measure = 2.0 * (1.0 - np.clip(levels, -1.0, 1.0))
    expected_integral = 1.0 - np.clip(levels, -1.0, 1.0) ** 2
    np.testing.assert_allclose(measure, expected_measure, atol=1e-12)
    np.testing.assert_allclose(integral, expected_integral, atol=1e-12)


def test_superlevel_weighted_total(weighted_mesh, square_weighted):
    values = np.ones((weighted_mesh.n_triangles, 3))
    measure, integral = superlevel_integrals(weighted_mesh.coords, values, np.array([0.0, 1.0]), -1.0)
    assert measure[0] == pytest.approx(8.0 * math.log(1.0 + math.sqrt(2.0)), rel=1e-9)
    assert integral[0] == pytest.approx(measure[0])
    assert measure[1] == 0.0
