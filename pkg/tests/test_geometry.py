"""Weighted measure, perimeter, symmetrized disk and gallery domains."""
import math

import numpy as np
import pytest
from scipy.integrate import quad

from src.lab import geometry
from src.lab.errors import DomainError
from src.lab.gallery import gallery_domain, shape_vertices
from src.lab.geometry import WeightedDomain, load_vertices, symmetrized_disk


def test_square_unweighted_measures(square):
    assert geometry.weighted_area(square) == pytest.approx(4.0, rel=1e-12)
    assert geometry.weighted_perimeter(square) == pytest.approx(8.0, rel=1e-12)
    assert geometry.isoperimetric_ratio(square) == pytest.approx(4.0 / math.pi, rel=1e-10)


def test_square_weighted_area_matches_polar_closed_form():
    domain = gallery_domain("square", l=-1.0)
    assert geometry.weighted_area(domain) == pytest.approx(8.0 * math.log(1.0 + math.sqrt(2.0)), rel=1e-9)


def test_square_weighted_perimeter_matches_quad():
    domain = gallery_domain("square", l=-1.0)
    side, _ = quad(lambda y: (1.0 + y * y) ** -0.25, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    assert geometry.weighted_perimeter(domain) == pytest.approx(8.0 * side, rel=1e-9)


@pytest.mark.parametrize("l", [0.0, -0.5, -1.0, -1.5])
def test_off_centre_triangle_fan_matches_quad(l):
    # Triangle whose edges stay away from the origin on two sides.
    vertices = np.array([(-0.3, -0.2), (1.1, -0.4), (0.2, 0.9)])
    domain = WeightedDomain(vertices=vertices, l=l)

    def radial_extent(theta):
        # Distance from the origin to the boundary along direction theta.
        d = np.array([math.cos(theta), math.sin(theta)])
        best = math.inf
        for p, q in zip(vertices, np.roll(vertices, -1, axis=0)):
            e = q - p
            denom = d[0] * e[1] - d[1] * e[0]
            if abs(denom) < 1e-15:
                continue
            t = (p[0] * e[1] - p[1] * e[0]) / denom
            s = (p[0] * d[1] - p[1] * d[0]) / denom
            if t > 0 and -1e-12 <= s <= 1 + 1e-12:
                best = min(best, t)
        return best

    expected, _ = quad(
        lambda th: radial_extent(th) ** (l + 2.0) / (l + 2.0), 0.0, 2.0 * math.pi, limit=200, epsabs=1e-13
    )
    assert geometry.weighted_area(domain) == pytest.approx(expected, rel=1e-8)


def test_regular_polygon_ratio_tends_to_one():
    domain = gallery_domain("ngon:1024:1")
    n = 1024
    assert geometry.isoperimetric_ratio(domain) == pytest.approx(n * math.tan(math.pi / n) / math.pi, rel=1e-10)
    assert geometry.isoperimetric_ratio(domain) == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("l", [0.0, -1.0])
def test_regular_polygon_ratio_decreases_with_sides(l):
    ratios = [geometry.isoperimetric_ratio(gallery_domain(f"ngon:{n}:1", l=l)) for n in (8, 32, 128, 512)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] >= 1.0 - 1e-12


@pytest.mark.parametrize("shape", ["square", "rectangle", "lshape", "ngon:7:1"])
@pytest.mark.parametrize("l", [0.0, -0.5, -1.0])
def test_weighted_isoperimetric_inequality(shape, l):
    assert geometry.isoperimetric_ratio(gallery_domain(shape, l=l)) >= 1.0 - 1e-12


@pytest.mark.parametrize("l", [0.0, -0.7])
def test_scaling_laws(square, l):
    base = square.replace(l=l)
    scaled = base.scaled(1.7)
    assert geometry.weighted_area(scaled) == pytest.approx(1.7 ** (l + 2.0) * geometry.weighted_area(base), rel=1e-10)
    assert geometry.weighted_perimeter(scaled) == pytest.approx(
        1.7 ** (0.5 * (l + 2.0)) * geometry.weighted_perimeter(base), rel=1e-10
    )


def test_symmetrized_disk_preserves_measure(square):
    disk = geometry.domain_disk(square)
    assert disk.radius == pytest.approx(math.sqrt(4.0 / math.pi), rel=1e-12)
    assert disk.measure_of_ball(disk.radius) == pytest.approx(4.0, rel=1e-12)
    assert disk.perimeter == pytest.approx(2.0 * math.pi * disk.radius, rel=1e-12)


def test_symmetrized_disk_weighted():
    disk = symmetrized_disk(2.0, -1.0, 0.5)
    assert disk.radius == pytest.approx(1.0 / math.pi, rel=1e-12)
    assert disk.boundary_beta == pytest.approx(0.5 * disk.radius ** -0.5)


def test_isoperimetric_deficit_nonnegative(lshape):
    assert geometry.isoperimetric_deficit(lshape) > 0.0


@pytest.mark.parametrize(
    "vertices",
    [
        [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],  # origin on the boundary
        [(0.5, 0.5), (1.0, 0.5), (1.0, 1.0), (0.5, 1.0)],  # origin outside
        [(-1.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0)],  # bow tie
        [(-1.0, -1.0), (-1.0, 1.0), (1.0, 1.0), (1.0, -1.0)],  # clockwise
        [(-1.0, -1.0), (1.0, -1.0)],
    ],
)
def test_invalid_polygons_rejected(vertices):
    with pytest.raises(DomainError):
        WeightedDomain(vertices=np.array(vertices, dtype=float))


@pytest.mark.parametrize("l, beta", [(-2.0, 1.0), (0.5, 1.0), (0.0, 0.0), (0.0, -1.0), (float("nan"), 1.0)])
def test_out_of_range_parameters_rejected(l, beta):
    with pytest.raises(DomainError):
        gallery_domain("square", l=l, beta=beta)


def test_beta_fn_must_be_positive(square):
    with pytest.raises(DomainError):
        square.replace(beta_fn=lambda pts: pts[:, 0])


def test_load_vertices_reorients_clockwise(tmp_path):
    path = tmp_path / "cw.txt"
    path.write_text("# clockwise square\n-1 -1\n-1 1\n\n1, 1\n1 -1\n-1 -1\n", encoding="utf-8")
    vertices = load_vertices(path)
    assert vertices.shape == (4, 2)
    domain = gallery_domain(vertices_path=path)
    assert domain.name == "cw"
    assert geometry.weighted_area(domain) == pytest.approx(4.0)


def test_load_vertices_rejects_bad_lines(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 0 0\n", encoding="utf-8")
    with pytest.raises(DomainError):
        load_vertices(path)


def test_gallery_shapes():
    assert geometry.weighted_area(gallery_domain("rectangle")) == pytest.approx(3.0)
    assert geometry.weighted_area(gallery_domain("lshape")) == pytest.approx(3.0)
    assert shape_vertices("regular-ngon 8 2").shape == (8, 2)
    with pytest.raises(DomainError):
        shape_vertices("hexagram")
    with pytest.raises(DomainError):
        shape_vertices("ngon:2.5")
