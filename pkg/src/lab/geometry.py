"""Weighted measure, weighted perimeter and the symmetrized disk of a polygon."""
from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np
from shapely.geometry import LinearRing, Point, Polygon

from src.lab.errors import DomainError
from src.lab.quadrature import adaptive_gauss, cross2
from src.settings import settings

logger = logging.getLogger(__name__)

BetaFunction = Callable[[np.ndarray], np.ndarray]


def _check_exponent(l: float) -> None:
    if not (-2.0 < l <= 0.0) or not math.isfinite(l):
        raise DomainError(f"weight exponent l must lie in (-2, 0], got {l}")


@dataclass(frozen=True, eq=False)
class WeightedDomain:
    """Polygon containing the origin, with weight exponent and Robin parameter.

    Vertices are stored counterclockwise as a float array of shape (n, 2).
    ``beta_fn`` maps boundary points of shape (k, 2) to positive multipliers
    of the Robin parameter; ``None`` means a constant parameter.
    """

    vertices: np.ndarray
    l: float = 0.0
    beta: float = 1.0
    beta_fn: Optional[BetaFunction] = None
    name: str = "polygon"
    polygon: Polygon = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vertices = np.asarray(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2 or vertices.shape[0] < 3:
            raise DomainError("polygon needs at least three 2D vertices")
        if not np.all(np.isfinite(vertices)):
            raise DomainError("polygon vertices must be finite")
        _check_exponent(self.l)
        if not (self.beta > 0.0) or not math.isfinite(self.beta):
            raise DomainError(f"Robin parameter beta must be positive, got {self.beta}")

        ring = LinearRing(vertices)
        polygon = Polygon(ring)
        if not ring.is_simple or not polygon.is_valid or polygon.area <= 0.0:
            raise DomainError(f"polygon '{self.name}' is not simple")
        if not ring.is_ccw:
            raise DomainError(f"polygon '{self.name}' must be counterclockwise")
        origin = Point(0.0, 0.0)
        if not polygon.contains(origin) or polygon.exterior.distance(origin) <= 0.0:
            raise DomainError(f"origin must lie strictly inside polygon '{self.name}'")

        vertices.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "polygon", polygon)
        if self.beta_fn is not None:
            self._check_beta_fn()

    def _check_beta_fn(self) -> None:
        midpoints = 0.5 * (self.vertices + np.roll(self.vertices, -1, axis=0))
        samples = np.vstack([self.vertices, midpoints])
        multipliers = np.asarray(self.beta_fn(samples), dtype=float)
        if multipliers.shape != (samples.shape[0],):
            raise DomainError("beta_fn must return one multiplier per boundary point")
        if not np.all(np.isfinite(multipliers)) or multipliers.min() <= 0.0:
            raise DomainError("beta_fn must stay positive on the boundary")

    @property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    @property
    def diameter(self) -> float:
        diff = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((diff ** 2).sum(axis=-1)).max())

    @property
    def min_edge(self) -> float:
        start, end = self.edges
        return float(np.linalg.norm(end - start, axis=1).min())

    def replace(self, **changes) -> "WeightedDomain":
        return dataclasses.replace(self, **changes)

    def scaled(self, factor: float) -> "WeightedDomain":
        if factor <= 0.0:
            raise DomainError("scaling factor must be positive")
        return self.replace(vertices=self.vertices * factor)


@dataclass(frozen=True)
class SymmetrizedDisk:
    """Disk centred at the origin with the same weighted measure as a domain."""

    radius: float
    l: float
    beta: float
    weighted_measure: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0):
            raise DomainError("symmetrized radius must be positive")
        _check_exponent(self.l)
        expected = 2.0 * math.pi * self.radius ** (self.l + 2.0) / (self.l + 2.0)
        if abs(expected - self.weighted_measure) > 1e-12 * self.weighted_measure:
            raise DomainError("symmetrized disk radius and weighted measure disagree")

    @property
    def perimeter(self) -> float:
        """Weighted perimeter 2 pi R**((l+2)/2)."""
        return 2.0 * math.pi * self.radius ** (0.5 * (self.l + 2.0))

    @property
    def boundary_beta(self) -> float:
        """Constant Robin coefficient beta * R**(l/2) of the symmetrized problem."""
        return self.beta * self.radius ** (0.5 * self.l)

    def measure_of_ball(self, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return 2.0 * math.pi * np.asarray(r, dtype=float) ** (self.l + 2.0) / (self.l + 2.0)


def weighted_area(domain: WeightedDomain) -> float:
    """Return int_Omega |x|**l dx through the origin fan of the polygon edges."""
    l = domain.l
    total = []
    for p, q in zip(*domain.edges):
        cross = float(cross2(p, q))
        if cross == 0.0:
            continue
        direction = q - p

        def integrand(t: np.ndarray, p=p, direction=direction, cross=cross) -> np.ndarray:
            x = p[None, :] + t[:, None] * direction[None, :]
            rho2 = np.einsum("nd,nd->n", x, x)
            return cross * rho2 ** (0.5 * l) / (l + 2.0)

        total.append(adaptive_gauss(integrand, 0.0, 1.0, order=settings.LAB_ANGULAR_GAUSS_POINTS))
    area = math.fsum(total)
    if area <= 0.0:
        raise DomainError(f"nonpositive weighted area for '{domain.name}'")
    return area


def weighted_perimeter(domain: WeightedDomain) -> float:
    """Return int_{boundary} |x|**(l/2) ds with adaptive Gauss quadrature per edge."""
    half = 0.5 * domain.l
    total = []
    for p, q in zip(*domain.edges):
        direction = q - p
        length = float(np.hypot(*direction))

        def integrand(t: np.ndarray, p=p, direction=direction, length=length) -> np.ndarray:
            x = p[None, :] + t[:, None] * direction[None, :]
            rho2 = np.einsum("nd,nd->n", x, x)
            return length * rho2 ** (0.5 * half)

        total.append(adaptive_gauss(integrand, 0.0, 1.0, order=settings.LAB_EDGE_GAUSS_POINTS))
    return math.fsum(total)


def symmetrized_disk(measure: float, l: float, beta: float) -> SymmetrizedDisk:
    if not (measure > 0.0) or not math.isfinite(measure):
        raise DomainError(f"weighted measure must be positive, got {measure}")
    _check_exponent(l)
    radius = ((l + 2.0) * measure / (2.0 * math.pi)) ** (1.0 / (l + 2.0))
    stored = 2.0 * math.pi * radius ** (l + 2.0) / (l + 2.0)
    return SymmetrizedDisk(radius=radius, l=l, beta=beta, weighted_measure=stored)


def domain_disk(domain: WeightedDomain) -> SymmetrizedDisk:
    return symmetrized_disk(weighted_area(domain), domain.l, domain.beta)


def isoperimetric_ratio(domain: WeightedDomain) -> float:
    """P_{l/2}(Omega)**2 / (2 pi (l+2) |Omega|_l); at least one, one only for disks."""
    perimeter = weighted_perimeter(domain)
    area = weighted_area(domain)
    return perimeter ** 2 / (2.0 * math.pi * (domain.l + 2.0) * area)


def isoperimetric_deficit(domain: WeightedDomain) -> float:
    """Weighted perimeter excess over the symmetrized disk."""
    return weighted_perimeter(domain) - domain_disk(domain).perimeter


def load_vertices(path: Union[str, Path]) -> np.ndarray:
    """Read a plain-text vertex list, one "x y" pair per line.

    Blank lines and lines starting with '#' are skipped. Clockwise input is
    reversed so the result is counterclockwise.
    """
    points = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise DomainError(f"{path}:{lineno}: expected 'x y', got {raw!r}")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: invalid coordinate in {raw!r}") from exc
    if len(points) > 1 and points[0] == points[-1]:
        points.pop()
    vertices = np.asarray(points, dtype=float)
    if vertices.shape[0] < 3:
        raise DomainError(f"{path}: need at least three vertices")
    if not LinearRing(vertices).is_ccw:
        logger.info(f"Reorienting clockwise vertex list from {path}")
        vertices = vertices[::-1].copy()
    return vertices
