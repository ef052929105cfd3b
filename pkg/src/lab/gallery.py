"""Named test domains: square, rectangle, regular polygons, disk and L-shape."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from src.lab.errors import DomainError
from src.lab.geometry import WeightedDomain, load_vertices
from src.settings import settings

# [-1, 1]^2 minus [0, 1] x [-1, 0], shifted by (0.25, -0.25) so the origin is interior.
LSHAPE_VERTICES = np.array(
    [
        (-0.75, -1.25),
        (0.25, -1.25),
        (0.25, -0.25),
        (1.25, -0.25),
        (1.25, 0.75),
        (-0.75, 0.75),
    ]
)


def square(half_width: float = 1.0) -> np.ndarray:
    s = half_width
    return np.array([(-s, -s), (s, -s), (s, s), (-s, s)], dtype=float)


def rectangle(width: float = 3.0, height: float = 1.0) -> np.ndarray:
    a, b = 0.5 * width, 0.5 * height
    return np.array([(-a, -b), (a, -b), (a, b), (-a, b)], dtype=float)


def regular_ngon(sides: int = 64, radius: float = 1.0) -> np.ndarray:
    if sides < 3:
        raise DomainError("a regular polygon needs at least three sides")
    angles = 2.0 * math.pi * np.arange(sides) / sides
    return radius * np.column_stack([np.cos(angles), np.sin(angles)])


def disk(radius: float = 1.0) -> np.ndarray:
    return regular_ngon(settings.LAB_DISK_SIDES, radius)


def lshape() -> np.ndarray:
    return LSHAPE_VERTICES.copy()


SHAPES: Dict[str, Callable[..., np.ndarray]] = {
    "square": square,
    "rectangle": rectangle,
    "ngon": regular_ngon,
    "regular-ngon": regular_ngon,
    "disk": disk,
    "lshape": lshape,
}


def _parse_shape(spec: str) -> tuple[str, List[float]]:
    tokens = spec.replace(":", " ").split()
    if not tokens:
        raise DomainError("empty shape name")
    name, raw_args = tokens[0].lower(), tokens[1:]
    try:
        args = [float(a) for a in raw_args]
    except ValueError as exc:
        raise DomainError(f"invalid shape arguments in {spec!r}") from exc
    return name, args


def shape_vertices(spec: str) -> np.ndarray:
    """Vertices for specs like "square", "rectangle 3 1", "ngon:64:1" or "regular-ngon 64 1"."""
    name, args = _parse_shape(spec)
    if name not in SHAPES:
        raise DomainError(f"unknown shape {name!r}; choose from {sorted(SHAPES)}")
    if name in ("ngon", "regular-ngon"):
        if not args or args[0] != int(args[0]):
            raise DomainError(f"{spec!r}: number of sides must be an integer")
        args = [int(args[0]), *args[1:]]
    try:
        return SHAPES[name](*args)
    except TypeError as exc:
        raise DomainError(f"too many arguments for shape {name!r}") from exc


def gallery_domain(
    spec: str = "square",
    l: float = 0.0,
    beta: float = 1.0,
    *,
    vertices_path: Optional[Union[str, Path]] = None,
) -> WeightedDomain:
    """Build a validated domain from a gallery name or a vertex file."""
    if vertices_path is not None:
        vertices = load_vertices(vertices_path)
        name = Path(vertices_path).stem
    else:
        vertices = shape_vertices(spec)
        name = spec
    return WeightedDomain(vertices=vertices, l=l, beta=beta, name=name)
