"""Named source terms f(x) evaluated on arrays of points of shape (n, 2)."""
from __future__ import annotations

from typing import Dict

import numpy as np

from src.lab.errors import DomainError
from src.lab.fem import Source


def one(points: np.ndarray) -> np.ndarray:
    return np.ones(points.shape[0])


def zero(points: np.ndarray) -> np.ndarray:
    return np.zeros(points.shape[0])


def nonradial(points: np.ndarray) -> np.ndarray:
    """1 + max(0, x): nonnegative, strictly nonradial."""
    return 1.0 + np.maximum(0.0, points[:, 0])


def radial(points: np.ndarray) -> np.ndarray:
    """exp(-|x|^2), radially decreasing."""
    return np.exp(-np.einsum("nd,nd->n", points, points))


SOURCES_REGISTRY: Dict[str, Source] = {
    "one": one,
    "zero": zero,
    "nonradial": nonradial,
    "radial": radial,
}


def resolve_source(spec: str) -> Source:
    """Source for a tag: a registry name or "const:c"."""
    tag = spec.strip().lower()
    if tag in SOURCES_REGISTRY:
        return SOURCES_REGISTRY[tag]
    if tag.startswith("const:"):
        try:
            value = float(tag.split(":", 1)[1])
        except ValueError as exc:
            raise DomainError(f"invalid constant source {spec!r}") from exc
        return lambda points: np.full(points.shape[0], value)
    raise DomainError(f"unknown source {spec!r}; choose from {sorted(SOURCES_REGISTRY)} or const:c")
