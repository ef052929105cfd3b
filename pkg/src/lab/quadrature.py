"""Quadrature kernels for integrals against the weight |x|**l.

Every weighted integral over a planar region is reduced to its boundary
through the origin fan: for a polynomial P homogeneous of degree m,

    int_{fan(0, p, q)} P(x) |x|**l dx
        = cross(p, q) * int_0^1 |x(t)|**l P(x(t)) dt / (l + 2 + m),

with x(t) = p + t (q - p).  The radial factor is integrated in closed form,
so the origin singularity never reaches a quadrature node; the remaining
one-dimensional integral is done with Gauss-Legendre.  Fans are signed, so
summing over the edges of any polygon yields the integral over the polygon.
"""
from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from src.settings import settings


class FanMoments(NamedTuple):
    """Signed weighted moments of a region: int |x|**l, int x |x|**l, int x x^T |x|**l."""

    zeroth: np.ndarray
    first: Optional[np.ndarray] = None
    second: Optional[np.ndarray] = None


@lru_cache(maxsize=32)
def gauss_legendre(order: int, panels: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    width = 1.0 / panels
    nodes = np.concatenate([k * width + width * x for k in range(panels)])
    weights = np.concatenate([width * w for _ in range(panels)])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def adaptive_gauss(
    integrand: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    order: int,
    tol: Optional[float] = None,
    max_depth: Optional[int] = None,
) -> float:
    """Integrate a vectorized scalar function on [a, b] by Gauss bisection.

    An interval is accepted when splitting it changes its contribution by
    less than ``tol`` times the magnitude of the whole integral.
    """
    tol = settings.LAB_ADAPTIVE_TOL if tol is None else tol
    max_depth = settings.LAB_ADAPTIVE_MAX_DEPTH if max_depth is None else max_depth
    nodes, weights = gauss_legendre(order)

    def rule(lo: float, hi: float) -> float:
        return (hi - lo) * float(np.dot(weights, integrand(lo + (hi - lo) * nodes)))

    whole = rule(a, b)
    scale = max(abs(whole), np.finfo(float).tiny)
    parts = []
    stack = [(a, b, whole, 0)]
    while stack:
        lo, hi, estimate, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = rule(lo, mid)
        right = rule(mid, hi)
        if abs(left + right - estimate) <= tol * scale or depth >= max_depth:
            parts.append(left + right)
        else:
            stack.append((mid, hi, right, depth + 1))
            stack.append((lo, mid, left, depth + 1))
    return math.fsum(parts)


def cross2(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]


def fan_edge_moments(p: np.ndarray, q: np.ndarray, l: float, degree: int = 0) -> FanMoments:
    """Signed moments of the fans (0, p_i, q_i) for arrays of edges of shape (n, 2)."""
    nodes, weights = gauss_legendre(settings.LAB_ANGULAR_GAUSS_POINTS, settings.LAB_ELEMENT_PANELS)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    cross = cross2(p, q)
    x = p[:, None, :] + nodes[None, :, None] * (q - p)[:, None, :]
    if l == 0.0:
        radial = np.ones(x.shape[:2])
    else:
        rho2 = np.einsum("nmd,nmd->nm", x, x)
        radial = np.where(rho2 > 0.0, rho2, 1.0) ** (0.5 * l)
    # Fans of edges through the origin have zero area; their nodes may sit on the singularity.
    base = np.where((cross != 0.0)[:, None], cross[:, None] * radial, 0.0) * weights[None, :]
    zeroth = base.sum(axis=1) / (l + 2.0)
    first = second = None
    if degree >= 1:
        first = np.einsum("nm,nmd->nd", base, x) / (l + 3.0)
    if degree >= 2:
        second = np.einsum("nm,nmd,nme->nde", base, x, x) / (l + 4.0)
    return FanMoments(zeroth, first, second)


def triangle_moments(a: np.ndarray, b: np.ndarray, c: np.ndarray, l: float, degree: int = 0) -> FanMoments:
    """Signed weighted moments of triangles (a, b, c); positive for counterclockwise input."""
    parts = [fan_edge_moments(p, q, l, degree) for p, q in ((a, b), (b, c), (c, a))]
    zeroth = parts[0].zeroth + parts[1].zeroth + parts[2].zeroth
    first = second = None
    if degree >= 1:
        first = parts[0].first + parts[1].first + parts[2].first
    if degree >= 2:
        second = parts[0].second + parts[1].second + parts[2].second
    return FanMoments(zeroth, first, second)


def p1_gradients(coords: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gradients of the three P1 basis functions and the signed doubled areas.

    ``coords`` has shape (T, 3, 2); returns gradients of shape (T, 3, 2).
    """
    p0, p1, p2 = coords[:, 0], coords[:, 1], coords[:, 2]
    area2 = cross2(p1 - p0, p2 - p0)
    safe = np.where(area2 != 0.0, area2, 1.0)
    grads = np.empty_like(coords)
    for k, (j, m) in enumerate(((1, 2), (2, 0), (0, 1))):
        edge = coords[:, m] - coords[:, j]
        grads[:, k, 0] = -edge[:, 1] / safe
        grads[:, k, 1] = edge[:, 0] / safe
    return grads, area2


def linear_coefficients(coords: np.ndarray, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Write the interpolant on each triangle as u(x) = offset + slope . x."""
    grads, _ = p1_gradients(coords)
    slope = np.einsum("tk,tkd->td", values, grads)
    offset = values[:, 0] - np.einsum("td,td->t", slope, coords[:, 0])
    return offset, slope


def _oriented(moments: FanMoments, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    sign = np.sign(cross2(b - a, c - a))
    return sign * moments.zeroth, sign[:, None] * moments.first


def superlevel_integrals(
    coords: np.ndarray,
    values: np.ndarray,
    levels: np.ndarray,
    l: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """Weighted measure and integral of the P1 field over {u > t} for each level t.

    The superlevel set of a linear function restricted to a triangle is a
    triangle or a quadrilateral whose vertices lie on the element edges; it
    is clipped exactly and measured with the fan rule.

    Args:
        coords: element vertex coordinates, shape (T, 3, 2)
        values: nodal values per element, shape (T, 3)
        levels: ascending levels, shape (K,)
        l: weight exponent

    Returns:
        Tuple (measure, integral), each of shape (K,), where measure[k] is
        int_{u > t_k} |x|**l dx and integral[k] is int_{u > t_k} u |x|**l dx.
    """
    levels = np.asarray(levels, dtype=float)
    n_levels = levels.size
    measure = np.zeros(n_levels)
    integral = np.zeros(n_levels)
    if coords.shape[0] == 0 or n_levels == 0:
        return measure, integral

    order = np.argsort(values, axis=1, kind="stable")
    u = np.take_along_axis(values, order, axis=1)
    v = np.take_along_axis(coords, order[:, :, None], axis=1)
    offset, slope = linear_coefficients(coords, values)

    full = triangle_moments(coords[:, 0], coords[:, 1], coords[:, 2], l, degree=1)
    full0, full1 = _oriented(full, coords[:, 0], coords[:, 1], coords[:, 2])
    full_int = offset * full0 + np.einsum("td,td->t", slope, full1)

    # Elements entirely above t contribute whole; suffix sums over increasing minima.
    by_min = np.argsort(u[:, 0], kind="stable")
    sorted_min = u[by_min, 0]
    suffix0 = np.concatenate([np.cumsum(full0[by_min][::-1])[::-1], [0.0]])
    suffix1 = np.concatenate([np.cumsum(full_int[by_min][::-1])[::-1], [0.0]])
    start = np.searchsorted(sorted_min, levels, side="right")
    measure += suffix0[start]
    integral += suffix1[start]

    lo = np.searchsorted(levels, u[:, 0], side="left")
    hi = np.searchsorted(levels, u[:, 2], side="left")
    counts = np.maximum(hi - lo, 0)
    total_pairs = int(counts.sum())
    if total_pairs == 0:
        return measure, integral

    tri_of_pair = np.repeat(np.arange(u.shape[0]), counts)
    first_pair = np.repeat(np.cumsum(counts) - counts, counts)
    level_of_pair = np.repeat(lo, counts) + (np.arange(total_pairs) - first_pair)

    chunk = max(int(settings.LAB_CHUNK_SIZE), 1)
    for begin in range(0, total_pairs, chunk):
        tri = tri_of_pair[begin:begin + chunk]
        lev = level_of_pair[begin:begin + chunk]
        t = levels[lev]
        u0, u1, u2 = u[tri, 0], u[tri, 1], u[tri, 2]
        v0, v1, v2 = v[tri, 0], v[tri, 1], v[tri, 2]
        below_middle = t < u1

        # Case t < u1: the element minus the corner triangle at v0.
        # Case t >= u1: the corner triangle at v2.
        with np.errstate(divide="ignore", invalid="ignore"):
            w01 = np.where(below_middle, (t - u0) / (u1 - u0), 0.0)
            w02 = np.where(below_middle, (t - u0) / (u2 - u0), 0.0)
            w21 = np.where(below_middle, 0.0, (t - u2) / (u1 - u2))
            w20 = np.where(below_middle, 0.0, (t - u2) / (u0 - u2))
        apex = np.where(below_middle[:, None], v0, v2)
        side_a = np.where(below_middle[:, None], v0 + w01[:, None] * (v1 - v0), v2 + w21[:, None] * (v1 - v2))
        side_b = np.where(below_middle[:, None], v0 + w02[:, None] * (v2 - v0), v2 + w20[:, None] * (v0 - v2))

        corner = triangle_moments(apex, side_a, side_b, l, degree=1)
        corner0, corner1 = _oriented(corner, apex, side_a, side_b)
        corner_int = offset[tri] * corner0 + np.einsum("td,td->t", slope[tri], corner1)

        part0 = np.where(below_middle, full0[tri] - corner0, corner0)
        part1 = np.where(below_middle, full_int[tri] - corner_int, corner_int)
        measure += np.bincount(lev, weights=part0, minlength=n_levels)
        integral += np.bincount(lev, weights=part1, minlength=n_levels)

    return measure, integral
