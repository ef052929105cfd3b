"""Distribution functions, decreasing rearrangements and weighted Schwarz symmetrization."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.optimize import brentq

from src.lab.errors import DomainError, SourceError
from src.lab.fem import FemField, Source, sample_source
from src.lab.geometry import WeightedDomain
from src.lab.meshing import TriangleMesh, triangulate
from src.lab.quadrature import linear_coefficients, superlevel_integrals, triangle_moments
from src.settings import settings

logger = logging.getLogger(__name__)

# Relative slack when a point is tested against the boundary of the symmetrized disk.
_RADIUS_SLACK = 1e-10

# Relative rounding slack of the Hardy-Littlewood bound.
HL_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class DistributionCurve:
    """mu(t) = |{|u| > t}|_l and nu(t) = |{|u| >= t}|_l tabulated at ascending levels."""

    levels: np.ndarray
    values: np.ndarray
    left_values: np.ndarray
    total_measure: float

    def __post_init__(self) -> None:
        if self.levels.ndim != 1 or self.levels.size < 1:
            raise ValueError("distribution needs at least one level")
        if np.any(np.diff(self.levels) <= 0.0):
            raise ValueError("levels must be strictly ascending")
        if np.any(np.diff(self.values) > 0.0) or np.any(np.diff(self.left_values) > 0.0):
            raise ValueError("distribution values must be nonincreasing")
        for name in ("levels", "values", "left_values"):
            getattr(self, name).setflags(write=False)

    @property
    def max_level(self) -> float:
        return float(self.levels[-1])

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.levels.tolist(), self.values.tolist()))


@dataclass(frozen=True, eq=False)
class RearrangementProfile:
    """Nonincreasing piecewise-linear u* on [0, total_measure].

    Equal consecutive breakpoints encode a jump. At a jump abscissa the
    upper value is returned, which is what inf{t >= 0 : mu(t) < s} gives.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    total_measure: float

    def __post_init__(self) -> None:
        if self.breakpoints.shape != self.values.shape or self.breakpoints.size < 1:
            raise ValueError("breakpoints and values must be nonempty and aligned")
        if np.any(np.diff(self.breakpoints) < 0.0) or np.any(np.diff(self.values) > 0.0):
            raise ValueError("profile must have ascending breakpoints and nonincreasing values")
        self.breakpoints.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def cumulative(self) -> np.ndarray:
        """int_0^{s_j} u*(s) ds at every breakpoint."""
        widths = np.diff(self.breakpoints)
        pieces = 0.5 * widths * (self.values[:-1] + self.values[1:])
        return np.concatenate([[0.0], np.cumsum(pieces)])

    def evaluate(self, s: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        s_arr = np.clip(np.asarray(s, dtype=float), 0.0, self.breakpoints[-1])
        bp, vals = self.breakpoints, self.values
        j = np.clip(np.searchsorted(bp, s_arr, side="left"), 0, bp.size - 1)
        prev = np.maximum(j - 1, 0)
        width = bp[j] - bp[prev]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(width > 0.0, (s_arr - bp[prev]) / width, 1.0)
        out = np.where(bp[j] == s_arr, vals[j], vals[prev] + w * (vals[j] - vals[prev]))
        return float(out) if np.ndim(out) == 0 else out

    def integral(self, a: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """int_0^a u*(s) ds."""
        bp, vals = self.breakpoints, self.values
        a_arr = np.clip(np.asarray(a, dtype=float), 0.0, bp[-1])
        cumulative = self.cumulative
        if bp.size == 1:
            out = np.zeros_like(a_arr)
            return float(out) if np.ndim(out) == 0 else out
        j = np.clip(np.searchsorted(bp, a_arr, side="right") - 1, 0, bp.size - 2)
        width = bp[j + 1] - bp[j]
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(width > 0.0, (a_arr - bp[j]) / width, 0.0)
        end_value = vals[j] + w * (vals[j + 1] - vals[j])
        out = cumulative[j] + 0.5 * (a_arr - bp[j]) * (vals[j] + end_value)
        return float(out) if np.ndim(out) == 0 else out

    def norm(self, p: int = 1) -> float:
        """L^p norm on (0, total_measure) for p in {1, 2}."""
        widths = np.diff(self.breakpoints)
        a, b = np.abs(self.values[:-1]), np.abs(self.values[1:])
        if p == 1:
            return float(np.sum(0.5 * widths * (a + b)))
        if p == 2:
            return math.sqrt(float(np.sum(widths * (a * a + a * b + b * b) / 3.0)))
        raise ValueError(f"unsupported norm exponent {p}")

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.breakpoints.tolist(), self.values.tolist()))


class HardyLittlewoodResult(NamedTuple):
    lhs: float
    rhs: float
    passed: bool
    measure: float


def element_integrals(field: FemField, l: float) -> tuple[np.ndarray, np.ndarray]:
    """Weighted measure and weighted integral of the field on every element."""
    coords = field.mesh.coords
    moments = triangle_moments(coords[:, 0], coords[:, 1], coords[:, 2], l, degree=1)
    offset, slope = linear_coefficients(coords, field.values[field.mesh.triangles])
    integral = offset * moments.zeroth + np.einsum("td,td->t", slope, moments.first)
    return moments.zeroth, integral


def _distribution_levels(magnitudes: np.ndarray, plateaus: np.ndarray, n_levels: int) -> np.ndarray:
    top = float(magnitudes.max(initial=0.0))
    quantiles = np.quantile(magnitudes, np.linspace(0.0, 1.0, n_levels))
    uniform = np.linspace(0.0, top, n_levels)
    return np.unique(np.concatenate([[0.0], quantiles, uniform, plateaus]))


def distribution_function(field: FemField, l: float, n_levels: Optional[int] = None) -> DistributionCurve:
    """Distribution of |u_h| with respect to |x|**l dx by exact clipping per element."""
    n_levels = settings.LAB_N_LEVELS if n_levels is None else int(n_levels)
    if n_levels < 2:
        raise ValueError("n_levels must be at least 2")
    mesh = field.mesh
    coords = mesh.coords
    nodal = field.values[mesh.triangles]
    magnitude = np.abs(nodal)

    measures = triangle_moments(coords[:, 0], coords[:, 1], coords[:, 2], l).zeroth
    total = float(measures.sum())
    flat = nodal.max(axis=1) == nodal.min(axis=1)
    plateaus = np.unique(magnitude[flat, 0])
    levels = _distribution_levels(np.abs(field.values), plateaus, n_levels)

    mu = np.minimum.accumulate(np.clip(magnitude_superlevel(field, levels, l)[0], 0.0, total))

    atoms = np.bincount(
        np.searchsorted(levels, magnitude[flat, 0]),
        weights=measures[flat],
        minlength=levels.size,
    )
    nu = np.maximum(mu + atoms, mu)
    nu = np.minimum(nu, np.concatenate([[total], mu[:-1]]))
    if levels[0] == 0.0:
        nu[0] = total
    nu = np.minimum.accumulate(np.clip(nu, 0.0, total))
    return DistributionCurve(levels=levels, values=mu, left_values=nu, total_measure=total)


def decreasing_rearrangement(curve: DistributionCurve) -> RearrangementProfile:
    """Generalized inverse of mu as a piecewise-linear table on [0, |Omega|_l]."""
    order = np.arange(curve.levels.size - 1, -1, -1)
    s = np.column_stack([curve.values[order], curve.left_values[order]]).ravel()
    u = np.repeat(curve.levels[order], 2)
    s = np.maximum.accumulate(np.clip(s, 0.0, curve.total_measure))
    if s[0] > 0.0:
        s = np.concatenate([[0.0], s])
        u = np.concatenate([[u[0]], u])
    keep = np.ones(s.size, dtype=bool)
    keep[1:] = (np.diff(s) != 0.0) | (np.diff(u) != 0.0)
    return RearrangementProfile(
        breakpoints=s[keep].copy(),
        values=u[keep].copy(),
        total_measure=curve.total_measure,
    )


def symmetrize(field: FemField, l: float, n_levels: Optional[int] = None) -> RearrangementProfile:
    return decreasing_rearrangement(distribution_function(field, l, n_levels))


def measure_of_radius(r: Union[float, np.ndarray], l: float) -> Union[float, np.ndarray]:
    return 2.0 * math.pi * np.asarray(r, dtype=float) ** (l + 2.0) / (l + 2.0)


def radius_of_measure(s: Union[float, np.ndarray], l: float) -> Union[float, np.ndarray]:
    return ((l + 2.0) * np.asarray(s, dtype=float) / (2.0 * math.pi)) ** (1.0 / (l + 2.0))


def schwarz_radial(profile: RearrangementProfile, r: Union[float, np.ndarray], l: float) -> Union[float, np.ndarray]:
    """u^sharp at radii r; radii beyond the symmetrized disk raise DomainError."""
    s = measure_of_radius(np.abs(r), l)
    if np.any(s > profile.total_measure * (1.0 + _RADIUS_SLACK)):
        radius = radius_of_measure(profile.total_measure, l)
        raise DomainError(f"point outside the symmetrized disk of radius {radius:.10g}")
    return profile.evaluate(np.minimum(s, profile.total_measure))


def schwarz_value(profile: RearrangementProfile, x: Sequence[float], l: float) -> Union[float, np.ndarray]:
    """u^sharp(x) = u*(2 pi |x|**(l+2) / (l+2)) for a point or an (n, 2) array."""
    points = np.asarray(x, dtype=float)
    return schwarz_radial(profile, np.linalg.norm(points, axis=-1), l)


def rearranged_source(
    f: Union[Source, float],
    domain: WeightedDomain,
    l: Optional[float] = None,
    n_levels: Optional[int] = None,
    mesh: Optional[TriangleMesh] = None,
) -> RearrangementProfile:
    """Decreasing rearrangement f* of a nonnegative source sampled on a mesh of the domain."""
    l = domain.l if l is None else l
    mesh = triangulate(domain, settings.LAB_SOURCE_H) if mesh is None else mesh
    values = sample_source(mesh, f)
    if values.min() < 0.0:
        raise SourceError(f"source is negative somewhere on the domain (min {values.min():.3e})")
    return symmetrize(FemField(mesh=mesh, values=values), l, n_levels)


def magnitude_superlevel(field: FemField, levels: np.ndarray, l: float) -> tuple[np.ndarray, np.ndarray]:
    """Weighted measure of {|u_h| > t} and int_{|u_h| > t} |u_h| |x|**l dx for each level t."""
    coords = field.mesh.coords
    nodal = field.values[field.mesh.triangles]
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    above, above_int = superlevel_integrals(coords, nodal, levels, l)
    below, below_int = superlevel_integrals(coords, -nodal, levels, l)
    return above + below, above_int + below_int


def rearrangement_integral(field: FemField, profile: RearrangementProfile, a: float, l: float) -> float:
    """int_0^a u*(s) ds computed on the mesh rather than on the tabulated profile.

    The level t with mu(t) = a is bracketed by the profile breakpoints and
    located by root finding on the exact clipped measure; then
    int_0^a u* = int_{|u| > t} |u| |x|**l dx + t (a - mu(t)).
    """
    bp, vals = profile.breakpoints, profile.values
    a = min(max(float(a), 0.0), float(bp[-1]))
    if bp.size == 1:
        t = float(vals[0])
    else:
        j = int(np.clip(np.searchsorted(bp, a, side="right") - 1, 0, bp.size - 2))
        t_lo, t_hi = float(vals[j + 1]), float(vals[j])

        def excess(t: float) -> float:
            return float(magnitude_superlevel(field, np.array([t]), l)[0][0]) - a

        if t_lo == t_hi or excess(t_lo) <= 0.0:
            t = t_lo
        elif excess(t_hi) >= 0.0:
            t = t_hi
        else:
            t = brentq(excess, t_lo, t_hi, xtol=1e-15 * max(1.0, t_hi))
    measure, integral = magnitude_superlevel(field, np.array([t]), l)
    return float(integral[0]) + t * (a - float(measure[0]))


def hardy_littlewood_check(
    field: FemField,
    subset: np.ndarray,
    l: float,
    profile: Optional[RearrangementProfile] = None,
    elements: Optional[tuple[np.ndarray, np.ndarray]] = None,
) -> HardyLittlewoodResult:
    """Compare int_E u |x|**l dx with int_0^{|E|_l} u*(s) ds for a set E of elements."""
    profile = symmetrize(field, l) if profile is None else profile
    measures, integrals = element_integrals(field, l) if elements is None else elements
    subset = np.asarray(subset)
    if subset.dtype == bool:
        subset = np.flatnonzero(subset)
    measure = float(measures[subset].sum())
    lhs = float(integrals[subset].sum())
    rhs = rearrangement_integral(field, profile, measure, l)
    passed = lhs <= rhs + HL_SLACK * abs(rhs)
    if not passed:
        logger.warning(f"Hardy-Littlewood bound violated: {lhs:.12g} > {rhs:.12g}")
    return HardyLittlewoodResult(lhs=lhs, rhs=rhs, passed=passed, measure=measure)
