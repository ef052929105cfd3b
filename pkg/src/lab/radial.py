"""Radial reduction of the symmetrized problem on the disk.

In the measure coordinate s = 2 pi r**(l+2) / (l+2) the symmetrized
solution is

    v(s) = v(S) + (1 / C_l) int_s^S F(sigma) / sigma dsigma,
    v(S) = F(S) / (2 pi beta R**((l+2)/2)),

where F(s) = int_0^s f*(sigma) dsigma, S = |Omega^sharp|_l and
C_l = 2 pi (l+2).  With f* piecewise linear, F is piecewise quadratic and
the integral of F / sigma is evaluated in closed form on every piece.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Union

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solveh_banded
from scipy.optimize import brentq
from scipy.special import j0, j1

from src.lab.errors import DomainError, EigenSolverError, SourceError
from src.lab.fem import EigenResult
from src.lab.geometry import SymmetrizedDisk
from src.lab.rearrange import DistributionCurve, RearrangementProfile, measure_of_radius, radius_of_measure
from src.settings import settings

logger = logging.getLogger(__name__)

# First zero of J0.
_J0_FIRST_ZERO = 2.404825557695773


def grading_exponent(l: float) -> float:
    return max(1.0, 2.0 / (l + 2.0))


def graded_radii(radius: float, n: int, l: float) -> np.ndarray:
    """r_i = R (i/n)**g, i = 0..n, with g = max(1, 2/(l+2))."""
    return radius * (np.arange(n + 1) / n) ** grading_exponent(l)


@dataclass(frozen=True, eq=False)
class RadialField:
    """Radial function tabulated at ascending radii of [0, R].

    ``flux`` holds Q(r) = int_0^r f^sharp(rho) rho**(l+1) drho when the field
    solves the symmetrized problem, so that v'(r) = -Q(r)/r.
    """

    radii: np.ndarray
    values: np.ndarray
    radius: float
    l: float
    beta: float
    flux: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.radii.shape != self.values.shape or self.radii.ndim != 1:
            raise ValueError("radii and values must be aligned one-dimensional arrays")
        if np.any(np.diff(self.radii) < 0.0):
            raise ValueError("radii must be ascending")
        self.radii.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def measures(self) -> np.ndarray:
        return measure_of_radius(self.radii, self.l)

    @property
    def total_measure(self) -> float:
        return float(measure_of_radius(self.radius, self.l))

    @property
    def center_value(self) -> float:
        return float(self.values[0])

    @property
    def boundary_value(self) -> float:
        return float(self.values[-1])

    def evaluate(self, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Linear interpolation in the measure coordinate."""
        r_arr = np.asarray(r, dtype=float)
        if np.any(r_arr > self.radius * (1.0 + 1e-10)):
            raise DomainError(f"radius beyond the disk of radius {self.radius:.10g}")
        out = np.interp(measure_of_radius(r_arr, self.l), self.measures, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self) -> np.ndarray:
        """v'(r) = -Q(r)/r from the stored flux; the centre uses the limit of Q(r)/r."""
        if self.flux is None:
            raise ValueError("field carries no flux")
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = -self.flux / self.radii
        if self.radii[0] == 0.0:
            if self.l > -1.0:
                slope[0] = 0.0
            else:
                slope[0] = slope[1] if self.l == -1.0 else -np.inf
        return slope

    def norm(self, p: int = 1) -> float:
        """Weighted L^p norm over the disk, int |v|**p |x|**l dx, to the power 1/p."""
        s = self.measures
        integral = simpson(np.abs(self.values) ** p, x=s)
        return float(integral) ** (1.0 / p)

    def scalars(self, eigenvalue: Optional[float] = None) -> Dict[str, Optional[float]]:
        return {
            "R": self.radius,
            "l": self.l,
            "beta": self.beta,
            "v0": self.center_value,
            "vR": self.boundary_value,
            "lambda": eigenvalue,
        }

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.radii.tolist(), self.values.tolist()))

    @classmethod
    def from_profile(cls, profile: RearrangementProfile, disk: SymmetrizedDisk) -> "RadialField":
        """Tabulate u^sharp at the radii of the profile breakpoints."""
        s = np.minimum(profile.breakpoints, disk.weighted_measure)
        radii = radius_of_measure(s, disk.l)
        if s[-1] >= disk.weighted_measure * (1.0 - 1e-10):
            radii[-1] = disk.radius
        return cls(
            radii=radii,
            values=np.array(profile.values, dtype=float),
            radius=disk.radius,
            l=disk.l,
            beta=disk.beta,
        )


def _piece_integrals(profile: RearrangementProfile, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """F(b) and int_a^b F(sigma)/sigma dsigma for intervals inside single profile pieces."""
    bp, vals = profile.breakpoints, profile.values
    cumulative = profile.cumulative
    mid = 0.5 * (a + b)
    j = np.clip(np.searchsorted(bp, mid, side="right") - 1, 0, max(bp.size - 2, 0))
    if bp.size == 1:
        zeros = np.zeros_like(a)
        return zeros, zeros
    width = bp[j + 1] - bp[j]
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(width > 0.0, (vals[j + 1] - vals[j]) / width, 0.0)
    da = a - bp[j]
    u_a = vals[j] + slope * da
    f_a = cumulative[j] + vals[j] * da + 0.5 * slope * da * da
    delta = b - a
    f_b = f_a + u_a * delta + 0.5 * slope * delta * delta

    # With F(sigma) = F(a) + u(a)(sigma - a) + slope (sigma - a)**2 / 2:
    #   int F/sigma = F(a) L + u(a) (delta - a L) + slope/2 ((b^2 - a^2)/2 - 2 a delta + a^2 L)
    # where L = log(b/a).  At a = 0 the first piece has F(0) = 0.
    positive = a > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.where(positive, np.log1p(delta / np.where(positive, a, 1.0)), 0.0)
    general = (
        f_a * log_ratio
        + u_a * (delta - a * log_ratio)
        + 0.5 * slope * (0.5 * (b * b - a * a) - 2.0 * a * delta + a * a * log_ratio)
    )
    at_zero = u_a * b + 0.25 * slope * b * b
    return f_b, np.where(positive, general, at_zero)


def solve_symmetrized(
    fsharp: RearrangementProfile,
    disk: SymmetrizedDisk,
    n_grid: Optional[int] = None,
) -> RadialField:
    """Solve the symmetrized Robin problem on the disk with source f^sharp."""
    n_grid = settings.LAB_RADIAL_GRID if n_grid is None else int(n_grid)
    if n_grid < 2:
        raise DomainError("radial grid needs at least two intervals")
    if fsharp.values.min() < 0.0:
        raise SourceError("symmetrized source must be nonnegative")
    l, total = disk.l, disk.weighted_measure
    if abs(fsharp.total_measure - total) > 1e-6 * total:
        logger.warning(f"Source profile measure {fsharp.total_measure:.12g} differs from disk measure {total:.12g}")

    radii = graded_radii(disk.radius, n_grid, l)
    grid_s = np.minimum(measure_of_radius(radii, l), total)
    grid_s[-1] = total
    inner = fsharp.breakpoints[(fsharp.breakpoints > 0.0) & (fsharp.breakpoints < total)]
    knots = np.unique(np.concatenate([grid_s, inner]))
    f_end, pieces = _piece_integrals(fsharp, knots[:-1], knots[1:])
    cumulative_f = np.concatenate([[0.0], f_end])
    tail = np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    at_grid = np.searchsorted(knots, grid_s)

    c_l = 2.0 * math.pi * (l + 2.0)
    f_total = cumulative_f[-1]
    boundary_value = f_total / (2.0 * math.pi * disk.beta * disk.radius ** (0.5 * (l + 2.0)))
    values = boundary_value + tail[at_grid] / c_l
    values = np.minimum.accumulate(values)
    flux = cumulative_f[at_grid] / (2.0 * math.pi)
    logger.info(f"Radial solve: R={disk.radius:.6g}, v(0)={values[0]:.10g}, v(R)={values[-1]:.10g}")
    return RadialField(radii=radii, values=values, radius=disk.radius, l=l, beta=disk.beta, flux=flux)


def radial_distribution(v: RadialField) -> DistributionCurve:
    """phi(t) = |{v > t}|_l for a radially nonincreasing table, inverted exactly."""
    values = v.values
    scale = max(float(np.abs(values).max(initial=0.0)), np.finfo(float).tiny)
    if np.any(np.diff(values) > 1e-12 * scale):
        raise DomainError("radial field is not radially nonincreasing")
    if values.min() < -1e-12 * scale:
        raise DomainError("radial field takes negative values")
    values = np.minimum.accumulate(np.maximum(values, 0.0))
    s = v.measures
    total = v.total_measure
    levels = np.unique(np.concatenate([[0.0], values]))
    # v is nonincreasing, so the reversed table is ascending.
    ascending = values[::-1]
    first_at_or_below = values.size - np.searchsorted(ascending, levels, side="right")
    last_at_or_above = values.size - 1 - np.searchsorted(ascending, levels, side="left")
    phi = np.where(first_at_or_below < values.size, s[np.minimum(first_at_or_below, values.size - 1)], total)
    nu = np.where(last_at_or_above >= 0, s[np.maximum(last_at_or_above, 0)], 0.0)
    phi = np.minimum.accumulate(np.clip(phi, 0.0, total))
    nu = np.minimum.accumulate(np.clip(np.maximum(nu, phi), 0.0, total))
    return DistributionCurve(levels=levels, values=phi, left_values=nu, total_measure=total)


def _tridiagonal_system(radius: float, l: float, beta: float, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Finite-volume operator of -(r v')' with Robin end, plus the lumped weight r**(l+1)."""
    r = graded_radii(radius, n, l)
    width = np.diff(r)
    conductance = 0.5 * (r[:-1] + r[1:]) / width
    diag = np.zeros(n + 1)
    diag[:-1] += conductance
    diag[1:] += conductance
    diag[-1] += beta * radius ** (0.5 * (l + 2.0))
    off = -conductance
    faces = np.concatenate([[0.0], 0.5 * (r[:-1] + r[1:]), [radius]])
    weight = (faces[1:] ** (l + 2.0) - faces[:-1] ** (l + 2.0)) / (l + 2.0)
    return r, np.vstack([np.concatenate([[0.0], off]), diag]), weight


def _radial_inverse_iteration(radius: float, l: float, beta: float, n: int) -> tuple[float, np.ndarray, np.ndarray, float, int]:
    r, banded, weight = _tridiagonal_system(radius, l, beta, n)
    diag, off = banded[1], banded[0, 1:]

    def apply(x: np.ndarray) -> np.ndarray:
        y = diag * x
        y[:-1] += off * x[1:]
        y[1:] += off * x[:-1]
        return y

    x = np.ones(n + 1)
    residual = math.inf
    eigenvalue = math.nan
    for iteration in range(1, settings.LAB_EIGEN_MAXITER + 1):
        y = solveh_banded(banded, weight * x)
        y /= math.sqrt(float(np.sum(weight * y * y)))
        ay = apply(y)
        eigenvalue = float(y @ ay)
        residual = float(np.linalg.norm(ay - eigenvalue * weight * y) / np.linalg.norm(y))
        x = y
        if residual <= settings.LAB_EIGEN_TOL:
            break
    else:
        raise EigenSolverError("radial inverse iteration did not converge", residual=residual, iterations=iteration)
    if x[np.argmax(np.abs(x))] < 0.0:
        x = -x
    return eigenvalue, r, x, residual, iteration


def radial_eigen(disk: SymmetrizedDisk, n_grid: Optional[int] = None) -> EigenResult:
    """lambda(Omega^sharp) with Richardson extrapolation over grids n and 2n."""
    n_grid = settings.LAB_EIGEN_GRID if n_grid is None else int(n_grid)
    if n_grid < 64:
        raise DomainError("radial eigen grid needs at least 64 intervals")
    coarse, *_ = _radial_inverse_iteration(disk.radius, disk.l, disk.beta, n_grid)
    fine, radii, vector, residual, iterations = _radial_inverse_iteration(disk.radius, disk.l, disk.beta, 2 * n_grid)
    extrapolated = (4.0 * fine - coarse) / 3.0
    # 2D normalization: int v**2 |x|**l dx = 1.
    vector = vector / math.sqrt(2.0 * math.pi)
    field_ = RadialField(radii=radii, values=vector, radius=disk.radius, l=disk.l, beta=disk.beta)
    logger.info(f"Radial eigenvalue {extrapolated:.10g} (grids {n_grid}/{2 * n_grid}: {coarse:.10g}, {fine:.10g})")
    return EigenResult(eigenvalue=extrapolated, field=field_, residual=residual, iterations=iterations)


def exact_disk_torsion(r: Union[float, np.ndarray], radius: float, l: float, beta: float) -> Union[float, np.ndarray]:
    """Closed-form solution for f = 1 on the disk of the given radius."""
    a = l + 2.0
    flux = radius ** a / a
    return flux / (beta * radius ** (0.5 * a)) + (radius ** a - np.asarray(r, dtype=float) ** a) / (a * a)


def exact_disk_eigenvalue(radius: float, l: float, beta: float) -> float:
    """First Robin eigenvalue of the disk: sqrt(lam) J1(z) = beta J0(z), z = 2 sqrt(lam) R**((l+2)/2) / (l+2)."""
    alpha = 0.5 * (l + 2.0)
    scale = radius ** alpha / alpha

    def secular(k: float) -> float:
        z = k * scale
        return k * j1(z) - beta * j0(z)

    k_max = _J0_FIRST_ZERO / scale
    k = brentq(secular, 1e-12 * k_max, k_max, xtol=1e-15, rtol=1e-15, maxiter=200)
    return k * k
