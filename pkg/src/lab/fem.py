"""P1 finite elements for the weighted Robin problem and its first eigenpair.

Discrete weak form: (K + beta B) u = b with

    K_ij = int grad phi_i . grad phi_j dx
    B_ij = int_{boundary} phi_i phi_j |x|**(l/2) (beta(x)/beta) ds
    M_ij = int phi_i phi_j |x|**l dx,      b = M f_h,

f_h being the nodal interpolant of the source.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, NamedTuple, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg

from src.lab.errors import AssemblyError, EigenSolverError, SolverError
from src.lab.geometry import WeightedDomain
from src.lab.meshing import TriangleMesh
from src.lab.quadrature import gauss_legendre, p1_gradients, superlevel_integrals, triangle_moments
from src.settings import settings

if TYPE_CHECKING:
    from src.lab.radial import RadialField

logger = logging.getLogger(__name__)

Source = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class FemField:
    """Nodal values of a continuous piecewise-linear function on ``mesh``."""

    mesh: TriangleMesh
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.mesh.n_nodes,):
            raise ValueError(f"expected {self.mesh.n_nodes} nodal values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def min(self) -> float:
        return float(self.values.min())

    @property
    def max(self) -> float:
        return float(self.values.max())


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Smallest eigenpair of the mesh problem or of the radial problem."""

    eigenvalue: float
    field: Union[FemField, "RadialField"]
    residual: float
    iterations: int


class WeightedNorms(NamedTuple):
    l1: float
    l2: float


def _chunks(n: int):
    size = max(int(settings.LAB_CHUNK_SIZE), 1)
    for start in range(0, n, size):
        yield slice(start, min(start + size, n))


def _check_elements(mesh: TriangleMesh) -> None:
    if np.any(mesh.areas <= 0.0):
        bad = int(np.argmin(mesh.areas))
        raise AssemblyError(f"degenerate or clockwise triangle {bad} with area {mesh.areas[bad]:.3e}")


def _scatter(mesh: TriangleMesh, local: np.ndarray) -> sp.csr_matrix:
    tris = mesh.triangles
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    matrix = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes))
    return matrix.tocsr()


def assemble_stiffness(mesh: TriangleMesh) -> sp.csr_matrix:
    """Standard P1 stiffness matrix."""
    _check_elements(mesh)
    grads, area2 = p1_gradients(mesh.coords)
    local = 0.5 * area2[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)
    return _scatter(mesh, local)


def assemble_weighted_mass(mesh: TriangleMesh, l: float) -> sp.csr_matrix:
    """Mass matrix for the weight |x|**l.

    With phi_k = a_k + g_k . x on an element, the entry is a combination of
    the weighted moments of order 0, 1 and 2 of the element, integrated
    exactly in the radial direction.
    """
    _check_elements(mesh)
    coords = mesh.coords
    local = np.empty((mesh.n_triangles, 3, 3))
    for part in _chunks(mesh.n_triangles):
        c = coords[part]
        grads, _ = p1_gradients(c)
        offsets = 1.0 - np.einsum("tkd,tkd->tk", grads, c)
        moments = triangle_moments(c[:, 0], c[:, 1], c[:, 2], l, degree=2)
        g_w1 = np.einsum("tkd,td->tk", grads, moments.first)
        local[part] = (
            moments.zeroth[:, None, None] * offsets[:, :, None] * offsets[:, None, :]
            + offsets[:, :, None] * g_w1[:, None, :]
            + g_w1[:, :, None] * offsets[:, None, :]
            + np.einsum("tid,tde,tje->tij", grads, moments.second, grads)
        )
    return _scatter(mesh, local)


def assemble_boundary_mass(
    mesh: TriangleMesh,
    l: float,
    beta_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    beta: float = 1.0,
) -> sp.csr_matrix:
    """Boundary mass for the weight |x|**(l/2), optionally scaled by beta_fn(x)/beta."""
    nodes, weights = gauss_legendre(settings.LAB_EDGE_GAUSS_POINTS, settings.LAB_ELEMENT_PANELS)
    edges = mesh.boundary_edges
    p = mesh.nodes[edges[:, 0]]
    q = mesh.nodes[edges[:, 1]]
    length = np.linalg.norm(q - p, axis=1)
    x = p[:, None, :] + nodes[None, :, None] * (q - p)[:, None, :]
    rho2 = np.einsum("emd,emd->em", x, x)
    weight = rho2 ** (0.25 * l)
    if beta_fn is not None:
        weight = weight * np.asarray(beta_fn(x.reshape(-1, 2)), dtype=float).reshape(weight.shape) / beta
    w = weight * weights[None, :] * length[:, None]
    shape = np.stack([1.0 - nodes, nodes])
    local = np.einsum("em,im,jm->eij", w, shape, shape)
    rows = np.repeat(edges, 2, axis=1).ravel()
    cols = np.tile(edges, (1, 2)).ravel()
    matrix = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(mesh.n_nodes, mesh.n_nodes))
    return matrix.tocsr()


def sample_source(mesh: TriangleMesh, f: Union[Source, float]) -> np.ndarray:
    if callable(f):
        values = np.asarray(f(mesh.nodes), dtype=float)
    else:
        values = np.full(mesh.n_nodes, float(f))
    if values.shape == ():
        values = np.full(mesh.n_nodes, float(values))
    if values.shape != (mesh.n_nodes,) or not np.all(np.isfinite(values)):
        raise ValueError("source must return one finite value per node")
    return values


def assemble_load(
    mesh: TriangleMesh,
    f: Union[Source, float],
    l: float,
    mass: Optional[sp.csr_matrix] = None,
) -> np.ndarray:
    """Load vector b_i = int f_h phi_i |x|**l dx for the nodal interpolant f_h."""
    values = sample_source(mesh, f)
    if values.min(initial=0.0) < 0.0:
        logger.warning(f"Source takes negative values (min {values.min():.3e}); comparison results assume f >= 0")
    mass = assemble_weighted_mass(mesh, l) if mass is None else mass
    return mass @ values


class RobinSystem(NamedTuple):
    """Assembled operator A = K + beta B together with the weighted mass M."""

    operator: sp.csr_matrix
    mass: sp.csr_matrix


def assemble_system(mesh: TriangleMesh, domain: WeightedDomain) -> RobinSystem:
    stiffness = assemble_stiffness(mesh)
    boundary = assemble_boundary_mass(mesh, domain.l, domain.beta_fn, domain.beta)
    operator = (stiffness + domain.beta * boundary).tocsr()
    return RobinSystem(operator=operator, mass=assemble_weighted_mass(mesh, domain.l))


def _pcg(operator: sp.csr_matrix, rhs: np.ndarray, x0: Optional[np.ndarray] = None) -> Tuple[np.ndarray, int]:
    """Jacobi-preconditioned conjugate gradients to the configured relative residual."""
    n = operator.shape[0]
    if not np.any(rhs):
        return np.zeros(n), 0
    diagonal = operator.diagonal()
    if np.any(diagonal <= 0.0):
        raise SolverError("operator has a nonpositive diagonal entry")
    preconditioner = sp.diags(1.0 / diagonal)
    maxiter = max(1, settings.LAB_CG_MAXITER_FACTOR * n)
    iterations = 0

    def count(_xk: np.ndarray) -> None:
        nonlocal iterations
        iterations += 1

    solution, info = cg(
        operator,
        rhs,
        x0=x0,
        rtol=settings.LAB_CG_RTOL,
        atol=0.0,
        maxiter=maxiter,
        M=preconditioner,
        callback=count,
    )
    if info > 0:
        raise SolverError(f"conjugate gradients did not converge in {maxiter} iterations", iterations=info)
    if info < 0:
        raise SolverError("conjugate gradients received an illegal input")
    return solution, iterations


def solve_robin(
    mesh: TriangleMesh,
    domain: WeightedDomain,
    f: Union[Source, float],
    system: Optional[RobinSystem] = None,
) -> FemField:
    """Solve (K + beta B) u = b and return the nodal field u_h."""
    system = assemble_system(mesh, domain) if system is None else system
    load = assemble_load(mesh, f, domain.l, system.mass)
    values, iterations = _pcg(system.operator, load)
    logger.info(f"Robin solve on {mesh.n_nodes} nodes converged in {iterations} CG iterations")
    return FemField(mesh=mesh, values=values)


def rayleigh_quotient(system: RobinSystem, values: np.ndarray) -> float:
    """Discrete functional x^T A x / x^T M x."""
    return float(values @ (system.operator @ values)) / float(values @ (system.mass @ values))


def eigen_residual(system: RobinSystem, values: np.ndarray, eigenvalue: float) -> float:
    r = system.operator @ values - eigenvalue * (system.mass @ values)
    return float(np.linalg.norm(r) / np.linalg.norm(values))


def smallest_eigenpair(
    mesh: TriangleMesh,
    domain: WeightedDomain,
    system: Optional[RobinSystem] = None,
) -> EigenResult:
    """Smallest eigenpair of A x = lambda M x by inverse iteration.

    The iterate is M-normalized after every step and the returned
    eigenfunction is positive at its largest-magnitude node.

    Raises:
        EigenSolverError: when the residual stops improving or the
            iteration cap is reached.
    """
    system = assemble_system(mesh, domain) if system is None else system
    tol = settings.LAB_EIGEN_TOL
    x = np.ones(mesh.n_nodes)
    x /= math.sqrt(float(x @ (system.mass @ x)))
    guess = None
    best = math.inf
    since_best = 0
    residual = math.inf
    eigenvalue = rayleigh_quotient(system, x)

    for iteration in range(1, settings.LAB_EIGEN_MAXITER + 1):
        y, _ = _pcg(system.operator, system.mass @ x, x0=guess)
        y /= math.sqrt(float(y @ (system.mass @ y)))
        eigenvalue = rayleigh_quotient(system, y)
        residual = eigen_residual(system, y, eigenvalue)
        x = y
        guess = y / eigenvalue
        if residual <= tol:
            break
        if residual < best * (1.0 - 1e-3):
            best, since_best = residual, 0
        else:
            since_best += 1
            if since_best >= settings.LAB_EIGEN_STAGNATION:
                raise EigenSolverError("inverse iteration stagnated", residual=residual, iterations=iteration)
    else:
        raise EigenSolverError(
            f"inverse iteration did not converge in {settings.LAB_EIGEN_MAXITER} steps",
            residual=residual,
            iterations=settings.LAB_EIGEN_MAXITER,
        )

    if x[np.argmax(np.abs(x))] < 0.0:
        x = -x
    logger.info(f"Eigenvalue {eigenvalue:.10g} after {iteration} inverse iterations (residual {residual:.2e})")
    return EigenResult(
        eigenvalue=rayleigh_quotient(system, x),
        field=FemField(mesh=mesh, values=x),
        residual=residual,
        iterations=iteration,
    )


def weighted_norms(field: FemField, l: float, mass: Optional[sp.csr_matrix] = None) -> WeightedNorms:
    """Weighted L1 and L2 norms of the interpolant; sign changes are clipped exactly."""
    mass = assemble_weighted_mass(field.mesh, l) if mass is None else mass
    l2 = math.sqrt(max(float(field.values @ (mass @ field.values)), 0.0))
    coords = field.mesh.coords
    nodal = field.values[field.mesh.triangles]
    _, positive = superlevel_integrals(coords, nodal, np.zeros(1), l)
    _, negative = superlevel_integrals(coords, -nodal, np.zeros(1), l)
    return WeightedNorms(l1=float(positive[0] + negative[0]), l2=l2)
