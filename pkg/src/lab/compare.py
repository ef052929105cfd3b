"""Verification pipelines: solve on the domain, symmetrize, solve on the disk, compare.

Every check is stated as lhs >= rhs - margin. Margins come from a mesh pair
(h, h/2): a quantity Q gets the Richardson estimate

    safety * |Q_{h/2} - Q_h| / (2**p - 1),

and a check adds the margins of both of its sides.
"""
from __future__ import annotations

import logging
import math
import threading
from typing import Callable, Dict, Iterable, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from src.lab import fem, geometry
from src.lab.errors import DomainError, LabError
from src.lab.fem import FemField, RobinSystem, Source, WeightedNorms
from src.lab.geometry import SymmetrizedDisk, WeightedDomain
from src.lab.meshing import TriangleMesh, refine, triangulate
from src.lab.radial import RadialField, grading_exponent, radial_eigen, solve_symmetrized
from src.lab.rearrange import (
    RearrangementProfile,
    element_integrals,
    HL_SLACK,
    hardy_littlewood_check,
    radius_of_measure,
    rearranged_source,
    schwarz_radial,
    symmetrize,
)
from src.lab.sources import resolve_source
from src.schemas import CHECK_KINDS, Check, ComparisonReport, ReportConstants
from src.settings import settings

logger = logging.getLogger(__name__)

LEVELS = ("coarse", "fine")
SourceSpec = Union[str, Source]


class MinComparison(NamedTuple):
    u_min: float
    v_min: float
    passed: bool
    margin: float


def richardson_margin(coarse: float, fine: float) -> float:
    order = settings.LAB_RICHARDSON_ORDER
    return settings.LAB_MARGIN_SAFETY * abs(fine - coarse) / (2 ** order - 1)


def _source_key(f: SourceSpec) -> str:
    return f if isinstance(f, str) else getattr(f, "__name__", repr(f))


def _as_source(f: SourceSpec) -> Source:
    return resolve_source(f) if isinstance(f, str) else f


class SuiteContext:
    """Shared meshes, solves and profiles for the reports of one (domain, h).

    Results are computed on first use and cached per level, so reports that
    need the same solution reuse it.
    """

    def __init__(self, domain: WeightedDomain, h: float) -> None:
        self.domain = domain
        self.h = float(h)
        self._cache: Dict[tuple, object] = {}
        self._lock = threading.RLock()

    def _cached(self, key: tuple, build: Callable[[], object]):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = build()
            return self._cache[key]

    @property
    def area(self) -> float:
        return self._cached(("area",), lambda: geometry.weighted_area(self.domain))

    @property
    def disk(self) -> SymmetrizedDisk:
        return self._cached(
            ("disk",), lambda: geometry.symmetrized_disk(self.area, self.domain.l, self.domain.beta)
        )

    def constants(self) -> ReportConstants:
        return ReportConstants(
            area_l=self.area,
            r_sharp=self.disk.radius,
            C_l=2.0 * math.pi * (self.domain.l + 2.0),
        )

    def mesh(self, level: str) -> TriangleMesh:
        if level == "coarse":
            return self._cached(("mesh", level), lambda: triangulate(self.domain, self.h))
        return self._cached(("mesh", level), lambda: refine(self.mesh("coarse")))

    def system(self, level: str) -> RobinSystem:
        return self._cached(("system", level), lambda: fem.assemble_system(self.mesh(level), self.domain))

    def solution(self, f: SourceSpec, level: str) -> FemField:
        return self._cached(
            ("solution", _source_key(f), level),
            lambda: fem.solve_robin(self.mesh(level), self.domain, _as_source(f), self.system(level)),
        )

    def norms(self, f: SourceSpec, level: str) -> WeightedNorms:
        return self._cached(
            ("norms", _source_key(f), level),
            lambda: fem.weighted_norms(self.solution(f, level), self.domain.l, self.system(level).mass),
        )

    def source_profile(self, f: SourceSpec, level: str) -> RearrangementProfile:
        return self._cached(
            ("fstar", _source_key(f), level),
            lambda: rearranged_source(_as_source(f), self.domain, mesh=self.mesh(level)),
        )

    def solution_profile(self, f: SourceSpec, level: str) -> RearrangementProfile:
        return self._cached(
            ("ustar", _source_key(f), level),
            lambda: symmetrize(self.solution(f, level), self.domain.l),
        )

    def radial(self, f: SourceSpec, level: str) -> RadialField:
        return self._cached(
            ("radial", _source_key(f), level),
            lambda: solve_symmetrized(self.source_profile(f, level), self.disk),
        )

    def eigenvalue(self, level: str) -> float:
        return self._cached(
            ("eigen", level),
            lambda: fem.smallest_eigenpair(self.mesh(level), self.domain, self.system(level)).eigenvalue,
        )

    def disk_eigenvalue(self) -> float:
        return self._cached(("disk_eigen",), lambda: radial_eigen(self.disk).eigenvalue)


def _context(domain: WeightedDomain, h: float, context: Optional[SuiteContext]) -> SuiteContext:
    if context is None:
        return SuiteContext(domain, h)
    if context.domain is not domain or context.h != h:
        raise DomainError("suite context was built for another domain or mesh size")
    return context


def _report(kind: str, ctx: SuiteContext, checks: List[Check], data: Optional[Dict[str, float]] = None) -> ComparisonReport:
    d = ctx.domain
    report = ComparisonReport(
        report=kind,
        domain=d.name,
        l=d.l,
        beta=d.beta,
        h=ctx.h,
        checks=checks,
        constants=ctx.constants(),
        data=data or {},
    )
    for check in report.checks:
        log = logger.info if check.passed else logger.warning
        log(f"{kind} {check.name}: lhs={check.lhs:.10g} rhs={check.rhs:.10g} margin={check.margin:.3g} pass={check.passed}")
    return report


def isoperimetric_report(domain: WeightedDomain, context: Optional[SuiteContext] = None) -> ComparisonReport:
    ctx = _context(domain, context.h if context else 0.0, context)
    perimeter = geometry.weighted_perimeter(domain)
    rhs = 2.0 * math.pi * (domain.l + 2.0) * ctx.area
    check = Check.of("isoperimetric", perimeter ** 2, rhs, 1e-6 * rhs)
    data = {"ratio": perimeter ** 2 / rhs, "deficit": perimeter - ctx.disk.perimeter}
    return _report("isoperimetric", ctx, [check], data)


def theorem1_report(
    domain: WeightedDomain,
    f: SourceSpec,
    h: float,
    context: Optional[SuiteContext] = None,
) -> ComparisonReport:
    """Weighted L1 and L2 norms of v on the disk against those of u_h on the domain."""
    ctx = _context(domain, h, context)
    name = _source_key(f)
    u = {level: ctx.norms(f, level) for level in LEVELS}
    v = {level: ctx.radial(f, level) for level in LEVELS}
    v1 = {level: v[level].norm(1) for level in LEVELS}
    v2 = {level: v[level].norm(2) for level in LEVELS}
    checks = [
        Check.of(
            f"L1[{name}]",
            v1["fine"],
            u["fine"].l1,
            richardson_margin(v1["coarse"], v1["fine"]) + richardson_margin(u["coarse"].l1, u["fine"].l1),
        ),
        Check.of(
            f"L2[{name}]",
            v2["fine"],
            u["fine"].l2,
            richardson_margin(v2["coarse"], v2["fine"]) + richardson_margin(u["coarse"].l2, u["fine"].l2),
        ),
    ]
    data = {
        "ratio_L1": v1["fine"] / u["fine"].l1 if u["fine"].l1 > 0.0 else 1.0,
        "ratio_L2": v2["fine"] / u["fine"].l2 if u["fine"].l2 > 0.0 else 1.0,
    }
    return _report(f"theorem1[{name}]", ctx, checks, data)


def sample_radii(radius: float, n_radii: int, l: float) -> np.ndarray:
    return radius * (np.arange(n_radii) / (n_radii - 1)) ** grading_exponent(l)


def theorem2_report(
    domain: WeightedDomain,
    h: float,
    n_radii: Optional[int] = None,
    context: Optional[SuiteContext] = None,
) -> ComparisonReport:
    """Pointwise u^sharp <= v for f = 1 at graded radii of [0, r_sharp]."""
    ctx = _context(domain, h, context)
    n_radii = settings.LAB_N_RADII if n_radii is None else int(n_radii)
    if n_radii < 2:
        raise DomainError("theorem2 needs at least two radii")
    radii = sample_radii(ctx.disk.radius, n_radii, domain.l)
    usharp, vvals = {}, {}
    for level in LEVELS:
        profile = ctx.solution_profile("one", level)
        reach = radius_of_measure(profile.total_measure, domain.l)
        usharp[level] = schwarz_radial(profile, np.minimum(radii, reach), domain.l)
        vvals[level] = ctx.radial("one", level).evaluate(radii)

    margin = richardson_margin(0.0, float(np.max(np.abs(usharp["fine"] - usharp["coarse"])))) + richardson_margin(
        0.0, float(np.max(np.abs(vvals["fine"] - vvals["coarse"])))
    )
    gap = vvals["fine"] - usharp["fine"]
    worst = int(np.argmin(gap))
    checks = [
        Check.of("pointwise", float(vvals["fine"][worst]), float(usharp["fine"][worst]), margin),
        Check.of("endpoint", float(vvals["fine"][-1]), float(usharp["fine"][-1]), margin),
    ]
    data = {
        "worst_radius": float(radii[worst]),
        "min_gap": float(gap[worst]),
        "sup_gap": float(np.max(np.abs(gap))),
        "n_radii": float(n_radii),
    }
    return _report("theorem2", ctx, checks, data)


def faber_krahn_report(
    domain: WeightedDomain,
    h: float,
    context: Optional[SuiteContext] = None,
) -> ComparisonReport:
    """lambda(Omega) from FEM against lambda(Omega^sharp) from the radial solver."""
    ctx = _context(domain, h, context)
    coarse, fine = ctx.eigenvalue("coarse"), ctx.eigenvalue("fine")
    disk_value = ctx.disk_eigenvalue()
    check = Check.of("faber_krahn", fine, disk_value, richardson_margin(coarse, fine))
    return _report("faber_krahn", ctx, [check], {"ratio": fine / disk_value, "lambda_coarse": coarse})


def min_comparison(
    domain: WeightedDomain,
    f: SourceSpec,
    h: float,
    context: Optional[SuiteContext] = None,
) -> MinComparison:
    """Minimum of u_h against v(r_sharp): -tol <= u_min <= v_min + margin."""
    ctx = _context(domain, h, context)
    u_min = {level: ctx.solution(f, level).min for level in LEVELS}
    v_min = {level: ctx.radial(f, level).boundary_value for level in LEVELS}
    tol = 1e-8 * max(ctx.solution(f, "fine").max, 0.0)
    margin = richardson_margin(u_min["coarse"], u_min["fine"]) + richardson_margin(v_min["coarse"], v_min["fine"])
    passed = -tol <= u_min["fine"] <= v_min["fine"] + margin
    return MinComparison(u_min=u_min["fine"], v_min=v_min["fine"], passed=passed, margin=margin)


def min_comparison_report(
    domain: WeightedDomain,
    f: SourceSpec,
    h: float,
    context: Optional[SuiteContext] = None,
) -> ComparisonReport:
    ctx = _context(domain, h, context)
    result = min_comparison(domain, f, h, ctx)
    tol = 1e-8 * max(ctx.solution(f, "fine").max, 0.0)
    checks = [
        Check.of("nonnegative", result.u_min, 0.0, tol),
        Check.of("min", result.v_min, result.u_min, result.margin),
    ]
    return _report(f"min_comparison[{_source_key(f)}]", ctx, checks)


def hardy_littlewood_report(
    domain: WeightedDomain,
    h: float,
    n_subsets: Optional[int] = None,
    seed: Optional[int] = None,
    context: Optional[SuiteContext] = None,
) -> ComparisonReport:
    """Hardy-Littlewood bound on seeded random element subsets of the torsion solution."""
    ctx = _context(domain, h, context)
    n_subsets = settings.LAB_HL_SUBSETS if n_subsets is None else int(n_subsets)
    seed = settings.LAB_SEED if seed is None else int(seed)
    field = ctx.solution("one", "fine")
    profile = ctx.solution_profile("one", "fine")
    elements = element_integrals(field, domain.l)
    rng = np.random.default_rng(seed)

    subsets = [np.ones(field.mesh.n_triangles, dtype=bool)]
    for _ in range(n_subsets):
        fraction = rng.uniform(0.05, 0.95)
        subsets.append(rng.random(field.mesh.n_triangles) < fraction)

    results = [hardy_littlewood_check(field, subset, domain.l, profile, elements) for subset in subsets]
    slacks = [(r.rhs - r.lhs) / r.rhs if r.rhs > 0.0 else 0.0 for r in results]
    worst = int(np.argmin(slacks))
    bound = results[worst]
    check = Check.of("hardy_littlewood", bound.rhs, bound.lhs, HL_SLACK * abs(bound.rhs))
    data = {
        "subsets": float(len(results)),
        "failures": float(sum(not r.passed for r in results)),
        "worst_slack": float(slacks[worst]),
    }
    return _report("hardy_littlewood", ctx, [check], data)


def _failed_report(kind: str, ctx: SuiteContext, exc: Exception) -> ComparisonReport:
    logger.error(f"Sub-report {kind} failed: {exc}")
    try:
        constants = ctx.constants()
    except LabError:
        constants = ReportConstants(area_l=0.0, r_sharp=0.0, C_l=2.0 * math.pi * (ctx.domain.l + 2.0))
    check = Check(name=kind, lhs=0.0, rhs=0.0, margin=0.0, passed=False, detail=f"{type(exc).__name__}: {exc}")
    d = ctx.domain
    return ComparisonReport(report=kind, domain=d.name, l=d.l, beta=d.beta, h=ctx.h, checks=[check], constants=constants)


def full_suite(
    domain: WeightedDomain,
    h: float,
    checks: Optional[Sequence[str]] = None,
    *,
    sources: Iterable[SourceSpec] = ("one", "nonradial"),
    n_radii: Optional[int] = None,
    n_subsets: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[ComparisonReport]:
    """Run the requested checks on one (domain, l, beta, h); failures are recorded, not raised."""
    kinds = list(CHECK_KINDS) if checks is None else list(checks)
    unknown = sorted(set(kinds) - set(CHECK_KINDS))
    if unknown:
        raise DomainError(f"unknown checks {unknown}")
    if not kinds:
        return []
    ctx = SuiteContext(domain, h)
    sources = list(sources)

    jobs: List[tuple[str, Callable[[], ComparisonReport]]] = []
    for kind in CHECK_KINDS:
        if kind not in kinds:
            continue
        if kind == "isoperimetric":
            jobs.append((kind, lambda: isoperimetric_report(domain, ctx)))
        elif kind == "theorem1":
            for f in sources:
                jobs.append((f"theorem1[{_source_key(f)}]", lambda f=f: theorem1_report(domain, f, h, ctx)))
        elif kind == "theorem2":
            jobs.append((kind, lambda: theorem2_report(domain, h, n_radii, ctx)))
        elif kind == "faber_krahn":
            jobs.append((kind, lambda: faber_krahn_report(domain, h, ctx)))
        elif kind == "min_comparison":
            jobs.append(("min_comparison[one]", lambda: min_comparison_report(domain, "one", h, ctx)))
        elif kind == "hardy_littlewood":
            jobs.append((kind, lambda: hardy_littlewood_report(domain, h, n_subsets, seed, ctx)))

    reports = []
    for kind, job in jobs:
        try:
            reports.append(job())
        except (LabError, ValueError, ArithmeticError) as exc:
            reports.append(_failed_report(kind, ctx, exc))
    return reports
