"""Numerical checks of the finite shrinking lemmas on concrete scenarios.

A :class:`Scenario` bundles a circularly symmetric domain metric restricted to
``|z| < radius``, a target chart, a holomorphic map and the two geodesic radii
``rho1`` (domain disk) and ``rho2`` (target disk).  Every check evaluates
margins on a polar grid and returns a value object; hypothesis violations are
data, never exceptions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import radial_metric as rm
from .errors import ConfigurationError, DomainError, ResolutionError
from .holomap import Composition, HoloMap, RotationScale, df_norm
from .radial_metric import RadialMetric
from .target_surface import ConformalSurface, jacobi_solve

PASS = "PASS"
FAIL = "FAIL"
HYPOTHESIS_VIOLATED = "HYPOTHESIS_VIOLATED"

#: Log-polar step of the five-point stencil used for Laplacians of u.
STENCIL_STEP = 2e-3
#: Parameter step for the one-sided radial quotient at the boundary.
BOUNDARY_STEP = 1e-6


@dataclass(frozen=True)
class Tolerances:
    ineq_slack: float = 1e-8
    subharmonic_slack: float = 1e-4
    integration_tol: float = 1e-10
    curvature_slack: float = 1e-4
    max_principle_slack: float = 1e-6

    @classmethod
    def for_metrics(cls, domain, target, **overrides):
        """Defaults: 1e-8 inequality slack for flat/flat pairs, 1e-6 once quadrature matters."""
        flat = domain.kind == "euclidean" and target.kind == "euclidean"
        base = {"ineq_slack": 1e-8 if flat else 1e-6}
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)


@dataclass(frozen=True)
class Grid:
    """Polar grid: ``n_radial`` rings at ``k * r_max / n_radial`` and ``n_angular`` rays.

    ``r_max = radius * n / (n + 1)`` keeps the outer ring strictly inside the disk.
    """

    n_radial: int = 64
    n_angular: int = 128

    def __post_init__(self):
        if self.n_radial < 3 or self.n_angular < 4:
            raise ValueError("grid needs at least 3 rings and 4 rays")

    def r_max(self, radius):
        return radius * self.n_radial / (self.n_radial + 1)

    def rings(self, radius):
        return self.r_max(radius) * np.arange(1, self.n_radial + 1) / self.n_radial

    def angles(self):
        return 2 * math.pi * np.arange(self.n_angular) / self.n_angular

    def points(self, radius):
        return self.rings(radius)[:, None] * np.exp(1j * self.angles())[None, :]


@dataclass(frozen=True, eq=False)
class Scenario:
    """Domain metric on ``|z| < radius``, target chart, map, radii, grid and tolerances."""

    domain: RadialMetric
    radius: float
    target: ConformalSurface
    map: HoloMap
    rho2: Optional[float] = None
    grid: Grid = field(default_factory=Grid)
    tolerances: Optional[Tolerances] = None
    mode: str = "theorem1"
    name: str = ""
    boundary_points: tuple = ()
    spot_points: tuple = ()

    def __post_init__(self):
        if not (0 < self.radius <= self.domain.domain_radius):
            raise DomainError(f"domain disk radius {self.radius} outside (0, {self.domain.domain_radius}]")
        rho1 = self.domain.geodesic_radius(self.radius)
        object.__setattr__(self, "rho1", rho1)
        if self.rho2 is None:
            object.__setattr__(self, "rho2", rho1)
        elif not self.rho2 > 0:
            raise DomainError("target disk radius must be positive")
        if self.tolerances is None:
            object.__setattr__(self, "tolerances", Tolerances.for_metrics(self.domain, self.target))

    @property
    def ratio(self):
        """``H(rho2) / H(rho1)``, or NaN when ``rho2`` is beyond the domain metric."""
        if self.rho2 > self.domain.max_geodesic_radius:
            return math.nan
        return self.domain.euclidean_radius(self.rho2) / self.radius


# -- value objects -------------------------------------------------------------


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    detail: str
    worst: Optional[float] = None
    location: Optional[complex] = None


@dataclass(frozen=True)
class HypothesisReport:
    checks: tuple

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def violations(self):
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True, eq=False)
class PointTable:
    """Grid values in (ring, angle) order; NaN marks points whose image left the chart."""

    z: np.ndarray
    rho_hat: np.ndarray
    rho_f: np.ndarray
    bound: np.ndarray
    escaped: np.ndarray

    @property
    def margin(self):
        return self.bound - self.rho_f


@dataclass(frozen=True, eq=False)
class Report:
    check: str
    verdict: str
    hypotheses: HypothesisReport
    points: PointTable
    slack: float
    extras: dict = field(default_factory=dict)

    def _valid(self):
        m = self.points.margin
        return m[np.isfinite(m)]

    @property
    def min_margin(self):
        v = self._valid()
        return float(v.min()) if v.size else math.nan

    @property
    def max_margin(self):
        v = self._valid()
        return float(v.max()) if v.size else math.nan

    @property
    def mean_margin(self):
        v = self._valid()
        return float(v.mean()) if v.size else math.nan

    @property
    def n_failed(self):
        m = self.points.margin
        return int(np.count_nonzero(~np.isfinite(m) | (m < -self.slack)))

    def summary(self):
        return {
            "min": self.min_margin,
            "max": self.max_margin,
            "mean": self.mean_margin,
            "n_points": int(self.points.z.size),
            "n_failed": self.n_failed,
            "n_escaped": int(np.count_nonzero(self.points.escaped)),
        }


@dataclass(frozen=True)
class CenterNorm:
    value: float
    bound: float
    ratio: float
    passed: bool


@dataclass(frozen=True)
class BoundaryRecord:
    point: complex
    status: str
    norm: float
    radial_quotient: float
    derivative_abs: float
    sharp_bound: Optional[float]
    detail: str = ""


@dataclass(frozen=True)
class BoundaryReport:
    records: tuple

    @property
    def passed(self):
        return all(r.status == PASS for r in self.records)


@dataclass(frozen=True, eq=False)
class SubharmonicReport:
    u: np.ndarray
    laplacian: np.ndarray
    retained: np.ndarray
    min_laplacian: float
    interior_max: float
    boundary_max: float
    slack: float
    max_principle_slack: float
    center_behaviour: str

    @property
    def laplacian_ok(self):
        return self.min_laplacian >= -self.slack

    @property
    def max_principle_ok(self):
        return self.interior_max <= self.boundary_max + self.max_principle_slack

    @property
    def passed(self):
        return self.laplacian_ok and self.max_principle_ok


# -- grid evaluation ------------------------------------------------------------


def _image_distance(s, z):
    """Distance from the target center to ``f(z)``; NaN where the image leaves the chart."""
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, np.nan)
    try:
        w = np.asarray(s.map(z), dtype=complex)
    except DomainError:
        w = np.array([_safe_eval(s.map, zz) for zz in z.ravel()]).reshape(z.shape)
    inside = np.isfinite(w) & (np.abs(w) < s.target.radius)
    if s.target.radial is not None:
        inside &= np.abs(w) <= s.target.radial.limit
    if inside.any():
        out[inside] = s.target.distance_to_center(w[inside])
    return out


def _safe_eval(f, z):
    try:
        return complex(f(z))
    except DomainError:
        return complex(np.nan, np.nan)


def _evaluate(s, bound_fn):
    z = s.grid.points(s.radius)
    rings = s.grid.rings(s.radius)
    rho_hat = np.broadcast_to(s.domain.geodesic_radius(rings)[:, None], z.shape).copy()
    rho_f = _image_distance(s, z)
    bound = bound_fn(z, rho_hat)
    return PointTable(z, rho_hat, rho_f, bound, ~np.isfinite(rho_f))


def _verdict(hyp, table, slack):
    if not hyp.passed:
        return HYPOTHESIS_VIOLATED
    m = table.margin
    if np.all(np.isfinite(m)) and m.min() >= -slack:
        return PASS
    return FAIL


# -- hypotheses -------------------------------------------------------------------


def _curvature_pairs(s):
    top = s.rho2
    if s.target.max_distance is not None:
        top = min(top, s.target.max_distance)
    top = min(top, s.domain.max_geodesic_radius)
    c = top * np.linspace(0.05, 0.95, 19)
    theta = 2 * math.pi * np.arange(8) / 8
    step = s.target.curvature_step()
    if s.target.radial is not None:
        w = s.target.point_at_distance(c[:, None], theta[None, :])
        keep = np.abs(w) + 2 * step < s.target.radius
        w, rho = w[keep], np.broadcast_to(c[:, None], w.shape)[keep]
        pairing = "exact geodesic radius"
    else:
        radii = s.target.radius * np.linspace(0.05, 0.95, 19)
        w = (radii[:, None] * np.exp(1j * theta)[None, :]).ravel()
        w = w[np.abs(w) + 2 * step < s.target.radius]
        rho = s.target.ray_distance(w)
        keep = (rho < top) & (rho > 0.01 * top)
        w, rho = w[keep], rho[keep]
        pairing = "ray upper bound on the geodesic radius (approximate pairing)"
    if w.size == 0:
        return HypothesisCheck("curvature_comparison", False, "no sample points inside the target chart")
    k = s.target.gauss_curvature(w)
    k_hat = s.domain.curvature(rho)
    gap = k - k_hat
    i = int(np.argmax(gap))
    worst = float(gap[i])
    passed = worst <= s.tolerances.curvature_slack
    detail = (
        f"K <= K_hat at matched radius on {w.size} samples ({pairing}); "
        f"max(K - K_hat) = {worst:.3e} at rho = {rho[i]:.6g} (K = {k[i]:.6g}, K_hat = {k_hat[i]:.6g})"
    )
    return HypothesisCheck("curvature_comparison", passed, detail, worst, complex(w[i]))


def check_hypotheses(s, theorem=1, table=None):
    """Check the assumptions of the finite shrinking lemma for ``s``.

    ``theorem=1`` requires ``rho2 <= rho1``; ``theorem=2`` instead requires the
    domain metric to extend to geodesic radius ``rho2`` when ``rho2 > rho1``.
    """
    checks = [HypothesisCheck("domain_circular_symmetry", True, "domain metric depends on |z| only")]
    f0 = complex(s.map(0))
    checks.append(HypothesisCheck("center_fixed", abs(f0) <= 1e-12, f"|f(0)| = {abs(f0):.3e}", abs(f0), 0j))
    order_tol = 1e-12 * max(1.0, s.rho1)
    if theorem == 1:
        checks.append(
            HypothesisCheck(
                "radius_order", s.rho2 <= s.rho1 + order_tol, f"rho2 = {s.rho2:.12g}, rho1 = {s.rho1:.12g}", s.rho2 - s.rho1
            )
        )
    else:
        top = s.domain.max_geodesic_radius
        ok = s.rho2 <= s.rho1 + order_tol or s.rho2 <= top
        checks.append(
            HypothesisCheck(
                "metric_extension",
                ok,
                f"rho2 = {s.rho2:.12g}, rho1 = {s.rho1:.12g}, domain metric reaches {top:.12g}",
                s.rho2 - top,
            )
        )
    checks.append(_curvature_pairs(s))
    if table is None:
        table = _evaluate(s, lambda z, rho_hat: rho_hat)
    checks.append(_containment(s, table))
    return HypothesisReport(tuple(checks))


def _containment(s, table):
    if table.escaped.any():
        idx = np.flatnonzero(table.escaped.ravel())[0]
        return HypothesisCheck(
            "image_in_target_disk",
            False,
            f"{int(table.escaped.sum())} grid images leave the target chart",
            math.inf,
            complex(table.z.ravel()[idx]),
        )
    i = int(np.argmax(table.rho_f))
    top = float(table.rho_f.ravel()[i])
    ok = top <= s.rho2 + s.tolerances.ineq_slack
    return HypothesisCheck(
        "image_in_target_disk",
        ok,
        f"max rho(f(z)) = {top:.12g} against rho2 = {s.rho2:.12g}",
        top - s.rho2,
        complex(table.z.ravel()[i]),
    )


# -- shrinking inequalities --------------------------------------------------------


def _spots(s, bound_fn):
    out = []
    for p in s.spot_points:
        p = complex(p)
        rho_hat = s.domain.geodesic_radius(abs(p))
        rho_f = float(_image_distance(s, np.array([p]))[0])
        bound = float(bound_fn(np.array([p]), np.array([rho_hat]))[0])
        out.append({"z": p, "rho_hat": rho_hat, "rho_f": rho_f, "bound": bound, "margin": bound - rho_f})
    return out


def verify_shrinking(s):
    """Check ``rho(f(z)) <= rho_hat(z)`` on the grid (distance shrinking from the center)."""
    bound_fn = lambda z, rho_hat: rho_hat  # noqa: E731
    table = _evaluate(s, bound_fn)
    hyp = check_hypotheses(s, 1, table)
    slack = s.tolerances.ineq_slack
    return Report("shrinking", _verdict(hyp, table, slack), hyp, table, slack, {"spots": _spots(s, bound_fn)})


def verify_general_bound(s):
    """Check ``rho(f(z)) <= h(H(rho2) / H(rho1) |z|)``, the bound for unequal radii."""
    k = s.ratio

    def bound_fn(z, rho_hat):
        if not math.isfinite(k):
            return np.full(np.shape(z), np.nan)
        return s.domain.geodesic_radius(np.minimum(k * np.abs(z), s.domain.domain_radius))

    table = _evaluate(s, bound_fn)
    hyp = check_hypotheses(s, 2, table)
    slack = s.tolerances.ineq_slack
    extras = {"ratio": k, "spots": _spots(s, bound_fn)}
    return Report("general_bound", _verdict(hyp, table, slack), hyp, table, slack, extras)


def _is_plain_euclidean(m):
    return m.kind == "euclidean" and m.params.get("scale", 1.0) == 1.0


def verify_classical(s, scales=(10, 100, 1000)):
    """Classical Schwarz bound ``|f(z)| <= (R2/R1) |z|`` by direct arithmetic.

    ``rho2`` plays the role of ``R2``.  The Liouville rows rescale the domain,
    ``f_k(z) = f(z / k)`` on ``|z| < k R1``, and record how the sup of ``|f_k|``
    on the fixed disk ``|z| <= R1 / 2`` is squeezed by the bound.
    """
    r1, r2 = s.radius, s.rho2
    z = s.grid.points(r1)
    with np.errstate(invalid="ignore"):
        w = np.asarray(s.map(z), dtype=complex)
    absw = np.abs(w)
    escaped = ~np.isfinite(absw)
    table = PointTable(z, np.abs(z), absw, (r2 / r1) * np.abs(z), escaped)

    target = s.target
    metrics_ok = _is_plain_euclidean(s.domain) and target.kind == "euclidean" and target.params.get("scale", 1.0) == 1.0
    f0 = complex(s.map(0))
    top = float(np.nanmax(absw))
    hyp = HypothesisReport(
        (
            HypothesisCheck("euclidean_metrics", metrics_ok, f"domain {s.domain.kind}, target {target.kind}"),
            HypothesisCheck("center_fixed", abs(f0) <= 1e-12, f"|f(0)| = {abs(f0):.3e}", abs(f0), 0j),
            HypothesisCheck(
                "image_in_target_disk",
                top <= r2 + s.tolerances.ineq_slack,
                f"max |f(z)| = {top:.12g} against R2 = {r2:.12g}",
                top - r2,
            ),
        )
    )
    fixed = 0.5 * r1
    sub = s.grid.rings(fixed)[:, None] * np.exp(1j * s.grid.angles())[None, :]
    rows = []
    for k in scales:
        sup = float(np.max(np.abs(s.map(sub / k))))
        bound = r2 * fixed / (k * r1)
        rows.append({"scale": k, "domain_radius": k * r1, "sup_on_fixed_disk": sup, "bound": bound, "ok": sup <= bound + s.tolerances.ineq_slack})
    slack = s.tolerances.ineq_slack
    verdict = _verdict(hyp, table, slack)
    if verdict == PASS and not all(r["ok"] for r in rows):
        verdict = FAIL
    return Report("classical", verdict, hyp, table, slack, {"liouville": rows, "fixed_radius": fixed})


# -- corollaries ---------------------------------------------------------------------


def check_center_norm(s):
    """``||df_0||`` against 1 (or against ``H(rho2)/H(rho1)`` when ``rho2 > rho1``)."""
    value = df_norm(s.map, s.domain, s.target, 0j)
    k = s.ratio
    bound = 1.0 if s.rho2 <= s.rho1 else k
    return CenterNorm(value, bound, k, bool(value <= bound + s.tolerances.ineq_slack))


def check_boundary_stretch(s, points=None):
    """Boundary expansion at points of ``|z| = R1`` that map to the target boundary.

    Each record holds ``||df_b||``, the one-sided quotient of ``rho(f(tb))``
    against ``rho_hat(tb)`` as ``t -> 1``, and, for the flat unit disk, the
    sharp bound ``1 + (1 - |f'(0)|) / (1 + |f'(0)|)``.
    """
    points = s.boundary_points if points is None else points
    slack = s.tolerances.ineq_slack
    quotient_slack = max(slack, 10 * BOUNDARY_STEP)
    flat_unit = (
        _is_plain_euclidean(s.domain)
        and s.target.kind == "euclidean"
        and s.target.params.get("scale", 1.0) == 1.0
        and abs(s.radius - 1) <= 1e-12
        and abs(s.rho2 - 1) <= 1e-12
    )
    d0 = abs(complex(s.map.deriv(0)))
    sharp = 1 + (1 - d0) / (1 + d0) if flat_unit else None
    records = []
    for b in points:
        b = complex(b)
        reasons = []
        if abs(abs(b) - s.radius) > 1e-9 * s.radius:
            reasons.append(f"|b| = {abs(b):.12g} is not the domain radius {s.radius:.12g}")
        if abs(s.rho2 - s.rho1) > 1e-9 * max(1.0, s.rho1):
            reasons.append("target and domain radii differ")
        rho_fb = float(_image_distance(s, np.array([b]))[0])
        if not abs(rho_fb - s.rho2) <= 1e-9 * max(1.0, s.rho2):
            reasons.append(f"rho(f(b)) = {rho_fb:.12g} is not on the target boundary {s.rho2:.12g}")
        try:
            norm = df_norm(s.map, s.domain, s.target, b)
        except DomainError:
            norm = math.nan
        t = 1 - BOUNDARY_STEP
        rho_ftb = float(_image_distance(s, np.array([t * b]))[0])
        quotient = (rho_fb - rho_ftb) / (s.domain.geodesic_radius(abs(b)) - s.domain.geodesic_radius(t * abs(b)))
        dabs = abs(complex(s.map.deriv(b)))
        if reasons:
            status = "PRECONDITION_FAILED"
        else:
            ok = norm >= 1 - slack and quotient >= 1 - quotient_slack
            if sharp is not None:
                ok = ok and dabs >= sharp - slack
            status = PASS if ok else FAIL
        records.append(BoundaryRecord(b, status, norm, quotient, dabs, sharp, "; ".join(reasons)))
    return BoundaryReport(tuple(records))


# -- subharmonicity ------------------------------------------------------------------


def _u_parts(s, z):
    """``u = log(H(rho(f(z))) / |z|)`` and its smooth part ``v = log(H(rho(f(z))) / |f(z)|)``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = _image_distance(s, z)
        ok = np.isfinite(rho) & (rho <= s.domain.max_geodesic_radius)
        big_h = np.full(z.shape, np.nan)
        if ok.any():
            big_h[ok] = s.domain.euclidean_radius(rho[ok])
        absw = np.abs(np.asarray(s.map(z)))
        return np.log(big_h / np.abs(z)), np.log(big_h / absw), rho


def check_subharmonicity(s):
    """Discrete Laplacian and maximum principle for ``u = log(H(rho(f(z))) / |z|)``.

    ``u`` differs from ``v = log(H(rho(f(z))) / |f(z)|)`` by ``log|f(z) / z|``,
    which is harmonic away from the zeros of ``f``; ``v`` stays smooth across
    those zeros, so the Laplacian of ``u`` is taken as the five-point
    Laplacian of ``v``.  The stencil lives in log-polar coordinates
    ``(log r, theta)`` with step ``STENCIL_STEP`` around every grid point.
    Points within ``1e-3 * r_max`` of a zero of ``f`` (Newton estimate
    ``|f / f'|``) are dropped.
    """
    z = s.grid.points(s.radius)
    r = np.abs(z)
    eta = STENCIL_STEP
    shifts = np.exp(np.array([0.0, eta, -eta, 1j * eta, -1j * eta]))
    u_all, v_all, rho_all = _u_parts(s, z[None, :, :] * shifts[:, None, None])
    u0 = u_all[0]
    lap = (v_all[1:].sum(axis=0) - 4 * v_all[0]) / (eta * eta * r * r)

    delta = 1e-3 * s.grid.r_max(s.radius)
    with np.errstate(divide="ignore", invalid="ignore"):
        newton = np.abs(np.asarray(s.map(z)) / np.asarray(s.map.deriv(z)))
    retained = np.isfinite(u0) & np.all(np.isfinite(v_all), axis=0) & (rho_all[0] > 0) & ~(newton <= delta)
    if not retained.any():
        raise ConfigurationError("every grid point was excluded from the subharmonicity check")
    lap = np.where(retained, lap, np.nan)
    u_out = np.where(retained, u0, np.nan)

    interior = u_out[:-1]
    boundary = u_out[-1]
    interior_max = float(np.nanmax(interior)) if np.isfinite(interior).any() else -math.inf
    boundary_max = float(np.nanmax(boundary)) if np.isfinite(boundary).any() else -math.inf
    d0 = abs(complex(s.map.deriv(0)))
    behaviour = "bounded" if d0 > 0 else "tends to -inf"
    return SubharmonicReport(
        u_out,
        lap,
        retained,
        float(np.nanmin(lap)),
        interior_max,
        boundary_max,
        s.tolerances.subharmonic_slack,
        s.tolerances.max_principle_slack,
        behaviour,
    )


# -- Laplacian comparison -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LaplacianComparison:
    rho: np.ndarray
    margin: np.ndarray
    hypothesis_holds: bool
    worst_violation: float
    tolerance: float

    @property
    def min_margin(self):
        return float(np.min(self.margin))

    @property
    def verdict(self):
        if not self.hypothesis_holds:
            return HYPOTHESIS_VIOLATED
        return PASS if self.min_margin >= -self.tolerance else FAIL


def check_laplacian_comparison(domain, target_profile, rho_max, n=200, tolerance=1e-6, curvature_slack=1e-4):
    """Margins ``(G'/G)(c) - (Ghat'/Ghat)(c)`` between a target curvature profile and a domain metric.

    ``G`` comes from the Jacobi equation for ``target_profile``; ``Ghat`` from
    the domain metric's circle factor.
    """
    prof = jacobi_solve(target_profile, rho_max)
    edge = domain.max_geodesic_radius
    top = min(rho_max, prof.rho_max, edge - 2 * float(rm.difference_step(edge)))
    c = top * np.arange(1, n + 1) / n
    margin = prof.log_derivative(c) - domain.log_derivative(c)
    k = target_profile(c) if callable(target_profile) else np.full(c.shape, float(target_profile))
    gap = np.asarray(k, dtype=float) - domain.curvature(c)
    worst = float(np.max(gap))
    return LaplacianComparison(c, margin, worst <= curvature_slack, max(worst, 0.0), tolerance)


# -- Ahlfors limit ---------------------------------------------------------------------


@dataclass(frozen=True)
class AhlforsStage:
    r0: float
    rho0: float
    r1: float
    rho1: float
    zeta2: complex
    bound: float
    image: float
    margin: float
    gap: float
    allowed_gap: float
    verdict: str
    min_margin: float


@dataclass(frozen=True)
class AhlforsResult:
    z2: complex
    rho_hat: float
    image: float
    stages: tuple

    @property
    def bounds(self):
        return [st.bound for st in self.stages]

    @property
    def monotone(self):
        b = self.bounds
        return all(b[i + 1] <= b[i] + 1e-6 for i in range(len(b) - 1))

    @property
    def converged(self):
        return all(st.gap <= st.allowed_gap for st in self.stages)

    @property
    def verdict(self):
        ok = self.monotone and self.converged and all(st.verdict == PASS and st.margin >= 0 for st in self.stages)
        return PASS if ok else FAIL


def ahlfors_limit(
    f,
    z2,
    r0_sequence=(0.9, 0.99, 0.999),
    target=None,
    grid=Grid(16, 32),
    tolerances=None,
    circle_points=512,
    safety=1.01,
    max_refinements=60,
):
    """Recover the complete-disk shrinking bound at ``z2`` from finite disks.

    For each ``r0`` the map ``f(r0 zeta)`` is treated on ``|zeta| < r1 / r0``
    with the hyperbolic metric of ``|zeta| < 1``; ``r1`` is the first point of
    the refinement ``r0 - (r0 - |z2|) 2**-k`` whose hyperbolic radius covers
    ``rho0 = safety * max rho(f)`` on ``|z| = r0``.  The finite lemma bounds
    ``rho(f(z2))`` by the hyperbolic radius of ``z2 / r0``, which decreases to
    the hyperbolic radius of ``z2`` as ``r0 -> 1``.
    """
    target = ConformalSurface.poincare() if target is None else target
    disk = rm.poincare()
    z2 = complex(z2)
    r0_sequence = tuple(float(r) for r in r0_sequence)
    if not all(abs(z2) < r < 1 for r in r0_sequence):
        raise DomainError("need |z2| < r0 < 1 for every r0")
    rho_hat = disk.geodesic_radius(abs(z2))
    image = float(target.distance_to_center(f(z2)))
    theta = 2 * math.pi * np.arange(circle_points) / circle_points
    stages = []
    for r0 in r0_sequence:
        circle = r0 * np.exp(1j * theta)
        rho0 = safety * float(np.max(target.distance_to_center(f(circle))))
        chosen = None
        for k in range(1, max_refinements + 1):
            r1 = r0 - (r0 - abs(z2)) * 2.0**-k
            t = r1 / r0
            if t > rm.POINCARE_EDGE:
                break
            if disk.geodesic_radius(t) >= rho0:
                chosen = (r1, t)
                break
        if chosen is None:
            raise ResolutionError(f"no admissible r1 for r0 = {r0} at the available resolution")
        r1, t = chosen
        scenario = Scenario(
            disk,
            t,
            target,
            Composition((RotationScale(complex(r0)), f)),
            rho2=rho0,
            grid=grid,
            tolerances=tolerances,
            mode="theorem1",
        )
        rep = verify_shrinking(scenario)
        zeta2 = z2 / r0
        bound = disk.geodesic_radius(abs(zeta2))
        allowed = 2 / (1 - abs(zeta2) ** 2) * (abs(zeta2) - abs(z2)) + 1e-9
        stages.append(
            AhlforsStage(
                r0, rho0, r1, scenario.rho1, zeta2, bound, image, bound - image, bound - rho_hat, allowed, rep.verdict, rep.min_margin
            )
        )
    return AhlforsResult(z2, rho_hat, image, tuple(stages))
