"""Image-side surfaces: conformal charts, distance to the center, and Jacobi fields.

The image of a map lives in a geodesic disk around ``w = 0`` on a surface with
metric ``mu(w)**2 |dw|**2``.  For radially symmetric factors the distance to
the center is exact; otherwise the straight-ray integral is used, which can
only overestimate the true distance.

Curvature profiles ``K(rho)`` are turned into circle factors ``G(rho)`` by
integrating the Jacobi equation ``G'' = -K G`` with ``G(0) = 0, G'(0) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import radial_metric as rm
from .errors import DomainError, NumericalError
from .radial_metric import RadialMetric

__all__ = [
    "ConformalSurface",
    "PolarProfile",
    "ComparisonResult",
    "jacobi_solve",
    "comparison_check",
    "constant_profile",
]

_RAY_NODES, _RAY_WEIGHTS = np.polynomial.legendre.leggauss(24)
_RAY_PANELS = 8


@dataclass(frozen=True, eq=False)
class ConformalSurface:
    """A chart ``|w| < radius`` carrying the metric ``factor(w)**2 |dw|**2``.

    ``radial`` holds the same factor as a function of ``|w|`` when the metric
    is rotationally symmetric; it is ``None`` otherwise.
    """

    factor: Callable[[np.ndarray], np.ndarray]
    radius: float
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    radial: Optional[RadialMetric] = None

    @property
    def radially_symmetric(self):
        return self.radial is not None

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_radial(cls, metric: RadialMetric, kind=None, params=None):
        return cls(
            lambda w: metric.lam(np.abs(w)),
            metric.domain_radius,
            kind or metric.kind,
            dict(metric.params if params is None else params),
            metric,
        )

    @classmethod
    def poincare(cls, radius=1.0):
        return cls.from_radial(rm.poincare(radius))

    @classmethod
    def euclidean(cls, radius=rm.ENTIRE_PLANE_RADIUS, scale=1.0):
        return cls.from_radial(rm.euclidean(scale, radius))

    @classmethod
    def spherical(cls, radius=10.0):
        return cls.from_radial(rm.spherical(radius))

    @classmethod
    def curvature_scaled(cls, a, radius=1.0):
        """Hyperbolic disk rescaled to constant curvature ``-a**2``."""
        if not a > 0:
            raise DomainError("curvature scale must be positive")
        if radius > 1:
            raise DomainError("the hyperbolic factor is only defined on the unit disk")
        metric = RadialMetric(
            lambda r: 2.0 / (a * (1.0 - r * r)), radius, "curvature_scaled", {"a": float(a)}, singular_edge=radius == 1
        )
        return cls.from_radial(metric)

    @classmethod
    def custom_radial(cls, r, lam):
        return cls.from_radial(rm.from_table(r, lam, kind="custom_radial"))

    # -- operations -------------------------------------------------------

    def _check_w(self, w, margin=0.0):
        w = np.asarray(w, dtype=complex)
        if np.any(~np.isfinite(w)) or np.any(np.abs(w) + margin >= self.radius):
            raise DomainError(f"point outside the chart |w| < {self.radius}")
        return w

    def factor_at(self, w):
        return self.factor(self._check_w(w))

    def curvature_step(self):
        return 1e-4 * self.radius

    def gauss_curvature(self, w):
        """Curvature ``-mu**-2 * Laplacian(log mu)`` from a five-point stencil."""
        step = self.curvature_step()
        w = self._check_w(w, margin=step)
        log_mu = lambda p: np.log(self.factor(p))  # noqa: E731
        center = log_mu(w)
        lap = (log_mu(w + step) + log_mu(w - step) + log_mu(w + 1j * step) + log_mu(w - 1j * step) - 4 * center) / (
            step * step
        )
        k = -lap / np.exp(2 * center)
        return float(k) if np.ndim(w) == 0 else k

    def ray_distance(self, w):
        """Length of the straight segment from 0 to ``w``; an upper bound on the distance."""
        w = self._check_w(w)
        edges = np.linspace(0.0, 1.0, _RAY_PANELS + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        t = (mid[:, None] + 0.5 * (edges[1] - edges[0]) * _RAY_NODES).ravel()
        weights = np.tile(_RAY_WEIGHTS, _RAY_PANELS) * 0.5 * (edges[1] - edges[0])
        vals = self.factor(np.asarray(w)[..., None] * t) @ weights
        out = np.abs(w) * vals
        return float(out) if np.ndim(w) == 0 else out

    def distance_to_center(self, w):
        """Distance from the center ``w = 0`` to ``w``.

        Exact for radially symmetric charts; the ray integral otherwise.
        """
        w = self._check_w(w)
        if self.radial is not None:
            return self.radial.geodesic_radius(np.abs(w))
        return self.ray_distance(w)

    @property
    def max_distance(self):
        """Distance from the center to the chart edge (``None`` for non-symmetric charts)."""
        return self.radial.max_geodesic_radius if self.radial is not None else None

    def point_at_distance(self, rho, theta=0.0):
        """Chart point at distance ``rho`` along the ray of angle ``theta`` (symmetric charts)."""
        if self.radial is None:
            raise DomainError("point_at_distance needs a radially symmetric chart")
        return self.radial.euclidean_radius(rho) * np.exp(1j * np.asarray(theta))

    def describe(self):
        out = {"kind": self.kind, "radius": self.radius}
        out.update(self.params)
        return out


# -- Jacobi fields -----------------------------------------------------------


def constant_profile(k):
    """Curvature profile with the constant value ``k``."""
    return lambda rho: np.full(np.shape(rho), float(k))


def _as_profile(K):
    if callable(K):
        return K
    return constant_profile(K)


@dataclass(frozen=True, eq=False)
class PolarProfile:
    """Samples of a Jacobi field ``G`` with derivative ``dG`` on ``rho``.

    When ``G`` vanishes before the requested range the samples stop at the
    first zero, recorded in ``first_zero``: beyond it the polar chart is no
    longer a geodesic disk.
    """

    rho: np.ndarray
    G: np.ndarray
    dG: np.ndarray
    step: float
    first_zero: Optional[float] = None

    @property
    def rho_max(self):
        return float(self.rho[-1])

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicHermiteSpline(self.rho, self.G, self.dG))

    def __call__(self, rho):
        return self._spline(rho)

    def derivative(self, rho):
        return self._spline.derivative()(rho)

    def log_derivative(self, rho):
        """``G'/G``, the Laplacian of the distance to the center."""
        return self.derivative(rho) / self(rho)

    def circle_length(self, rho):
        """Length ``2 pi G`` of the geodesic circle of radius ``rho``."""
        return 2 * math.pi * self(rho)


def _rk4(k_nodes, h, n):
    g, p = 0.0, 1.0
    gs = [0.0]
    ps = [1.0]
    half = 0.5 * h
    sixth = h / 6.0
    for i in range(n):
        k0, km, k1 = k_nodes[2 * i], k_nodes[2 * i + 1], k_nodes[2 * i + 2]
        a_g, a_p = p, -k0 * g
        b_g, b_p = p + half * a_p, -km * (g + half * a_g)
        c_g, c_p = p + half * b_p, -km * (g + half * b_g)
        d_g, d_p = p + h * c_p, -k1 * (g + h * c_g)
        g += sixth * (a_g + 2 * b_g + 2 * c_g + d_g)
        p += sixth * (a_p + 2 * b_p + 2 * c_p + d_p)
        gs.append(g)
        ps.append(p)
    return np.array(gs), np.array(ps)


def jacobi_solve(K, rho_max, step=1e-4, tol=1e-8, min_step=1e-7, max_nodes=4_000_000):
    """Integrate ``G'' = -K(rho) G`` from ``G(0) = 0, G'(0) = 1`` up to ``rho_max``.

    Classical RK4 at ``step``; the step is halved until two successive
    solutions agree within ``tol`` on their common nodes.

    Parameters
    ----------
    K : callable or float
        Curvature as a vectorised function of ``rho``, or a constant.
    rho_max : float
        End of the integration range.

    Returns
    -------
    PolarProfile
        Truncated at the first zero of ``G`` if one occurs before ``rho_max``.
    """
    K = _as_profile(K)
    if not rho_max > 0:
        raise DomainError("rho_max must be positive")
    n = max(1, int(math.ceil(rho_max / step - 1e-9)))
    h = rho_max / n

    def solve(h, n):
        nodes = np.arange(2 * n + 1) * (0.5 * h)
        k_nodes = np.asarray(K(nodes), dtype=float)
        if k_nodes.shape != nodes.shape or not np.all(np.isfinite(k_nodes)):
            raise NumericalError("curvature profile must be finite on the integration range")
        return _rk4(k_nodes.tolist(), h, n)

    g, p = solve(h, n)
    while True:
        if h / 2 < min_step or 4 * n + 1 > max_nodes:
            raise NumericalError("step size underflow in the Jacobi solver", h)
        g2, p2 = solve(h / 2, 2 * n)
        diff = np.max(np.abs(g2[::2] - g))
        h, n, g, p = h / 2, 2 * n, g2, p2
        if diff <= tol * max(1.0, float(np.max(np.abs(g)))):
            break
    rho = np.arange(n + 1) * h

    first_zero = None
    neg = np.flatnonzero(g[1:] <= 0)
    if neg.size:
        j = int(neg[0]) + 1
        seg = CubicHermiteSpline(rho[j - 1 : j + 1], g[j - 1 : j + 1], p[j - 1 : j + 1])
        first_zero = float(rho[j]) if g[j] == 0 else float(brentq(seg, rho[j - 1], rho[j], xtol=1e-15))
        rho, g, p = rho[:j], g[:j], p[:j]
    return PolarProfile(rho, g, p, h, first_zero)


@dataclass(frozen=True, eq=False)
class ComparisonResult:
    """Margins of the comparison lemma on a shared radius grid.

    ``log_derivative`` is ``G'/G - Ghat'/Ghat``, ``circle_factor`` is
    ``G - Ghat`` and ``circle_length`` is ``2 pi (G - Ghat)``.
    """

    rho: np.ndarray
    log_derivative: np.ndarray
    circle_factor: np.ndarray
    circle_length: np.ndarray
    hypothesis_holds: bool
    worst_violation: float
    violation_at: Optional[float]
    tolerance: float

    @property
    def min_margins(self):
        return {
            "log_derivative": float(np.min(self.log_derivative)),
            "circle_factor": float(np.min(self.circle_factor)),
            "circle_length": float(np.min(self.circle_length)),
        }

    @property
    def passed(self):
        return self.hypothesis_holds and min(self.min_margins.values()) >= -self.tolerance

    @property
    def verdict(self):
        if not self.hypothesis_holds:
            return "HYPOTHESIS_VIOLATED"
        return "PASS" if self.passed else "FAIL"


def comparison_check(K, K_hat, rho_max, tolerance=1e-9, curvature_slack=0.0, step=1e-4):
    """Compare the circle factors of two curvature profiles on ``(0, rho_max]``.

    If ``K <= K_hat`` the first profile's circles are at least as long and
    spread at least as fast.  A violated curvature ordering is reported in
    the result rather than raised.
    """
    K, K_hat = _as_profile(K), _as_profile(K_hat)
    prof = jacobi_solve(K, rho_max, step=step)
    prof_hat = jacobi_solve(K_hat, rho_max, step=step)
    end = min(prof.rho_max, prof_hat.rho_max)
    if prof.step == prof_hat.step:
        m = min(prof.rho.size, prof_hat.rho.size)
        rho = prof.rho[1:m]
        g, dg = prof.G[1:m], prof.dG[1:m]
        gh, dgh = prof_hat.G[1:m], prof_hat.dG[1:m]
    else:
        rho = np.linspace(0, end, int(round(end / step)) + 1)[1:]
        g, dg = prof(rho), prof.derivative(rho)
        gh, dgh = prof_hat(rho), prof_hat.derivative(rho)

    gap = np.asarray(K(rho), dtype=float) - np.asarray(K_hat(rho), dtype=float)
    worst = float(np.max(gap))
    holds = worst <= curvature_slack
    return ComparisonResult(
        rho=rho,
        log_derivative=dg / g - dgh / gh,
        circle_factor=g - gh,
        circle_length=2 * math.pi * (g - gh),
        hypothesis_holds=holds,
        worst_violation=max(worst, 0.0),
        violation_at=None if holds else float(rho[int(np.argmax(gap))]),
        tolerance=tolerance,
    )
