"""Circularly symmetric conformal metrics on a euclidean disk.

A metric ``lam(r)**2 |dz|**2`` on ``|z| < R`` is written in geodesic polar
coordinates as ``d rho**2 + G(rho)**2 d theta**2`` through the transforms

    rho = h(r) = int_0^r lam(t) dt,      r = H(rho),      G(rho) = H(rho) * lam(H(rho)).

``RadialMetric`` owns those transforms together with the curvature and the
radial Laplacian that the finite shrinking lemma is built on.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import CubicSpline

from .errors import DomainError, NumericalError

__all__ = [
    "RadialMetric",
    "euclidean",
    "poincare",
    "spherical",
    "from_table",
    "load_table",
    "ENTIRE_PLANE_RADIUS",
    "POINCARE_EDGE",
]

#: Finite stand-in for an infinite domain radius.
ENTIRE_PLANE_RADIUS = 1.0e4
#: Evaluation cap for the hyperbolic factor, whose integral diverges at r = 1.
POINCARE_EDGE = 1.0 - 1.0e-8

INTEGRATION_TOL = 1e-10
INVERSION_TOL = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_ANCHOR_STEP = 1.0 / 32.0
_EDGE_FRACTION = 0.2
_MAX_NEWTON = 60


def difference_step(rho):
    """Step for central differences in the geodesic radius."""
    return np.maximum(1e-5, 1e-4 * np.asarray(rho, dtype=float))


def _as_output(values, like):
    return float(values) if np.ndim(like) == 0 else values


@dataclass(frozen=True, eq=False)
class RadialMetric:
    """The conformal metric ``factor(r)**2 |dz|**2`` on ``|z| < domain_radius``.

    Parameters
    ----------
    factor : callable
        Vectorised positive function of the euclidean radius.
    domain_radius : float
        Euclidean radius of the disk of definition.
    kind : str
        One of ``euclidean``, ``poincare``, ``spherical``, ``custom``.
    params : dict
        Constructor parameters, kept for reporting.
    singular_edge : bool
        True when the factor blows up at ``domain_radius``; evaluation is then
        capped slightly inside the edge.
    knots : tuple of float
        Points where the factor is only piecewise smooth (spline knots).
    """

    factor: Callable[[np.ndarray], np.ndarray]
    domain_radius: float
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    singular_edge: bool = False
    knots: tuple = ()

    def __post_init__(self):
        if not (self.domain_radius > 0 and math.isfinite(self.domain_radius)):
            raise DomainError(f"domain radius must be positive and finite, got {self.domain_radius}")
        limit = min(self.domain_radius, POINCARE_EDGE) if self.singular_edge else self.domain_radius
        anchors = self._anchor_grid(limit)
        lam = np.asarray(self.factor(anchors), dtype=float)
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
            raise DomainError("conformal factor must be finite and positive on the disk")
        partial = np.zeros_like(anchors)
        with warnings.catch_warnings():
            # quad flags roundoff at these tolerances; its error estimate is checked instead
            warnings.simplefilter("ignore", IntegrationWarning)
            for k in range(1, anchors.size):
                value, err = quad(
                    lambda t: float(self.factor(np.float64(t))),
                    anchors[k - 1],
                    anchors[k],
                    epsabs=1e-13,
                    epsrel=1e-13,
                    limit=200,
                )
                if err > INTEGRATION_TOL:
                    raise NumericalError("adaptive quadrature of the conformal factor did not converge", err)
                partial[k] = value
        h_anchor = np.cumsum(partial)
        if np.any(np.diff(h_anchor) <= 0):
            raise NumericalError("geodesic radius is not strictly increasing")
        object.__setattr__(self, "limit", limit)
        object.__setattr__(self, "_anchors", anchors)
        object.__setattr__(self, "_h_anchors", h_anchor)
        object.__setattr__(self, "_lam_anchors", lam)

    def _anchor_grid(self, limit):
        pts = [0.0]
        r = 0.0
        while True:
            step = _ANCHOR_STEP * max(1.0, r)
            if self.singular_edge:
                step = min(step, _EDGE_FRACTION * (limit - r))
            if r + step >= limit * (1 - 1e-12) or (self.singular_edge and limit - r < 1e-9):
                break
            r += step
            pts.append(r)
        pts.append(limit)
        grid = np.unique(np.concatenate([pts, [k for k in self.knots if 0 < k < limit]]))
        return grid

    # -- basic evaluation -------------------------------------------------

    @property
    def max_geodesic_radius(self):
        """``h`` at the evaluation limit (the geodesic radius of the full disk)."""
        return float(self._h_anchors[-1])

    def lam(self, r):
        """The conformal factor at euclidean radius ``r``."""
        return self.factor(np.asarray(r, dtype=float))

    def _check_r(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(r)) or np.any(r < 0) or np.any(r > self.domain_radius):
            bad = r[(r < 0) | (r > self.domain_radius) | ~np.isfinite(r)]
            raise DomainError(f"euclidean radius {bad.flat[0]!r} outside [0, {self.domain_radius}]")
        return np.minimum(r, self.limit)

    def _h(self, r):
        idx = np.clip(np.searchsorted(self._anchors, r, side="right") - 1, 0, self._anchors.size - 1)
        a = self._anchors[idx]
        half = 0.5 * (r - a)
        nodes = (a + half)[..., None] + half[..., None] * _GL_NODES
        tail = half * (self.factor(nodes) @ _GL_WEIGHTS)
        return self._h_anchors[idx] + tail

    # -- operations -------------------------------------------------------

    def geodesic_radius(self, r):
        """Geodesic distance ``h(r)`` from the center to the circle ``|z| = r``."""
        return _as_output(self._h(self._check_r(r)), r)

    def euclidean_radius(self, rho_hat):
        """Inverse transform ``H``: the euclidean radius at geodesic radius ``rho_hat``."""
        rho = np.asarray(rho_hat, dtype=float)
        top = self.max_geodesic_radius
        if np.any(~np.isfinite(rho)) or np.any(rho < 0) or np.any(rho > top):
            raise DomainError(f"geodesic radius outside [0, {top:.6g}]")
        return _as_output(self._invert(rho), rho_hat)

    def _invert(self, rho):
        flat = rho.ravel()
        k = np.clip(np.searchsorted(self._h_anchors, flat, side="right") - 1, 0, self._anchors.size - 2)
        lo = self._anchors[k].copy()
        hi = self._anchors[k + 1].copy()
        h_lo, h_hi = self._h_anchors[k], self._h_anchors[k + 1]
        r = lo + (flat - h_lo) * (hi - lo) / (h_hi - h_lo)
        active = np.ones(flat.shape, dtype=bool)
        for _ in range(_MAX_NEWTON):
            if not active.any():
                break
            ra = r[active]
            resid = self._h(ra) - flat[active]
            pos = resid > 0
            hi_a, lo_a = hi[active], lo[active]
            hi_a = np.where(pos, np.minimum(hi_a, ra), hi_a)
            lo_a = np.where(pos, lo_a, np.maximum(lo_a, ra))
            new = ra - resid / self.factor(ra)
            outside = (new < lo_a) | (new > hi_a)
            new = np.where(outside, 0.5 * (lo_a + hi_a), new)
            step = np.abs(new - ra)
            r[active], hi[active], lo[active] = new, hi_a, lo_a
            done = (step <= 4 * np.finfo(float).eps * np.maximum(ra, 1e-300)) | (resid == 0) | (hi_a - lo_a <= 0)
            idx = np.flatnonzero(active)
            active[idx[done]] = False
        if active.any():
            achieved = float(np.max(hi[active] - lo[active]))
            if achieved > INVERSION_TOL:
                raise NumericalError("inversion of the geodesic radius did not converge", achieved)
        r[flat == 0] = 0.0
        return r.reshape(rho.shape)

    def circle_factor(self, rho_hat):
        """``G(rho) = H(rho) * lam(H(rho))``, the length element of geodesic circles."""
        r = np.asarray(self.euclidean_radius(rho_hat), dtype=float)
        return _as_output(r * self.factor(r), rho_hat)

    def _stencil(self, rho_hat):
        rho = np.asarray(rho_hat, dtype=float)
        d = difference_step(rho)
        if np.any(rho - d <= 0) or np.any(rho + d >= self.max_geodesic_radius):
            raise DomainError("geodesic radius too close to the center or the edge for central differences")
        return rho, d

    def curvature(self, rho_hat):
        """Gauss curvature ``-G''/G`` from central second differences of ``G``."""
        rho, d = self._stencil(rho_hat)
        g = self.circle_factor(np.stack([rho - d, rho, rho + d]))
        k = -(g[0] - 2 * g[1] + g[2]) / (d * d * g[1])
        return _as_output(k, rho_hat)

    def radial_laplacian(self, phi, rho_hat):
        """Laplacian of the radial function ``phi(rho)``: ``phi'' + (G'/G) phi'``."""
        rho, d = self._stencil(rho_hat)
        stack = np.stack([rho - d, rho, rho + d])
        g = self.circle_factor(stack)
        p = np.asarray(phi(stack), dtype=float)
        dphi = (p[2] - p[0]) / (2 * d)
        d2phi = (p[2] - 2 * p[1] + p[0]) / (d * d)
        return _as_output(d2phi + (g[2] - g[0]) / (2 * d * g[1]) * dphi, rho_hat)

    def log_derivative(self, rho_hat):
        """``G'/G``, the Laplacian of the distance function itself."""
        return self.radial_laplacian(lambda x: x, rho_hat)

    def curvature_profile(self, floor=1e-3):
        """Curvature as a function of geodesic radius, usable from 0 up to the edge.

        Radii below ``floor`` reuse the value at ``floor``.
        """
        top = self.max_geodesic_radius * (1 - 1e-6)

        def profile(rho):
            rho = np.clip(np.asarray(rho, dtype=float), floor, top - difference_step(top))
            return self.curvature(rho)

        return profile

    def describe(self):
        out = {"kind": self.kind, "domain_radius": self.domain_radius}
        out.update(self.params)
        return out

    def __repr__(self):
        params = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"RadialMetric({self.kind}{', ' if params else ''}{params}, R={self.domain_radius})"


def euclidean(scale=1.0, radius=ENTIRE_PLANE_RADIUS):
    """Flat metric ``scale**2 |dz|**2``."""
    if not scale > 0:
        raise DomainError("euclidean scale must be positive")
    return RadialMetric(lambda r: np.full(np.shape(r), float(scale)), radius, "euclidean", {"scale": float(scale)})


def poincare(radius=1.0):
    """Hyperbolic metric ``(2 / (1 - r**2))**2 |dz|**2`` of curvature -1."""
    if radius > 1:
        raise DomainError("the hyperbolic factor is only defined on the unit disk")
    return RadialMetric(lambda r: 2.0 / (1.0 - r * r), radius, "poincare", singular_edge=radius == 1)


def spherical(radius=ENTIRE_PLANE_RADIUS):
    """Round metric ``(2 / (1 + r**2))**2 |dz|**2`` of curvature +1."""
    return RadialMetric(lambda r: 2.0 / (1.0 + r * r), radius, "spherical")


def load_table(path):
    """Read a two-column ``r, factor`` table; whitespace or comma separated, ``#`` comments."""
    text = Path(path).read_text()
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 4:
        raise ValueError(f"{path}: need at least 4 rows for cubic interpolation")
    table = np.array(rows)
    return table[:, 0], table[:, 1]


def from_table(r, lam, kind="custom"):
    """Cubic-spline conformal factor through the samples ``(r, lam)``.

    ``r`` must start at 0 and increase strictly; the last sample is the domain radius.
    """
    r = np.asarray(r, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if r[0] != 0:
        raise ValueError("table must start at r = 0")
    if np.any(np.diff(r) <= 0):
        raise ValueError("table radii must be strictly increasing")
    if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise ValueError("table factors must be positive and finite")
    spline = CubicSpline(r, lam)
    fine = np.linspace(0, r[-1], 64 * r.size)
    if np.any(spline(fine) <= 0):
        raise ValueError("interpolated factor is not positive")
    return RadialMetric(lambda t: spline(t), float(r[-1]), kind, {"samples": int(r.size)}, knots=tuple(r))
