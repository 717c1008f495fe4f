"""Scenario files: parsing, validation and execution of one verification run.

A scenario is a TOML document with one table per component::

    mode = "theorem1"
    description = "power map on the hyperbolic disk"

    [domain]
    kind = "poincare"
    radius = 0.9

    [target]
    kind = "poincare"

    [map]
    variant = "power"
    params = { n = 2 }

Unknown keys are rejected and every error names the offending field (and
its line when it can be found in the source text).
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from . import holomap
from . import radial_metric as rm
from . import verify as v
from .errors import FiniteSchwarzError, ScenarioError
from .target_surface import ConformalSurface, comparison_check

MODES = ("theorem1", "theorem2", "classical", "example1", "example2", "ahlfors_limit", "comparison")

_TOP_KEYS = {
    "mode",
    "name",
    "description",
    "domain",
    "target",
    "map",
    "grid",
    "tolerances",
    "checks",
    "ahlfors",
    "comparison",
}
_DOMAIN_KEYS = {"kind", "radius", "params", "table", "metric_radius"}
_TARGET_KEYS = {"kind", "radius", "params", "table", "rho2"}
_GRID_KEYS = {"n_radial", "n_angular"}
_TOL_KEYS = {"ineq_slack", "subharmonic_slack", "integration_tol", "curvature_slack", "max_principle_slack"}
_CHECK_KEYS = {"boundary_points", "spot_points"}
_AHLFORS_KEYS = {"z2", "r0", "n_radial", "n_angular", "circle_points", "safety"}
_COMPARISON_KEYS = {"K", "K_hat", "rho_max", "tolerance"}

_DOMAIN_PARAMS = {"euclidean": {"scale"}, "poincare": set(), "spherical": set(), "custom": set()}
_TARGET_PARAMS = {
    "poincare": set(),
    "euclidean": {"scale"},
    "spherical": set(),
    "curvature_scaled": {"a"},
    "custom_radial": set(),
}


class _Source:
    """Locates ``[table] key = ...`` lines for error messages."""

    def __init__(self, text, origin):
        self.lines = text.splitlines()
        self.origin = origin

    def line_of(self, table, key=None):
        section = None
        for i, raw in enumerate(self.lines, 1):
            line = raw.split("#", 1)[0].strip()
            if line.startswith("[") and line.endswith("]"):
                section = line.strip("[]").strip()
                if key is None and section == table:
                    return i
                continue
            if key is not None and section == table and line.split("=", 1)[0].strip() == key:
                return i
        return None

    def error(self, path, message):
        table, _, key = path.partition(".")
        if not key:
            table, key = "", table
        key = key.split(".", 1)[0].split("[", 1)[0]
        line = self.line_of(table or None, key)
        where = f"{self.origin}, line {line}" if line else self.origin
        return ScenarioError(f"{where}: {path}: {message}")


@dataclass(frozen=True)
class ScenarioFile:
    """A validated scenario document, ready to run."""

    mode: str
    name: str
    description: str
    data: dict
    base_dir: Path = field(default_factory=Path)
    origin: str = "<scenario>"

    def scenario(self, grid=None, tolerances=None) -> v.Scenario:
        """The grid scenario for the shrinking modes."""
        return _build_scenario(self, grid, tolerances)


def parse(text, origin="<scenario>", base_dir=None, name=None) -> ScenarioFile:
    """Parse and validate scenario text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{origin}: {exc}") from exc
    src = _Source(text, origin)
    _validate(data, src)
    return ScenarioFile(
        mode=data["mode"],
        name=data.get("name", name or ""),
        description=data.get("description", ""),
        data=data,
        base_dir=Path(base_dir) if base_dir is not None else Path("."),
        origin=origin,
    )


def load(path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc.strerror}") from exc
    return parse(text, str(path), path.parent, name=path.stem)


# -- validation ----------------------------------------------------------------


def _finite(value, path, src, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise src.error(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise src.error(path, "must be finite")
    if positive and not value > 0:
        raise src.error(path, "must be positive")
    return float(value)


def _point(value, path, src):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_finite(value[0], path, src), _finite(value[1], path, src))
    return complex(_finite(value, path, src))


def _table(data, key, allowed, src, required=False):
    if key not in data:
        if required:
            raise src.error(key, "missing required table")
        return {}
    sub = data[key]
    if not isinstance(sub, dict):
        raise src.error(key, "must be a table")
    unknown = sorted(set(sub) - allowed)
    if unknown:
        raise src.error(f"{key}.{unknown[0]}", f"unknown key (allowed: {', '.join(sorted(allowed))})")
    return sub


def _check_numbers(obj, path, src):
    """Every number anywhere inside ``obj`` must be finite."""
    if isinstance(obj, dict):
        for k, val in obj.items():
            _check_numbers(val, f"{path}.{k}", src)
    elif isinstance(obj, list):
        for i, val in enumerate(obj):
            _check_numbers(val, f"{path}[{i}]", src)
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise src.error(path, "must be finite")


def _validate(data, src):
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        raise src.error(unknown[0], "unknown key")
    mode = data.get("mode")
    if mode is None:
        raise src.error("mode", f"missing; expected one of {', '.join(MODES)}")
    if mode not in MODES:
        raise src.error("mode", f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    for key in ("name", "description"):
        if key in data and not isinstance(data[key], str):
            raise src.error(key, "must be a string")
    for key, val in data.items():
        _check_numbers(val, key, src)

    grid = _table(data, "grid", _GRID_KEYS, src)
    for key, val in grid.items():
        if isinstance(val, bool) or not isinstance(val, int) or val < 3:
            raise src.error(f"grid.{key}", "must be an integer >= 3")
    tol = _table(data, "tolerances", _TOL_KEYS, src)
    for key, val in tol.items():
        _finite(val, f"tolerances.{key}", src, positive=True)

    if mode == "comparison":
        cmp = _table(data, "comparison", _COMPARISON_KEYS, src, required=True)
        for key in ("K", "K_hat"):
            if key not in cmp:
                raise src.error(f"comparison.{key}", "missing")
            val = cmp[key]
            if isinstance(val, str):
                if val not in ("euclidean", "poincare", "spherical"):
                    raise src.error(f"comparison.{key}", "metric name must be euclidean, poincare or spherical")
            else:
                _finite(val, f"comparison.{key}", src)
        _finite(cmp.get("rho_max", 3.0), "comparison.rho_max", src, positive=True)
        if "tolerance" in cmp:
            _finite(cmp["tolerance"], "comparison.tolerance", src, positive=True)
        return

    if mode == "ahlfors_limit":
        ah = _table(data, "ahlfors", _AHLFORS_KEYS, src, required=True)
        if "z2" not in ah:
            raise src.error("ahlfors.z2", "missing")
        z2 = _point(ah["z2"], "ahlfors.z2", src)
        r0 = ah.get("r0", [0.9, 0.99, 0.999])
        if not isinstance(r0, list) or not r0:
            raise src.error("ahlfors.r0", "must be a non-empty list")
        for i, r in enumerate(r0):
            r = _finite(r, f"ahlfors.r0[{i}]", src, positive=True)
            if not abs(z2) < r < 1:
                raise src.error("ahlfors.r0", f"entry {r} must satisfy |z2| < r0 < 1")
        for key in ("n_radial", "n_angular", "circle_points"):
            if key in ah and (isinstance(ah[key], bool) or not isinstance(ah[key], int) or ah[key] < 3):
                raise src.error(f"ahlfors.{key}", "must be an integer >= 3")
        if "safety" in ah and _finite(ah["safety"], "ahlfors.safety", src, positive=True) < 1:
            raise src.error("ahlfors.safety", "must be >= 1")
        mp = _table(data, "map", {"variant", "params"}, src, required=True)
        _map(mp, src)
        if "target" in data:
            _target_spec(_table(data, "target", _TARGET_KEYS, src), src)
        return

    dom = _table(data, "domain", _DOMAIN_KEYS, src, required=True)
    tgt = _table(data, "target", _TARGET_KEYS, src, required=True)
    mp = _table(data, "map", {"variant", "params"}, src, required=True)
    checks = _table(data, "checks", _CHECK_KEYS, src)
    _domain_spec(dom, src)
    _target_spec(tgt, src)
    _map(mp, src)
    for key, pts in checks.items():
        if not isinstance(pts, list):
            raise src.error(f"checks.{key}", "must be a list of [re, im] pairs")
        for i, p in enumerate(pts):
            _point(p, f"checks.{key}[{i}]", src)

    if mode == "example1" and dom["kind"] != "euclidean":
        raise src.error("domain.kind", "example1 needs a euclidean domain")
    if mode == "example2" and (dom["kind"] != "poincare" or not dom["radius"] < 1):
        raise src.error("domain.kind", "example2 needs a poincare domain with radius < 1")
    if mode == "classical" and (dom["kind"] != "euclidean" or tgt["kind"] != "euclidean"):
        raise src.error("mode", "classical mode needs euclidean domain and target")


def _domain_spec(dom, src):
    kind = dom.get("kind")
    if kind not in _DOMAIN_PARAMS:
        raise src.error("domain.kind", f"expected one of {', '.join(_DOMAIN_PARAMS)}, got {kind!r}")
    if "radius" not in dom:
        raise src.error("domain.radius", "missing")
    _finite(dom["radius"], "domain.radius", src, positive=True)
    if "metric_radius" in dom:
        _finite(dom["metric_radius"], "domain.metric_radius", src, positive=True)
    _params(dom, "domain", _DOMAIN_PARAMS[kind], src)
    if kind == "custom" and not isinstance(dom.get("table"), str):
        raise src.error("domain.table", "custom domains need a table path")
    if kind != "custom" and "table" in dom:
        raise src.error("domain.table", "only custom domains take a table")


def _target_spec(tgt, src):
    kind = tgt.get("kind")
    if kind not in _TARGET_PARAMS:
        raise src.error("target.kind", f"expected one of {', '.join(_TARGET_PARAMS)}, got {kind!r}")
    for key in ("radius", "rho2"):
        if key in tgt:
            _finite(tgt[key], f"target.{key}", src, positive=True)
    _params(tgt, "target", _TARGET_PARAMS[kind], src)
    if kind == "curvature_scaled" and "a" not in tgt.get("params", {}):
        raise src.error("target.params", "curvature_scaled needs params.a")
    if kind == "custom_radial" and not isinstance(tgt.get("table"), str):
        raise src.error("target.table", "custom_radial targets need a table path")


def _params(section, name, allowed, src):
    params = section.get("params", {})
    if not isinstance(params, dict):
        raise src.error(f"{name}.params", "must be a table")
    bad = sorted(set(params) - allowed)
    if bad:
        raise src.error(f"{name}.params", f"unknown parameter {bad[0]!r} for kind {section['kind']!r}")
    for key, val in params.items():
        _finite(val, f"{name}.params.{key}", src, positive=True)


def _map(spec, src):
    try:
        return holomap.from_spec(spec)
    except ScenarioError as exc:
        raise src.error("map.variant", str(exc)) from exc


# -- construction ----------------------------------------------------------------


def _resolve(sf, path):
    p = Path(path)
    return p if p.is_absolute() else sf.base_dir / p


def _read_table(sf, section):
    path = _resolve(sf, sf.data[section]["table"])
    try:
        r, lam = rm.load_table(path)
        rm.from_table(r, lam)
    except OSError as exc:
        raise ScenarioError(f"{sf.origin}: {section}.table: cannot read {path}: {exc.strerror}") from exc
    except ValueError as exc:
        raise ScenarioError(f"{sf.origin}: {section}.table: {exc}") from exc
    return r, lam


def build_domain(sf):
    dom = sf.data["domain"]
    kind, params = dom["kind"], dom.get("params", {})
    cap = dom.get("metric_radius")
    if kind == "euclidean":
        return rm.euclidean(params.get("scale", 1.0), cap or rm.ENTIRE_PLANE_RADIUS)
    if kind == "poincare":
        return rm.poincare(cap or 1.0)
    if kind == "spherical":
        return rm.spherical(cap or rm.ENTIRE_PLANE_RADIUS)
    return rm.from_table(*_read_table(sf, "domain"))


def build_target(sf):
    tgt = sf.data.get("target", {"kind": "poincare"})
    kind, params = tgt["kind"], tgt.get("params", {})
    radius = tgt.get("radius")
    if kind == "poincare":
        return ConformalSurface.poincare(radius or 1.0)
    if kind == "euclidean":
        return ConformalSurface.euclidean(radius or rm.ENTIRE_PLANE_RADIUS, params.get("scale", 1.0))
    if kind == "spherical":
        return ConformalSurface.spherical(radius or 10.0)
    if kind == "curvature_scaled":
        return ConformalSurface.curvature_scaled(params["a"], radius or 1.0)
    return ConformalSurface.custom_radial(*_read_table(sf, "target"))


def _build_scenario(sf, grid=None, tolerances=None):
    data = sf.data
    domain = build_domain(sf)
    target = build_target(sf)
    fmap = holomap.from_spec(data["map"])
    g = data.get("grid", {})
    if grid is None:
        grid = v.Grid(g.get("n_radial", 64), g.get("n_angular", 128))
    overrides = dict(data.get("tolerances", {}))
    overrides.update({k: val for k, val in (tolerances or {}).items() if val is not None})
    tol = v.Tolerances.for_metrics(domain, target, **overrides)
    checks = data.get("checks", {})
    return v.Scenario(
        domain,
        float(data["domain"]["radius"]),
        target,
        fmap,
        rho2=data["target"].get("rho2"),
        grid=grid,
        tolerances=tol,
        mode=sf.mode,
        name=sf.name,
        boundary_points=tuple(_as_complex(p) for p in checks.get("boundary_points", [])),
        spot_points=tuple(_as_complex(p) for p in checks.get("spot_points", [])),
    )


def _as_complex(p):
    return complex(p[0], p[1]) if isinstance(p, (list, tuple)) else complex(p)


# -- execution -------------------------------------------------------------------------


@dataclass
class Outcome:
    """Result of running one scenario: overall verdict plus the structured parts."""

    verdict: str
    sections: dict
    scenario: Optional[v.Scenario] = None
    primary: Any = None
    subharmonic: Optional[v.SubharmonicReport] = None
    extra: dict = field(default_factory=dict)


_PRIMARY = {
    "theorem1": v.verify_shrinking,
    "example2": v.verify_shrinking,
    "theorem2": v.verify_general_bound,
    "example1": v.verify_general_bound,
    "classical": v.verify_classical,
}


def _combine(primary_verdict, *others):
    if primary_verdict == v.HYPOTHESIS_VIOLATED:
        return v.HYPOTHESIS_VIOLATED
    if primary_verdict != v.PASS or not all(others):
        return v.FAIL
    return v.PASS


def run(sf: ScenarioFile, grid=None, tolerances=None) -> Outcome:
    """Execute the scenario's mode and collect every check."""
    if sf.mode == "comparison":
        return _run_comparison(sf)
    if sf.mode == "ahlfors_limit":
        return _run_ahlfors(sf, tolerances)

    s = sf.scenario(grid, tolerances)
    rep = _PRIMARY[sf.mode](s)
    center = v.check_center_norm(s)
    try:
        sub = v.check_subharmonicity(s)
        sub_error = None
    except FiniteSchwarzError as exc:
        sub, sub_error = None, str(exc)
    boundary = v.check_boundary_stretch(s) if s.boundary_points else None

    # The subharmonicity argument presupposes the hypotheses; when they fail
    # its outcome is informational only.
    sub_ok = sub is not None and sub.passed
    verdict = _combine(rep.verdict, center.passed, sub_ok, boundary is None or boundary.passed)
    sections = {"primary": rep, "center_norm": center, "subharmonicity": sub or sub_error, "boundary": boundary}
    return Outcome(verdict, sections, s, rep, sub)


def _profile(value):
    if isinstance(value, str):
        metric = {"euclidean": rm.euclidean, "poincare": rm.poincare, "spherical": rm.spherical}[value]()
        return metric.curvature_profile(), value
    return float(value), float(value)


def _run_comparison(sf):
    cmp = sf.data["comparison"]
    k, k_label = _profile(cmp["K"])
    kh, kh_label = _profile(cmp["K_hat"])
    rho_max = float(cmp.get("rho_max", 3.0))
    res = comparison_check(k, kh, rho_max, tolerance=float(cmp.get("tolerance", 1e-9)))
    extra = {"K": k_label, "K_hat": kh_label, "rho_max": rho_max}
    return Outcome(res.verdict, {"comparison": res}, primary=res, extra=extra)


def _run_ahlfors(sf, tolerances=None):
    ah = sf.data["ahlfors"]
    f = holomap.from_spec(sf.data["map"])
    target = build_target(sf) if "target" in sf.data else None
    grid = v.Grid(ah.get("n_radial", 16), ah.get("n_angular", 32))
    tol = None
    overrides = dict(sf.data.get("tolerances", {}))
    overrides.update({k: val for k, val in (tolerances or {}).items() if val is not None})
    if overrides:
        tol = v.Tolerances(**{"ineq_slack": 1e-6, **overrides})
    res = v.ahlfors_limit(
        f,
        _as_complex(ah["z2"]),
        tuple(ah.get("r0", (0.9, 0.99, 0.999))),
        target=target,
        grid=grid,
        tolerances=tol,
        circle_points=ah.get("circle_points", 512),
        safety=ah.get("safety", 1.01),
    )
    return Outcome(res.verdict, {"ahlfors": res}, primary=res)


def point_rows(outcome: Outcome):
    """Grid rows ``(r, theta, rho_hat, rho_f, margin, u, lap_u)`` in (ring, angle) order."""
    rep = outcome.primary
    if not isinstance(rep, v.Report):
        return None
    pts = rep.points
    z = pts.z
    n = z.size
    sub = outcome.subharmonic
    u = sub.u.ravel() if sub is not None else np.full(n, np.nan)
    lap = sub.laplacian.ravel() if sub is not None else np.full(n, np.nan)
    grid = outcome.scenario.grid
    theta = np.broadcast_to(grid.angles()[None, :], z.shape).ravel()
    return np.column_stack(
        [np.abs(z.ravel()), theta, pts.rho_hat.ravel(), pts.rho_f.ravel(), pts.margin.ravel(), u, lap]
    )
