"""Machine-readable reports, plot tables and the human summary."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from . import verify as v
from .scenario import Outcome, ScenarioFile, point_rows
from .target_surface import ComparisonResult

SIGNIFICANT = 12
PLOT_COLUMNS = ("r", "theta", "rho_hat", "rho_f", "margin", "u", "lap_u")


def _num(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    r = float(f"{x:.{SIGNIFICANT}g}")
    return 0.0 if r == 0 else r


def clean(obj):
    """JSON-ready copy: 12 significant digits, complex as ``[re, im]``, non-finite as ``None``."""
    if isinstance(obj, dict):
        return {str(k): clean(val) for k, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(val) for val in obj]
    if isinstance(obj, np.ndarray):
        return [clean(val) for val in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _hypotheses(h):
    return [
        {"name": c.name, "passed": c.passed, "detail": c.detail, "worst": c.worst, "location": c.location}
        for c in h.checks
    ]


def _primary(rep: v.Report):
    out = {"check": rep.check, "verdict": rep.verdict, "slack": rep.slack}
    out.update({f"{k}_margin" if k in ("min", "max", "mean") else k: val for k, val in rep.summary().items()})
    out.update(rep.extras)
    return out


def _subharmonic(sub):
    if isinstance(sub, str):
        return {"passed": False, "error": sub}
    return {
        "passed": sub.passed,
        "min_laplacian": sub.min_laplacian,
        "slack": sub.slack,
        "n_retained": int(sub.retained.sum()),
        "n_excluded": int(sub.retained.size - sub.retained.sum()),
        "interior_max_u": sub.interior_max,
        "boundary_max_u": sub.boundary_max,
        "max_principle_ok": sub.max_principle_ok,
        "u_at_center": sub.center_behaviour,
    }


def _boundary(b):
    return [
        {
            "point": r.point,
            "status": r.status,
            "norm": r.norm,
            "radial_quotient": r.radial_quotient,
            "derivative_abs": r.derivative_abs,
            "sharp_bound": r.sharp_bound,
            "detail": r.detail,
        }
        for r in b.records
    ]


def _comparison(res: ComparisonResult, extra):
    return {
        "K": extra["K"],
        "K_hat": extra["K_hat"],
        "rho_max": extra["rho_max"],
        "verdict": res.verdict,
        "hypothesis_holds": res.hypothesis_holds,
        "worst_violation": res.worst_violation,
        "violation_at": res.violation_at,
        "tolerance": res.tolerance,
        "n_points": int(res.rho.size),
        "min_margins": res.min_margins,
    }


def _ahlfors(res: v.AhlforsResult):
    return {
        "z2": res.z2,
        "rho_hat_z2": res.rho_hat,
        "rho_f_z2": res.image,
        "bounds": res.bounds,
        "monotone": res.monotone,
        "converged": res.converged,
        "stages": [
            {
                "r0": st.r0,
                "rho0": st.rho0,
                "r1": st.r1,
                "rho1": st.rho1,
                "zeta2": st.zeta2,
                "bound": st.bound,
                "margin": st.margin,
                "gap": st.gap,
                "allowed_gap": st.allowed_gap,
                "verdict": st.verdict,
                "min_margin": st.min_margin,
            }
            for st in res.stages
        ],
    }


def build(sf: ScenarioFile, outcome: Outcome, include_points=False):
    """Assemble the report as plain data with a fixed key order."""
    head = {"name": sf.name, "mode": sf.mode, "description": sf.description}
    s = outcome.scenario
    if s is not None:
        head.update(
            {
                "domain": s.domain.describe(),
                "domain_disk_radius": s.radius,
                "target": s.target.describe(),
                "map": s.map.describe(),
                "rho1": s.rho1,
                "rho2": s.rho2,
                "grid": {"n_radial": s.grid.n_radial, "n_angular": s.grid.n_angular},
                "tolerances": vars(s.tolerances),
            }
        )
    elif sf.mode == "ahlfors_limit":
        head["map"] = sf.data["map"]
    out = {"scenario": head, "verdict": outcome.verdict}
    sec = outcome.sections
    if "primary" in sec:
        rep = sec["primary"]
        out["hypotheses"] = _hypotheses(rep.hypotheses)
        out["primary"] = _primary(rep)
        c = sec["center_norm"]
        out["center_norm"] = {"value": c.value, "bound": c.bound, "ratio": c.ratio, "passed": c.passed}
        out["subharmonicity"] = _subharmonic(sec["subharmonicity"])
        if sec["boundary"] is not None:
            out["boundary"] = _boundary(sec["boundary"])
    if "comparison" in sec:
        out["comparison"] = _comparison(sec["comparison"], outcome.extra)
    if "ahlfors" in sec:
        out["ahlfors"] = _ahlfors(sec["ahlfors"])
    if include_points:
        rows = point_rows(outcome)
        if rows is not None:
            out["points"] = {"columns": list(PLOT_COLUMNS), "rows": rows}
    return clean(out)


def dumps(report):
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def loads(text):
    return json.loads(text)


def _atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write(report, path):
    _atomic_write(path, dumps(report))


def read(path):
    return loads(Path(path).read_text(encoding="utf-8"))


def plot_table(outcome: Outcome):
    """CSV text of the grid values, or ``None`` for modes without a grid."""
    rows = point_rows(outcome)
    if rows is None:
        return None
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PLOT_COLUMNS)
    for row in rows:
        w.writerow("nan" if not math.isfinite(x) else f"{x:.{SIGNIFICANT}g}" for x in row)
    return buf.getvalue()


def write_plot(outcome, path):
    text = plot_table(outcome)
    if text is None:
        raise ValueError("this mode has no grid to plot")
    _atomic_write(path, text)


def summary_lines(sf: ScenarioFile, outcome: Outcome):
    """Short human-readable account of the run."""
    lines = [f"scenario {sf.name or sf.origin} ({sf.mode}): {outcome.verdict}"]
    if sf.description:
        lines.append(f"  {sf.description}")
    sec = outcome.sections
    if "primary" in sec:
        rep = sec["primary"]
        s = outcome.scenario
        lines.append(f"  rho1 = {s.rho1:.12g}, rho2 = {s.rho2:.12g}, grid {s.grid.n_radial}x{s.grid.n_angular}")
        for c in rep.hypotheses.checks:
            lines.append(f"  [{'ok' if c.passed else 'VIOLATED'}] {c.name}: {c.detail}")
        lines.append(
            f"  {rep.check}: {rep.verdict}; margin min {rep.min_margin:.6e} max {rep.max_margin:.6e}, "
            f"{rep.n_failed} of {rep.points.z.size} points below -{rep.slack:g}"
        )
        for spot in rep.extras.get("spots", []):
            lines.append(f"  spot z = {spot['z']}: bound {spot['bound']:.12g}, rho(f) {spot['rho_f']:.12g}, margin {spot['margin']:.6e}")
        c = sec["center_norm"]
        lines.append(f"  center norm ||df_0|| = {c.value:.12g} (bound {c.bound:.12g}): {'ok' if c.passed else 'FAIL'}")
        sub = sec["subharmonicity"]
        if isinstance(sub, str):
            lines.append(f"  subharmonicity: not evaluated ({sub})")
        else:
            lines.append(
                f"  subharmonicity: min laplacian {sub.min_laplacian:.3e} (slack {sub.slack:g}), "
                f"max u interior {sub.interior_max:.6g} vs boundary {sub.boundary_max:.6g}: {'ok' if sub.passed else 'FAIL'}"
            )
        if sec["boundary"] is not None:
            for r in sec["boundary"].records:
                extra = f", sharp bound {r.sharp_bound:.12g}" if r.sharp_bound is not None else ""
                lines.append(
                    f"  boundary b = {r.point}: {r.status}; ||df_b|| = {r.norm:.12g}, |f'(b)| = {r.derivative_abs:.12g}{extra}, "
                    f"radial quotient {r.radial_quotient:.9g}"
                )
        if "liouville" in rep.extras:
            for row in rep.extras["liouville"]:
                lines.append(
                    f"  liouville R1 x{row['scale']}: sup|f| on |z| <= {rep.extras['fixed_radius']:g} is {row['sup_on_fixed_disk']:.6e} "
                    f"<= {row['bound']:.6e}: {'ok' if row['ok'] else 'FAIL'}"
                )
    if "comparison" in sec:
        res = sec["comparison"]
        m = res.min_margins
        lines.append(
            f"  K = {outcome.extra['K']} vs K_hat = {outcome.extra['K_hat']} on (0, {outcome.extra['rho_max']:g}]; "
            f"curvature ordering {'holds' if res.hypothesis_holds else 'VIOLATED'}"
        )
        lines.append(
            f"  min margins: G'/G {m['log_derivative']:.6e}, G {m['circle_factor']:.6e}, length {m['circle_length']:.6e}"
        )
    if "ahlfors" in sec:
        res = sec["ahlfors"]
        lines.append(f"  z2 = {res.z2}: rho_hat(z2) = {res.rho_hat:.12g}, rho(f(z2)) = {res.image:.12g}")
        for st in res.stages:
            lines.append(
                f"  r0 = {st.r0:g}: r1 = {st.r1:.9g}, bound {st.bound:.9g}, gap {st.gap:.4e} "
                f"(allowed {st.allowed_gap:.4e}), stage {st.verdict}"
            )
        lines.append(f"  monotone {res.monotone}, converged {res.converged}")
    return lines
