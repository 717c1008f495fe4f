import csv
import io
import json
import math

import pytest

from finite_schwarz import cli, report, scenario
from finite_schwarz.errors import ScenarioError

PRESETS = [name for name, _ in cli.list_presets()]
EXPECTED_EXIT = {
    "ahlfors-limit": 0,
    "comparison-lemma": 0,
    "example1-euclidean": 0,
    "example2-hyperbolic": 0,
    "gfsl-theorem1": 0,
    "mgfsl-theorem2": 0,
    "pick-equality": 0,
    "schwarz-classical": 0,
    "stereographic": 3,
}

BASIC = """
mode = "theorem1"

[domain]
kind = "poincare"
radius = 0.9

[target]
kind = "poincare"

[map]
variant = "power"
params = { n = 2 }
"""


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# -- presets ---------------------------------------------------------------------------------


def test_preset_listing():
    assert len(PRESETS) >= 9
    assert set(EXPECTED_EXIT) <= set(PRESETS)
    for name in PRESETS:
        assert name == name.lower() and " " not in name and "_" not in name
    code, out, _ = run_cli("presets")
    assert code == 0
    assert len(out.strip().splitlines()) == len(PRESETS)


@pytest.mark.parametrize("name", sorted(EXPECTED_EXIT))
def test_preset_exit_codes(name):
    code, out, err = run_cli("run", "--preset", name, "--quiet")
    assert code == EXPECTED_EXIT[name], out + err
    assert out.count("\n") == 1


def test_stereographic_reports_curvature_violation():
    code, out, _ = run_cli("run", "--preset", "stereographic")
    assert code == 3
    assert "[VIOLATED] curvature_comparison" in out


def test_unknown_preset():
    code, _, err = run_cli("run", "--preset", "nope")
    assert code == 1
    assert "unknown preset" in err


def test_usage_errors_exit_one():
    assert run_cli()[0] == 1
    assert run_cli("run")[0] == 1
    assert run_cli("run", "--preset", "gfsl-theorem1", "--grid", "64by128")[0] == 1
    assert run_cli("run", "--preset", "gfsl-theorem1", "--tol-ineq", "-1")[0] == 1


# -- files ---------------------------------------------------------------------------------------


def test_run_file_and_outputs(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text(BASIC)
    out_json, out_csv = tmp_path / "r.json", tmp_path / "p.csv"
    code, out, _ = run_cli("run", str(path), "--grid", "8x16", "--out", str(out_json), "--plot", str(out_csv))
    assert code == 0
    rep = report.read(out_json)
    assert rep["verdict"] == "PASS"
    assert rep["scenario"]["name"] == "s"
    assert rep["scenario"]["grid"] == {"n_radial": 8, "n_angular": 16}
    rows = list(csv.reader(out_csv.read_text().splitlines()))
    assert rows[0] == list(report.PLOT_COLUMNS)
    assert len(rows) == 1 + 8 * 16
    # (ring, angle) order
    r = [float(x[0]) for x in rows[1:]]
    assert r == sorted(r)
    assert [float(x[1]) for x in rows[1:17]] == sorted(float(x[1]) for x in rows[1:17])


def test_points_flag(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text(BASIC)
    out_json = tmp_path / "r.json"
    run_cli("run", str(path), "--grid", "4x8", "--out", str(out_json), "--points")
    rep = report.read(out_json)
    assert rep["points"]["columns"] == list(report.PLOT_COLUMNS)
    assert len(rep["points"]["rows"]) == 32


def test_tolerance_overrides(tmp_path):
    path = tmp_path / "s.toml"
    path.write_text(BASIC)
    out_json = tmp_path / "r.json"
    run_cli("run", str(path), "--grid", "4x8", "--tol-ineq", "0.5", "--tol-subharmonic", "0.25", "--out", str(out_json))
    tol = report.read(out_json)["scenario"]["tolerances"]
    assert tol["ineq_slack"] == 0.5 and tol["subharmonic_slack"] == 0.25


def test_plot_write_failure(tmp_path):
    code, _, err = run_cli("run", "--preset", "gfsl-theorem1", "--grid", "4x8", "--plot", str(tmp_path / "no" / "p.csv"))
    assert code == 1
    assert "cannot write" in err


def test_report_round_trip(tmp_path):
    sf = cli.load_preset("gfsl-theorem1")
    outcome = scenario.run(sf)
    rep = report.build(sf, outcome)
    path = tmp_path / "r.json"
    report.write(rep, path)
    assert report.read(path) == rep
    assert list(tmp_path.iterdir()) == [path]  # no temp files left behind


def test_report_numbers_have_twelve_digits():
    assert report.clean(math.pi) == 3.14159265359
    assert report.clean([math.inf, math.nan, -0.0, 1 + 2j]) == [None, None, 0.0, [1.0, 2.0]]


def test_determinism_of_report_bytes(tmp_path):
    for i in range(2):
        run_cli("run", "--preset", "example2-hyperbolic", "--out", str(tmp_path / f"{i}.json"), "--plot", str(tmp_path / f"{i}.csv"))
    assert (tmp_path / "0.json").read_bytes() == (tmp_path / "1.json").read_bytes()
    assert (tmp_path / "0.csv").read_bytes() == (tmp_path / "1.csv").read_bytes()


def test_plot_columns_for_pass_and_rotation(tmp_path):
    for name in ("gfsl-theorem1", "pick-equality"):
        path = tmp_path / f"{name}.csv"
        run_cli("run", "--preset", name, "--plot", str(path))
        rows = list(csv.DictReader(path.read_text().splitlines()))
        assert len(rows) == 8192
        assert min(float(r["margin"]) for r in rows) >= -1e-6
        if name == "pick-equality":
            assert max(abs(float(r["u"])) for r in rows) < 1e-8


# -- parsing errors --------------------------------------------------------------------------------


@pytest.mark.parametrize(
    "edit, field",
    [
        (lambda t: t.replace('mode = "theorem1"', 'mode = "theorem9"'), "mode"),
        (lambda t: t + "\nextra = 1\n", "extra"),
        (lambda t: t.replace("radius = 0.9", "radius = -0.9"), "domain.radius"),
        (lambda t: t.replace("radius = 0.9", "radius = nan"), "domain.radius"),
        (lambda t: t.replace("radius = 0.9", "radius = inf"), "domain.radius"),
        (lambda t: t.replace("radius = 0.9", 'radius = "big"'), "domain.radius"),
        (lambda t: t.replace('kind = "poincare"\nradius', 'kind = "hyperbolic"\nradius'), "domain.kind"),
        (lambda t: t.replace("[target]", "[target]\ncolour = 1"), "target.colour"),
        (lambda t: t.replace('variant = "power"', 'variant = "spline"'), "map.variant"),
        (lambda t: t + "\n[grid]\nn_radial = 2\n", "grid.n_radial"),
        (lambda t: t + "\n[tolerances]\nineq_slack = 0\n", "tolerances.ineq_slack"),
        (lambda t: t + "\n[checks]\nspot_points = [[0.5, inf]]\n", "checks.spot_points"),
        (lambda t: t.replace("[map]", "[mapp]"), "mapp"),
    ],
)
def test_parse_errors_name_the_field(edit, field):
    with pytest.raises(ScenarioError) as exc:
        scenario.parse(edit(BASIC), "s.toml")
    assert field in str(exc.value)


def test_parse_error_reports_line():
    text = BASIC.replace("radius = 0.9", "radius = -0.9")
    with pytest.raises(ScenarioError, match=r"s.toml, line 6: domain.radius"):
        scenario.parse(text, "s.toml")


def test_toml_syntax_error():
    with pytest.raises(ScenarioError, match="line"):
        scenario.parse("mode = \n", "s.toml")


def test_syntax_error_exit_code(tmp_path):
    path = tmp_path / "bad.toml"
    path.write_text("mode = [\n")
    code, _, err = run_cli("run", str(path))
    assert code == 1
    assert "bad.toml" in err


def test_missing_file_exit_code(tmp_path):
    code, _, err = run_cli("run", str(tmp_path / "missing.toml"))
    assert code == 1


def test_mode_specific_hypotheses():
    ex1 = BASIC.replace('mode = "theorem1"', 'mode = "example1"')
    with pytest.raises(ScenarioError, match="euclidean"):
        scenario.parse(ex1)
    ex2 = BASIC.replace('mode = "theorem1"', 'mode = "example2"').replace("radius = 0.9", "radius = 1.0")
    with pytest.raises(ScenarioError, match="radius < 1"):
        scenario.parse(ex2)


def test_custom_table_domain(tmp_path):
    import numpy as np

    # spline curvature error scales like the sample spacing cubed near the steep edge
    r = np.linspace(0, 0.95, 2000)
    np.savetxt(tmp_path / "hyp.txt", np.column_stack([r, 2 / (1 - r * r)]))
    text = BASIC.replace('kind = "poincare"\nradius = 0.9', 'kind = "custom"\nradius = 0.9\ntable = "hyp.txt"')
    (tmp_path / "c.toml").write_text(text)
    sf = scenario.load(tmp_path / "c.toml")
    out = scenario.run(sf, grid=scenario.v.Grid(8, 16))
    assert out.verdict == "PASS"
    assert out.scenario.rho1 == pytest.approx(math.log(19), abs=1e-6)


def test_custom_table_missing(tmp_path):
    text = BASIC.replace('kind = "poincare"\nradius = 0.9', 'kind = "custom"\nradius = 0.9\ntable = "none.txt"')
    (tmp_path / "c.toml").write_text(text)
    code, _, err = run_cli("run", str(tmp_path / "c.toml"))
    assert code == 1
    assert "domain.table" in err


def test_comparison_by_metric_name():
    text = 'mode = "comparison"\n[comparison]\nK = "poincare"\nK_hat = "euclidean"\nrho_max = 2.0\n'
    out = scenario.run(scenario.parse(text))
    assert out.verdict == "PASS"


def test_report_json_is_plain(tmp_path):
    for name in ("ahlfors-limit", "comparison-lemma", "schwarz-classical"):
        sf = cli.load_preset(name)
        rep = report.build(sf, scenario.run(sf))
        text = report.dumps(rep)
        assert json.loads(text) == rep
        assert "NaN" not in text and "Infinity" not in text
