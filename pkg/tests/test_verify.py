import cmath
import math

import numpy as np
import pytest

from finite_schwarz import radial_metric as rm
from finite_schwarz.errors import DomainError
from finite_schwarz.holomap import (
    Blaschke,
    Composition,
    Identity,
    MoebiusDisk,
    Polynomial,
    Power,
    RotationScale,
)
from finite_schwarz.target_surface import ConformalSurface, constant_profile
from finite_schwarz.verify import (
    HYPOTHESIS_VIOLATED,
    PASS,
    Grid,
    Scenario,
    ahlfors_limit,
    check_boundary_stretch,
    check_center_norm,
    check_hypotheses,
    check_laplacian_comparison,
    check_subharmonicity,
    verify_classical,
    verify_general_bound,
    verify_shrinking,
)

SMALL = Grid(16, 32)


def hyp_scenario(f, radius=0.9, **kw):
    return Scenario(rm.poincare(), radius, ConformalSurface.poincare(), f, **kw)


def flat_scenario(f, r1=1.0, r2=1.0, **kw):
    return Scenario(rm.euclidean(), r1, ConformalSurface.euclidean(), f, rho2=r2, **kw)


# -- scenario and grid -------------------------------------------------------------------


def test_grid_layout():
    g = Grid(4, 8)
    pts = g.points(1.0)
    assert pts.shape == (4, 8)
    assert np.abs(pts).max() < 1.0
    assert g.rings(1.0)[0] == pytest.approx(g.r_max(1.0) / 4)
    assert g.angles()[1] == pytest.approx(math.pi / 4)


def test_scenario_defaults():
    s = hyp_scenario(Power(2))
    assert s.rho1 == pytest.approx(math.log(19), abs=1e-12)
    assert s.rho2 == s.rho1
    assert s.tolerances.ineq_slack == 1e-6
    assert flat_scenario(Power(2)).tolerances.ineq_slack == 1e-8


def test_scenario_rejects_bad_radius():
    with pytest.raises(DomainError):
        Scenario(rm.poincare(), 1.5, ConformalSurface.poincare(), Identity())
    with pytest.raises(DomainError):
        hyp_scenario(Identity(), rho2=-1.0)


# -- hypotheses ---------------------------------------------------------------------------


def test_hypotheses_pass_for_matching_disks():
    h = check_hypotheses(hyp_scenario(Power(2), grid=SMALL))
    assert h.passed
    assert [c.name for c in h.checks] == [
        "domain_circular_symmetry",
        "center_fixed",
        "radius_order",
        "curvature_comparison",
        "image_in_target_disk",
    ]


def test_hypotheses_flag_spherical_target():
    s = Scenario(rm.euclidean(), 10.0, ConformalSurface.spherical(10.0), Identity(), grid=SMALL)
    h = check_hypotheses(s)
    assert not h.passed
    c = h["curvature_comparison"]
    assert not c.passed
    assert c.worst == pytest.approx(1.0, abs=1e-4)
    assert [v.name for v in h.violations()] == ["curvature_comparison"]


def test_hypotheses_flat_into_hyperbolic():
    s = Scenario(rm.euclidean(), 1.0, ConformalSurface.poincare(), Polynomial((0, 0.5, 0.25)), rho2=2.0, grid=SMALL)
    assert check_hypotheses(s, 2)["curvature_comparison"].passed


def test_hypotheses_center_and_order():
    s = hyp_scenario(MoebiusDisk(0.2), grid=SMALL)
    assert not check_hypotheses(s)["center_fixed"].passed
    s = hyp_scenario(Power(2), rho2=4.0, grid=SMALL)
    assert not check_hypotheses(s, 1)["radius_order"].passed
    assert check_hypotheses(s, 2)["metric_extension"].passed


def test_extension_fails_when_metric_stops():
    # the domain metric ends at |z| = 0.5, so it cannot reach a larger geodesic radius
    s = Scenario(rm.poincare(0.5), 0.5, ConformalSurface.poincare(), Power(2), rho2=3.0, grid=SMALL)
    assert not check_hypotheses(s, 2)["metric_extension"].passed


def test_nonsymmetric_target_pairing_is_flagged():
    target = ConformalSurface(lambda w: 2.0 / (1 - np.abs(w) ** 2) * (1 + 0.1 * np.real(w)), 0.9)
    s = Scenario(rm.poincare(), 0.5, target, Power(2), grid=SMALL)
    detail = check_hypotheses(s)["curvature_comparison"].detail
    assert "upper bound" in detail


# -- shrinking ------------------------------------------------------------------------------


def test_shrinking_power():
    rep = verify_shrinking(hyp_scenario(Power(2), spot_points=(0.5,)))
    assert rep.verdict == PASS
    spot = rep.extras["spots"][0]
    assert spot["rho_f"] == pytest.approx(math.log(5 / 3), abs=1e-10)
    assert spot["rho_hat"] == pytest.approx(math.log(3), abs=1e-10)
    assert spot["margin"] == pytest.approx(math.log(3) - math.log(5 / 3), abs=1e-8)


@pytest.mark.parametrize("f", [RotationScale(cmath.exp(1.3j)), Identity()], ids=repr)
def test_equality_family(f):
    rep = verify_shrinking(hyp_scenario(f))
    assert rep.verdict == PASS
    assert abs(rep.min_margin) < 1e-8 and abs(rep.max_margin) < 1e-8


def test_shrinking_counterexample_records_negative_margins():
    s = Scenario(rm.euclidean(), 10.0, ConformalSurface.spherical(10.0), Identity())
    rep = verify_shrinking(s)
    assert rep.verdict == HYPOTHESIS_VIOLATED
    assert rep.min_margin < 0
    assert rep.n_failed > 0


def test_expanding_map_needs_the_larger_target_disk():
    # z -> 2z on |z| < 0.3 lands in |w| < 0.6: fine for the general bound with
    # the matching rho2, a hypothesis failure for equal radii
    s = hyp_scenario(RotationScale(2.0), radius=0.3, rho2=rm.poincare().geodesic_radius(0.6))
    rep = verify_general_bound(s)
    assert rep.verdict == PASS
    assert abs(rep.min_margin) < 1e-8
    s = Scenario(rm.poincare(), 0.3, ConformalSurface.poincare(), RotationScale(1.5), grid=SMALL)
    rep = verify_shrinking(s)
    assert rep.verdict == HYPOTHESIS_VIOLATED  # image leaves the target disk


def test_escaped_points_are_failures():
    s = Scenario(rm.poincare(), 0.9, ConformalSurface.poincare(0.5), Identity(), grid=SMALL)
    rep = verify_shrinking(s)
    assert rep.points.escaped.any()
    assert rep.verdict == HYPOTHESIS_VIOLATED
    assert not rep.hypotheses["image_in_target_disk"].passed


def test_general_bound_matches_shrinking_at_equal_radii():
    s = hyp_scenario(Composition((Blaschke(0.3), Power(2), MoebiusDisk(0.09))))
    a, b = verify_shrinking(s), verify_general_bound(s)
    assert np.max(np.abs(a.points.margin - b.points.margin)) < 1e-10


def test_general_bound_euclidean_reduction():
    s = Scenario(rm.euclidean(), 2.0, ConformalSurface.euclidean(), RotationScale(0.5), rho2=1.0)
    rep = verify_general_bound(s)
    z = rep.points.z
    assert np.max(np.abs(rep.points.bound - 0.5 * np.abs(z))) < 1e-12
    assert rep.verdict == PASS
    assert abs(rep.min_margin) < 1e-12


def test_general_bound_larger_target():
    s = Scenario(rm.poincare(), 0.5, ConformalSurface.poincare(), Polynomial((0, 1.2, 0.3)), rho2=math.log(9))
    rep = verify_general_bound(s)
    assert rep.verdict == PASS
    assert rep.extras["ratio"] == pytest.approx(1.6, abs=1e-12)
    # H(rho(f(z))) / |z| stays below H(rho2) / H(rho1)
    big_h = rm.poincare().euclidean_radius(rep.points.rho_f)
    assert np.max(big_h / np.abs(rep.points.z)) <= 1.6 + 1e-6


def test_classical():
    rep = verify_classical(flat_scenario(Polynomial((0, 0.5, 0.25))))
    assert rep.verdict == PASS
    assert rep.min_margin > 0
    z = rep.points.z
    np.testing.assert_allclose(rep.points.rho_f, np.abs(z / 2 + z**2 / 4), rtol=1e-15, atol=1e-16)
    rows = rep.extras["liouville"]
    assert [r["scale"] for r in rows] == [10, 100, 1000]
    assert all(r["ok"] for r in rows)
    assert rows[0]["sup_on_fixed_disk"] > rows[1]["sup_on_fixed_disk"] > rows[2]["sup_on_fixed_disk"]


def test_classical_equality_and_power():
    rep = verify_classical(flat_scenario(RotationScale(cmath.exp(0.4j) * 0.5), r1=2.0))
    assert max(abs(rep.min_margin), abs(rep.max_margin)) < 1e-12
    rep = verify_classical(flat_scenario(Power(2)))
    assert rep.verdict == PASS


def test_classical_expansion_is_a_hypothesis_failure():
    # a map obeying |f| <= R2 can never break the bound, so an expanding map
    # shows up as an image leaving the target disk
    rep = verify_classical(flat_scenario(RotationScale(1.1)))
    assert rep.verdict == HYPOTHESIS_VIOLATED
    assert not rep.hypotheses["image_in_target_disk"].passed
    assert rep.min_margin < 0


# -- corollaries -------------------------------------------------------------------------------


def test_center_norm():
    assert check_center_norm(hyp_scenario(Power(2))).value == 0.0
    assert check_center_norm(hyp_scenario(RotationScale(cmath.exp(2j)))).value == pytest.approx(1.0, abs=1e-14)
    v = check_center_norm(hyp_scenario(Composition((Blaschke(0.4), MoebiusDisk(-0.4, 1.0))), radius=0.6))
    assert 0.0 <= v.value <= 1.0 + 1e-12 and v.passed


def test_boundary_stretch_power2():
    s = flat_scenario(Power(2))
    rec = check_boundary_stretch(s, [1.0]).records[0]
    assert rec.status == PASS
    assert rec.derivative_abs == pytest.approx(2.0, abs=1e-9)
    assert rec.sharp_bound == pytest.approx(2.0, abs=1e-9)
    assert rec.norm == pytest.approx(2.0, abs=1e-12)
    assert rec.radial_quotient == pytest.approx(2.0, abs=1e-5)


def test_boundary_stretch_other_maps():
    rec = check_boundary_stretch(flat_scenario(Power(3)), [1.0]).records[0]
    assert rec.derivative_abs == pytest.approx(3.0) and rec.sharp_bound == pytest.approx(2.0)
    assert rec.status == PASS
    rec = check_boundary_stretch(flat_scenario(Identity()), [1j]).records[0]
    assert rec.status == PASS and rec.derivative_abs == 1.0


def test_boundary_precondition():
    rep = check_boundary_stretch(flat_scenario(Power(2)), [0.5])
    assert rep.records[0].status == "PRECONDITION_FAILED"
    assert not rep.passed


def test_boundary_hyperbolic():
    # a Blaschke product maps |z| = r onto a circle of the same hyperbolic radius only
    # when it is a rotation; use the rotation to exercise the non-flat branch
    s = hyp_scenario(RotationScale(cmath.exp(0.5j)), radius=0.8)
    rec = check_boundary_stretch(s, [0.8]).records[0]
    assert rec.status == PASS
    assert rec.sharp_bound is None
    assert rec.norm == pytest.approx(1.0, abs=1e-12)


# -- subharmonicity -------------------------------------------------------------------------


def test_subharmonic_rotation():
    sub = check_subharmonicity(hyp_scenario(RotationScale(cmath.exp(0.2j))))
    assert np.nanmax(np.abs(sub.u)) < 1e-8
    assert np.nanmax(np.abs(sub.laplacian)) < 1e-4
    assert sub.passed


def test_subharmonic_power():
    sub = check_subharmonicity(hyp_scenario(Power(2)))
    z = Grid().points(0.9)
    np.testing.assert_allclose(sub.u, np.log(np.abs(z)), atol=1e-9)
    assert sub.min_laplacian >= -1e-4
    assert sub.center_behaviour == "tends to -inf"
    assert sub.passed


def test_subharmonic_polynomial():
    sub = check_subharmonicity(flat_scenario(Polynomial((0, 0.5, 0.25))))
    assert sub.passed
    assert sub.interior_max <= sub.boundary_max + 1e-6
    assert sub.center_behaviour == "bounded"


def test_subharmonic_interior_zero_is_excluded():
    # B_{0.3}(z)**2 = 0.09 at z = 0 and at z = 0.6 / 1.09; u -> -inf there
    f = Composition((Blaschke(0.3), Power(2), MoebiusDisk(0.09)))
    s = Scenario(rm.poincare(), 0.8, ConformalSurface.curvature_scaled(2.0), f)
    sub = check_subharmonicity(s)
    assert sub.passed
    assert sub.min_laplacian >= -1e-4


def test_subharmonic_fails_for_sphere():
    s = Scenario(rm.euclidean(), 10.0, ConformalSurface.spherical(10.0), Identity())
    sub = check_subharmonicity(s)
    assert not sub.passed
    assert sub.min_laplacian < -0.1


# -- Laplacian comparison ---------------------------------------------------------------------


def test_laplacian_comparison_flat_domain():
    res = check_laplacian_comparison(rm.euclidean(), -1.0, 3.0)
    c = res.rho
    np.testing.assert_allclose(res.margin, 1 / np.tanh(c) - 1 / c, atol=1e-8)
    assert res.verdict == PASS


def test_laplacian_comparison_scaled():
    res = check_laplacian_comparison(rm.poincare(), -4.0, 2.5)
    c = res.rho
    np.testing.assert_allclose(res.margin, 2 / np.tanh(2 * c) - 1 / np.tanh(c), atol=1e-6)
    assert res.min_margin >= 0


def test_laplacian_comparison_identical():
    res = check_laplacian_comparison(rm.poincare(), constant_profile(-1.0), 2.5)
    assert np.max(np.abs(res.margin)) < 1e-6


def test_laplacian_comparison_violation():
    res = check_laplacian_comparison(rm.poincare(), 0.0, 2.0)
    assert res.verdict == HYPOTHESIS_VIOLATED


# -- Ahlfors limit ------------------------------------------------------------------------------


def test_ahlfors_power():
    res = ahlfors_limit(Power(2), 0.5)
    b = res.bounds
    assert b[0] > b[1] > b[2] > math.log(3)
    assert res.monotone
    assert res.image == pytest.approx(math.log(5 / 3), abs=1e-12)
    assert all(st.verdict == PASS for st in res.stages)
    # the gap left at r0 is exactly the hyperbolic distance between z2 / r0 and z2
    for st in res.stages:
        exact = 2 * math.atanh(0.5 / st.r0) - math.log(3)
        assert st.gap == pytest.approx(exact, abs=1e-10)


def test_ahlfors_identity_tracks_rescaled_radius():
    res = ahlfors_limit(Identity(), 0.5)
    for st in res.stages:
        assert st.bound == pytest.approx(rm.poincare().geodesic_radius(0.5 / st.r0), abs=1e-12)
    assert res.bounds[-1] - math.log(3) < 2e-3


def test_ahlfors_automorphism():
    f = Composition((Blaschke(0.4), MoebiusDisk(-0.4, 1.0)))
    res = ahlfors_limit(f, 0.3)
    assert res.verdict == PASS
    assert abs(res.bounds[-1] - res.rho_hat) < 1e-3


def test_ahlfors_rejects_bad_sequence():
    with pytest.raises(DomainError):
        ahlfors_limit(Power(2), 0.95, (0.9, 0.99))
