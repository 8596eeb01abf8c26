import pytest
from hypothesis import given, settings, strategies as st

from hctree.activity import critical_activity
from hctree.dynamics import (
    NotConverged,
    OrbitKind,
    Regime,
    classify_orbit,
    contraction_data,
    cycle_scan,
    f_map,
    f_prime,
    fixed_point_data,
    g_map,
    solve_fixed_point,
    solve_two_cycle,
)

# frozen from the mpmath oracle in conftest.mp_cycle (40 digits)
XI_3 = 0.2879021759397297
XI_42 = 0.2439569798951293
CYCLE_42 = (0.15279581678676568, 0.37101370702275815)
THETA_42 = 0.9491486243775881
HOLDER_42 = 0.07529408259992876
XI_5 = 0.22326865972484233
CYCLE_5 = (0.07639320225002103, 0.523606797749979)
THETA_5 = 1.894427190999916


def test_f_map_examples():
    assert f_map(0.0, 7.3, 3) == 1.0
    assert f_map(0.25, 4.0, 2) == 0.25
    assert f_map(0.5, 2.0, 3) == 0.125


def test_f_map_rejects_negative():
    with pytest.raises(ValueError):
        f_map(-0.1, 4.0, 2)


def test_g_map_examples():
    assert g_map(0.25, 4.0, 2) == 0.25
    assert g_map(0.0, 4.0, 2) == pytest.approx(0.04, abs=1e-15)
    assert g_map(CYCLE_42[0], 4.2, 2) == pytest.approx(CYCLE_42[0], abs=1e-12)


@given(st.floats(0, 5), st.floats(0, 5), st.floats(0.1, 20), st.integers(2, 6))
def test_monotonicity(x, y, norm, k):
    if x == y:
        return
    x, y = min(x, y), max(x, y)
    if f_map(x, norm, k) == f_map(y, norm, k):
        return  # both underflow to the same float
    assert f_map(x, norm, k) > f_map(y, norm, k)
    assert g_map(x, norm, k) <= g_map(y, norm, k)


@pytest.mark.parametrize("norm, k, expected", [(4.0, 2, 0.25), (4.2, 2, XI_42), (5.0, 2, XI_5), (3.0, 2, XI_3)])
def test_solve_fixed_point_against_oracle(norm, k, expected):
    assert solve_fixed_point(norm, k) == pytest.approx(expected, abs=1e-11)


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("norm", [0.5, 1.0, "cr", 4.2, 5.0, 10.0])
def test_fixed_point_residual(norm, k):
    norm = critical_activity(k) if norm == "cr" else norm
    tol = 1e-12
    xi = solve_fixed_point(norm, k, tol)
    assert abs(xi * (1 + xi * norm) ** k - 1) <= tol


@pytest.mark.parametrize("norm, k", [(4.2, 2), (5.0, 2), (1.8, 3), (2.0, 3), (1.2, 4), (9.0, 2)])
def test_cycle_against_mpmath(norm, k, oracle):
    xi, cyc = oracle(norm, k)
    got = solve_two_cycle(norm, k)
    assert got == pytest.approx(cyc, abs=1e-10)
    a, b = got
    assert a < xi < b
    assert abs(f_map(a, norm, k) - b) <= 1e-10
    assert abs(f_map(b, norm, k) - a) <= 1e-10


def test_cycle_examples():
    assert solve_two_cycle(4.0, 2) is None
    assert solve_two_cycle(3.0, 2) is None
    assert solve_two_cycle(4.2, 2) == pytest.approx(CYCLE_42, abs=1e-10)
    assert solve_two_cycle(5.0, 2) == pytest.approx(CYCLE_5, abs=1e-10)


def test_near_critical_band_treated_as_critical():
    cr = critical_activity(3)
    assert solve_two_cycle(cr * (1 + 5e-10), 3) is None


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.floats(1.001, 6.0))
def test_cycle_exists_iff_supercritical(k, factor):
    norm = critical_activity(k) * factor
    cyc = solve_two_cycle(norm, k)
    assert cyc is not None
    a, b = cyc
    assert a < solve_fixed_point(norm, k) < b
    assert abs(f_map(b, norm, k) - a) <= 1e-10
    assert solve_two_cycle(critical_activity(k) / factor, k) is None


def test_contraction_examples():
    theta, holder, regime = contraction_data(4.2, 2, *CYCLE_42)
    assert theta == pytest.approx(THETA_42, rel=1e-9)
    assert holder == pytest.approx(HOLDER_42, rel=1e-8)
    assert regime is Regime.SUPERCRITICAL_CONTRACTIVE
    theta, holder, regime = contraction_data(5.0, 2, *CYCLE_5)
    assert theta == pytest.approx(THETA_5, rel=1e-9)
    assert holder is None
    assert regime is Regime.SUPERCRITICAL_NONCONTRACTIVE
    for norm, (a, b) in ((4.2, CYCLE_42), (5.0, CYCLE_5)):
        th = contraction_data(norm, 2, a, b)[0]
        assert (th < 1) == (norm * (b - a) < 1)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_tangency_at_critical(k):
    cr = critical_activity(k)
    xi = solve_fixed_point(cr, k)
    assert xi == pytest.approx(1 / (cr * (k - 1)), abs=1e-10)
    h = 1e-6
    fd = (f_map(xi + h, cr, k) - f_map(xi - h, cr, k)) / (2 * h)
    assert fd == pytest.approx(-1.0, abs=1e-8)
    assert f_prime(xi, cr, k) == pytest.approx(-k * cr * xi / (1 + xi * cr), rel=1e-14)


@pytest.mark.parametrize("k", [2, 3])
def test_theta_tends_to_one_over_k(k):
    fp = fixed_point_data(critical_activity(k) * 1.001, k)
    assert abs(fp.theta - 1 / k) <= 0.05


def test_fixed_point_data_json_keys():
    keys = ["k", "norm", "xi", "alpha_star", "beta_star", "theta", "holder", "regime"]
    assert list(fixed_point_data(4.2, 2).to_json()) == keys
    js = fixed_point_data(3.0, 2).to_json()
    assert js["regime"] == "subcritical" and js["alpha_star"] is None


def test_classify_examples():
    r = classify_orbit(0.9, 3.0, 2)
    assert r.kind is OrbitKind.CONVERGES_TO_XI
    assert r.even_limit == pytest.approx(XI_3, abs=1e-8)
    r = classify_orbit(0.1, 4.2, 2)
    assert r.kind is OrbitKind.EVEN_ALPHA_ODD_BETA
    assert (r.even_limit, r.odd_limit) == pytest.approx(CYCLE_42, abs=1e-8)
    r = classify_orbit(0.3, 4.2, 2)
    assert r.kind is OrbitKind.EVEN_BETA_ODD_ALPHA
    assert (r.odd_limit, r.even_limit) == pytest.approx(CYCLE_42, abs=1e-8)
    assert classify_orbit(1.0, 4.2, 2).kind is OrbitKind.EVEN_BETA_ODD_ALPHA


def test_classify_at_xi():
    assert classify_orbit(XI_42, 4.2, 2).kind is OrbitKind.CONVERGES_TO_XI


def test_classify_not_converged_near_critical():
    with pytest.raises(NotConverged):
        classify_orbit(0.9, 4.0, 2, tol=1e-14, max_steps=10_000)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 1.0), st.sampled_from([3.0, 4.2, 5.0]))
def test_classification_invariant_under_g(alpha0, norm):
    xi = solve_fixed_point(norm, 2)
    if abs(alpha0 - xi) < 1e-3:
        return
    assert classify_orbit(alpha0, norm, 2).kind is classify_orbit(g_map(alpha0, norm, 2), norm, 2).kind


def test_cycle_scan_examples():
    assert cycle_scan(3.0, 2) == {1}
    assert cycle_scan(4.2, 2) == {2}


@pytest.mark.parametrize("norm", [0.5, 2.0, 3.0, 4.0, 4.2, 5.0, 8.0, 20.0])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_cycle_scan_only_periods_one_and_two(norm, k):
    assert cycle_scan(norm, k, max_period=8) <= {1, 2}


def test_cycle_scan_rejects_small_max_period():
    with pytest.raises(ValueError):
        cycle_scan(3.0, 2, max_period=1)
