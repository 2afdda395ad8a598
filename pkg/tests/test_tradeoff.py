from fractions import Fraction

import pytest

from privcache.tradeoff import (
    LinearBound,
    RatePoint,
    TradeoffCurve,
    companion_points,
    converse_bounds,
    converse_eval,
    lower_convex_envelope,
    scheme_points,
    tightness_report,
)

F = Fraction


def test_scheme_points_two_files_three_users():
    pts = {(p.memory, p.rate) for p in scheme_points(2, 3)}
    assert {(F(0), F(2)), (F(1, 4), F(3, 2)), (F(2, 3), F(1))} <= pts
    assert (F(2), F(0)) in pts  # r = 0 endpoint
    assert len(pts) == 5


def test_scheme_points_r_zero_endpoint():
    for n, k in [(2, 3), (3, 4), (5, 2)]:
        assert (scheme_points(n, k)[0].memory, scheme_points(n, k)[0].rate) == (n, 0)


def test_scheme_points_two_files_penultimate_split():
    # r = K-1 simplifies to (2/K, 2(K-1)/(K+1))
    for k in range(2, 9):
        p = scheme_points(2, k)[k - 1]
        assert (p.memory, p.rate) == (F(2, k), F(2 * (k - 1), k + 1))


def test_scheme_points_validation():
    with pytest.raises(ValueError):
        scheme_points(1, 3)
    with pytest.raises(ValueError):
        scheme_points(2, 0)


def test_companion_points_three_users():
    pts = [(p.memory, p.rate) for p in companion_points(3)]
    assert (F(2), F(0)) in pts
    assert (F(3, 2), F(1, 4)) in pts
    assert (F(1), F(2, 3)) in pts


def test_companion_point_general_form():
    # the r = K instance swaps to (2K/(K+1), 1/(K+1))
    for k in range(2, 8):
        pts = {(p.memory, p.rate) for p in companion_points(k)}
        assert (F(2 * k, k + 1), F(1, k + 1)) in pts


def test_companion_swap_is_involution():
    pts = scheme_points(2, 4)
    assert [p.swapped().swapped() for p in pts] == pts


def test_envelope_six_corners():
    env = lower_convex_envelope(scheme_points(2, 3) + companion_points(3))
    assert [(c.memory, c.rate) for c in env.corners] == [
        (F(0), F(2)),
        (F(1, 4), F(3, 2)),
        (F(2, 3), F(1)),
        (F(1), F(2, 3)),
        (F(3, 2), F(1, 4)),
        (F(2), F(0)),
    ]


def test_envelope_single_point():
    env = lower_convex_envelope([RatePoint(F(1), F(1))])
    assert env.corners == (RatePoint(F(1), F(1)),)
    assert env.value_at(F(1)) == 1


def test_envelope_discards_dominated_and_collinear_points():
    pts = [RatePoint(F(0), F(2)), RatePoint(F(2), F(0)), RatePoint(F(1), F(3, 2)), RatePoint(F(1), F(1))]
    env = lower_convex_envelope(pts)
    # (1, 3/2) is dominated; (1, 1) lies on the segment and is not a corner
    assert [(c.memory, c.rate) for c in env.corners] == [(F(0), F(2)), (F(2), F(0))]


def test_envelope_interpolation():
    env = lower_convex_envelope(scheme_points(2, 3) + companion_points(3))
    assert env.value_at(F(1, 2)) == F(3, 2) + (F(1, 2) - F(1, 4)) * (F(1) - F(3, 2)) / (F(2, 3) - F(1, 4))
    with pytest.raises(ValueError):
        env.value_at(F(5, 2))


def test_curve_invariants_enforced():
    with pytest.raises(ValueError):
        TradeoffCurve((RatePoint(F(0), F(1)), RatePoint(F(0), F(2))))  # M not increasing
    with pytest.raises(ValueError):
        TradeoffCurve((RatePoint(F(0), F(1)), RatePoint(F(1), F(2))))  # increasing rate
    with pytest.raises(ValueError):
        TradeoffCurve(
            (RatePoint(F(0), F(2)), RatePoint(F(1), F(3, 2)), RatePoint(F(2), F(0)))
        )  # concave kink: slope falls from -1/2 to -3/2


def test_converse_bounds_three_users():
    bounds = {(b.alpha, b.beta, b.gamma) for b in converse_bounds(3)}
    assert (F(12), F(12), F(20)) in bounds  # k=2, both mirrors coincide
    assert (F(20), F(24), F(36)) in bounds  # k=3
    assert (F(24), F(20), F(36)) in bounds  # k=3 mirrored
    assert (F(2), F(1), F(2)) in bounds and (F(1), F(2), F(2)) in bounds
    assert len(converse_bounds(3)) == 2 * 2 + 2


def test_converse_bounds_mirror_pairs():
    for k_users in (2, 3, 4, 5):
        bounds = converse_bounds(k_users)
        entropy = [b for b in bounds if b.label.startswith("entropy")]
        coeffs = {(b.alpha, b.beta) for b in entropy}
        assert all((beta, alpha) in coeffs for alpha, beta in coeffs)


def test_converse_bounds_validation():
    with pytest.raises(ValueError):
        converse_bounds(1)
    with pytest.raises(ValueError):
        LinearBound(F(1), F(-1), F(0))


def test_converse_eval_three_users():
    assert converse_eval(3, F(2, 3)) == 1
    assert converse_eval(3, 0) == 2
    assert converse_eval(3, 2) == 0
    with pytest.raises(ValueError):
        converse_eval(3, F(5, 2))


def test_tightness_three_users_everywhere():
    rows = tightness_report(3, F(1, 100))
    assert len(rows) == 201
    assert all(r.tight for r in rows)
    assert all(r.achievable == r.converse for r in rows)


def test_tightness_four_users_gap_region():
    rows = tightness_report(4, F(1, 100))
    for r in rows:
        assert r.achievable >= r.converse
        inside = F(1, 2) < r.memory < F(6, 5)
        assert r.tight == (not inside), r.memory


def test_tightness_two_users_everywhere():
    # the two-user curve is exact on all of [0, 2]
    rows = tightness_report(2, F(1, 50))
    assert all(r.tight for r in rows)


def test_tightness_grid_includes_endpoints():
    rows = tightness_report(3, F(1, 3))
    mems = [r.memory for r in rows]
    assert mems[0] == 0 and mems[-1] == 2


def test_tightness_step_validation():
    with pytest.raises(ValueError):
        tightness_report(3, 0)


def test_rate_point_validation():
    with pytest.raises(ValueError):
        RatePoint(F(-1), F(0))
