import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from zigzag_evasion.errors import DomainError, NonGenericScenario, ScenarioValidationError
from zigzag_evasion.evasion import slice_nerve
from zigzag_evasion.geometry import (Change, Intersection, Scenario, Trajectory, balls_intersect,
                                     check_fence_coverage, detect_events, intersection_margin, miniball,
                                     position_at)
from zigzag_evasion.scenarios import fence_only, fence_sensors, moving, square, static, two_sensor_cross

SQ3 = math.sqrt(3.0)


def traj(waypoints, radius=1.0, sid="s"):
    return Trajectory(sid, radius, False, tuple((t, tuple(p)) for t, p in waypoints))


# position_at

def test_position_midpoint():
    assert np.allclose(position_at(traj([(0, (0, 0)), (1, (2, 0))]), 0.5), (1, 0))


def test_position_third():
    assert np.allclose(position_at(traj([(0, (3, 0)), (1, (0, 0))]), 1 / 3), (2, 0))


@pytest.mark.parametrize("t", [0.0, 0.2, 0.77, 1.0])
def test_position_constant(t):
    assert np.array_equal(position_at(traj([(0, (0.3, 0.4)), (1, (0.3, 0.4))]), t), [0.3, 0.4])


def test_position_exact_at_waypoints():
    tr = traj([(0, (0, 0)), (0.3, (1, 2)), (1, (5, 5))])
    assert np.array_equal(position_at(tr, 0.3), [1, 2])


@pytest.mark.parametrize("t", [-0.01, 1.5])
def test_position_outside_unit_interval(t):
    with pytest.raises(DomainError):
        position_at(traj([(0, (0, 0)), (1, (1, 1))]), t)


def test_trajectory_needs_endpoints():
    with pytest.raises((DomainError, ScenarioValidationError)):
        traj([(0.1, (0, 0)), (1, (1, 1))])


def test_fence_must_not_move():
    with pytest.raises((DomainError, ScenarioValidationError)):
        Trajectory("f", 0.2, True, ((0.0, (0.0, 0.0)), (1.0, (0.1, 0.0))))


# miniball

def test_miniball_single_point():
    c, r = miniball([(0, 0)])
    assert np.allclose(c, (0, 0)) and r == 0


def test_miniball_pair():
    c, r = miniball([(0, 0), (2, 0)])
    assert np.allclose(c, (1, 0)) and abs(r - 1) < 1e-12


def test_miniball_equilateral():
    c, r = miniball([(0, 0), (2, 0), (1, SQ3)])
    assert np.allclose(c, (1, 1 / SQ3), atol=1e-12) and abs(r - 2 / SQ3) < 1e-12


def test_miniball_empty():
    with pytest.raises(DomainError):
        miniball([])


points = st.integers(1, 3).flatmap(lambda d: st.lists(
    st.lists(st.floats(-5, 5, allow_nan=False), min_size=d, max_size=d), min_size=1, max_size=8))


@given(points)
def test_miniball_matches_support_enumeration(pts):
    c, r = miniball(pts)
    _, rb = oracles.brute_miniball(pts)
    assert abs(r - rb) <= 1e-9 * max(1.0, rb)
    assert np.all(np.linalg.norm(np.asarray(pts) - c, axis=1) <= r + 1e-9)


@given(points, st.floats(0, 2 * math.pi), st.floats(-3, 3), st.floats(-3, 3))
def test_miniball_rigid_motion(pts, theta, tx, ty):
    P = np.asarray(pts, dtype=float)
    d = P.shape[1]
    R = np.eye(d)
    if d >= 2:
        R[:2, :2] = [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    shift = np.zeros(d)
    shift[0], shift[-1] = tx, ty
    assert abs(miniball(P)[1] - miniball(P @ R.T + shift)[1]) <= 1e-9 * max(1.0, miniball(P)[1])


# balls_intersect

def test_tangent_pair_marginal():
    assert balls_intersect([(0, 0), (2, 0)], [1, 1]) is Intersection.MARGINAL


def test_separated_pair():
    assert balls_intersect([(0, 0), (2, 0)], [0.9, 0.9]) is Intersection.NO


def test_equilateral_triple_pairs_yes_triple_no():
    C = [(0, 0), (2, 0), (1, SQ3)]
    assert balls_intersect(C, [1.1] * 3) is Intersection.NO
    for i, j in [(0, 1), (0, 2), (1, 2)]:
        assert balls_intersect([C[i], C[j]], [1.1, 1.1]) is Intersection.YES


def test_equilateral_margin_against_dense_grid():
    # dense grid minimum of max_j(|x - c_j| - r_j) over [-1, 3]^2, 801 points per axis: 0.056027681329474
    m = intersection_margin([(0, 0), (2, 0), (1, SQ3)], [1.1] * 3)
    assert 0 < m <= 0.056027681329474
    assert abs(m - (2 / SQ3 - 1.1)) < 1e-9


def test_mixed_radii_margin():
    # tangent from outside with radii 1 and 0.5 at distance 2: gap 0.5 split evenly -> 0.25
    assert abs(intersection_margin([(0, 0), (2, 0)], [1.0, 0.5]) - 0.25) < 1e-9
    assert balls_intersect([(0, 0), (2, 0)], [1.0, 1.2]) is Intersection.YES


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=2, max_size=4),
       st.lists(st.floats(0.2, 1.0), min_size=4, max_size=4))
def test_margin_against_dense_grid(centers, radii):
    radii = radii[:len(centers)]
    m = intersection_margin(centers, radii)
    ref = oracles.dense_min_f(centers, radii, -2.2, 2.2, n=441)
    # grid step 0.01: the grid minimum overshoots by at most the half-diagonal
    assert m <= ref + 1e-9
    assert ref - m <= 0.01


def test_mismatched_lengths():
    with pytest.raises(DomainError):
        balls_intersect([(0, 0), (1, 1)], [1.0])


# detect_events

def approach_scenario():
    a = static("a", (0.0, 0.0), 1.0)
    b = moving("b", [(0.0, (3.0, 0.0)), (1.0, (0.0, 0.0))], 1.0)
    return Scenario(2, (-2.0, -2.0), (5.0, 2.0), (a, b))


def test_single_added_edge():
    sch = detect_events(approach_scenario())
    assert len(sch.events) == 1
    e = sch.events[0]
    assert e.change is Change.ADDED and e.added == (("a", "b"),)
    assert abs(e.time - 1 / 3) < 1e-9
    assert sch.slice_times[0] == 0 and sch.slice_times[-1] == 1


def test_static_has_no_events():
    sch = detect_events(fence_only())
    assert sch.events == () and tuple(sch.slice_times) == (0.0, 1.0)


def test_crossing_roots():
    sc = two_sensor_cross()
    a, b = sc.sensors
    pa, pb = np.array(a.waypoints[0][1]), np.array(b.waypoints[0][1])
    va, vb = np.array(a.waypoints[1][1]) - pa, np.array(b.waypoints[1][1]) - pb
    roots = oracles.touching_roots(pa, va, pb, vb, a.radius + b.radius)
    sch = detect_events(sc)
    assert [e.change for e in sch.events] == [Change.ADDED, Change.REMOVED]
    for e, r in zip(sch.events, roots):
        assert abs(e.time - r) < 1e-9
    # closed form: 1/2 -+ sqrt(15)/16
    assert abs(roots[0] - (0.5 - math.sqrt(15) / 16)) < 1e-12


def test_one_event_per_interval():
    sch = detect_events(two_sensor_cross())
    s = sch.slice_times
    for e in sch.events:
        assert sum(s[i] < e.time < s[i + 1] for i in range(len(s) - 1)) == 1
    assert all(sum(s[i] < e.time < s[i + 1] for e in sch.events) == 1 for i in range(len(s) - 1))


def test_persistent_tangency_is_non_generic():
    a = moving("a", [(0.0, (0.0, 0.0)), (1.0, (1.0, 0.0))], 1.0)
    b = moving("b", [(0.0, (2.0, 0.0)), (1.0, (3.0, 0.0))], 1.0)
    with pytest.raises(NonGenericScenario):
        detect_events(Scenario(2, (-2.0, -2.0), (5.0, 2.0), (a, b)))


def random_linear_pair(seed):
    rng = np.random.default_rng(seed)
    while True:
        p0, p1 = rng.uniform(-3, 3, (2, 2))
        q0, q1 = rng.uniform(-3, 3, (2, 2))
        r0, r1 = rng.uniform(0.4, 1.2, 2)
        roots = oracles.touching_roots(p0, p1 - p0, q0, q1 - q0, r0 + r1)
        inside = [t for t in roots if 0.02 < t < 0.98]
        if len(inside) == len([t for t in roots if 0 <= t <= 1]) and (len(inside) < 2 or inside[1] - inside[0] > 0.02):
            a = moving("a", [(0.0, p0), (1.0, p1)], r0)
            b = moving("b", [(0.0, q0), (1.0, q1)], r1)
            return Scenario(2, (-4.0, -4.0), (4.0, 4.0), (a, b)), inside


@pytest.mark.parametrize("seed", range(12))
def test_random_linear_roots(seed):
    sc, roots = random_linear_pair(seed)
    sch = detect_events(sc)
    assert len(sch.events) == len(roots)
    for e, r in zip(sch.events, roots):
        assert abs(e.time - r) < 1e-6


@pytest.mark.parametrize("seed", range(6))
def test_dt_scan_refinement_invariant(seed):
    sc, _ = random_linear_pair(seed)
    a, b = detect_events(sc, dt_scan=2e-3), detect_events(sc, dt_scan=1e-3)
    assert [(e.change, e.added, e.removed) for e in a.events] == [(e.change, e.added, e.removed) for e in b.events]
    assert all(abs(x.time - y.time) < 1e-8 for x, y in zip(a.events, b.events))


def test_nerve_changes_exactly_by_event():
    sc = two_sensor_cross()
    sch = detect_events(sc)
    times = [0.0] + [e.time for e in sch.events] + [1.0]
    for k, e in enumerate(sch.events):
        eps = 0.5 * min(times[k + 1] - times[k], times[k + 2] - times[k + 1])
        before = {x for lv in slice_nerve(sc, e.time - eps).simplices for x in lv}
        after = {x for lv in slice_nerve(sc, e.time + eps).simplices for x in lv}
        assert after - before == set(e.added) and before - after == set(e.removed)


# fence coverage

def test_fence_coverage_ok():
    check_fence_coverage(fence_only())


def test_fence_gap_is_rejected():
    sensors = [s for s in fence_sensors() if s.sensor_id != fence_sensors()[1].sensor_id]
    with pytest.raises(ScenarioValidationError):
        check_fence_coverage(square(sensors))
