"""Placement solver: candidate enumeration, enclosing circle, full pipeline."""

import math

import numpy as np
import pytest

from dronecell.alpha import SolverConfig, find_alpha_star, gamma_value
from dronecell.channel import LinkBudget, environment_by_name, pathloss_db
from dronecell.coverage import (
    AltitudeBounds,
    InfeasiblePlacementError,
    Placement,
    PositionBox,
    brute_force_placement,
    max_coverage_disk,
    minimum_enclosing_circle,
    place_drone,
    shrink_radius,
    verify_placement,
)
from dronecell.scenario import DEFAULT_BOX

BIG_BOX = PositionBox(-1000.0, 1000.0, -1000.0, 1000.0)


def users_at(*coords):
    from dronecell.channel import UserLocation

    return [UserLocation(float(x), float(y)) for x, y in coords]


def random_users(rng, n, box):
    return users_at(*zip(rng.uniform(box.x_l, box.x_u, n), rng.uniform(box.y_l, box.y_u, n)))


def count_at(center, users, r_max, tol=1e-9):
    return sum(math.hypot(u.x - center[0], u.y - center[1]) <= r_max + tol for u in users)


# ---------------------------------------------------------------------------
# max_coverage_disk
# ---------------------------------------------------------------------------

def test_single_user_served_at_its_own_position():
    users = users_at((3.0, 4.0))
    for r_max in (0.0, 5.0):
        center, served = max_coverage_disk(users, r_max, BIG_BOX)
        assert center == (3.0, 4.0)
        assert served == (0,)


def test_two_users_on_lens_point():
    users = users_at((0.0, 0.0), (10.0, 0.0))
    center, served = max_coverage_disk(users, 5.0, BIG_BOX)
    assert served == (0, 1)
    assert center[0] == pytest.approx(5.0, abs=1e-9)
    assert center[1] == pytest.approx(0.0, abs=1e-9)


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(42)
    box = PositionBox(0.0, 30.0, 0.0, 30.0)
    for _ in range(40):
        n = int(rng.integers(3, 13))
        users = random_users(rng, n, box)
        r_max = float(rng.uniform(2.0, 12.0))
        _, served = max_coverage_disk(users, r_max, box)
        _, oracle_count = brute_force_placement(users, r_max, box, grid_step=0.5)
        assert len(served) == oracle_count


def test_never_beaten_by_independent_fine_grid():
    # grid-only search, no shared candidate enumeration
    rng = np.random.default_rng(7)
    box = PositionBox(0.0, 20.0, 0.0, 20.0)
    xs = np.arange(box.x_l, box.x_u + 0.025, 0.05)
    grid = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
    for _ in range(8):
        n = int(rng.integers(5, 16))
        users = random_users(rng, n, box)
        pts = np.array([[u.x, u.y] for u in users])
        r_max = float(rng.uniform(2.0, 6.0))
        d2 = ((grid[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        grid_best = int((d2 <= (r_max + 1e-9) ** 2).sum(1).max())
        _, served = max_coverage_disk(users, r_max, box)
        assert len(served) >= grid_best
        assert len(served) == grid_best  # fine grid reaches the optimal count here


def test_reported_served_set_is_consistent():
    rng = np.random.default_rng(5)
    users = random_users(rng, 15, BIG_BOX)
    center, served = max_coverage_disk(users, 300.0, BIG_BOX)
    for i in served:
        assert math.hypot(users[i].x - center[0], users[i].y - center[1]) <= 300.0 + 1e-9
    assert len(served) == count_at(center, users, 300.0)


def test_zero_radius_picks_most_frequent_coordinate():
    users = users_at((1.0, 1.0), (2.0, 2.0), (2.0, 2.0), (3.0, 3.0))
    center, served = max_coverage_disk(users, 0.0, BIG_BOX)
    assert center == (2.0, 2.0)
    assert served == (1, 2)


def test_zero_radius_single_out_of_box_user_projects():
    box = PositionBox(0.0, 10.0, 0.0, 10.0)
    users = users_at((15.0, 5.0))
    center, served = max_coverage_disk(users, 0.0, box)
    assert center == (10.0, 5.0)
    assert served == ()


def test_out_of_box_users_remain_coverable():
    box = PositionBox(-100.0, 100.0, -100.0, 100.0)
    users = users_at((200.0, 0.0), (210.0, 10.0), (190.0, -5.0))
    center, served = max_coverage_disk(users, 150.0, box)
    assert box.contains(*center)
    assert served == (0, 1, 2)


def test_input_validation():
    with pytest.raises(ValueError):
        max_coverage_disk([], 10.0, BIG_BOX)
    with pytest.raises(ValueError):
        max_coverage_disk(users_at((0, 0)), -1.0, BIG_BOX)
    with pytest.raises(ValueError):
        brute_force_placement(users_at((0, 0)), 1.0, BIG_BOX, grid_step=0.0)
    with pytest.raises(ValueError):
        PositionBox(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        AltitudeBounds(h_l=5.0, h_u=1.0)


def test_count_monotone_in_radius():
    rng = np.random.default_rng(9)
    users = random_users(rng, 20, BIG_BOX)
    last = 0
    for r_max in (10.0, 50.0, 150.0, 400.0, 1500.0):
        _, served = max_coverage_disk(users, r_max, BIG_BOX)
        assert len(served) >= last
        last = len(served)


def test_oracle_refinement_never_decreases_count():
    rng = np.random.default_rng(13)
    box = PositionBox(0.0, 40.0, 0.0, 40.0)
    users = random_users(rng, 12, box)
    _, coarse = brute_force_placement(users, 6.0, box, grid_step=4.0)
    _, fine = brute_force_placement(users, 6.0, box, grid_step=1.0)
    assert fine >= coarse


def test_translation_equivariance():
    rng = np.random.default_rng(21)
    box = PositionBox(0.0, 50.0, 0.0, 50.0)
    users = random_users(rng, 12, box)
    dx, dy = 500.0, -250.0
    moved_box = PositionBox(box.x_l + dx, box.x_u + dx, box.y_l + dy, box.y_u + dy)
    moved_users = users_at(*((u.x + dx, u.y + dy) for u in users))
    c0, s0 = max_coverage_disk(users, 9.0, box)
    c1, s1 = max_coverage_disk(moved_users, 9.0, moved_box)
    assert s0 == s1
    assert c1[0] - c0[0] == pytest.approx(dx, abs=1e-6)
    assert c1[1] - c0[1] == pytest.approx(dy, abs=1e-6)


# ---------------------------------------------------------------------------
# minimum enclosing circle / shrink_radius
# ---------------------------------------------------------------------------

def brute_force_mec(pts):
    """Smallest circle over all single/pair/triple-defined candidates."""
    pts = [tuple(map(float, p)) for p in pts]
    best = None

    def contains_all(c):
        return all(math.hypot(p[0] - c[0], p[1] - c[1]) <= c[2] * (1 + 1e-12) for p in pts)

    for p in pts:
        c = (p[0], p[1], 0.0)
        if contains_all(c) and (best is None or c[2] < best[2]):
            best = c
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            cx = (pts[i][0] + pts[j][0]) / 2
            cy = (pts[i][1] + pts[j][1]) / 2
            r = max(math.hypot(cx - pts[i][0], cy - pts[i][1]),
                    math.hypot(cx - pts[j][0], cy - pts[j][1]))
            c = (cx, cy, r)
            if contains_all(c) and (best is None or r < best[2]):
                best = c
            for k in range(j + 1, len(pts)):
                a, b, q = pts[i], pts[j], pts[k]
                d = 2 * (a[0] * (b[1] - q[1]) + b[0] * (q[1] - a[1]) + q[0] * (a[1] - b[1]))
                if d == 0:
                    continue
                ux = ((a[0] ** 2 + a[1] ** 2) * (b[1] - q[1]) + (b[0] ** 2 + b[1] ** 2) * (q[1] - a[1])
                      + (q[0] ** 2 + q[1] ** 2) * (a[1] - b[1])) / d
                uy = ((a[0] ** 2 + a[1] ** 2) * (q[0] - b[0]) + (b[0] ** 2 + b[1] ** 2) * (a[0] - q[0])
                      + (q[0] ** 2 + q[1] ** 2) * (b[0] - a[0])) / d
                r = max(math.hypot(ux - p[0], uy - p[1]) for p in (a, b, q))
                c = (ux, uy, r)
                if contains_all(c) and (best is None or r < best[2]):
                    best = c
    return best


def test_enclosing_circle_simple_cases():
    assert minimum_enclosing_circle([(2.0, 3.0)]) == (2.0, 3.0, 0.0)
    cx, cy, r = minimum_enclosing_circle([(0.0, 0.0), (4.0, 0.0)])
    assert (cx, cy, r) == (2.0, 0.0, 2.0)
    cx, cy, r = minimum_enclosing_circle([(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)])
    assert (cx, cy) == pytest.approx((1.0, 0.0), abs=1e-12)
    assert r == pytest.approx(1.0, rel=1e-12)


def test_enclosing_circle_collinear_points():
    cx, cy, r = minimum_enclosing_circle([(0.0, 0.0), (1.0, 1.0), (5.0, 5.0), (3.0, 3.0)])
    assert (cx, cy) == pytest.approx((2.5, 2.5), abs=1e-9)
    assert r == pytest.approx(2.5 * math.sqrt(2.0), rel=1e-12)


def test_enclosing_circle_matches_brute_force():
    rng = np.random.default_rng(77)
    for _ in range(30):
        n = int(rng.integers(1, 13))
        pts = rng.uniform(-100.0, 100.0, (n, 2))
        cx, cy, r = minimum_enclosing_circle(pts)
        oracle = brute_force_mec(pts)
        assert r == pytest.approx(oracle[2], rel=1e-9, abs=1e-9)
        assert all(math.hypot(p[0] - cx, p[1] - cy) <= r * (1 + 1e-9) + 1e-9 for p in pts)


def test_enclosing_circle_order_independent():
    rng = np.random.default_rng(123)
    pts = rng.uniform(0.0, 50.0, (9, 2)).tolist()
    reference = minimum_enclosing_circle(pts)
    for _ in range(5):
        rng.shuffle(pts)
        assert minimum_enclosing_circle(pts) == reference


def test_shrink_single_user_gives_zero_radius():
    (cx, cy), r = shrink_radius(users_at((7.0, -2.0)))
    assert (cx, cy, r) == (7.0, -2.0, 0.0)


def test_shrink_three_cocircular_users():
    (cx, cy), r = shrink_radius(users_at((0.0, 1.0), (1.0, 0.0), (0.0, -1.0)))
    assert (cx, cy) == pytest.approx((0.0, 0.0), abs=1e-12)
    assert r == pytest.approx(1.0, rel=1e-12)


def test_shrink_projects_center_into_box():
    box = PositionBox(1.0, 2.0, -10.0, 10.0)
    (cx, cy), r = shrink_radius(users_at((0.0, 5.0), (0.0, -5.0)), box=box, r_max=10.0,
                                fallback_center=(1.5, 0.0))
    assert (cx, cy) == (1.0, 0.0)
    assert r == pytest.approx(math.sqrt(26.0), rel=1e-12)


def test_shrink_keeps_fallback_when_projection_inflates_radius():
    box = PositionBox(0.0, 10.0, 0.0, 1.0)
    pts = users_at((0.0, 10.0), (10.0, 10.0))
    # projected center (5, 1) needs radius sqrt(25+81) ~ 10.30 > r_max
    (cx, cy), r = shrink_radius(pts, box=box, r_max=10.2, fallback_center=(4.0, 1.0))
    assert (cx, cy) == (4.0, 1.0)
    assert r == pytest.approx(math.hypot(6.0, 9.0), rel=1e-12)


def test_shrink_requires_nonempty_set():
    with pytest.raises(ValueError):
        shrink_radius([])


def test_shrink_leaves_a_user_on_the_edge():
    rng = np.random.default_rng(31)
    for _ in range(20):
        pts = rng.uniform(-500.0, 500.0, (int(rng.integers(2, 12)), 2))
        (cx, cy), r = shrink_radius(pts)
        dists = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        assert float(dists.max()) <= r + 1e-9
        assert float(dists.max()) >= r - 1e-6


# ---------------------------------------------------------------------------
# place_drone / verify_placement
# ---------------------------------------------------------------------------

def setup_suburban(gamma_db=100.0):
    env = environment_by_name("suburban")
    budget = LinkBudget.for_environment(env, gamma_db, 2.5e9)
    return env, budget


def test_generous_threshold_serves_everyone():
    rng = np.random.default_rng(2)
    users = random_users(rng, 40, DEFAULT_BOX)
    env, budget = setup_suburban(125.0)
    placement = place_drone(users, env, budget, DEFAULT_BOX)
    assert placement.served_count == 40
    assert verify_placement(placement, users, env, budget, DEFAULT_BOX)


def test_suburban_beats_highrise_on_same_instance():
    rng = np.random.default_rng(3)
    users = random_users(rng, 25, DEFAULT_BOX)
    env_s, budget_s = setup_suburban(100.0)
    env_h = environment_by_name("highrise-urban")
    budget_h = LinkBudget.for_environment(env_h, 100.0, 2.5e9)
    p_s = place_drone(users, env_s, budget_s, DEFAULT_BOX)
    p_h = place_drone(users, env_h, budget_h, DEFAULT_BOX)
    assert p_s.served_count >= p_h.served_count
    assert p_s.radius > p_h.radius


def test_altitude_is_ratio_times_radius():
    rng = np.random.default_rng(4)
    users = random_users(rng, 15, DEFAULT_BOX)
    env, budget = setup_suburban()
    placement = place_drone(users, env, budget, DEFAULT_BOX)
    assert not placement.altitude_clamped
    assert not placement.radius_floor_applied
    assert placement.h == pytest.approx(placement.alpha_star * placement.radius, rel=1e-9)


def test_served_count_monotone_in_threshold():
    rng = np.random.default_rng(6)
    users = random_users(rng, 30, DEFAULT_BOX)
    env = environment_by_name("urban")
    counts = []
    for gamma_db in (90.0, 100.0, 125.0):
        budget = LinkBudget.for_environment(env, gamma_db, 2.5e9)
        counts.append(place_drone(users, env, budget, DEFAULT_BOX).served_count)
    assert counts == sorted(counts)


def test_infeasible_altitude_floor_is_reported():
    users = users_at((0.0, 0.0), (10.0, 10.0))
    env, budget = setup_suburban()
    bounds = AltitudeBounds(h_l=1.0e6, h_u=2.0e6)
    with pytest.raises(InfeasiblePlacementError) as exc:
        place_drone(users, env, budget, DEFAULT_BOX, bounds)
    assert "h_l" in str(exc.value)


def test_altitude_ceiling_caps_radius():
    rng = np.random.default_rng(8)
    users = random_users(rng, 25, DEFAULT_BOX)
    env, budget = setup_suburban(125.0)
    bounds = AltitudeBounds(h_l=0.0, h_u=100.0)
    placement = place_drone(users, env, budget, DEFAULT_BOX, bounds)
    sol = find_alpha_star(env, budget)
    assert placement.radius <= bounds.h_u / sol.alpha_star + 1e-9
    assert placement.h <= bounds.h_u + 1e-9
    assert verify_placement(placement, users, env, budget, DEFAULT_BOX, bounds)


def test_altitude_floor_inflates_radius_and_flags():
    users = users_at((0.0, 0.0), (1.0, 0.0))
    env, budget = setup_suburban()
    bounds = AltitudeBounds(h_l=50.0, h_u=1000.0)
    placement = place_drone(users, env, budget, DEFAULT_BOX, bounds)
    assert placement.radius_floor_applied
    assert placement.radius == pytest.approx(bounds.h_l / placement.alpha_star, rel=1e-12)
    assert placement.h >= bounds.h_l - 1e-9
    assert placement.served == (0, 1)
    assert verify_placement(placement, users, env, budget, DEFAULT_BOX, bounds)


def test_served_users_pass_direct_channel_check():
    rng = np.random.default_rng(12)
    env, budget = setup_suburban(90.0)
    sol = find_alpha_star(env, budget)
    for _ in range(10):
        users = random_users(rng, 20, DEFAULT_BOX)
        placement = place_drone(users, env, budget, DEFAULT_BOX)
        for i in placement.served:
            r_i = math.hypot(users[i].x - placement.x_d, users[i].y - placement.y_d)
            # reduced form
            assert r_i <= placement.radius + 1e-9
            assert placement.radius**2 <= sol.gamma_at_star * (1 + 1e-12)
            # direct pathloss check at the reconstructed altitude
            if placement.h > 0 or r_i > 0:
                assert pathloss_db(env, budget, placement.h, r_i) <= budget.gamma_db + 1e-9


def test_place_drone_empty_users_raises():
    env, budget = setup_suburban()
    with pytest.raises(ValueError):
        place_drone([], env, budget, DEFAULT_BOX)


def test_verify_rejects_center_outside_box():
    env, budget = setup_suburban()
    placement = Placement(x_d=5000.0, y_d=0.0, h=100.0, radius=200.0, served=(),
                          served_count=0, alpha_star=0.37)
    assert not verify_placement(placement, [], env, budget, DEFAULT_BOX)


def test_verify_rejects_overheight_platform():
    env, budget = setup_suburban()
    sol = find_alpha_star(env, budget)
    radius = sol.max_radius
    users = users_at((radius, 0.0))
    tight = Placement(x_d=0.0, y_d=0.0, h=sol.alpha_star * radius, radius=radius,
                      served=(0,), served_count=1, alpha_star=sol.alpha_star)
    assert verify_placement(tight, users, env, budget, DEFAULT_BOX)
    too_high = Placement(x_d=0.0, y_d=0.0, h=1.5 * sol.alpha_star * radius, radius=radius,
                         served=(0,), served_count=1, alpha_star=sol.alpha_star)
    assert not verify_placement(too_high, users, env, budget, DEFAULT_BOX)


def test_placement_bookkeeping_validation():
    with pytest.raises(ValueError):
        Placement(x_d=0, y_d=0, h=1, radius=1, served=(0, 1), served_count=1, alpha_star=1.0)
    with pytest.raises(ValueError):
        Placement(x_d=0, y_d=0, h=1, radius=1, served=(1, 0), served_count=2, alpha_star=1.0)


def test_tie_break_is_deterministic_and_minimal_radius():
    # two symmetric optimal pairs; the tie-break must prefer the smaller
    # shrunken radius, then the lexicographically smaller center
    users = users_at((0.0, 0.0), (6.0, 0.0), (100.0, 0.0), (104.0, 0.0))
    center, served = max_coverage_disk(users, 3.0, BIG_BOX)
    # pair (100, 104) needs radius 2; pair (0, 6) needs radius 3
    assert served == (2, 3)
    results = {max_coverage_disk(users, 3.0, BIG_BOX)[0] for _ in range(3)}
    assert len(results) == 1
