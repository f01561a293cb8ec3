"""Placement of the aerial base station over a fixed set of ground users.

After the altitude-to-radius ratio has been fixed at its optimum, the
remaining problem is purely geometric: put a disk of bounded radius, center
constrained to a rectangle, over as many users as possible. That problem is
solved exactly by enumerating the finitely many candidate centers where the
optimum must occur (user projections, pairwise circle intersections, circle
and rectangle-edge intersections, rectangle corners), then the winning disk
is shrunk to the minimum enclosing circle of the users it serves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .alpha import DEFAULT_CONFIG, SolverConfig, find_alpha_star
from .channel import Environment, LinkBudget, UserLocation, is_covered

# A user this close to the disk edge (meters) still counts as inside; pure
# float equality at the boundary would be unstable.
COVERAGE_TOL_M = 1e-9

# Relative slack for containment tests inside the enclosing-circle search.
_MEC_EPS = 1e-12


class InfeasiblePlacementError(Exception):
    """Raised when the altitude bounds leave no admissible coverage radius."""


@dataclass(frozen=True)
class PositionBox:
    """Axis-aligned rectangle of admissible horizontal platform positions."""

    x_l: float
    x_u: float
    y_l: float
    y_u: float

    def __post_init__(self) -> None:
        if self.x_l > self.x_u or self.y_l > self.y_u:
            raise ValueError(f"box bounds must be ordered, got {self}")

    def contains(self, x: float, y: float, tol: float = 0.0) -> bool:
        return (self.x_l - tol <= x <= self.x_u + tol
                and self.y_l - tol <= y <= self.y_u + tol)

    def project(self, x: float, y: float) -> tuple[float, float]:
        """Closest point of the rectangle to (x, y)."""
        return (min(max(x, self.x_l), self.x_u), min(max(y, self.y_l), self.y_u))


@dataclass(frozen=True)
class AltitudeBounds:
    """Admissible platform altitudes in meters; ``h_u`` may be infinite."""

    h_l: float = 0.0
    h_u: float = math.inf

    def __post_init__(self) -> None:
        if not 0 <= self.h_l <= self.h_u:
            raise ValueError(f"altitude bounds must satisfy 0 <= h_l <= h_u, got {self}")


@dataclass(frozen=True)
class Placement:
    """Solved platform position, altitude, radius and the users it serves."""

    x_d: float
    y_d: float
    h: float
    radius: float
    served: tuple[int, ...]
    served_count: int
    alpha_star: float
    altitude_clamped: bool = False
    radius_floor_applied: bool = False

    def __post_init__(self) -> None:
        if self.served_count != len(self.served):
            raise ValueError("served_count must equal the number of served indices")
        if list(self.served) != sorted(set(self.served)):
            raise ValueError("served indices must be sorted and unique")


def _as_xy(users: Sequence[UserLocation] | Iterable) -> np.ndarray:
    """Normalize users to an (n, 2) float array."""
    rows = [(u.x, u.y) if isinstance(u, UserLocation) else (u[0], u[1]) for u in users]
    return np.asarray(rows, dtype=float).reshape(-1, 2)


# ---------------------------------------------------------------------------
# Minimum enclosing circle (exact, deterministic input order)
# ---------------------------------------------------------------------------

def minimum_enclosing_circle(points) -> tuple[float, float, float]:
    """Smallest circle containing every point, as (cx, cy, radius).

    Incremental construction over a deduplicated, lexicographically sorted
    copy of the input, so the result never depends on caller ordering.

    Raises:
        ValueError: for an empty point set.
    """
    pts = sorted({(float(p[0]), float(p[1])) for p in np.asarray(points, dtype=float).reshape(-1, 2)})
    if not pts:
        raise ValueError("at least one point is required")
    circle = (pts[0][0], pts[0][1], 0.0)
    for i in range(1, len(pts)):
        if not _in_circle(circle, pts[i]):
            circle = _mec_one_anchor(pts[:i], pts[i])
    return circle


def _in_circle(circle: tuple[float, float, float], p: tuple[float, float]) -> bool:
    cx, cy, r = circle
    return math.hypot(p[0] - cx, p[1] - cy) <= r * (1.0 + _MEC_EPS)


def _mec_one_anchor(pts, anchor):
    circle = (anchor[0], anchor[1], 0.0)
    for i, q in enumerate(pts):
        if not _in_circle(circle, q):
            if circle[2] == 0.0:
                circle = _diameter_circle(anchor, q)
            else:
                circle = _mec_two_anchors(pts[: i + 1], anchor, q)
    return circle


def _mec_two_anchors(pts, p, q):
    base = _diameter_circle(p, q)
    best_left = None
    best_right = None
    for s in pts:
        if _in_circle(base, s):
            continue
        side = _cross(p, q, s)
        circum = _circumcircle(p, q, s)
        if circum is None:
            continue
        center_side = _cross(p, q, (circum[0], circum[1]))
        if side > 0.0 and (best_left is None or center_side > _cross(p, q, (best_left[0], best_left[1]))):
            best_left = circum
        elif side < 0.0 and (best_right is None or center_side < _cross(p, q, (best_right[0], best_right[1]))):
            best_right = circum
    if best_left is None and best_right is None:
        return base
    if best_left is None:
        return best_right
    if best_right is None:
        return best_left
    return best_left if best_left[2] <= best_right[2] else best_right


def _diameter_circle(p, q):
    cx = (p[0] + q[0]) / 2.0
    cy = (p[1] + q[1]) / 2.0
    r = max(math.hypot(cx - p[0], cy - p[1]), math.hypot(cx - q[0], cy - q[1]))
    return (cx, cy, r)


def _circumcircle(a, b, c):
    # Shift to the bounding-box midpoint before solving; keeps the 2x2 system
    # well conditioned for far-from-origin inputs.
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        return None
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
          + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
          + (cx * cx + cy * cy) * (bx - ax)) / d
    x, y = ux + ox, uy + oy
    r = max(math.hypot(x - a[0], y - a[1]),
            math.hypot(x - b[0], y - b[1]),
            math.hypot(x - c[0], y - c[1]))
    return (x, y, r)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


# ---------------------------------------------------------------------------
# Candidate enumeration and exact max-coverage solve
# ---------------------------------------------------------------------------

def _candidate_centers(pts: np.ndarray, r_max: float, box: PositionBox) -> np.ndarray:
    """Finite center set guaranteed to contain an optimal disk center.

    Any maximal-coverage region of the disk arrangement clipped to the box
    touches a user projection, a pairwise circle intersection, a
    circle/edge intersection, or a box corner; clipping every generated
    point into the box only ever adds harmless extra candidates.
    """
    lows = np.array([box.x_l, box.y_l])
    highs = np.array([box.x_u, box.y_u])
    chunks = [np.clip(pts, lows, highs),
              np.array([[box.x_l, box.y_l], [box.x_l, box.y_u],
                        [box.x_u, box.y_l], [box.x_u, box.y_u]])]

    if r_max > 0.0 and len(pts) > 1:
        i, j = np.triu_indices(len(pts), k=1)
        diff = pts[j] - pts[i]
        d = np.hypot(diff[:, 0], diff[:, 1])
        mask = (d > 0.0) & (d <= 2.0 * r_max)
        if mask.any():
            diff = diff[mask]
            d = d[mask]
            mid = (pts[i[mask]] + pts[j[mask]]) / 2.0
            half = np.sqrt(np.maximum(r_max * r_max - (d / 2.0) ** 2, 0.0))
            perp = np.column_stack([-diff[:, 1], diff[:, 0]]) / d[:, None]
            chunks.append(mid + half[:, None] * perp)
            chunks.append(mid - half[:, None] * perp)

    if r_max > 0.0:
        for edge_x in (box.x_l, box.x_u):
            dx = edge_x - pts[:, 0]
            hit = np.abs(dx) <= r_max
            if hit.any():
                dy = np.sqrt(np.maximum(r_max * r_max - dx[hit] ** 2, 0.0))
                ys = pts[hit, 1]
                xs = np.full(dy.shape, edge_x)
                chunks.append(np.column_stack([xs, ys + dy]))
                chunks.append(np.column_stack([xs, ys - dy]))
        for edge_y in (box.y_l, box.y_u):
            dy = edge_y - pts[:, 1]
            hit = np.abs(dy) <= r_max
            if hit.any():
                dx = np.sqrt(np.maximum(r_max * r_max - dy[hit] ** 2, 0.0))
                xs = pts[hit, 0]
                ys = np.full(dx.shape, edge_y)
                chunks.append(np.column_stack([xs + dx, ys]))
                chunks.append(np.column_stack([xs - dx, ys]))

    cands = np.clip(np.vstack(chunks), lows, highs)
    return np.unique(cands, axis=0)


def _coverage_matrix(cands: np.ndarray, pts: np.ndarray, r_max: float,
                     tol: float = COVERAGE_TOL_M) -> np.ndarray:
    """Boolean (candidates x users) matrix of who each center would serve."""
    limit = (r_max + tol) ** 2
    out = np.empty((len(cands), len(pts)), dtype=bool)
    # chunk to keep the distance matrix under ~16M doubles
    step = max(1, int(2e7) // max(1, len(pts)))
    for s in range(0, len(cands), step):
        block = cands[s:s + step]
        d2 = (block[:, None, 0] - pts[None, :, 0]) ** 2 + (block[:, None, 1] - pts[None, :, 1]) ** 2
        out[s:s + step] = d2 <= limit
    return out


def _shrunk_disk(points: np.ndarray, box: PositionBox, r_max: float,
                 fallback_center: tuple[float, float]) -> tuple[tuple[float, float], float]:
    """Tight disk over served points, with the center kept inside the box.

    Uses the minimum enclosing circle; if its center leaves the box, the
    projected center is used unless that inflates the radius past ``r_max``,
    in which case the original (in-box) solve center is kept.
    """
    if len(points) == 0:
        return (float(fallback_center[0]), float(fallback_center[1])), 0.0
    cx, cy, rho = minimum_enclosing_circle(points)
    if box.contains(cx, cy):
        return (cx, cy), rho
    px, py = box.project(cx, cy)
    rho_p = float(np.max(np.hypot(points[:, 0] - px, points[:, 1] - py)))
    if rho_p <= r_max + COVERAGE_TOL_M:
        return (px, py), rho_p
    fx, fy = float(fallback_center[0]), float(fallback_center[1])
    rho_f = float(np.max(np.hypot(points[:, 0] - fx, points[:, 1] - fy)))
    return (fx, fy), rho_f


def shrink_radius(
    served_users: Sequence[UserLocation] | Iterable,
    box: PositionBox | None = None,
    r_max: float = math.inf,
    fallback_center: tuple[float, float] | None = None,
) -> tuple[tuple[float, float], float]:
    """Shrink a winning disk to the served users, as (center, radius).

    Raises:
        ValueError: if the served set is empty.
    """
    pts = _as_xy(served_users)
    if len(pts) == 0:
        raise ValueError("served set must be nonempty")
    if box is None:
        cx, cy, rho = minimum_enclosing_circle(pts)
        return (cx, cy), rho
    if fallback_center is None:
        fallback_center = box.project(*minimum_enclosing_circle(pts)[:2])
    return _shrunk_disk(pts, box, r_max, fallback_center)


def max_coverage_disk(
    users: Sequence[UserLocation] | Iterable,
    r_max: float,
    box: PositionBox,
    tol: float = COVERAGE_TOL_M,
) -> tuple[tuple[float, float], tuple[int, ...]]:
    """Exact maximum-coverage disk center, as (center, served indices).

    Ties on the served count are broken by the smallest after-shrink radius,
    then the lexicographically smallest center, so equal inputs always give
    identical output no matter how candidates were enumerated.

    Raises:
        ValueError: for an empty user list or a negative radius.
    """
    pts = _as_xy(users)
    if len(pts) == 0:
        raise ValueError("at least one user is required")
    if r_max < 0:
        raise ValueError(f"radius bound must be nonnegative, got {r_max}")

    cands = _candidate_centers(pts, r_max, box)
    cover = _coverage_matrix(cands, pts, r_max, tol)
    counts = cover.sum(axis=1)
    best = int(counts.max())

    if best == 0:
        # nobody reachable: stand nearest the most frequent user coordinate
        coords: dict[tuple[float, float], int] = {}
        for x, y in pts:
            coords[(float(x), float(y))] = coords.get((float(x), float(y)), 0) + 1
        top = max(coords.values())
        modal = min(c for c, k in coords.items() if k == top)
        return box.project(*modal), ()

    winner_rows = np.flatnonzero(counts == best)
    groups: dict[tuple[int, ...], tuple[float, float]] = {}
    for row in winner_rows:
        served = tuple(int(i) for i in np.flatnonzero(cover[row]))
        center = (float(cands[row, 0]), float(cands[row, 1]))
        prev = groups.get(served)
        if prev is None or center < prev:
            groups[served] = center

    best_key = None
    best_served: tuple[int, ...] = ()
    best_center = (float(cands[0, 0]), float(cands[0, 1]))
    for served, center in groups.items():
        (sx, sy), rho = _shrunk_disk(pts[list(served)], box, r_max, center)
        key = (rho, sx, sy, center[0], center[1])
        if best_key is None or key < best_key:
            best_key = key
            best_served = served
            best_center = center
    return best_center, best_served


def brute_force_placement(
    users: Sequence[UserLocation] | Iterable,
    r_max: float,
    box: PositionBox,
    grid_step: float,
    tol: float = COVERAGE_TOL_M,
) -> tuple[tuple[float, float], int]:
    """Oracle for the exact solver: best center over a dense grid plus the
    full candidate enumeration, as (center, served count).

    Raises:
        ValueError: for a nonpositive grid step or empty user list.
    """
    if grid_step <= 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    pts = _as_xy(users)
    if len(pts) == 0:
        raise ValueError("at least one user is required")

    xs = np.arange(box.x_l, box.x_u + grid_step / 2.0, grid_step)
    ys = np.arange(box.y_l, box.y_u + grid_step / 2.0, grid_step)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    cands = np.vstack([grid, _candidate_centers(pts, r_max, box)])

    best_count = -1
    best_center = (float(cands[0, 0]), float(cands[0, 1]))
    limit = (r_max + tol) ** 2
    step = max(1, int(2e7) // max(1, len(pts)))
    for s in range(0, len(cands), step):
        block = cands[s:s + step]
        d2 = (block[:, None, 0] - pts[None, :, 0]) ** 2 + (block[:, None, 1] - pts[None, :, 1]) ** 2
        counts = (d2 <= limit).sum(axis=1)
        block_best = int(counts.max())
        if block_best < best_count:
            continue
        for row in np.flatnonzero(counts == block_best):
            center = (float(block[row, 0]), float(block[row, 1]))
            if block_best > best_count or center < best_center:
                best_count = block_best
                best_center = center
    return best_center, best_count


# ---------------------------------------------------------------------------
# Full placement pipeline
# ---------------------------------------------------------------------------

def _link_covered(env: Environment, budget: LinkBudget, h: float, r: float,
                  tol_db: float) -> bool:
    # zero-range link: the pathloss limit is met trivially as distance -> 0
    if h == 0.0 and r == 0.0:
        return True
    return is_covered(env, budget, h, r, tol_db)


def place_drone(
    users: Sequence[UserLocation],
    env: Environment,
    budget: LinkBudget,
    box: PositionBox,
    altitude_bounds: AltitudeBounds = AltitudeBounds(),
    config: SolverConfig = DEFAULT_CONFIG,
) -> Placement:
    """Full 3-D placement: serve as many users as possible, then use the
    smallest disk (and hence lowest altitude) that still serves them.

    The altitude bounds are folded into an admissible radius interval while
    the altitude-to-radius ratio stays at its optimum; an empty interval is
    reported as infeasible rather than silently re-optimized.

    Raises:
        ValueError: for an empty user list.
        InfeasiblePlacementError: when the altitude bounds admit no radius.
    """
    if len(users) == 0:
        raise ValueError("at least one user is required")

    sol = find_alpha_star(env, budget, config)
    a_star = sol.alpha_star

    cap = sol.max_radius
    if a_star > 0:
        if math.isfinite(altitude_bounds.h_u):
            cap = min(cap, altitude_bounds.h_u / a_star)
        floor = altitude_bounds.h_l / a_star
    else:
        if altitude_bounds.h_l > 0:
            raise InfeasiblePlacementError(
                f"altitude floor h_l={altitude_bounds.h_l} m cannot be met: the optimal "
                f"altitude-to-radius ratio is 0, pinning the altitude at 0 m"
            )
        floor = 0.0
    if floor > cap * (1.0 + 1e-12) + COVERAGE_TOL_M:
        binding = ("link-budget radius limit" if cap == sol.max_radius
                   else f"altitude ceiling h_u={altitude_bounds.h_u} m")
        raise InfeasiblePlacementError(
            f"altitude floor h_l={altitude_bounds.h_l} m requires radius "
            f">= {floor:.6g} m, above the maximum usable radius {cap:.6g} m "
            f"({binding})"
        )

    center, served = max_coverage_disk(users, cap, box)
    pts = _as_xy(users)
    if served:
        (sx, sy), rho = _shrunk_disk(pts[list(served)], box, cap, center)
    else:
        (sx, sy), rho = center, 0.0

    radius = rho
    floor_applied = False
    if radius < floor:
        radius = floor
        floor_applied = True

    h = a_star * radius
    clamped = False
    if h < altitude_bounds.h_l:
        h = altitude_bounds.h_l
        clamped = True
    elif h > altitude_bounds.h_u:
        h = altitude_bounds.h_u
        clamped = True

    return Placement(
        x_d=sx, y_d=sy, h=h, radius=radius,
        served=tuple(int(i) for i in served), served_count=len(served),
        alpha_star=a_star, altitude_clamped=clamped,
        radius_floor_applied=floor_applied,
    )


def verify_placement(
    placement: Placement,
    users: Sequence[UserLocation],
    env: Environment,
    budget: LinkBudget,
    box: PositionBox,
    altitude_bounds: AltitudeBounds = AltitudeBounds(),
    config: SolverConfig = DEFAULT_CONFIG,
) -> bool:
    """Re-check a placement against the raw pathloss threshold and bounds.

    Goes through the channel model directly (not the squared-radius
    shortcut) for every served user, and checks the position box, altitude
    bounds, and served-count bookkeeping.
    """
    if placement.served_count != len(placement.served):
        return False
    if not box.contains(placement.x_d, placement.y_d, tol=COVERAGE_TOL_M):
        return False
    if not (altitude_bounds.h_l - COVERAGE_TOL_M <= placement.h
            <= altitude_bounds.h_u + COVERAGE_TOL_M):
        return False
    pts = _as_xy(users)
    for i in placement.served:
        if not 0 <= i < len(pts):
            return False
        r_i = math.hypot(pts[i, 0] - placement.x_d, pts[i, 1] - placement.y_d)
        if r_i > placement.radius + COVERAGE_TOL_M:
            return False
        if not _link_covered(env, budget, placement.h, r_i, config.tol_db):
            return False
    return True
