"""Sensor trajectories, ball-intersection predicates and nerve event detection.

Balls are closed.  The intersection margin of a family of balls is

    m = min_x max_j (|x - c_j| - r_j),

negative when the balls share an interior point, zero at tangency and
positive when the family has empty intersection.  Every predicate in the
package is phrased through this number so that tangency can be reported
as MARGINAL instead of being silently rounded to a yes or a no.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.optimize import minimize_scalar
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, NonGenericScenario, ScenarioValidationError

MAX_DIMENSION = 8


class Field(str, Enum):
    RATIONAL = "rational"
    GF2 = "gf2"


class Intersection(str, Enum):
    YES = "YES"
    NO = "NO"
    MARGINAL = "MARGINAL"


class Change(str, Enum):
    ADDED = "ADDED"
    REMOVED = "REMOVED"
    MIXED = "MIXED"


# --------------------------------------------------------------------------
# Trajectories and scenarios
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-linear motion of one sensor ball over [0, 1]."""

    sensor_id: str
    radius: float
    fence: bool
    waypoints: tuple

    def __post_init__(self):
        wps = tuple((t, tuple(p)) for t, p in self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        where = f"sensor {self.sensor_id!r}"
        if not self.radius > 0:
            raise ScenarioValidationError("radius must be positive", where)
        if not wps:
            raise ScenarioValidationError("no waypoints", where)
        times = [t for t, _ in wps]
        if times[0] != 0 or times[-1] != 1:
            raise ScenarioValidationError("waypoints must start at t=0 and end at t=1", where)
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioValidationError("waypoint times must be strictly increasing", where)
        dims = {len(p) for _, p in wps}
        if len(dims) != 1:
            raise ScenarioValidationError("waypoints have inconsistent dimensions", where)
        if self.fence and any(p != wps[0][1] for _, p in wps):
            raise ScenarioValidationError("fence sensors must not move", where)
        if len(wps) == 1:
            raise ScenarioValidationError("need waypoints at both t=0 and t=1", where)

    @property
    def dimension(self) -> int:
        return len(self.waypoints[0][1])

    @property
    def times(self) -> np.ndarray:
        return np.array([float(t) for t, _ in self.waypoints])

    @property
    def points(self) -> np.ndarray:
        return np.array([[float(x) for x in p] for _, p in self.waypoints])

    @property
    def max_speed(self) -> float:
        t, p = self.times, self.points
        if len(t) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(np.diff(p, axis=0), axis=1) / np.diff(t)))


def position_at(traj: Trajectory, t):
    """Position of ``traj`` at time ``t`` by linear interpolation.

    Exact arithmetic is preserved when both the waypoints and ``t`` are
    ``Fraction`` values.
    """
    if not 0 <= t <= 1:
        raise DomainError(f"time {t} outside [0, 1]")
    wps = traj.waypoints
    for (t0, p0), (t1, p1) in zip(wps, wps[1:]):
        if t0 <= t <= t1:
            if t == t0:
                return p0
            if t == t1:
                return p1
            s = (t - t0) / (t1 - t0)
            return tuple(a + s * (b - a) for a, b in zip(p0, p1))
    return wps[-1][1]


@dataclass(frozen=True)
class Scenario:
    """Axis-aligned box domain patrolled by sensor balls over t in [0, 1]."""

    dimension: int
    domain_min: tuple
    domain_max: tuple
    sensors: tuple
    field: Field = Field.GF2
    grid: int | None = None  # suggested free-space resolution, if the author knows one

    def __post_init__(self):
        object.__setattr__(self, "domain_min", tuple(self.domain_min))
        object.__setattr__(self, "domain_max", tuple(self.domain_max))
        object.__setattr__(self, "sensors", tuple(self.sensors))
        object.__setattr__(self, "field", Field(self.field))
        if self.grid is not None and (not isinstance(self.grid, int) or isinstance(self.grid, bool) or self.grid < 2):
            raise ScenarioValidationError("must be an integer >= 2", "grid")
        d = self.dimension
        if not 2 <= d <= MAX_DIMENSION:
            raise ScenarioValidationError(f"dimension must be in [2, {MAX_DIMENSION}]", "dimension")
        if len(self.domain_min) != d or len(self.domain_max) != d:
            raise ScenarioValidationError("domain corners must have `dimension` coordinates", "domain")
        if any(hi <= lo for lo, hi in zip(self.domain_min, self.domain_max)):
            raise ScenarioValidationError("domain max must exceed min on every axis", "domain")
        ids = [s.sensor_id for s in self.sensors]
        if len(set(ids)) != len(ids):
            raise ScenarioValidationError("duplicate sensor ids", "sensors")
        for s in self.sensors:
            if s.dimension != d:
                raise ScenarioValidationError("waypoint dimension mismatch", f"sensor {s.sensor_id!r}")
            for t, p in s.waypoints:
                if any(x < lo - 1e-12 or x > hi + 1e-12 for x, lo, hi in zip(p, self.domain_min, self.domain_max)):
                    raise ScenarioValidationError(
                        f"waypoint at t={t} lies outside the domain", f"sensor {s.sensor_id!r}")

    @property
    def sensor_ids(self) -> tuple:
        return tuple(s.sensor_id for s in self.sensors)

    @property
    def radii(self) -> np.ndarray:
        return np.array([float(s.radius) for s in self.sensors])

    @property
    def lower(self) -> np.ndarray:
        return np.array([float(x) for x in self.domain_min])

    @property
    def upper(self) -> np.ndarray:
        return np.array([float(x) for x in self.domain_max])

    @property
    def speeds(self) -> np.ndarray:
        return np.array([s.max_speed for s in self.sensors])

    def positions(self, times) -> np.ndarray:
        """Sensor centers as an array of shape (len(times), n_sensors, d)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty((len(times), len(self.sensors), self.dimension))
        for j, s in enumerate(self.sensors):
            ts, ps = s.times, s.points
            for a in range(self.dimension):
                out[:, j, a] = np.interp(times, ts, ps[:, a])
        return out

    def waypoint_times(self) -> np.ndarray:
        return np.unique(np.concatenate([s.times for s in self.sensors] + [np.array([0.0, 1.0])]))

    def with_sensors(self, sensors) -> "Scenario":
        return Scenario(self.dimension, self.domain_min, self.domain_max, tuple(sensors), self.field, self.grid)


def check_fence_coverage(scenario: Scenario, resolution: float | None = None) -> None:
    """Raise unless the fence balls cover the domain boundary at every sample.

    The boundary is sampled on a regular grid of spacing ``resolution``
    (default: 1/256 of the largest extent in 2D, coarser in higher dimensions).
    """
    lo, hi = scenario.lower, scenario.upper
    d = scenario.dimension
    fences = [s for s in scenario.sensors if s.fence]
    if not fences:
        raise ScenarioValidationError("no fence sensors; the boundary is not covered", "sensors")
    centers = np.array([s.points[0] for s in fences])
    radii = np.array([s.radius for s in fences], dtype=float)
    extent = float(np.max(hi - lo))
    if resolution is None:
        resolution = extent / {2: 256, 3: 48}.get(d, 12)
    for axis in range(d):
        others = [a for a in range(d) if a != axis]
        axes = [np.linspace(lo[a], hi[a], max(2, int(math.ceil((hi[a] - lo[a]) / resolution)) + 1))
                for a in others]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d - 1)
        for value in (lo[axis], hi[axis]):
            pts = np.empty((len(mesh), d))
            pts[:, others] = mesh
            pts[:, axis] = value
            dist = np.linalg.norm(pts[:, None, :] - centers[None, :, :], axis=2) - radii[None, :]
            bad = np.min(dist, axis=1) > 0
            if np.any(bad):
                p = pts[np.argmax(bad)]
                raise ScenarioValidationError(
                    f"boundary point {tuple(np.round(p, 6))} is not covered by fence sensors", "sensors")


# --------------------------------------------------------------------------
# Smallest enclosing ball
# --------------------------------------------------------------------------


def _circumball(support: list) -> tuple:
    if not support:
        return None, -1.0
    p0 = support[0]
    if len(support) == 1:
        return p0.copy(), 0.0
    A = np.array([p - p0 for p in support[1:]])
    G = A @ A.T
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    lam = np.linalg.lstsq(G, rhs, rcond=None)[0]
    c = p0 + lam @ A
    return c, float(max(np.linalg.norm(c - p) for p in support))


def _welzl(pts: list, n: int, support: list, d: int, eps: float) -> tuple:
    if n == 0 or len(support) == d + 1:
        return _circumball(support)
    p = pts[n - 1]
    c, r = _welzl(pts, n - 1, support, d, eps)
    if c is not None and np.linalg.norm(p - c) <= r + eps:
        return c, r
    return _welzl(pts, n - 1, support + [p], d, eps)


def miniball(points) -> tuple:
    """Smallest enclosing ball of a nonempty point set, as ``(center, radius)``.

    Welzl's recursion over a fixed pseudo-random order, so results are
    reproducible.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    if not pts:
        raise DomainError("miniball of an empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DomainError("points have inconsistent dimensions")
    if d > MAX_DIMENSION:
        raise DomainError(f"dimension {d} exceeds {MAX_DIMENSION}")
    order = np.random.default_rng(0).permutation(len(pts))
    pts = [pts[i] for i in order]
    scale = max(1.0, max(float(np.max(np.abs(p))) for p in pts))
    c, r = _welzl(pts, len(pts), [], d, 1e-12 * scale)
    return c, r


# --------------------------------------------------------------------------
# Intersection margins
# --------------------------------------------------------------------------


def _batched_margin(centers: np.ndarray, radii: np.ndarray, want_point: bool = False):
    """Exact minimum of max_j(|x - c_j| - r_j) for a batch of ball families.

    ``centers`` has shape (T, k, d).  The minimizer is pinned by at most d+1
    active balls whose centers span an affine subspace containing it, so we
    solve the equal-offset system for every support subset and keep the best
    candidate value.
    """
    T, k, d = centers.shape
    radii = np.asarray(radii, dtype=float)
    best = np.full(T, np.inf)
    best_x = np.zeros((T, d)) if want_point else None

    def consider(x, valid):
        f = np.max(np.linalg.norm(centers - x[:, None, :], axis=2) - radii[None, :], axis=1)
        f = np.where(valid, f, np.inf)
        better = f < best
        best[better] = f[better]
        if want_point:
            best_x[better] = x[better]

    all_valid = np.ones(T, dtype=bool)
    for j in range(k):
        consider(centers[:, j, :], all_valid)
    for m in range(2, min(k, d + 1) + 1):
        for S in itertools.combinations(range(k), m):
            c0 = centers[:, S[0], :]
            A = centers[:, S[1:], :] - c0[:, None, :]
            r0 = radii[S[0]]
            rs = radii[list(S[1:])]
            G = 2.0 * np.einsum("tid,tjd->tij", A, A)
            b = np.einsum("tid,tid->ti", A, A) - rs[None, :] ** 2 + r0 ** 2
            u = np.broadcast_to(2.0 * (rs - r0), b.shape)
            scale = np.einsum("tii->t", G)
            det = np.linalg.det(G)
            ok = np.abs(det) > 1e-12 * np.maximum(scale, 1e-300) ** (m - 1)
            Gs = np.where(ok[:, None, None], G, np.eye(m - 1)[None])
            mu0 = np.linalg.solve(Gs, b[..., None])[..., 0]
            mu1 = np.linalg.solve(Gs, u[..., None])[..., 0]
            P = np.einsum("ti,tid->td", mu0, A)
            Q = np.einsum("ti,tid->td", mu1, A)
            a2 = np.einsum("td,td->t", Q, Q) - 1.0
            a1 = -2.0 * (np.einsum("td,td->t", P, Q) + r0)
            a0 = np.einsum("td,td->t", P, P) - r0 ** 2
            lin = np.abs(a2) < 1e-12
            disc = a1 ** 2 - 4.0 * a2 * a0
            disc_ok = disc >= -1e-12 * np.maximum(a1 ** 2, 1.0)
            sq = np.sqrt(np.maximum(disc, 0.0))
            with np.errstate(divide="ignore", invalid="ignore"):
                roots = [
                    np.where(lin, -a0 / np.where(a1 == 0, np.nan, a1), (-a1 + sq) / (2 * np.where(lin, 1.0, a2))),
                    np.where(lin, np.nan, (-a1 - sq) / (2 * np.where(lin, 1.0, a2))),
                ]
            for rho in roots:
                valid = ok & (lin | disc_ok) & np.isfinite(rho)
                valid &= (r0 + rho) >= -1e-12
                rho = np.where(valid, rho, 0.0)
                x = c0 + P - rho[:, None] * Q
                consider(x, valid)
    if want_point:
        return best, best_x
    return best


def minimax_margin(centers, radii) -> float:
    """Intersection margin of balls with arbitrary radii."""
    c = np.asarray(centers, dtype=float)
    if c.ndim != 2 or len(c) != len(radii) or len(c) == 0:
        raise DomainError("centers and radii must be nonempty lists of equal length")
    return float(_batched_margin(c[None], np.asarray(radii, dtype=float))[0])


def classify_margin(m: float, tol: float) -> Intersection:
    if m < -tol:
        return Intersection.YES
    if m > tol:
        return Intersection.NO
    return Intersection.MARGINAL


def intersection_margin(centers, radii) -> float:
    """Margin via miniball when radii agree, via support enumeration otherwise."""
    radii = [float(r) for r in radii]
    if len(centers) != len(radii) or not radii:
        raise DomainError("centers and radii must be nonempty lists of equal length")
    if all(r == radii[0] for r in radii):
        return miniball(centers)[1] - radii[0]
    return minimax_margin(centers, radii)


def balls_intersect(centers, radii, tol: float = 1e-9) -> Intersection:
    """Decide whether closed balls share a point, surfacing tangency as MARGINAL."""
    return classify_margin(intersection_margin(centers, radii), tol)


def pair_margins(pos: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """Closed-form pairwise margins; ``pos`` has shape (..., n, d)."""
    D = np.linalg.norm(pos[..., :, None, :] - pos[..., None, :, :], axis=-1)
    rsum = radii[:, None] + radii[None, :]
    rmin = np.minimum(radii[:, None], radii[None, :])
    return np.maximum((D - rsum) / 2.0, -rmin)


# --------------------------------------------------------------------------
# Nerve at a single time
# --------------------------------------------------------------------------


def _cliques(n: int, adjacent: np.ndarray, max_size: int) -> list:
    """All cliques of size 3..max_size in the graph given by ``adjacent``."""
    out = []
    nbrs = [set(np.nonzero(adjacent[i])[0].tolist()) for i in range(n)]

    def extend(clique, cand):
        for v in sorted(cand):
            new = clique + (v,)
            if len(new) >= 3:
                out.append(new)
            if len(new) < max_size:
                extend(new, {w for w in cand if w > v} & nbrs[v])

    for i in range(n):
        extend((i,), {w for w in nbrs[i] if w > i})
    return out


def simplex_margins_at(scenario: Scenario, t: float, max_size: int | None = None,
                       threshold: float = 0.0) -> dict:
    """Margins of every vertex subset whose pairs all have margin < threshold.

    Keys are index tuples into ``scenario.sensors``; singletons are omitted.
    """
    if max_size is None:
        max_size = scenario.dimension + 1
    pos = scenario.positions([t])[0]
    radii = scenario.radii
    n = len(radii)
    pm = pair_margins(pos, radii)
    out = {}
    for i, j in itertools.combinations(range(n), 2):
        out[(i, j)] = float(pm[i, j])
    adjacent = pm < threshold
    np.fill_diagonal(adjacent, False)
    for S in _cliques(n, adjacent, max_size):
        out[S] = float(_batched_margin(pos[list(S)][None], radii[list(S)])[0])
    return out


def clearance_at(scenario: Scenario, t: float, tol: float = 1e-9) -> float:
    """Width of the narrowest free passage or pocket at time t.

    Considered: gaps between disjoint balls, necks where two balls barely
    overlap (the width of their rim when the rim touches free space inside
    the domain), and pockets enclosed by families whose proper subfamilies
    all intersect (twice the margin).  Gaps whose midpoint lies deep inside
    another ball are ignored.

    A grid that closes a gap or opens a neck only changes the free
    components if it closes or breaks a cycle of the covered region.  Gaps
    are therefore taken in order of width and the first one whose balls are
    already joined (by overlaps or by narrower gaps) counts; necks are
    removed in order of width and the first one that is not a bridge counts.
    """
    pos = scenario.positions([t])[0]
    radii = scenario.radii
    n = len(radii)
    d = scenario.dimension
    pm = pair_margins(pos, radii)
    best = math.inf
    touching = pm < -tol
    np.fill_diagonal(touching, False)
    gaps, necks = [], []

    def covered_elsewhere(q, exclude, depth):
        dist = np.linalg.norm(pos - q, axis=1) - radii
        dist[list(exclude)] = np.inf
        return bool(np.min(dist) < -depth) if n > len(exclude) else False

    lo, hi = scenario.lower, scenario.upper

    def free_rim_point(q, exclude):
        if np.any(q < lo) or np.any(q > hi):
            return False
        dist = np.linalg.norm(pos - q, axis=1) - radii
        dist[list(exclude)] = np.inf
        return bool(np.min(dist) > tol) if n > len(exclude) else True

    for i, j in itertools.combinations(range(n), 2):
        m = pm[i, j]
        D = float(np.linalg.norm(pos[j] - pos[i]))
        if m < -tol and D > abs(radii[i] - radii[j]) + tol:
            u = (pos[j] - pos[i]) / D
            a = (D * D + radii[i] ** 2 - radii[j] ** 2) / (2 * D)
            rho = math.sqrt(max(radii[i] ** 2 - a * a, 0.0))
            c = pos[i] + a * u
            if d == 2:
                v = np.array([-u[1], u[0]])
                thin = all(free_rim_point(c + s * rho * v, (i, j)) for s in (1.0, -1.0))
            else:
                basis = np.linalg.svd(u[None, :])[2][1:]
                ang = np.linspace(0, 2 * np.pi, 16, endpoint=False)
                rim = c + rho * (np.cos(ang)[:, None] * basis[0] + np.sin(ang)[:, None] * basis[1])
                thin = any(free_rim_point(q, (i, j)) for q in rim)
            if thin:
                necks.append((2 * rho, i, j))
        if m > tol:
            gap = 2 * m
            u = (pos[j] - pos[i]) / D
            q = pos[i] + (radii[i] + gap / 2) * u
            if not covered_elsewhere(q, (i, j), gap / 2):
                gaps.append((gap, i, j))

    joined = DisjointSet(range(n))
    for i, j in zip(*np.nonzero(np.triu(touching))):
        joined.merge(int(i), int(j))
    for gap, i, j in sorted(gaps):
        if joined.connected(i, j):
            best = min(best, gap)
            break
        joined.merge(i, j)
    kept = touching.copy()
    for width, i, j in sorted(necks):
        kept[i, j] = kept[j, i] = False
        labels = connected_components(csr_matrix(kept), directed=False)[1]
        if labels[i] == labels[j]:
            best = min(best, width)
            break
    yes = pm < -tol
    np.fill_diagonal(yes, False)
    cl = _cliques(n, yes, d + 1)
    margins, points = {}, {}
    for S in cl:
        m, x = _batched_margin(pos[list(S)][None], radii[list(S)], want_point=True)
        margins[S], points[S] = float(m[0]), x[0]
    for S in cl:
        m = margins[S]
        if m <= tol:
            continue
        facets = [F for F in itertools.combinations(S, len(S) - 1) if len(F) > 2]
        if all(margins.get(F, math.inf) < -tol for F in facets):
            if not covered_elsewhere(points[S], S, m):
                best = min(best, 2 * m)
    return best


# --------------------------------------------------------------------------
# Event detection
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Event:
    time: float
    change: Change
    added: tuple = ()
    removed: tuple = ()

    @property
    def simplices(self) -> tuple:
        return tuple(sorted(self.added + self.removed))

    def to_json(self) -> dict:
        return {"time": self.time, "change": self.change.value,
                "added": [list(s) for s in self.added], "removed": [list(s) for s in self.removed]}


@dataclass(frozen=True)
class EventSchedule:
    events: tuple
    slice_times: tuple

    def __post_init__(self):
        s = self.slice_times
        if s[0] != 0.0 or s[-1] != 1.0:
            raise DomainError("slice times must start at 0 and end at 1")
        if self.events and len(s) != len(self.events) + 1:
            raise DomainError("need exactly one event between consecutive slice times")
        if not self.events and len(s) != 2:
            raise DomainError("without events the only slice times are 0 and 1")
        for e, a, b in zip(self.events, s, s[1:]):
            if not a < e.time < b:
                raise DomainError(f"event at {e.time} is not inside ({a}, {b})")

    @property
    def times(self) -> tuple:
        return tuple(e.time for e in self.events)

    def interval_events(self) -> list:
        """Events inside each interval between consecutive slice times."""
        return [[e for e in self.events if a < e.time < b] for a, b in zip(self.slice_times, self.slice_times[1:])]

    def to_json(self) -> dict:
        return {"events": [e.to_json() for e in self.events], "slice_times": list(self.slice_times)}


@dataclass
class _Root:
    time: float
    simplex: tuple
    added: bool


def _sample_times(scenario: Scenario, dt_scan: float) -> np.ndarray:
    n = max(2, int(math.ceil(1.0 / dt_scan)) + 1)
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, n), scenario.waypoint_times()]))


def candidate_simplices(scenario: Scenario, times: np.ndarray, pos: np.ndarray) -> list:
    """Vertex subsets (size 2..d+1) whose pairs all come close at some time.

    A pair is kept when its margin ever drops below the distance its
    sensors can travel in one sampling step; larger subsets must be
    cliques of kept pairs.
    """
    radii = scenario.radii
    n = len(radii)
    speeds = scenario.speeds
    h = float(np.max(np.diff(times))) if len(times) > 1 else 1.0
    pm = pair_margins(pos, radii)
    reach = (speeds[:, None] + speeds[None, :]) * h
    close = np.min(pm, axis=0) < reach + 1e-12
    np.fill_diagonal(close, False)
    out = [(i, j) for i, j in itertools.combinations(range(n), 2) if close[i, j]]
    out += [tuple(S) for S in _cliques(n, close, scenario.dimension + 1)]
    return out


def detect_events(scenario: Scenario, tol: float = 1e-9, dt_scan: float = 1e-3,
                  time_tol: float = 1e-9) -> EventSchedule:
    """Locate the finitely many times at which the Čech nerve changes.

    Each candidate simplex's margin is sampled at spacing ``dt_scan``; sign
    changes are bisected to ``time_tol``.  Between samples of equal sign a
    Lipschitz bound on the margin flags possible brief dips, which are then
    searched for explicitly.
    """
    times = _sample_times(scenario, dt_scan)
    pos = scenario.positions(times)
    radii = scenario.radii
    ids = scenario.sensor_ids
    speeds = scenario.speeds
    roots: list[_Root] = []
    for S in candidate_simplices(scenario, times, pos):
        idx = list(S)
        rs = radii[idx]
        if len(S) == 2:
            m = pair_margins(pos[:, idx, :], rs)[:, 0, 1]
        else:
            m = _batched_margin(pos[:, idx, :], rs)
        lip = float(np.max(speeds[idx]))
        name = tuple(sorted(ids[i] for i in S))

        def margin(t, idx=idx, rs=rs):
            return float(_batched_margin(scenario.positions([t])[:, idx, :], rs)[0])

        roots.extend(_scan_simplex(name, times, m, margin, lip, tol, time_tol))
    return _assemble_schedule(roots, tol, time_tol)


def _scan_simplex(name, times, m, margin, lip, tol, time_tol) -> list:
    s = np.where(m > tol, 1, np.where(m < -tol, -1, 0))
    if s[0] == 0 or s[-1] == 0:
        raise NonGenericScenario(f"simplex {name} is tangent at an endpoint of [0, 1]", simplex=name)
    zero_runs = np.nonzero((s[:-1] == 0) & (s[1:] == 0))[0]
    if len(zero_runs):
        k = int(zero_runs[0])
        raise NonGenericScenario(
            f"simplex {name} stays tangent over [{times[k]:.6g}, {times[k + 1]:.6g}]",
            simplex=name, interval=(float(times[k]), float(times[k + 1])))
    out = []
    nz = np.nonzero(s)[0]
    for a, b in zip(nz, nz[1:]):
        ta, tb = float(times[a]), float(times[b])
        if s[a] != s[b]:
            out.append(_Root(_bisect(margin, ta, tb, s[a], tol, time_tol), name, s[a] > 0))
            continue
        if b > a + 1:
            raise NonGenericScenario(f"simplex {name} touches tangency near t={times[a + 1]:.6g}",
                                     simplex=name, interval=(ta, tb))
        if abs(m[a]) + abs(m[b]) > lip * (tb - ta):
            continue
        sign = float(s[a])
        res = minimize_scalar(lambda t: sign * margin(t), bounds=(ta, tb), method="bounded",
                              options={"xatol": time_tol})
        ext = sign * res.fun
        if abs(ext) <= tol:
            raise NonGenericScenario(f"simplex {name} touches tangency near t={res.x:.6g}",
                                     simplex=name, interval=(ta, tb))
        if ext * sign < 0:
            tm = float(res.x)
            out.append(_Root(_bisect(margin, ta, tm, s[a], tol, time_tol), name, s[a] > 0))
            out.append(_Root(_bisect(margin, tm, tb, -s[a], tol, time_tol), name, s[a] < 0))
    return out


def _bisect(margin, a, b, sign_a, tol, time_tol) -> float:
    while b - a > time_tol:
        mid = 0.5 * (a + b)
        v = margin(mid)
        if abs(v) <= tol:
            return mid
        if (v > 0) == (sign_a > 0):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _assemble_schedule(roots: list, tol: float, time_tol: float) -> EventSchedule:
    roots.sort(key=lambda r: (r.time, r.simplex))
    merge = max(tol, 4 * time_tol)
    groups: list[list[_Root]] = []
    for r in roots:
        if r.time <= merge or r.time >= 1 - merge:
            raise NonGenericScenario(f"simplex {r.simplex} changes at the boundary time {r.time:.3g}",
                                     simplex=r.simplex)
        if groups and r.time - groups[-1][-1].time <= merge:
            groups[-1].append(r)
        else:
            groups.append([r])
    events = []
    for g in groups:
        added = tuple(sorted(r.simplex for r in g if r.added))
        removed = tuple(sorted(r.simplex for r in g if not r.added))
        if added and removed:
            change = Change.MIXED
        else:
            change = Change.ADDED if added else Change.REMOVED
        events.append(Event(float(np.mean([r.time for r in g])), change, added, removed))
    for e1, e2 in zip(events, events[1:]):
        if e2.time - e1.time <= merge:
            raise NonGenericScenario("events too close to separate", interval=(e1.time, e2.time))
    mids = [0.5 * (a.time + b.time) for a, b in zip(events, events[1:])]
    return EventSchedule(tuple(events), tuple([0.0] + mids + [1.0]))


def schedule_from_times(event_times: Iterable[float]) -> EventSchedule:
    """Schedule with placeholder ADDED events, for tests and diagnostics."""
    ev = [Event(float(t), Change.ADDED) for t in sorted(event_times)]
    mids = [0.5 * (a.time + b.time) for a, b in zip(ev, ev[1:])]
    return EventSchedule(tuple(ev), tuple([0.0] + mids + [1.0]))


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))
