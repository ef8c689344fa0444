"""Ready-made planar scenarios and a random generator."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import NonGenericScenario, ResourceBudgetExceeded
from .freespace import make_grid
from .geometry import Field, Scenario, Trajectory, check_fence_coverage, clearance_at, detect_events


def fence_sensors(lower=(0.0, 0.0), upper=(1.0, 1.0), spacing: float = 1 / 3, radius: float = 0.25,
                  prefix: str = "f") -> list:
    """Immobile sensors spaced along the boundary of a rectangle, corners included."""
    (x0, y0), (x1, y1) = lower, upper
    pts = []
    nx = max(1, math.ceil((x1 - x0) / spacing - 1e-9))
    ny = max(1, math.ceil((y1 - y0) / spacing - 1e-9))
    for i in range(nx + 1):
        x = x0 + (x1 - x0) * i / nx
        pts += [(x, y0), (x, y1)]
    for j in range(1, ny):
        y = y0 + (y1 - y0) * j / ny
        pts += [(x0, y), (x1, y)]
    pts.sort()
    return [static(f"{prefix}{k:02d}", p, radius, fence=True) for k, p in enumerate(pts)]


def static(sid: str, p, radius: float, fence: bool = False) -> Trajectory:
    p = tuple(float(x) for x in p)
    return Trajectory(sid, radius, fence, ((0.0, p), (1.0, p)))


def moving(sid: str, waypoints, radius: float) -> Trajectory:
    return Trajectory(sid, radius, False, tuple((float(t), tuple(float(x) for x in p)) for t, p in waypoints))


def square(sensors, lower=(0.0, 0.0), upper=(1.0, 1.0), fence: bool = True) -> Scenario:
    extra = fence_sensors(lower, upper) if fence else []
    return Scenario(2, tuple(lower), tuple(upper), tuple(extra + list(sensors)), Field.GF2)


def fence_only() -> Scenario:
    return square([])


def interior_ring(n: int = 8, center=(0.5, 0.5), ring: float = 0.13, radius: float = 0.065) -> list:
    cx, cy = center
    return [static(f"ring{k}", (cx + ring * math.cos(2 * math.pi * k / n), cy + ring * math.sin(2 * math.pi * k / n)),
                   radius) for k in range(n)]


def fence_with_ring() -> Scenario:
    """A closed ring of static sensors in the interior encloses a second free pocket."""
    return square(interior_ring())


def fence_with_blob() -> Scenario:
    return square([static("blob0", (0.5, 0.5), 0.08), static("blob1", (0.58, 0.5), 0.08)])


def wall(x: float, ys=(0.17, 0.33, 0.5, 0.67, 0.83), radius: float = 0.1, prefix: str = "w") -> list:
    return [static(f"{prefix}{k}", (x, y), radius) for k, y in enumerate(ys)]


def two_chambers() -> Scenario:
    """A static wall splits the interior into two chambers for all time."""
    return square(wall(0.5))


def _wall_pair(width: float, door: tuple | None = None) -> list:
    """Two balls stacked at y = 1/4 and 3/4 moving at constant speed from x = 0 to x = width.

    `door` = (y_offset, t_open, t_close, ramp) pushes the pair apart vertically
    during [t_open, t_close], leaving a gap between them.
    """
    if door is None:
        ts, ys = [0.0, 1.0], [[0.25, 0.25], [0.75, 0.75]]
    else:
        yo, t0, t1, ramp = door
        ts = [0.0, t0 - ramp, t0, t1, t1 + ramp, 1.0]
        ys = [[0.25, 0.25, yo, yo, 0.25, 0.25], [0.75, 0.75, 1 - yo, 1 - yo, 0.75, 0.75]]
    return [moving(f"w{k}", [(t, (width * t, y)) for t, y in zip(ts, ys[k])], 0.3) for k in range(2)]


def _wide_box(sensors, width: float = 2.0, grid: int | None = None) -> Scenario:
    fence = fence_sensors((0.0, 0.0), (width, 1.0), spacing=0.5, radius=0.3)
    return Scenario(2, (0.0, 0.0), (width, 1.0), tuple(fence + list(sensors)), Field.GF2, grid)


def sweeping_wall() -> Scenario:
    """A wall spanning bottom to top crosses a 2 x 1 box from left to right.

    Clearance dips to about 0.03 while the wall passes the fence, so the
    free space needs a 256-cell grid.
    """
    return _wide_box(_wall_pair(2.0), grid=256)


def reopening_door() -> Scenario:
    """The sweeping wall of `sweeping_wall`, except its two balls part mid-sweep."""
    return _wide_box(_wall_pair(2.0, door=(0.1, 0.4, 0.6, 0.1)), grid=256)


def subdivision() -> Scenario:
    """Two pockets that split and re-merge in a pattern no coarse slicing sees.

    Above a static floor, two mobile balls m0 and m1 each rest against a fence
    ball and close off a pocket.  Each one in turn retreats sideways, letting
    its pocket merge with the open region, and returns.  Sampled only at t = 0
    and t = 1 the free region looks like one chamber carried through, but the
    full event sequence leaves no continuous section.
    """
    H, rho = 1.3, 0.33
    yb = H - 0.57
    sxl, sxr, hy, dd = 0.12, 0.08, 0.12, 0.14
    base0, base1 = (0.25, yb), (0.75, yb)
    hl1, hr1, d1 = (0.75 - sxl, yb + hy), (0.75 + sxr, yb + hy), (0.75 + dd, yb)
    hl0, hr0, d0 = (0.25 + sxl, yb + hy), (0.25 - sxr, yb + hy), (0.25 - dd, yb)
    m1 = [(0, hl1), (0.05, hl1), (0.1, hr1), (0.15, hr1), (0.2, base1), (0.28, base1), (0.33, d1), (0.37, d1),
          (0.42, base1), (1, base1)]
    m0 = [(0, base0), (0.53, base0), (0.58, d0), (0.62, d0), (0.67, base0), (0.75, base0), (0.8, hr0), (0.85, hr0),
          (0.9, hl0), (1, hl0)]
    fence = fence_sensors((0.0, 0.0), (1.0, H), spacing=0.5, radius=0.3)
    sensors = fence + [static("floor", (0.5, 0.35), 0.5), moving("m0", m0, rho), moving("m1", m1, rho)]
    return Scenario(2, (0.0, 0.0), (1.0, H), tuple(sensors), Field.GF2, 128)


def two_sensor_cross() -> Scenario:
    """Two unit balls on crossing straight paths; no fence.

    Their separation is (4 - 8t, -0.5), so they touch at t = 1/2 -+ sqrt(15)/16.
    """
    return Scenario(2, (-3.0, -3.0), (3.0, 3.0), (
        moving("a", [(0, (-2.0, -2.0)), (1, (2.0, 2.0))], 1.0),
        moving("b", [(0, (2.0, -1.5)), (1, (-2.0, 2.5))], 1.0)), Field.GF2)


def slice_clearance_ok(scenario: Scenario, resolution: int, tol: float = 1e-9, dt_scan: float = 1e-3) -> bool:
    """True when the scenario is generic and every slice clears twice the cell diagonal."""
    try:
        schedule = detect_events(scenario, tol=tol, dt_scan=dt_scan)
    except NonGenericScenario:
        return False
    required = 2 * make_grid(scenario, resolution).diagonal
    return all(clearance_at(scenario, t, tol) > required for t in schedule.slice_times)


def _draw_movers(rng: np.random.Generator, n: int, radius, box, step: float) -> list:
    lo, hi = box
    sensors = []
    for k in range(n):
        m = int(rng.integers(2, 4))
        times = [0.0] + sorted(float(x) for x in rng.uniform(0.1, 0.9, size=m - 2)) + [1.0]
        p = rng.uniform(lo, hi, size=2)
        pts = [p]
        for _ in range(m - 1):
            p = np.clip(p + rng.uniform(-step, step, size=2), lo, hi)
            pts.append(p)
        sensors.append(moving(f"m{k}", list(zip(times, [tuple(q) for q in pts])), float(rng.uniform(*radius))))
    return sensors


def random_scenario(rng: np.random.Generator, n_mobile: int | None = None, resolution: int | None = None,
                    radius=(0.03, 0.07), box=(0.3, 0.7), step: float = 0.08, max_tries: int = 500) -> Scenario:
    """Twelve fence sensors on the unit square plus one to eight small wandering sensors.

    Each mobile sensor follows two or three waypoints, each within ``step``
    of the previous one per axis, inside ``box``.  With ``resolution``
    given, draws are repeated until the result is generic and clears the
    grid at every slice.
    """
    for _ in range(max_tries):
        n = int(rng.integers(1, 9)) if n_mobile is None else n_mobile
        sc = square(_draw_movers(rng, n, radius, box, step))
        if resolution is None:
            return sc
        if slice_clearance_ok(sc, resolution):
            return dataclasses.replace(sc, grid=resolution)
    raise ResourceBudgetExceeded(f"no clearance-passing draw in {max_tries} tries")


def random_door_scenario(rng: np.random.Generator, resolution: int = 256, max_tries: int = 100) -> Scenario:
    """The wide sweeping wall with a randomly timed door that may or may not open.

    The two wall balls separate to heights ``yo`` and ``1 - yo``; they stop
    touching (the door opens) only when ``yo`` drops below 0.2.
    """
    for _ in range(max_tries):
        yo = float(rng.uniform(0.08, 0.13) if rng.random() < 0.5 else rng.uniform(0.22, 0.25))
        t0 = float(rng.uniform(0.3, 0.45))
        t1 = t0 + float(rng.uniform(0.12, 0.3))
        sc = _wide_box(_wall_pair(2.0, door=(yo, t0, t1, 0.1)), grid=resolution)
        if slice_clearance_ok(sc, resolution):
            return sc
    raise ResourceBudgetExceeded(f"no clearance-passing door in {max_tries} tries")


def named_scenarios() -> dict:
    return {"fence_only": fence_only, "fence_with_ring": fence_with_ring, "fence_with_blob": fence_with_blob,
            "two_chambers": two_chambers, "sweeping_wall": sweeping_wall, "reopening_door": reopening_door,
            "subdivision": subdivision, "two_sensor_cross": two_sensor_cross}


__all__ = ["check_fence_coverage", "fence_only", "fence_with_ring", "fence_with_blob", "two_chambers",
           "sweeping_wall", "reopening_door", "subdivision", "two_sensor_cross", "random_scenario", "random_door_scenario",
           "slice_clearance_ok", "named_scenarios"]
