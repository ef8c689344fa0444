"""Grid approximation of the uncovered region and its connected components.

Cells are axis-aligned boxes; a cell is FREE when its center has distance
greater than ``tol`` from every sensor ball.  FREE cells that touch (along
a face, edge or corner) are joined, so narrow wedges where two balls cross
stay attached to the region they open onto.  Both false merges across thin covered necks and false splits
along thin free passages are ruled out by the clearance precondition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.ndimage import label as nd_label
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ClearanceTooSmall, DomainError
from .geometry import Scenario, clearance_at

COVERED, FREE, MARGINAL = 0, 1, 2


@dataclass(frozen=True, eq=False)
class Grid:
    lower: np.ndarray
    spacing: np.ndarray
    shape: tuple

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.spacing))

    @property
    def min_spacing(self) -> float:
        return float(np.min(self.spacing))

    @cached_property
    def _centers(self) -> np.ndarray:
        axes = [self.lower[a] + (np.arange(n) + 0.5) * self.spacing[a] for a, n in enumerate(self.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(self.shape))

    @cached_property
    def _pairs(self) -> np.ndarray:
        return neighbor_pairs(self.shape)

    def centers(self) -> np.ndarray:
        return self._centers.copy()

    def edges(self) -> list:
        """Pairs of flat indices of neighboring cells (sharing a face, edge or corner)."""
        return [self._pairs]

    def cell_of(self, point) -> int:
        """Flat index of the cell containing ``point`` (clamped to the grid)."""
        i = np.floor((np.asarray(point, dtype=float) - self.lower) / self.spacing).astype(int)
        i = np.clip(i, 0, np.array(self.shape) - 1)
        return int(np.ravel_multi_index(tuple(i), self.shape))


def neighbor_pairs(shape) -> np.ndarray:
    """Index pairs (a, b), a < b, of cells whose multi-indices differ by at most one per axis."""
    shape = tuple(shape)
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    out = []
    for off in itertools.product((-1, 0, 1), repeat=len(shape)):
        if not any(off) or next(o for o in off if o) < 0:
            continue
        src = tuple(slice(max(0, -o), n - max(0, o)) for o, n in zip(off, shape))
        dst = tuple(slice(max(0, o), n - max(0, -o)) for o, n in zip(off, shape))
        out.append(np.stack([idx[src].ravel(), idx[dst].ravel()], axis=1))
    return np.concatenate(out) if out else np.zeros((0, 2), dtype=int)


def make_grid(scenario: Scenario, resolution: int) -> Grid:
    """Grid with ``resolution`` cells along the longest axis and near-square cells."""
    if resolution < 1:
        raise DomainError("grid resolution must be positive")
    lo, hi = scenario.lower, scenario.upper
    ext = hi - lo
    target = float(np.max(ext)) / resolution
    shape = tuple(max(1, int(round(e / target))) for e in ext)
    return Grid(lo, ext / np.array(shape), shape)


@dataclass(frozen=True, eq=False)
class FreeComponents:
    """Labeled free cells of one time slice.

    ``labels`` is -1 on non-free cells and 0..count-1 otherwise, numbered by
    the smallest cell index in each component.  ``witness`` holds, per
    label, the center of the cell farthest from the covered region.
    """

    time: float
    grid: Grid
    status: np.ndarray
    margin: np.ndarray
    labels: np.ndarray
    count: int
    witness: np.ndarray
    edges: tuple

    def cells(self, label: int) -> np.ndarray:
        return np.nonzero(self.labels == label)[0]

    @property
    def sizes(self) -> list:
        return np.bincount(self.labels[self.labels >= 0], minlength=self.count).tolist()


def label_free(scenario: Scenario, grid: Grid, t: float, tol: float = 1e-9) -> FreeComponents:
    """Occupancy and connected components of the free cells at time t."""
    centers = grid._centers
    pos = scenario.positions([t])[0]
    radii = scenario.radii
    margin = np.full(grid.size, np.inf)
    for p, r in zip(pos, radii):
        np.minimum(margin, np.sqrt(np.sum((centers - p) ** 2, axis=1)) - r, out=margin)
    status = np.where(margin > tol, FREE, np.where(margin < -tol, COVERED, MARGINAL)).astype(np.int8)
    free = status == FREE
    pairs = grid._pairs
    edges = pairs[free[pairs[:, 0]] & free[pairs[:, 1]]]
    free_idx = np.nonzero(free)[0]
    labels = np.full(grid.size, -1, dtype=int)
    count = 0
    witness = np.zeros((0, len(grid.shape)))
    if len(free_idx):
        local = -np.ones(grid.size, dtype=int)
        local[free_idx] = np.arange(len(free_idx))
        m = len(free_idx)
        g = coo_matrix((np.ones(len(edges)), (local[edges[:, 0]], local[edges[:, 1]])), shape=(m, m))
        count, raw = connected_components(g, directed=False)
        first = np.full(count, m)
        np.minimum.at(first, raw, np.arange(m))
        order = np.argsort(first)
        rank = np.empty(count, dtype=int)
        rank[order] = np.arange(count)
        lab = rank[raw]
        # Fragments cut off in thin wedges where two spheres cross at a
        # shallow angle: every genuine component under the clearance
        # precondition has a cell center deeper than half a diagonal.
        depth = np.full(count, -np.inf)
        np.maximum.at(depth, lab, margin[free_idx])
        keep = depth > grid.diagonal / 2
        if not np.all(keep):
            new = np.cumsum(keep) - 1
            sel = keep[lab]
            free_idx, lab = free_idx[sel], new[lab[sel]]
            count = int(np.sum(keep))
        labels[free_idx] = lab
        # deepest cell per label; ties go to the smallest cell index
        by = np.lexsort((free_idx, -margin[free_idx], lab))
        starts = np.searchsorted(lab[by], np.arange(count))
        witness = centers[free_idx[by[starts]]].copy()
    return FreeComponents(float(t), grid, status, margin, labels, int(count), witness, (edges,))


def free_components(scenario: Scenario, t: float, resolution: int = 64, tol: float = 1e-9,
                    grid: Grid | None = None) -> FreeComponents:
    """Free components at time t after checking the grid resolves the free region."""
    grid = grid if grid is not None else make_grid(scenario, resolution)
    c = clearance_at(scenario, t, tol)
    required = 2 * grid.diagonal
    if c <= required:
        raise ClearanceTooSmall(
            f"clearance {c:.4g} at t={t:.6g} is not above twice the cell diagonal ({required:.4g})",
            clearance=c, required=required, time=t)
    return label_free(scenario, grid, t, tol)


def transport_steps(scenario: Scenario, grid: Grid, t_from: float, t_to: float) -> np.ndarray:
    """Times from t_from to t_to with sensor displacement at most half a cell per step."""
    vmax = float(np.max(scenario.speeds)) if len(scenario.sensors) else 0.0
    span = abs(t_to - t_from)
    n = 1 if vmax == 0 else max(1, int(math.ceil(span * vmax / (0.5 * grid.min_spacing))))
    return np.linspace(t_from, t_to, n + 1)


def transport_labels(scenario: Scenario, start: FreeComponents, end: FreeComponents,
                     tol: float = 1e-9) -> dict:
    """Follow each component of ``start`` through time to a component of ``end``.

    Intended for the direction in which the free region does not lose
    components; each label moves to the label it overlaps most at the next
    step.  Only followed labels are moved, so slivers that show up for a
    single step near an event are ignored.  A followed component that loses
    all its cells means the grid is too coarse, which is reported as
    ClearanceTooSmall.
    """
    grid = start.grid
    times = transport_steps(scenario, grid, start.time, end.time)
    current = {lab: lab for lab in range(start.count)}
    prev = start
    for k, t in enumerate(times[1:], start=1):
        nxt = end if k == len(times) - 1 else label_free(scenario, grid, float(t), tol)
        step_map = {}
        for lab in sorted(set(current.values())):
            cells = prev.cells(lab)
            hit = nxt.labels[cells]
            hit = hit[hit >= 0]
            if not len(hit):
                raise ClearanceTooSmall(
                    f"a free component vanished between t={prev.time:.6g} and t={nxt.time:.6g}", time=float(t))
            step_map[lab] = int(np.bincount(hit).argmax())
        current = {a: step_map[b] for a, b in current.items()}
        prev = nxt
    return current


def spacetime_components(scenario: Scenario, grid: Grid, t0: float, t1: float, tol: float = 1e-9) -> tuple:
    """Components of the free space-time region over [t0, t1], joined by overlap between steps.

    Returns (labels at t0 -> component id, labels at t1 -> component id).
    """
    times = transport_steps(scenario, grid, t0, t1)
    slices = [label_free(scenario, grid, float(t), tol) for t in times]
    offsets = np.cumsum([0] + [s.count for s in slices])
    total = int(offsets[-1])
    rows, cols = [], []
    for k in range(len(slices) - 1):
        a, b = slices[k], slices[k + 1]
        both = (a.labels >= 0) & (b.labels >= 0)
        rows.extend((offsets[k] + a.labels[both]).tolist())
        cols.extend((offsets[k + 1] + b.labels[both]).tolist())
    g = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(total, total))
    _, comp = connected_components(g, directed=False)
    first = {lab: int(comp[offsets[0] + lab]) for lab in range(slices[0].count)}
    last = {lab: int(comp[offsets[-2] + lab]) for lab in range(slices[-1].count)}
    return first, last


# --------------------------------------------------------------------------
# Holes of planar free components
# --------------------------------------------------------------------------


def component_holes(comp: FreeComponents, label: int, scenario: Scenario) -> list:
    """Bounded complementary regions of one planar free component.

    Each hole is reported as the frozenset of sensor ids whose centers lie
    in it.  The component is thickened on a doubled lattice (cells, valid
    edges and fully enclosed squares) and its complement is labeled with
    8-connectivity.
    """
    grid = comp.grid
    if len(grid.shape) != 2:
        raise DomainError("holes are only computed for planar scenarios")
    nx, ny = grid.shape
    fine = np.zeros((2 * nx + 1, 2 * ny + 1), dtype=bool)
    mine = comp.labels == label
    ii, jj = np.unravel_index(np.nonzero(mine)[0], grid.shape)
    fine[2 * ii + 1, 2 * jj + 1] = True
    (edges,) = comp.edges
    if len(edges):
        e = edges[mine[edges[:, 0]]]
        a = np.array(np.unravel_index(e[:, 0], grid.shape))
        b = np.array(np.unravel_index(e[:, 1], grid.shape))
        fine[a[0] + b[0] + 1, a[1] + b[1] + 1] = True
    sq = fine[1:-2:2, 2:-1:2] & fine[3::2, 2:-1:2] & fine[2:-1:2, 1:-2:2] & fine[2:-1:2, 3::2]
    fine[2:-1:2, 2:-1:2] |= sq
    lab, n = nd_label(~fine, structure=np.ones((3, 3), dtype=int))
    outer = set(np.unique(np.concatenate([lab[0], lab[-1], lab[:, 0], lab[:, -1]])).tolist())
    holes: dict = {}
    pos = scenario.positions([comp.time])[0]
    for sid, p in zip(scenario.sensor_ids, pos):
        f = (p - grid.lower) / grid.spacing * 2.0
        i = int(np.clip(np.round(f[0]), 0, 2 * nx))
        j = int(np.clip(np.round(f[1]), 0, 2 * ny))
        h = int(lab[i, j])
        if h and h not in outer:
            holes.setdefault(h, set()).add(sid)
    bounded = [h for h in range(1, n + 1) if h not in outer]
    if any(h not in holes for h in bounded):
        raise ClearanceTooSmall("a hole of a free component contains no sensor center", time=comp.time)
    return sorted((frozenset(holes[h]) for h in bounded), key=lambda s: sorted(s))
