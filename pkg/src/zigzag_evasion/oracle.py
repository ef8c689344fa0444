"""Brute-force ground truth on a space-time grid.

Nothing here uses nerves, events or the zigzag machinery.  Occupancy is
evaluated directly from sensor positions at cell centers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.cluster.hierarchy import DisjointSet
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components
from scipy.spatial.distance import cdist

from .errors import ClearanceTooSmall, DomainError, ResourceBudgetExceeded
from .geometry import Scenario, clearance_at

FREE, COVERED, MARGINAL = "FREE", "COVERED", "MARGINAL"
PATH_BUDGET = 1_000_000
STATE_BUDGET = 100_000


@dataclass(frozen=True, eq=False)
class GridWorld:
    """Occupancy of grid cells at a finite list of step times.

    ``free[k, c]`` says cell c is free at step k; ``stay[k, c]`` says it is
    free for the whole of step k (from times[k] to times[k+1]);
    ``edges[k]`` lists adjacent pairs that can be crossed at times[k].
    """

    shape: tuple
    times: np.ndarray
    free: np.ndarray
    marginal: np.ndarray
    stay: np.ndarray
    edges: tuple
    lower: np.ndarray | None = None
    spacing: np.ndarray | None = None
    margin: np.ndarray | None = None  # distance from cell centers to the nearest ball, per step

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.shape))

    def status(self, k: int, c: int) -> str:
        if self.free[k, c]:
            return FREE
        return MARGINAL if self.marginal[k, c] else COVERED

    def graph(self, k: int):
        """Sparse symmetric adjacency of the cells joined at step k."""
        n, e = self.n_cells, self.edges[k]
        return coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n)).tocsr()

    def neighbors(self, k: int) -> list:
        adj = [[] for _ in range(self.n_cells)]
        for a, b in self.edges[k]:
            adj[a].append(int(b))
            adj[b].append(int(a))
        return adj

    def center(self, c: int) -> np.ndarray:
        idx = np.array(np.unravel_index(c, self.shape), dtype=float)
        if self.lower is None:
            return idx
        return self.lower + (idx + 0.5) * self.spacing

    @classmethod
    def from_mask(cls, mask, diagonal: bool = False) -> "GridWorld":
        """Hand-built world: ``mask[k]`` is a boolean array of free cells at step k.

        Cells are joined across faces only, unless ``diagonal`` is set.
        """
        mask = np.asarray(mask, dtype=bool)
        shape = mask.shape[1:]
        T = mask.shape[0]
        free = mask.reshape(T, -1)
        stay = free[:-1] & free[1:]
        pairs = _adjacent_pairs(shape, diagonal)
        edges = tuple(pairs[free[k, pairs[:, 0]] & free[k, pairs[:, 1]]] for k in range(T))
        return cls(tuple(shape), np.linspace(0.0, 1.0, T), free, np.zeros_like(free), stay, edges)


def _adjacent_pairs(shape, diagonal: bool = True) -> np.ndarray:
    """Pairs of cells touching along a face, or also along an edge or corner when ``diagonal``."""
    idx = np.arange(int(np.prod(shape))).reshape(shape)
    out = []
    for off in itertools.product((-1, 0, 1), repeat=len(shape)):
        if not any(off) or next(o for o in off if o) < 0:
            continue
        if not diagonal and sum(map(abs, off)) != 1:
            continue
        a = tuple(slice(max(0, -o), n - max(0, o)) for o, n in zip(off, shape))
        b = tuple(slice(max(0, o), n - max(0, -o)) for o, n in zip(off, shape))
        out.append(np.stack([idx[a].ravel(), idx[b].ravel()], axis=1))
    return np.concatenate(out) if out else np.zeros((0, 2), dtype=int)


def _margins(centers: np.ndarray, pos: np.ndarray, radii: np.ndarray) -> np.ndarray:
    if not len(radii):
        return np.full(len(centers), np.inf)
    return np.min(cdist(centers, pos) - radii[None, :], axis=1)


class _MarginField:
    """Signed distance from cell centers to the union of balls, with static balls cached."""

    def __init__(self, scenario: Scenario, centers: np.ndarray):
        self.scenario = scenario
        self.centers = centers
        self.radii = scenario.radii
        self.moving = scenario.speeds > 0
        still = ~self.moving
        p0 = scenario.positions([0.0])[0]
        self.base = _margins(centers, p0[still], self.radii[still])

    def __call__(self, times) -> np.ndarray:
        pos = self.scenario.positions(times)
        r = self.radii[self.moving]
        return np.array([np.minimum(self.base, _margins(self.centers, p[self.moving], r)) for p in pos])


def build_gridworld(scenario: Scenario, cell_size: float, dt: float | None = None, times=None,
                    tol: float = 1e-9) -> GridWorld:
    """Sample occupancy on cells of side about ``cell_size``.

    Step times default to a uniform grid on which no sensor moves more
    than half a cell per step.  A cell counts as free for a whole step
    only if a Lipschitz bound on its distance to the balls, checked on
    sub-steps, stays positive.
    """
    if cell_size <= 0:
        raise DomainError("cell size must be positive")
    lo, hi = scenario.lower, scenario.upper
    shape = tuple(max(1, int(round((b - a) / cell_size))) for a, b in zip(lo, hi))
    spacing = (hi - lo) / np.array(shape)
    axes = [lo[a] + (np.arange(n) + 0.5) * spacing[a] for a, n in enumerate(shape)]
    centers = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(shape))
    vmax = float(np.max(scenario.speeds)) if len(scenario.sensors) else 0.0
    h = float(np.min(spacing))
    if times is None:
        if dt is None:
            dt = 1.0 if vmax == 0 else 0.5 * h / vmax
        n = max(1, int(math.ceil(1.0 / dt)))
        times = np.linspace(0.0, 1.0, n + 1)
    times = np.asarray(sorted(set(float(t) for t in times)))
    if times[0] != 0.0 or times[-1] != 1.0:
        raise DomainError("step times must start at 0 and end at 1")
    radii = scenario.radii
    field = _MarginField(scenario, centers)
    margin = field(times)
    free = margin > tol
    marginal = np.abs(margin) <= tol
    stay = free[:-1] & free[1:]
    if vmax > 0:
        for k in range(len(times) - 1):
            span = times[k + 1] - times[k]
            sub = max(1, int(math.ceil(span * vmax / (0.25 * h))))
            ts = np.linspace(times[k], times[k + 1], sub + 1)
            ms = margin[k:k + 2] if sub == 1 else np.concatenate([margin[k:k + 1], field(ts[1:-1]), margin[k + 1:k + 2]])
            delta = span / sub
            ok = np.all((ms[:-1] + ms[1:] - vmax * delta) / 2 > tol, axis=0)
            stay[k] &= ok
    pairs = _adjacent_pairs(shape)
    lengths = np.linalg.norm(centers[pairs[:, 1]] - centers[pairs[:, 0]], axis=1)
    half, kind = np.unique(np.round(lengths / 2, 12), return_inverse=True)
    pairs = np.column_stack([pairs, kind])
    edges = []
    for k, t in enumerate(times):
        cand = pairs[free[k, pairs[:, 0]] & free[k, pairs[:, 1]]]
        # every point of an edge lies within half its length of an endpoint
        safe = np.minimum(margin[k, cand[:, 0]], margin[k, cand[:, 1]]) > half[cand[:, 2]] + tol
        sure, cand = cand[safe, :2], cand[~safe, :2]
        if len(cand) and len(radii):
            pos = scenario.positions([t])[0]
            p, q = centers[cand[:, 0]], centers[cand[:, 1]]
            v = q - p
            w = pos[None, :, :] - p[:, None, :]
            s = np.clip(np.einsum("snd,sd->sn", w, v) / np.einsum("sd,sd->s", v, v)[:, None], 0, 1)
            near = p[:, None, :] + s[..., None] * v[:, None, :]
            clear = np.all(np.linalg.norm(pos[None] - near, axis=2) > radii[None, :] + tol, axis=1)
            cand = cand[clear]
        edges.append(np.concatenate([sure, cand]))
    return GridWorld(shape, times, free, marginal, stay, tuple(edges), lo, spacing, margin)


def _step_components(gw: GridWorld, k: int) -> np.ndarray:
    return connected_components(gw.graph(k), directed=False)[1]


def reachable_sets(gw: GridWorld) -> list:
    """Cells reachable at each step, allowing free travel within a step."""
    reach = []
    seeds = gw.free[0].copy()
    for k in range(gw.steps + 1):
        comp = _step_components(gw, k)
        hit = np.unique(comp[seeds])
        R = np.isin(comp, hit) & gw.free[k]
        reach.append(R)
        if k < gw.steps:
            seeds = R & gw.stay[k]
            if not seeds.any():
                reach.extend(np.zeros(gw.n_cells, dtype=bool) for _ in range(k + 1, gw.steps + 1))
                break
    return reach


def _path_within(graph, sources: np.ndarray, target: int) -> list:
    """Shortest cell path from any source to ``target`` along the edges of ``graph``."""
    order, pred = breadth_first_order(graph, target, directed=False, return_predecessors=True)
    start = int(next(c for c in order if sources[c]))
    path = [start]
    while path[-1] != target:
        path.append(int(pred[path[-1]]))
    return path


def grid_reachability(scenario: Scenario, cell_size: float, dt: float | None = None, tol: float = 1e-9,
                      check_clearance: bool = True, gridworld: GridWorld | None = None) -> tuple:
    """(exists, witness) by breadth-first search over (cell, step) states.

    The witness lists [t, x_1, ..., x_d] points: within a step the evader
    may cross any number of free cells, then waits in place until the next
    step.
    """
    gw = gridworld if gridworld is not None else build_gridworld(scenario, cell_size, dt, tol=tol)
    if check_clearance and gw.lower is not None:
        diag = float(np.linalg.norm(gw.spacing))
        for t in (0.0, 1.0):
            c = clearance_at(scenario, t, tol)
            if c <= 2 * diag:
                raise ClearanceTooSmall(f"clearance {c:.4g} at t={t} is not above {2 * diag:.4g}",
                                        clearance=c, required=2 * diag, time=t)
    reach = reachable_sets(gw)
    if not reach[-1].any():
        return False, None
    cells_per_step = []
    # end in the reachable cell deepest inside the free region
    last = np.nonzero(reach[-1])[0]
    target = int(last[np.argmax(gw.margin[-1, last])]) if gw.margin is not None else int(last[0])
    for k in range(gw.steps, -1, -1):
        sources = (reach[k - 1] & gw.stay[k - 1]) if k > 0 else gw.free[0]
        sources = sources & reach[k]
        path = _path_within(gw.graph(k), sources, target)
        cells_per_step.append(path)
        target = path[0]
    cells_per_step.reverse()
    witness = []
    for k, path in enumerate(cells_per_step):
        for c in path:
            witness.append([float(gw.times[k])] + gw.center(c).tolist())
    return True, witness


def check_witness(gw: GridWorld, witness_cells: list) -> bool:
    """Section property of a per-step cell path: free cells, valid crossings, valid waits."""
    for k, path in enumerate(witness_cells):
        if not all(gw.free[k, c] for c in path):
            return False
        if len(path) > 1:
            g = gw.graph(k)
            if any(g[a, b] == 0 and g[b, a] == 0 for a, b in zip(path, path[1:])):
                return False
        if k + 1 < len(witness_cells):
            if witness_cells[k + 1][0] != path[-1] or not gw.stay[k, path[-1]]:
                return False
    return len(witness_cells) == gw.steps + 1


def witness_cells(gw: GridWorld, witness: list) -> list:
    """Group a witness polyline back into per-step cell paths."""
    out = [[] for _ in range(gw.steps + 1)]
    index = {float(t): k for k, t in enumerate(gw.times)}
    for row in witness:
        k = index[float(row[0])]
        if gw.lower is None:
            c = int(np.ravel_multi_index(tuple(int(round(x)) for x in row[1:]), gw.shape))
        else:
            i = np.floor((np.array(row[1:]) - gw.lower) / gw.spacing).astype(int)
            c = int(np.ravel_multi_index(tuple(i), gw.shape))
        out[k].append(c)
    return out


# --------------------------------------------------------------------------
# Components of the space of lattice sections
# --------------------------------------------------------------------------


def _transitions(gw: GridWorld) -> list:
    """succ[k][c]: cells reachable at step k+1 from c at step k by one wait or one move."""
    succ = []
    for k in range(gw.steps):
        adj = gw.neighbors(k)
        nxt = []
        for c in range(gw.n_cells):
            if not gw.free[k, c]:
                nxt.append(())
                continue
            opts = [c] if gw.stay[k, c] else []
            opts += [n for n in adj[c] if gw.stay[k, n]]
            nxt.append(tuple(sorted(opts)))
        succ.append(nxt)
    return succ


def path_space_components(gw: GridWorld, budget: int = PATH_BUDGET) -> int:
    """Number of classes of lattice sections under single-step local moves.

    A lattice section picks one free cell per step, consecutive cells equal
    or adjacent.  Two sections are identified when they differ at exactly
    one step by adjacent cells and both are sections.
    """
    T = gw.steps
    if int(gw.free.sum()) > STATE_BUDGET:
        raise ResourceBudgetExceeded(f"{int(gw.free.sum())} free states exceed {STATE_BUDGET}")
    succ = _transitions(gw)
    alive = [set(np.nonzero(gw.free[T])[0].tolist())]
    for k in range(T - 1, -1, -1):
        alive.append({c for c in np.nonzero(gw.free[k])[0].tolist() if any(n in alive[-1] for n in succ[k][c])})
    alive.reverse()
    counts = {c: 1 for c in alive[T]}
    for k in range(T - 1, -1, -1):
        counts = {c: sum(counts.get(n, 0) for n in succ[k][c]) for c in alive[k]}
    total = sum(counts.values())
    if total > budget:
        raise ResourceBudgetExceeded(f"{total} lattice sections exceed the budget of {budget}")
    if total == 0:
        return 0
    paths = []
    stack = [(c,) for c in sorted(alive[0], reverse=True)]
    while stack:
        p = stack.pop()
        k = len(p) - 1
        if k == T:
            paths.append(p)
            continue
        for n in reversed(succ[k][p[-1]]):
            if n in alive[k + 1]:
                stack.append(p + (n,))
    index = {p: i for i, p in enumerate(paths)}
    ds = DisjointSet(range(len(paths)))
    adj = [gw.neighbors(k) for k in range(T + 1)]
    for p, i in index.items():
        for k in range(T + 1):
            for n in adj[k][p[k]]:
                q = p[:k] + (n,) + p[k + 1:]
                j = index.get(q)
                if j is not None:
                    ds.merge(i, j)
    return ds.n_subsets
