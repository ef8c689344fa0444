"""From moving sensors to an evasion verdict.

Pipeline: nerve events -> slice times -> free components per slice -> the
zigzag of component sets -> its limit.  A second, independent route runs
through the homology of the covered nerves and must agree with the first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (DualityMismatch, DomainError, EvasionError, IsoAssumptionViolated,
                     NonGenericScenario)
from .freespace import (FreeComponents, Grid, component_holes, free_components, make_grid,
                        spacetime_components, transport_labels)
from .geometry import (Change, Event, EventSchedule, Field, Scenario, detect_events,
                       simplex_margins_at)
from .simplicial import (HomologyResult, SimplicialComplex, betti, build_complex, identity,
                         induced_map, matmul, solve)
from .zigzag import (AbelianInvariants, AbGroup, Arrow, FiniteGroup, LimResult, ReducedChain,
                     ZigzagAb, ZigzagSets, lim_chain, lim_sets, r1lim_ab, r1lim_finite)


class Verdict(str, Enum):
    EXISTS = "EXISTS"
    NONE = "NONE"


class R1Method(str, Enum):
    FINITE_EXACT = "FINITE_EXACT"
    ABELIANIZED = "ABELIANIZED"


# --------------------------------------------------------------------------
# Slices
# --------------------------------------------------------------------------


def slice_nerve(scenario: Scenario, t: float, tol: float = 1e-9) -> SimplicialComplex:
    """Čech nerve of the sensor balls at time t, up to dimension d."""
    ids = scenario.sensor_ids
    margins = simplex_margins_at(scenario, t, threshold=tol)
    simplices = []
    for S, m in margins.items():
        name = tuple(sorted(ids[i] for i in S))
        if abs(m) <= tol:
            raise NonGenericScenario(f"simplex {name} is tangent at t={t:.6g}", simplex=name, interval=(t, t))
        if m < -tol:
            simplices.append(name)
    return build_complex(simplices, vertices=ids)


@dataclass(frozen=True, eq=False)
class SlicePair:
    time: float
    covered_nerve: SimplicialComplex
    free_components: FreeComponents

    @property
    def count(self) -> int:
        return self.free_components.count


@dataclass(frozen=True, eq=False)
class StackedComplex:
    """Slice nerves with the direction of the inclusion across each event.

    ``directions[i]`` is +1 when K_i is a subcomplex of K_{i+1}, -1 for the
    reverse and 0 when the two agree.
    """

    nerves: tuple
    directions: tuple
    differences: tuple


def stack_nerves(nerves: Sequence[SimplicialComplex]) -> StackedComplex:
    dirs, diffs = [], []
    for i, (K, L) in enumerate(zip(nerves, nerves[1:])):
        sk = {s for level in K.simplices for s in level}
        sl = {s for level in L.simplices for s in level}
        if sk == sl:
            dirs.append(0)
            diffs.append(())
        elif sk <= sl:
            dirs.append(1)
            diffs.append(tuple(sorted(sl - sk)))
        elif sl <= sk:
            dirs.append(-1)
            diffs.append(tuple(sorted(sk - sl)))
        else:
            raise NonGenericScenario(
                f"nerves at slices {i} and {i + 1} differ by both additions and removals", interval=(i, i + 1))
    return StackedComplex(tuple(nerves), tuple(dirs), tuple(diffs))


def compute_slices(scenario: Scenario, times: Sequence[float], resolution: int = 64,
                   tol: float = 1e-9, grid: Grid | None = None) -> list:
    grid = grid if grid is not None else make_grid(scenario, resolution)
    return [SlicePair(float(t), slice_nerve(scenario, t, tol), free_components(scenario, t, tol=tol, grid=grid))
            for t in times]


# --------------------------------------------------------------------------
# The zigzag of free components
# --------------------------------------------------------------------------


def _interval_changes(schedule: EventSchedule, slice_times: Sequence[float]) -> list:
    """Events falling inside each interval of an arbitrary partition."""
    out = []
    for a, b in zip(slice_times, slice_times[1:]):
        out.append([e for e in schedule.events if a < e.time < b])
    for e in schedule.events:
        if any(abs(e.time - s) < 1e-12 for s in slice_times):
            raise DomainError(f"slice time coincides with the event at {e.time}")
    return out


@dataclass(frozen=True)
class SpanRecord:
    """How one span of ZX was realized: which slice it retracts to, or space-time components."""

    kind: str  # "left", "right" or "spacetime"
    tracked: str  # leg computed by transport: "alpha", "beta" or "both"


def build_zigzag(scenario: Scenario, slices: Sequence[SlicePair], events_per_interval: Sequence,
                 tol: float = 1e-9) -> tuple:
    """ZX for an arbitrary partition; returns (ZigzagSets, span records).

    Intervals holding at most one event use the retract rule: the span is
    the adjacent slice with the larger free region and the other slice is
    transported into it.  Intervals holding several events fall back to
    space-time components of the grid over the whole interval.
    """
    fibers = [tuple(range(s.count)) for s in slices]
    spans, alpha, beta, records = [], [], [], []
    for i, evs in enumerate(events_per_interval):
        left, right = slices[i].free_components, slices[i + 1].free_components
        if len(evs) > 1:
            first, last = spacetime_components(scenario, left.grid, left.time, right.time, tol)
            span = tuple(sorted(set(first.values()) | set(last.values())))
            spans.append(span)
            alpha.append(first)
            beta.append(last)
            records.append(SpanRecord("spacetime", "both"))
            continue
        change = evs[0].change if evs else None
        if change is Change.MIXED:
            raise NonGenericScenario(f"event at t={evs[0].time:.6g} adds and removes simplices at once",
                                     interval=(left.time, right.time))
        if change is Change.REMOVED:
            spans.append(fibers[i + 1])
            alpha.append(transport_labels(scenario, left, right, tol))
            beta.append({a: a for a in fibers[i + 1]})
            records.append(SpanRecord("right", "alpha"))
        else:
            spans.append(fibers[i])
            alpha.append({a: a for a in fibers[i]})
            beta.append(transport_labels(scenario, right, left, tol))
            records.append(SpanRecord("left", "beta"))
            if change is None:
                m = beta[-1]
                if len(set(m.values())) != len(m) or len(m) != len(fibers[i]):
                    raise IsoAssumptionViolated(
                        f"components are not in bijection across the event-free interval "
                        f"[{left.time:.6g}, {right.time:.6g}]", span=i)
    return ZigzagSets(fibers, spans, alpha, beta), tuple(records)


def build_ZX(scenario: Scenario, schedule: EventSchedule, resolution: int = 64, tol: float = 1e-9,
             slices: Sequence[SlicePair] | None = None) -> ZigzagSets:
    """Zigzag of free-component sets over the schedule's slice times."""
    if slices is None:
        slices = compute_slices(scenario, schedule.slice_times, resolution, tol)
    evs = schedule.interval_events()
    return build_zigzag(scenario, slices, evs, tol)[0]


def lim_for_partition(scenario: Scenario, schedule: EventSchedule, slice_times: Sequence[float],
                      resolution: int = 64, tol: float = 1e-9) -> LimResult:
    """lim pi0 of ZX built over an arbitrary partition of [0, 1]."""
    times = sorted(set(float(t) for t in slice_times))
    if times[0] != 0.0 or times[-1] != 1.0:
        raise DomainError("a partition must start at 0 and end at 1")
    slices = compute_slices(scenario, times, resolution, tol)
    Z, _ = build_zigzag(scenario, slices, _interval_changes(schedule, times), tol)
    return lim_sets(Z)


def refine_partition(schedule: EventSchedule, extra: Sequence[float]) -> list:
    """Slice times plus extra times, kept away from every event."""
    times = set(schedule.slice_times)
    for t in extra:
        if 0.0 < t < 1.0 and all(abs(t - e) > 1e-6 for e in schedule.times):
            times.add(float(t))
    return sorted(times)


# --------------------------------------------------------------------------
# Duality: components of the free slice vs. (d-1)-homology of the nerve
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DualityRow:
    time: float
    free_count: int
    betti: int

    @property
    def agree(self) -> bool:
        return self.free_count == self.betti

    def to_json(self) -> dict:
        return {"time": self.time, "free_components": self.free_count, "betti": self.betti, "agree": self.agree}


def duality_check(scenario: Scenario, t: float, resolution: int = 64, tol: float = 1e-9,
                  field: Field | None = None) -> tuple:
    """(number of free components, betti_{d-1} of the nerve, agree) at time t."""
    field = Field(field or scenario.field)
    count = free_components(scenario, t, resolution, tol).count
    b = betti(slice_nerve(scenario, t, tol), scenario.dimension - 1, field).betti
    return count, b, count == b


_RAY = {}


def _ray_direction(d: int, attempt: int) -> np.ndarray:
    key = (d, attempt)
    if key not in _RAY:
        u = np.random.default_rng(1000 + attempt).normal(size=d)
        _RAY[key] = u / np.linalg.norm(u)
    return _RAY[key]


def ray_incidence(simplices: Sequence[tuple], coords: dict, points: np.ndarray, field: Field) -> np.ndarray:
    """Signed counts of ray crossings: rows are points, columns are (d-1)-simplices.

    A ray leaves each point in a fixed generic direction.  Summed against
    a (d-1)-cycle realized on the sensor centers, a row gives the linking
    number of the point with the cycle (mod 2 over GF(2)).
    """
    m = len(points)
    d = points.shape[1] if m else 0
    out = np.zeros((m, len(simplices)), dtype=np.int64)
    if not m or not simplices:
        return out
    for attempt in range(8):
        u = _ray_direction(d, attempt)
        ambiguous = False
        for j, s in enumerate(simplices):
            V = np.array([coords[v] for v in s])
            E = (V[1:] - V[0]).T
            A = np.concatenate([E, -u[:, None]], axis=1)
            det = np.linalg.det(A)
            scale = max(1.0, float(np.max(np.abs(A))) ** d)
            if abs(det) < 1e-12 * scale:
                continue
            x = np.linalg.solve(A, (points - V[0]).T)
            lam, s_ray = x[:-1], x[-1]
            lam_sum = np.sum(lam, axis=0)
            inside = (s_ray > 0) & np.all(lam >= 0, axis=0) & (lam_sum <= 1)
            near = (np.abs(s_ray) < 1e-10) | np.any(np.abs(lam) < 1e-10, axis=0) | (np.abs(lam_sum - 1) < 1e-10)
            if np.any(near & (s_ray > -1e-10)):
                ambiguous = True
                break
            sign = 1 if field is Field.GF2 else int(np.sign(-det))
            out[inside, j] = sign
        if not ambiguous:
            return out % 2 if field is Field.GF2 else out
        out[:] = 0
    raise NonGenericScenario("could not find a ray direction in general position")


def dual_points(scenario: Scenario, sl: SlicePair, hom: HomologyResult) -> np.ndarray:
    """Linking functional of each free component on H_{d-1} of the nerve.

    Row c holds the values of component c's functional on the homology
    basis; over GF(2) entries are 0/1, over the rationals integers.
    """
    coords = dict(zip(scenario.sensor_ids, scenario.positions([sl.time])[0]))
    simplices = list(hom.complex.level(hom.degree))
    W = ray_incidence(simplices, coords, sl.free_components.witness, hom.field)
    if hom.betti == 0 or not len(W):
        return np.zeros((sl.count, hom.betti), dtype=np.int64)
    basis = np.array(hom.cycle_basis, dtype=object if hom.field is Field.RATIONAL else np.int64)
    vals = W.astype(object).dot(basis) if hom.field is Field.RATIONAL else (W @ basis) % 2
    return np.array([[int(x) for x in row] for row in vals], dtype=np.int64).reshape(sl.count, hom.betti)


@dataclass(frozen=True)
class HomologyChain:
    """Reduced chain of dual component sets and its limit."""

    chain: ReducedChain
    lim: LimResult
    maps_agree: bool | None = None


def _as_matrix(M: np.ndarray, field: Field) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in M.tolist()], dtype=object) if M.size else \
        np.zeros(M.shape, dtype=object)


def _apply_functionals(rows: np.ndarray, F_iso, F_other, field: Field) -> np.ndarray:
    """rows . F_iso^-1 . F_other, one functional per row."""
    n = F_iso.shape[0]
    inv = solve(F_iso, identity(n, field), field) if n else F_iso
    if inv is None:
        raise IsoAssumptionViolated("retract-side homology map is not invertible")
    if field is Field.GF2:
        R = rows.astype(np.uint8)
        return matmul(matmul(R, inv, field), F_other, field).astype(np.int64)
    R = rows.astype(object)
    out = R.dot(inv).dot(F_other) if R.size and inv.size else np.zeros((rows.shape[0], F_other.shape[1]), dtype=object)
    return np.array([[int(x) for x in row] for row in out.tolist()], dtype=np.int64).reshape(rows.shape[0], -1)


def build_ZC_homology(scenario: Scenario, schedule: EventSchedule, field: Field | None = None,
                      slices: Sequence[SlicePair] | None = None, resolution: int = 64, tol: float = 1e-9,
                      expected: ZigzagSets | None = None) -> HomologyChain:
    """Second route to lim pi0: homology of the covered nerves, dualized.

    Each free component is identified with its linking functional on
    H_{d-1} of the slice nerve.  Across an event the nerves are nested;
    the leg from the larger nerve must be an isomorphism onto the union,
    and the functionals are pulled back through it to give one arrow per
    interval.  When ``expected`` is given the limit cardinality must match
    lim pi0 of that zigzag, otherwise DualityMismatch is raised.
    """
    field = Field(field or scenario.field)
    if slices is None:
        slices = compute_slices(scenario, schedule.slice_times, resolution, tol)
    k = scenario.dimension - 1
    stacked = stack_nerves([s.covered_nerve for s in slices])
    homs = [betti(s.covered_nerve, k, field) for s in slices]
    duals = []
    for sl, h in zip(slices, homs):
        D = dual_points(scenario, sl, h)
        keys = [tuple(row) for row in D.tolist()]
        if len(set(keys)) != len(keys):
            raise DualityMismatch(f"two free components at t={sl.time:.6g} have the same linking functional")
        duals.append(D)
    arrows = []
    for i, direction in enumerate(stacked.directions):
        K, L = stacked.nerves[i], stacked.nerves[i + 1]
        U = L if direction >= 0 else K
        fl = induced_map(K, U, k, field, source=homs[i], target=betti(U, k, field))
        fr = induced_map(L, U, k, field, source=homs[i + 1], target=fl.target)
        if direction >= 0:
            if not fr.is_isomorphism():
                raise IsoAssumptionViolated(f"homology leg from slice {i + 1} is not an isomorphism", span=i)
            pulled = _apply_functionals(duals[i + 1], fr.matrix, fl.matrix, field)
            src, dst, forward = i + 1, i, False
        else:
            if not fl.is_isomorphism():
                raise IsoAssumptionViolated(f"homology leg from slice {i} is not an isomorphism", span=i)
            pulled = _apply_functionals(duals[i], fl.matrix, fr.matrix, field)
            src, dst, forward = i, i + 1, True
        lookup = {tuple(row): c for c, row in enumerate(duals[dst].tolist())}
        mapping = {}
        for c, row in enumerate(pulled.tolist()):
            if tuple(row) not in lookup:
                raise DualityMismatch(
                    f"component {c} at t={slices[src].time:.6g} has no dual partner at t={slices[dst].time:.6g}")
            mapping[c] = lookup[tuple(row)]
        arrows.append(Arrow(forward, mapping))
    chain = ReducedChain(tuple(tuple(range(s.count)) for s in slices), tuple(arrows))
    lim = lim_chain(chain)
    agree = None
    if expected is not None:
        if len(lim) != len(lim_sets(expected)):
            raise DualityMismatch(
                f"homology route gives {len(lim)} limit elements, component route {len(lim_sets(expected))}")
        agree = _arrows_match(chain, expected)
    return HomologyChain(chain, lim, agree)


def _arrows_match(chain: ReducedChain, Z: ZigzagSets) -> bool:
    for i, arrow in enumerate(chain.arrows):
        a, b = Z.alpha[i], Z.beta[i]
        if arrow.forward:
            inv = {v: k for k, v in b.items()}
            if any(inv.get(a[x]) != y for x, y in arrow.mapping.items()):
                return False
        else:
            inv = {v: k for k, v in a.items()}
            if any(inv.get(b[x]) != y for x, y in arrow.mapping.items()):
                return False
    return True


# --------------------------------------------------------------------------
# First derived limit of fiber fundamental groups (planar case)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class R1Record:
    gamma: tuple
    method: R1Method
    invariants: AbelianInvariants
    orbit_count: int | None = None

    @property
    def trivial(self) -> bool:
        return self.invariants.trivial

    def to_json(self) -> dict:
        return {"gamma": list(self.gamma), "method": self.method.value, "rank": self.invariants.rank,
                "torsion": list(self.invariants.torsion), "trivial": self.trivial,
                "orbits": self.orbit_count}


def _inclusion_matrix(small: list, large: list) -> list:
    """Image of each small-side hole loop in the large side's H_1: holes nested by sensor sets."""
    return [[1 if h2 <= h1 else 0 for h1 in small] for h2 in large]


def fiber_r1lim(scenario: Scenario, slices: Sequence[SlicePair], Z: ZigzagSets, records: Sequence[SpanRecord],
                gamma: tuple, method: str | R1Method = R1Method.ABELIANIZED) -> R1Record:
    """R^1 lim of the H_1 zigzag of the free components picked out by ``gamma``.

    Only planar scenarios are supported.  FINITE_EXACT is reported only
    when every fiber is simply connected, in which case the orbit set is
    computed over trivial groups; otherwise the abelianized value is used.
    """
    if scenario.dimension != 2:
        raise DomainError("fiber fundamental groups are only computed for planar scenarios")
    if len(gamma) != len(slices):
        raise DomainError("gamma must pick one component per slice")
    for i in range(Z.length):
        if Z.alpha[i][gamma[i]] != Z.beta[i][gamma[i + 1]]:
            raise DomainError("gamma is not an element of the limit")
    holes = [component_holes(sl.free_components, g, scenario) for sl, g in zip(slices, gamma)]
    fibers = [AbGroup(len(h)) for h in holes]
    spans, alpha, beta = [], [], []
    for i, rec in enumerate(records):
        if rec.kind == "left":
            span_holes = holes[i]
            alpha.append(_eye(len(span_holes)))
            beta.append(_inclusion_matrix(holes[i + 1], span_holes))
        elif rec.kind == "right":
            span_holes = holes[i + 1]
            alpha.append(_inclusion_matrix(holes[i], span_holes))
            beta.append(_eye(len(span_holes)))
        else:
            raise DomainError("space-time spans carry no fundamental group data")
        spans.append(AbGroup(len(span_holes)))
    inv = r1lim_ab(ZigzagAb(fibers, spans, alpha, beta), gamma=gamma)
    if isinstance(method, str) and not isinstance(method, R1Method):
        method = {"finite": R1Method.FINITE_EXACT, "abelianized": R1Method.ABELIANIZED}.get(method.lower()) \
            or R1Method(method)
    if method is R1Method.FINITE_EXACT and all(len(h) == 0 for h in holes):
        triv = FiniteGroup.trivial()
        n = Z.length
        orbits = r1lim_finite([triv] * (n + 1), [triv] * n, [[0]] * n, [[0]] * n, gamma=gamma)
        return R1Record(tuple(gamma), R1Method.FINITE_EXACT, inv, orbits.count)
    return R1Record(tuple(gamma), R1Method.ABELIANIZED, inv)


def _eye(n: int) -> list:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


# --------------------------------------------------------------------------
# The report
# --------------------------------------------------------------------------


@dataclass
class SectionReport:
    schedule: EventSchedule
    zx: ZigzagSets
    lim_elements: LimResult
    verdict: Verdict
    duality_table: list = field(default_factory=list)
    r1lim: list = field(default_factory=list)
    witness: list | None = None
    homology_lim_cardinality: int | None = None
    homology_status: str = "not run"
    oracle: dict | None = None
    slices: list | None = None
    records: tuple = ()

    @property
    def lim_cardinality(self) -> int:
        return len(self.lim_elements)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "lim_cardinality": self.lim_cardinality,
            "lim_elements": [list(e) for e in self.lim_elements],
            "events": [e.to_json() for e in self.schedule.events],
            "slice_times": list(self.schedule.slice_times),
            "zigzag": self.zx.to_json(),
            "duality_table": [r.to_json() for r in self.duality_table],
            "homology_route": {"status": self.homology_status, "lim_cardinality": self.homology_lim_cardinality},
            "r1lim": [r.to_json() for r in self.r1lim],
            "witness": self.witness,
            "oracle": self.oracle,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SectionReport":
        events = tuple(Event(e["time"], Change(e["change"]), tuple(tuple(s) for s in e["added"]),
                             tuple(tuple(s) for s in e["removed"])) for e in obj["events"])
        schedule = EventSchedule(events, tuple(obj["slice_times"]))
        zx = ZigzagSets.from_json(obj["zigzag"])
        rows = [DualityRow(r["time"], r["free_components"], r["betti"]) for r in obj["duality_table"]]
        r1 = [R1Record(tuple(r["gamma"]), R1Method(r["method"]), AbelianInvariants(r["rank"], tuple(r["torsion"])),
                       r.get("orbits")) for r in obj.get("r1lim", [])]
        hr = obj.get("homology_route", {})
        return cls(schedule, zx, LimResult(tuple(tuple(e) for e in obj["lim_elements"])), Verdict(obj["verdict"]),
                   rows, r1, obj.get("witness"), hr.get("lim_cardinality"), hr.get("status", "not run"),
                   obj.get("oracle"))


def decide_evasion(scenario: Scenario, resolution: int = 64, tol: float = 1e-9, dt_scan: float = 1e-3,
                   field: Field | None = None, r1lim: str = "off", oracle: bool = False,
                   homology: bool = True, schedule: EventSchedule | None = None) -> SectionReport:
    """Decide whether an evasion path exists and describe lim pi0 of ZX."""
    field = Field(field or scenario.field)
    if schedule is None:
        schedule = detect_events(scenario, tol=tol, dt_scan=dt_scan)
    slices = compute_slices(scenario, schedule.slice_times, resolution, tol)
    Z, records = build_zigzag(scenario, slices, schedule.interval_events(), tol)
    lim = lim_sets(Z)
    k = scenario.dimension - 1
    table = [DualityRow(s.time, s.count, betti(s.covered_nerve, k, field).betti) for s in slices]
    report = SectionReport(schedule, Z, lim, Verdict.EXISTS if lim else Verdict.NONE, table,
                           slices=list(slices), records=records)
    if homology:
        try:
            hc = build_ZC_homology(scenario, schedule, field, slices=slices, tol=tol, expected=Z)
            report.homology_lim_cardinality = len(hc.lim)
            report.homology_status = "agree" if hc.maps_agree else "agree (cardinality only)"
        except IsoAssumptionViolated as exc:
            report.homology_status = f"iso assumption violated: {exc}"
    if r1lim != "off":
        if scenario.dimension != 2:
            report.r1lim = []
        else:
            report.r1lim = [fiber_r1lim(scenario, slices, Z, records, g,
                                        R1Method.FINITE_EXACT if r1lim == "finite" else R1Method.ABELIANIZED)
                            for g in lim]
    if oracle:
        from .oracle import grid_reachability
        exists, witness = grid_reachability(scenario, cell_size=slices[0].free_components.grid.min_spacing)
        report.oracle = {"exists": exists, "agrees": exists == bool(lim)}
        if exists and lim:
            report.witness = witness
    return report


def coarse_diagnostic(scenario: Scenario, schedule: EventSchedule | None = None, resolution: int = 64,
                      tol: float = 1e-9, dt_scan: float = 1e-3) -> dict:
    """Compare the one-interval zigzag with the event-respecting one.

    The one-interval span is the set of space-time components of the free
    region over [0, 1]; its limit counts pairs of end components that are
    joined in space-time, which overestimates sections when the joining
    route runs backwards in time.
    """
    if schedule is None:
        schedule = detect_events(scenario, tol=tol, dt_scan=dt_scan)
    fine = len(lim_for_partition(scenario, schedule, schedule.slice_times, resolution, tol))
    coarse = len(lim_for_partition(scenario, schedule, [0.0, 1.0], resolution, tol)) if len(schedule.events) > 1 \
        else fine
    return {"coarse_lim_cardinality": coarse, "fine_lim_cardinality": fine, "discrepancy": coarse != fine}
