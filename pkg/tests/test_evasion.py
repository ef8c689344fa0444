import json

import numpy as np
import pytest

import oracles
from zigzag_evasion import decide_evasion, detect_events, free_components
from zigzag_evasion.errors import ClearanceTooSmall, NonGenericScenario
from zigzag_evasion.evasion import (SectionReport, Verdict, build_ZC_homology, build_ZX, coarse_diagnostic,
                                    duality_check, lim_for_partition, refine_partition, slice_nerve,
                                    stack_nerves)
from zigzag_evasion.freespace import make_grid
from zigzag_evasion.geometry import Change, Field, Scenario, clearance_at, position_at
from zigzag_evasion.scenarios import (fence_only, fence_with_blob, fence_with_ring, moving, reopening_door,
                                      square, static, subdivision, sweeping_wall, two_chambers)
from zigzag_evasion.simplicial import betti
from zigzag_evasion.zigzag import lim_sets

STATIC = {"fence_only": (fence_only, 1), "fence_with_ring": (fence_with_ring, 2),
          "fence_with_blob": (fence_with_blob, 1), "two_chambers": (two_chambers, 2)}


@pytest.fixture(scope="module")
def reports():
    out = {}
    for name, make in [("sweeping_wall", sweeping_wall), ("reopening_door", reopening_door),
                       ("subdivision", subdivision)]:
        sc = make()
        out[name] = (sc, decide_evasion(sc, resolution=sc.grid))
    return out


def reference_mask(sc, t, n):
    """Free cell centers on an n-per-longest-axis grid, computed from raw positions."""
    lo, hi = sc.lower, sc.upper
    L = float(max(hi - lo))
    nx, ny = (int(round(n * (hi[k] - lo[k]) / L)) for k in range(2))
    X, Y = np.meshgrid(lo[0] + (np.arange(nx) + 0.5) * (hi[0] - lo[0]) / nx,
                       lo[1] + (np.arange(ny) + 0.5) * (hi[1] - lo[1]) / ny, indexing="ij")
    free = np.ones(X.shape, dtype=bool)
    for s in sc.sensors:
        p = position_at(s, t)
        free &= np.hypot(X - p[0], Y - p[1]) > s.radius
    return free


def resolvable_times(sc, schedule, resolution, fractions=(0.25, 0.75, 0.1, 0.9, 0.4, 0.6)):
    """One extra time per slice interval where the grid still passes the clearance check."""
    required = 2 * make_grid(sc, resolution).diagonal
    out = []
    s = schedule.slice_times
    for a, b in zip(s, s[1:]):
        for f in fractions:
            t = a + f * (b - a)
            if all(abs(t - e) > 1e-3 for e in schedule.times) and clearance_at(sc, t) > required:
                out.append(t)
                break
    return out


# slice nerves

def test_fence_nerve_is_a_circle():
    K = slice_nerve(fence_only(), 0.3)
    assert betti(K, 1).betti == 1 and betti(K, 0).betti == 1


def test_isolated_sensor_nerve():
    sc = Scenario(2, (0.0, 0.0), (1.0, 1.0), (static("a", (0.5, 0.5), 0.1),))
    K = slice_nerve(sc, 0.5)
    assert K.vertices == ("a",) and K.dimension == 0


def test_tangent_pair_nudged_apart():
    sc = Scenario(2, (-2.0, -2.0), (6.0, 2.0), (static("a", (0.0, 0.0), 1.0), static("b", (2 + 2e-9, 0.0), 1.0)))
    assert slice_nerve(sc, 0.5).dimension == 0


def test_exact_tangency_raises():
    sc = Scenario(2, (-2.0, -2.0), (6.0, 2.0), (static("a", (0.0, 0.0), 1.0), static("b", (2.0, 0.0), 1.0)))
    with pytest.raises(NonGenericScenario):
        slice_nerve(sc, 0.5)


# free components

@pytest.mark.parametrize("name", sorted(STATIC))
def test_static_free_counts(name):
    make, expected = STATIC[name]
    sc = make()
    fc = free_components(sc, 0.5, 64)
    # flood fill of raw cell centers at 4x the resolution, corner-adjacent cells joined
    assert oracles.flood_count(reference_mask(sc, 0.5, 256)) == expected
    assert fc.count == expected


def test_fully_covered_slice():
    sc = square([static("z", (0.5, 0.5), 0.8)])
    assert free_components(sc, 0.5, 64).count == 0


def test_labels_canonical_and_stable():
    sc = fence_with_ring()
    a, b = free_components(sc, 0.2, 64), free_components(sc, 0.2, 64)
    assert np.array_equal(a.labels, b.labels)
    firsts = [int(np.nonzero(a.labels == k)[0][0]) for k in range(a.count)]
    assert firsts == sorted(firsts)


def test_clearance_precondition():
    with pytest.raises(ClearanceTooSmall) as exc:
        free_components(fence_with_ring(), 0.5, 12)
    assert exc.value.clearance < exc.value.required


def test_crusher_needs_finer_grid():
    sc = square([moving("z", [(0.0, (0.0, 0.0)), (0.5, (0.5, 0.5)), (1.0, (1.0, 1.0))], 0.8)])
    with pytest.raises(ClearanceTooSmall):
        decide_evasion(sc)


# duality table

@pytest.mark.parametrize("make,expected", [(fence_only, (1, 1, True)), (fence_with_ring, (2, 2, True)),
                                           (fence_with_blob, (1, 1, True))])
def test_duality_examples(make, expected):
    assert duality_check(make(), 0.5) == expected


def test_duality_both_fields():
    for field in (Field.GF2, Field.RATIONAL):
        assert duality_check(two_chambers(), 0.5, field=field) == (2, 2, True)


# zigzag of free components

@pytest.mark.parametrize("name", sorted(STATIC))
def test_static_zigzag(name):
    make, expected = STATIC[name]
    sc = make()
    sch = detect_events(sc)
    Z = build_ZX(sc, sch)
    # slice times are always {0, 1} at least: two equal fibers joined by an identity span
    assert all(len(A) == expected for A in Z.fibers)
    assert all(m == {a: a for a in A} for m, A in zip(Z.alpha + Z.beta, Z.fibers + Z.fibers[1:]))
    assert len(lim_sets(Z)) == expected


@pytest.mark.parametrize("name", sorted(STATIC))
def test_static_decide(name):
    make, expected = STATIC[name]
    r = decide_evasion(make())
    assert r.verdict is Verdict.EXISTS and r.lim_cardinality == expected
    assert all(row.agree for row in r.duality_table)
    assert r.homology_lim_cardinality == expected


def test_sweeping_wall(reports):
    sc, r = reports["sweeping_wall"]
    assert r.verdict is Verdict.NONE and r.lim_cardinality == 0
    assert r.homology_lim_cardinality == 0
    assert all(row.agree for row in r.duality_table)


def test_reopening_door(reports):
    sc, r = reports["reopening_door"]
    assert r.verdict is Verdict.EXISTS and r.lim_cardinality == 1
    assert r.homology_lim_cardinality == 1
    assert all(row.agree for row in r.duality_table)


def test_subdivision_report(reports):
    sc, r = reports["subdivision"]
    assert r.verdict is Verdict.NONE
    diag = coarse_diagnostic(sc, r.schedule, resolution=sc.grid)
    assert diag["coarse_lim_cardinality"] > 0 and diag["fine_lim_cardinality"] == 0 and diag["discrepancy"]


def test_retract_rule_sides(reports):
    sc, r = reports["reopening_door"]
    for change, rec in zip((e.change for e in r.schedule.events), r.records):
        assert rec.kind == ("left" if change is Change.ADDED else "right")


def test_verdict_matches_limit(reports):
    for sc, r in reports.values():
        assert (r.verdict is Verdict.EXISTS) == bool(r.lim_elements)
        for e in r.lim_elements:
            assert all(r.zx.alpha[i][e[i]] == r.zx.beta[i][e[i + 1]] for i in range(r.zx.length))


def test_mixed_event_rejected():
    a, c = static("a", (0.0, 0.0), 1.0), static("c", (4.0, 0.0), 1.0)
    b = moving("b", [(0.0, (1.0, 0.0)), (1.0, (3.0, 0.0))], 1.0)
    sc = Scenario(2, (-2.0, -2.0), (6.0, 2.0), (a, b, c))
    assert detect_events(sc).events[0].change is Change.MIXED
    with pytest.raises(NonGenericScenario):
        decide_evasion(sc)


def test_stacked_complex_inclusions(reports):
    sc, r = reports["reopening_door"]
    st = stack_nerves([s.covered_nerve for s in r.slices])
    for i in range(len(r.slices) - 1):
        K, L = r.slices[i].covered_nerve, r.slices[i + 1].covered_nerve
        assert K.is_subcomplex_of(L) or L.is_subcomplex_of(K)
    assert len(st.nerves) == len(r.slices)


def test_zc_homology_static():
    sc = two_chambers()
    hc = build_ZC_homology(sc, detect_events(sc))
    assert len(hc.lim) == 2


# refinement

def test_refinement_keeps_limit(reports):
    sc, r = reports["reopening_door"]
    times = refine_partition(r.schedule, resolvable_times(sc, r.schedule, sc.grid))
    assert len(times) > len(r.schedule.slice_times)
    assert len(lim_for_partition(sc, r.schedule, times, sc.grid)) == r.lim_cardinality


def test_doubled_resolution():
    sc = fence_with_ring()
    a, b = decide_evasion(sc, resolution=64), decide_evasion(sc, resolution=128)
    assert (a.verdict, a.lim_cardinality) == (b.verdict, b.lim_cardinality)


# R1lim and serialization

def test_r1lim_abelianized_static():
    r = decide_evasion(fence_with_ring(), r1lim="abelianized")
    assert len(r.r1lim) == r.lim_cardinality == 2
    assert all(x.trivial and x.method.value == "ABELIANIZED" for x in r.r1lim)


def test_r1lim_finite_tag():
    r = decide_evasion(fence_only(), r1lim="finite")
    assert [x.method.value for x in r.r1lim] == ["FINITE_EXACT"]
    assert r.r1lim[0].orbit_count == 1


def test_report_round_trip(reports):
    for sc, r in reports.values():
        back = SectionReport.from_json(json.loads(json.dumps(r.to_json())))
        assert back.verdict == r.verdict and back.lim_cardinality == r.lim_cardinality
        assert back.to_json() == json.loads(json.dumps(r.to_json()))


def test_oracle_attached():
    r = decide_evasion(fence_only(), oracle=True)
    assert r.oracle == {"exists": True, "agrees": True}
    assert r.witness is not None
