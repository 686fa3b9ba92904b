import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import diracwalk.evolve as ev
import diracwalk.search as se
from diracwalk.errors import ExperimentError, InputError, PeakNotFoundError
from diracwalk.lattice import LatticeGeometry, norm_sq

G16 = LatticeGeometry.cubic(2, 16)


def _trace(values, geometry=G16):
    return se.SearchTrace(se.SearchConfig(geometry, max_calls=len(values)), np.asarray(values, dtype=float))


def test_reflect_marked_examples():
    f = ev.init_uniform(G16)
    r = se.reflect_marked(f, (0, 0))
    assert r[(0, 0)] == pytest.approx(-1 / 16)
    assert r[(0, 1)] == f[(0, 1)]
    assert np.array_equal(se.reflect_marked(r, (0, 0)).amps, f.amps)
    q = se.reflect_marked(f, (3, 5), phase=math.pi / 2)
    assert q[(3, 5)] == pytest.approx(-1j / 16)
    with pytest.raises(InputError):
        se.reflect_marked(f, (16, 0))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 15), st.integers(0, 15))
def test_reflection_is_unitary_involution(seed, x, y):
    f = ev.init_random(G16, seed)
    r = se.reflect_marked(f, (x, y))
    assert norm_sq(r) == pytest.approx(norm_sq(f), abs=1e-12)
    assert np.allclose(se.reflect_marked(r, (x, y)).amps, f.amps, atol=0)


def test_config_validation():
    for kw in ({"c": 0.0}, {"c": 1.0}, {"t1": 0}, {"max_calls": 0}):
        with pytest.raises(InputError):
            se.SearchConfig(G16, **kw)
    with pytest.raises(InputError):
        se.SearchConfig(G16, marked=(0, 16))
    with pytest.raises(InputError):
        se.SearchConfig(LatticeGeometry.cubic(2, 4096))
    cfg = se.SearchConfig(G16)
    assert cfg.marked == (0, 0) and cfg.max_calls == se.default_max_calls(G16)
    assert se.SearchConfig(G16, marked=(1, 2)).odd_offset_marked
    assert not se.SearchConfig(G16, marked=(2, 4)).odd_offset_marked


def test_trace_starts_at_uniform_and_keeps_norm():
    cfg = se.SearchConfig(G16, max_calls=40)
    tr = se.search_run(cfg)
    assert tr.p_marked[0] == pytest.approx(1 / G16.N, rel=1e-14)
    assert tr.p_marked.size == 41
    assert list(tr.total_steps[:3]) == [0, 3, 6]
    assert tr.rows()[2] == [2, 6, float(tr.p_marked[2])]
    f = se.field_after_calls(cfg, 40)
    assert norm_sq(f) == pytest.approx(1.0, abs=1e-12)
    assert abs(f[(0, 0)]) ** 2 == pytest.approx(tr.p_marked[40], abs=1e-15)


def test_search_loop_matches_naive_composition():
    cfg = se.SearchConfig(G16, t1=2, max_calls=5)
    e = ev.WalkEngine.create(G16, cfg.c)
    f = ev.init_uniform(G16)
    for _ in range(5):
        f = ev.run(e, se.reflect_marked(f, cfg.marked), cfg.t1)
    assert np.allclose(se.field_after_calls(cfg, 5).amps, f.amps, atol=1e-15)


@pytest.mark.parametrize("marked", [(2, 0), (4, 6), (14, 10)])
def test_trace_invariant_under_even_translation(marked):
    base = se.search_run(se.SearchConfig(G16, max_calls=30)).p_marked
    moved = se.search_run(se.SearchConfig(G16, max_calls=30, marked=marked)).p_marked
    assert np.allclose(base, moved, atol=1e-15)


def test_detect_first_peak_synthetic():
    floor = 3 / G16.N
    up = [1 / 256, 0.02, 0.05, 0.09, 0.08, 0.04, 0.02]
    assert se.detect_first_peak(_trace(up)) == (3, 0.09)
    # even/odd alternation: a local maximum at 2 is beaten one call later
    zig = [1 / 256, 0.03, 0.05, 0.04, 0.08, 0.06, 0.03, 0.01]
    assert se.detect_first_peak(_trace(zig))[0] == 4
    # wiggles below the floor are ignored
    low = [1 / 256, floor / 2, floor / 4, floor / 2, 0.1, 0.05, 0.02]
    assert se.detect_first_peak(_trace(low))[0] == 4
    with pytest.raises(PeakNotFoundError):
        se.detect_first_peak(_trace([1 / 256] * 10))
    # rising trace never confirms a peak
    with pytest.raises(PeakNotFoundError):
        se.detect_first_peak(_trace(np.linspace(0.01, 0.2, 12)))
    with pytest.raises(InputError):
        se.detect_first_peak(_trace([]))


def test_stop_at_peak_agrees_with_full_trace():
    cfg = se.SearchConfig(LatticeGeometry.cubic(2, 32), max_calls=80)
    full = se.search_run(cfg)
    short = se.search_run(cfg, stop_at_peak=True)
    assert full.peak == short.peak
    assert short.p_marked.size == short.peak[0] + se.PEAK_WINDOW + 1


def test_no_peak_reported_as_none():
    tr = se.search_run(se.SearchConfig(LatticeGeometry.cubic(2, 64), max_calls=3))
    assert tr.peak is None


def test_periodicity_synthetic_and_degenerate():
    x = np.arange(300)
    p = 0.1 * np.sin(0.07 * x + 0.3) ** 2 + 0.002
    rep = se.periodicity_check(_trace(p), cycles=5)
    assert rep.r2 > 1 - 1e-9
    assert rep.omega == pytest.approx(0.07, rel=1e-6)
    assert rep.amplitude == pytest.approx(0.1, rel=1e-6)
    flat = se.periodicity_check(_trace(np.full(50, 1 / 256)), cycles=3)
    assert flat.degenerate and flat.amplitude == 0.0
    with pytest.raises(InputError):
        se.periodicity_check(_trace(p[:60]), cycles=5)
    with pytest.raises(InputError):
        se.periodicity_check(_trace(p[:3]), cycles=1)


def test_scaling_forms_and_fit():
    fp, fs, xp, xs = se.scaling_forms(2)
    assert (fp, fs) == ("a/log2(N)", "b*sqrt(N*log2(N))")
    assert xp(np.array([4096.0]))[0] == pytest.approx(1 / 12)
    assert xs(np.array([4096.0]))[0] == pytest.approx(math.sqrt(4096 * 12))
    fp, fs, xp, xs = se.scaling_forms(3)
    assert xp(np.array([8.0]))[0] == 1.0 and fs == "b*sqrt(N)"
    with pytest.raises(InputError):
        se.scaling_forms(1)
    a, rel = se.fit_through_origin(np.array([1.0, 2.0, 3.0]), np.array([2.0, 4.0, 6.0]))
    assert a == pytest.approx(2.0) and rel == pytest.approx(0.0, abs=1e-15)


def test_single_size_scaling_is_underdetermined():
    fit = se.scaling_experiment(2, [16])
    assert fit.underdetermined and len(fit.samples) == 1
    s = fit.samples[0]
    assert s.total_steps == 3 * s.peak_call
    assert fit.a_steps == pytest.approx(s.total_steps / math.sqrt(s.N * math.log2(s.N)))
    assert fit.a_steps_calls == pytest.approx(fit.a_steps / 3)
    doc = fit.to_dict()
    assert doc["steps_unit"] == "walk_steps" and doc["underdetermined"] is True
    with pytest.raises(InputError):
        se.scaling_experiment(2, [])


def test_scaling_without_peak_raises():
    # c near 1 barely moves the walk; no peak is confirmed within the default budget
    with pytest.raises(ExperimentError, match="L=16"):
        se.scaling_experiment(2, [16], c=0.999999)


def test_scan_sorting_and_threads():
    g = LatticeGeometry.cubic(2, 16)
    serial = se.scan_parameters(g, [0.6, 0.75], [1, 3])
    threaded = se.scan_parameters(g, [0.6, 0.75], [1, 3], threads=3)
    assert [r.row() for r in serial] == [r.row() for r in threaded]
    assert serial[0].best and not any(r.best for r in serial[1:])
    found = [r for r in serial if r.peak_call is not None]
    keys = [(r.total_steps, -r.peak_prob) for r in found]
    assert keys == sorted(keys)
    with pytest.raises(InputError):
        se.scan_parameters(g, [], [1])


def test_shorter_rounds_give_lower_peak():
    g = LatticeGeometry.cubic(2, 32)
    p1 = se.search_run(se.SearchConfig(g, t1=1), stop_at_peak=True).peak[1]
    p3 = se.search_run(se.SearchConfig(g, t1=3), stop_at_peak=True).peak[1]
    assert p1 < p3


def test_steps_do_not_drop_as_c_falls_below_unbiased():
    """On the d=2, L=32 scan grid, lowering c from 1/sqrt(2) to 0.5 never shortens the search."""
    g = LatticeGeometry.cubic(2, 32)
    rows = {(r.c, r.t1): r for r in se.scan_parameters(g, [0.5, ev.UNBIASED_C], [1, 2, 3, 4])}
    for t1 in (1, 2, 3, 4):
        lo, hi = rows[(0.5, t1)], rows[(ev.UNBIASED_C, t1)]
        assert lo.total_steps is not None and hi.total_steps is not None
        assert lo.total_steps >= hi.total_steps, f"t1={t1}: {lo.total_steps} < {hi.total_steps}"
