"""Marked-vertex search with the reflection oracle and the ``[W^t1 R]^t2`` loop.

Step counts are reported two ways: ``peak_call`` is the number of oracle
calls ``t2`` and ``total_steps = t1 * t2`` counts walk steps. Rankings and
the primary scaling fits use total walk steps; the oracle-call fit is
reported alongside.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import ExperimentError, InputError, PeakNotFoundError
from .evolve import UNBIASED_C, WalkEngine, apply_half_step, init_uniform
from .lattice import AmplitudeField, LatticeGeometry

NOISE_FLOOR_FACTOR = 3.0
PEAK_WINDOW = 2
MAX_SEARCH_SITES = 2**22


def reflect_marked(f: AmplitudeField, v, phase: float = math.pi) -> AmplitudeField:
    """Multiply the amplitude at ``v`` by ``exp(-i phase)``; ``phase = pi`` is ``R = I - 2|v><v|``."""
    v = f.geometry.check_site(v)
    out = f.copy()
    if phase == math.pi:
        out.amps[v] = -out.amps[v]
    else:
        out.amps[v] *= np.exp(-1j * phase)
    return out


def default_max_calls(g: LatticeGeometry) -> int:
    """Comfortably past the first peak for d >= 2 at the unbiased setting."""
    return int(math.ceil(math.sqrt(g.N * max(1.0, math.log2(g.N))))) + 10


@dataclass
class SearchConfig:
    geometry: LatticeGeometry
    c: float = UNBIASED_C
    t1: int = 3
    max_calls: int | None = None
    marked: tuple[int, ...] | None = None
    oracle_phase: float = math.pi

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise InputError(f"c must lie in (0, 1), got {self.c}")
        if self.t1 < 1:
            raise InputError(f"t1 must be >= 1, got {self.t1}")
        if self.max_calls is None:
            self.max_calls = default_max_calls(self.geometry)
        if self.max_calls < 1:
            raise InputError(f"max_calls must be >= 1, got {self.max_calls}")
        if self.geometry.N > MAX_SEARCH_SITES:
            raise InputError(f"N = {self.geometry.N} exceeds the desk-scale cap 2**22")
        self.marked = self.geometry.check_site(self.marked or (0,) * self.geometry.d)

    @property
    def odd_offset_marked(self) -> bool:
        """True when the marked vertex is not an even translate of the origin."""
        return any(x % 2 for x in self.marked)


@dataclass
class SearchTrace:
    config: SearchConfig
    p_marked: np.ndarray  # index = oracle calls made, starting at 0
    peak: tuple[int, float] | None = None

    @property
    def calls(self) -> np.ndarray:
        return np.arange(self.p_marked.size)

    @property
    def total_steps(self) -> np.ndarray:
        return self.config.t1 * self.calls

    def rows(self) -> list[list]:
        return [[int(k), int(k * self.config.t1), float(p)] for k, p in zip(self.calls, self.p_marked)]


TRACE_HEADER = ["call", "total_steps", "p_marked"]


def _peak_at(p: np.ndarray, i: int, floor: float, window: int) -> bool:
    lo, hi = max(0, i - window), i + window + 1
    return p[i] > floor and p[i] > p[i - 1] and p[i] >= p[lo:hi].max()


def detect_first_peak(trace: SearchTrace, floor_factor: float = NOISE_FLOOR_FACTOR,
                      window: int = PEAK_WINDOW) -> tuple[int, float]:
    """First call whose probability exceeds ``floor_factor / N`` and dominates ``window`` calls each side.

    A plain local maximum is not enough because of two artefacts: the trace
    can alternate between even and odd calls, and it can wiggle on its way
    up. Candidates too close to the end of the trace to check the full
    window are not accepted.
    """
    p = np.asarray(trace.p_marked)
    if p.size == 0:
        raise InputError("empty trace")
    floor = floor_factor / trace.config.geometry.N
    for i in range(1, p.size - window):
        if _peak_at(p, i, floor, window):
            return i, float(p[i])
    raise PeakNotFoundError(
        f"no peak above {floor_factor:g}/N within {p.size - 1} oracle calls "
        f"(c={trace.config.c:g}, t1={trace.config.t1}); raise max_calls")


class _SearchLoop:
    """Reusable (reflect, ``t1`` walk steps) cycle on a single state buffer."""

    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        e = WalkEngine.create(cfg.geometry, cfg.c)
        self.half_steps = e.half_steps()
        self.state = init_uniform(cfg.geometry)
        self.scratch = AmplitudeField.zeros(cfg.geometry)
        self.phase = -1.0 if cfg.oracle_phase == math.pi else np.exp(-1j * cfg.oracle_phase)

    def cycle(self) -> float:
        (u1, b1), (u2, b2) = self.half_steps
        cur, marked = self.state, self.cfg.marked
        cur.amps[marked] *= self.phase
        for _ in range(self.cfg.t1):
            apply_half_step(cur, u1, b1, out=self.scratch)
            apply_half_step(self.scratch, u2, b2, out=cur)
        return abs(cur.amps[marked]) ** 2


def search_run(cfg: SearchConfig, stop_at_peak: bool = False) -> SearchTrace:
    """Uniform start, then up to ``max_calls`` rounds of (reflect, ``t1`` walk steps).

    With ``stop_at_peak`` the loop ends as soon as the first peak is confirmed.
    """
    loop = _SearchLoop(cfg)
    probs = [abs(loop.state.amps[cfg.marked]) ** 2]
    floor = NOISE_FLOOR_FACTOR / cfg.geometry.N
    for k in range(1, cfg.max_calls + 1):
        probs.append(loop.cycle())
        if stop_at_peak and k > PEAK_WINDOW and _peak_at(np.array(probs), k - PEAK_WINDOW, floor, PEAK_WINDOW):
            break
    trace = SearchTrace(cfg, np.array(probs))
    try:
        trace.peak = detect_first_peak(trace)
    except PeakNotFoundError:
        trace.peak = None
    return trace


def field_after_calls(cfg: SearchConfig, calls: int) -> AmplitudeField:
    """Replay the search for ``calls`` oracle calls and return the state (deterministic)."""
    loop = _SearchLoop(cfg)
    for _ in range(calls):
        loop.cycle()
    return loop.state


@dataclass(frozen=True)
class PeriodicityReport:
    amplitude: float
    omega: float
    phi: float
    offset: float
    r2: float
    cycles: float
    degenerate: bool = False


def _sin2_design(x: np.ndarray, omega: float) -> np.ndarray:
    return np.column_stack([np.cos(2 * omega * x), np.sin(2 * omega * x), np.ones_like(x)])


def periodicity_check(trace: SearchTrace, cycles: int, grid: int = 4000) -> PeriodicityReport:
    """Least-squares fit of ``A sin^2(omega call + phi) + B`` to the trace.

    ``sin^2`` is linear in ``cos 2 omega x``, ``sin 2 omega x`` and a constant,
    so for fixed ``omega`` the optimum is a linear solve. A grid over ``omega``
    finds the basin and a nonlinear polish finishes.
    """
    p = np.asarray(trace.p_marked, dtype=float)
    x = trace.calls.astype(float)
    if p.size < 4:
        raise InputError("trace too short for a periodicity fit")
    ss_tot = float(np.sum((p - p.mean()) ** 2))
    if ss_tot <= 1e-30 * max(1.0, p.size):
        return PeriodicityReport(0.0, 0.0, 0.0, float(p.mean()), 0.0, 0.0, degenerate=True)

    omegas = np.linspace(np.pi / (x[-1] + 1), np.pi / 2, grid)
    best = None
    for om in omegas:
        a = _sin2_design(x, om)
        coef, *_ = np.linalg.lstsq(a, p, rcond=None)
        r = float(np.sum((a @ coef - p) ** 2))
        if best is None or r < best[0]:
            best = (r, om, coef)
    _, om, (cc, cs, const) = best
    # A sin^2(u) + B = A/2 + B - (A/2) cos 2u
    amp = 2 * math.hypot(cc, cs)
    phi = 0.5 * math.atan2(cs, -cc)
    offset = const - amp / 2

    def resid(theta):
        a_, w_, f_, b_ = theta
        return a_ * np.sin(w_ * x + f_) ** 2 + b_ - p

    sol = least_squares(resid, [amp, om, phi, offset], method="lm")
    a_, w_, f_, b_ = sol.x
    r2 = 1.0 - float(np.sum(sol.fun**2)) / ss_tot
    n_cycles = abs(w_) * x[-1] / math.pi
    degenerate = abs(a_) < 1e-12
    if not degenerate and n_cycles < cycles:
        raise InputError(f"trace covers {n_cycles:.1f} oscillations, {cycles} requested; raise max_calls")
    return PeriodicityReport(float(a_), float(abs(w_)), float(f_), float(b_), r2, float(n_cycles), bool(degenerate))


@dataclass
class ScanRow:
    c: float
    t1: int
    peak_call: int | None
    peak_prob: float | None
    best: bool = False

    @property
    def total_steps(self) -> int | None:
        return None if self.peak_call is None else self.peak_call * self.t1

    def row(self) -> list:
        return [self.c, self.t1, self.peak_call, self.peak_prob, self.total_steps]


SCAN_HEADER = ["c", "t1", "peak_call", "peak_prob", "total_steps"]


def _map(fn, items, threads: int):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def scan_parameters(geometry: LatticeGeometry, c_grid, t1_grid, max_calls: int | None = None,
                    threads: int = 1) -> list[ScanRow]:
    """First-peak location for every ``(c, t1)``.

    Rows are sorted by total walk steps to the peak, ties broken by higher
    peak probability; rows without a peak go last. The first row is flagged best.
    """
    if not c_grid or not t1_grid:
        raise InputError("scan grids must be non-empty")
    combos = [(float(c), int(t1)) for c in c_grid for t1 in t1_grid]

    def one(combo):
        c, t1 = combo
        tr = search_run(SearchConfig(geometry, c=c, t1=t1, max_calls=max_calls), stop_at_peak=True)
        if tr.peak is None:
            return ScanRow(c, t1, None, None)
        return ScanRow(c, t1, tr.peak[0], tr.peak[1])

    rows = _map(one, combos, threads)
    rows.sort(key=lambda r: (r.peak_call is None, r.total_steps or 0, -(r.peak_prob or 0.0), r.c, r.t1))
    if rows and rows[0].peak_call is not None:
        rows[0].best = True
    return rows


FORMS = {
    2: ("a/log2(N)", "b*sqrt(N*log2(N))"),
    "high": ("a", "b*sqrt(N)"),
}


def scaling_forms(d: int) -> tuple[str, str, callable, callable]:
    """Regressors for the peak probability and steps-to-peak in dimension ``d``."""
    if d == 2:
        return (*FORMS[2], lambda n: 1 / np.log2(n), lambda n: np.sqrt(n * np.log2(n)))
    if d >= 3:
        return (*FORMS["high"], lambda n: np.ones_like(n), np.sqrt)
    raise InputError(f"scaling forms are defined for d >= 2, got d={d}")


def fit_through_origin(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares ``y ~ a x``; returns ``a`` and the relative RMS residual."""
    a = float(np.dot(x, y) / np.dot(x, x))
    rel = (y - a * x) / y
    return a, float(np.sqrt(np.mean(rel**2)))


@dataclass
class ScalingSample:
    L: int
    N: int
    peak_prob: float
    peak_call: int
    total_steps: int


@dataclass
class ScalingFit:
    d: int
    form_prob: str
    form_steps: str
    a_prob: float
    a_steps: float
    residual_prob: float
    residual_steps: float
    a_steps_calls: float
    residual_steps_calls: float
    samples: list[ScalingSample]
    underdetermined: bool = False

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "form_prob": self.form_prob,
            "form_steps": self.form_steps,
            "steps_unit": "walk_steps",
            "a_prob": self.a_prob,
            "a_steps": self.a_steps,
            "residual_prob": self.residual_prob,
            "residual_steps": self.residual_steps,
            "a_steps_calls": self.a_steps_calls,
            "residual_steps_calls": self.residual_steps_calls,
            "underdetermined": self.underdetermined,
            "samples": [vars(s) for s in self.samples],
        }


def scaling_experiment(d: int, sides, c: float = UNBIASED_C, t1: int = 3, threads: int = 1) -> ScalingFit:
    """Run the search at each cubic side ``L`` and fit the dimension's scaling forms.

    ``a_steps`` fits total walk steps ``t1 * calls`` to the peak;
    ``a_steps_calls`` fits the same form to the oracle-call count.
    """
    sides = [int(L) for L in sides]
    if not sides:
        raise InputError("side list must be non-empty")
    form_p, form_s, xp, xs = scaling_forms(d)

    def one(L):
        g = LatticeGeometry.cubic(d, L)
        tr = search_run(SearchConfig(g, c=c, t1=t1), stop_at_peak=True)
        if tr.peak is None:
            raise ExperimentError(f"no first peak for d={d}, L={L} (N={g.N})")
        return ScalingSample(L, g.N, tr.peak[1], tr.peak[0], tr.peak[0] * t1)

    samples = _map(one, sides, threads)
    n = np.array([s.N for s in samples], dtype=float)
    prob = np.array([s.peak_prob for s in samples])
    calls = np.array([s.peak_call for s in samples], dtype=float)
    a_p, r_p = fit_through_origin(xp(n), prob)
    a_s, r_s = fit_through_origin(xs(n), calls * t1)
    a_c, r_c = fit_through_origin(xs(n), calls)
    return ScalingFit(d, form_p, form_s, a_p, a_s, r_p, r_s, a_c, r_c, samples,
                      underdetermined=len(set(n)) < 2)
