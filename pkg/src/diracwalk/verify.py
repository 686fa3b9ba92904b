"""Fast invariant suite behind ``diracwalk verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import evolve as ev
from .dirac_blocks import (MixingParams, build_block_hamiltonian, exponentiate_block,
                           unitarity_defect, verify_block_algebra)
from .lattice import LatticeGeometry
from .observables import distribution, support_interval_1d
from .spectral import spectral_propagate


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_block_algebra() -> CheckResult:
    worst = 0.0
    p = MixingParams.from_c(ev.UNBIASED_C)
    for d in range(1, 7):
        for parity in ("odd", "even"):
            h = build_block_hamiltonian(d, parity)
            r = verify_block_algebra(h)
            worst = max(worst, r.hermiticity, r.square, unitarity_defect(exponentiate_block(h, p)))
    return CheckResult("block algebra d=1..6", worst < 1e-12, f"max deviation {worst:.2e}")


def step_image(n: int, L: int) -> np.ndarray:
    """``(|n-1> + |n> - |n+1> + |n + 2(-1)^n>) / 2`` on a ring."""
    v = np.zeros(L)
    for site, coef in ((n - 1, 1), (n, 1), (n + 1, -1), (n + 2 * (-1) ** n, 1)):
        v[site % L] += coef / 2
    return v


def check_step_equation(L: int = 64) -> CheckResult:
    g = LatticeGeometry((L,))
    e = ev.WalkEngine.create(g)
    worst = 0.0
    for n in range(L):
        f = ev.step(e, ev.init_delta(g, (n,)))
        worst = max(worst, float(np.max(np.abs(f.amps - step_image(n, L)))))
    return CheckResult(f"step equation, all basis states, L={L}", worst <= 1e-14, f"max deviation {worst:.2e}")


def check_confinement(t_max: int = 100, L: int = 512) -> CheckResult:
    g = LatticeGeometry((L,))
    e = ev.WalkEngine.create(g)
    f = ev.init_delta(g)
    bad = []
    for t in range(1, t_max + 1):
        f = ev.step(e, f)
        lo, hi = support_interval_1d(distribution(f))
        if lo < -2 * t + 1 or hi > 2 * t:
            bad.append(t)
    return CheckResult(f"confinement to [-2t+1, 2t], t<={t_max}", not bad, f"violations at t={bad[:5]}" if bad else "ok")


def check_absorption(L: int = 4096, t: int = 1000) -> CheckResult:
    g = LatticeGeometry((L,))
    _, absorbed = ev.run_absorbing_1d(ev.AbsorbingWalkState(ev.init_symmetric_1d(g)), t)
    ok = abs(absorbed[0] - 0.25) < 1e-12 and abs(absorbed[1] - 0.375) < 1e-12 and abs(absorbed[-1] - 0.4098) <= 1e-3
    return CheckResult("absorption constants", ok,
                       f"P_abs(1)={absorbed[0]!r} P_abs(2)={absorbed[1]!r} P_abs({t})={absorbed[-1]:.6f}")


def check_spectral(L: int = 512, t: int = 100) -> CheckResult:
    g = LatticeGeometry((L,))
    worst = 0.0
    for f0 in (ev.init_delta(g), ev.init_symmetric_1d(g)):
        direct = ev.run(ev.WalkEngine.create(g), f0, t)
        worst = max(worst, float(np.max(np.abs(direct.amps - spectral_propagate(f0, t).amps))))
    return CheckResult(f"spectral vs direct, t={t}, L={L}", worst < 1e-8, f"max deviation {worst:.2e}")


def check_dense_oracle(seed: int = 0, states: int = 10) -> CheckResult:
    g = LatticeGeometry((8, 8))
    e = ev.WalkEngine.create(g)
    w = ev.assemble_dense_walk(e)
    worst = 0.0
    for i in range(states):
        f = ev.init_random(g, seed + i)
        worst = max(worst, float(np.max(np.abs(ev.step(e, f).flat - w @ f.flat))))
    return CheckResult("blockwise vs dense 64x64 walk", worst < 1e-12, f"max deviation {worst:.2e}")


def run_all(seed: int = 0) -> list[CheckResult]:
    return [
        check_block_algebra(),
        check_step_equation(),
        check_confinement(),
        check_absorption(),
        check_spectral(),
        check_dense_oracle(seed),
    ]


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}" for r in results]
    return "\n".join(lines)
