"""Blockwise application of the walk operator ``W = U_even U_odd``.

One time step is one full application of ``W``: the odd half-step first,
then the even half-step. Blocks within a half-step are disjoint, so the
gather/multiply/scatter below is exact regardless of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dirac_blocks import BlockUnitary, MixingParams, block_unitary
from .errors import InputError
from .lattice import AmplitudeField, BlockList, LatticeGeometry, norm_sq, partition_blocks

UNBIASED_C = math.sqrt(0.5)


def init_delta(g: LatticeGeometry, v=None) -> AmplitudeField:
    v = (0,) * g.d if v is None else g.check_site(v)
    f = AmplitudeField.zeros(g)
    f.amps[v] = 1.0
    return f


def init_symmetric_1d(g: LatticeGeometry) -> AmplitudeField:
    """``(|0> + i|1>) / sqrt(2)``; its distribution stays symmetric under ``n -> 1 - n``."""
    if g.d != 1:
        raise InputError(f"symmetric 1-D start needs d=1, got d={g.d}")
    return init_symmetric(g)


def init_symmetric(g: LatticeGeometry) -> AmplitudeField:
    """``(|0,...,0> + i|1,...,1>) / sqrt(2)``, the diagonal generalisation used for 2-D pictures."""
    f = AmplitudeField.zeros(g)
    f.amps[(0,) * g.d] = 1 / math.sqrt(2)
    f.amps[(1,) * g.d] = 1j / math.sqrt(2)
    return f


def init_uniform(g: LatticeGeometry) -> AmplitudeField:
    return AmplitudeField(g, np.full(g.shape, 1 / math.sqrt(g.N), dtype=np.complex128))


def init_random(g: LatticeGeometry, seed: int) -> AmplitudeField:
    rng = np.random.default_rng(seed)
    a = rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape)
    return AmplitudeField(g, a / np.linalg.norm(a))


def apply_half_step(f: AmplitudeField, u: BlockUnitary, blocks: BlockList, out: AmplitudeField | None = None) -> AmplitudeField:
    """Multiply the amplitudes of every block (in vertex order) by ``u.mat``."""
    if u.d != f.geometry.d:
        raise InputError(f"block unitary has d={u.d}, field has d={f.geometry.d}")
    if u.parity != blocks.parity:
        raise InputError(f"{u.parity} unitary applied to {blocks.parity} blocks")
    if blocks.index.shape != (f.geometry.N >> f.geometry.d, 2**f.geometry.d):
        raise InputError("block list does not match field geometry")
    src = f.flat
    res = out if out is not None else AmplitudeField.zeros(f.geometry)
    dst = res.flat
    dst[blocks.index] = src[blocks.index] @ u.mat.T
    return res


@dataclass
class WalkEngine:
    geometry: LatticeGeometry
    params: MixingParams
    u_odd: BlockUnitary
    u_even: BlockUnitary
    odd_blocks: BlockList = field(repr=False)
    even_blocks: BlockList = field(repr=False)
    step_count: int = 0
    # even half-step first; experimentation only
    swap_order: bool = False

    @classmethod
    def create(cls, g: LatticeGeometry, c: float = UNBIASED_C, swap_order: bool = False) -> "WalkEngine":
        p = MixingParams.from_c(c)
        return cls(
            geometry=g,
            params=p,
            u_odd=block_unitary(g.d, "odd", p.c),
            u_even=block_unitary(g.d, "even", p.c),
            odd_blocks=partition_blocks(g, "odd"),
            even_blocks=partition_blocks(g, "even"),
            swap_order=swap_order,
        )

    def half_steps(self):
        pairs = [(self.u_odd, self.odd_blocks), (self.u_even, self.even_blocks)]
        return pairs[::-1] if self.swap_order else pairs


def step(e: WalkEngine, f: AmplitudeField) -> AmplitudeField:
    (u1, b1), (u2, b2) = e.half_steps()
    mid = apply_half_step(f, u1, b1)
    res = apply_half_step(mid, u2, b2)
    e.step_count += 1
    return res


def run(e: WalkEngine, f: AmplitudeField, t: int) -> AmplitudeField:
    if t < 0:
        raise InputError(f"step count must be >= 0, got {t}")
    (u1, b1), (u2, b2) = e.half_steps()
    cur = f.copy()
    scratch = AmplitudeField.zeros(f.geometry)
    for _ in range(t):
        apply_half_step(cur, u1, b1, out=scratch)
        apply_half_step(scratch, u2, b2, out=cur)
    e.step_count += t
    return cur


def assemble_dense_walk(e: WalkEngine) -> np.ndarray:
    """Explicit ``N x N`` matrix of one walk step, built column by column from the blocks."""
    g = e.geometry
    mats = []
    for u, blocks in e.half_steps():
        m = np.zeros((g.N, g.N), dtype=np.complex128)
        for row in blocks.index:
            m[np.ix_(row, row)] = u.mat
        mats.append(m)
    return mats[1] @ mats[0]


@dataclass
class AbsorbingWalkState:
    """1-D walk with a fully absorbing wall between ``n = -1`` and ``n = 0``."""

    field: AmplitudeField
    absorbed: float = 0.0
    t: int = 0

    def __post_init__(self):
        if self.field.geometry.d != 1:
            raise InputError(f"absorbing wall is only defined in d=1, got d={self.field.geometry.d}")


def negative_sites(g: LatticeGeometry) -> np.ndarray:
    """Mask of ring sites whose signed displacement is negative."""
    n = np.arange(g.sides[0])
    return n > g.sides[0] // 2


def step_absorbing_1d(s: AbsorbingWalkState, e: WalkEngine | None = None) -> AbsorbingWalkState:
    """One ``W`` step followed by the projection onto ``n >= 0``."""
    g = s.field.geometry
    if g.d != 1:
        raise InputError(f"absorbing wall is only defined in d=1, got d={g.d}")
    if e is None:
        e = WalkEngine.create(g)
    f = step(e, s.field)
    mask = negative_sites(g)
    removed = float(np.sum(np.abs(f.amps[mask]) ** 2))
    f.amps[mask] = 0.0
    return AbsorbingWalkState(f, s.absorbed + removed, s.t + 1)


def run_absorbing_1d(s: AbsorbingWalkState, t: int, e: WalkEngine | None = None) -> tuple[AbsorbingWalkState, list[float]]:
    """Advance ``t`` steps; returns the final state and cumulative absorption after each step."""
    if e is None:
        e = WalkEngine.create(s.field.geometry)
    absorbed = []
    for _ in range(t):
        s = step_absorbing_1d(s, e)
        absorbed.append(s.absorbed)
    return s, absorbed


def remaining_norm(s: AbsorbingWalkState) -> float:
    return norm_sq(s.field)
