"""Periodic hypercubic lattices, amplitude fields and the odd/even block tiling.

Sites are linearised row-major with coordinate 1 slowest, which is numpy's
C order for an array of shape ``sides``.

Why a single block matrix suffices: an odd block is anchored at a corner
whose coordinates are all even, so inside it the staggered sign
``(-1)**x_j`` equals ``(-1)**eps_j`` for the vertex offset ``eps``. The hopping
signs therefore depend only on the offsets and every odd block carries the
same ``2**d x 2**d`` matrix. Even blocks are the sign-flipped cubes
``anchor - eps`` around the same all-even anchors; flipping the direction of
every hop negates the matrix, giving ``H_even = -H_odd``.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import GeometryError, InputError

Parity = Literal["odd", "even"]


@dataclass(frozen=True)
class LatticeGeometry:
    """Torus with even side lengths ``sides`` in ``d = len(sides)`` dimensions."""

    sides: tuple[int, ...]

    def __post_init__(self):
        sides = tuple(int(s) for s in self.sides)
        object.__setattr__(self, "sides", sides)
        if not sides:
            raise GeometryError("lattice needs at least one dimension")
        for L in sides:
            if L < 2 or L % 2:
                raise GeometryError(f"side lengths must be even and >= 2, got {list(sides)}")

    @classmethod
    def cubic(cls, d: int, L: int) -> "LatticeGeometry":
        if d < 1:
            raise GeometryError(f"dimension must be >= 1, got {d}")
        return cls((L,) * d)

    @property
    def d(self) -> int:
        return len(self.sides)

    @property
    def N(self) -> int:
        return int(np.prod(self.sides))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.sides

    def check_site(self, coords: Sequence[int]) -> tuple[int, ...]:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.d:
            raise InputError(f"site {coords} has {len(coords)} coordinates, lattice has d={self.d}")
        for c, L in zip(coords, self.sides):
            if not 0 <= c < L:
                raise InputError(f"site {coords} out of range for sides {list(self.sides)}")
        return coords

    def wrap(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Reduce arbitrary integer coordinates onto the torus."""
        return tuple(int(c) % L for c, L in zip(coords, self.sides))

    def signed(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Map coordinates to signed displacements in ``(-L/2, L/2]``."""
        return tuple(c - L if c > L // 2 else c for c, L in zip(self.wrap(coords), self.sides))


def linear_index(g: LatticeGeometry, coords: Sequence[int]) -> int:
    coords = g.check_site(coords)
    return int(np.ravel_multi_index(coords, g.shape))


def coords_of(g: LatticeGeometry, index: int) -> tuple[int, ...]:
    if not 0 <= index < g.N:
        raise InputError(f"linear index {index} out of range [0, {g.N})")
    return tuple(int(c) for c in np.unravel_index(index, g.shape))


@dataclass
class AmplitudeField:
    """One complex amplitude per site, stored as an array of shape ``geometry.sides``."""

    geometry: LatticeGeometry
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.size != self.geometry.N:
            raise InputError(f"expected {self.geometry.N} amplitudes, got {amps.size}")
        self.amps = amps.reshape(self.geometry.shape)

    @classmethod
    def zeros(cls, g: LatticeGeometry) -> "AmplitudeField":
        return cls(g, np.zeros(g.shape, dtype=np.complex128))

    def copy(self) -> "AmplitudeField":
        return AmplitudeField(self.geometry, self.amps.copy())

    def __getitem__(self, coords) -> complex:
        return complex(self.amps[self.geometry.check_site(coords)])

    @property
    def flat(self) -> np.ndarray:
        """Amplitudes in linear-index order (a view)."""
        return self.amps.reshape(-1)


def norm_sq(f: AmplitudeField) -> float:
    return float(np.vdot(f.amps, f.amps).real)


def translate(f: AmplitudeField, v: Sequence[int]) -> AmplitudeField:
    """Return ``psi'(x) = psi(x - v)`` with periodic wrap."""
    if len(v) != f.geometry.d:
        raise InputError(f"translation {list(v)} does not match d={f.geometry.d}")
    return AmplitudeField(f.geometry, np.roll(f.amps, tuple(int(s) for s in v), axis=tuple(range(f.geometry.d))))


def vertex_offsets(d: int) -> list[tuple[int, ...]]:
    """Offsets ``(eps_1, ..., eps_d)`` in block vertex order, ``eps_1`` fastest."""
    return [tuple(reversed(bits)) for bits in itertools.product((0, 1), repeat=d)]


@dataclass(frozen=True)
class BlockList:
    """Blocks of one parity; ``index[b, k]`` is the linear site of vertex ``k`` of block ``b``."""

    parity: Parity
    index: np.ndarray = field(repr=False)

    @property
    def blocks(self) -> list[tuple[int, ...]]:
        return [tuple(int(i) for i in row) for row in self.index]

    def __len__(self) -> int:
        return self.index.shape[0]


def partition_blocks(g: LatticeGeometry, parity: Parity) -> BlockList:
    """Tile the torus with elementary hypercubes of one parity.

    Odd blocks are ``anchor + eps`` and even blocks ``anchor - eps`` for every
    all-even ``anchor``, vertices ordered as in ``vertex_offsets``.
    """
    if parity not in ("odd", "even"):
        raise InputError(f"parity must be 'odd' or 'even', got {parity!r}")
    sign = 1 if parity == "odd" else -1
    anchors = np.meshgrid(*(np.arange(0, L, 2) for L in g.sides), indexing="ij")
    anchors = [a.reshape(-1) for a in anchors]
    cols = []
    for eps in vertex_offsets(g.d):
        coords = [(a + sign * e) % L for a, e, L in zip(anchors, eps, g.sides)]
        cols.append(np.ravel_multi_index(coords, g.shape))
    index = np.stack(cols, axis=1).astype(np.intp)
    index.setflags(write=False)
    return BlockList(parity, index)


def links(g: LatticeGeometry) -> set[frozenset[int]]:
    """All nearest-neighbour links of the torus as unordered index pairs."""
    out = set()
    for x in itertools.product(*(range(L) for L in g.sides)):
        i = int(np.ravel_multi_index(x, g.shape))
        for j in range(g.d):
            y = list(x)
            y[j] += 1
            out.add(frozenset((i, int(np.ravel_multi_index(g.wrap(y), g.shape)))))
    return out


def block_links(g: LatticeGeometry, blocks: BlockList) -> list[frozenset[int]]:
    """Links internal to the blocks: vertex pairs whose offsets differ in one bit."""
    offsets = vertex_offsets(g.d)
    pairs = [(a, b) for a, b in itertools.combinations(range(len(offsets)), 2)
             if sum(x != y for x, y in zip(offsets[a], offsets[b])) == 1]
    return [frozenset((int(blk[a]), int(blk[b]))) for blk in blocks.index for a, b in pairs]


def field_table(f: AmplitudeField) -> tuple[list[str], list[list]]:
    """Header and rows ``index,coord_1..coord_d,re,im,prob`` in linear order."""
    g = f.geometry
    header = ["index", *(f"coord_{j + 1}" for j in range(g.d)), "re", "im", "prob"]
    coords = np.unravel_index(np.arange(g.N), g.shape)
    flat = f.flat
    probs = np.abs(flat) ** 2
    rows = [[i, *(int(c[i]) for c in coords), float(flat[i].real), float(flat[i].imag), float(probs[i])]
            for i in range(g.N)]
    return header, rows


def write_field_csv(f: AmplitudeField, path) -> None:
    header, rows = field_table(f)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows([fmt_float(x) if isinstance(x, float) else x for x in row] for row in rows)


def fmt_float(x: float) -> str:
    return repr(float(x))
