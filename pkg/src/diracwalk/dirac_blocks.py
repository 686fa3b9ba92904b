"""Staggered Dirac block Hamiltonians and their exact exponentials.

Pauli conventions: ``sigma_2 = [[0, -i], [i, 0]]``, ``sigma_3 = diag(1, -1)``.
In a Kronecker product the rightmost factor acts on the least significant
vertex bit, which is the ``eps_1`` offset (see ``lattice.vertex_offsets``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import AlgebraError, InputError
from .lattice import Parity

SIGMA_2 = np.array([[0, -1j], [1j, 0]])
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)

MAX_DIMENSION = 12


@dataclass(frozen=True)
class MixingParams:
    """Diagonal weight ``c`` and hopping weight ``s`` with ``c**2 + s**2 = 1``."""

    c: float
    s: float

    def __post_init__(self):
        if not (0.0 <= self.c <= 1.0 and 0.0 <= self.s <= 1.0):
            raise InputError(f"c and s must lie in [0, 1], got c={self.c}, s={self.s}")
        if abs(self.c**2 + self.s**2 - 1.0) > 1e-12:
            raise InputError(f"c**2 + s**2 must equal 1, got {self.c**2 + self.s**2!r}")

    @classmethod
    def from_c(cls, c: float) -> "MixingParams":
        if not 0.0 <= c <= 1.0:
            raise InputError(f"c must lie in [0, 1], got {c}")
        return cls(float(c), math.sqrt(max(0.0, 1.0 - c * c)))

    @classmethod
    def from_angle(cls, theta: float) -> "MixingParams":
        return cls(math.cos(theta), math.sin(theta))


@dataclass(frozen=True)
class BlockHamiltonian:
    d: int
    parity: Parity
    mat: np.ndarray


@dataclass(frozen=True)
class BlockUnitary:
    d: int
    parity: Parity
    params: MixingParams
    mat: np.ndarray

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def s(self) -> float:
        return self.params.s


def _kron_all(factors) -> np.ndarray:
    return reduce(np.kron, factors, np.eye(1, dtype=np.complex128))


@lru_cache(maxsize=None)
def _odd_block(d: int) -> np.ndarray:
    total = np.zeros((2**d, 2**d), dtype=np.complex128)
    for j in range(1, d + 1):
        total += _kron_all([IDENTITY_2] * (d - j) + [SIGMA_2] + [SIGMA_3] * (j - 1))
    total *= -0.5
    total.setflags(write=False)
    return total


def build_block_hamiltonian(d: int, parity: Parity) -> BlockHamiltonian:
    """Return ``H_odd = -1/2 sum_j I^(d-j) (x) sigma_2 (x) sigma_3^(j-1)`` or ``H_even = -H_odd``."""
    if not 1 <= d <= MAX_DIMENSION:
        raise InputError(f"dimension must be in 1..{MAX_DIMENSION}, got {d}")
    if parity not in ("odd", "even"):
        raise InputError(f"parity must be 'odd' or 'even', got {parity!r}")
    mat = _odd_block(d) if parity == "odd" else -_odd_block(d)
    return BlockHamiltonian(d, parity, mat)


@dataclass(frozen=True)
class AlgebraReport:
    hermiticity: float
    square: float

    def ok(self, tol: float = 1e-12) -> bool:
        return self.hermiticity < tol and self.square < tol


def verify_block_algebra(h: BlockHamiltonian) -> AlgebraReport:
    """Max elementwise deviations of ``H - H^dagger`` and ``H^2 - (d/4) I``."""
    m = h.mat
    herm = float(np.max(np.abs(m - m.conj().T)))
    sq = float(np.max(np.abs(m @ m - (h.d / 4) * np.eye(2**h.d))))
    return AlgebraReport(herm, sq)


def exponentiate_block(h: BlockHamiltonian, p: MixingParams) -> BlockUnitary:
    """``c I - i s (2/sqrt(d)) H``, exact because ``H^2`` is a multiple of identity.

    With ``c = cos(theta)`` this equals ``expm(-1j * theta * 2/sqrt(d) * H)``.
    """
    report = verify_block_algebra(h)
    if not report.ok(1e-10):
        raise AlgebraError(f"block fails H^2 = (d/4) I: {report}")
    mat = p.c * np.eye(2**h.d) - 1j * p.s * (2.0 / math.sqrt(h.d)) * h.mat
    mat.setflags(write=False)
    return BlockUnitary(h.d, h.parity, p, mat)


@lru_cache(maxsize=256)
def block_unitary(d: int, parity: Parity, c: float) -> BlockUnitary:
    """Cached ``exponentiate_block(build_block_hamiltonian(d, parity), c)``."""
    return exponentiate_block(build_block_hamiltonian(d, parity), MixingParams.from_c(c))


def unitarity_defect(u: BlockUnitary) -> float:
    m = u.mat
    return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))


def block_to_dict(u: BlockUnitary) -> dict:
    return {
        "d": u.d,
        "parity": u.parity,
        "c": u.c,
        "s": u.s,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in u.mat],
    }


def dump_block_json(u: BlockUnitary, path) -> None:
    with open(path, "w") as fh:
        json.dump(block_to_dict(u), fh, indent=2)
