"""Probabilities, moments, peaks and supports measured from amplitude fields."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import InputError, UnwrapError
from .lattice import AmplitudeField, LatticeGeometry
from .spectral import smooth_density


@dataclass
class ProbabilityDistribution:
    geometry: LatticeGeometry
    probs: np.ndarray

    def total(self) -> float:
        return float(self.probs.sum())


@dataclass(frozen=True)
class MomentReport:
    t: int | None
    mean_abs: float
    second: float

    @property
    def rms(self) -> float:
        return math.sqrt(self.second)


def distribution(f: AmplitudeField) -> ProbabilityDistribution:
    return ProbabilityDistribution(f.geometry, np.abs(f.amps) ** 2)


def _require_1d(p: ProbabilityDistribution) -> int:
    if p.geometry.d != 1:
        raise InputError(f"operation needs d=1, got d={p.geometry.d}")
    return p.geometry.sides[0]


def signed_positions(L: int) -> np.ndarray:
    """Ring sites as signed displacements in ``(-L/2, L/2]``, indexed by site."""
    n = np.arange(L)
    return np.where(n > L // 2, n - L, n)


def unwrapped(p: ProbabilityDistribution) -> tuple[np.ndarray, np.ndarray]:
    """Signed positions and probabilities sorted by position."""
    L = _require_1d(p)
    n = signed_positions(L)
    order = np.argsort(n, kind="stable")
    return n[order], p.probs.reshape(-1)[order]


def moments_1d(p: ProbabilityDistribution, center: float = 0.0, t: int | None = None) -> MomentReport:
    """``<|n - center|>`` and ``<(n - center)^2>`` with ``n`` unwrapped around site 0."""
    L = _require_1d(p)
    if p.probs.reshape(-1)[L // 2] != 0.0:
        raise UnwrapError(f"support reaches the antipode n={L // 2}; enlarge the ring")
    n, pr = unwrapped(p)
    x = n - center
    return MomentReport(t, float(np.sum(np.abs(x) * pr)), float(np.sum(x * x * pr)))


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    if window < 1:
        raise InputError(f"window must be >= 1, got {window}")
    return np.convolve(values, np.ones(window) / window, mode="same")


def peak_positions(p: ProbabilityDistribution, window: int = 5, rel_height: float = 0.6) -> list[int]:
    """Maxima of the ``window``-site moving average reaching ``rel_height`` of its maximum.

    The raw distribution alternates rapidly between neighbouring sites, so
    peaks are located on the smoothed curve. Flat tops report their middle.
    """
    n, pr = unwrapped(p)
    sm = moving_average(pr, window)
    # pad so maxima at the ends of the sorted range are still detected
    padded = np.concatenate([[-np.inf], sm, [-np.inf]])
    idx, _ = find_peaks(padded, height=rel_height * sm.max())
    return [int(n[i - 1]) for i in idx]


def support_interval_1d(p: ProbabilityDistribution, eps: float = 0.0) -> tuple[int, int]:
    n, pr = unwrapped(p)
    inside = n[pr > eps]
    if inside.size == 0:
        raise InputError("distribution has no site above the threshold")
    return int(inside.min()), int(inside.max())


def marked_probability(f: AmplitudeField, v) -> float:
    return abs(f[v]) ** 2


def distribution_table(p: ProbabilityDistribution) -> tuple[list[str], list[list]]:
    """``n,prob`` in 1-D, ``x,y,prob`` in 2-D (signed coordinates, sorted)."""
    g = p.geometry
    if g.d == 1:
        n, pr = unwrapped(p)
        return ["n", "prob"], [[int(a), float(b)] for a, b in zip(n, pr)]
    axes = [signed_positions(L) for L in g.sides]
    orders = [np.argsort(a, kind="stable") for a in axes]
    probs = p.probs[np.ix_(*orders)]
    grids = np.meshgrid(*(a[o] for a, o in zip(axes, orders)), indexing="ij")
    names = ["x", "y"] if g.d == 2 else [f"coord_{j + 1}" for j in range(g.d)]
    cols = [gr.reshape(-1) for gr in grids]
    flat = probs.reshape(-1)
    rows = [[*(int(c[i]) for c in cols), float(flat[i])] for i in range(flat.size)]
    return [*names, "prob"], rows


def density_comparison(p: ProbabilityDistribution, t: int, center: float = 0.5) -> tuple[list[str], list[list]]:
    """Rows ``n,p_empirical,p_smooth``; ``p_smooth`` is empty outside ``|n - center| < sqrt(2) t``."""
    n, pr = unwrapped(p)
    rows = []
    for a, b in zip(n, pr):
        x = a - center
        smooth = smooth_density(x, t) if abs(x) < math.sqrt(2) * t else ""
        rows.append([int(a), float(b), smooth])
    return ["n", "p_empirical", "p_smooth"], rows


def binned_density(p: ProbabilityDistribution, t: int, window: int = 4, center: float = 0.5):
    """Average the distribution over aligned bins of ``window`` sites.

    Bins tile ``[-2t + 1, 2t]`` starting at its left edge, so for the
    symmetric walk they are mirror images about ``center``. Returns bin
    centre displacements ``x`` (relative to ``center``) and bin means.
    """
    n, pr = unwrapped(p)
    lo, hi = -2 * t + 1, 2 * t
    sel = (n >= lo) & (n <= hi)
    n, pr = n[sel], pr[sel]
    k = n.size // window * window
    nb = n[:k].reshape(-1, window)
    pb = pr[:k].reshape(-1, window).mean(axis=1)
    return nb.mean(axis=1) - center, pb
