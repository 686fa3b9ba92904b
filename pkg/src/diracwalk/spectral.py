"""Fourier analysis of the 1-D walk at ``c = s = 1/sqrt(2)``.

With the per-site transform ``A(k) = sum_n exp(i k n) psi(n)`` split into
even and odd sites, one step acts on ``(A_even(k), A_odd(k))`` as the
transfer matrix

    M(k) = [[exp(ik) cos k, -i sin k], [-i sin k, exp(-ik) cos k]]

exactly, with no extra phase convention. On a ring of ``L`` sites the
allowed values are ``k = pi j / m`` for ``m = L/2`` unit cells and
``j = 0..m-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, InputError
from .lattice import AmplitudeField

DEGENERATE_TOL = 1e-12


def transfer_matrix(k) -> np.ndarray:
    """``M(k)``; an array of shape ``(..., 2, 2)`` for array ``k``."""
    k = np.asarray(k, dtype=float)
    ck, sk = np.cos(k), np.sin(k)
    m = np.empty(k.shape + (2, 2), dtype=np.complex128)
    m[..., 0, 0] = np.exp(1j * k) * ck
    m[..., 0, 1] = -1j * sk
    m[..., 1, 0] = -1j * sk
    m[..., 1, 1] = np.exp(-1j * k) * ck
    return m


def dispersion(k):
    """``omega_k = arccos(cos(k)**2)`` in ``[0, pi]``."""
    return np.arccos(np.clip(np.cos(k) ** 2, -1.0, 1.0))


def eigenvalues(k):
    """``(lambda_plus, lambda_minus) = cos^2 k +- i sin k sqrt(1 + cos^2 k)``."""
    k = np.asarray(k, dtype=float)
    re = np.cos(k) ** 2
    im = np.sin(k) * np.sqrt(1 + np.cos(k) ** 2)
    return re + 1j * im, re - 1j * im


def _is_degenerate(k) -> np.ndarray:
    return np.abs(np.sin(k)) < DEGENERATE_TOL


def eigenvectors(k):
    """Normalised ``(e_plus, e_minus)``, each of shape ``(..., 2)``.

    ``e_pm ~ (-cos k -+ sqrt(1 + cos^2 k), 1)``. At ``k in {0, pi}`` the
    matrix is diagonal and the standard basis is returned.
    """
    k = np.asarray(k, dtype=float)
    ck = np.cos(k)
    root = np.sqrt(1 + ck**2)
    vecs = []
    for sign, unit in ((1, (1.0, 0.0)), (-1, (0.0, 1.0))):
        v = np.stack([-ck - sign * root, np.ones_like(ck)], axis=-1).astype(np.complex128)
        v /= np.linalg.norm(v, axis=-1, keepdims=True)
        degen = _is_degenerate(k)
        if np.any(degen):
            v[degen] = unit
        vecs.append(v)
    return vecs[0], vecs[1]


@dataclass
class SpectralState:
    """Two-component amplitudes ``(A_even, A_odd)`` at each allowed ``k``."""

    k: np.ndarray
    amps: np.ndarray  # shape (m, 2)

    @property
    def cells(self) -> int:
        return self.k.size

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2) / self.cells)


def _check_ring(f: AmplitudeField) -> int:
    g = f.geometry
    if g.d != 1:
        raise InputError(f"spectral propagation needs d=1, got d={g.d}")
    return g.sides[0] // 2


def to_spectral(f: AmplitudeField) -> SpectralState:
    m = _check_ring(f)
    k = np.pi * np.arange(m) / m
    psi = f.amps
    # sum_m exp(2 i k m) psi(2m) is m * ifft over unit cells
    a_even = m * np.fft.ifft(psi[0::2])
    a_odd = m * np.fft.ifft(psi[1::2]) * np.exp(1j * k)
    return SpectralState(k, np.stack([a_even, a_odd], axis=1))


def from_spectral(s: SpectralState, g) -> AmplitudeField:
    m = s.cells
    psi = np.empty(2 * m, dtype=np.complex128)
    psi[0::2] = np.fft.fft(s.amps[:, 0]) / m
    psi[1::2] = np.fft.fft(s.amps[:, 1] * np.exp(-1j * s.k)) / m
    return AmplitudeField(g, psi)


def evolve_spectral(s: SpectralState, t: int) -> SpectralState:
    """``A(k, t) = lambda_+^t P_+ A(k, 0) + lambda_-^t P_- A(k, 0)``."""
    if t < 0:
        raise InputError(f"step count must be >= 0, got {t}")
    e_plus, e_minus = eigenvectors(s.k)
    lam_plus, lam_minus = eigenvalues(s.k)
    proj_plus = np.sum(e_plus.conj() * s.amps, axis=1)
    proj_minus = np.sum(e_minus.conj() * s.amps, axis=1)
    out = (lam_plus**t * proj_plus)[:, None] * e_plus + (lam_minus**t * proj_minus)[:, None] * e_minus
    degen = _is_degenerate(s.k)
    if np.any(degen):
        # M(0) = I: the mode does not move
        out[degen] = s.amps[degen]
    return SpectralState(s.k, out)


def spectral_propagate(f: AmplitudeField, t: int) -> AmplitudeField:
    return from_spectral(evolve_spectral(to_spectral(f), t), f.geometry)


def smooth_density(n, t: float):
    """Stationary-phase average of the symmetric walk's distribution.

    Defined for ``|n| < sqrt(2) t``; pass ``n - 1/2`` to compare against the
    discrete walk centred on ``1/2``.
    """
    n = np.asarray(n, dtype=float)
    if t <= 0:
        raise DomainError(f"t must be positive, got {t}")
    if np.any(np.abs(n) >= math.sqrt(2) * t):
        raise DomainError(f"smooth density needs |n| < sqrt(2) t = {math.sqrt(2) * t:g}")
    four_t2 = 4.0 * t * t
    rho = four_t2 / (np.pi * np.sqrt(four_t2 - 2 * n * n) * (four_t2 - n * n))
    return float(rho) if rho.ndim == 0 else rho


def smooth_moments(t: float) -> tuple[float, float, float]:
    """Closed-form ``(integral, <|n|>, <n^2>) = (1, t, 2 (2 - sqrt 2) t^2)``."""
    if t < 1:
        raise DomainError(f"moments need t >= 1, got {t}")
    return 1.0, float(t), 2 * (2 - math.sqrt(2)) * t * t


def smooth_moments_quadrature(t: float) -> tuple[float, float, float]:
    """Same moments by quadrature after ``n = sqrt(2) t sin(phi)``.

    The substitution cancels the inverse-square-root edge singularity, leaving
    the smooth integrand ``sqrt(2) / (pi (2 - sin^2 phi))`` times ``|n|^p``.
    """
    if t < 1:
        raise DomainError(f"moments need t >= 1, got {t}")
    a = math.sqrt(2) * t

    def integrand(phi, power):
        return (a * abs(math.sin(phi))) ** power * math.sqrt(2) / (math.pi * (2 - math.sin(phi) ** 2))

    kw = dict(epsabs=0, epsrel=1e-12, limit=200)
    m0 = integrate.quad(integrand, -math.pi / 2, math.pi / 2, args=(0,), **kw)[0]
    m1 = 2 * integrate.quad(integrand, 0, math.pi / 2, args=(1,), **kw)[0]
    m2 = integrate.quad(integrand, -math.pi / 2, math.pi / 2, args=(2,), **kw)[0]
    return m0, m1, m2


def dispersion_table(samples: int) -> tuple[list[str], list[list[float]]]:
    """Rows ``k,omega,re_lambda_plus,im_lambda_plus`` on ``k = -pi + 2 pi j / samples``."""
    if samples < 1:
        raise InputError(f"samples must be >= 1, got {samples}")
    k = -np.pi + 2 * np.pi * np.arange(samples) / samples
    lam, _ = eigenvalues(k)
    om = dispersion(k)
    rows = [[float(a), float(b), float(c.real), float(c.imag)] for a, b, c in zip(k, om, lam)]
    return ["k", "omega", "re_lambda_plus", "im_lambda_plus"], rows
