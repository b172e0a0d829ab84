"""Reflection matrices of a conducting sheet on the imaginary frequency axis.

Two independent routes are provided:

* :func:`reflection_full` solves the interface problem for a general 2x2
  conductivity tensor, optionally on an isotropic (eps, mu) substrate, by
  analytic continuation omega -> i xi, k_z -> i K of the real-frequency
  boundary-condition solution.
* :func:`reflection_delta_form` evaluates the closed form written in terms of
  the degree of anisotropy delta and sigma_t / sigma0, valid for tensors
  without off-diagonal part.

Everything broadcasts over arrays.  Inside the delta form all wavevectors
are scaled by K, so only the ratio a = xi / (c K) in [0, 1] appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import C_LIGHT, EPS0, MU0, SIGMA0
from .errors import SingularDenominatorError
from .response import ConductivityTensor

__all__ = [
    "WaveArgs",
    "SubstrateParams",
    "ReflectionMatrix",
    "rotate_conductivity",
    "reflection_full",
    "reflection_delta_form",
    "reflection_delta_form_dphi",
    "delta_form_kernel",
    "weak_anisotropy_split",
    "WeakSplit",
    "WeakCurvature",
    "weak_split_curvature",
]

DELTA_UNDERFLOW = 1e-300


@dataclass(frozen=True)
class WaveArgs:
    """Imaginary frequency xi (rad/s), in-plane wavenumber k_par (1/m), angle phi (rad)."""

    xi: float
    k_par: float
    phi: float = 0.0

    @property
    def K(self):
        return np.sqrt((np.asarray(self.xi) / C_LIGHT) ** 2 + np.asarray(self.k_par) ** 2)


@dataclass(frozen=True)
class SubstrateParams:
    """Isotropic substrate: absolute permittivity (F/m) and permeability (H/m)."""

    epsilon: float = EPS0
    mu: float = MU0


class ReflectionMatrix(NamedTuple):
    rss: np.ndarray
    rsp: np.ndarray
    rps: np.ndarray
    rpp: np.ndarray

    def as_array(self):
        """Stacked ``(..., 2, 2)`` array [[rss, rsp], [rps, rpp]]."""
        rss, rsp, rps, rpp = np.broadcast_arrays(*self)
        return np.stack([np.stack([rss, rsp], -1), np.stack([rps, rpp], -1)], -2)


def rotate_conductivity(ct, phi):
    """Conductivity in the frame rotated counter-clockwise by ``phi``.

    Keeps the off-diagonal entries; the determinant is invariant.
    """
    s, c = np.sin(phi), np.cos(phi)
    sxx, sxy, syx, syy = ct.sxx, ct.sxy, ct.syx, ct.syy
    rxx = sxx * c**2 + syy * s**2 + (sxy + syx) * s * c
    rxy = (syy - sxx) * s * c + sxy * c**2 - syx * s**2
    ryx = (syy - sxx) * s * c - sxy * s**2 + syx * c**2
    ryy = sxx * s**2 + syy * c**2 - (sxy + syx) * s * c
    return ConductivityTensor(rxx, rxy, ryx, ryy, ct.frequency)


def reflection_full(ct, w, substrate=None):
    """Reflection matrix of a sheet with arbitrary conductivity tensor.

    Parameters
    ----------
    ct : ConductivityTensor
        Conductivity at i*xi in siemens, in the crystal frame.
    w : WaveArgs
    substrate : SubstrateParams, optional
        ``None`` means vacuum on both sides.

    Returns
    -------
    ReflectionMatrix
        Real parts of the continued coefficients (imaginary parts vanish for
        real sigma on the imaginary axis).
    """
    rot = rotate_conductivity(ct, w.phi)
    sxx, sxy, syx, syy = (np.asarray(v, dtype=complex) for v in (rot.sxx, rot.sxy, rot.syx, rot.syy))
    xi = np.asarray(w.xi, dtype=float)
    kx = np.asarray(w.k_par, dtype=float)
    K = w.K
    omega = 1j * xi
    kz = 1j * K
    det = sxx * syy - sxy * syx
    if substrate is None:
        a = MU0 * omega * (2 * omega * syy * EPS0 + kz * det)
        b = 2 * kz * (2 * EPS0 * omega + kz * sxx)
        delta = a + b
        num_ss = -a
        num_pp = MU0 * omega * kz * det + 2 * kz**2 * sxx
        num_ps = 2 * sxy * kz * omega / C_LIGHT
        num_sp = -2 * syx * kz * omega / C_LIGHT
    else:
        eps, mu = substrate.epsilon, substrate.mu
        q = 1j * np.sqrt(eps * mu * xi**2 + kx**2)
        t1 = mu * omega * (omega * syy * MU0 * (EPS0 * q + eps * kz) + MU0 * q * kz * det)
        t1m = mu * omega * (omega * syy * MU0 * (-EPS0 * q + eps * kz) + MU0 * q * kz * det)
        pbr = EPS0 * q * omega + kz * (q * sxx + omega * eps)
        mbr = -EPS0 * q * omega + kz * (q * sxx + omega * eps)
        delta = t1 + (mu * kz + MU0 * q) * pbr
        num_ss = -t1 + (mu * kz - MU0 * q) * pbr
        num_pp = t1m + (mu * kz + MU0 * q) * mbr
        num_ps = 2 * sxy * q * kz * mu * omega / C_LIGHT
        num_sp = -2 * syx * q * kz * mu * omega / C_LIGHT
    if np.any(np.abs(delta) < DELTA_UNDERFLOW):
        raise SingularDenominatorError("reflection denominator underflowed")
    return ReflectionMatrix(
        *(np.real(n / delta) for n in (num_ss, num_sp, num_ps, num_pp))
    )


def delta_form_kernel(a, sigma_t, delta, cos2, sin2):
    """Numerators and denominator of the delta-form coefficients.

    All arguments broadcast; ``a = xi / (c K)``.  Returns
    ``(n_ss, n_sp, n_ps, n_pp, den)`` with every term scaled by 1/K^2.
    """
    p = 0.25 * a * sigma_t**2 * (1.0 - delta**2)
    minus = sigma_t * (1.0 - delta * cos2)
    plus = sigma_t * (1.0 + delta * cos2)
    off = a * sigma_t * delta * sin2
    n_ss = -(a * a * minus + p)
    n_pp = p + plus
    den = a * a * minus + p + plus + 4.0 * a
    return n_ss, off, -off, n_pp, den


def _check_den(den):
    if np.any(np.abs(den) < DELTA_UNDERFLOW):
        raise SingularDenominatorError("reflection denominator underflowed")


def reflection_delta_form(aniso, w):
    """Delta-form reflection matrix for a tensor without off-diagonal part.

    Parameters
    ----------
    aniso : AnisotropyDecomposition
        delta and sigma_t / sigma0 at the frequency ``w.xi``.
    w : WaveArgs
    """
    a = np.asarray(w.xi) / (C_LIGHT * w.K)
    two_phi = 2.0 * np.asarray(w.phi)
    n_ss, n_sp, n_ps, n_pp, den = delta_form_kernel(
        a, aniso.sigma_t_tilde, aniso.delta, np.cos(two_phi), np.sin(two_phi)
    )
    _check_den(den)
    return ReflectionMatrix(n_ss / den, n_sp / den, n_ps / den, n_pp / den)


def delta_form_dphi(a, sigma_t, delta, cos2, sin2):
    """Delta-form coefficients and their derivatives with respect to phi.

    Returns two tuples ``(rss, rsp, rps, rpp)`` and ``(d rss, ..., d rpp)``.
    """
    n_ss, n_sp, n_ps, n_pp, den = delta_form_kernel(a, sigma_t, delta, cos2, sin2)
    _check_den(den)
    inv = 1.0 / den
    r = (n_ss * inv, n_sp * inv, n_ps * inv, n_pp * inv)
    sd = sigma_t * delta
    d_ss = -2.0 * a * a * sd * sin2
    d_pp = -2.0 * sd * sin2
    d_sp = 2.0 * a * sd * cos2
    d_den = 2.0 * sd * sin2 * (a * a - 1.0)
    dr = tuple((dn - ri * d_den) * inv for dn, ri in zip((d_ss, d_sp, -d_sp, d_pp), r))
    return r, dr


def reflection_delta_form_dphi(aniso, w):
    """Analytic derivative of :func:`reflection_delta_form` with respect to phi."""
    a = np.asarray(w.xi) / (C_LIGHT * w.K)
    two_phi = 2.0 * np.asarray(w.phi)
    _, dr = delta_form_dphi(a, aniso.sigma_t_tilde, aniso.delta, np.cos(two_phi), np.sin(two_phi))
    return ReflectionMatrix(*dr)


class WeakSplit(NamedTuple):
    g_ss: np.ndarray
    g_pp: np.ndarray
    h_ss: np.ndarray
    h_pp: np.ndarray
    h_sp: np.ndarray
    h_ps: np.ndarray


def weak_split_kernel(a, sigma_t):
    """phi-independent amplitudes of the first-order expansion in delta.

    With r_ss/pp = g + h delta cos 2phi and r_sp/ps = h delta sin 2phi.
    Inputs are in the K-scaled variables of :func:`delta_form_kernel`.
    """
    s = sigma_t
    den = a * a * s + 0.25 * a * s * s + s + 4.0 * a
    inv = 1.0 / den
    ss_base = a * a * s + 0.25 * a * s * s
    pp_base = 0.25 * a * s * s + s
    slope = (1.0 - a * a) * s  # d(den) / d(delta cos 2phi)
    g_ss = -ss_base * inv
    g_pp = pp_base * inv
    h_ss = a * a * s * inv + ss_base * slope * inv**2
    h_pp = s * inv - pp_base * slope * inv**2
    h_sp = a * s * inv
    return WeakSplit(g_ss, g_pp, h_ss, h_pp, h_sp, -h_sp)


class WeakCurvature(NamedTuple):
    c_ss: np.ndarray
    s_ss: np.ndarray
    c_pp: np.ndarray
    s_pp: np.ndarray


def weak_split_curvature(a, sigma_t):
    """Second-order amplitudes of the diagonal coefficients in delta.

    r_ss = g_ss + h_ss x + c_ss x^2 + s_ss y^2 + O(delta^3) with
    x = delta cos 2phi and y = delta sin 2phi; likewise for pp.  The y^2
    part comes from the (1 - delta^2) factor of the sigma_xx sigma_yy term.
    """
    s = sigma_t
    p0 = 0.25 * a * s * s
    den = a * a * s + p0 + s + 4.0 * a
    w = weak_split_kernel(a, s)
    slope = (1.0 - a * a) * s
    m_ss = p0 * (1.0 + w.g_ss) / den
    m_pp = -p0 * (1.0 - w.g_pp) / den
    return WeakCurvature(
        m_ss - w.h_ss * slope / den, m_ss, m_pp - w.h_pp * slope / den, m_pp
    )


def weak_anisotropy_split(aniso, w):
    """First-order-in-delta amplitudes (g_ss, g_pp, h_ss, h_pp, h_sp, h_ps)."""
    a = np.asarray(w.xi) / (C_LIGHT * w.K)
    return weak_split_kernel(a, aniso.sigma_t_tilde)


def sigma_tilde(sigma_siemens):
    """Conductivity in units of the vacuum admittance."""
    return np.asarray(sigma_siemens) / SIGMA0
