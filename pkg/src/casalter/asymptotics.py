"""Closed-form limits of the Casimir torque used to cross-check the full sum.

* :func:`torque_weak_anisotropy`: second order in the anisotropies delta_i,
  exactly proportional to delta_1 delta_2 sin 2theta per Matsubara term.
* :func:`torque_non_retarded`: TM-only weak-anisotropy torque in the
  short-distance variables K~ = K d.
* :func:`torque_high_temperature`: n = 1 term in the one-reflection
  approximation, tau ~ exp(-2 xi_1 d / c) / d^3.
* :func:`scaling_probe`: log-log slope of any torque pipeline against d.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .constants import C_LIGHT, HBAR, HBAR_EV, K_B, K_B_EV
from .errors import ConvergenceError, InvalidInputError
from .lifshitz import accumulate_matsubara, matsubara_grid, radial_nodes
from .optics import weak_split_kernel

__all__ = [
    "LimitRegime",
    "WeakAnisotropyTerms",
    "ScalingFit",
    "classify_regime",
    "weak_anisotropy_terms",
    "torque_weak_anisotropy",
    "torque_non_retarded",
    "non_retarded_amplitudes",
    "torque_high_temperature",
    "high_temperature_integral",
    "exp_integral_E1",
    "scaling_probe",
]

WEAK_DELTA_LIMIT = 0.2
NON_RETARDED_D = 10e-9


@dataclass(frozen=True)
class LimitRegime:
    """One of the three asymptotic regimes with the inequality chain it assumes."""

    tag: str
    validity: str = ""

    _VALIDITY = {
        "non_retarded": "hbar c / d >> hbar omega_0",
        "high_temperature": "hbar omega_0 >> k_B T >> hbar c / d",
        "retarded": "hbar omega_0 >> hbar c / d >> k_B T",
    }

    def __post_init__(self):
        if self.tag not in self._VALIDITY:
            raise InvalidInputError(
                f"regime must be one of {sorted(self._VALIDITY)}, got {self.tag!r}"
            )
        if not self.validity:
            object.__setattr__(self, "validity", self._VALIDITY[self.tag])


def classify_regime(d, T, hbar_omega0=1.0):
    """Energy scales (eV) and the regime whose inequality chain fits best.

    ``hbar_omega0`` is the response cutoff, only used here.
    """
    e_d = HBAR_EV * C_LIGHT / d
    e_t = K_B_EV * T
    if e_d > hbar_omega0:
        tag = "non_retarded"
    elif e_t > e_d:
        tag = "high_temperature"
    else:
        tag = "retarded"
    scales = {"k_B T": e_t, "hbar c / d": e_d, "hbar omega_0": hbar_omega0}
    return LimitRegime(tag), scales


@dataclass(frozen=True)
class WeakAnisotropyTerms:
    """Expansion of det(1 - R1 R2 e) to second order in delta_1, delta_2.

    With c_i = cos 2phi_i and s_i = sin 2phi_i the determinant is

        D0 + D1_amp[0] delta_1 c_1 + D1_amp[1] delta_2 c_2
           + delta_1 delta_2 (D2_amps["cc"] c_1 c_2 + D2_amps["ss"] s_1 s_2)
           + D2_amps["self1_c"] (delta_1 c_1)^2 + D2_amps["self1_s"] (delta_1 s_1)^2
           + D2_amps["self2_c"] (delta_2 c_2)^2 + D2_amps["self2_s"] (delta_2 s_2)^2
    """

    D0: np.ndarray
    D1_amp: tuple
    D2_amps: dict

    def reconstruct(self, delta1, delta2, phi1, phi2):
        c1, s1 = np.cos(2 * phi1), np.sin(2 * phi1)
        c2, s2 = np.cos(2 * phi2), np.sin(2 * phi2)
        a = self.D2_amps
        return (
            self.D0
            + self.D1_amp[0] * delta1 * c1
            + self.D1_amp[1] * delta2 * c2
            + delta1 * delta2 * (a["cc"] * c1 * c2 + a["ss"] * s1 * s2)
            + a["self1_c"] * (delta1 * c1) ** 2
            + a["self1_s"] * (delta1 * s1) ** 2
            + a["self2_c"] * (delta2 * c2) ** 2
            + a["self2_s"] * (delta2 * s2) ** 2
        )


def weak_anisotropy_terms(w1, w2, e, curv1=None, curv2=None):
    """Amplitudes of the weak-anisotropy expansion from two WeakSplit tuples.

    ``curv1`` and ``curv2`` are the :class:`~casalter.optics.WeakCurvature`
    of each sheet.  Without them the delta_i^2 self terms only hold the
    products of first-order amplitudes and the reconstruction is O(delta^2);
    with them it is O(delta^3).  The delta_1 delta_2 terms, which carry all
    of the torque, are complete either way.
    """
    e2 = e * e
    d0 = 1.0 - (w1.g_ss * w2.g_ss + w1.g_pp * w2.g_pp) * e + w1.g_ss * w1.g_pp * w2.g_ss * w2.g_pp * e2

    def d1(a, b):
        return -(a.h_ss * b.g_ss + a.h_pp * b.g_pp) * e + b.g_ss * b.g_pp * (
            a.g_ss * a.h_pp + a.h_ss * a.g_pp
        ) * e2

    def curvature(a, b, q_ss, q_pp):
        # second-order part of one sheet's coefficients against the other's g
        return -(q_ss * b.g_ss + q_pp * b.g_pp) * e + b.g_ss * b.g_pp * (
            a.g_ss * q_pp + q_ss * a.g_pp
        ) * e2

    mix1 = w1.h_ss * w1.g_pp + w1.g_ss * w1.h_pp
    mix2 = w2.h_ss * w2.g_pp + w2.g_ss * w2.h_pp
    amps = {
        "cc": -(w1.h_ss * w2.h_ss + w1.h_pp * w2.h_pp) * e + mix1 * mix2 * e2,
        "ss": -(w1.h_sp * w2.h_ps + w1.h_ps * w2.h_sp) * e,
        "self1_c": w1.h_ss * w1.h_pp * w2.g_ss * w2.g_pp * e2,
        "self1_s": -w1.h_sp * w1.h_ps * w2.g_ss * w2.g_pp * e2,
        "self2_c": w1.g_ss * w1.g_pp * w2.h_ss * w2.h_pp * e2,
        "self2_s": -w1.g_ss * w1.g_pp * w2.h_sp * w2.h_ps * e2,
    }
    for tag, (wa, wb, q) in {"1": (w1, w2, curv1), "2": (w2, w1, curv2)}.items():
        if q is not None:
            amps["self" + tag + "_c"] = amps["self" + tag + "_c"] + curvature(wa, wb, q.c_ss, q.c_pp)
            amps["self" + tag + "_s"] = amps["self" + tag + "_s"] + curvature(wa, wb, q.s_ss, q.s_pp)
    return WeakAnisotropyTerms(d0, (d1(w1, w2), d1(w2, w1)), amps)


def _weak_bracket(w1, w2, e):
    """Curly bracket of the weak-anisotropy torque, divided by D0^2."""
    e2, e3 = e * e, e * e * e
    gg_ss = w1.g_ss * w2.g_ss
    gg_pp = w1.g_pp * w2.g_pp
    cross = w1.h_sp * w2.h_ps + w1.h_ps * w2.h_sp
    hh_ss = w1.h_ss * w2.h_ss
    hh_pp = w1.h_pp * w2.h_pp
    d0 = 1.0 - (gg_ss + gg_pp) * e + gg_ss * gg_pp * e2
    bracket = (
        -(hh_ss + hh_pp + cross) * e
        + ((gg_ss + gg_pp) * cross + 2.0 * gg_ss * hh_pp + 2.0 * gg_pp * hh_ss) * e2
        - (gg_ss * gg_pp * cross + gg_pp**2 * hh_ss + gg_ss**2 * hh_pp) * e3
    )
    return bracket / d0**2


def _check_weak(delta1, delta2):
    worst = float(np.max(np.abs(np.concatenate([np.atleast_1d(delta1), np.atleast_1d(delta2)]))))
    if worst > WEAK_DELTA_LIMIT:
        warnings.warn(
            f"|delta| = {worst:.3g} exceeds {WEAK_DELTA_LIMIT}; weak-anisotropy expansion unreliable",
            stacklevel=3,
        )


def _summed(term_fn, sheet1, sheet2, cfg, prefactor):
    """Sum n >= 1 terms; the n = 0 term vanishes in every limit formula here."""
    n_cap = cfg.resolved_n_max()
    xi_all = matsubara_grid(cfg.T, n_cap)

    def block_terms(start, stop):
        xis = xi_all[start:stop]
        d1, s1 = sheet1.anisotropy_at(xis)
        d2, s2 = sheet2.anisotropy_at(xis)
        _check_weak(d1, d2)
        return [prefactor * term_fn(x, a1, b1, a2, b2) for x, a1, b1, a2, b2 in zip(xis, d1, s1, d2, s2)]

    per_n, tail, ok = accumulate_matsubara(block_terms, 0.0, n_cap, cfg.rel_tol)
    value = float(per_n[1:].sum())
    if not ok:
        raise ConvergenceError(
            f"asymptotic Matsubara sum not converged within n_max={n_cap} (tail {tail:.3e})",
            diagnostics={"value": value, "per_n": per_n},
        )
    return value


def torque_weak_anisotropy(sheet1, sheet2, cfg):
    """Second-order-in-delta torque (N m) for two delta-form sheets.

    Parameters
    ----------
    sheet1, sheet2 : DeltaFormSheet
        Providers of delta(i xi) and sigma_t(i xi) / sigma0.
    cfg : LifshitzConfig
        ``d``, ``theta``, ``T``, ``area``, radial order and truncation.
    """
    d = cfg.d
    sin2 = math.sin(2.0 * cfg.theta)

    def term(xi, delta1, st1, delta2, st2):
        if delta1 == 0.0 or delta2 == 0.0:
            return 0.0
        u0 = 2.0 * xi * d / C_LIGHT
        u, wu = radial_nodes(u0, cfg.k_nodes, cfg.panel_ratio)
        a = u0 / u
        vals = _weak_bracket(weak_split_kernel(a, st1), weak_split_kernel(a, st2), np.exp(-u))
        return float(np.dot(wu * u / (4.0 * d * d), vals)) * delta1 * delta2 * sin2

    return _summed(term, sheet1, sheet2, cfg, K_B * cfg.T * cfg.area / (2.0 * math.pi))


def non_retarded_amplitudes(Kt, st, xi_d_over_c):
    """Small-parameter g_pp and h_pp in the variables K~ = K d."""
    q = 4.0 * xi_d_over_c
    den = Kt * st + q
    return Kt * st / den, Kt * st * q / den**2


def torque_non_retarded(sheet1, sheet2, cfg):
    """TM-only weak-anisotropy torque in the short-distance form (N m).

    Integrates K~ from xi_n d / c upward (k_par >= 0) with the small-parameter
    amplitudes of :func:`non_retarded_amplitudes`.
    """
    d = cfg.d
    if d > NON_RETARDED_D:
        warnings.warn(f"d = {d:.3g} m is above the non-retarded guide of {NON_RETARDED_D:g} m", stacklevel=2)
    sin2 = math.sin(2.0 * cfg.theta)

    def term(xi, delta1, st1, delta2, st2):
        x = xi * d / C_LIGHT
        u, wu = radial_nodes(2.0 * x, cfg.k_nodes, cfg.panel_ratio)
        Kt = 0.5 * u
        g1, h1 = non_retarded_amplitudes(Kt, st1, x)
        g2, h2 = non_retarded_amplitudes(Kt, st2, x)
        e = np.exp(-u)
        vals = h1 * h2 * e / (1.0 - g1 * g2 * e) ** 2
        # K~ dK~ = u du / 4
        return float(np.dot(wu * u / 4.0, vals)) * delta1 * delta2 * sin2

    return _summed(term, sheet1, sheet2, cfg, -K_B * cfg.T * cfg.area / (2.0 * math.pi * d * d))


def high_temperature_integral(xi1, d, form="closed"):
    """int k dk (xi^2/(c^2 K^2) + c^2 K^2 / xi^2 - 2) e^{-2 K d} for xi = xi1.

    ``form`` selects the exact closed form with E1 (``"closed"``), the
    large-argument expansion of E1 (``"expanded"``) or the leading law
    c e^{-2 xi d / c} / (xi d^3) (``"leading"``).
    """
    x = 2.0 * xi1 * d / C_LIGHT
    k0 = xi1 / C_LIGHT
    poly = (x**3 + 3 * x**2 + 6 * x + 6) / ((2 * d) ** 4 * k0**2)
    lin = 2.0 * (x + 1.0) / (2 * d) ** 2
    if form == "closed":
        return k0**2 * exp_integral_E1(x) + (poly - lin) * math.exp(-x)
    if form == "expanded":
        return (k0**2 * (1 / x - 1 / x**2 + 2 / x**3) + poly - lin) * math.exp(-x)
    if form == "leading":
        return math.exp(-x) / (k0 * d**3)
    raise InvalidInputError(f"unknown form {form!r}")


def torque_high_temperature(sigma1, sigma2, cfg):
    """n = 1, one-reflection torque (N m).

    tau = -(hbar c A / 64 pi^2) e^{-2 xi_1 d / c} / d^3
          * (sxx_1 - syy_1)(sxx_2 - syy_2) / sigma0^2 * sin 2theta

    Parameters
    ----------
    sigma1, sigma2 : ConductivityTensor
        Tensors at i xi_1 in siemens.
    cfg : LifshitzConfig
    """
    from .constants import SIGMA0

    xi1 = matsubara_grid(cfg.T, 1)[1]
    if K_B * cfg.T * cfg.d / (HBAR * C_LIGHT) < 1.0:
        warnings.warn("k_B T d / (hbar c) < 1: outside the high-temperature regime", stacklevel=2)
    aniso = float(np.real(sigma1.sxx - sigma1.syy)) * float(np.real(sigma2.sxx - sigma2.syy)) / SIGMA0**2
    d = cfg.d
    return (
        -HBAR * C_LIGHT * cfg.area / (64.0 * math.pi**2)
        * math.exp(-2.0 * xi1 * d / C_LIGHT) / d**3
        * aniso * math.sin(2.0 * cfg.theta)
    )


_EULER_GAMMA = 0.57721566490153286061


def exp_integral_E1(x):
    """Exponential integral E1(x) = int_x^inf e^{-t} / t dt for x > 0.

    Power series below 1, modified Lentz continued fraction from 1 upward;
    relative accuracy about 1e-15.
    """
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise InvalidInputError(f"E1 needs a finite x > 0, got {x!r}")
    if x < 1.0:
        total, term, k = 0.0, 1.0, 1
        while True:
            term *= -x / k
            add = -term / k
            total += add
            if abs(add) < 1e-17 * abs(total):
                break
            k += 1
        return -_EULER_GAMMA - math.log(x) + total
    # E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    dd = 1.0 / b
    h = dd
    for i in range(1, 500):
        an = -float(i * i)
        b += 2.0
        dd = 1.0 / (an * dd + b)
        c = b + an / c
        delta = c * dd
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares log-log fit of |tau| against d.

    ``slope_ci95`` is the half-width of the 95 % confidence interval of the
    slope and ``residual_band`` the largest absolute log residual.
    """

    slope: float
    intercept: float
    slope_ci95: float
    residual_band: float
    d: np.ndarray
    tau: np.ndarray


def scaling_probe(pipeline, regime, d_grid, cfg=None, threads=1):
    """Fit ln|tau| vs ln d for a torque pipeline over ``d_grid``.

    Parameters
    ----------
    pipeline : callable
        d (m) -> torque (N m).
    regime : LimitRegime or str
        For ``high_temperature`` the factor exp(-2 xi_1 d / c) is divided out
        first (``cfg.T`` fixes xi_1).
    d_grid : sequence of float
        At least four distinct separations.
    """
    if isinstance(regime, str):
        regime = LimitRegime(regime)
    d = np.asarray(d_grid, dtype=float)
    if d.size < 4:
        raise InvalidInputError("scaling_probe needs at least 4 separations")
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(threads) as ex:
            tau = np.array(list(ex.map(pipeline, d)))
    else:
        tau = np.array([pipeline(x) for x in d])
    y = np.log(np.abs(tau))
    if regime.tag == "high_temperature":
        if cfg is None:
            raise InvalidInputError("high_temperature scaling needs cfg for xi_1")
        xi1 = matsubara_grid(cfg.T, 1)[1]
        y = y + 2.0 * xi1 * d / C_LIGHT
    x = np.log(d)
    fit = stats.linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    if d.size > 2 and np.isfinite(fit.stderr):
        ci = float(stats.t.ppf(0.975, d.size - 2) * fit.stderr)
    else:
        ci = 0.0
    return ScalingFit(float(fit.slope), float(fit.intercept), ci, float(np.max(np.abs(resid))), d, tau)
