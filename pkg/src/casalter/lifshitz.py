"""Finite-temperature Casimir energy and torque between two parallel sheets.

The Matsubara sum runs over xi_n = 2 pi n k_B T / hbar with the n = 0 term
halved.  For each n the (k_par, phi) integral is done on

* a radial Gauss-Legendre rule in u = 2 K_n d on geometrically growing
  panels starting at u_n = 2 xi_n d / c and ending where e^{-u} has fallen by
  1e-18 relative to its value at u_n, and
* a uniform trapezoid rule in phi (spectrally accurate for the periodic
  integrand).

Using k dk = K dK, the radial measure is k_par dk_par = u du / (4 d^2).

Reflection "sheets" are small objects exposing ``prepare`` (per-frequency
data for an array of xi), ``reflection`` and ``reflection_dphi``; the second
plate is evaluated at phi + theta so d/dtheta acts as d/dphi on it.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .constants import C_LIGHT, E2_HBAR_OVER_SIGMA0, HBAR, HBAR_EV, K_B, SIGMA0
from .errors import ConvergenceError, InvalidInputError
from .optics import delta_form_dphi, delta_form_kernel, reflection_full
from .response import KuboConfig, kubo_spectrum

__all__ = [
    "LifshitzConfig",
    "TorqueResult",
    "EnergyResult",
    "Sheet",
    "DeltaFormSheet",
    "ConstantSheet",
    "AltermagnetSheet",
    "TensorSheet",
    "PerfectMirror",
    "matsubara_grid",
    "auto_n_max",
    "radial_nodes",
    "casimir_energy",
    "casimir_torque",
    "zero_frequency_term",
    "torque_integrand_trace",
    "torque_integrand_explicit",
    "logdet_integrand",
    "accumulate_matsubara",
    "anisotropy_ladder",
    "PolarizationFilter",
    "TableSheet",
]

U_SPAN = -math.log(1e-18)


@dataclass(frozen=True)
class LifshitzConfig:
    """Geometry, temperature and quadrature controls.

    Attributes
    ----------
    d : float
        Separation (m).
    theta : float
        Relative crystal-axis angle of plate 2 (rad).
    T : float
        Temperature of the field fluctuations (K).
    area : float
        Plate area (m^2).
    n_max : int or None
        Hard cap on the Matsubara index; ``None`` picks
        ceil(10 hbar c / (4 pi k_B T d)) + 20.
    k_nodes : int
        Gauss-Legendre order per radial panel.
    phi_nodes : int
        Trapezoid nodes over [0, 2 pi); >= 16 and divisible by 4.
    rel_tol : float
        Target relative accuracy of the truncated Matsubara sum.
    panel_ratio : float
        Growth factor of consecutive radial panels.
    derivative : {"analytic", "fd"}
        How d R_2 / d theta is obtained for delta-form sheets.
    torque_form : {"trace", "explicit"}
    threads : int
        Worker threads for blocks of Matsubara terms.
    """

    d: float = 30e-9
    theta: float = math.pi / 4
    T: float = 30.0
    area: float = 1.0
    n_max: int | None = None
    k_nodes: int = 16
    phi_nodes: int = 32
    rel_tol: float = 1e-6
    panel_ratio: float = 3.0
    derivative: str = "analytic"
    torque_form: str = "trace"
    threads: int = 1

    def __post_init__(self):
        if not (self.d > 0 and math.isfinite(self.d)):
            raise InvalidInputError(f"d must be > 0, got {self.d!r}")
        if not self.T > 0:
            raise InvalidInputError(f"T must be > 0, got {self.T!r}")
        if not self.area > 0:
            raise InvalidInputError(f"area must be > 0, got {self.area!r}")
        if not 0 < self.rel_tol <= 1e-2:
            raise InvalidInputError(f"rel_tol must lie in (0, 1e-2], got {self.rel_tol!r}")
        if self.phi_nodes < 16 or self.phi_nodes % 4:
            raise InvalidInputError(
                f"phi_nodes must be >= 16 and divisible by 4, got {self.phi_nodes!r}"
            )
        if self.k_nodes < 2:
            raise InvalidInputError("k_nodes must be >= 2")
        if self.n_max is not None and self.n_max < 1:
            raise InvalidInputError("n_max must be >= 1")
        if self.panel_ratio <= 1:
            raise InvalidInputError("panel_ratio must be > 1")
        if self.derivative not in ("analytic", "fd"):
            raise InvalidInputError(f"derivative must be analytic|fd, got {self.derivative!r}")
        if self.torque_form not in ("trace", "explicit"):
            raise InvalidInputError(f"torque_form must be trace|explicit, got {self.torque_form!r}")

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def prefactor(self):
        """k_B T A / (4 pi^2) in J * m^2."""
        return K_B * self.T * self.area / (4.0 * math.pi**2)

    def resolved_n_max(self):
        return self.n_max if self.n_max is not None else auto_n_max(self.T, self.d)


@dataclass
class _SeriesResult:
    value: float
    per_n: np.ndarray
    n_used: int
    quadrature_estimate_error: float
    tail_estimate: float = 0.0
    converged: bool = True


@dataclass
class TorqueResult(_SeriesResult):
    """Torque (N m) with its per-Matsubara-index breakdown.

    ``value == 0.5 * per_n[0] + per_n[1:].sum()``.
    """

    @property
    def torque(self):
        return self.value


@dataclass
class EnergyResult(_SeriesResult):
    """Casimir energy (J) with its per-Matsubara-index breakdown."""

    @property
    def energy(self):
        return self.value


# -- Matsubara ladder --------------------------------------------------------

def matsubara_grid(T, n_max):
    """Matsubara frequencies xi_n = 2 pi n k_B T / hbar (rad/s), n = 0..n_max."""
    if T <= 0:
        raise InvalidInputError(f"T must be > 0, got {T!r}")
    return 2.0 * math.pi * K_B * T / HBAR * np.arange(int(n_max) + 1)


def auto_n_max(T, d):
    return int(math.ceil(10.0 * HBAR * C_LIGHT / (4.0 * math.pi * K_B * T * d))) + 20


# -- quadrature --------------------------------------------------------------

def radial_nodes(u0, order, ratio=3.0, span=U_SPAN):
    """Gauss-Legendre nodes and weights for u in [u0, u0 + span].

    Panels grow geometrically in v = u - u0 from ``v_min`` (half of
    min(u0, 1)), which resolves the structure on the scale u0 when u0 is
    small and the exponential decay when it is large.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    v_min = max(0.5 * min(u0, 1.0), 1e-9)
    edges = [0.0, v_min]
    while edges[-1] * ratio < span:
        edges.append(edges[-1] * ratio)
    edges.append(span)
    edges = np.asarray(edges)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (b + a)
    weights = 0.5 * (b - a) * w[None, :]
    return u0 + nodes.ravel(), weights.ravel()


def _phi_nodes(m):
    return 2.0 * math.pi * np.arange(m) / m, 2.0 * math.pi / m


# -- integrands --------------------------------------------------------------

def _det2(r):
    return r[0] * r[3] - r[1] * r[2]


def _matmul2(a, b):
    """Product of 2x2 matrices stored as (ss, sp, ps, pp) tuples."""
    a_ss, a_sp, a_ps, a_pp = a
    b_ss, b_sp, b_ps, b_pp = b
    return (
        a_ss * b_ss + a_sp * b_ps,
        a_ss * b_sp + a_sp * b_pp,
        a_ps * b_ss + a_pp * b_ps,
        a_ps * b_sp + a_pp * b_pp,
    )


def _det_one_minus(r1, r2, e, u=None):
    """det(1 - R1 R2 e) and the product R1 R2.

    For e close to 1 the expansion in eps = 1 - e avoids the cancellation in
    1 - tr(M) e + det(M) e^2 (perfect mirrors at u -> 0); pass ``u`` with
    e = exp(-u) so that eps = -expm1(-u) keeps full precision.  Returns the
    determinant and ``x = det - 1`` for use with log1p.
    """
    m = _matmul2(r1, r2)
    tr = m[0] + m[3]
    dm = _det2(r1) * _det2(r2)
    x = -tr * e + dm * e * e
    eps = 1.0 - e if u is None else -np.expm1(-u)
    c0 = (1.0 - m[0]) * (1.0 - m[3]) - m[1] * m[2]
    near = c0 + eps * (tr - 2.0 * dm) + eps * eps * dm
    det = np.where(e > 0.5, near, 1.0 + x)
    return det, x, m


def logdet_integrand(r1, r2, e, u=None):
    """ln det(1 - R1 R2 e) for 2x2 blocks given as (ss, sp, ps, pp) tuples."""
    det, x, _ = _det_one_minus(r1, r2, e, u)
    near = e > 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(near, np.log(np.where(near, det, 1.0)), np.log1p(np.where(near, 0.0, x)))


def torque_integrand_trace(r1, r2, dr2, e, u=None):
    """Tr[(1 - R1 R2 e)^{-1} R1 dR2] e, inverting the 2x2 block explicitly."""
    det, _, m = _det_one_minus(r1, r2, e, u)
    d_ss, d_sp, d_ps, d_pp = 1.0 - m[0] * e, -m[1] * e, -m[2] * e, 1.0 - m[3] * e
    p = _matmul2(r1, dr2)
    # adj(D) = [[d_pp, -d_sp], [-d_ps, d_ss]]
    tr = d_pp * p[0] - d_sp * p[2] - d_ps * p[1] + d_ss * p[3]
    return tr * e / det


def torque_integrand_explicit(r1, r2, dr2, e, u=None):
    """Expanded rational form of the torque integrand, written entry by entry."""
    r1ss, r1sp, r1ps, r1pp = r1
    r2ss, r2sp, r2ps, r2pp = r2
    d2ss, d2sp, d2ps, d2pp = dr2
    det1 = r1ss * r1pp - r1sp * r1ps
    num = (r1ss * d2ss + r1sp * d2ps + r1ps * d2sp + r1pp * d2pp) * e - det1 * (
        r2ss * d2pp + d2ss * r2pp - r2sp * d2ps - d2sp * r2ps
    ) * e * e
    den = (
        1.0
        - (r1ss * r2ss + r1sp * r2ps + r1ps * r2sp + r1pp * r2pp) * e
        + det1 * (r2ss * r2pp - r2sp * r2ps) * e * e
    )
    return num / den


# -- reflection providers ----------------------------------------------------

class Sheet:
    """Base reflection provider.

    Subclasses implement :meth:`reflection`; the default derivative is a
    central difference in phi with step 1e-6 rad.
    """

    fd_step = 1e-6

    def prepare(self, xi):
        """Per-frequency data for an array of xi (rad/s); default: xi itself."""
        return list(np.asarray(xi, dtype=float))

    def zero_frequency(self):
        """Reflection block at xi = 0, as (ss, sp, ps, pp)."""
        return (0.0, 0.0, 0.0, 1.0)

    def reflection(self, data, xi, K, phi):
        raise NotImplementedError

    def reflection_dphi(self, data, xi, K, phi, method="analytic"):
        h = self.fd_step
        rp = self.reflection(data, xi, K, phi + h)
        rm = self.reflection(data, xi, K, phi - h)
        r = self.reflection(data, xi, K, phi)
        return r, tuple((a - b) / (2 * h) for a, b in zip(rp, rm))

    def angle_independent(self):
        """True when the reflection block does not depend on phi."""
        return False


class DeltaFormSheet(Sheet):
    """Sheet described by delta(xi) and sigma_t(xi) / sigma0 (diagonal tensor)."""

    def anisotropy_at(self, xi):
        """Return (delta, sigma_t_tilde) arrays for xi in rad/s (xi > 0)."""
        raise NotImplementedError

    def prepare(self, xi):
        delta, st = self.anisotropy_at(np.asarray(xi, dtype=float))
        return list(zip(np.atleast_1d(delta), np.atleast_1d(st)))

    def reflection(self, data, xi, K, phi):
        delta, st = data
        a = xi / (C_LIGHT * K)
        n_ss, n_sp, n_ps, n_pp, den = delta_form_kernel(a, st, delta, np.cos(2 * phi), np.sin(2 * phi))
        return n_ss / den, n_sp / den, n_ps / den, n_pp / den

    def reflection_dphi(self, data, xi, K, phi, method="analytic"):
        if method == "fd":
            return super().reflection_dphi(data, xi, K, phi)
        delta, st = data
        a = xi / (C_LIGHT * K)
        return delta_form_dphi(a, st, delta, np.cos(2 * phi), np.sin(2 * phi))


class ConstantSheet(DeltaFormSheet):
    """Frequency-independent delta and sigma_t / sigma0 (test and model input)."""

    def __init__(self, delta, sigma_t_tilde):
        self.delta = float(delta)
        self.sigma_t_tilde = float(sigma_t_tilde)

    def anisotropy_at(self, xi):
        xi = np.asarray(xi, dtype=float)
        return np.full(xi.shape, self.delta), np.full(xi.shape, self.sigma_t_tilde)

    def angle_independent(self):
        return self.delta == 0.0


class AltermagnetSheet(DeltaFormSheet):
    """Altermagnetic sheet whose conductivity comes from the Kubo sum.

    The pole representation of the Kubo formula is built once at
    construction; evaluating delta and sigma_t at any set of Matsubara
    frequencies afterwards is cheap.  The tensor has no off-diagonal part in
    this model (mirror symmetries survive the out-of-plane field), so the
    delta form applies; :meth:`tensor_at` gives the full tensor for checks.
    """

    def __init__(self, params, kubo=None, spectrum=None):
        self.params = params
        self.kubo = kubo or KuboConfig()
        self.spectrum = spectrum or kubo_spectrum(params, self.kubo)

    def tensor_at(self, xi):
        """ConductivityTensor at hbar * omega = i * hbar * xi (xi in rad/s)."""
        return self.spectrum.tensor(1j * np.asarray(xi, dtype=float) * HBAR_EV).real()

    def anisotropy_at(self, xi):
        xi_ev = np.atleast_1d(np.asarray(xi, dtype=float)) * HBAR_EV
        vals = self.spectrum.evaluate_imaginary(xi_ev)
        trace = vals["xx"] + vals["yy"]
        return (vals["xx"] - vals["yy"]) / trace, trace * E2_HBAR_OVER_SIGMA0


class TableSheet(DeltaFormSheet):
    """Delta-form sheet reading a :class:`~casalter.response.ConductivityTable`.

    Queries between tabulated imaginary frequencies use the table's monotone
    cubic interpolation; queries outside the table raise.
    """

    def __init__(self, table):
        if table.axis != "imaginary":
            raise InvalidInputError("TableSheet needs a table on the imaginary axis")
        self.table = table

    def anisotropy_at(self, xi):
        xi_ev = np.atleast_1d(np.asarray(xi, dtype=float)) * HBAR_EV
        delta = np.empty_like(xi_ev)
        st = np.empty_like(xi_ev)
        for i, x in enumerate(xi_ev):
            ct = self.table.interpolate(1j * x).real()
            trace = ct.sxx + ct.syy
            delta[i] = (ct.sxx - ct.syy) / trace
            st[i] = trace / SIGMA0
        return delta, st


class TensorSheet(Sheet):
    """Sheet with a general conductivity tensor, reflected via the full solution.

    ``conductivity`` maps xi (rad/s) to a ConductivityTensor in siemens.
    """

    def __init__(self, conductivity, substrate=None):
        self.conductivity = conductivity
        self.substrate = substrate

    def prepare(self, xi):
        return [self.conductivity(x) for x in np.asarray(xi, dtype=float)]

    def reflection(self, data, xi, K, phi):
        from .optics import WaveArgs

        k_par = np.sqrt(np.maximum(K**2 - (xi / C_LIGHT) ** 2, 0.0))
        return tuple(reflection_full(data, WaveArgs(xi, k_par, phi), self.substrate))


class PerfectMirror(Sheet):
    """Ideal conductor: r_ss = -1, r_pp = 1 at every frequency."""

    def zero_frequency(self):
        return (-1.0, 0.0, 0.0, 1.0)

    def reflection(self, data, xi, K, phi):
        one = np.ones(np.broadcast(K, phi).shape)
        return -one, 0.0 * one, 0.0 * one, one

    def reflection_dphi(self, data, xi, K, phi, method="analytic"):
        r = self.reflection(data, xi, K, phi)
        return r, tuple(0.0 * x for x in r)

    def angle_independent(self):
        return True


class PolarizationFilter(Sheet):
    """Wrap a sheet and zero every reflection channel not listed in ``keep``.

    ``PolarizationFilter(sheet, ("pp",))`` gives the TM-only pipeline.
    """

    _CHANNELS = ("ss", "sp", "ps", "pp")

    def __init__(self, sheet, keep=("pp",)):
        bad = set(keep) - set(self._CHANNELS)
        if bad:
            raise InvalidInputError(f"unknown reflection channels {sorted(bad)}")
        self.sheet = sheet
        self.mask = tuple(c in keep for c in self._CHANNELS)

    def _apply(self, r):
        return tuple(x if m else 0.0 * x for x, m in zip(r, self.mask))

    def prepare(self, xi):
        return self.sheet.prepare(xi)

    def zero_frequency(self):
        return self._apply(self.sheet.zero_frequency())

    def reflection(self, data, xi, K, phi):
        return self._apply(self.sheet.reflection(data, xi, K, phi))

    def reflection_dphi(self, data, xi, K, phi, method="analytic"):
        r, dr = self.sheet.reflection_dphi(data, xi, K, phi, method)
        return self._apply(r), self._apply(dr)

    def angle_independent(self):
        return self.sheet.angle_independent()


# -- per-frequency terms -----------------------------------------------------

def _term_nodes(xi, cfg, k_nodes=None, phi_nodes=None):
    u0 = 2.0 * xi * cfg.d / C_LIGHT
    u, wu = radial_nodes(u0, k_nodes or cfg.k_nodes, cfg.panel_ratio)
    phi, wphi = _phi_nodes(phi_nodes or cfg.phi_nodes)
    K = u / (2.0 * cfg.d)
    radial_w = wu * u / (4.0 * cfg.d**2)
    return u[:, None], K[:, None], radial_w, phi[None, :], wphi


def _energy_term(sheet1, sheet2, data1, data2, xi, cfg, k_nodes=None, phi_nodes=None):
    u, K, rw, phi, wphi = _term_nodes(xi, cfg, k_nodes, phi_nodes)
    e = np.exp(-u)
    r1 = sheet1.reflection(data1, xi, K, phi)
    r2 = sheet2.reflection(data2, xi, K, phi + cfg.theta)
    vals = logdet_integrand(r1, r2, e, u)
    return float(rw @ vals.sum(axis=1)) * wphi


def _torque_term(sheet1, sheet2, data1, data2, xi, cfg, k_nodes=None, phi_nodes=None):
    if sheet1.angle_independent() and sheet2.angle_independent():
        return 0.0
    u, K, rw, phi, wphi = _term_nodes(xi, cfg, k_nodes, phi_nodes)
    e = np.exp(-u)
    r1 = sheet1.reflection(data1, xi, K, phi)
    r2, dr2 = sheet2.reflection_dphi(data2, xi, K, phi + cfg.theta, cfg.derivative)
    form = torque_integrand_trace if cfg.torque_form == "trace" else torque_integrand_explicit
    vals = form(r1, r2, dr2, e, u)
    return float(rw @ vals.sum(axis=1)) * wphi


def zero_frequency_term(sheet1, sheet2, cfg):
    """n = 0 contributions (energy in J, torque in N m), including the 1/2 weight.

    Uses the sheets' zero-frequency blocks (r_pp = 1 and nothing else for a
    conducting sheet), which carry no angular structure, so the torque term is
    exactly zero.  The energy integrand ln det(1 - R1 R2 e^{-2 k d}) is
    integrated on log-spaced panels starting just above k = 0.
    """
    r1 = sheet1.zero_frequency()
    r2 = sheet2.zero_frequency()
    edges = np.concatenate([[0.0], np.geomspace(1e-10, 1e-3, 8), np.geomspace(3e-3, U_SPAN + 5, 10)])
    x, w = np.polynomial.legendre.leggauss(cfg.k_nodes)
    a, b = edges[:-1, None], edges[1:, None]
    u = (0.5 * (b - a) * x + 0.5 * (b + a)).ravel()
    wu = (0.5 * (b - a) * w).ravel()
    e = np.exp(-u)
    vals = logdet_integrand(r1, r2, e, u)
    radial = float(np.dot(wu * u / (4.0 * cfg.d**2), vals))
    energy = 0.5 * cfg.prefactor * 2.0 * math.pi * radial
    return energy, 0.0


# -- Matsubara summation -----------------------------------------------------

def accumulate_matsubara(block_terms, first, n_cap, rel_tol, block=32):
    """Primed Matsubara sum with a geometric tail estimate.

    Parameters
    ----------
    block_terms : callable
        ``block_terms(start, stop)`` returns the terms for n in [start, stop).
    first : float
        The n = 0 term before its 1/2 weight.
    n_cap : int
    rel_tol : float
        Stop once the estimated tail |t_n| q / (1 - q), with q = |t_n / t_{n-1}|,
        has stayed below ``rel_tol * |partial sum|`` for three consecutive n.

    Returns
    -------
    per_n : ndarray
    tail : float
    converged : bool
    """
    per_n = [first]
    partial = 0.5 * first
    tail = math.inf
    streak = 0
    start = 1
    while start <= n_cap:
        stop = min(start + block, n_cap + 1)
        for t in block_terms(start, stop):
            per_n.append(t)
            partial += t
            if len(per_n) < 4:
                continue
            prev, cur = abs(per_n[-2]), abs(t)
            if cur == 0.0 and prev == 0.0:
                tail = 0.0
            else:
                q = cur / prev if prev > 0 else math.inf
                tail = cur * q / (1.0 - q) if q < 1.0 else math.inf
            ok = tail <= rel_tol * abs(partial)
            streak = streak + 1 if ok else 0
            if streak >= 3:
                return np.asarray(per_n), tail, True
        start = stop
    return np.asarray(per_n), tail, False


def _sum_series(kind, sheet1, sheet2, cfg, block=32):
    n_cap = cfg.resolved_n_max()
    xi_all = matsubara_grid(cfg.T, n_cap)
    term_fn = _energy_term if kind == "energy" else _torque_term
    e0, t0 = zero_frequency_term(sheet1, sheet2, cfg)
    executor = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None

    def block_terms(start, stop):
        xis = xi_all[start:stop]
        d1 = sheet1.prepare(xis)
        d2 = sheet2.prepare(xis)
        args = [(sheet1, sheet2, d1[i], d2[i], xis[i], cfg) for i in range(len(xis))]
        if executor is None:
            terms = [term_fn(*a) for a in args]
        else:
            terms = list(executor.map(lambda a: term_fn(*a), args))
        return [cfg.prefactor * t for t in terms]

    try:
        per_n, tail, converged = accumulate_matsubara(
            block_terms, 2.0 * (e0 if kind == "energy" else t0), n_cap, cfg.rel_tol, block
        )
    finally:
        if executor is not None:
            executor.shutdown()
    value = 0.5 * per_n[0] + per_n[1:].sum()
    n_used = len(per_n) - 1
    quad_err = _quadrature_error(kind, sheet1, sheet2, cfg, per_n, xi_all)
    cls = EnergyResult if kind == "energy" else TorqueResult
    result = cls(value, per_n, n_used, quad_err, tail, converged)
    if not converged:
        raise ConvergenceError(
            f"Matsubara {kind} sum not converged to rel_tol={cfg.rel_tol:g} within n_max={n_cap} "
            f"(tail estimate {tail:.3e}, partial sum {value:.6e})",
            diagnostics=result,
        )
    return result


def _quadrature_error(kind, sheet1, sheet2, cfg, per_n, xi_all):
    """Relative change of the dominant n >= 1 term under a halved quadrature."""
    if len(per_n) < 2:
        return 0.0
    idx = 1 + int(np.argmax(np.abs(per_n[1:])))
    ref = per_n[idx]
    if ref == 0.0:
        return 0.0
    xi = xi_all[idx]
    d1 = sheet1.prepare(xi_all[idx:idx + 1])[0]
    d2 = sheet2.prepare(xi_all[idx:idx + 1])[0]
    term_fn = _energy_term if kind == "energy" else _torque_term
    coarse = cfg.prefactor * term_fn(
        sheet1, sheet2, d1, d2, xi, cfg, max(cfg.k_nodes // 2, 2), max(cfg.phi_nodes // 2, 8)
    )
    return abs(coarse - ref) / abs(ref)


def casimir_energy(sheet1, sheet2, cfg):
    """Casimir energy E(theta, d) in joules.

    Raises
    ------
    ConvergenceError
        If the Matsubara tail estimate does not drop below
        ``rel_tol * |E|`` before ``n_max``; the partial result is attached.
    """
    return _sum_series("energy", sheet1, sheet2, cfg)


def casimir_torque(sheet1, sheet2, cfg):
    """Casimir torque tau = -dE/dtheta in N m (see :class:`TorqueResult`)."""
    return _sum_series("torque", sheet1, sheet2, cfg)


def sheet_from_tensor_function(conductivity, substrate=None):
    """Convenience wrapper building a :class:`TensorSheet`."""
    return TensorSheet(conductivity, substrate)


def anisotropy_ladder(sheet, cfg, n_max=None):
    """delta and sigma_t / sigma0 of an altermagnetic sheet on the Matsubara ladder (n >= 1)."""
    xi = matsubara_grid(cfg.T, n_max or cfg.resolved_n_max())[1:]
    delta, st = sheet.anisotropy_at(xi)
    return xi, delta, st

