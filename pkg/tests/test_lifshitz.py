from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import zeta

from casalter.constants import C_LIGHT, HBAR, K_B
from casalter.errors import ConvergenceError, InvalidInputError
from casalter.lifshitz import (
    ConstantSheet,
    LifshitzConfig,
    PerfectMirror,
    Sheet,
    auto_n_max,
    casimir_energy,
    casimir_torque,
    matsubara_grid,
    radial_nodes,
    torque_integrand_explicit,
    torque_integrand_trace,
    zero_frequency_term,
)

RNG = np.random.default_rng(11)
# frequency-independent sheets lack the Drude roll-off, so their Matsubara
# terms decay only as exp(-2 xi d / c) and need more than the auto cap
CONST_N_MAX = 8000


class EmptySheet(Sheet):
    def zero_frequency(self):
        return (0.0, 0.0, 0.0, 0.0)

    def reflection(self, data, xi, K, phi):
        z = np.zeros(np.broadcast(K, phi).shape)
        return z, z, z, z

    def angle_independent(self):
        return True


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [
            {"d": 0.0},
            {"d": -1.0},
            {"T": 0.0},
            {"area": -1.0},
            {"rel_tol": 0.1},
            {"rel_tol": 0.0},
            {"phi_nodes": 12},
            {"phi_nodes": 34},
            {"n_max": 0},
            {"derivative": "complex-step"},
            {"torque_form": "other"},
        ],
    )
    def test_rejects(self, kw):
        with pytest.raises(InvalidInputError):
            LifshitzConfig(**kw)

    def test_auto_n_max(self):
        T, d = 30.0, 30e-9
        assert auto_n_max(T, d) == math.ceil(10 * HBAR * C_LIGHT / (4 * math.pi * K_B * T * d)) + 20
        assert LifshitzConfig(T=T, d=d).resolved_n_max() == auto_n_max(T, d)


class TestMatsubara:
    def test_first_frequency_at_300K(self):
        xi = matsubara_grid(300.0, 3)
        assert xi[0] == 0.0
        assert xi[1] * HBAR / 1.602176634e-19 == pytest.approx(2 * math.pi * 8.617333e-5 * 300, rel=1e-6)
        assert xi[1] * HBAR / 1.602176634e-19 == pytest.approx(0.1624, abs=1e-4)

    def test_linear_in_T(self):
        np.testing.assert_allclose(matsubara_grid(60.0, 10), 2 * matsubara_grid(30.0, 10), rtol=1e-15)

    def test_bad_T(self):
        with pytest.raises(InvalidInputError):
            matsubara_grid(0.0, 4)

    def test_radial_nodes_integrate_exponential(self):
        u, w = radial_nodes(0.3, 16)
        assert np.dot(w, np.exp(-u)) == pytest.approx(math.exp(-0.3), rel=1e-13)
        assert np.dot(w, u * np.exp(-u)) == pytest.approx(1.3 * math.exp(-0.3), rel=1e-13)


class TestZeroFrequency:
    def test_closed_form(self):
        cfg = LifshitzConfig(d=100e-9, T=300.0)
        sheet = ConstantSheet(0.2, 1.0)
        e0, t0 = zero_frequency_term(sheet, sheet, cfg)
        assert t0 == 0.0
        exact = -K_B * cfg.T * cfg.area * zeta(3) / (16 * math.pi * cfg.d**2)
        assert e0 == pytest.approx(exact, rel=1e-10)

    def test_direct_quadrature(self):
        cfg = LifshitzConfig(d=40e-9, T=77.0)
        d = cfg.d
        radial, _ = integrate.quad(lambda k: k * math.log1p(-math.exp(-2 * k * d)), 0, 60 / d, limit=200)
        assert radial == pytest.approx(-zeta(3) / (4 * d**2), rel=1e-8)
        ref = 0.5 * K_B * cfg.T * cfg.area / (4 * math.pi**2) * 2 * math.pi * radial
        e0, _ = zero_frequency_term(ConstantSheet(0.0, 2.0), ConstantSheet(0.0, 2.0), cfg)
        assert e0 == pytest.approx(ref, rel=1e-8)

    def test_theta_independent(self):
        s = ConstantSheet(0.3, 1.0)
        vals = {zero_frequency_term(s, s, LifshitzConfig(theta=t))[0] for t in (0.0, 0.4, 1.3)}
        assert len(vals) == 1


class TestEnergy:
    def test_empty_space(self):
        res = casimir_energy(EmptySheet(), EmptySheet(), LifshitzConfig())
        assert res.energy == 0.0

    def test_isotropic_theta_independent(self):
        s = ConstantSheet(0.0, 0.7)
        vals = [casimir_energy(s, s, LifshitzConfig(theta=t, n_max=CONST_N_MAX)).energy for t in (0.0, math.pi / 8, math.pi / 4)]
        assert max(abs(v / vals[0] - 1) for v in vals) < 1e-12

    def test_perfect_mirror(self):
        cfg = LifshitzConfig(d=1e-6, T=1.0, n_max=20000)
        res = casimir_energy(PerfectMirror(), PerfectMirror(), cfg)
        ideal = -math.pi**2 * HBAR * C_LIGHT / (720 * cfg.d**3)
        assert abs(res.energy / ideal - 1) < 0.02

    def test_energy_negative_and_per_n_sum(self):
        s = ConstantSheet(0.1, 1.5)
        res = casimir_energy(s, s, LifshitzConfig(n_max=CONST_N_MAX))
        assert res.energy < 0
        total = 0.5 * res.per_n[0] + res.per_n[1:].sum()
        assert res.energy == pytest.approx(total, rel=1e-14)

    def test_convergence_error_carries_partial(self):
        s = ConstantSheet(0.1, 1.5)
        with pytest.raises(ConvergenceError) as info:
            casimir_energy(s, s, LifshitzConfig(n_max=3))
        diag = info.value.diagnostics
        assert diag.n_used == 3 and not diag.converged and diag.energy < 0


class TestIntegrands:
    def test_trace_equals_explicit_on_random_nodes(self):
        n = 5000
        r1 = tuple(RNG.uniform(-1, 1, n) for _ in range(4))
        r2 = tuple(RNG.uniform(-1, 1, n) for _ in range(4))
        dr2 = tuple(RNG.normal(size=n) for _ in range(4))
        u = RNG.uniform(0.01, 40, n)
        e = np.exp(-u)
        a = torque_integrand_trace(r1, r2, dr2, e, u)
        b = torque_integrand_explicit(r1, r2, dr2, e, u)
        scale = np.maximum(np.abs(a), 1e-300)
        assert np.max(np.abs(a - b) / scale) < 1e-10


@pytest.fixture(scope="module")
def fig2(sheet_factory, fig2_cfg):
    s = sheet_factory(10.0, 30.0)
    return s, fig2_cfg, casimir_torque(s, s, fig2_cfg)


class TestTorque:
    def test_reference_value(self, fig2):
        _, _, res = fig2
        assert res.torque < 0
        assert res.per_n[0] == 0.0
        assert res.torque == pytest.approx(0.5 * res.per_n[0] + res.per_n[1:].sum(), rel=1e-14)

    def test_zero_angle(self, fig2):
        s, cfg, res = fig2
        t0 = casimir_torque(s, s, cfg.with_(theta=0.0)).torque
        assert abs(t0) < 1e-6 * abs(res.torque)

    def test_periodicity_and_oddness(self, fig2):
        s, cfg, _ = fig2
        th = 0.37
        base = casimir_torque(s, s, cfg.with_(theta=th)).torque
        shifted = casimir_torque(s, s, cfg.with_(theta=th + math.pi)).torque
        neg = casimir_torque(s, s, cfg.with_(theta=-th)).torque
        assert shifted == pytest.approx(base, rel=1e-10)
        assert neg == pytest.approx(-base, rel=1e-10)

    def test_explicit_form(self, fig2):
        s, cfg, res = fig2
        other = casimir_torque(s, s, cfg.with_(torque_form="explicit"))
        assert other.torque == pytest.approx(res.torque, rel=1e-10)

    def test_quadrature_doubling(self, fig2):
        s, cfg, res = fig2
        fine = casimir_torque(s, s, cfg.with_(k_nodes=2 * cfg.k_nodes, phi_nodes=2 * cfg.phi_nodes))
        assert abs(fine.torque / res.torque - 1) < cfg.rel_tol
        assert res.quadrature_estimate_error < 1e-3

    def test_fd_derivative_path(self, fig2):
        s, cfg, res = fig2
        fd = casimir_torque(s, s, cfg.with_(derivative="fd"))
        assert fd.torque == pytest.approx(res.torque, rel=1e-7)

    def test_matsubara_tail_at_least_geometric(self, fig2):
        _, cfg, res = fig2
        mag = np.abs(res.per_n[1:])
        n = np.arange(1, mag.size + 1)
        peak = int(np.argmax(mag))
        assert np.all(np.diff(mag[peak + 2:]) < 0)
        tail = slice(peak + (mag.size - peak) // 2, mag.size)
        slope = np.polyfit(n[tail], np.log(mag[tail]), 1)[0]
        # the Drude roll-off of sigma(i xi) only speeds the decay up
        assert slope <= -4 * math.pi * K_B * cfg.T * cfg.d / (HBAR * C_LIGHT)

    def test_matsubara_tail_slope_constant_sheet(self, fig2_cfg):
        s = ConstantSheet(-0.05, 0.3)
        res = casimir_torque(s, s, fig2_cfg.with_(n_max=CONST_N_MAX))
        mag = np.abs(res.per_n[1:])
        n = np.arange(1, mag.size + 1)
        tail = slice(mag.size // 2, mag.size)
        slope = np.polyfit(n[tail], np.log(mag[tail]), 1)[0]
        expected = -4 * math.pi * K_B * fig2_cfg.T * fig2_cfg.d / (HBAR * C_LIGHT)
        assert slope == pytest.approx(expected, rel=0.2)

    def test_zero_field_vanishes(self, sheet_factory, fig2):
        s0 = sheet_factory(0.0, 30.0)
        _, cfg, res = fig2
        t0 = casimir_torque(s0, s0, cfg).torque
        assert abs(t0) < 1e-10 * abs(res.torque)

    def test_energy_derivative_consistency(self, sheet_factory):
        h = 1e-4
        for _ in range(5):
            B = RNG.uniform(4, 12) * RNG.choice([-1, 1])
            T = float(RNG.choice([30.0, 300.0]))
            d = 10 ** RNG.uniform(math.log10(20e-9), math.log10(100e-9))
            th = RNG.uniform(0.2, 1.3)
            s = sheet_factory(round(B, 3), T)
            cfg = LifshitzConfig(d=d, T=T, theta=th, rel_tol=1e-10, n_max=8000)
            tau = casimir_torque(s, s, cfg.with_(rel_tol=1e-8)).torque
            ep = casimir_energy(s, s, cfg.with_(theta=th + h)).energy
            em = casimir_energy(s, s, cfg.with_(theta=th - h)).energy
            fd = -(ep - em) / (2 * h)
            assert abs(fd / tau - 1) < 1e-5, (B, T, d, th)

    def test_constant_sheet_sin2theta(self):
        s = ConstantSheet(-0.05, 0.3)
        cfg = LifshitzConfig(n_max=CONST_N_MAX)
        thetas = np.linspace(0, math.pi, 9)
        tau = np.array([casimir_torque(s, s, cfg.with_(theta=t)).torque for t in thetas])
        amp = np.dot(tau, np.sin(2 * thetas)) / np.dot(np.sin(2 * thetas), np.sin(2 * thetas))
        assert np.sqrt(np.mean((tau - amp * np.sin(2 * thetas)) ** 2)) < 0.01 * abs(amp)
        # theta -> pi/2 - theta leaves sin 2theta unchanged
        a = casimir_torque(s, s, cfg.with_(theta=0.3)).torque
        b = casimir_torque(s, s, cfg.with_(theta=math.pi / 2 - 0.3)).torque
        assert b == pytest.approx(a, rel=1e-3)
