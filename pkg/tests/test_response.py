from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest

from casalter.constants import E2_HBAR, K_B_EV, MU_B_EV, SIGMA0
from casalter.errors import DegenerateInputError, InvalidInputError
from casalter.lattice import ModelParams, build_hamiltonian, velocity_operator
from casalter.lifshitz import LifshitzConfig, TableSheet, casimir_torque, matsubara_grid
from casalter.response import (
    ConductivityTensor,
    KuboConfig,
    anisotropy,
    bz_grid,
    conductivity_table,
    fermi_dirac,
    fermi_dirac_derivative,
    kubo_conductivity,
    kubo_spectrum,
)

SMALL = KuboConfig(grid_n=32)


def brute_force_kubo(params, grid_n, hw):
    """Direct double sum over bands with complex denominators (units e^2/hbar).

    sigma_ab = (-i / N) sum_k sum_mn C_mn <m|v_a|n><n|v_b|m> / (hw + E_m - E_n + i gamma)
    """
    kx, ky = bz_grid(grid_n)
    kT = K_B_EV * params.temperature
    out = dict.fromkeys(("xx", "xy", "yx", "yy"), 0j)
    for s in (1, -1):
        E, U = np.linalg.eigh(build_hamiltonian((kx, ky), s, params))
        f = np.array([[float(1 / (mpmath.exp(e / kT) + 1)) for e in row] for row in E])
        v = {a: np.swapaxes(U, -1, -2) @ velocity_operator((kx, ky), s, params, a) @ U for a in "xy"}
        for m in range(3):
            for n in range(3):
                dE = E[:, m] - E[:, n]
                if m == n:
                    C = -f[:, m] * (1 - f[:, m]) / kT
                else:
                    C = (f[:, m] - f[:, n]) / dE
                den = hw + dE + 1j * params.gamma
                for c in out:
                    out[c] += np.sum(C * v[c[0]][:, m, n] * v[c[1]][:, n, m] / den)
    n = grid_n**2
    return {c: -1j * val / n for c, val in out.items()}


class TestFermi:
    def test_half_at_zero(self):
        assert fermi_dirac(0.0, 300.0) == 0.5

    def test_tail_accuracy(self):
        kT = K_B_EV * 300.0
        ref = float(1 / (mpmath.exp(mpmath.mpf(1.0) / kT) + 1))
        assert fermi_dirac(1.0, 300.0) == pytest.approx(ref, rel=1e-12)
        assert ref == pytest.approx(1.6e-17, rel=0.2)

    def test_particle_hole(self):
        E = np.random.default_rng(0).uniform(-2, 2, 200)
        np.testing.assert_allclose(fermi_dirac(E, 77.0) + fermi_dirac(-E, 77.0), 1.0, atol=1e-15)

    def test_no_overflow(self):
        kT = K_B_EV * 10.0
        with np.errstate(all="raise"):
            vals = fermi_dirac(np.array([-1e4, 1e4]) * kT, 10.0)
            fermi_dirac_derivative(np.array([-1e4, 1e4]) * kT, 10.0)
        assert vals[0] == 1.0 and vals[1] == 0.0

    def test_derivative_matches_difference(self):
        E, h = 0.013, 1e-7
        fd = (fermi_dirac(E + h, 50.0) - fermi_dirac(E - h, 50.0)) / (2 * h)
        assert fermi_dirac_derivative(E, 50.0) == pytest.approx(fd, rel=1e-6)


class TestKuboOracle:
    @pytest.mark.parametrize("hw", [0.3, 1.7j * 0.1, 0.05 + 0.02j])
    def test_pole_form_equals_double_sum(self, hw):
        p = ModelParams(B=20.0, temperature=300.0)
        ref = brute_force_kubo(p, 16, hw)
        spec = kubo_spectrum(p, KuboConfig(grid_n=16, method="exact"))
        got = spec.evaluate(np.array([hw]))
        for c in ref:
            assert abs(got[c][0] - ref[c]) <= 1e-12 * max(abs(ref["xx"]), 1e-30)

    def test_binned_close_to_exact(self):
        p = ModelParams(B=10.0, temperature=30.0)
        exact = kubo_spectrum(p, KuboConfig(grid_n=64, method="exact"))
        binned = kubo_spectrum(p, KuboConfig(grid_n=64))
        xi = np.array([0.001, 0.0162, 0.3, 3.0])
        a, b = exact.evaluate_imaginary(xi), binned.evaluate_imaginary(xi)
        for c in ("xx", "yy"):
            np.testing.assert_allclose(b[c], a[c], rtol=1e-6)

    def test_drop_damping_changes_imaginary_axis_only(self):
        p = ModelParams(B=10.0)
        keep = kubo_spectrum(p, SMALL)
        drop = kubo_spectrum(p, SMALL.with_(matsubara_damping="drop"))
        assert drop.evaluate_imaginary(0.1)["xx"][0] == pytest.approx(keep.evaluate_imaginary(0.05)["xx"][0], rel=1e-12)
        assert drop.evaluate(np.array([0.4]))["xx"][0] == keep.evaluate(np.array([0.4]))["xx"][0]


class TestZeroField:
    P = ModelParams()

    def test_isotropic_real_frequencies(self):
        ct = kubo_conductivity(self.P, SMALL, np.linspace(0.1, 3.0, 10))
        scale = np.abs(ct.sxx)
        assert np.all(np.abs(ct.sxy) < 1e-8 * scale)
        assert np.all(np.abs(ct.syx) < 1e-8 * scale)
        assert np.all(np.abs(ct.sxx - ct.syy) < 1e-8 * scale)

    def test_spin_resolved_exchange(self):
        w = np.array([0.2, 1.1, 2.5])
        up = kubo_conductivity(self.P, SMALL.with_(include_spins="up"), w)
        down = kubo_conductivity(self.P, SMALL.with_(include_spins="down"), w)
        np.testing.assert_allclose(up.sxx, down.syy, rtol=1e-8)
        assert np.max(np.abs(up.sxx - up.syy)) > 1e-3 * np.max(np.abs(up.sxx))

    def test_imaginary_axis_real_diagonal_positive(self):
        ct = kubo_conductivity(self.P, SMALL, 1j * np.geomspace(0.01, 10.0, 12))
        assert np.all(np.abs(ct.sxx.imag) <= 1e-10 * np.abs(ct.sxx.real))
        assert np.all(ct.sxx.real > 0) and np.all(ct.syy.real > 0)
        assert np.all(np.abs(ct.sxy) < 1e-8 * np.abs(ct.sxx))
        an = anisotropy(ct.real())
        assert np.all(np.abs(an.delta) < 1e-8)


class TestField:
    def test_reality_and_passivity_in_field(self):
        ct = kubo_conductivity(ModelParams(B=10.0, temperature=30.0), SMALL, 1j * np.geomspace(0.01, 10, 9))
        for c in (ct.sxx, ct.sxy, ct.syx, ct.syy):
            assert np.all(np.abs(c.imag) <= 1e-10 * np.abs(ct.sxx.real))
        assert np.all(ct.sxx.real > 0) and np.all(ct.syy.real > 0)

    def test_field_parity(self):
        cfg = KuboConfig(grid_n=64)
        xi = 1j * np.array([0.0162, 0.1, 1.0])
        a = kubo_conductivity(ModelParams(B=6.0, temperature=30.0), cfg, xi)
        b = kubo_conductivity(ModelParams(B=-6.0, temperature=30.0), cfg, xi)
        np.testing.assert_allclose(a.sxx.real, b.syy.real, rtol=1e-8)
        np.testing.assert_allclose(a.syy.real, b.sxx.real, rtol=1e-8)

    def test_delta_linear_in_weak_field(self, sheet_factory):
        T = 30.0
        Bmax = 0.2 * K_B_EV * T / MU_B_EV
        Bs = np.linspace(Bmax / 6, Bmax, 6)
        xi1 = matsubara_grid(T, 1)[1:]
        deltas = np.array([sheet_factory(B, T).anisotropy_at(xi1)[0][0] for B in Bs])
        slope = np.dot(Bs, deltas) / np.dot(Bs, Bs)
        resid = np.max(np.abs(deltas - slope * Bs)) / np.max(np.abs(deltas))
        assert resid < 0.02

    def test_temperature_suppression(self, sheet_factory):
        xi = matsubara_grid(300.0, 12)[1:]
        d30 = sheet_factory(10.0, 30.0).anisotropy_at(xi)[0]
        d300 = sheet_factory(10.0, 300.0).anisotropy_at(xi)[0]
        # delta is negative for B > 0 in this model; the ordering is in magnitude
        assert np.all(np.abs(d300) < np.abs(d30))


class TestGridConvergence:
    @staticmethod
    def _rel_change(g1, g2, T=300.0):
        p = ModelParams(B=10.0, temperature=T)
        xi = 1j * np.array([2 * math.pi * K_B_EV * T, 0.1, 1.0])
        a = kubo_conductivity(p, KuboConfig(grid_n=g1), xi)
        b = kubo_conductivity(p, KuboConfig(grid_n=g2), xi)
        return max(np.max(np.abs(b.sxx / a.sxx - 1)), np.max(np.abs(b.syy / a.syy - 1)))

    def test_refinement_at_300K_from_128(self):
        assert self._rel_change(128, 256) < 1e-3

    @pytest.mark.xfail(strict=True, reason="a 32-point mesh does not resolve the 300 K Fermi surface (~9% change)")
    def test_refinement_at_300K_from_32(self):
        assert self._rel_change(32, 64) < 1e-3


class TestAnisotropy:
    def test_hand_values(self):
        an = anisotropy(ConductivityTensor.diagonal(2 * SIGMA0, SIGMA0))
        assert an.delta == pytest.approx(1 / 3, rel=1e-15)
        assert an.sigma_t_tilde == pytest.approx(3.0, rel=1e-15)

    def test_zero_trace(self):
        with pytest.raises(DegenerateInputError):
            anisotropy(ConductivityTensor.diagonal(1.0, -1.0))

    def test_units(self):
        assert E2_HBAR == pytest.approx(2.4341e-4, rel=1e-4)
        assert SIGMA0 == pytest.approx(2.6544e-3, rel=1e-4)


class TestConfigValidation:
    @pytest.mark.parametrize("kw", [{"grid_n": 6}, {"grid_n": 33}, {"include_spins": "x"}, {"cell_area": 0.0}])
    def test_rejects(self, kw):
        with pytest.raises(InvalidInputError):
            KuboConfig(**kw)


class TestTable:
    P = ModelParams(B=10.0, temperature=30.0)

    def test_single_point_bitwise(self):
        spec = kubo_spectrum(self.P, SMALL)
        tab = conductivity_table(self.P, SMALL, [0.2j], spectrum=spec)
        direct = kubo_conductivity(self.P, SMALL, 0.2j)
        got = tab.lookup(0.2j)
        for c in ("sxx", "sxy", "syx", "syy"):
            assert getattr(got, c) == getattr(direct, c)
        assert tab.interpolate(0.2j).sxx == direct.sxx

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            conductivity_table(self.P, SMALL, [])

    def test_unsorted(self):
        with pytest.raises(InvalidInputError):
            conductivity_table(self.P, SMALL, [0.2j, 0.1j])

    def test_out_of_range(self):
        tab = conductivity_table(self.P, SMALL, [0.1j, 0.2j, 0.3j])
        with pytest.raises(InvalidInputError):
            tab.interpolate(0.5j)

    def test_coarse_interpolated_torque(self, sheet_factory, fig2_cfg):
        full_sheet = sheet_factory(10.0, 30.0)
        full = casimir_torque(full_sheet, full_sheet, fig2_cfg)
        xi_ev = matsubara_grid(fig2_cfg.T, fig2_cfg.resolved_n_max())[1:] * 6.582119569e-16
        dense = conductivity_table(None, None, 1j * xi_ev, spectrum=full_sheet.spectrum)
        coarse_idx = np.unique(np.r_[np.arange(0, xi_ev.size, 4), xi_ev.size - 1])
        coarse = conductivity_table(None, None, 1j * xi_ev[coarse_idx], spectrum=full_sheet.spectrum)
        t_dense = casimir_torque(TableSheet(dense), TableSheet(dense), fig2_cfg).value
        t_coarse = casimir_torque(TableSheet(coarse), TableSheet(coarse), fig2_cfg).value
        assert t_dense == pytest.approx(full.value, rel=1e-9)
        assert abs(t_coarse / t_dense - 1) < 5e-3
