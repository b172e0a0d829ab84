"""Physical constants shared by every module (SI unless noted)."""

from scipy import constants as _c

HBAR = _c.hbar  # J s
C_LIGHT = _c.c  # m / s
K_B = _c.k  # J / K
MU0 = _c.mu_0  # H / m
# derived from mu0 and c so that eps0 * mu0 * c^2 == 1 to rounding; the
# tabulated CODATA eps0 is off by ~1e-12 relative
EPS0 = 1.0 / (MU0 * C_LIGHT**2)  # F / m
E_CHARGE = _c.e  # C

K_B_EV = _c.k / _c.e  # eV / K
HBAR_EV = _c.hbar / _c.e  # eV s
MU_B_EV = 5.7883818060e-5  # eV / T, g = 2 absorbed into the per-spin shift

#: conductance quantum used by the Kubo sum, e^2 / hbar (S)
E2_HBAR = _c.e**2 / _c.hbar
#: vacuum admittance sqrt(eps0 / mu0) (S)
SIGMA0 = (EPS0 / MU0) ** 0.5

#: ratio converting a conductivity in units of e^2/hbar to units of sigma0
E2_HBAR_OVER_SIGMA0 = E2_HBAR / SIGMA0


def ev_to_rad_per_s(energy_ev):
    """Convert hbar*omega in eV to an angular frequency in rad/s."""
    return energy_ev / HBAR_EV


def rad_per_s_to_ev(omega):
    return omega * HBAR_EV
