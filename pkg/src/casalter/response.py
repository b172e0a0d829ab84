"""Kubo sheet conductivity of the altermagnet and its anisotropy decomposition.

The Brillouin-zone sum is a plain Riemann sum on a uniform ``grid_n x grid_n``
mesh over [-pi, pi)^2.  Because the Zeeman shift and the chemical potential
enter the Hamiltonian as uniform diagonal shifts, eigenvectors and band-basis
velocity matrix elements only depend on the hopping/exchange parameters; they
are computed once per parameter set and reused for every field, chemical
potential and temperature.

For a fixed set of occupations the conductivity is a sum of simple poles in
the frequency,

    sigma(w) = i [ D / w + sum_j A_j w / (w^2 - E_j^2) ],   w = hbar*omega + i*gamma,

with D the intraband (Fermi-surface) weight and (E_j, A_j) the interband
transition energies and weights.  ``method="exact"`` evaluates the pole sum
directly; ``method="binned"`` first deposits the weights onto a uniform energy
grid with linear (cloud-in-cell) weights, which makes sweeps over thousands of
Matsubara frequencies cheap.  The binning error is bounded by roughly
``(h / |w|)^2 / 4`` relative, with h the bin width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import expit

from .constants import E2_HBAR, K_B_EV, MU_B_EV, SIGMA0
from .errors import DegenerateInputError, InvalidInputError
from .lattice import ModelParams, build_hamiltonian, velocity_operator

__all__ = [
    "KuboConfig",
    "ConductivityTensor",
    "AnisotropyDecomposition",
    "KuboSpectrum",
    "ConductivityTable",
    "fermi_dirac",
    "fermi_dirac_derivative",
    "kubo_spectrum",
    "kubo_conductivity",
    "anisotropy",
    "conductivity_table",
    "bz_grid",
]

_COMPONENTS = ("xx", "xy", "yx", "yy")
_CHUNK = 1 << 17


@dataclass(frozen=True)
class KuboConfig:
    """Numerical controls of the Kubo sum.

    Attributes
    ----------
    grid_n : int
        k-points per axis (even, >= 8).
    include_spins : {"both", "up", "down"}
    matsubara_damping : {"keep", "drop"}
        Whether the i*gamma broadening stays in the denominator on the
        imaginary axis.
    cell_area : float
        Unit-cell area in units of a^2.  The lattice constant itself cancels
        from the sheet conductivity (velocities carry one power of a each).
    degeneracy_tol : float
        Band pairs closer than this (eV) are treated as intraband.
    method : {"binned", "exact"}
    bins : int
        Energy grid size for ``method="binned"``.
    """

    grid_n: int = 1024
    include_spins: str = "both"
    matsubara_damping: str = "keep"
    cell_area: float = 1.0
    degeneracy_tol: float = 1e-9
    method: str = "binned"
    bins: int = 1 << 16

    def __post_init__(self):
        if not isinstance(self.grid_n, (int, np.integer)) or self.grid_n < 8:
            raise InvalidInputError(f"grid_n must be an integer >= 8, got {self.grid_n!r}")
        if self.grid_n % 2:
            raise InvalidInputError(f"grid_n must be even, got {self.grid_n}")
        if self.include_spins not in ("both", "up", "down"):
            raise InvalidInputError(f"include_spins must be both|up|down, got {self.include_spins!r}")
        if self.matsubara_damping not in ("keep", "drop"):
            raise InvalidInputError(
                f"matsubara_damping must be keep|drop, got {self.matsubara_damping!r}"
            )
        if not self.cell_area > 0:
            raise InvalidInputError(f"cell_area must be > 0, got {self.cell_area!r}")
        if self.method not in ("binned", "exact"):
            raise InvalidInputError(f"method must be binned|exact, got {self.method!r}")
        if self.bins < 16:
            raise InvalidInputError("bins must be >= 16")

    def with_(self, **changes):
        return replace(self, **changes)

    @property
    def spins(self):
        return {"both": (1, -1), "up": (1,), "down": (-1,)}[self.include_spins]


@dataclass(frozen=True)
class ConductivityTensor:
    """2x2 sheet conductivity in siemens.

    Entries may be scalars or equally shaped arrays (one value per
    frequency).  ``frequency`` is hbar*omega in eV; imaginary-axis values are
    stored as ``1j * xi``.
    """

    sxx: complex
    sxy: complex
    syx: complex
    syy: complex
    frequency: complex = 0.0

    @property
    def matrix(self):
        return np.array([[self.sxx, self.sxy], [self.syx, self.syy]])

    def in_sigma0(self):
        """Entries divided by the vacuum admittance, as a tuple (xx, xy, yx, yy)."""
        return tuple(np.asarray(getattr(self, "s" + c)) / SIGMA0 for c in _COMPONENTS)

    def real(self):
        """Tensor with imaginary parts dropped (for imaginary-axis data)."""
        return ConductivityTensor(
            *(np.real(getattr(self, "s" + c)) for c in _COMPONENTS), frequency=self.frequency
        )

    def __getitem__(self, idx):
        return ConductivityTensor(
            *(np.asarray(getattr(self, "s" + c))[idx] for c in _COMPONENTS),
            frequency=np.asarray(self.frequency)[idx],
        )

    @classmethod
    def diagonal(cls, sxx, syy, frequency=0.0):
        return cls(sxx, 0.0 * sxx, 0.0 * sxx, syy, frequency)


@dataclass(frozen=True)
class AnisotropyDecomposition:
    """Degree of anisotropy and normalized total diagonal conductivity."""

    delta: float
    sigma_t_tilde: float


def fermi_dirac(energy, temperature):
    """Fermi occupation 1 / (exp(E / k_B T) + 1), energies in eV.

    Uses the logistic function, so arguments far beyond the overflow range
    saturate cleanly to 0 or 1.
    """
    if temperature <= 0:
        raise InvalidInputError(f"temperature must be > 0, got {temperature!r}")
    return expit(-np.asarray(energy, dtype=float) / (K_B_EV * temperature))


def fermi_dirac_derivative(energy, temperature):
    """df/dE in 1/eV."""
    f = fermi_dirac(energy, temperature)
    return -f * (1.0 - f) / (K_B_EV * temperature)


def bz_grid(grid_n):
    """Uniform k-mesh over [-pi, pi)^2, returned as flat (kx, ky) arrays."""
    k = -math.pi + 2.0 * math.pi * np.arange(grid_n) / grid_n
    kx, ky = np.meshgrid(k, k, indexing="ij")
    return kx.ravel(), ky.ravel()


@lru_cache(maxsize=4)
def _band_data(t, t2, eps_m, eps_nm, JS, spin, grid_n, magnetic_shift):
    """Eigenvalues and band-basis velocity matrices on the full mesh.

    ``magnetic_shift`` is the Zeeman energy added to the magnetic sites only
    (zero when the shift is uniform and handled by an energy offset).
    Returned arrays are read-only since they are shared through the cache.
    """
    params = ModelParams(t=t, t2=t2, eps_m=eps_m, eps_nm=eps_nm, mu=0.0, JS=JS)
    kx, ky = bz_grid(grid_n)
    n = kx.size
    energies = np.empty((n, 3))
    vx = np.empty((n, 3, 3))
    vy = np.empty((n, 3, 3))
    # chunked to bound the temporaries of large meshes
    for lo in range(0, n, _CHUNK):
        k = (kx[lo:lo + _CHUNK], ky[lo:lo + _CHUNK])
        H = build_hamiltonian(k, spin, params)
        if magnetic_shift:
            H[:, 0, 0] += magnetic_shift
            H[:, 2, 2] += magnetic_shift
        e, U = np.linalg.eigh(H)
        Ut = np.swapaxes(U, -1, -2)
        energies[lo:lo + _CHUNK] = e
        vx[lo:lo + _CHUNK] = Ut @ velocity_operator(k, spin, params, "x") @ U
        vy[lo:lo + _CHUNK] = Ut @ velocity_operator(k, spin, params, "y") @ U
    for arr in (energies, vx, vy):
        arr.setflags(write=False)
    return energies, vx, vy


class KuboSpectrum:
    """Pole representation of the Kubo conductivity for one parameter set.

    Build it with :func:`kubo_spectrum`.  Weights are stored in units of
    e^2/hbar already divided by N * Omega.  With ``method="binned"`` only the
    binned poles are kept; the per-k poles (tens of MB per million k-points)
    are released after binning.
    """

    def __init__(self, params, cfg, drude, energies, weights):
        self.params = params
        self.cfg = cfg
        self.drude = drude  # dict component -> float
        self.energies = energies  # (n_poles,)
        self.weights = weights  # dict component -> (n_poles,)
        self._binned = None
        if cfg.method == "binned":
            self._binned = self._bin()
            self.energies = None
            self.weights = None

    def _bin(self):
        nb = self.cfg.bins
        emax = float(self.energies.max(initial=0.0)) * (1 + 1e-9) + 1e-12
        h = emax / (nb - 1)
        pos = self.energies / h
        lo = np.minimum(np.floor(pos).astype(np.int64), nb - 2)
        frac = pos - lo
        nodes = h * np.arange(nb)
        binned = {}
        for c, w in self.weights.items():
            acc = np.bincount(lo, weights=w * (1.0 - frac), minlength=nb)
            acc += np.bincount(lo + 1, weights=w * frac, minlength=nb)
            binned[c] = acc
        keep = np.zeros(nb, dtype=bool)
        for acc in binned.values():
            keep |= acc != 0.0
        return nodes[keep], {c: acc[keep] for c, acc in binned.items()}

    def _poles(self):
        if self._binned is not None:
            return self._binned
        return self.energies, self.weights

    def _damping(self, imaginary_axis):
        if imaginary_axis and self.cfg.matsubara_damping == "drop":
            return 0.0
        return self.params.gamma

    def evaluate_imaginary(self, xi_ev, chunk=256):
        """Real conductivity tensor at hbar*omega = i*xi (xi in eV, array).

        Returns a dict component -> array in units of e^2/hbar.
        """
        xi = np.atleast_1d(np.asarray(xi_ev, dtype=float))
        x = xi + self._damping(True)
        if np.any(x <= 0):
            raise InvalidInputError("imaginary-axis evaluation needs xi + gamma > 0")
        E, W = self._poles()
        E2 = E * E
        out = {c: np.empty_like(x) for c in _COMPONENTS}
        for start in range(0, x.size, chunk):
            xs = x[start:start + chunk]
            kern = xs[:, None] / (xs[:, None] ** 2 + E2[None, :])
            for c in _COMPONENTS:
                out[c][start:start + chunk] = self.drude[c] / xs + kern @ W[c]
        return out

    def evaluate(self, frequency_ev, chunk=256):
        """Complex conductivity tensor at complex hbar*omega (eV, array).

        Purely imaginary frequencies with positive imaginary part dispatch to
        :meth:`evaluate_imaginary`, which returns exactly real values.
        """
        f = np.atleast_1d(np.asarray(frequency_ev, dtype=complex))
        if np.all(f.real == 0) and np.all(f.imag > 0):
            real = self.evaluate_imaginary(f.imag, chunk)
            return {c: v.astype(complex) for c, v in real.items()}
        imaginary_axis = False
        w = f + 1j * self._damping(imaginary_axis)
        E, W = self._poles()
        E2 = E * E
        out = {c: np.empty(w.shape, dtype=complex) for c in _COMPONENTS}
        for start in range(0, w.size, chunk):
            ws = w[start:start + chunk]
            kern = ws[:, None] / (ws[:, None] ** 2 - E2[None, :])
            for c in _COMPONENTS:
                out[c][start:start + chunk] = 1j * (self.drude[c] / ws + kern @ W[c])
        return out

    def tensor(self, frequency_ev):
        """ConductivityTensor (siemens) at one or more complex frequencies (eV)."""
        freq = np.asarray(frequency_ev, dtype=complex)
        vals = self.evaluate(freq)
        scalar = freq.ndim == 0
        parts = [vals[c] * E2_HBAR for c in _COMPONENTS]
        if scalar:
            parts = [p[0] for p in parts]
        return ConductivityTensor(*parts, frequency=freq[()] if scalar else freq)


def kubo_spectrum(params, cfg=None):
    """Assemble the Drude weight and interband poles of the Kubo formula."""
    cfg = cfg or KuboConfig()
    T = params.temperature
    kT = K_B_EV * T
    n_cells = cfg.grid_n**2
    norm = 1.0 / (n_cells * cfg.cell_area)
    drude = dict.fromkeys(_COMPONENTS, 0.0)
    pole_e, pole_w = [], {c: [] for c in _COMPONENTS}
    for s in cfg.spins:
        zeeman = s * MU_B_EV * params.total_field
        if params.zeeman_sites == "all":
            mag_shift, offset = 0.0, zeeman
        else:
            mag_shift, offset = zeeman, 0.0
        E0, vx, vy = _band_data(
            params.t, params.t2, params.eps_m, params.eps_nm, params.JS, s, cfg.grid_n, mag_shift
        )
        E = E0 + (offset - params.mu)
        f = expit(-E / kT)
        dfde = -f * (1.0 - f) / kT
        vel = {"x": vx, "y": vy}
        for m in range(3):
            for c in _COMPONENTS:
                va, vb = vel[c[0]], vel[c[1]]
                drude[c] += -float(np.dot(dfde[:, m], va[:, m, m] * vb[:, m, m]))
            for n in range(m + 1, 3):
                dE = E[:, m] - E[:, n]
                degenerate = np.abs(dE) < cfg.degeneracy_tol
                with np.errstate(divide="ignore", invalid="ignore"):
                    coeff = np.where(
                        degenerate,
                        0.5 * (dfde[:, m] + dfde[:, n]),
                        (f[:, m] - f[:, n]) / np.where(degenerate, 1.0, dE),
                    )
                for c in _COMPONENTS:
                    va, vb = vel[c[0]], vel[c[1]]
                    w = -2.0 * coeff * va[:, m, n] * vb[:, m, n]
                    drude[c] += float(w[degenerate].sum())
                    pole_w[c].append(w[~degenerate])
                pole_e.append(np.abs(dE[~degenerate]))
    energies = np.concatenate(pole_e)
    weights = {c: np.concatenate(pole_w[c]) * norm for c in _COMPONENTS}
    drude = {c: v * norm for c, v in drude.items()}
    return KuboSpectrum(params, cfg, drude, energies, weights)


def kubo_conductivity(params, cfg=None, frequency=1j * 0.1):
    """Kubo conductivity tensor (siemens) at complex hbar*omega in eV.

    Pass a real frequency for the retarded response at real omega, or
    ``1j * xi`` for the imaginary-axis (Matsubara) response.
    """
    return kubo_spectrum(params, cfg).tensor(frequency)


def anisotropy(ct):
    """Split a conductivity tensor into (delta, sigma_t / sigma0).

    Raises
    ------
    DegenerateInputError
        If sxx + syy vanishes.
    """
    sxx = np.real_if_close(np.asarray(ct.sxx))
    syy = np.real_if_close(np.asarray(ct.syy))
    trace = sxx + syy
    if np.any(trace == 0):
        raise DegenerateInputError("sxx + syy vanishes; anisotropy undefined")
    delta = (sxx - syy) / trace
    sigma_t_tilde = trace / SIGMA0
    if delta.ndim == 0:
        delta, sigma_t_tilde = delta[()], sigma_t_tilde[()]
    return AnisotropyDecomposition(delta, sigma_t_tilde)


class ConductivityTable:
    """Conductivity tensors tabulated at sorted, distinct frequencies.

    Frequencies are complex hbar*omega values in eV lying on one axis
    (all real, or all purely imaginary).  Tabulated entries are bitwise
    identical to :func:`kubo_conductivity` at the same point; off-grid
    queries use a monotone (PCHIP) cubic per real/imaginary component and are
    approximate.
    """

    def __init__(self, spectrum, frequencies):
        freq = np.atleast_1d(np.asarray(frequencies, dtype=complex))
        if freq.size == 0:
            raise InvalidInputError("frequency list is empty")
        if np.all(freq.real == 0):
            axis = freq.imag
            self.axis = "imaginary"
        elif np.all(freq.imag == 0):
            axis = freq.real
            self.axis = "real"
        else:
            raise InvalidInputError("frequencies must all lie on the real or the imaginary axis")
        if np.any(np.diff(axis) <= 0):
            raise InvalidInputError("frequencies must be sorted and distinct")
        self.spectrum = spectrum
        self.frequencies = freq
        self._axis_values = axis
        # one evaluation per point keeps entries identical to one-shot calls
        rows = [spectrum.tensor(f) for f in freq]
        self.tensors = rows
        self._interp = None

    def __len__(self):
        return len(self.tensors)

    def __getitem__(self, i):
        return self.tensors[i]

    def lookup(self, frequency):
        """Tabulated tensor at an exactly tabulated frequency."""
        hits = np.nonzero(self.frequencies == complex(frequency))[0]
        if hits.size == 0:
            raise KeyError(frequency)
        return self.tensors[hits[0]]

    def interpolate(self, frequency):
        """Monotone cubic interpolation inside the tabulated range.

        On the imaginary axis the diagonal entries are positive and decay
        roughly like ``D / (hbar xi + gamma)``, so their reciprocal is
        interpolated instead; it is close to linear in ``xi``.
        """
        value = complex(frequency)
        a = value.imag if self.axis == "imaginary" else value.real
        lo, hi = self._axis_values[0], self._axis_values[-1]
        if not lo <= a <= hi:
            raise InvalidInputError(f"frequency {frequency} outside table range [{lo}, {hi}]")
        if len(self) == 1:
            return self.tensors[0]
        if self._interp is None:
            self._interp = {}
            for c in _COMPONENTS:
                vals = np.array([complex(getattr(t, "s" + c)) for t in self.tensors])
                recip = (
                    self.axis == "imaginary"
                    and c in ("xx", "yy")
                    and np.all(vals.real > 0)
                    and not np.any(vals.imag)
                )
                if recip:
                    vals = 1.0 / vals.real
                self._interp[c] = (
                    recip,
                    PchipInterpolator(self._axis_values, vals.real),
                    PchipInterpolator(self._axis_values, vals.imag),
                )
        parts = []
        for c in _COMPONENTS:
            recip, re, im = self._interp[c]
            v = complex(re(a)) + 1j * complex(im(a))
            parts.append(1.0 / v if recip else v)
        return ConductivityTensor(*parts, frequency=value)


def conductivity_table(params, cfg, frequencies, spectrum=None):
    """Tabulate the conductivity at each frequency (see :class:`ConductivityTable`)."""
    spectrum = spectrum or kubo_spectrum(params, cfg)
    return ConductivityTable(spectrum, frequencies)
