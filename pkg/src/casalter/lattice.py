"""Spin-resolved three-band Lieb-lattice model of a two-dimensional altermagnet.

The Bloch Hamiltonian acts on the (magnetic A, nonmagnetic, magnetic B)
sublattice basis.  Energies are in eV, crystal momenta in units of 1/a with
the lattice constant a set to one.  All functions broadcast over arrays of
k-points: ``k`` may be a pair ``(kx, ky)`` of scalars or of equally shaped
arrays, and matrices come back with shape ``kx.shape + (3, 3)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import NamedTuple

import numpy as np

from .constants import MU_B_EV
from .errors import InvalidInputError

__all__ = [
    "ModelParams",
    "BandEigens",
    "SYMMETRY_RELATIONS",
    "spin_sign",
    "zeeman_energy",
    "build_hamiltonian",
    "eigensolve",
    "velocity_operator",
    "band_path",
    "check_symmetries",
    "HIGH_SYMMETRY_POINTS",
]

HIGH_SYMMETRY_POINTS = {
    "G": (0.0, 0.0),
    "X": (math.pi, 0.0),
    "Y": (0.0, math.pi),
    "M": (math.pi, math.pi),
}


@dataclass(frozen=True)
class ModelParams:
    """Parameters of one altermagnetic sheet.

    Defaults reproduce the band-structure parameter set t = 1, t2 = 0.1,
    eps_m = eps_nm = 0, mu = 0.4, JS = 0.4 (eV) with gamma = 0.05 eV.

    Attributes
    ----------
    t, t2 : float
        Nearest and diagonal hopping (eV).
    eps_m, eps_nm : float
        On-site energies of the magnetic and nonmagnetic sites (eV).
    mu : float
        Chemical potential (eV).
    JS : float
        Exchange energy J*S (eV).
    B : float
        Out-of-plane magnetic field (T).
    B_bias : float
        Exchange-bias field added to ``B`` (T).
    gamma : float
        Phenomenological damping (eV), must be positive.
    temperature : float
        Electronic temperature (K), must be positive.
    zeeman_sites : {"all", "magnetic"}
        Orbitals that feel the Zeeman shift.
    """

    t: float = 1.0
    t2: float = 0.1
    eps_m: float = 0.0
    eps_nm: float = 0.0
    mu: float = 0.4
    JS: float = 0.4
    B: float = 0.0
    B_bias: float = 0.0
    gamma: float = 0.05
    temperature: float = 300.0
    zeeman_sites: str = "all"

    def __post_init__(self):
        for f in fields(self):
            if f.name == "zeeman_sites":
                continue
            value = getattr(self, f.name)
            if not math.isfinite(value):
                raise InvalidInputError(f"ModelParams.{f.name} must be finite, got {value!r}")
        if self.gamma <= 0:
            raise InvalidInputError(f"ModelParams.gamma must be > 0, got {self.gamma!r}")
        if self.temperature <= 0:
            raise InvalidInputError(
                f"ModelParams.temperature must be > 0, got {self.temperature!r}"
            )
        if self.zeeman_sites not in ("all", "magnetic"):
            raise InvalidInputError(
                f"ModelParams.zeeman_sites must be 'all' or 'magnetic', got {self.zeeman_sites!r}"
            )

    @property
    def total_field(self):
        """Field felt by the electrons, B + B_bias (T)."""
        return self.B + self.B_bias

    def with_(self, **changes):
        """Return a copy with some fields replaced."""
        return replace(self, **changes)


class BandEigens(NamedTuple):
    """Eigen-decomposition of a Bloch Hamiltonian.

    ``energies[..., m]`` ascends in m; ``states[..., :, m]`` is the m-th
    eigenvector.
    """

    energies: np.ndarray
    states: np.ndarray


def spin_sign(spin):
    """Validate a spin label and return it as +1 or -1.

    Accepts +1/-1 or the strings ``"up"``/``"down"``.
    """
    if isinstance(spin, str):
        try:
            return {"up": 1, "down": -1, "+": 1, "-": -1}[spin.lower()]
        except KeyError:
            raise InvalidInputError(f"unknown spin label {spin!r}") from None
    if spin in (1, -1):
        return int(spin)
    raise InvalidInputError(f"spin must be +1 or -1, got {spin!r}")


def zeeman_energy(spin, params):
    """Zeeman shift sigma * mu_B * (B + B_bias) in eV."""
    return spin_sign(spin) * MU_B_EV * params.total_field


def _split_k(k):
    kx, ky = k
    kx = np.asarray(kx, dtype=float)
    ky = np.asarray(ky, dtype=float)
    return np.broadcast_arrays(kx, ky)


def build_hamiltonian(k, spin, params):
    """Bloch Hamiltonian H_sigma(k) including the Zeeman shift.

    Parameters
    ----------
    k : pair of float or array_like
        Crystal momentum (kx, ky) in units of 1/a.
    spin : int or str
        +1 (up) or -1 (down).
    params : ModelParams

    Returns
    -------
    ndarray, shape ``kx.shape + (3, 3)``
        Real symmetric matrix in eV.
    """
    s = spin_sign(spin)
    kx, ky = _split_k(k)
    H = np.zeros(kx.shape + (3, 3))
    onsite_m = params.eps_m - params.mu
    H[..., 0, 0] = onsite_m - s * params.JS
    H[..., 1, 1] = params.eps_nm - params.mu
    H[..., 2, 2] = onsite_m + s * params.JS
    h12 = 2.0 * params.t * np.cos(kx / 2)
    h23 = 2.0 * params.t * np.cos(ky / 2)
    h13 = 2.0 * params.t2 * (np.cos((kx + ky) / 2) + np.cos((kx - ky) / 2))
    H[..., 0, 1] = H[..., 1, 0] = h12
    H[..., 1, 2] = H[..., 2, 1] = h23
    H[..., 0, 2] = H[..., 2, 0] = h13
    shift = zeeman_energy(s, params)
    if shift != 0.0:
        sites = (0, 1, 2) if params.zeeman_sites == "all" else (0, 2)
        for i in sites:
            H[..., i, i] += shift
    return H


def eigensolve(H, herm_tol=1e-14):
    """Diagonalize one or a stack of Hermitian 3x3 matrices.

    Eigenvalues come back in ascending order.  LAPACK's ``heevd`` path is
    deterministic for identical input.

    Raises
    ------
    InvalidInputError
        If ``H`` deviates from Hermiticity by more than ``herm_tol``
        relative to its largest entry.
    """
    H = np.asarray(H)
    if H.shape[-2:] != (3, 3):
        raise InvalidInputError(f"expected (..., 3, 3) matrices, got shape {H.shape}")
    scale = max(float(np.max(np.abs(H), initial=0.0)), 1.0)
    asym = float(np.max(np.abs(H - np.conj(np.swapaxes(H, -1, -2))), initial=0.0))
    if asym > herm_tol * scale:
        raise InvalidInputError(f"matrix is not Hermitian (max |H - H^dagger| = {asym:.3e})")
    energies, states = np.linalg.eigh(H)
    return BandEigens(energies, states)


def velocity_operator(k, spin, params, axis):
    """Analytic derivative dH/dk_axis (eV * a).

    The Zeeman and on-site terms are k-independent, so ``spin`` and the
    field never enter; they are accepted for signature symmetry with
    :func:`build_hamiltonian`.
    """
    spin_sign(spin)
    kx, ky = _split_k(k)
    V = np.zeros(kx.shape + (3, 3))
    sp = np.sin((kx + ky) / 2)
    sm = np.sin((kx - ky) / 2)
    if axis == "x":
        V[..., 0, 1] = V[..., 1, 0] = -params.t * np.sin(kx / 2)
        V[..., 0, 2] = V[..., 2, 0] = -params.t2 * (sp + sm)
    elif axis == "y":
        V[..., 1, 2] = V[..., 2, 1] = -params.t * np.sin(ky / 2)
        V[..., 0, 2] = V[..., 2, 0] = -params.t2 * (sp - sm)
    else:
        raise InvalidInputError(f"axis must be 'x' or 'y', got {axis!r}")
    return V


def band_path(params, spin, path, samples_per_segment=50):
    """Band energies along a piecewise-linear path in the Brillouin zone.

    Parameters
    ----------
    path : sequence of (kx, ky) or of labels from ``HIGH_SYMMETRY_POINTS``
    samples_per_segment : int
        Points per segment, the segment end excluded except for the last.

    Returns
    -------
    ndarray, shape (n_samples, 4)
        Columns are arclength, E1, E2, E3 (ascending, eV).
    """
    pts = [HIGH_SYMMETRY_POINTS[p] if isinstance(p, str) else p for p in path]
    if len(pts) == 0:
        raise InvalidInputError("band path must contain at least one k-point")
    if samples_per_segment < 1:
        raise InvalidInputError("samples_per_segment must be >= 1")
    pts = np.asarray(pts, dtype=float)
    if len(pts) == 1:
        ks = pts.copy()
    else:
        chunks = []
        for a, b in zip(pts[:-1], pts[1:]):
            frac = np.arange(samples_per_segment) / samples_per_segment
            chunks.append(a + frac[:, None] * (b - a))
        chunks.append(pts[-1:])
        ks = np.concatenate(chunks)
    steps = np.linalg.norm(np.diff(ks, axis=0), axis=1)
    arclength = np.concatenate([[0.0], np.cumsum(steps)])
    H = build_hamiltonian((ks[:, 0], ks[:, 1]), spin, params)
    energies = eigensolve(H).energies
    return np.column_stack([arclength, energies])


# Each relation maps (spin, kx, ky) to the partner (spin', kx', ky') whose
# spectrum must coincide.  The two diagonal mirrors are written here with
# the geometric k-maps (kx, ky) -> (-ky, -kx) and (ky, kx) composed with T.
SYMMETRY_RELATIONS = {
    "C2z": lambda s, kx, ky: (s, -kx, -ky),
    "Mx": lambda s, kx, ky: (s, kx, -ky),
    "My": lambda s, kx, ky: (s, -kx, ky),
    "C4z+T": lambda s, kx, ky: (-s, ky, -kx),
    "C4z-T": lambda s, kx, ky: (-s, -ky, kx),
    "MxyT": lambda s, kx, ky: (-s, -ky, -kx),
    "Mxbar_yT": lambda s, kx, ky: (-s, ky, kx),
}

TIME_REVERSAL_RELATIONS = ("C4z+T", "C4z-T", "MxyT", "Mxbar_yT")


def check_symmetries(params, k_sample):
    """Largest spectral violation of each crystalline symmetry relation.

    Parameters
    ----------
    params : ModelParams
    k_sample : array_like, shape (n, 2)

    Returns
    -------
    dict
        Relation name -> max over k and both spins of |E_lhs - E_rhs| (eV).
        At zero field every entry is at rounding level; a field leaves the
        three spatial relations intact and splits the time-reversal-composed
        ones by 2 mu_B (B + B_bias) when the Zeeman shift is uniform.
    """
    k_sample = np.asarray(k_sample, dtype=float)
    kx, ky = k_sample[:, 0], k_sample[:, 1]
    report = {}
    for name, rel in SYMMETRY_RELATIONS.items():
        worst = 0.0
        for s in (1, -1):
            lhs = eigensolve(build_hamiltonian((kx, ky), s, params)).energies
            s2, kx2, ky2 = rel(s, kx, ky)
            rhs = eigensolve(build_hamiltonian((kx2, ky2), s2, params)).energies
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        report[name] = worst
    return report
