"""Casimir energy and torque between two-dimensional altermagnetic sheets.

The pipeline runs lattice -> response -> optics -> lifshitz, with
closed-form limits in :mod:`casalter.asymptotics` and a config-driven
front end in :mod:`casalter.cli`.
"""

from .errors import (
    CasalterError,
    ConvergenceError,
    DegenerateInputError,
    InvalidInputError,
    SingularDenominatorError,
)
from .lattice import ModelParams
from .lifshitz import (
    AltermagnetSheet,
    ConstantSheet,
    LifshitzConfig,
    PerfectMirror,
    casimir_energy,
    casimir_torque,
)
from .response import KuboConfig, anisotropy, kubo_conductivity

__version__ = "0.1.0"

__all__ = [
    "AltermagnetSheet",
    "CasalterError",
    "ConstantSheet",
    "ConvergenceError",
    "DegenerateInputError",
    "InvalidInputError",
    "KuboConfig",
    "LifshitzConfig",
    "ModelParams",
    "PerfectMirror",
    "SingularDenominatorError",
    "anisotropy",
    "casimir_energy",
    "casimir_torque",
    "kubo_conductivity",
    "__version__",
]
