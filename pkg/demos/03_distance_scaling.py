"""Distance and temperature dependence of the torque, against the limit laws.

Run:  python demos/03_distance_scaling.py
"""
from __future__ import annotations

import math

import numpy as np

from casalter.asymptotics import (
    classify_regime,
    scaling_probe,
    torque_high_temperature,
    torque_weak_anisotropy,
)
from casalter.lattice import ModelParams
from casalter.lifshitz import AltermagnetSheet, LifshitzConfig, casimir_torque, matsubara_grid

base = LifshitzConfig(theta=math.pi / 4)
sheets = {T: AltermagnetSheet(ModelParams(B=10.0, temperature=T)) for T in (30.0, 300.0)}

# %% Torque vs separation at two temperatures
d_grid = np.geomspace(30e-9, 10e-6, 6)
for T, s in sheets.items():
    tau = [casimir_torque(s, s, base.with_(T=T, d=float(d))).torque for d in d_grid]
    print(f"T = {T:5.1f} K  " + "  ".join(f"{t:+.2e}" for t in tau))

# %% Which regime is each point in?
for d in (5e-9, 2e-6, 20e-6):
    reg, scales = classify_regime(d, 300.0)
    print(f"d = {d:.0e} m at 300 K -> {reg.tag}  ({reg.validity})")

# %% Log-log slope over 1-5 um.  The 1/d^3 law needs xi_1 d / c << 1 as well as
# hbar c / d << hbar omega_0; at 30 K, xi_1 d / c is 0.08-0.41 in this window
# and the thermal n = 0 term carries no torque, so the slope comes out steeper.
for T, s in sheets.items():
    cfg = base.with_(T=T)
    fit = scaling_probe(lambda d: casimir_torque(s, s, cfg.with_(d=float(d))).torque,
                        "retarded", np.geomspace(1e-6, 5e-6, 5), cfg)
    print(f"T = {T:5.1f} K  slope {fit.slope:.3f} +/- {fit.slope_ci95:.3f}")

# %% Closed-form predictors
s = sheets[30.0]
ref = base.with_(T=30.0, d=30e-9)
full = casimir_torque(s, s, ref).torque
print(f"weak anisotropy / full at 30 nm, 30 K : {torque_weak_anisotropy(s, s, ref) / full:.6f}")

hot = sheets[300.0]
far = base.with_(T=300.0, d=20e-6)
ct = hot.tensor_at(matsubara_grid(300.0, 1)[1:])[0]
print(f"high-T law / full at 20 um, 300 K    : "
      f"{torque_high_temperature(ct, ct, far) / casimir_torque(hot, hot, far).torque:.3f}")
