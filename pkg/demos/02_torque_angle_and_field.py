"""Casimir torque between two altermagnet sheets: angle and field dependence.

Run:  python demos/02_torque_angle_and_field.py
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from casalter.lattice import ModelParams
from casalter.lifshitz import AltermagnetSheet, LifshitzConfig, casimir_torque

cfg = LifshitzConfig(d=30e-9, T=30.0, theta=math.pi / 4)
sheets = {}


def sheet(B, bias=0.0):
    key = (B, bias)
    if key not in sheets:
        sheets[key] = AltermagnetSheet(ModelParams(B=B, B_bias=bias, temperature=cfg.T))
    return sheets[key]


# %% tau(theta) is a clean sin(2 theta); negative torque pulls the axes together
s = sheet(10.0)
theta = np.linspace(0, math.pi, 9)
tau = np.array([casimir_torque(s, s, cfg.with_(theta=t)).torque for t in theta])
amp = np.dot(tau, np.sin(2 * theta)) / np.dot(np.sin(2 * theta), np.sin(2 * theta))
print(f"A = {amp:.4e} N m per m^2, max |tau - A sin 2theta| / |A| = "
      f"{np.max(np.abs(tau - amp * np.sin(2 * theta))) / abs(amp):.1e}")

# %% Zero field gives zero torque; the torque is even and quadratic in B
for B in (0.0, 1.0, 2.0, 4.0, -4.0):
    print(f"B = {B:+.1f} T  tau = {casimir_torque(sheet(B), sheet(B), cfg).torque:+.4e} N m")

# %% Exchange bias on sheet 2 moves one zero crossing to B = -B_bias


def biased(B):
    return casimir_torque(sheet(B), sheet(B, 5.0), cfg).torque


grid = np.linspace(-8, 3, 12)
vals = [biased(b) for b in grid]
roots = [brentq(biased, a, b, xtol=1e-3) for a, b, ya, yb in zip(grid, grid[1:], vals, vals[1:]) if ya * yb < 0]
print("sign changes with B_bias = 5 T at", [round(r, 3) for r in roots], "T")
