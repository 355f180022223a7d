"""Synthetic current measurements for a platinum wire.

Rows follow ``V = I R``, ``R = rho L / A`` and ``rho = rho0 (1 + alpha dT)``
exactly.  ``T`` holds the temperature offset ``dT`` in kelvin.
"""

from __future__ import annotations

import numpy as np
import pandas as pd

from ..dag import parse_dot

# platinum, handbook values
PLATINUM = {"rho0": 1.06e-7, "alpha": 3.92e-3, "T0": 293.15}

DEFAULT_RANGES = {
    "V": (1.0, 10.0),
    "L": (0.5, 2.0),
    "A": (1e-7, 1e-6),
    "T": (0.0, 100.0),
}

COLUMNS = ["V", "L", "A", "T", "rho", "R", "I"]

_COMMON = "V -> I; R -> I; rho -> R; L -> R; A -> R;"

# A: both the direct T->I arm and the route through resistivity
MODEL_A = parse_dot(f"digraph {{ {_COMMON} T -> rho; T -> I; }}")
# B: direct arm only, resistivity independent of temperature
MODEL_B = parse_dot(f"digraph {{ {_COMMON} T -> I; }}")
# C: physical model, temperature acts only through resistivity
MODEL_C = parse_dot(f"digraph {{ {_COMMON} T -> rho; }}")

MODELS = {"A": MODEL_A, "B": MODEL_B, "C": MODEL_C}


def ohm_row(V, L, A, T, constants=None) -> dict:
    c = {**PLATINUM, **(constants or {})}
    rho = c["rho0"] * (1 + c["alpha"] * T)
    R = rho * L / A
    return {"V": V, "L": L, "A": A, "T": T, "rho": rho, "R": R, "I": V / R}


def generate_ohm_dataset(n, ranges=None, constants=None, rng=None) -> pd.DataFrame:
    """Draw ``V, L, A, T`` uniformly from ``ranges`` and derive ``rho, R, I``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    ranges = {**DEFAULT_RANGES, **(ranges or {})}
    for name, (lo, hi) in ranges.items():
        if name == "T":
            if lo < 0 or hi < lo:
                raise ValueError(f"bad range for T: {(lo, hi)}")
        elif lo <= 0 or hi < lo:
            raise ValueError(f"range for {name} must be positive, got {(lo, hi)}")
    rng = np.random.default_rng(rng)
    draws = {k: rng.uniform(*ranges[k], size=n) for k in ("V", "L", "A", "T")}
    row = ohm_row(draws["V"], draws["L"], draws["A"], draws["T"], constants)
    return pd.DataFrame({k: np.asarray(row[k], dtype=float) for k in COLUMNS})
