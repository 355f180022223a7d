"""Small linear SCMs with a brute-force interventional oracle.

Each ``sample_*`` function draws ``n`` rows; passing ``do`` fixes the
treatment instead of generating it, which is how the oracle computes
``E[Y | do(X = x)]`` without any estimator.
"""

import numpy as np
import pandas as pd

from causalab.identify import Estimand


def sample_backdoor(n, rng, do=None):
    z = rng.standard_normal(n)
    x = z + rng.standard_normal(n) if do is None else np.full(n, float(do))
    y = 2 * x + 3 * z + rng.standard_normal(n)
    return pd.DataFrame({"Z": z, "X": x, "Y": y})


def sample_iv(n, rng, do=None):
    w = rng.standard_normal(n)
    u = rng.standard_normal(n)
    x = w + u + rng.standard_normal(n) if do is None else np.full(n, float(do))
    y = 2 * x + u
    return pd.DataFrame({"W": w, "X": x, "Y": y})


def sample_frontdoor(n, rng, do=None):
    u = rng.standard_normal(n)
    x = u + rng.standard_normal(n) if do is None else np.full(n, float(do))
    m = 1.5 * x + rng.standard_normal(n)
    y = 2 * m + u
    return pd.DataFrame({"X": x, "M": m, "Y": y})


CASES = {
    "backdoor": (sample_backdoor, Estimand("backdoor", "X", "Y", adjustment=("Z",)), 2.0),
    "iv": (sample_iv, Estimand("iv", "X", "Y", instruments=("W",)), 2.0),
    "frontdoor": (sample_frontdoor, Estimand("frontdoor", "X", "Y", mediators=("M",)), 3.0),
}


def interventional_effect(sampler, n=400_000, seed=0):
    """``E[Y | do(X=1)] - E[Y | do(X=0)]`` by simulation with common random numbers."""
    y1 = sampler(n, np.random.default_rng(seed), do=1.0)["Y"].mean()
    y0 = sampler(n, np.random.default_rng(seed), do=0.0)["Y"].mean()
    return float(y1 - y0)
