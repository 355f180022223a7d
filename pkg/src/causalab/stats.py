"""Least squares with classical inference, shared by the estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

RANK_TOL = 1e-10


class RankDeficientError(ValueError):
    def __init__(self, columns):
        self.columns = list(columns)
        super().__init__(f"rank-deficient design; collinear columns: {', '.join(self.columns)}")


@dataclass
class OlsFit:
    names: list[str]
    coef: np.ndarray
    se: np.ndarray
    resid: np.ndarray
    sigma2: float
    df_resid: int

    def __getitem__(self, name) -> float:
        return float(self.coef[self.names.index(name)])

    def stderr(self, name) -> float:
        return float(self.se[self.names.index(name)])


def ols(y, X, names, intercept=True) -> OlsFit:
    """Fit ``y ~ X`` by Householder QR on unit-norm columns.

    A column whose ``|R_jj|`` falls below ``RANK_TOL`` times the largest one
    is collinear with the columns before it; those are reported in the error.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float).reshape(len(y), -1)
    names = list(names)
    if intercept:
        X = np.column_stack([np.ones(len(y)), X])
        names = ["(intercept)"] + names
    n, p = X.shape
    if n <= p:
        raise ValueError(f"need more rows ({n}) than coefficients ({p})")
    scale = np.linalg.norm(X, axis=0)
    scale[scale == 0] = 1.0
    Xs = X / scale
    q, r = np.linalg.qr(Xs)
    diag = np.abs(np.diag(r))
    bad = diag < RANK_TOL * diag.max()
    if bad.any() or not np.all(np.linalg.norm(X, axis=0) > 0):
        zero = np.linalg.norm(X, axis=0) == 0
        raise RankDeficientError([nm for nm, b in zip(names, bad | zero) if b])
    beta_s = np.linalg.solve(r, q.T @ y)
    resid = y - Xs @ beta_s
    df = n - p
    sigma2 = float(resid @ resid) / df
    rinv = np.linalg.solve(r, np.eye(p))
    cov_s = sigma2 * (rinv @ rinv.T)
    coef = beta_s / scale
    se = np.sqrt(np.diag(cov_s)) / scale
    return OlsFit(names, coef, se, resid, sigma2, df)


def normal_ci(value, se, level=0.95):
    z = stats.norm.ppf(0.5 + level / 2)
    return value - z * se, value + z * se


def two_sided_p(value, se) -> float:
    if se == 0:
        return 0.0 if value != 0 else 1.0
    return float(2 * stats.norm.sf(abs(value) / se))
