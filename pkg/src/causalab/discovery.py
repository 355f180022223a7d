"""Structure learning: Fisher-z CI tests, the PC algorithm and DirectLiNGAM.

Both learners follow the scikit-learn estimator protocol (``fit`` returns
``self``, learned state lives in trailing-underscore attributes, constructor
arguments are exposed through ``get_params``).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import pandas as pd
from scipy import stats
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .dag import Dag
from .data import check_columns, check_table

__all__ = [
    "ci_test_partial_correlation",
    "CpdagResult",
    "PC",
    "DirectLiNGAM",
    "run_pc",
    "run_lingam",
    "SingularCovarianceWarning",
]

log = logging.getLogger(__name__)


class SingularCovarianceWarning(RuntimeWarning):
    pass


def _fisher_z(corr: np.ndarray, i: int, j: int, cond, n: int):
    idx = [i, j, *cond]
    sub = corr[np.ix_(idx, idx)]
    try:
        prec = np.linalg.inv(sub)
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(prec).all() or np.linalg.cond(sub) > 1e12:
        return None
    denom = prec[0, 0] * prec[1, 1]
    if denom <= 0:
        return None
    r = -prec[0, 1] / np.sqrt(denom)
    r = float(np.clip(r, -1.0, 1.0))
    dof = n - len(cond) - 3
    if abs(r) >= 1.0:
        return r, 0.0
    z = 0.5 * np.log1p(2 * r / (1 - r)) * np.sqrt(dof)
    return r, float(2 * stats.norm.sf(abs(z)))


def ci_test_partial_correlation(data, x, y, cond=(), alpha=0.05):
    """Fisher-z test of ``x ⟂ y | cond`` on the partial correlation.

    Returns ``(independent, p_value)`` with ``independent = p_value >= alpha``.
    A singular conditioning covariance yields ``(False, 0.0)`` and a
    :class:`SingularCovarianceWarning`.
    """
    df = check_table(data)
    cond = list(cond)
    check_columns(df, x, y, *cond)
    n = len(df)
    if n <= len(cond) + 3:
        raise ValueError(f"need more than {len(cond) + 3} rows for {len(cond)} conditioning columns")
    cols = [x, y, *cond]
    arr = df[cols].to_numpy()
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(arr, rowvar=False)
    if not np.isfinite(corr).all():
        warnings.warn(f"constant column among {cols}", SingularCovarianceWarning, stacklevel=2)
        return False, 0.0
    res = _fisher_z(np.atleast_2d(corr), 0, 1, list(range(2, len(cols))), n)
    if res is None:
        warnings.warn(f"singular conditioning covariance for {cond}", SingularCovarianceWarning, stacklevel=2)
        return False, 0.0
    p = res[1]
    return p >= alpha, p


# ---------------------------------------------------------------------------
# PC


@dataclass
class CpdagResult:
    """Markov equivalence class learned by PC."""

    nodes: tuple[str, ...]
    skeleton: frozenset
    directed: frozenset
    sepsets: dict = field(default_factory=dict)
    alpha: float = 0.05

    @property
    def undirected(self) -> frozenset:
        oriented = {frozenset(e) for e in self.directed}
        return frozenset(e for e in self.skeleton if e not in oriented)

    def sepset(self, a, b):
        return self.sepsets.get(frozenset((a, b)))

    def to_dag(self) -> Dag:
        """Directed part only; raises if undirected edges remain."""
        if self.undirected:
            raise ValueError("CPDAG has undirected edges; it does not determine a single DAG")
        return Dag(self.nodes, sorted(self.directed))

    def to_dot(self) -> str:
        lines = ["digraph {"]
        lines += [f'  "{v}";' for v in self.nodes]
        lines += [f'  "{a}" -> "{b}";' for a, b in sorted(self.directed)]
        lines += [f'  "{a}" -> "{b}" [dir=none];' for a, b in sorted(tuple(sorted(e)) for e in self.undirected)]
        lines.append("}")
        return "\n".join(lines) + "\n"


class PC(BaseEstimator):
    """Order-independent ("stable") PC with Fisher-z tests.

    Parameters
    ----------
    alpha : float, default=0.05
        Significance level; a pair is declared independent when ``p >= alpha``.
    max_cond : int or None
        Largest conditioning-set size to try.

    Attributes
    ----------
    result_ : CpdagResult
    pvalues_ : dict
        Largest p-value seen for each removed pair.
    """

    def __init__(self, alpha=0.05, max_cond=None):
        self.alpha = alpha
        self.max_cond = max_cond

    def fit(self, X, y=None):
        df = check_table(X, min_cols=2)
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        # column order never matters: everything iterates over sorted names
        names = sorted(df.columns)
        n = len(df)
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.atleast_2d(np.corrcoef(df[names].to_numpy(), rowvar=False))
        idx = {v: i for i, v in enumerate(names)}
        adj = {v: set(names) - {v} for v in names}
        sepsets = {}
        pvalues = {}

        level = 0
        while True:
            if self.max_cond is not None and level > self.max_cond:
                break
            if n - level - 3 <= 0:
                break
            frozen = {v: set(a) for v, a in adj.items()}
            if not any(len(frozen[x] - {y}) >= level for x in names for y in frozen[x]):
                break
            for x in names:
                for y in sorted(frozen[x]):
                    if y not in adj[x]:
                        continue
                    for cond in combinations(sorted(frozen[x] - {y}), level):
                        if not np.isfinite(corr[np.ix_([idx[x], idx[y]], [idx[x], idx[y]])]).all():
                            break
                        res = _fisher_z(corr, idx[x], idx[y], [idx[c] for c in cond], n)
                        if res is None:
                            continue
                        if res[1] >= self.alpha:
                            adj[x].discard(y)
                            adj[y].discard(x)
                            key = frozenset((x, y))
                            sepsets[key] = frozenset(cond)
                            pvalues[key] = res[1]
                            break
            level += 1

        skeleton = frozenset(frozenset((a, b)) for a in names for b in adj[a])
        directed = self._orient(names, adj, sepsets)
        self.result_ = CpdagResult(tuple(df.columns), skeleton, frozenset(directed), sepsets, self.alpha)
        self.pvalues_ = pvalues
        return self

    @staticmethod
    def _orient(names, adj, sepsets):
        directed = set()

        def is_dir(a, b):
            return (a, b) in directed

        def undirected(a, b):
            return b in adj[a] and not is_dir(a, b) and not is_dir(b, a)

        # v-structures x -> z <- y
        for z in names:
            for x, y in combinations(sorted(adj[z]), 2):
                if y in adj[x]:
                    continue
                if z in sepsets.get(frozenset((x, y)), frozenset()):
                    continue
                for a in (x, y):
                    if not is_dir(z, a):
                        directed.add((a, z))

        # Meek rules 1-3 to a fixpoint
        changed = True
        while changed:
            changed = False
            for a in names:
                for b in sorted(adj[a]):
                    if not undirected(a, b):
                        continue
                    # R1: c -> a - b, c and b non-adjacent
                    r1 = any(is_dir(c, a) and b not in adj[c] and c != b for c in names)
                    # R2: a -> c -> b
                    r2 = any(is_dir(a, c) and is_dir(c, b) for c in adj[a] & adj[b])
                    # R3: a - c -> b, a - d -> b, c and d non-adjacent
                    cs = [c for c in adj[a] & adj[b] if undirected(a, c) and is_dir(c, b)]
                    r3 = any(d not in adj[c] for c, d in combinations(cs, 2))
                    if r1 or r2 or r3:
                        directed.add((a, b))
                        changed = True
        return directed

    @property
    def cpdag_(self) -> CpdagResult:
        if not hasattr(self, "result_"):
            raise NotFittedError("PC instance is not fitted yet")
        return self.result_


def run_pc(data, alpha=0.05) -> CpdagResult:
    return PC(alpha=alpha).fit(data).result_


# ---------------------------------------------------------------------------
# LiNGAM

_K1, _K2, _GAMMA = 79.047, 7.4129, 0.37457


def _entropy(u):
    """Maximum-entropy approximation of differential entropy for unit-variance ``u``."""
    return (
        (1 + np.log(2 * np.pi)) / 2
        - _K1 * (np.mean(np.log(np.cosh(u))) - _GAMMA) ** 2
        - _K2 * np.mean(u * np.exp(-(u**2) / 2)) ** 2
    )


def _standardize(x):
    sd = x.std()
    return (x - x.mean()) / sd if sd > 0 else x - x.mean()


def _residual(xi, xj):
    """Residual of ``xi`` after least-squares regression on ``xj``."""
    var = np.var(xj)
    if var == 0:
        return xi
    return xi - (np.cov(xi, xj, bias=True)[0, 1] / var) * xj


def _lr_kurtosis(xi, xj):
    """Cumulant-based likelihood ratio; positive favours ``xi -> xj``.

    For standardized variables with correlation ``rho`` the log-likelihood
    difference between the two directions is approximated by
    ``rho * E[xi^3 xj - xi xj^3]`` scaled by the sign of the excess kurtosis.
    """
    rho = np.mean(xi * xj)
    k = np.mean(xi**4) - 3
    return np.sign(k) * rho * np.mean(xi**3 * xj - xi * xj**3)


def _lr_entropy(xi, xj):
    ri = _standardize(_residual(xi, xj))
    rj = _standardize(_residual(xj, xi))
    return (_entropy(xj) + _entropy(ri)) - (_entropy(xi) + _entropy(rj))


class DirectLiNGAM(BaseEstimator):
    """DirectLiNGAM: iteratively pick the most exogenous variable, regress it out.

    Exogeneity is scored with pairwise likelihood ratios, which approximate
    differences of mutual information between a variable and the residuals
    of the others.  ``measure="kurtosis"`` uses the fourth-cumulant ratio,
    ``measure="entropy"`` the maximum-entropy approximation.

    Parameters
    ----------
    measure : {"kurtosis", "entropy"}
    threshold : float, default=0.01
        Edges whose standardized weight has absolute value at most this are
        dropped.

    Attributes
    ----------
    causal_order_ : list of str
    adjacency_matrix_ : ndarray of shape (n_features, n_features)
        ``B[i, j]`` is the weight of ``j -> i`` in the original units.
    standardized_adjacency_ : ndarray
    dag_ : Dag
    """

    def __init__(self, measure="kurtosis", threshold=0.01):
        self.measure = measure
        self.threshold = threshold

    def fit(self, X, y=None):
        df = check_table(X, min_cols=1, min_rows=3)
        if self.measure not in ("kurtosis", "entropy"):
            raise ValueError(f"unknown measure {self.measure!r}")
        names = list(df.columns)
        raw = df.to_numpy()
        Z = np.column_stack([_standardize(raw[:, j]) for j in range(raw.shape[1])])
        lr = _lr_kurtosis if self.measure == "kurtosis" else _lr_entropy

        remaining = list(range(len(names)))
        order = []
        work = Z.copy()
        while remaining:
            if len(remaining) == 1:
                order.append(remaining.pop())
                break
            scores = []
            for i in remaining:
                s = 0.0
                xi = _standardize(work[:, i])
                for j in remaining:
                    if j == i:
                        continue
                    s += min(0.0, lr(xi, _standardize(work[:, j]))) ** 2
                scores.append(s)
            if not np.isfinite(scores).all():
                raise RuntimeError("LiNGAM failed to find a causal order (non-finite scores)")
            m = remaining[int(np.argmin(scores))]
            for i in remaining:
                if i != m:
                    work[:, i] = _residual(work[:, i], work[:, m])
            order.append(m)
            remaining.remove(m)

        p = len(names)
        B = np.zeros((p, p))
        Bs = np.zeros((p, p))
        for k, i in enumerate(order):
            preds = order[:k]
            if not preds:
                continue
            B[i, preds] = _lstsq(raw[:, preds], raw[:, i])
            Bs[i, preds] = _lstsq(Z[:, preds], Z[:, i])
        keep = np.abs(Bs) > self.threshold
        B = np.where(keep, B, 0.0)
        Bs = np.where(keep, Bs, 0.0)

        self.causal_order_ = [names[i] for i in order]
        self.adjacency_matrix_ = B
        self.standardized_adjacency_ = Bs
        edges = [(names[j], names[i], float(B[i, j])) for i in range(p) for j in range(p) if keep[i, j]]
        self.dag_ = Dag(names, edges)
        return self


def _lstsq(X, y):
    Xc = X - X.mean(axis=0)
    coef, *_ = np.linalg.lstsq(Xc, y - y.mean(), rcond=None)
    return coef


def run_lingam(data, measure="kurtosis", threshold=0.01) -> Dag:
    return DirectLiNGAM(measure=measure, threshold=threshold).fit(data).dag_
