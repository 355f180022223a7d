"""Linear effect estimators for identified estimands.

Every estimator reports the average treatment effect of moving the treatment
from 0 to 1, which for these linear models is the treatment slope.
Confidence intervals use the normal approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .data import check_columns, check_table
from .identify import Estimand
from .stats import RankDeficientError, normal_ci, ols, two_sided_p

__all__ = [
    "Estimate",
    "WeakInstrumentError",
    "RankDeficientError",
    "LinearBackdoor",
    "WaldIV",
    "FrontdoorTwoStage",
    "LinearMediation",
    "estimate_backdoor_linear",
    "estimate_iv_wald",
    "estimate_frontdoor_two_stage",
    "estimate_mediation",
    "estimate_effect",
    "do_sample",
    "adjustment_formula_mean",
]

WEAK_IV_TOL = 1e-8


class WeakInstrumentError(ValueError):
    pass


@dataclass(frozen=True)
class Estimate:
    ate: float
    se: float
    ci_low: float
    ci_high: float
    p_value: float
    strategy: str
    n: int
    treatment: str = ""
    outcome: str = ""

    @classmethod
    def from_value(cls, ate, se, strategy, n, treatment="", outcome=""):
        lo, hi = normal_ci(ate, se)
        return cls(float(ate), float(se), float(lo), float(hi), two_sided_p(ate, se), strategy, int(n), treatment, outcome)

    def report(self) -> str:
        return (
            f"Estimate: {self.ate!r}\n"
            f"95% CI: [{self.ci_low:.6g}, {self.ci_high:.6g}]\n"
            f"p value: {self.p_value:.4g}\n"
        )


class _EffectEstimator(BaseEstimator):
    strategy = ""

    def estimate(self) -> Estimate:
        if not hasattr(self, "ate_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted yet")
        return Estimate.from_value(self.ate_, self.stderr_, self.strategy, self.n_, self.treatment, self.outcome)


class LinearBackdoor(_EffectEstimator):
    """OLS of the outcome on the treatment and an adjustment set.

    Attributes
    ----------
    ate_, stderr_ : float
    fit_ : OlsFit
    """

    strategy = "backdoor"

    def __init__(self, treatment, outcome, adjustment=()):
        self.treatment = treatment
        self.outcome = outcome
        self.adjustment = adjustment

    def fit(self, X, y=None):
        df = check_table(X)
        cols = [self.treatment, *self.adjustment]
        check_columns(df, self.outcome, *cols)
        if len(df) <= len(cols) + 2:
            raise ValueError(f"need more than {len(cols) + 2} rows, got {len(df)}")
        self.fit_ = ols(df[self.outcome].to_numpy(), df[cols].to_numpy(), cols)
        self.ate_ = self.fit_[self.treatment]
        self.stderr_ = self.fit_.stderr(self.treatment)
        self.n_ = len(df)
        return self

    def predict(self, X):
        """Predicted outcome for each row of ``X`` (treatment and adjustment columns)."""
        if not hasattr(self, "fit_"):
            raise NotFittedError("LinearBackdoor is not fitted yet")
        cols = [self.treatment, *self.adjustment]
        A = np.column_stack([np.ones(len(X))] + [np.asarray(X[c], dtype=float) for c in cols])
        return A @ self.fit_.coef


class WaldIV(_EffectEstimator):
    """Wald ratio ``cov(outcome, z) / cov(treatment, z)`` for a single instrument.

    The standard error comes from the delta method applied to the two
    sample covariances (influence-function form).
    """

    strategy = "iv"

    def __init__(self, treatment, outcome, instrument):
        self.treatment = treatment
        self.outcome = outcome
        self.instrument = instrument

    def fit(self, X, y=None):
        df = check_table(X, min_rows=3)
        check_columns(df, self.treatment, self.outcome, self.instrument)
        t = df[self.treatment].to_numpy()
        o = df[self.outcome].to_numpy()
        z = df[self.instrument].to_numpy()
        tc, oc, zc = t - t.mean(), o - o.mean(), z - z.mean()
        n = len(df)
        cov_tz = tc @ zc / n
        scale = np.sqrt((tc @ tc / n) * (zc @ zc / n))
        if scale == 0 or abs(cov_tz) <= WEAK_IV_TOL * scale:
            raise WeakInstrumentError(
                f"instrument {self.instrument!r} is (numerically) uncorrelated with {self.treatment!r}"
            )
        beta = (oc @ zc / n) / cov_tz
        psi = (oc - beta * tc) * zc / cov_tz
        self.ate_ = float(beta)
        self.stderr_ = float(np.sqrt(psi @ psi / n / n))
        self.n_ = n
        return self


class FrontdoorTwoStage(_EffectEstimator):
    """Two-stage regression: treatment→mediators, then mediators→outcome given treatment.

    The effect is ``sum_m a_m * b_m``; the standard error uses the
    first-order (Sobel) delta method.
    """

    strategy = "frontdoor"

    def __init__(self, treatment, outcome, mediators, adjustment=()):
        self.treatment = treatment
        self.outcome = outcome
        self.mediators = mediators
        self.adjustment = adjustment

    def fit(self, X, y=None):
        df = check_table(X)
        meds = list(self.mediators)
        if not meds:
            raise ValueError("frontdoor estimation needs at least one mediator")
        adj = list(self.adjustment)
        check_columns(df, self.treatment, self.outcome, *meds, *adj)
        t_cols = [self.treatment, *adj]
        a, a_se = [], []
        for m in meds:
            f = ols(df[m].to_numpy(), df[t_cols].to_numpy(), t_cols)
            a.append(f[self.treatment])
            a_se.append(f.stderr(self.treatment))
        cols = [*meds, self.treatment, *adj]
        f2 = ols(df[self.outcome].to_numpy(), df[cols].to_numpy(), cols)
        b = [f2[m] for m in meds]
        b_se = [f2.stderr(m) for m in meds]
        a, a_se, b, b_se = map(np.asarray, (a, a_se, b, b_se))
        self.first_stage_ = dict(zip(meds, a))
        self.second_stage_ = dict(zip(meds, b))
        self.ate_ = float(a @ b)
        self.stderr_ = float(np.sqrt(np.sum(a**2 * b_se**2 + b**2 * a_se**2)))
        self.n_ = len(df)
        return self


class LinearMediation(_EffectEstimator):
    """Direct/indirect split: total from OLS without mediators, direct with them.

    Attributes
    ----------
    total_, direct_, indirect_ : float
    direct_se_, indirect_se_ : float
    """

    strategy = "mediation"

    def __init__(self, treatment, outcome, mediators, adjustment=()):
        self.treatment = treatment
        self.outcome = outcome
        self.mediators = mediators
        self.adjustment = adjustment

    def fit(self, X, y=None):
        df = check_table(X)
        meds, adj = list(self.mediators), list(self.adjustment)
        if not meds:
            raise ValueError("mediation needs at least one mediator")
        check_columns(df, self.treatment, self.outcome, *meds, *adj)
        total = LinearBackdoor(self.treatment, self.outcome, adj).fit(df)
        direct = LinearBackdoor(self.treatment, self.outcome, [*meds, *adj]).fit(df)
        # OLS identity: total - direct == sum_m a_m * b_m, so the product form gives the SE
        paths = FrontdoorTwoStage(self.treatment, self.outcome, meds, adj).fit(df)
        self.total_ = total.ate_
        self.direct_ = direct.ate_
        self.direct_se_ = direct.stderr_
        self.indirect_ = self.total_ - self.direct_
        self.indirect_se_ = paths.stderr_
        self.ate_ = self.total_
        self.stderr_ = total.stderr_
        self.n_ = len(df)
        return self

    def decompose(self) -> tuple[Estimate, Estimate]:
        if not hasattr(self, "direct_"):
            raise NotFittedError("LinearMediation is not fitted yet")
        mk = lambda v, se: Estimate.from_value(v, se, self.strategy, self.n_, self.treatment, self.outcome)  # noqa: E731
        return mk(self.direct_, self.direct_se_), mk(self.indirect_, self.indirect_se_)


def _require(e: Estimand, strategy: str):
    if e.strategy != strategy:
        raise ValueError(f"expected a {strategy} estimand, got {e.strategy}")


def estimate_backdoor_linear(data, e: Estimand) -> Estimate:
    _require(e, "backdoor")
    return LinearBackdoor(e.treatment, e.outcome, e.adjustment).fit(data).estimate()


def estimate_iv_wald(data, e: Estimand) -> Estimate:
    """Wald estimate using the first instrument in the estimand's order."""
    _require(e, "iv")
    if not e.instruments:
        raise ValueError("iv estimand has no instruments")
    return WaldIV(e.treatment, e.outcome, e.instruments[0]).fit(data).estimate()


def estimate_frontdoor_two_stage(data, e: Estimand) -> Estimate:
    _require(e, "frontdoor")
    return FrontdoorTwoStage(e.treatment, e.outcome, e.mediators, e.adjustment).fit(data).estimate()


def estimate_mediation(data, e: Estimand) -> tuple[Estimate, Estimate]:
    _require(e, "mediation")
    return LinearMediation(e.treatment, e.outcome, e.mediators, e.adjustment).fit(data).decompose()


def estimate_effect(data, e: Estimand) -> Estimate:
    """Dispatch on strategy; mediation returns the total effect."""
    if e.strategy == "backdoor":
        return estimate_backdoor_linear(data, e)
    if e.strategy == "iv":
        return estimate_iv_wald(data, e)
    if e.strategy == "frontdoor":
        return estimate_frontdoor_two_stage(data, e)
    m = LinearMediation(e.treatment, e.outcome, e.mediators, e.adjustment).fit(data)
    return m.estimate()


def do_sample(data, e: Estimand, x_value: float, n_draws: int, rng) -> np.ndarray:
    """Draws from the estimated distribution of the outcome under ``do(treatment=x_value)``.

    Adjustment rows are resampled with replacement, the backdoor regression
    gives the mean at ``x_value``, and an empirical residual is added.
    """
    _require(e, "backdoor")
    df = check_table(data)
    model = LinearBackdoor(e.treatment, e.outcome, e.adjustment).fit(df)
    rng = np.random.default_rng(rng)
    rows = rng.integers(0, len(df), size=n_draws)
    frame = pd.DataFrame({c: df[c].to_numpy()[rows] for c in e.adjustment})
    frame[e.treatment] = float(x_value)
    resid = model.fit_.resid[rng.integers(0, len(df), size=n_draws)]
    return model.predict(frame) + resid


def adjustment_formula_mean(data, treatment, outcome, adjustment, x_value) -> float:
    """Nonparametric backdoor adjustment ``sum_z E[Y | X=x, z] P(z)`` for discrete data.

    Strata with no rows at ``X = x_value`` raise ``ValueError`` (positivity).
    """
    df = check_table(data)
    adjustment = list(adjustment)
    check_columns(df, treatment, outcome, *adjustment)
    at_x = df[df[treatment] == x_value]
    if not adjustment:
        if at_x.empty:
            raise ValueError(f"no rows with {treatment} = {x_value}")
        return float(at_x[outcome].mean())
    p_z = df.groupby(adjustment).size() / len(df)
    mean_y = at_x.groupby(adjustment)[outcome].mean()
    missing = p_z.index.difference(mean_y.index)
    if len(missing):
        raise ValueError(f"positivity violated: no rows with {treatment} = {x_value} in strata {list(missing)}")
    return float((mean_y.reindex(p_z.index) * p_z).sum())


def with_adjustment(e: Estimand, extra) -> Estimand:
    return replace(e, adjustment=tuple(e.adjustment) + tuple(extra))
