"""Robustness checks for an effect estimate.

Each refuter reruns the original estimator ``k`` times on perturbed data and
summarizes the replicate effects with a normal fit ``N(mu, s)``.  The
reported ``p_value`` is a confidence score in ``[0, 1]``, higher meaning
more faith in the model:

* random common cause, data subset: ``2 Phi(|mu| / s) - 1``, the chance
  that the perturbed effect stays on the same side of zero.
* placebo treatment: ``2 Phi(|original - mu| / s) - 1``, how clearly the
  real treatment's effect stands out from effects of pure-noise treatments.

Replicate ``i`` draws from a generator seeded with ``seed + i`` under a
per-refuter spawn key, so results do not depend on execution order and
never replay the stream of a data generator that used the same seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .data import check_table
from .estimate import Estimate, estimate_effect, with_adjustment
from .identify import Estimand

__all__ = [
    "RefutationResult",
    "refute_random_common_cause",
    "refute_placebo",
    "refute_data_subset",
    "aggregate_confidence",
    "run_refuter",
    "REFUTERS",
]

MIN_REPLICATES = 20
_RANDOM_COL = "__random_common_cause__"


@dataclass(frozen=True)
class RefutationResult:
    method: str
    original_effect: float
    new_effect: float
    p_value: float
    replicates: int
    spread: float = 0.0

    @property
    def low_replicates(self) -> bool:
        """True when fewer replicates ran than a stable normal fit needs."""
        return self.replicates < MIN_REPLICATES

    def report(self) -> str:
        title = {
            "random_common_cause": "Add a random common cause",
            "placebo_treatment": "Use a Placebo Treatment",
            "data_subset": "Use a subset of data",
        }[self.method]
        lines = [
            f"Refute: {title}",
            f"Estimated effect:{self.original_effect!r}",
            f"New effect:{self.new_effect!r}",
            f"p value:{self.p_value!r}",
        ]
        if self.low_replicates:
            lines.append(f"warning: only {self.replicates} replicate(s); variance estimate unreliable")
        return "\n".join(lines) + "\n"


_STREAM = {"random_common_cause": 1, "placebo_treatment": 2, "data_subset": 3}


def replicate_rng(method: str, seed: int, i: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed + i, spawn_key=(_STREAM[method],)))


def _confidence(distance: float, spread: float) -> float:
    if spread == 0 or not np.isfinite(spread):
        return 1.0 if distance > 0 else 0.0
    p = 2 * stats.norm.cdf(abs(distance) / spread) - 1
    return float(min(1.0, max(0.0, p)))


def _summarize(method, estimate: Estimate, effects, reference) -> RefutationResult:
    effects = np.asarray(effects, dtype=float)
    mu = float(effects.mean())
    s = float(effects.std(ddof=1)) if len(effects) > 1 else 0.0
    return RefutationResult(method, estimate.ate, mu, _confidence(reference - mu, s), len(effects), s)


def _check_k(k):
    if k < 1:
        raise ValueError("need at least one replicate")


def refute_random_common_cause(data, estimand: Estimand, estimate: Estimate, k=100, seed=0) -> RefutationResult:
    """Re-estimate with an extra independent standard-normal column in the adjustment set."""
    _check_k(k)
    if estimand.strategy == "iv":
        raise ValueError("random common cause needs an adjustment-based estimand (not iv)")
    df = check_table(data)
    e = with_adjustment(estimand, [_RANDOM_COL])
    effects = []
    for i in range(k):
        rng = replicate_rng("random_common_cause", seed, i)
        d = df.assign(**{_RANDOM_COL: rng.standard_normal(len(df))})
        effects.append(estimate_effect(d, e).ate)
    return _summarize("random_common_cause", estimate, effects, 0.0)


def refute_placebo(data, estimand: Estimand, estimate: Estimate, k=100, seed=0) -> RefutationResult:
    """Replace the treatment column with independent standard-normal noise."""
    _check_k(k)
    df = check_table(data)
    effects = []
    for i in range(k):
        rng = replicate_rng("placebo_treatment", seed, i)
        d = df.assign(**{estimand.treatment: rng.standard_normal(len(df))})
        effects.append(estimate_effect(d, estimand).ate)
    return _summarize("placebo_treatment", estimate, effects, estimate.ate)


def refute_data_subset(data, estimand: Estimand, estimate: Estimate, fraction=0.8, k=100, seed=0) -> RefutationResult:
    """Re-estimate on ``k`` random row subsets holding ``fraction`` of the data."""
    _check_k(k)
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    df = check_table(data)
    size = int(round(fraction * len(df)))
    effects = []
    for i in range(k):
        rng = replicate_rng("data_subset", seed, i)
        rows = np.sort(rng.choice(len(df), size=size, replace=False))
        sub = df.iloc[rows].reset_index(drop=True)
        try:
            effects.append(estimate_effect(sub, estimand).ate)
        except ValueError as exc:
            raise ValueError(f"subset of {size} rows too small for the estimator: {exc}") from exc
    return _summarize("data_subset", estimate, effects, 0.0)


REFUTERS = {
    "random_common_cause": refute_random_common_cause,
    "placebo_treatment": refute_placebo,
    "data_subset": refute_data_subset,
}


def run_refuter(name, data, estimand, estimate, k=100, seed=0, fraction=0.8) -> RefutationResult:
    if name not in REFUTERS:
        raise ValueError(f"unknown refuter {name!r}; choose from {sorted(REFUTERS)}")
    if name == "data_subset":
        return refute_data_subset(data, estimand, estimate, fraction=fraction, k=k, seed=seed)
    return REFUTERS[name](data, estimand, estimate, k=k, seed=seed)


def aggregate_confidence(results) -> float:
    """Arithmetic mean of the refuters' p-values."""
    results = list(results)
    if not results:
        raise ValueError("no refutation results to aggregate")
    return float(np.mean([r.p_value for r in results]))
