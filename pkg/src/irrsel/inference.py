"""Uncertainty quantification for reliability and classification rates.

Three distinct interval kinds:

* nonparametric bootstrap confidence intervals: applicants are resampled
  as whole rating clusters (preserving the within-applicant correlation
  that reliability measures), the variance components are refit per
  resample, and percentile intervals are taken. Percentile intervals are
  monotone-transform consistent, so the derived-rate intervals equal the
  transformed reliability intervals.
* transformation of a published reliability confidence interval through
  the Spearman-Brown formula and the classification-rate map (the rates
  are monotone in reliability, so mapping endpoints suffices; the error
  rates decrease in reliability, which flips endpoint order).
* binomial prediction intervals for the *realized* rate of one concrete
  selection round: the true-positive count among the k selected is
  binomial, and its lower/upper quantiles transform into bounds on each
  empirical rate. When a reliability confidence interval is available,
  the prediction interval is widened by evaluating the binomial at each
  reliability endpoint and taking the envelope (parameter uncertainty on
  top of selection noise).

Each bootstrap resample draws from its own seed substream derived from
(seed, resample index), so results do not depend on evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .classify import SelectionDesign, metrics_for_reliability, true_positive_prob_for_design
from .errors import BootstrapError, ConvergenceError, DegenerateDataError, DomainError
from .measurement import (
    RatingsTable,
    anova_from_matrix,
    group_stats,
    irr_multi,
    reml_from_stats,
)

__all__ = [
    "Interval",
    "BootstrapConfig",
    "bootstrap_ci",
    "transform_irr_ci",
    "prediction_interval",
    "prediction_interval_from_irr_ci",
]


@dataclass(frozen=True)
class Interval:
    """A confidence or prediction interval."""

    lower: float
    upper: float
    level: float
    kind: str  # "confidence" or "prediction"

    def __post_init__(self):
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level!r}")
        if self.kind not in ("confidence", "prediction"):
            raise DomainError(f"kind must be confidence or prediction, got {self.kind!r}")
        if not self.lower <= self.upper:
            raise DomainError(
                f"interval endpoints out of order: [{self.lower!r}, {self.upper!r}]"
            )

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class BootstrapConfig:
    """Settings for the cluster bootstrap.

    ``max_degenerate_share`` bounds the tolerated fraction of resamples
    whose refit is degenerate (every drawn cluster identical); beyond it
    the bootstrap aborts with a diagnostic error.
    """

    n_resamples: int = 2000
    level: float = 0.95
    seed: int = 0
    max_degenerate_share: float = 0.1

    def __post_init__(self):
        if self.n_resamples < 100:
            raise DomainError("n_resamples must be at least 100")
        if not 0.0 < self.level < 1.0:
            raise DomainError(f"level must lie in (0, 1), got {self.level!r}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")


def _resample_indices(seed: int, n_resamples: int, n_clusters: int) -> np.ndarray:
    """(B, N) index matrix; row b comes from substream (seed, b)."""
    out = np.empty((n_resamples, n_clusters), dtype=np.intp)
    for b in range(n_resamples):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(b,)))
        out[b] = rng.integers(0, n_clusters, size=n_clusters)
    return out


def _refit_irr1(
    table: RatingsTable, indices: np.ndarray, estimator: str
) -> tuple[np.ndarray, int]:
    """Per-resample IRR_1 estimates (NaN rows dropped) and degenerate count.

    A resample is degenerate when its refit has zero total variance,
    which happens exactly when all drawn clusters are the same constant
    cluster.
    """
    sizes, means, ssw = group_stats(table)
    n_resamples = indices.shape[0]
    irr1 = np.full(n_resamples, np.nan)

    balanced = table.balanced
    if estimator == "auto":
        estimator = "anova" if balanced else "reml"

    if estimator == "anova":
        if not balanced:
            raise DomainError("anova bootstrap refits require a balanced table")
        j = float(sizes[0])
        n = float(len(table.groups))
        means_b = means[indices]
        ssw_b = ssw[indices].sum(axis=1)
        msw = ssw_b / (n * (j - 1.0))
        msb = j * ((means_b - means_b.mean(axis=1, keepdims=True)) ** 2).sum(axis=1) / (n - 1.0)
        var_gamma = np.maximum(0.0, (msb - msw) / j)
        total = var_gamma + msw
        ok = total > 0.0
        irr1[ok] = var_gamma[ok] / total[ok]
    elif estimator == "reml":
        for b in range(n_resamples):
            idx = indices[b]
            try:
                _, vg, ve = reml_from_stats(sizes[idx], means[idx], ssw[idx])
            except (DegenerateDataError, ConvergenceError):
                continue
            total = vg + ve
            if total > 0.0:
                irr1[b] = vg / total
    else:
        raise DomainError(f"unknown estimator {estimator!r}")

    degenerate = int(np.isnan(irr1).sum())
    return irr1[~np.isnan(irr1)], degenerate


def bootstrap_ci(
    table: RatingsTable,
    design: SelectionDesign,
    config: BootstrapConfig,
    estimator: str = "auto",
) -> dict[str, Interval]:
    """Percentile bootstrap intervals for reliability and the rates.

    Returns intervals for irr1, irr_j, tpr, fpr, and fnr. irr_j and the
    rates use the design's J and selected proportion, so the intervals
    reflect reliability uncertainty mapped through fixed design
    parameters. Deterministic given (table, config).
    """
    indices = _resample_indices(config.seed, config.n_resamples, table.n_applicants)
    irr1_b, degenerate = _refit_irr1(table, indices, estimator)
    if degenerate > config.max_degenerate_share * config.n_resamples:
        raise BootstrapError(
            f"{degenerate} of {config.n_resamples} bootstrap resamples were "
            f"degenerate (all clusters identical); data carry too little "
            f"variance for a bootstrap interval"
        )

    stats: dict[str, np.ndarray] = {
        "irr1": irr1_b,
        "irr_j": np.empty_like(irr1_b),
        "tpr": np.empty_like(irr1_b),
        "fpr": np.empty_like(irr1_b),
        "fnr": np.empty_like(irr1_b),
    }
    for i, irr1 in enumerate(irr1_b):
        irr_j = irr_multi(float(irr1), design.j)
        m = metrics_for_reliability(irr_j, design.p_select)
        stats["irr_j"][i] = irr_j
        stats["tpr"][i] = m.tpr_ppv
        stats["fpr"][i] = m.fpr
        stats["fnr"][i] = m.fnr

    alpha = 1.0 - config.level
    out = {}
    for name, values in stats.items():
        lo, hi = np.percentile(values, [100.0 * alpha / 2.0, 100.0 * (1.0 - alpha / 2.0)])
        out[name] = Interval(float(lo), float(hi), config.level, "confidence")
    return out


def transform_irr_ci(
    irr1_interval: Interval, j: float, p_select: float
) -> dict[str, Interval]:
    """Map a reliability confidence interval to rate intervals.

    The rates are monotone in reliability (tpr increasing, fpr and fnr
    decreasing), so transforming the endpoints is exact for percentile
    style intervals; error-rate endpoints flip order.
    """
    if not 0.0 <= irr1_interval.lower <= irr1_interval.upper < 1.0:
        raise DomainError(
            "irr1 interval endpoints must lie in [0, 1) and be ordered"
        )
    m_lo = metrics_for_reliability(irr_multi(irr1_interval.lower, j), p_select)
    m_hi = metrics_for_reliability(irr_multi(irr1_interval.upper, j), p_select)
    level = irr1_interval.level

    def ordered(a: float, b: float) -> Interval:
        return Interval(min(a, b), max(a, b), level, "confidence")

    return {
        "tpr": ordered(m_lo.tpr_ppv, m_hi.tpr_ppv),
        "fpr": ordered(m_lo.fpr, m_hi.fpr),
        "fnr": ordered(m_lo.fnr, m_hi.fnr),
    }


def _binom_quantiles(k: int, prob: float, level: float) -> tuple[int, int]:
    """Lower and upper binomial quantiles (smallest t with CDF >= target)."""
    alpha = 1.0 - level
    t_lo = int(binom.ppf(alpha / 2.0, k, prob))
    t_hi = int(binom.ppf(1.0 - alpha / 2.0, k, prob))
    return t_lo, t_hi


def _rates_from_tp_counts(
    t_lo: int, t_hi: int, k: int, n: int, level: float
) -> dict[str, Interval]:
    """Intervals for the empirical rates implied by true-positive counts."""
    return {
        "tpr": Interval(t_lo / k, t_hi / k, level, "prediction"),
        "fpr": Interval((k - t_hi) / k, (k - t_lo) / k, level, "prediction"),
        "fnr": Interval(
            (k - t_hi) / (n - k), (k - t_lo) / (n - k), level, "prediction"
        ),
    }


def _design_counts(design: SelectionDesign) -> tuple[int, int]:
    if design.n_applicants is None:
        raise DomainError(
            "prediction intervals need applicant counts; build the design "
            "from counts or pass n_applicants"
        )
    k = design.k_selected
    if k == 0:
        raise DomainError("k = 0 selects nobody; empirical rates are undefined")
    return k, design.n_applicants


def prediction_interval(
    p_tp: float, design: SelectionDesign, level: float
) -> dict[str, Interval]:
    """Binomial prediction intervals for one realized selection round.

    The true-positive count among the k selected is Binomial(k,
    p_tp / p_select); its quantiles at (1 - level)/2 and 1 - (1 -
    level)/2 are transformed to each empirical rate (e.g. empirical
    fpr = (k - T)/k).
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level!r}")
    k, n = _design_counts(design)
    tpr = p_tp / design.p_select
    if math.isnan(tpr) or not 0.0 <= tpr <= 1.0 + 1e-12:
        raise DomainError(f"p_tp/p_select must lie in [0, 1], got {tpr!r}")
    t_lo, t_hi = _binom_quantiles(k, min(tpr, 1.0), level)
    return _rates_from_tp_counts(t_lo, t_hi, k, n, level)


def prediction_interval_from_irr_ci(
    irr1_interval: Interval, design: SelectionDesign, level: float
) -> dict[str, Interval]:
    """Prediction intervals widened by reliability uncertainty.

    Evaluates the binomial true-positive count at each endpoint of the
    reliability confidence interval and takes the envelope: the
    favorable endpoint sets the optimistic bound, the unfavorable one
    the pessimistic bound.
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level!r}")
    k, n = _design_counts(design)
    tprs = []
    for irr1 in (irr1_interval.lower, irr1_interval.upper):
        irr_j = irr_multi(float(irr1), design.j)
        p_tp = true_positive_prob_for_design(irr_j, design)
        tprs.append(p_tp / design.p_select)
    tpr_lo, tpr_hi = min(tprs), max(tprs)
    t_lo, _ = _binom_quantiles(k, tpr_lo, level)
    _, t_hi = _binom_quantiles(k, tpr_hi, level)
    return _rates_from_tp_counts(t_lo, t_hi, k, n, level)
