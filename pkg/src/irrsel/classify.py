"""Selection procedures as binary classifiers.

A selection procedure rates N applicants, averages each applicant's J
ratings, and selects the top k by mean score. Because the top k by
*latent ability* define the "truly high ability" group and both margins
of the resulting 2x2 classification equal k/N, a single number, the
true-positive probability P(selected and high ability), determines the
whole table and every derived rate.

Replacing the data-dependent selection thresholds with marginal normal
quantiles turns that probability into a bivariate-normal upper tail:
both standardized margins are cut at Phi^-1((N-k)/N) and the correlation
between latent ability and the observed mean is sqrt(IRR_J). An
equivalent unstandardized route integrates the joint density of ability
and mean score over the quantile cut-scores directly; both are exposed
and agree to ~1e-10, so reliability and selected proportion alone fix
every metric.

Naming note: the rate names mirror the measurement-error literature this
implements. Its "FPR" divides the false-positive cell by P(selected) =
k/N, which in conventional classifier terminology is the false discovery
rate; its "FNR" divides by P(not selected) and is conventionally the
false omission rate. Outputs carry both names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DegenerateDataError, DomainError, InfeasibleProbabilityError
from .measurement import VarianceComponents, irr_multi, irr_single
from .normal import (
    bvn_upper_tail,
    bvn_upper_tail_many,
    std_normal_quantile,
    std_normal_quantile_many,
)

__all__ = [
    "SelectionDesign",
    "CutScores",
    "ClassificationTable",
    "ClassificationMetrics",
    "cut_scores",
    "true_positive_prob",
    "true_positive_prob_raw",
    "classification_table",
    "metrics",
    "metric_curve",
    "tp_curve",
]

_FEASIBILITY_SLACK = 1e-9


@dataclass(frozen=True)
class SelectionDesign:
    """A selection round: N applicants, k selected, J ratings each.

    ``p_select`` is k/N held in full double precision (never pre-rounded
    decimals), so quantile cut-scores stay exact for small N. Counts are
    optional; rate-only workflows may carry just the proportion.
    """

    p_select: float
    j: float
    n_applicants: int | None = None
    k_selected: int | None = None

    def __post_init__(self):
        if not 0.0 < self.p_select < 1.0:
            raise DomainError(
                f"p_select must lie strictly in (0, 1), got {self.p_select!r}"
            )
        if not self.j >= 1.0:
            raise DomainError(f"j must be at least 1, got {self.j!r}")
        if (self.n_applicants is None) != (self.k_selected is None):
            raise DomainError("n_applicants and k_selected must be given together")
        if self.n_applicants is not None:
            if not 0 < self.k_selected < self.n_applicants:
                raise DomainError(
                    f"need 0 < k < N, got k={self.k_selected}, N={self.n_applicants}"
                )

    @classmethod
    def from_counts(cls, n_applicants: int, k_selected: int, j: float) -> "SelectionDesign":
        return cls(
            p_select=k_selected / n_applicants,
            j=j,
            n_applicants=int(n_applicants),
            k_selected=int(k_selected),
        )

    @classmethod
    def from_proportion(
        cls, p_select: float, j: float, n_applicants: int | None = None
    ) -> "SelectionDesign":
        """Design from a published proportion; k is reconstructed as
        round(p_select * N) when N is known."""
        if n_applicants is None:
            return cls(p_select=float(p_select), j=j)
        k = int(round(p_select * n_applicants))
        return cls(
            p_select=float(p_select),
            j=j,
            n_applicants=int(n_applicants),
            k_selected=k,
        )

    @property
    def p_unselected(self) -> float:
        """(N-k)/N computed from counts where available."""
        if self.n_applicants is not None:
            return (self.n_applicants - self.k_selected) / self.n_applicants
        return 1.0 - self.p_select


@dataclass(frozen=True)
class CutScores:
    """Quantile-approximated thresholds on latent ability and mean score."""

    gamma_c: float
    ybar_c: float


@dataclass(frozen=True)
class ClassificationTable:
    """The 2x2 selected-vs-high-ability table.

    Off-diagonal cells are equal by construction and the four cells sum
    to one: the margins P(selected) and P(high ability) both equal k/N.
    """

    p_tp: float
    p_fn: float
    p_fp: float
    p_tn: float
    p_select: float


@dataclass(frozen=True)
class ClassificationMetrics:
    """Classification rates of a selection round.

    ``tpr_ppv`` is simultaneously sensitivity and precision (the table's
    symmetry makes them equal). ``fpr`` is the share of selected
    applicants who are not high ability (conventional alias: false
    discovery rate); ``fnr`` is the share of non-selected applicants who
    are high ability (conventional alias: false omission rate). Fields
    are None where the defining ratio is 0/0 at a boundary design.
    """

    tpr_ppv: float | None
    fpr: float | None
    fnr: float | None
    irr_j: float | None
    p_select: float

    def as_dict(self) -> dict:
        """Schema with the primary names plus conventional aliases."""
        return {
            "tpr_ppv": self.tpr_ppv,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "irr_j": self.irr_j,
            "p_select": self.p_select,
            "aliases": {
                "sensitivity": self.tpr_ppv,
                "precision": self.tpr_ppv,
                "false_discovery_rate": self.fpr,
                "false_omission_rate": self.fnr,
            },
        }


def cut_scores(
    mu: float,
    var_gamma: float,
    var_epsilon: float,
    design: SelectionDesign,
) -> CutScores:
    """Quantile-approximated cut-scores for latent and mean-score margins.

    gamma_c = mu + sd_gamma * z and ybar_c = mu + sd_mean * z with
    z = Phi^-1((N-k)/N) and sd_mean^2 = var_gamma + var_epsilon / J.
    """
    if var_gamma <= 0.0:
        raise DegenerateDataError(
            "var_gamma must be positive: with no latent variance there is "
            "no high-ability group to select"
        )
    if var_epsilon < 0.0:
        raise DomainError("var_epsilon must be non-negative")
    z = std_normal_quantile(design.p_unselected)
    gamma_c = mu + math.sqrt(var_gamma) * z
    ybar_c = mu + math.sqrt(var_gamma + var_epsilon / design.j) * z
    return CutScores(gamma_c=gamma_c, ybar_c=ybar_c)


def _tp_at_upper_quantile(irr_j: float, p_unselected: float) -> float:
    z = std_normal_quantile(p_unselected)
    return bvn_upper_tail(z, z, math.sqrt(irr_j))


def true_positive_prob(irr_j: float, p_select: float) -> float:
    """P(selected and high ability) from reliability and proportion alone.

    Both standardized margins exceed Phi^-1(1 - p_select) with
    correlation sqrt(irr_j). Boundaries return their analytic limits:
    p_select of 0 or 1 gives 0 or 1, irr_j = 0 gives p_select^2
    (independent rankings), irr_j = 1 gives p_select (exact selection).
    """
    irr_j = float(irr_j)
    p_select = float(p_select)
    if math.isnan(irr_j) or not 0.0 <= irr_j <= 1.0:
        raise DomainError(f"irr_j must lie in [0, 1], got {irr_j!r}")
    if math.isnan(p_select) or not 0.0 <= p_select <= 1.0:
        raise DomainError(f"p_select must lie in [0, 1], got {p_select!r}")
    if p_select == 0.0:
        return 0.0
    if p_select == 1.0:
        return 1.0
    if irr_j == 0.0:
        return p_select * p_select
    if irr_j == 1.0:
        return p_select
    return _tp_at_upper_quantile(irr_j, 1.0 - p_select)


def true_positive_prob_for_design(irr_j: float, design: SelectionDesign) -> float:
    """true_positive_prob using the design's exact (N-k)/N complement."""
    irr_j = float(irr_j)
    if math.isnan(irr_j) or not 0.0 <= irr_j <= 1.0:
        raise DomainError(f"irr_j must lie in [0, 1], got {irr_j!r}")
    if irr_j == 0.0:
        return design.p_select * design.p_select
    if irr_j == 1.0:
        return design.p_select
    return _tp_at_upper_quantile(irr_j, design.p_unselected)


def true_positive_prob_raw(
    vc: VarianceComponents, design: SelectionDesign
) -> float:
    """P(selected and high ability) via the unstandardized tail integral.

    Integrates the joint normal density of (latent ability, mean score)
    over [gamma_c, inf) x [ybar_c, inf). Agrees with the standardized
    route within 1e-10; kept as an independent path for cross-checks.
    """
    cuts = cut_scores(vc.mu, vc.var_gamma, vc.var_epsilon, design)
    sd_gamma = math.sqrt(vc.var_gamma)
    sd_mean = math.sqrt(vc.var_gamma + vc.var_epsilon / design.j)
    h = (cuts.gamma_c - vc.mu) / sd_gamma
    k = (cuts.ybar_c - vc.mu) / sd_mean
    rho = min(1.0, sd_gamma / sd_mean)
    return bvn_upper_tail(h, k, rho)


def classification_table(p_tp: float, p_select: float) -> ClassificationTable:
    """Fill the 2x2 table from its single free cell.

    p_tp must lie in the feasibility band
    max(0, 2 p_select - 1) <= p_tp <= p_select.
    """
    p_tp = float(p_tp)
    p_select = float(p_select)
    if math.isnan(p_select) or not 0.0 <= p_select <= 1.0:
        raise DomainError(f"p_select must lie in [0, 1], got {p_select!r}")
    lo = max(0.0, 2.0 * p_select - 1.0)
    if math.isnan(p_tp) or p_tp < lo - _FEASIBILITY_SLACK or p_tp > p_select + _FEASIBILITY_SLACK:
        raise InfeasibleProbabilityError(
            f"p_tp={p_tp!r} outside feasible band [{lo:.12g}, {p_select:.12g}] "
            f"for p_select={p_select:.12g}"
        )
    p_tp = min(max(p_tp, lo), p_select)
    off = max(0.0, p_select - p_tp)
    return ClassificationTable(
        p_tp=p_tp,
        p_fn=off,
        p_fp=off,
        p_tn=max(0.0, p_tp + (1.0 - 2.0 * p_select)),
        p_select=p_select,
    )


def metrics(
    p_tp: float,
    p_select: float,
    irr_j: float | None = None,
) -> ClassificationMetrics:
    """Classification rates from the true-positive cell.

    tpr_ppv = p_tp / p_select, fpr = 1 - tpr_ppv (identically
    (p_select - p_tp) / p_select), fnr = (p_select - p_tp) /
    (1 - p_select). At p_select = 0 the selected-side rates are
    undefined and reported as None; at p_select = 1 the non-selected
    side is.
    """
    table = classification_table(p_tp, p_select)
    p_tp = table.p_tp
    if p_select == 0.0:
        return ClassificationMetrics(
            tpr_ppv=None, fpr=None, fnr=0.0, irr_j=irr_j, p_select=p_select
        )
    if p_select == 1.0:
        return ClassificationMetrics(
            tpr_ppv=1.0, fpr=0.0, fnr=None, irr_j=irr_j, p_select=p_select
        )
    tpr = p_tp / p_select
    return ClassificationMetrics(
        tpr_ppv=tpr,
        fpr=1.0 - tpr,
        fnr=(p_select - p_tp) / (1.0 - p_select),
        irr_j=irr_j,
        p_select=p_select,
    )


def metrics_for_reliability(
    irr_j: float, p_select: float
) -> ClassificationMetrics:
    """Metrics straight from reliability and selected proportion."""
    return metrics(true_positive_prob(irr_j, p_select), p_select, irr_j=irr_j)


def metric_curve(
    irr1: float, j: float, grid: Sequence[float]
) -> list[tuple[float, ClassificationMetrics]]:
    """Metrics across selected proportions, ordered by proportion."""
    irr_j = irr_multi(irr1, j)
    out = []
    for p in sorted(float(p) for p in grid):
        if not 0.0 < p < 1.0:
            raise DomainError(f"grid proportions must lie in (0, 1), got {p!r}")
        out.append((p, metrics_for_reliability(irr_j, p)))
    return out


@lru_cache(maxsize=16)
def _upper_quantile_grid(n: int) -> np.ndarray:
    """Phi^-1((n-k)/n) for k = 1..n-1, cached per applicant count."""
    k = np.arange(1, n)
    z = std_normal_quantile_many((n - k) / n)
    z.flags.writeable = False
    return z


def tp_curve(irr_j: float, n: int) -> np.ndarray:
    """true_positive_prob over every k = 1..n-1 at proportion k/n."""
    irr_j = float(irr_j)
    if math.isnan(irr_j) or not 0.0 <= irr_j <= 1.0:
        raise DomainError(f"irr_j must lie in [0, 1], got {irr_j!r}")
    p = np.arange(1, n) / n
    if irr_j == 0.0:
        return p * p
    if irr_j == 1.0:
        return p.copy()
    z = _upper_quantile_grid(int(n))
    return bvn_upper_tail_many(z, z, math.sqrt(irr_j))


def approx_irr_from_vc(vc: VarianceComponents, j: float | None = None) -> tuple[float, float]:
    """(irr1, irr_j) from components; J defaults to the table's mean count."""
    irr1 = irr_single(vc)
    j_eff = vc.mean_ratings if j is None else float(j)
    return irr1, irr_multi(irr1, j_eff)
