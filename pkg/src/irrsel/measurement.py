"""One-way random-effects measurement model for rating data.

An observed rating decomposes into a latent applicant ability plus
independent normal measurement error. This module holds the data
container, the ANOVA and REML variance-component estimators, and the
reliability coefficients:

* single-rater reliability IRR_1 = var_gamma / (var_gamma + var_epsilon),
  the intraclass correlation ICC(1,1) of Shrout & Fleiss (1979);
* the reliability of a J-rater average via the Spearman-Brown formula,
  IRR_J = J * IRR_1 / (J * IRR_1 + 1 - IRR_1), with real-valued J allowed
  so that unbalanced designs can report their mean rater count.

Estimators accept any table accepted by :func:`validate_ratings`; the
ANOVA moment estimator additionally requires balance. REML reduces, for
this model, to a one-dimensional profile optimization over the variance
ratio lambda = var_gamma / var_epsilon, solved by golden-section search
on log(lambda) with an explicit boundary check at lambda = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    UnbalancedDataError,
    ValidationError,
)

__all__ = [
    "RatingsTable",
    "VarianceComponents",
    "IrrEstimate",
    "validate_ratings",
    "aggregate_scores",
    "variance_components_anova",
    "variance_components_reml",
    "irr_single",
    "irr_multi",
]


@dataclass(frozen=True)
class RatingsTable:
    """Validated long-format ratings, grouped by applicant.

    ``groups[i]`` holds the scores of ``applicant_ids[i]`` in input
    order; applicants appear in order of first appearance.
    """

    applicant_ids: tuple[str, ...]
    groups: tuple[np.ndarray, ...]

    @property
    def n_applicants(self) -> int:
        return len(self.applicant_ids)

    @property
    def counts(self) -> np.ndarray:
        return np.array([g.size for g in self.groups])

    @property
    def n_ratings(self) -> int:
        return int(sum(g.size for g in self.groups))

    @property
    def mean_ratings(self) -> float:
        return self.n_ratings / self.n_applicants

    @property
    def balanced(self) -> bool:
        counts = self.counts
        return bool((counts == counts[0]).all())

    def scores_matrix(self) -> np.ndarray:
        """(N, J) score matrix; only defined for balanced tables."""
        if not self.balanced:
            raise UnbalancedDataError("scores_matrix requires a balanced table")
        return np.vstack(self.groups)


@dataclass(frozen=True)
class VarianceComponents:
    """Estimated mean and variance components of the measurement model."""

    mu: float
    var_gamma: float
    var_epsilon: float
    method: str  # "anova" or "reml"
    n_applicants: int
    mean_ratings: float

    def __post_init__(self):
        if self.var_gamma < 0.0 or self.var_epsilon < 0.0:
            raise DomainError("variance components must be non-negative")
        if self.var_gamma + self.var_epsilon <= 0.0:
            raise DegenerateDataError(
                "all ratings identical: total variance is zero, "
                "reliability is undefined"
            )
        if self.mean_ratings < 1.0:
            raise DomainError("mean_ratings must be at least 1")


@dataclass(frozen=True)
class IrrEstimate:
    """Single-rater and J-rater-average reliability."""

    irr1: float
    irr_j: float
    j: float


def validate_ratings(
    records: Iterable[tuple[str, str, float]],
) -> RatingsTable:
    """Check and canonicalize raw (applicant, rater, score) records.

    Rejects duplicate (applicant, rater) pairs, non-finite scores, fewer
    than two applicants, and tables where every applicant has a single
    rating (the error variance would be inestimable). Applicant order is
    the order of first appearance.
    """
    by_applicant: dict[str, list[float]] = {}
    seen_pairs: set[tuple[str, str]] = set()
    for applicant, rater, score in records:
        applicant = str(applicant)
        rater = str(rater)
        pair = (applicant, rater)
        if pair in seen_pairs:
            raise ValidationError(
                f"duplicate rating for applicant {applicant!r} by rater {rater!r}"
            )
        seen_pairs.add(pair)
        score = float(score)
        if not math.isfinite(score):
            raise ValidationError(
                f"non-finite score {score!r} for applicant {applicant!r}, "
                f"rater {rater!r}"
            )
        by_applicant.setdefault(applicant, []).append(score)

    if len(by_applicant) < 2:
        raise ValidationError(
            f"need at least 2 applicants, got {len(by_applicant)}"
        )
    if all(len(v) < 2 for v in by_applicant.values()):
        raise ValidationError(
            "every applicant has a single rating: error variance is inestimable"
        )
    return RatingsTable(
        applicant_ids=tuple(by_applicant),
        groups=tuple(np.asarray(v, dtype=np.float64) for v in by_applicant.values()),
    )


def table_from_groups(
    groups: Sequence[np.ndarray], applicant_ids: Sequence[str] | None = None
) -> RatingsTable:
    """Build a table directly from score groups (e.g. simulated data)."""
    if applicant_ids is None:
        applicant_ids = tuple(f"a{i + 1}" for i in range(len(groups)))
    return RatingsTable(
        applicant_ids=tuple(applicant_ids),
        groups=tuple(np.asarray(g, dtype=np.float64) for g in groups),
    )


def aggregate_scores(table: RatingsTable) -> list[tuple[str, float]]:
    """Per-applicant arithmetic mean score, in table order."""
    return [
        (applicant, float(group.mean()))
        for applicant, group in zip(table.applicant_ids, table.groups)
    ]


# ---------------------------------------------------------------------------
# Sufficient statistics: everything both estimators need is the per-group
# size, mean, and within-group sum of squares.
# ---------------------------------------------------------------------------


def group_stats(table: RatingsTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(sizes, means, within-group sums of squares) per applicant."""
    sizes = table.counts.astype(np.float64)
    means = np.array([g.mean() for g in table.groups])
    ssw = np.array([float(((g - g.mean()) ** 2).sum()) for g in table.groups])
    return sizes, means, ssw


def anova_from_matrix(scores: np.ndarray) -> tuple[float, float, float]:
    """One-way ANOVA (mu, var_gamma, var_epsilon) from an (N, J) matrix.

    var_epsilon is the within-group mean square; var_gamma the moment
    estimator (MSB - MSW) / J truncated at zero.
    """
    n, j = scores.shape
    means = scores.mean(axis=1)
    msw = float(((scores - means[:, None]) ** 2).sum()) / (n * (j - 1))
    msb = j * float(((means - means.mean()) ** 2).sum()) / (n - 1)
    var_gamma = max(0.0, (msb - msw) / j)
    return float(scores.mean()), var_gamma, msw


def variance_components_anova(table: RatingsTable) -> VarianceComponents:
    """Moment estimators for a balanced table (same J >= 2 everywhere)."""
    if not table.balanced:
        raise UnbalancedDataError(
            "ANOVA estimator requires a balanced table; "
            "use variance_components_reml"
        )
    scores = table.scores_matrix()
    if scores.shape[1] < 2:
        raise DegenerateDataError(
            "ANOVA estimator requires at least 2 ratings per applicant"
        )
    mu, var_gamma, var_epsilon = anova_from_matrix(scores)
    return VarianceComponents(
        mu=mu,
        var_gamma=var_gamma,
        var_epsilon=var_epsilon,
        method="anova",
        n_applicants=table.n_applicants,
        mean_ratings=table.mean_ratings,
    )


_LAMBDA_LO = 1e-10
_LAMBDA_HI = 1e10
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_GOLDEN_ITER = 200


def _reml_profile(
    lam: float, sizes: np.ndarray, means: np.ndarray, ssw_total: float
) -> tuple[float, float, float]:
    """Profiled -2 restricted log-likelihood at variance ratio lambda.

    Returns (criterion, gls_mu, residual_quadratic); var_epsilon and mu
    are profiled out in closed form for the one-way model.
    """
    m_total = float(sizes.sum())
    w = sizes / (1.0 + lam * sizes)
    sw = float(w.sum())
    mu = float((w * means).sum()) / sw
    q = ssw_total + float((w * (means - mu) ** 2).sum())
    crit = (
        (m_total - 1.0) * math.log(q)
        + float(np.log1p(lam * sizes).sum())
        + math.log(sw)
    )
    return crit, mu, q


def reml_from_stats(
    sizes: np.ndarray, means: np.ndarray, ssw: np.ndarray
) -> tuple[float, float, float]:
    """REML (mu, var_gamma, var_epsilon) from per-group statistics."""
    ssw_total = float(ssw.sum())
    m_total = float(sizes.sum())
    n_groups = means.size

    if ssw_total == 0.0:
        # No within-group variance: the model collapses to means ~
        # N(mu, var_gamma) and REML is their sample variance.
        var_gamma = float(((means - means.mean()) ** 2).sum()) / (n_groups - 1)
        if var_gamma == 0.0:
            raise DegenerateDataError(
                "all ratings identical: total variance is zero"
            )
        return float(means.mean()), var_gamma, 0.0

    def crit(t: float) -> float:
        return _reml_profile(math.exp(t), sizes, means, ssw_total)[0]

    lo, hi = math.log(_LAMBDA_LO), math.log(_LAMBDA_HI)
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = crit(c), crit(d)
    for _ in range(_MAX_GOLDEN_ITER):
        if b - a <= 1e-10:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = crit(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = crit(d)
    else:
        raise ConvergenceError(
            f"REML profile search did not converge; last bracket "
            f"log-lambda in [{a:.6g}, {b:.6g}]"
        )

    t_best = 0.5 * (a + b)
    lam = math.exp(t_best)
    best, mu, q = _reml_profile(lam, sizes, means, ssw_total)

    # Explicit boundary: lambda = 0 (no between-applicant variance).
    bnd, mu0, q0 = _reml_profile(0.0, sizes, means, ssw_total)
    if bnd <= best or lam <= _LAMBDA_LO * (1.0 + 1e-6):
        lam, mu, q = 0.0, mu0, q0

    var_epsilon = q / (m_total - 1.0)
    var_gamma = lam * var_epsilon
    return mu, var_gamma, var_epsilon


def variance_components_reml(table: RatingsTable) -> VarianceComponents:
    """REML estimates for a validated table, balanced or not."""
    sizes, means, ssw = group_stats(table)
    mu, var_gamma, var_epsilon = reml_from_stats(sizes, means, ssw)
    return VarianceComponents(
        mu=mu,
        var_gamma=var_gamma,
        var_epsilon=var_epsilon,
        method="reml",
        n_applicants=table.n_applicants,
        mean_ratings=table.mean_ratings,
    )


def irr_single(vc: VarianceComponents) -> float:
    """Single-rater reliability: var_gamma / (var_gamma + var_epsilon)."""
    total = vc.var_gamma + vc.var_epsilon
    if total <= 0.0:
        raise DegenerateDataError("total variance is zero; IRR undefined")
    return vc.var_gamma / total


def irr_multi(irr1: float, j: float) -> float:
    """Spearman-Brown reliability of a J-rater average; J may be real."""
    irr1 = float(irr1)
    j = float(j)
    if not 0.0 <= irr1 <= 1.0:
        raise DomainError(f"irr1 must lie in [0, 1], got {irr1!r}")
    if not j >= 1.0:
        raise DomainError(f"j must be at least 1, got {j!r}")
    return j * irr1 / (j * irr1 + 1.0 - irr1)
