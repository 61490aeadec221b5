"""Monte Carlo validation of the quantile approximation.

Generates rating data from the measurement model over a grid of
(reliability, applicant count, rater count) conditions, and compares,
for every possible number of selected applicants k, the empirical
true-positive probability (overlap of the top-k sets by latent ability
and by mean score) with the quantile-approximated probability computed
from the per-replication variance-component estimates. Per-condition
summaries aggregate the mean curves, bias, and RMSE across replications.

Reproducibility: replication r of condition c draws from the substream
(seed, c, r), and aggregation sums per-replication arrays in replication
order, so results are byte-identical regardless of how many worker
processes are used.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classify import tp_curve
from .errors import DomainError
from .measurement import RatingsTable, anova_from_matrix, reml_from_stats, table_from_groups

__all__ = [
    "SimulationConfig",
    "ConditionSummary",
    "SimulationSummary",
    "generate_dataset",
    "empirical_tp_curve",
    "approx_tp_curve",
    "run_study",
    "desk_config",
    "full_config",
]


@dataclass(frozen=True)
class SimulationConfig:
    """Grid and replication settings for the validation study."""

    irr1_values: tuple[float, ...] = (0.15, 0.30, 0.45)
    n_values: tuple[int, ...] = (100, 300, 1000)
    j_values: tuple[int, ...] = (3, 5, 10)
    replications: int = 1000
    total_variance: float = 1.0
    seed: int = 0
    estimator: str = "anova"

    def __post_init__(self):
        if not self.irr1_values or any(not 0.0 < v < 1.0 for v in self.irr1_values):
            raise DomainError("irr1_values must be a non-empty tuple within (0, 1)")
        if not self.n_values or any(n < 3 for n in self.n_values):
            raise DomainError("n_values must be a non-empty tuple of counts >= 3")
        if not self.j_values or any(j < 2 for j in self.j_values):
            raise DomainError("j_values must be a non-empty tuple of counts >= 2")
        if self.replications < 1:
            raise DomainError("replications must be positive")
        if self.total_variance <= 0.0:
            raise DomainError("total_variance must be positive")
        if self.estimator not in ("anova", "reml"):
            raise DomainError(f"estimator must be anova or reml, got {self.estimator!r}")

    @property
    def conditions(self) -> tuple[tuple[float, int, int], ...]:
        """(irr1, n, j) grid in deterministic order."""
        return tuple(
            (irr1, n, j)
            for irr1 in self.irr1_values
            for n in self.n_values
            for j in self.j_values
        )


def desk_config(seed: int = 0, estimator: str = "anova") -> SimulationConfig:
    """Reduced preset sized for minutes-scale runs: 200 reps at N=100."""
    return SimulationConfig(
        n_values=(100,), replications=200, seed=seed, estimator=estimator
    )


def full_config(seed: int = 0, estimator: str = "anova") -> SimulationConfig:
    """The full 3x3x3 grid with 1000 replications per condition."""
    return SimulationConfig(seed=seed, estimator=estimator)


def _replication_rng(seed: int, condition_index: int, replication: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(condition_index, replication))
    )


def _draw_scores(
    irr1: float, n: int, j: int, total_variance: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Latent abilities (n,) and score matrix (n, j); abilities drawn first."""
    latent = rng.normal(0.0, math.sqrt(irr1 * total_variance), size=n)
    noise = rng.normal(0.0, math.sqrt((1.0 - irr1) * total_variance), size=(n, j))
    return latent, latent[:, None] + noise


def generate_dataset(
    irr1: float,
    n: int,
    j: int,
    total_variance: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, RatingsTable]:
    """One balanced dataset from the measurement model.

    Latent abilities are centered at zero with variance irr1 *
    total_variance; each rating adds independent noise with the
    complementary variance.
    """
    if not 0.0 <= irr1 <= 1.0:
        raise DomainError(f"irr1 must lie in [0, 1], got {irr1!r}")
    if total_variance <= 0.0:
        raise DomainError("total_variance must be positive")
    latent, scores = _draw_scores(irr1, int(n), int(j), float(total_variance), rng)
    return latent, table_from_groups(list(scores))


def _overlap_curve(latent: np.ndarray, means: np.ndarray) -> np.ndarray:
    """|top-k by latent ∩ top-k by means| / n for k = 1..n-1.

    Rankings sort descending; ties break by ascending position (stable
    argsort on the negated values), which pins the result for the
    measure-zero tie case.
    """
    n = latent.size
    rank_latent = np.empty(n, dtype=np.intp)
    rank_latent[np.argsort(-latent, kind="stable")] = np.arange(n)
    rank_means = np.empty(n, dtype=np.intp)
    rank_means[np.argsort(-means, kind="stable")] = np.arange(n)
    joined = np.maximum(rank_latent, rank_means)
    counts = np.bincount(joined, minlength=n)
    return np.cumsum(counts)[: n - 1] / n


def empirical_tp_curve(latent: np.ndarray, table: RatingsTable) -> np.ndarray:
    """Empirical P(selected and high ability) at every k = 1..N-1."""
    latent = np.asarray(latent, dtype=np.float64)
    if latent.size != table.n_applicants:
        raise DomainError(
            f"latent has {latent.size} entries for {table.n_applicants} applicants"
        )
    means = np.array([g.mean() for g in table.groups])
    return _overlap_curve(latent, means)


def approx_tp_curve(vc, n: int, j: float) -> np.ndarray:
    """Quantile-approximated curve from estimated variance components."""
    total = vc.var_gamma + vc.var_epsilon
    irr1 = vc.var_gamma / total
    return tp_curve(j * irr1 / (j * irr1 + 1.0 - irr1), int(n))


@dataclass(frozen=True)
class ConditionSummary:
    """Aggregated curves for one (irr1, n, j) condition."""

    irr1: float
    n: int
    j: int
    replications: int
    p_select: np.ndarray
    mean_empirical: np.ndarray
    mean_approx: np.ndarray
    bias: np.ndarray
    rmse: np.ndarray
    n_clamped: int
    failures: tuple[tuple[int, str], ...]

    def to_dict(self) -> dict:
        return {
            "irr1": self.irr1,
            "n": self.n,
            "j": self.j,
            "replications": self.replications,
            "n_clamped": self.n_clamped,
            "failures": [list(f) for f in self.failures],
            "p_select": [float(v) for v in self.p_select],
            "mean_empirical": [float(v) for v in self.mean_empirical],
            "mean_approx": [float(v) for v in self.mean_approx],
            "bias": [float(v) for v in self.bias],
            "rmse": [float(v) for v in self.rmse],
        }


@dataclass(frozen=True)
class SimulationSummary:
    """All per-condition summaries plus the configuration that made them."""

    config: SimulationConfig
    conditions: tuple[ConditionSummary, ...]

    def condition(self, irr1: float, n: int, j: int) -> ConditionSummary:
        for c in self.conditions:
            if (c.irr1, c.n, c.j) == (irr1, n, j):
                return c
        raise KeyError(f"no condition (irr1={irr1}, n={n}, j={j})")


def _run_replication_block(
    args: tuple[SimulationConfig, int, tuple[float, int, int], int, int],
) -> tuple[int, np.ndarray, np.ndarray, int, list[tuple[int, str]]]:
    """Replications [start, stop) of one condition; a picklable work unit."""
    config, cond_index, (irr1, n, j), start, stop = args
    emp = np.empty((stop - start, n - 1))
    apx = np.empty((stop - start, n - 1))
    clamped = 0
    failures: list[tuple[int, str]] = []
    for r in range(start, stop):
        rng = _replication_rng(config.seed, cond_index, r)
        latent, scores = _draw_scores(irr1, n, j, config.total_variance, rng)
        means = scores.mean(axis=1)
        emp[r - start] = _overlap_curve(latent, means)
        try:
            if config.estimator == "anova":
                _, var_gamma, var_epsilon = anova_from_matrix(scores)
            else:
                sizes = np.full(n, float(j))
                ssw = ((scores - means[:, None]) ** 2).sum(axis=1)
                _, var_gamma, var_epsilon = reml_from_stats(sizes, means, ssw)
            total = var_gamma + var_epsilon
            if total <= 0.0:
                raise DomainError("zero total variance")
            if var_gamma == 0.0:
                clamped += 1
            irr1_hat = var_gamma / total
            irr_j_hat = j * irr1_hat / (j * irr1_hat + 1.0 - irr1_hat)
            apx[r - start] = tp_curve(irr_j_hat, n)
        except Exception as exc:  # recorded, study continues
            failures.append((r, str(exc)))
            apx[r - start] = np.nan
    return start, emp, apx, clamped, failures


_BLOCK_SIZE = 25


def run_study(config: SimulationConfig, jobs: int = 1) -> SimulationSummary:
    """Run the full grid; deterministic for a fixed seed at any job count.

    Work is split into fixed-size replication blocks; block results are
    reassembled by index before aggregation, so the floating-point
    summation order never depends on scheduling.
    """
    summaries = []
    for cond_index, (irr1, n, j) in enumerate(config.conditions):
        blocks = [
            (config, cond_index, (irr1, n, j), start, min(start + _BLOCK_SIZE, config.replications))
            for start in range(0, config.replications, _BLOCK_SIZE)
        ]
        emp = np.empty((config.replications, n - 1))
        apx = np.empty((config.replications, n - 1))
        n_clamped = 0
        failures: list[tuple[int, str]] = []
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_run_replication_block, blocks))
        else:
            results = [_run_replication_block(b) for b in blocks]
        results.sort(key=lambda r: r[0])
        for start, emp_b, apx_b, clamped_b, failures_b in results:
            emp[start : start + emp_b.shape[0]] = emp_b
            apx[start : start + apx_b.shape[0]] = apx_b
            n_clamped += clamped_b
            failures.extend(failures_b)

        ok = ~np.isnan(apx).any(axis=1)
        emp_ok, apx_ok = emp[ok], apx[ok]
        mean_emp = emp_ok.mean(axis=0)
        mean_apx = apx_ok.mean(axis=0)
        summaries.append(
            ConditionSummary(
                irr1=irr1,
                n=n,
                j=j,
                replications=int(ok.sum()),
                p_select=np.arange(1, n) / n,
                mean_empirical=mean_emp,
                mean_approx=mean_apx,
                bias=mean_apx - mean_emp,
                rmse=np.sqrt(((apx_ok - emp_ok) ** 2).mean(axis=0)),
                n_clamped=n_clamped,
                failures=tuple(failures),
            )
        )
    return SimulationSummary(config=config, conditions=tuple(summaries))
