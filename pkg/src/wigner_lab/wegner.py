"""Monte Carlo estimation of the microscopic interval-hit probability and of
the gap above a fixed bulk energy.

The interval statistic counts eigenvalues in [E - eps/2N, E + eps/2N]; the
quantity of interest is P(count >= 1) as a function of eps, which for smooth
entry laws stays proportional to eps, uniformly in N.  Since the count is a
non-negative integer, the pointwise chain

    1(count >= 1) <= count <= count^2

holds samplewise, hence the same chain holds for the empirical frequency and
moments; the estimator asserts this on every run.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .distributions import score_integral
from .ensemble import EnsembleSpec, sample_matrix
from .errors import EigensolverError, InvalidSpecError
from .mcstats import Z_ONE_SIDED_95, binomial_stderr, slope_through_origin, weighted_line_fit, wilson_interval
from .report import StatReport
from .runner import run_blocks
from .spectral import count_sorted, eigen_decompose

WEGNER_MIN_N = 9
FIT_MIN_EXCEEDANCES = 50

WEGNER_COLUMNS = (
    "statistic", "E", "scale", "N", "K_or_eta", "estimate", "stderr", "trials", "seed",
    "wilson_lo", "wilson_hi", "ratio", "mean_count", "mean_count_sq",
)


@dataclass(frozen=True)
class WegnerQuery:
    E: float
    kappa: float
    epsilon_grid: tuple[float, ...]
    N: int
    trials: int

    def __post_init__(self):
        if self.kappa <= 0:
            raise InvalidSpecError(f"kappa must be positive, got {self.kappa}")
        if abs(self.E) > 2.0 - self.kappa:
            raise InvalidSpecError(f"|E| <= 2 - kappa required, got E={self.E}, kappa={self.kappa}")
        if not self.epsilon_grid or any(e <= 0 for e in self.epsilon_grid):
            raise InvalidSpecError("epsilon grid must be non-empty and positive")
        if self.trials < 1:
            raise InvalidSpecError("trials must be >= 1")


def hypothesis_flag(spec: EnsembleSpec) -> str:
    """Whether the off-diagonal law satisfies the score-regularity hypothesis."""
    law = spec.offdiag
    if not law.has_density:
        return "violated: entry law has no density (discrete laws can place an eigenvalue exactly at E)"
    if law.score is None:
        return "violated: density has no pointwise score (hard support edge)"
    si = score_integral(law, 4)
    if si.diverged:
        return "violated: fourth-power score integral diverges"
    return "satisfied"


def _wegner_block(spec: EnsembleSpec, E: float, eps_grid: tuple[float, ...], start: int, stop: int):
    k = len(eps_grid)
    ge1 = np.zeros(k, dtype=np.int64)
    s1 = np.zeros(k, dtype=np.int64)
    s2 = np.zeros(k, dtype=np.int64)
    done = 0
    failures = 0
    half = np.asarray(eps_grid) / (2.0 * spec.N)
    for trial in range(start, stop):
        try:
            ev = eigen_decompose(sample_matrix(spec, trial)).eigenvalues
        except EigensolverError:
            failures += 1
            continue
        done += 1
        for i in range(k):
            n = count_sorted(ev, E - half[i], E + half[i])
            if n >= 1:
                ge1[i] += 1
            s1[i] += n
            s2[i] += n * n
    return ge1, s1, s2, done, failures


def wegner_probability(query: WegnerQuery, spec: EnsembleSpec, jobs: int = 1, block_size: int = 128) -> StatReport:
    """Estimate P(count >= 1) on the eps grid, with moment bounds and a linear fit.

    Per eps the report row carries the hit frequency with its Wilson 95%
    interval, the first and second empirical moments of the count (the proof
    chain P <= E count^2), and the ratio estimate / eps.  The extra section
    carries the least-squares slope through the origin and the maximal ratio.
    """
    if query.N != spec.N:
        raise InvalidSpecError(f"query dimension {query.N} != ensemble dimension {spec.N}")
    if spec.N < WEGNER_MIN_N:
        warnings.warn(
            f"N = {spec.N} is below the N >= {WEGNER_MIN_N} hypothesis; computing anyway",
            stacklevel=2,
        )
    eps = tuple(float(e) for e in query.epsilon_grid)
    blocks = run_blocks(
        functools.partial(_wegner_block, spec, query.E, eps), query.trials, block_size, jobs
    )
    k = len(eps)
    ge1 = sum((b[0] for b in blocks), np.zeros(k, dtype=np.int64))
    s1 = sum((b[1] for b in blocks), np.zeros(k, dtype=np.int64))
    s2 = sum((b[2] for b in blocks), np.zeros(k, dtype=np.int64))
    done = sum(b[3] for b in blocks)
    failures = sum(b[4] for b in blocks)
    if done == 0:
        raise EigensolverError("all trials failed")

    rows = []
    p_hat = ge1 / done
    for i, e in enumerate(eps):
        mean_count = s1[i] / done
        mean_count_sq = s2[i] / done
        # samplewise chain for integer counts, exact by construction
        assert p_hat[i] <= mean_count + 1e-15 and mean_count <= mean_count_sq + 1e-12
        lo, hi = wilson_interval(int(ge1[i]), done)
        rows.append((
            "wegner", query.E, "eps", spec.N, e,
            float(p_hat[i]), binomial_stderr(int(ge1[i]), done), done, spec.seed,
            lo, hi, float(p_hat[i]) / e, float(mean_count), float(mean_count_sq),
        ))

    extra = {
        "slope_through_origin": slope_through_origin(eps, p_hat),
        "max_ratio": float(np.max(p_hat / np.asarray(eps))),
        "kappa": query.kappa,
        "hypothesis": hypothesis_flag(spec),
        "failed_trials": failures,
        "n_below_hypothesis": spec.N < WEGNER_MIN_N,
    }
    return StatReport(
        statistic="wegner",
        columns=WEGNER_COLUMNS,
        rows=tuple(rows),
        trials=query.trials,
        seed=spec.seed,
        extra=extra,
    )


# -- gap above a fixed energy ---------------------------------------------------


@dataclass(frozen=True)
class GapStatistic:
    """Rescaled distances N (mu_{alpha+1} - E) to the first eigenvalue above E.

    alpha indexes the largest eigenvalue strictly below E; trials with no
    eigenvalue below E, or none above, are censored and counted.
    """

    E: float
    Delta_samples: np.ndarray
    censored_count: int
    effective_trials: int
    failed_trials: int


def _gap_block(spec: EnsembleSpec, E: float, start: int, stop: int):
    deltas = []
    censored = 0
    failures = 0
    for trial in range(start, stop):
        try:
            ev = eigen_decompose(sample_matrix(spec, trial)).eigenvalues
        except EigensolverError:
            failures += 1
            continue
        n_below = int(np.searchsorted(ev, E, side="left"))
        if n_below == 0 or n_below == spec.N:
            censored += 1
            continue
        deltas.append(spec.N * (ev[n_below] - E))
    return np.asarray(deltas), censored, failures


def collect_gap_deltas(spec: EnsembleSpec, E: float, trials: int, jobs: int = 1, block_size: int = 64) -> GapStatistic:
    if abs(E) >= 2.0:
        raise InvalidSpecError(f"bulk energy required (|E| < 2), got {E}")
    blocks = run_blocks(functools.partial(_gap_block, spec, E), trials, block_size, jobs)
    deltas = np.concatenate([b[0] for b in blocks]) if blocks else np.empty(0)
    censored = sum(b[1] for b in blocks)
    failures = sum(b[2] for b in blocks)
    if deltas.size == 0:
        raise InvalidSpecError("all trials were censored; E is outside the sampled spectrum")
    return GapStatistic(
        E=E,
        Delta_samples=deltas,
        censored_count=censored,
        effective_trials=int(deltas.size),
        failed_trials=failures,
    )


GAP_COLUMNS = (
    "statistic", "E", "scale", "N", "K_or_eta", "estimate", "stderr", "trials", "seed",
    "wilson_lo", "wilson_hi", "exceedances",
)


def gap_tail(spec: EnsembleSpec, E: float, K_grid, trials: int, jobs: int = 1) -> StatReport:
    """Empirical survival P(Delta >= K) with a stretched-exponential fit.

    The fit log P = a - b sqrt(K) uses only grid points with at least 50
    exceedances (tail bins are noise dominated) and weights each point by the
    delta-method variance of log P, so the slope uncertainty is meaningful
    even with few bins.
    """
    K_grid = [float(k) for k in K_grid]
    if any(k <= 0 for k in K_grid) or sorted(K_grid) != K_grid:
        raise InvalidSpecError("K grid must be positive and increasing")
    gs = collect_gap_deltas(spec, E, trials, jobs)
    n = gs.effective_trials
    rows = []
    fit_x, fit_y, fit_var = [], [], []
    for K in K_grid:
        exceed = int(np.count_nonzero(gs.Delta_samples >= K))
        p = exceed / n
        lo, hi = wilson_interval(exceed, n)
        rows.append((
            "gap_tail", E, "K", spec.N, K, p, binomial_stderr(exceed, n), n, spec.seed,
            lo, hi, exceed,
        ))
        if FIT_MIN_EXCEEDANCES <= exceed < n:  # p = 1 carries no decay information
            fit_x.append(math.sqrt(K))
            fit_y.append(math.log(p))
            fit_var.append((1.0 - p) / (n * p))  # delta-method variance of log p

    extra = {
        "censored_count": gs.censored_count,
        "censored_fraction": gs.censored_count / max(gs.censored_count + n, 1),
        "failed_trials": gs.failed_trials,
        "fit_points": len(fit_x),
    }
    if len(fit_x) >= 2:
        a, slope, _, se_slope = weighted_line_fit(fit_x, fit_y, fit_var)
        extra.update({
            "fit_a": a,
            "fit_b": -slope,
            "fit_b_stderr": se_slope,
            "fit_b_positive_95": -slope - Z_ONE_SIDED_95 * se_slope > 0.0,
        })
    return StatReport(
        statistic="gap_tail",
        columns=GAP_COLUMNS,
        rows=tuple(rows),
        trials=trials,
        seed=spec.seed,
        extra=extra,
    )
