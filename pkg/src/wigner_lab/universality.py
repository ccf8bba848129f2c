"""Eigenvector delocalization statistics and the bulk two-point correlation.

Delocalization is measured by the normalized norm  M_v = |v|_p N^(1/2 - 1/p)
of unit eigenvectors with eigenvalue within K/N of the target energy: the
flat vector gives exactly 1, a coordinate vector gives N^(1/2 - 1/p), and
tightness of M_v across N is the empirical signature of complete
delocalization.

The two-point correlation is estimated by pair counting: eigenvalues are
mapped to rescaled positions x = N rho(E) (mu - E), pairs inside a window
[-W, W] are histogrammed by separation, and counts are normalized by the
number of trials, the bin width, the pair-overlap length (2W - s), and the
ordered-pair factor (1 - 1/N).  The analytic target is the determinant
1 - S(s)^2 built from the sine kernel S.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec, sample_matrix
from .errors import EigensolverError, InvalidSpecError
from .report import StatReport
from .rng import TAG_BOOTSTRAP, stream
from .runner import run_blocks
from .spectral import eigen_decompose, semicircle_density

SINE_SERIES_CUTOFF = 1e-4
DEFAULT_BIN_WIDTH = 0.25
DELOC_QUANTILES = (0.5, 0.9, 0.99)


def sine_kernel(x):
    """sin(pi x) / (pi x) with the removable singularity filled by its series."""
    x = np.asarray(x, dtype=float)
    px = math.pi * x
    small = np.abs(x) < SINE_SERIES_CUTOFF
    px_safe = np.where(small, 1.0, px)
    out = np.where(small, 1.0 - px * px / 6.0 * (1.0 - px * px / 20.0), np.sin(px_safe) / px_safe)
    return out if out.ndim else float(out)


def sine_target(s):
    """The k = 2 determinantal target: 1 - S(s)^2."""
    S = sine_kernel(s)
    return 1.0 - S * S


def normalized_lp_statistic(v: np.ndarray, p: float) -> float:
    """M_v = |v|_p * N^(1/2 - 1/p); p = inf uses the max modulus and exponent 1/2."""
    if p <= 2:
        raise InvalidSpecError(f"need p > 2, got {p}")
    mods = np.abs(np.asarray(v))
    n = mods.size
    if math.isinf(p):
        return float(np.max(mods)) * math.sqrt(n)
    norm = float(np.sum(mods**p)) ** (1.0 / p)
    return norm * n ** (0.5 - 1.0 / p)


@dataclass(frozen=True)
class DelocQuery:
    E: float
    K: float
    p: float
    N: int
    trials: int

    def __post_init__(self):
        if abs(self.E) >= 2.0:
            raise InvalidSpecError(f"bulk energy required (|E| < 2), got {self.E}")
        if self.p <= 2:
            raise InvalidSpecError(f"need p > 2, got {self.p}")
        if self.K <= 0 or self.trials < 1:
            raise InvalidSpecError("need K > 0 and trials >= 1")


def _deloc_block(spec: EnsembleSpec, E: float, K: float, p: float, start: int, stop: int):
    stats = []
    empty = 0
    failures = 0
    half = K / spec.N
    for trial in range(start, stop):
        try:
            sample = eigen_decompose(sample_matrix(spec, trial), want_vectors=True)
        except EigensolverError:
            failures += 1
            continue
        ev = sample.eigenvalues
        lo = int(np.searchsorted(ev, E - half, side="left"))
        hi = int(np.searchsorted(ev, E + half, side="right"))
        if hi == lo:
            empty += 1
            continue
        for a in range(lo, hi):
            stats.append(normalized_lp_statistic(sample.eigenvectors[:, a], p))
    return np.asarray(stats), empty, failures


DELOC_COLUMNS = (
    "statistic", "E", "scale", "N", "K_or_eta", "estimate", "stderr", "trials", "seed",
    "mean", "max", "q50", "q90", "q99", "n_vectors", "baseline_flat", "baseline_coordinate",
)


def _bootstrap_se_quantile(values: np.ndarray, q: float, seed: int, resamples: int = 500) -> float:
    rng = stream((seed, TAG_BOOTSTRAP))
    n = values.size
    idx = rng.integers(0, n, size=(resamples, n))
    return float(np.std(np.quantile(values[idx], q, axis=1), ddof=1))


def deloc_statistic(query: DelocQuery, spec: EnsembleSpec, jobs: int = 1, block_size: int = 16) -> StatReport:
    """Distribution of M_v over eigenvectors with |mu - E| <= K/N.

    The headline estimate is the 99th percentile (with a bootstrap standard
    error); mean, max, and quantiles are reported alongside the exact flat
    and coordinate baselines.
    """
    if query.N != spec.N:
        raise InvalidSpecError(f"query dimension {query.N} != ensemble dimension {spec.N}")
    blocks = run_blocks(
        functools.partial(_deloc_block, spec, query.E, query.K, query.p), query.trials, block_size, jobs
    )
    values = np.concatenate([b[0] for b in blocks]) if blocks else np.empty(0)
    empty = sum(b[1] for b in blocks)
    failures = sum(b[2] for b in blocks)
    if values.size == 0:
        raise InvalidSpecError("no eigenvalue fell inside the window in any trial")
    q50, q90, q99 = (float(np.quantile(values, q)) for q in DELOC_QUANTILES)
    baseline_coord = query.N ** (0.5 - (0.0 if math.isinf(query.p) else 1.0 / query.p))
    row = (
        "deloc", query.E, "K", spec.N, query.K,
        q99, _bootstrap_se_quantile(values, 0.99, spec.seed), query.trials, spec.seed,
        float(np.mean(values)), float(np.max(values)), q50, q90, q99,
        int(values.size), 1.0, baseline_coord,
    )
    return StatReport(
        statistic="deloc",
        columns=DELOC_COLUMNS,
        rows=(row,),
        trials=query.trials,
        seed=spec.seed,
        extra={"p": query.p, "empty_window_trials": empty, "failed_trials": failures},
    )


# -- two-point correlation -------------------------------------------------------


@dataclass(frozen=True)
class CorrelationQuery:
    E: float
    s_grid: tuple[float, ...]
    W: float
    N: int
    trials: int
    bin_width: float = DEFAULT_BIN_WIDTH

    def __post_init__(self):
        if abs(self.E) >= 2.0:
            raise InvalidSpecError(f"bulk energy required (|E| < 2), got {self.E}")
        if self.W <= 0 or self.bin_width <= 0 or self.trials < 1:
            raise InvalidSpecError("need W > 0, bin_width > 0, trials >= 1")
        if not self.s_grid:
            raise InvalidSpecError("s grid must be non-empty")
        for s in self.s_grid:
            if not 0.0 < s <= self.W:
                raise InvalidSpecError(f"s values must lie in (0, W], got {s}")
            if s - self.bin_width / 2.0 <= 0.0:
                raise InvalidSpecError(f"bin at s={s} extends to non-positive separations")


def pair_separation_counts(eigenvalues: np.ndarray, E: float, N: int, W: float, centers, width: float) -> np.ndarray:
    """Counts of rescaled pair separations per bin for one spectrum.

    Positions are x = N rho(E) (mu - E); pairs with both positions in
    [-W, W] contribute their positive separation once.
    """
    rho = semicircle_density(E)
    x = N * rho * (eigenvalues - E)
    xw = x[(x >= -W) & (x <= W)]
    counts = np.zeros(len(centers), dtype=np.int64)
    if xw.size < 2:
        return counts
    diffs = np.abs(xw[:, None] - xw[None, :])[np.triu_indices(xw.size, k=1)]
    for i, c in enumerate(centers):
        lo, hi = c - width / 2.0, c + width / 2.0
        counts[i] = int(np.count_nonzero((diffs >= lo) & (diffs < hi)))
    return counts


def _corr_block(spec: EnsembleSpec, E: float, W: float, centers, width: float, start: int, stop: int):
    k = len(centers)
    total = np.zeros(k, dtype=np.int64)
    total_sq = np.zeros(k, dtype=np.float64)
    done = 0
    failures = 0
    for trial in range(start, stop):
        try:
            ev = eigen_decompose(sample_matrix(spec, trial)).eigenvalues
        except EigensolverError:
            failures += 1
            continue
        c = pair_separation_counts(ev, E, spec.N, W, centers, width)
        total += c
        total_sq += c.astype(float) ** 2
        done += 1
    return total, total_sq, done, failures


CORR_COLUMNS = ("s_bin_center", "R2_estimate", "R2_stderr", "sine_target")


def two_point_correlation(query: CorrelationQuery, spec: EnsembleSpec, jobs: int = 1, block_size: int = 16) -> StatReport:
    """Rescaled two-point density against the sine-kernel determinant.

    The window must stay strictly inside the bulk: E +/- W/(N rho(E)) within
    (-2, 2).  Normalization divides pair counts by trials, bin width, the
    overlap length (2W - s), and (1 - 1/N) for ordered pairs, which is the
    finite-N pair-counting density matching the k = 2 rescaled correlation.
    """
    if query.N != spec.N:
        raise InvalidSpecError(f"query dimension {query.N} != ensemble dimension {spec.N}")
    rho = semicircle_density(query.E)
    reach = query.W / (spec.N * rho)
    if abs(query.E) + reach >= 2.0:
        raise InvalidSpecError(
            f"window too large: rescaled positions reach |E'| = {abs(query.E) + reach:.3f} >= 2"
        )
    centers = tuple(float(s) for s in query.s_grid)
    blocks = run_blocks(
        functools.partial(_corr_block, spec, query.E, query.W, centers, query.bin_width),
        query.trials,
        block_size,
        jobs,
    )
    k = len(centers)
    total = sum((b[0] for b in blocks), np.zeros(k, dtype=np.int64))
    total_sq = sum((b[1] for b in blocks), np.zeros(k))
    done = sum(b[2] for b in blocks)
    failures = sum(b[3] for b in blocks)
    if done == 0:
        raise EigensolverError("all trials failed")

    rows = []
    for i, s in enumerate(centers):
        norm = done * query.bin_width * (2.0 * query.W - s) * (1.0 - 1.0 / spec.N)
        mean_count = total[i] / done
        var_count = max(total_sq[i] / done - mean_count**2, 0.0)
        est = total[i] / norm
        se = math.sqrt(var_count / done) * done / norm
        rows.append((s, float(est), float(se), float(sine_target(s))))
    return StatReport(
        statistic="corr",
        columns=CORR_COLUMNS,
        rows=tuple(rows),
        trials=query.trials,
        seed=spec.seed,
        extra={
            "E": query.E,
            "N": spec.N,
            "W": query.W,
            "bin_width": query.bin_width,
            "effective_trials": done,
            "failed_trials": failures,
        },
    )
