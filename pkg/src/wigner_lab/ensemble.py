"""Hermitian Wigner matrix sampling and the GUE joint eigenvalue density.

An N x N matrix is built from exactly N^2 independent real draws: for each
upper-triangle entry (row-major order) a real and an imaginary component from
the off-diagonal law, then N diagonal draws.  Entries carry the 1/sqrt(N)
scaling that keeps the spectrum of order one:  off-diagonal entries are
(x + i y)/sqrt(N) with E x^2 = E y^2 = 1/2, diagonal entries x/sqrt(N) with
E x^2 = 1, which makes E Tr H^2 = N.

The Gaussian case (GUE) additionally admits a closed-form joint eigenvalue
density proportional to  prod_{i<j} (mu_i - mu_j)^2 exp(-(N/2) sum mu_j^2),
used here purely as a small-N oracle for the sampler.
"""

from __future__ import annotations

import functools
import math
import struct
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_hermite

from .distributions import EntryDistribution, Gaussian
from .errors import InvalidSpecError
from .rng import stream

MATRIX_MAGIC = b"WIGMAT\x00\x01"

OFFDIAG_VARIANCE = 0.5
DIAG_VARIANCE = 1.0


@dataclass(frozen=True)
class EnsembleSpec:
    """Dimension, entry laws, and master seed of a Wigner ensemble.

    The off-diagonal law is shared by the real and imaginary components and
    must have variance exactly 1/2; the diagonal law must have variance
    exactly 1.  These are the variance constraints that pin E Tr H^2 = N.
    """

    N: int
    offdiag: EntryDistribution
    diag: EntryDistribution
    seed: int

    def __post_init__(self):
        if self.N < 2:
            raise InvalidSpecError(f"matrix dimension must be >= 2, got {self.N}")
        if self.offdiag.variance != OFFDIAG_VARIANCE:
            raise InvalidSpecError(
                "off-diagonal component law must have variance exactly 1/2 "
                f"(E x_jk^2 = 1/2), got {self.offdiag.variance}"
            )
        if self.diag.variance != DIAG_VARIANCE:
            raise InvalidSpecError(
                f"diagonal law must have variance exactly 1 (E x_jj^2 = 1), got {self.diag.variance}"
            )
        if self.seed < 0:
            raise InvalidSpecError("seed must be a non-negative integer")

    @property
    def is_gaussian(self) -> bool:
        return isinstance(self.offdiag, Gaussian) and isinstance(self.diag, Gaussian)


def gue_spec(N: int, seed: int) -> EnsembleSpec:
    """The Gaussian ensemble: gaussian(1/2) off-diagonal, gaussian(1) diagonal."""
    return EnsembleSpec(N=N, offdiag=Gaussian(variance=0.5), diag=Gaussian(variance=1.0), seed=seed)


@dataclass(frozen=True, eq=False)
class WignerMatrix:
    matrix: np.ndarray
    spec: EnsembleSpec
    trial: int

    @property
    def N(self) -> int:
        return self.matrix.shape[0]


def sample_matrix(spec: EnsembleSpec, trial: int) -> WignerMatrix:
    """Draw the Wigner matrix for one trial; pure in (spec.seed, trial).

    Draw order within the trial stream: the 2 * N(N-1)/2 off-diagonal
    components, real then imaginary per entry, entries in row-major
    upper-triangle order, followed by the N diagonal components.
    """
    N = spec.N
    rng = stream((spec.seed, trial))
    m = N * (N - 1) // 2
    off = spec.offdiag.draw(rng, 2 * m)
    dia = spec.diag.draw(rng, N)
    root_n = math.sqrt(N)
    H = np.zeros((N, N), dtype=np.complex128)
    rows, cols = np.triu_indices(N, k=1)
    vals = (off[0::2] + 1j * off[1::2]) / root_n
    H[rows, cols] = vals
    H[cols, rows] = np.conj(vals)
    H[np.arange(N), np.arange(N)] = dia / root_n  # exactly real diagonal
    return WignerMatrix(matrix=H, spec=spec, trial=trial)


def entry_stream_positions(N: int) -> dict[tuple[int, int], tuple[int, ...]]:
    """Stream positions consumed by each entry (j, k), j <= k, of an N x N draw.

    Off-diagonal entries consume two consecutive positions (real, imaginary);
    the diagonal consumes one position each after all off-diagonal draws.
    This is the bookkeeping that certifies the minor B^(j) and the removed
    row are built from disjoint randomness.
    """
    positions: dict[tuple[int, int], tuple[int, ...]] = {}
    t = 0
    for j in range(N):
        for k in range(j + 1, N):
            positions[(j, k)] = (2 * t, 2 * t + 1)
            t += 1
    base = 2 * t
    for j in range(N):
        positions[(j, j)] = (base + j,)
    return positions


# -- binary export ------------------------------------------------------------
#
# Layout: 16-byte header (8-byte magic, little-endian uint64 N), then N*N
# complex entries in row-major order as interleaved re/im little-endian
# float64.  Intended for cross-checking matrices against external tools.


def write_matrix(matrix: np.ndarray | WignerMatrix, path) -> None:
    A = matrix.matrix if isinstance(matrix, WignerMatrix) else np.asarray(matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    N = A.shape[0]
    flat = np.empty(2 * N * N, dtype="<f8")
    flat[0::2] = A.real.ravel(order="C")
    flat[1::2] = A.imag.ravel(order="C")
    with open(path, "wb") as fh:
        fh.write(MATRIX_MAGIC)
        fh.write(struct.pack("<Q", N))
        fh.write(flat.tobytes())


def read_matrix(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != MATRIX_MAGIC:
            raise ValueError(f"bad magic {magic!r}; not a matrix export file")
        (N,) = struct.unpack("<Q", fh.read(8))
        flat = np.frombuffer(fh.read(16 * N * N), dtype="<f8")
    if flat.size != 2 * N * N:
        raise ValueError("truncated matrix export file")
    return (flat[0::2] + 1j * flat[1::2]).reshape(N, N)


# -- GUE joint eigenvalue density ---------------------------------------------


@dataclass(frozen=True)
class GueLogDensity:
    """Log joint density value; ``normalized`` is False when the constant is omitted."""

    value: float
    normalized: bool


NORMALIZABLE_MAX_N = 4
JOINT_DENSITY_MAX_N = 8


@functools.lru_cache(maxsize=None)
def gue_log_normalization(N: int) -> float:
    """log(const) such that const * prod (mu_i-mu_j)^2 exp(-(N/2) sum mu^2) integrates to 1.

    Computed by Gauss-Hermite quadrature, which is exact here: after the
    substitution mu = x sqrt(2/N) the integrand is a polynomial of degree
    2(N-1) per variable against the weight exp(-x^2).  Tractable only for
    small N (the tensor grid has (N+2)^N nodes).
    """
    if not 2 <= N <= NORMALIZABLE_MAX_N:
        raise InvalidSpecError(f"normalization implemented for 2 <= N <= {NORMALIZABLE_MAX_N}")
    nodes, weights = roots_hermite(N + 2)
    grids = np.meshgrid(*([nodes] * N), indexing="ij")
    X = np.stack([g.ravel() for g in grids], axis=-1)
    W = np.ones(X.shape[0])
    for g in np.meshgrid(*([weights] * N), indexing="ij"):
        W = W * g.ravel()
    vander = np.ones(X.shape[0])
    for i in range(N):
        for j in range(i + 1, N):
            vander = vander * (X[:, i] - X[:, j]) ** 2
    integral = float(np.sum(W * vander))
    # Undo the substitution: a factor (2/N)^(N(N-1)/2) from the squared
    # differences and (2/N)^(N/2) from the volume element.
    log_z = math.log(integral) + (N * (N - 1) / 2 + N / 2) * math.log(2.0 / N)
    return -log_z


def gue_log_joint_density(eigenvalues, N: int | None = None) -> GueLogDensity:
    """Log of the GUE joint eigenvalue density at the given point.

    Returns sum_{i<j} 2 log|mu_i - mu_j| - (N/2) sum mu_j^2 plus the
    normalization constant for N <= 4; for larger N the constant is omitted
    and the result is flagged unnormalized.  Coincident eigenvalues give
    -inf (the squared-difference factor vanishes).
    """
    mu = np.asarray(eigenvalues, dtype=float)
    if mu.ndim != 1 or mu.size < 2:
        raise InvalidSpecError("need a vector of at least two eigenvalues")
    n = mu.size
    if N is not None and N != n:
        raise InvalidSpecError(f"declared dimension {N} does not match {n} eigenvalues")
    if n > JOINT_DENSITY_MAX_N:
        raise InvalidSpecError(f"joint density supported for N <= {JOINT_DENSITY_MAX_N}")
    diffs = mu[:, None] - mu[None, :]
    iu = np.triu_indices(n, k=1)
    gaps = np.abs(diffs[iu])
    if np.any(gaps == 0.0):
        return GueLogDensity(value=-math.inf, normalized=n <= NORMALIZABLE_MAX_N)
    value = 2.0 * float(np.sum(np.log(gaps))) - 0.5 * n * float(np.sum(mu * mu))
    if n <= NORMALIZABLE_MAX_N:
        return GueLogDensity(value=value + gue_log_normalization(n), normalized=True)
    return GueLogDensity(value=value, normalized=False)


def trace_h2(wm: WignerMatrix) -> float:
    return float(np.sum(np.abs(wm.matrix) ** 2).real)


# -- small-N pair sampling for the joint-density oracle ------------------------


def eigenvalue_pair(spec: EnsembleSpec, trial: int) -> tuple[float, float]:
    """(min, max) eigenvalues of one sampled 2 x 2 matrix, in closed form."""
    H = sample_matrix(spec, trial).matrix
    a = H[0, 0].real
    d = H[1, 1].real
    half_tr = 0.5 * (a + d)
    disc = math.sqrt((0.5 * (a - d)) ** 2 + abs(H[0, 1]) ** 2)
    return (half_tr - disc, half_tr + disc)


def pair_histogram_block(spec: EnsembleSpec, edges: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Folded histogram counts of sorted eigenvalue pairs over one trial block.

    The grid is ``edges x edges``; counts land in the (i, j) cell of the
    smaller/larger eigenvalue with j >= i, plus one overflow bin (last slot of
    the flattened array) for pairs leaving the grid.
    """
    nb = edges.size - 1
    counts = np.zeros(nb * nb + 1, dtype=np.int64)
    lo, hi = edges[0], edges[-1]
    for trial in range(start, stop):
        mu1, mu2 = eigenvalue_pair(spec, trial)
        if not (lo <= mu1 < hi and lo <= mu2 < hi):
            counts[-1] += 1
            continue
        i = int(np.searchsorted(edges, mu1, side="right")) - 1
        j = int(np.searchsorted(edges, mu2, side="right")) - 1
        counts[i * nb + j] += 1
    return counts


def gue_oracle_report(spec: EnsembleSpec, samples: int, bins: int = 50, span: float = 3.0, jobs: int = 1):
    """Chi-square comparison of sampled N = 2 eigenvalue pairs with the
    closed-form joint density.

    Sorted pairs are histogrammed on a ``bins x bins`` grid over
    [-span, span]^2 (folded to the ordered half), expected cell probabilities
    come from quadrature of the joint density, and cells with expected count
    below 5 are merged into the overflow cell before the chi-square statistic
    is formed.
    """
    import functools

    from .report import StatReport
    from .runner import run_blocks

    if spec.N != 2:
        raise InvalidSpecError("the joint-density oracle runs at N = 2")
    if not spec.is_gaussian:
        raise InvalidSpecError("the joint-density oracle applies to the Gaussian ensemble")
    edges = np.linspace(-span, span, bins + 1)
    blocks = run_blocks(
        functools.partial(pair_histogram_block, spec, edges), samples, 20_000, jobs
    )
    counts = sum(blocks, np.zeros(bins * bins + 1, dtype=np.int64))
    probs = gue_pair_cell_probs(edges)

    # Merge thin cells into the overflow slot so the chi-square reference
    # distribution is trustworthy.
    keep = probs[:-1] * samples >= 5.0
    obs_keep = counts[:-1][keep]
    exp_keep = probs[:-1][keep] * samples
    obs_rest = counts.sum() - obs_keep.sum()
    exp_rest = samples - exp_keep.sum()
    chi2 = float(np.sum((obs_keep - exp_keep) ** 2 / exp_keep))
    dof = int(obs_keep.size)  # +1 overflow cell, -1 for the fixed total
    if exp_rest > 0:
        chi2 += float((obs_rest - exp_rest) ** 2 / exp_rest)
    from scipy.stats import chi2 as chi2_dist

    pvalue = float(chi2_dist.sf(chi2, dof))

    centers = 0.5 * (edges[:-1] + edges[1:])
    rows = []
    for i in range(bins):
        for j in range(i, bins):
            idx = i * bins + j
            if counts[idx] or probs[idx] > 0:
                rows.append((i, j, float(centers[i]), float(centers[j]), int(counts[idx]), float(probs[idx])))
    rows.append((-1, -1, math.nan, math.nan, int(counts[-1]), float(probs[-1])))
    return StatReport(
        statistic="gue_oracle",
        columns=("bin_lo", "bin_hi", "mu_lo_center", "mu_hi_center", "observed", "expected_prob"),
        rows=tuple(rows),
        trials=samples,
        seed=spec.seed,
        extra={"chi2": chi2, "dof": dof, "pvalue": pvalue, "bins": bins, "span": span,
               "merged_cells": int(np.count_nonzero(~keep))},
    )


def gue_pair_cell_probs(edges: np.ndarray, nodes: int = 8) -> np.ndarray:
    """Exact cell probabilities of the sorted N=2 GUE eigenvalue pair.

    Integrates the closed-form joint density over each grid cell with a
    tensor Gauss-Legendre rule.  For the sorted pair, a cell (i, j) with
    j > i receives twice the plain integral (both orderings fold into it),
    a diagonal cell receives exactly the plain integral by symmetry.  The
    final slot holds the leftover probability mass outside the grid.
    """
    from numpy.polynomial.legendre import leggauss

    nb = edges.size - 1
    log_const = gue_log_normalization(2)
    x, w = leggauss(nodes)

    centers = 0.5 * (edges[:-1] + edges[1:])
    halves = 0.5 * np.diff(edges)
    pts = centers[:, None] + halves[:, None] * x[None, :]  # (nb, nodes)
    wts = halves[:, None] * w[None, :]

    # Full-cell integrals of the unordered density on the product grid.
    P1 = pts.reshape(nb, 1, nodes, 1)
    P2 = pts.reshape(1, nb, 1, nodes)
    W = wts.reshape(nb, 1, nodes, 1) * wts.reshape(1, nb, 1, nodes)
    dens = np.exp(log_const - (P1**2 + P2**2)) * (P1 - P2) ** 2
    cell = np.sum(dens * W, axis=(2, 3))  # (nb, nb)

    probs = np.zeros(nb * nb + 1)
    for i in range(nb):
        probs[i * nb + i] = cell[i, i]
        for j in range(i + 1, nb):
            probs[i * nb + j] = cell[i, j] + cell[j, i]
    probs[-1] = max(0.0, 1.0 - probs[:-1].sum())
    return probs
