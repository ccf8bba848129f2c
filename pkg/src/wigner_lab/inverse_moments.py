"""Inverse moments of frame overlaps:  E (sum_{j<=m} |b . u_j|^2)^(-r).

For a complex vector b whose real and imaginary components are iid from a
law with finite fourth moment and fourth-power score integral, this moment
is bounded by a constant independent of the ambient dimension and of the
orthonormal frame u_1 .. u_m, for r in {1, 2} and m > r.  With Gaussian
components of variance 1/2 the overlap sum is Gamma(m, 1), which gives the
closed-form benchmark  Gamma(m - r) / Gamma(m).

Estimation shares draws across all requested (m, r) pairs: the overlap
magnitudes for the largest m are computed once per sample and partial sums
give every smaller m.  Draw streams are keyed by (seed, N, batch), so the
estimate is reproducible regardless of worker count, and the batch partial
sums are combined in batch order.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .distributions import EntryDistribution, Gaussian, score_integral
from .errors import HypothesisError, InvalidSpecError, NoDensityError
from .report import StatReport
from .rng import TAG_FRAME, stream
from .runner import run_blocks

FRAME_KINDS = ("standard_basis", "random_orthonormal", "fourier_rows")
FRAME_ORTHO_TOL = 1e-12

INVMOM_COLUMNS = ("statistic", "law", "m", "r", "N", "frame", "estimate", "stderr", "samples", "seed", "oracle")


def gaussian_oracle(m: int, r: int) -> float:
    """Gamma(m - r) / Gamma(m) = 1 / ((m-1)(m-2)...(m-r)), exact for integer m > r >= 1."""
    if not (isinstance(m, int) and isinstance(r, int) and m > r >= 1):
        raise InvalidSpecError(f"need integers m > r >= 1, got m={m}, r={r}")
    denom = 1
    for k in range(m - r, m):
        denom *= k
    return 1.0 / denom


def check_component_law(law: EntryDistribution) -> None:
    """Gate on the component-law hypothesis: smooth density and finite moments."""
    if not law.has_density:
        raise HypothesisError(
            f"entry law {law.name!r} has no density; the score-regularity hypothesis fails"
        )
    if law.score is None:
        raise HypothesisError(
            f"entry law {law.name!r} has no pointwise score; the score-regularity hypothesis fails"
        )
    try:
        si = score_integral(law, 4)
    except NoDensityError as exc:  # pragma: no cover - has_density checked above
        raise HypothesisError(str(exc)) from exc
    if si.diverged:
        raise HypothesisError(
            f"fourth-power score integral of {law.name!r} diverges; hypothesis fails"
        )
    if not math.isfinite(law.fourth_moment()):
        raise HypothesisError(f"entry law {law.name!r} lacks a finite fourth moment")


def build_frame(frame, N: int, m: int, seed: int) -> np.ndarray:
    """An (N-1) x m matrix with orthonormal columns u_1 .. u_m.

    Generator rules: ``standard_basis`` (coordinate vectors),
    ``random_orthonormal`` (QR of a complex Gaussian block, columns in draw
    order with the positive-diagonal phase convention), ``fourier_rows``
    (rows of the unitary DFT matrix, a maximally delocalized frame).
    Explicit arrays are validated for orthonormality.
    """
    dim = N - 1
    if m > dim:
        raise InvalidSpecError(f"need m <= N - 1, got m={m}, N={N}")
    if isinstance(frame, np.ndarray):
        F = np.asarray(frame, dtype=np.complex128)
        if F.shape != (dim, m):
            raise InvalidSpecError(f"explicit frame must have shape ({dim}, {m}), got {F.shape}")
        gram = F.conj().T @ F
        if np.max(np.abs(gram - np.eye(m))) > FRAME_ORTHO_TOL:
            raise InvalidSpecError("explicit frame is not orthonormal within 1e-12")
        return F
    if frame == "standard_basis":
        return np.eye(dim, m, dtype=np.complex128)
    if frame == "random_orthonormal":
        rng = stream((seed, TAG_FRAME, N))
        G = rng.standard_normal((dim, m)) + 1j * rng.standard_normal((dim, m))
        Q, R = np.linalg.qr(G)
        d = np.diagonal(R)
        Q = Q * (np.abs(d) / np.where(d == 0, 1.0, d))[None, :]
        return Q
    if frame == "fourier_rows":
        k = np.arange(dim)
        j = np.arange(m)
        return np.exp(2j * math.pi * np.outer(k, j) / dim) / math.sqrt(dim)
    raise InvalidSpecError(f"unknown frame {frame!r}; expected one of {FRAME_KINDS} or an array")


@dataclass(frozen=True)
class InverseMomentQuery:
    m: int
    r: int
    N: int
    law: EntryDistribution
    frame: object = "fourier_rows"
    samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.r not in (1, 2):
            raise InvalidSpecError(f"r must be 1 or 2, got {self.r}")
        if self.m <= self.r:
            raise InvalidSpecError(f"need m > r, got m={self.m}, r={self.r}")
        if self.N < 2:
            raise InvalidSpecError(f"need N >= 2, got {self.N}")
        if self.m > self.N - 1:
            raise InvalidSpecError(f"need m <= N - 1, got m={self.m}, N={self.N}")
        if self.samples < 1:
            raise InvalidSpecError("samples must be >= 1")


def _batch_size(N: int) -> int:
    # Keep each batch's draw matrix around 4M scalars per component.
    return max(1024, 4_000_000 // max(N - 1, 1))


def _invmom_batches(law, N, frame_matrix, pairs, samples, seed, bstart, bstop):
    """Partial sums over draw batches [bstart, bstop).

    Per batch: draw 2 * batch * (N - 1) components (all real parts, then all
    imaginary parts), form the overlap magnitudes against the widest frame,
    and accumulate (count, sum, sum of squares) of S_m^(-r) per pair.
    """
    dim = N - 1
    bs = _batch_size(N)
    k = len(pairs)
    tot = np.zeros(k)
    tot_sq = np.zeros(k)
    n_valid = np.zeros(k, dtype=np.int64)
    rejected = 0
    for b in range(bstart, bstop):
        lo = b * bs
        hi = min(lo + bs, samples)
        if hi <= lo:
            continue
        n = hi - lo
        rng = stream((seed, N, b))
        draws = law.draw(rng, 2 * n * dim)
        bmat = draws[: n * dim].reshape(n, dim) + 1j * draws[n * dim :].reshape(n, dim)
        zeta = np.abs(bmat @ frame_matrix.conj()) ** 2
        csum = np.cumsum(zeta, axis=1)
        for i, (m, r) in enumerate(pairs):
            S = csum[:, m - 1]
            ok = S > 0.0
            rejected += int(n - np.count_nonzero(ok))
            v = S[ok] ** (-float(r))
            n_valid[i] += v.size
            tot[i] += float(np.sum(v))
            tot_sq[i] += float(np.sum(v * v))
    return tot, tot_sq, n_valid, rejected


def inverse_moment_grid(
    law: EntryDistribution,
    pairs,
    N: int,
    frame="fourier_rows",
    samples: int = 100_000,
    seed: int = 0,
    jobs: int = 1,
) -> StatReport:
    """Estimate the inverse overlap moment for several (m, r) pairs at once."""
    check_component_law(law)
    pairs = [(int(m), int(r)) for m, r in pairs]
    for m, r in pairs:
        InverseMomentQuery(m=m, r=r, N=N, law=law, frame=frame, samples=samples, seed=seed)
    m_max = max(m for m, _ in pairs)
    F = build_frame(frame, N, m_max, seed)
    n_batches = math.ceil(samples / _batch_size(N))
    frame_name = frame if isinstance(frame, str) else "explicit"
    results = run_blocks(
        functools.partial(_invmom_batches, law, N, F, tuple(pairs), samples, seed),
        n_batches,
        1,
        jobs,
    )
    tot = sum(r[0] for r in results)
    tot_sq = sum(r[1] for r in results)
    n_valid = sum(r[2] for r in results)
    rejected = sum(r[3] for r in results)

    rows = []
    for i, (m, r) in enumerate(pairs):
        n = int(n_valid[i])
        mean = tot[i] / n
        var = max(tot_sq[i] / n - mean * mean, 0.0)
        se = math.sqrt(var / n)
        oracle = gaussian_oracle(m, r) if isinstance(law, Gaussian) else math.nan
        rows.append(("invmom", law.name, m, r, N, frame_name, mean, se, n, seed, oracle))
    return StatReport(
        statistic="invmom",
        columns=INVMOM_COLUMNS,
        rows=tuple(rows),
        trials=samples,
        seed=seed,
        extra={"rejected_zero_overlap": int(rejected)},
    )


def estimate_inverse_moment(query: InverseMomentQuery, jobs: int = 1) -> StatReport:
    """Single (m, r) estimate; identical to the corresponding grid row."""
    return inverse_moment_grid(
        query.law,
        [(query.m, query.r)],
        query.N,
        frame=query.frame,
        samples=query.samples,
        seed=query.seed,
        jobs=jobs,
    )


def inverse_moment_study(
    law: EntryDistribution,
    m: int,
    r: int,
    N_grid,
    frame="fourier_rows",
    samples: int = 100_000,
    seed: int = 0,
    jobs: int = 1,
) -> StatReport:
    """One estimate per ambient dimension, to exhibit uniform-in-N boundedness."""
    rows = []
    rejected = 0
    for N in N_grid:
        rep = inverse_moment_grid(law, [(m, r)], int(N), frame=frame, samples=samples, seed=seed, jobs=jobs)
        rows.extend(rep.rows)
        rejected += rep.extra["rejected_zero_overlap"]
    return StatReport(
        statistic="invmom",
        columns=INVMOM_COLUMNS,
        rows=tuple(rows),
        trials=samples,
        seed=seed,
        extra={"rejected_zero_overlap": rejected},
    )
