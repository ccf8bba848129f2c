"""Eigendecomposition, eigenvalue counting, the semicircle law, and
density-of-states estimation across macroscopic / mesoscopic / microscopic
scales.

The counting function uses closed intervals with ties counted in, a fixed
convention that keeps tests bit-stable (endpoint ties have probability zero
for continuous entry laws).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec, WignerMatrix, sample_matrix
from .errors import EigensolverError, InvalidSpecError
from .report import CANONICAL_COLUMNS, StatReport
from .runner import run_blocks

MESO_THETA_DEFAULT = 0.5


@dataclass(frozen=True, eq=False)
class SpectralSample:
    """Sorted spectrum of one sampled matrix, optionally with eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    spec: EnsembleSpec | None
    trial: int | None

    @property
    def N(self) -> int:
        return self.eigenvalues.size

    def validate(self, matrix: np.ndarray | None = None, *, unit_tol=1e-10, resid_tol=1e-8) -> None:
        """Assert the structural invariants; raises AssertionError on violation."""
        ev = self.eigenvalues
        assert np.all(np.diff(ev) >= 0), "eigenvalues must be sorted ascending"
        if self.eigenvectors is not None:
            U = self.eigenvectors
            gram = U.conj().T @ U
            assert np.max(np.abs(gram - np.eye(self.N))) < unit_tol, "eigenvectors not orthonormal"
            if matrix is not None:
                norm = float(np.max(np.abs(ev))) or 1.0
                resid = matrix @ U - U * ev[None, :]
                assert np.max(np.linalg.norm(resid, axis=0)) <= resid_tol * norm, "eigenpair residual too large"


def eigen_decompose(wm: WignerMatrix, want_vectors: bool = False) -> SpectralSample:
    """Dense Hermitian eigendecomposition, ascending eigenvalues.

    Non-convergence raises EigensolverError so the caller can mark the trial
    invalid and account for it.
    """
    try:
        if want_vectors:
            ev, U = np.linalg.eigh(wm.matrix)
        else:
            ev = np.linalg.eigvalsh(wm.matrix)
            U = None
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare in practice
        raise EigensolverError(f"eigensolver failed on trial {wm.trial}: {exc}") from exc
    return SpectralSample(eigenvalues=ev, eigenvectors=U, spec=wm.spec, trial=wm.trial)


def count_sorted(eigenvalues: np.ndarray, a: float, b: float) -> int:
    """Number of entries of a sorted vector in the closed interval [a, b]."""
    if a > b:
        raise InvalidSpecError(f"need a <= b, got [{a}, {b}]")
    left = int(np.searchsorted(eigenvalues, a, side="left"))
    right = int(np.searchsorted(eigenvalues, b, side="right"))
    return right - left


def counting(sample: SpectralSample, a: float, b: float) -> int:
    return count_sorted(sample.eigenvalues, a, b)


def semicircle_density(E):
    """Limiting density of states: sqrt(4 - E^2) / (2 pi) on [-2, 2], else 0."""
    E = np.asarray(E, dtype=float)
    out = np.where(np.abs(E) <= 2.0, np.sqrt(np.clip(4.0 - E * E, 0.0, None)) / (2.0 * math.pi), 0.0)
    return out if out.ndim else float(out)


def semicircle_cdf(E):
    """Closed-form antiderivative of the semicircle density, clamped to [0, 1]."""
    E = np.asarray(E, dtype=float)
    Ec = np.clip(E, -2.0, 2.0)
    val = (Ec * np.sqrt(4.0 - Ec * Ec) / 4.0 + np.arcsin(Ec / 2.0)) / math.pi + 0.5
    out = np.clip(val, 0.0, 1.0)
    return out if out.ndim else float(out)


# -- density of states --------------------------------------------------------

SCALES = ("macro", "meso", "micro")


@dataclass(frozen=True)
class DOSQuery:
    """An interval [E - eta/2, E + eta/2] and how to normalize its count."""

    energy: float
    eta: float
    per_unit_length: bool = True  # divide the count by N eta; else raw count

    def __post_init__(self):
        if self.eta <= 0:
            raise InvalidSpecError(f"interval width must be positive, got {self.eta}")

    def evaluate(self, eigenvalues: np.ndarray) -> float:
        n = count_sorted(eigenvalues, self.energy - self.eta / 2.0, self.energy + self.eta / 2.0)
        if not self.per_unit_length:
            return float(n)
        return n / (eigenvalues.size * self.eta)


def resolve_eta(scale: str, N: int, *, eta=None, theta=MESO_THETA_DEFAULT, K=None) -> float:
    if scale == "macro":
        if eta is None or eta <= 0:
            raise InvalidSpecError("macro scale needs a positive eta")
        return float(eta)
    if scale == "meso":
        if theta <= 0 or theta >= 1:
            raise InvalidSpecError(f"meso exponent must lie in (0, 1), got {theta}")
        return float(N ** (-theta))
    if scale == "micro":
        if K is None or K <= 0:
            raise InvalidSpecError("micro scale needs a positive K")
        return float(K) / N
    raise InvalidSpecError(f"unknown scale {scale!r}; expected one of {SCALES}")


def _dos_block(spec: EnsembleSpec, query: DOSQuery, start: int, stop: int):
    vals = []
    failures = 0
    for trial in range(start, stop):
        try:
            ev = eigen_decompose(sample_matrix(spec, trial)).eigenvalues
        except EigensolverError:
            failures += 1
            continue
        vals.append(query.evaluate(ev))
    return np.asarray(vals), failures


def dos_estimate(
    spec: EnsembleSpec,
    E: float,
    scale: str,
    *,
    eta: float | None = None,
    theta: float = MESO_THETA_DEFAULT,
    K: float | None = None,
    trials: int,
    jobs: int = 1,
    block_size: int = 64,
) -> StatReport:
    """Monte Carlo density of states on the interval [E - eta/2, E + eta/2].

    The per-trial statistic is count / (N eta); at the micro scale eta = K/N
    this equals count / K.  The report row carries the resolved width and the
    semicircle target.
    """
    if abs(E) >= 2.0:
        raise InvalidSpecError(f"bulk energy required (|E| < 2), got {E}")
    if trials < 1:
        raise InvalidSpecError("trials must be >= 1")
    width = resolve_eta(scale, spec.N, eta=eta, theta=theta, K=K)
    query = DOSQuery(energy=E, eta=width)
    blocks = run_blocks(
        functools.partial(_dos_block, spec, query), trials, block_size, jobs
    )
    vals = np.concatenate([v for v, _ in blocks]) if blocks else np.empty(0)
    failures = sum(f for _, f in blocks)
    if vals.size == 0:
        raise EigensolverError("all trials failed")
    est = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else math.nan
    k_or_eta = spec.N * width if scale == "micro" else width
    row = ("dos", E, scale, spec.N, k_or_eta, est, se, int(vals.size), spec.seed)
    return StatReport(
        statistic="dos",
        columns=CANONICAL_COLUMNS,
        rows=(row,),
        trials=trials,
        seed=spec.seed,
        extra={"target": float(semicircle_density(E)), "eta": width, "failed_trials": failures},
    )
