"""Diagonal-resolvent Schur complement, minor spectral data, and the
six-index window classification.

For a Hermitian H and z off the real axis,

    (H - z)^{-1}(j, j) = 1 / (h_jj - z - a . (B - z)^{-1} a)

where a is the j-th row of H with the diagonal entry removed and B the minor
with row and column j deleted.  Expanding the quadratic form in the minor's
eigenbasis gives the decomposition in terms of overlaps zeta_alpha and the
weights

    c_alpha = eps / (N^2 (lambda_alpha - E)^2 + eps^2)
    d_alpha = N (lambda_alpha - E) / (N^2 (lambda_alpha - E)^2 + eps^2)

at the target point z = E + i eps / N.  Everything here is validated in the
test suite against direct dense inversion.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .ensemble import EnsembleSpec, WignerMatrix, sample_matrix
from .errors import DegenerateSelectionError, EigensolverError, InvalidSpecError
from .report import CANONICAL_COLUMNS, StatReport
from .runner import run_blocks


def _as_array(H) -> np.ndarray:
    return H.matrix if isinstance(H, WignerMatrix) else np.asarray(H)


def minor_and_row(A: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray]:
    """The minor with row/column j removed and the column vector a (a_i = h_ij, i != j)."""
    N = A.shape[0]
    idx = np.concatenate([np.arange(0, j), np.arange(j + 1, N)])
    return A[np.ix_(idx, idx)], A[idx, j]


def schur_diagonal(H, j: int, z: complex) -> complex:
    """The (j, j) resolvent entry via the Schur complement of the minor."""
    A = _as_array(H)
    z = complex(z)
    if z.imag == 0.0:
        raise InvalidSpecError("z must have nonzero imaginary part")
    B, a = minor_and_row(A, j)
    w = np.linalg.solve(B - z * np.eye(B.shape[0]), a)
    quad = complex(np.vdot(a, w))
    return 1.0 / (A[j, j] - z - quad)


@dataclass(frozen=True, eq=False)
class SchurDecomposition:
    """Minor spectral data and resolvent weights for one removed index.

    ``overlaps`` holds zeta_alpha = |b . u_alpha|^2 with b = sqrt(N) a, so
    sum zeta_alpha = |b|^2 (Parseval).  ``c`` and ``d`` satisfy the defining
    identities  c (N^2 (lam-E)^2 + eps^2) = eps  and
    d (N^2 (lam-E)^2 + eps^2) = N (lam-E)  exactly up to rounding.
    """

    j: int
    N: int
    h_jj: float
    minor_eigenvalues: np.ndarray
    overlaps: np.ndarray
    c: np.ndarray
    d: np.ndarray
    E: float
    epsilon: float
    b_norm_sq: float


def cd_coefficients(minor_eigenvalues: np.ndarray, E: float, epsilon: float, N: int):
    lam = np.asarray(minor_eigenvalues, dtype=float)
    x = N * (lam - E)
    denom = x * x + epsilon * epsilon
    return epsilon / denom, x / denom


def decompose(H, j: int, E: float, epsilon: float) -> SchurDecomposition:
    """Eigendecompose the minor and assemble overlaps and resolvent weights."""
    if epsilon <= 0:
        raise InvalidSpecError(f"epsilon must be positive, got {epsilon}")
    A = _as_array(H)
    N = A.shape[0]
    B, a = minor_and_row(A, j)
    try:
        lam, U = np.linalg.eigh(B)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise EigensolverError(f"eigensolver failed on minor {j}: {exc}") from exc
    b = math.sqrt(N) * a
    zeta = np.abs(U.conj().T @ b) ** 2
    c, d = cd_coefficients(lam, E, epsilon, N)
    return SchurDecomposition(
        j=j,
        N=N,
        h_jj=float(A[j, j].real),
        minor_eigenvalues=lam,
        overlaps=zeta,
        c=c,
        d=d,
        E=E,
        epsilon=epsilon,
        b_norm_sq=float(np.vdot(b, b).real),
    )


def resolvent_from_decomposition(dec: SchurDecomposition) -> complex:
    """Spectral form 1 / (h_jj - E - i eps/N - (1/N) sum zeta / (lam - E - i eps/N))."""
    z = dec.E + 1j * dec.epsilon / dec.N
    s = np.sum(dec.overlaps / (dec.minor_eigenvalues - z)) / dec.N
    return 1.0 / (dec.h_jj - z - s)


def denominator_parts(dec: SchurDecomposition) -> tuple[float, float]:
    """Real and imaginary parts of the decomposed resolvent denominator.

    real = h_jj - E - sum d zeta, imag = eps/N + sum c zeta; the squared
    modulus of the Schur denominator equals real^2 + imag^2.  The imaginary
    part is strictly positive, so the denominator never vanishes.
    """
    real = dec.h_jj - dec.E - float(np.sum(dec.d * dec.overlaps))
    imag = dec.epsilon / dec.N + float(np.sum(dec.c * dec.overlaps))
    return real, imag


# -- window classification ------------------------------------------------------

MIN_MINOR_DIM = 8  # the three-inside-indices argument needs N - 1 >= 8


@dataclass(frozen=True)
class OmegaClassification:
    """Outcome of the six-outside-eigenvalues event for one minor spectrum.

    On the event (``omega`` True) ``indices`` are the six nearest minor
    eigenvalues with N |lam - E| >= eps, chosen by the recursive infimum
    rule with ties broken toward the smaller index, and ``Delta`` is
    N |lam - E| of the sixth.  On the complement ``indices`` are three minor
    eigenvalues inside [E - eps/2N, E + eps/2N] and ``Delta`` is None.
    """

    omega: bool
    indices: tuple[int, ...]
    Delta: float | None


def classify_spectrum(minor_eigenvalues: np.ndarray, N: int, E: float, epsilon: float) -> OmegaClassification:
    lam = np.asarray(minor_eigenvalues, dtype=float)
    if lam.size < MIN_MINOR_DIM:
        raise InvalidSpecError(f"classification needs a minor dimension >= {MIN_MINOR_DIM} (N >= 9)")
    t = N * np.abs(lam - E)
    order = np.argsort(t, kind="stable")  # stable: ties go to the smaller index
    outside = t > epsilon / 2.0
    if int(np.count_nonzero(outside)) >= 6:
        selectable = order[t[order] >= epsilon]
        if selectable.size < 6:
            raise DegenerateSelectionError(
                "fewer than six minor eigenvalues at distance >= eps/N from E; "
                "measure-zero configuration"
            )
        chosen = selectable[:6]
        return OmegaClassification(
            omega=True, indices=tuple(int(i) for i in chosen), Delta=float(t[chosen[-1]])
        )
    inside = order[~outside[order]]
    return OmegaClassification(omega=False, indices=tuple(int(i) for i in inside[:3]), Delta=None)


def classify_omega(dec: SchurDecomposition) -> OmegaClassification:
    return classify_spectrum(dec.minor_eigenvalues, dec.N, dec.E, dec.epsilon)


# -- Delta tail study -----------------------------------------------------------


def _delta_block(spec: EnsembleSpec, E: float, epsilon: float, start: int, stop: int):
    deltas = []
    n_omega = 0
    n_done = 0
    failures = 0
    for trial in range(start, stop):
        H = sample_matrix(spec, trial).matrix
        B, _ = minor_and_row(H, 0)
        try:
            lam = np.linalg.eigvalsh(B)
        except np.linalg.LinAlgError:
            failures += 1
            continue
        cls = classify_spectrum(lam, spec.N, E, epsilon)
        n_done += 1
        if cls.omega:
            n_omega += 1
            deltas.append(cls.Delta)
    return np.asarray(deltas), n_omega, n_done, failures


def delta_tail(
    spec: EnsembleSpec,
    E: float,
    epsilon: float,
    K_grid,
    trials: int,
    jobs: int = 1,
    block_size: int = 64,
) -> StatReport:
    """Survival of Delta on the six-outside event, and the mean of 1_Omega Delta^3.

    Delta is measured on the trial's first minor.  The cubed-moment row of
    the report is the quantity whose uniform-in-N boundedness the tail bound
    exp(-c sqrt(K)) delivers.
    """
    K_grid = [float(k) for k in K_grid]
    if any(k <= 0 for k in K_grid) or sorted(K_grid) != K_grid:
        raise InvalidSpecError("K grid must be positive and increasing")
    blocks = run_blocks(functools.partial(_delta_block, spec, E, epsilon), trials, block_size, jobs)
    deltas = np.concatenate([b[0] for b in blocks]) if blocks else np.empty(0)
    n_omega = sum(b[1] for b in blocks)
    n_done = sum(b[2] for b in blocks)
    failures = sum(b[3] for b in blocks)
    if n_done == 0:
        raise EigensolverError("all trials failed")

    rows = []
    for K in K_grid:
        exceed = int(np.count_nonzero(deltas >= K))
        p = exceed / n_omega if n_omega else math.nan
        se = math.sqrt(p * (1.0 - p) / n_omega) if n_omega else math.nan
        rows.append(("delta_tail", E, "K", spec.N, K, p, se, n_omega, spec.seed))

    cubed = np.zeros(n_done)
    cubed[: deltas.size] = np.sort(deltas) ** 3  # indicator zero off the event
    mean3 = float(np.sum(deltas**3)) / n_done
    var3 = float(np.sum((cubed - mean3) ** 2)) / max(n_done - 1, 1)
    extra = {
        "epsilon": epsilon,
        "omega_frequency": n_omega / n_done,
        "mean_cubed_on_omega_event": mean3,
        "mean_cubed_stderr": math.sqrt(var3 / n_done),
        "failed_trials": failures,
    }
    return StatReport(
        statistic="delta_tail",
        columns=CANONICAL_COLUMNS,
        rows=tuple(rows),
        trials=trials,
        seed=spec.seed,
        extra=extra,
    )


# -- identity check study ---------------------------------------------------------


def _identity_block(spec: EnsembleSpec, E_values, eps_values, start: int, stop: int):
    rows = []
    for trial in range(start, stop):
        wm = sample_matrix(spec, trial)
        A = wm.matrix
        N = spec.N
        for E in E_values:
            for eps in eps_values:
                z = E + 1j * eps / N
                R = np.linalg.inv(A - z * np.eye(N))
                worst_schur = 0.0
                worst_denom = 0.0
                worst_spectral = 0.0
                for j in range(N):
                    direct = R[j, j]
                    s = schur_diagonal(A, j, z)
                    worst_schur = max(worst_schur, abs(s - direct) / abs(direct))
                    dec = decompose(A, j, E, eps)
                    re, im = denominator_parts(dec)
                    denom_sq = abs(1.0 / s) ** 2
                    worst_denom = max(worst_denom, abs(re * re + im * im - denom_sq) / denom_sq)
                    sp = resolvent_from_decomposition(dec)
                    worst_spectral = max(worst_spectral, abs(sp - direct) / abs(direct))
                rows.append((trial, N, E, eps, worst_schur, worst_denom, worst_spectral))
    return rows


SCHUR_CHECK_COLUMNS = ("trial", "N", "E", "eps", "schur_rel_err", "denominator_rel_err", "spectral_rel_err")


def schur_identity_check(
    spec: EnsembleSpec,
    E_values,
    eps_values,
    trials: int,
    jobs: int = 1,
) -> StatReport:
    """Per-trial worst-case residuals of the Schur and decomposition identities."""
    blocks = run_blocks(
        functools.partial(_identity_block, spec, tuple(E_values), tuple(eps_values)),
        trials,
        1,  # each trial already amortizes a dense inversion per (E, eps)
        jobs,
    )
    rows = [tuple(r) for b in blocks for r in b]
    worst = {
        "max_schur_rel_err": max((r[4] for r in rows), default=math.nan),
        "max_denominator_rel_err": max((r[5] for r in rows), default=math.nan),
        "max_spectral_rel_err": max((r[6] for r in rows), default=math.nan),
    }
    return StatReport(
        statistic="schur_check",
        columns=SCHUR_CHECK_COLUMNS,
        rows=tuple(rows),
        trials=trials,
        seed=spec.seed,
        extra=worst,
    )
