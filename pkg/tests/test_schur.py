"""Schur-resolvent tests: every identity is checked against direct dense
linear algebra, and the window classification against brute force."""

import math

import numpy as np
import pytest

from wigner_lab import (
    DegenerateSelectionError,
    InvalidSpecError,
    WignerMatrix,
    cd_coefficients,
    classify_omega,
    classify_spectrum,
    decompose,
    delta_tail,
    denominator_parts,
    entry_stream_positions,
    gue_spec,
    resolvent_from_decomposition,
    sample_matrix,
    schur_diagonal,
    schur_identity_check,
)


def _wrap(mat) -> WignerMatrix:
    return WignerMatrix(matrix=np.asarray(mat, dtype=complex), spec=None, trial=0)


def test_schur_hand_checked_two_by_two():
    # H = [[1, 1], [1, -1]], z = i:
    # 1 / (1 - i - 1/(-1 - i)) = (1 + i)/3, matching direct inversion.
    H = np.array([[1.0, 1.0], [1.0, -1.0]])
    val = schur_diagonal(_wrap(H), 0, 1j)
    assert val == pytest.approx((1.0 + 1.0j) / 3.0, abs=1e-14)
    direct = np.linalg.inv(H.astype(complex) - 1j * np.eye(2))[0, 0]
    assert val == pytest.approx(direct, abs=1e-14)


def test_schur_on_diagonal_matrix():
    H = np.diag([1.0, 2.0, 3.0])
    for j in range(3):
        assert schur_diagonal(_wrap(H), j, 0.5j) == pytest.approx(1.0 / (H[j, j] - 0.5j), abs=1e-15)


def test_schur_requires_complex_z():
    with pytest.raises(InvalidSpecError):
        schur_diagonal(_wrap(np.eye(3)), 0, 1.0)


@pytest.mark.parametrize("N", [9, 20])
@pytest.mark.parametrize("E", [0.0, 1.0])
@pytest.mark.parametrize("eps", [1e-3, 0.1])
def test_schur_matches_direct_inverse(N, E, eps):
    spec = gue_spec(N, seed=15)
    for trial in range(2):
        A = sample_matrix(spec, trial).matrix
        z = E + 1j * eps / N
        R = np.linalg.inv(A - z * np.eye(N))
        for j in range(N):
            direct = R[j, j]
            rel = abs(schur_diagonal(A, j, z) - direct) / abs(direct)
            assert rel <= 1e-10


def test_decomposition_identities():
    N, E, eps = 24, 0.3, 0.05
    spec = gue_spec(N, seed=19)
    A = sample_matrix(spec, 0).matrix
    z = E + 1j * eps / N
    R = np.linalg.inv(A - z * np.eye(N))
    for j in (0, 5, N - 1):
        dec = decompose(A, j, E, eps)
        # Parseval: overlaps sum to |b|^2
        assert abs(dec.overlaps.sum() - dec.b_norm_sq) <= 1e-8 * dec.b_norm_sq
        # defining identities of the weights, 1e-12 relative
        lam = dec.minor_eigenvalues
        quad = (N * (lam - E)) ** 2 + eps**2
        assert np.allclose(dec.c * quad, eps, rtol=1e-12)
        assert np.allclose(dec.d * quad, N * (lam - E), rtol=1e-12, atol=1e-15)
        # structure: c positive, sign(d) = sign(lam - E)
        assert np.all(dec.c > 0)
        assert np.all(np.sign(dec.d) == np.sign(lam - E))
        # pointwise weight bounds: c <= 1/eps, |d| <= 1/(2 eps) and 1/(N|lam-E|)
        assert np.all(dec.c <= 1.0 / eps + 1e-15)
        assert np.all(np.abs(dec.d) <= 0.5 / eps + 1e-15)
        assert np.all(np.abs(dec.d) * N * np.abs(lam - E) <= 1.0 + 1e-12)
        # spectral form equals the Schur value and the direct inverse
        sp = resolvent_from_decomposition(dec)
        assert abs(sp - R[j, j]) <= 1e-10 * abs(R[j, j])
        # real/imaginary split of the squared denominator
        re, im = denominator_parts(dec)
        denom_sq = abs(1.0 / schur_diagonal(A, j, z)) ** 2
        assert abs(re * re + im * im - denom_sq) <= 1e-10 * denom_sq
        assert im > 0  # eps/N + sum c zeta is strictly positive


def test_cd_coefficients_at_target_energy():
    c, d = cd_coefficients(np.array([0.7]), E=0.7, epsilon=0.25, N=50)
    assert c[0] == pytest.approx(1.0 / 0.25, rel=1e-15)
    assert d[0] == 0.0


def test_decompose_rejects_bad_epsilon():
    A = sample_matrix(gue_spec(10, seed=1), 0).matrix
    with pytest.raises(InvalidSpecError):
        decompose(A, 0, 0.0, 0.0)


def test_row_and_minor_use_disjoint_draws():
    # Removing row/column 0: the vector b lives on entries (0, k), the minor
    # on entries (j, k) with j, k >= 1.  Their stream positions are disjoint
    # and together cover everything except nothing (the diagonal h_00 belongs
    # to the removed row).
    N = 12
    pos = entry_stream_positions(N)
    row = {p for (j, k), tup in pos.items() if j == 0 for p in tup}
    minor = {p for (j, k), tup in pos.items() if j >= 1 and k >= 1 for p in tup}
    assert row.isdisjoint(minor)
    assert row | minor == set(range(N * N))


# -- window classification --------------------------------------------------------


def test_classify_all_far_from_energy():
    eps, N, E = 0.1, 10, 0.0
    lam = E + np.arange(1, 11) * 10.0 * eps / N
    cls = classify_spectrum(lam, N, E, eps)
    assert cls.omega
    assert cls.indices == (0, 1, 2, 3, 4, 5)
    assert cls.Delta == pytest.approx(60.0 * eps)


def test_classify_three_at_energy_exactly():
    # 3 inside (exactly at E), 5 outside: fewer than six outside, so the
    # complement branch returns the inside indices, whose weight c = 1/eps
    # exceeds 1/(2 eps).
    eps, N, E = 0.1, 9, 0.2
    lam = np.array([E, E, E, E + 0.1, E - 0.1, E + 0.2, E - 0.2, E + 0.3])
    cls = classify_spectrum(lam, N, E, eps)
    assert not cls.omega
    assert cls.indices == (0, 1, 2)
    assert cls.Delta is None
    c, _ = cd_coefficients(lam[list(cls.indices)], E, eps, N)
    assert c == pytest.approx(1.0 / eps, rel=1e-14)
    assert np.all(c > 1.0 / (2.0 * eps))


def test_classify_six_outside_with_three_at_energy():
    eps, N, E = 0.1, 12, 0.0
    lam = np.concatenate([[E, E, E], E + np.linspace(0.05, 0.4, 8)])
    cls = classify_spectrum(lam, N, E, eps)
    assert cls.omega  # 8 outside >= 6
    assert all(N * abs(lam[i] - E) >= eps for i in cls.indices)


def test_classify_tie_breaks_to_smaller_index():
    eps, N, E = 0.1, 10, 0.0
    d = 2.0 * eps / N
    lam = np.array([E + d, E - d, E + 2 * d, E - 2 * d, E + 3 * d, E - 3 * d, E + 4 * d, E - 4 * d, E + 5 * d])
    cls = classify_spectrum(lam, N, E, eps)
    assert cls.omega
    assert cls.indices == (0, 1, 2, 3, 4, 5)


def test_classify_degenerate_annulus_raises():
    # six eigenvalues outside the interval but strictly inside the selection
    # annulus: the infimum rule has no candidates
    eps, N, E = 0.1, 10, 0.0
    t = 0.75 * eps / N
    lam = np.array([E, E, E + t, E - t, E + t, E - t, E + t, E - t])
    with pytest.raises(DegenerateSelectionError):
        classify_spectrum(lam, N, E, eps)


def test_classify_requires_minimum_dimension():
    with pytest.raises(InvalidSpecError):
        classify_spectrum(np.linspace(-1, 1, 7), 8, 0.0, 0.1)


def test_classify_chains_on_random_minors():
    # On every six-outside trial the selected weights obey the ordered chains
    # |d_a4| >= |d_a5| >= |d_a6| > 1/(2 Delta) and
    # c_a1 >= c_a2 >= c_a3 > eps/(2 Delta^2), re-checked by brute force.
    N, E, eps = 50, 0.0, 0.1
    spec = gue_spec(N, seed=23)
    n_omega = 0
    for trial in range(1000):
        A = sample_matrix(spec, trial).matrix
        lam = np.linalg.eigvalsh(A[1:, 1:])
        cls = classify_spectrum(lam, N, E, eps)
        t = N * np.abs(lam - E)
        if not cls.omega:
            for i in cls.indices:
                assert abs(lam[i] - E) <= eps / (2 * N)
            continue
        n_omega += 1
        idx = list(cls.indices)
        # brute-force re-selection from the sorted distances
        order = sorted(range(lam.size), key=lambda i: (t[i], i))
        brute = [i for i in order if t[i] >= eps][:6]
        assert idx == brute
        assert cls.Delta == t[idx[-1]]
        assert all(t[i] >= eps for i in idx)
        assert all(t[i] <= cls.Delta for i in idx)
        c, d = cd_coefficients(lam, E, eps, N)
        a4, a5, a6 = idx[3], idx[4], idx[5]
        assert abs(d[a4]) >= abs(d[a5]) >= abs(d[a6])
        assert abs(d[a6]) > 1.0 / (2.0 * cls.Delta)
        a1, a2, a3 = idx[0], idx[1], idx[2]
        assert c[a1] >= c[a2] >= c[a3]
        assert c[a3] > eps / (2.0 * cls.Delta**2)
    assert n_omega > 900  # the six-outside event dominates at this scale


def test_classify_omega_accepts_decomposition():
    A = sample_matrix(gue_spec(20, seed=2), 0).matrix
    dec = decompose(A, 0, 0.0, 0.1)
    cls = classify_omega(dec)
    assert cls.omega in (True, False)


def test_complement_branch_on_huge_interval():
    # interval half-width eps/2N = 25 swallows the whole spectrum
    N = 9
    spec = gue_spec(N, seed=40)
    A = sample_matrix(spec, 0).matrix
    lam = np.linalg.eigvalsh(A[1:, 1:])
    cls = classify_spectrum(lam, N, 0.0, 450.0)
    assert not cls.omega
    assert len(cls.indices) == 3
    c, _ = cd_coefficients(lam[list(cls.indices)], 0.0, 450.0, N)
    assert np.all(c > 1.0 / (2.0 * 450.0))


# -- delta tail and identity studies ------------------------------------------------


def test_delta_tail_smoke():
    spec = gue_spec(30, seed=3)
    rep = delta_tail(spec, 0.0, 0.1, [4, 8, 16], trials=200)
    surv = rep.column("estimate")
    assert all(b <= a for a, b in zip(surv, surv[1:]))
    assert 0.0 < rep.extra["omega_frequency"] <= 1.0
    assert rep.extra["mean_cubed_on_omega_event"] >= 0.0
    with pytest.raises(InvalidSpecError):
        delta_tail(spec, 0.0, 0.1, [4, 2], trials=10)


def test_schur_identity_check_report():
    spec = gue_spec(9, seed=77)
    rep = schur_identity_check(spec, [0.0], [0.1], trials=3)
    assert rep.columns[:4] == ("trial", "N", "E", "eps")
    assert len(rep.rows) == 3
    assert rep.extra["max_schur_rel_err"] <= 1e-10
    assert rep.extra["max_denominator_rel_err"] <= 1e-10
    assert rep.extra["max_spectral_rel_err"] <= 1e-10
