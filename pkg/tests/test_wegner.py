"""Interval-hit probability and gap-tail estimator tests."""

import math

import numpy as np
import pytest

from wigner_lab import (
    EnsembleSpec,
    InvalidSpecError,
    WegnerQuery,
    collect_gap_deltas,
    gap_tail,
    gue_spec,
    make_builtin,
    wegner_probability,
)
from wigner_lab.mcstats import slope_through_origin, weighted_line_fit, wilson_interval


def test_query_validation():
    WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(0.1,), N=20, trials=10)
    with pytest.raises(InvalidSpecError):
        WegnerQuery(E=1.8, kappa=0.5, epsilon_grid=(0.1,), N=20, trials=10)
    with pytest.raises(InvalidSpecError):
        WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(0.1, -0.2), N=20, trials=10)
    with pytest.raises(InvalidSpecError):
        WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(), N=20, trials=10)
    with pytest.raises(InvalidSpecError):
        WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(0.1,), N=20, trials=0)
    with pytest.raises(InvalidSpecError):
        WegnerQuery(E=0.0, kappa=-1.0, epsilon_grid=(0.1,), N=20, trials=10)


def test_small_n_warns_but_computes():
    spec = gue_spec(8, seed=1)
    q = WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(0.5,), N=8, trials=50)
    with pytest.warns(UserWarning):
        rep = wegner_probability(q, spec)
    assert rep.extra["n_below_hypothesis"] is True
    assert len(rep.rows) == 1


def test_dimension_mismatch_rejected():
    q = WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(0.1,), N=30, trials=5)
    with pytest.raises(InvalidSpecError):
        wegner_probability(q, gue_spec(20, seed=1))


@pytest.fixture(scope="module")
def small_wegner_report():
    spec = gue_spec(50, seed=11)
    q = WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(0.05, 0.1, 0.2, 0.4), N=50, trials=3000)
    return wegner_probability(q, spec)


def test_moment_chain_holds_exactly(small_wegner_report):
    rep = small_wegner_report
    for row in rep.rows:
        d = dict(zip(rep.columns, row))
        assert d["estimate"] <= d["mean_count"] <= d["mean_count_sq"]


def test_probability_monotone_in_eps_within_noise(small_wegner_report):
    rep = small_wegner_report
    ps = rep.column("estimate")
    ses = rep.column("stderr")
    for i in range(len(ps) - 1):
        assert ps[i] <= ps[i + 1] + 2.0 * (ses[i] + ses[i + 1])


def test_ratio_flat_and_near_semicircle_density(small_wegner_report):
    rep = small_wegner_report
    ratios = rep.column("ratio")
    # loose: every ratio within [0.15, 0.55] around 1/pi ~ 0.318 at this
    # trial count, and the through-origin slope likewise
    assert all(0.15 < r < 0.55 for r in ratios)
    assert 0.15 < rep.extra["slope_through_origin"] < 0.55
    assert rep.extra["max_ratio"] == pytest.approx(max(ratios), rel=1e-12)
    assert rep.extra["hypothesis"] == "satisfied"


def test_bulk_uniformity_bounded_ratio():
    # P/eps stays below 2 rho(0) across the bulk |E| <= 2 - kappa
    bound = 2.0 / math.pi
    for E in (0.0, 0.5, 1.0, 1.5):
        spec = gue_spec(60, seed=31)
        q = WegnerQuery(E=E, kappa=0.5, epsilon_grid=(0.2, 0.4), N=60, trials=1500)
        rep = wegner_probability(q, spec)
        for r in rep.column("ratio"):
            assert r < bound


def test_bernoulli_entries_flagged():
    spec = EnsembleSpec(
        N=20, offdiag=make_builtin("bernoulli", 0.5), diag=make_builtin("bernoulli", 1.0), seed=5
    )
    q = WegnerQuery(E=0.0, kappa=0.5, epsilon_grid=(0.2,), N=20, trials=100)
    rep = wegner_probability(q, spec)
    assert rep.extra["hypothesis"].startswith("violated")
    assert len(rep.rows) == 1  # still computed


# -- gap statistics ---------------------------------------------------------------


def test_gap_deltas_basic_properties():
    spec = gue_spec(100, seed=2)
    gs = collect_gap_deltas(spec, 0.0, trials=300)
    assert np.all(gs.Delta_samples >= 0.0)
    assert gs.effective_trials + gs.censored_count == 300
    # censoring is rare in the bulk
    assert gs.censored_count / 300 < 0.01


def test_gap_survival_monotone_and_fit():
    spec = gue_spec(100, seed=12)
    rep = gap_tail(spec, 0.0, [0.5, 1, 2, 4], trials=2000)
    surv = rep.column("estimate")
    assert surv[0] == max(surv)
    assert all(b <= a for a, b in zip(surv, surv[1:]))
    # P(Delta >= K) at K -> 0 is 1 among non-censored trials
    tiny = gap_tail(spec, 0.0, [1e-12, 1], trials=200)
    assert tiny.rows[0][tiny.columns.index("estimate")] == 1.0
    assert rep.extra["fit_b"] > 0
    assert rep.extra["fit_b_positive_95"] is True


def test_gap_grid_validation():
    spec = gue_spec(20, seed=3)
    with pytest.raises(InvalidSpecError):
        gap_tail(spec, 0.0, [2, 1], trials=10)
    with pytest.raises(InvalidSpecError):
        gap_tail(spec, 0.0, [-1, 2], trials=10)
    with pytest.raises(InvalidSpecError):
        collect_gap_deltas(spec, 2.5, trials=10)


def test_all_censored_raises():
    # N = 2 spectra essentially never reach 1.9999
    spec = gue_spec(2, seed=8)
    with pytest.raises(InvalidSpecError):
        collect_gap_deltas(spec, 1.9999, trials=5)


# -- fit helpers -------------------------------------------------------------------


def test_wilson_interval_contains_mle():
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 50)[0] == 0.0
    assert wilson_interval(50, 50)[1] == 1.0


def test_slope_through_origin_exact_on_linear_data():
    assert slope_through_origin([1.0, 2.0, 4.0], [0.5, 1.0, 2.0]) == pytest.approx(0.5, rel=1e-14)


def test_weighted_line_fit_recovers_line():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    y = 2.0 - 1.5 * x
    a, b, se_a, se_b = weighted_line_fit(x, y, np.full(4, 1e-6))
    assert a == pytest.approx(2.0, abs=1e-6)
    assert b == pytest.approx(-1.5, abs=1e-6)
    assert se_b > 0
