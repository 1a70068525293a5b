"""Monte Carlo estimators against their analytic bounds."""

import numpy as np
import pytest

from loghop import (
    DisorderSpec,
    HoppingKernel,
    HypothesisError,
    MSAParams,
    ValidationError,
    WeightParams,
    coupling_scan,
    estimate_bad_pair_prob,
    pair_resonance_check,
    wegner_bound,
    wegner_check,
    wilson_interval,
)

UNIFORM = DisorderSpec("uniform", M=1.0, lam=1.0, beta=1.0, beta0=1.0)
W = WeightParams(1.0, 2.0, 1.5)
KERNEL = HoppingKernel("log-power", gamma=1.0, rho=2.0)


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0
    assert hi == pytest.approx(0.0370, abs=1e-3)
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert hi - 0.5 == pytest.approx(0.5 - lo, abs=1e-12)
    with pytest.raises(ValidationError):
        wilson_interval(5, 0)


def test_wegner_bound_example():
    # L=5, d=1, lambda=1, beta=1, eps=1e-3: 2 * 11^2 * 1e-3 = 0.242
    assert wegner_bound(UNIFORM, 5, 1, 1e-3) == pytest.approx(0.242)


def test_wegner_check_within_bound():
    rep = wegner_check(5, 0.0, 1e-3, UNIFORM, 1, 4000, seed=1)
    assert rep.bound == pytest.approx(0.242)
    assert rep.frequency <= rep.bound
    assert rep.ci[1] <= rep.bound + 0.02
    assert rep.within_bound


def test_wegner_refuses_atomic_disorder():
    spec = DisorderSpec("bernoulli", M=1.0, p=0.5)
    with pytest.raises(HypothesisError, match="atomic"):
        wegner_check(5, 0.0, 1e-3, spec, 1, 100, seed=0)


def test_wegner_refuses_oversized_window():
    spec = DisorderSpec("uniform", M=1.0, beta0=1.0)
    # eps (2L+1)^d = 1.1 > beta0
    with pytest.raises(HypothesisError, match="beta0"):
        wegner_check(5, 0.0, 0.1, spec, 1, 100, seed=0)


def test_wegner_with_hopping_runs():
    rep = wegner_check(4, 0.0, 1e-3, UNIFORM, 1, 200, seed=2, epsilon=0.01, kernel=KERNEL)
    assert rep.trials == 200


def test_pair_resonance_precondition():
    with pytest.raises(ValidationError, match="26 l <= L"):
        pair_resonance_check(20, 3, UNIFORM, 1, W, 100, seed=0)


def test_pair_resonance_identical_draws_diagnostic():
    rep = pair_resonance_check(52, 2, UNIFORM, 1, W, 60, seed=3, identical_draws=True)
    assert rep.frequency == 1.0


def test_pair_resonance_reports_vacuous_bound():
    rep = pair_resonance_check(52, 2, UNIFORM, 1, W, 60, seed=3)
    assert rep.vacuous == (rep.bound > 1.0)
    assert rep.threshold == pytest.approx(2 * np.exp(-np.log(52.0) ** 1.5))


def test_bad_pair_no_data_marker():
    rep = estimate_bad_pair_prob(8, 0.2, [0.0], UNIFORM, 0.05, KERNEL, W, 1, 0, seed=0)
    assert rep.no_data
    assert rep.trials == 0


def test_bad_pair_merge_pools_counts():
    a = estimate_bad_pair_prob(8, 0.2, [0.0, 0.4], UNIFORM, 0.05, KERNEL, W, 1, 80, seed=5)
    b = estimate_bad_pair_prob(
        8, 0.2, [0.0, 0.4], UNIFORM, 0.05, KERNEL, W, 1, 40, seed=5, trial_offset=80
    )
    m = a.merged_with(b)
    assert m.trials == 120
    assert m.hits == a.hits + b.hits
    full = estimate_bad_pair_prob(8, 0.2, [0.0, 0.4], UNIFORM, 0.05, KERNEL, W, 1, 120, seed=5)
    assert m.hits == full.hits


def test_bad_pair_merge_rejects_mismatched_configs():
    a = estimate_bad_pair_prob(8, 0.2, [0.0], UNIFORM, 0.05, KERNEL, W, 1, 10, seed=5)
    b = estimate_bad_pair_prob(8, 0.3, [0.0], UNIFORM, 0.05, KERNEL, W, 1, 10, seed=5)
    with pytest.raises(ValidationError):
        a.merged_with(b)


def test_trials_validated():
    with pytest.raises(ValidationError):
        wegner_check(5, 0.0, 1e-3, UNIFORM, 1, 0, seed=1)
    with pytest.raises(ValidationError):
        pair_resonance_check(52, 2, UNIFORM, 1, W, 0, seed=1)


def test_worker_count_does_not_change_payload():
    a = wegner_check(5, 0.0, 1e-3, UNIFORM, 1, 300, seed=9, workers=1)
    b = wegner_check(5, 0.0, 1e-3, UNIFORM, 1, 300, seed=9, workers=4)
    assert a == b
    pa = pair_resonance_check(52, 2, UNIFORM, 1, W, 80, seed=9, workers=1)
    pb = pair_resonance_check(52, 2, UNIFORM, 1, W, 80, seed=9, workers=4)
    assert pa == pb


def test_coupling_scan_counts_sum():
    params = MSAParams(alpha=1.3, p=6.0, d=1, weights=W, kappa0=0.2, kappa_inf=0.1)
    rep = coupling_scan(8, 0.5, 0.2, params, UNIFORM, 0.05, KERNEL, 15, seed=4)
    assert rep.n_pass + rep.n_counterexample + rep.n_not_applicable == 15
    assert rep.n_counterexample == 0
    assert rep.L == 14
    assert sum(rep.tightest_counts.values()) == 15
