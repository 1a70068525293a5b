"""Two-scale implication checker on concrete draws."""

import numpy as np
import pytest

from loghop import (
    Box,
    DisorderSpec,
    HoppingKernel,
    MSAParams,
    ValidationError,
    WeightParams,
    assemble,
    coupling_check,
    draw,
)
from loghop.coupling import COUNTEREXAMPLE, NOT_APPLICABLE, PASS

KERNEL = HoppingKernel("log-power", gamma=1.0, rho=2.0)
UNIFORM = DisorderSpec("uniform", M=1.0)
W = WeightParams(1.0, 2.0, 1.5)
P = MSAParams(alpha=1.3, p=6.0, d=1, weights=W, kappa0=0.2, kappa_inf=0.1)


def test_scale_relation_validated():
    outer = draw(Box((0,), 15), UNIFORM, 0.05, KERNEL, seed=0, trial=0)
    with pytest.raises(ValidationError, match="floor"):
        coupling_check(outer, 0.5, 8, 0.2, P)  # floor(8^1.3) = 14, not 15


def test_kappa_validated():
    outer = draw(Box((0,), 14), UNIFORM, 0.05, KERNEL, seed=0, trial=0)
    with pytest.raises(ValidationError, match="kappa"):
        coupling_check(outer, 0.5, 8, -1.0, P)


def test_verdict_fields_and_no_counterexample():
    # scan a few draws; every applicable case must PASS (the implication is
    # a theorem, so a counterexample would be an implementation bug)
    n_applicable = 0
    for trial in range(40):
        outer = draw(Box((0,), 14), UNIFORM, 0.05, KERNEL, seed=11, trial=trial)
        v = coupling_check(outer, 0.5, 8, 0.2, P)
        assert v.status in (PASS, COUNTEREXAMPLE, NOT_APPLICABLE)
        assert v.scale_outer == 14 and v.scale_inner == 8
        assert set(v.margins) == {"outer-enr", "sub-cube-enr", "bad-cube-count"}
        assert v.tightest in v.margins
        if v.applicable:
            n_applicable += 1
            assert v.status == PASS
            assert v.worst_witness is not None
            # at this small scale kappa' has gone negative, which is legal
            assert v.kappa_out < v.kappa_in
    assert n_applicable > 0


def test_hypothesis_margins_sign_convention():
    for trial in range(30):
        outer = draw(Box((0,), 14), UNIFORM, 0.05, KERNEL, seed=2, trial=trial)
        v = coupling_check(outer, 0.5, 8, 0.2, P)
        assert v.hyp_outer_enr == (v.margins["outer-enr"] >= 0)
        assert v.hyp_bad_count == (v.margins["bad-cube-count"] >= 0)
        assert v.bad_count == 3 - int(v.margins["bad-cube-count"])
        # 2l = 16 > L = 14 leaves no admissible sub-cube, hypothesis vacuous
        assert v.n_sub_enr_checked == 0
        assert v.margins["sub-cube-enr"] == np.inf


def test_engineered_bad_cube_overflow():
    # plant four resonant sites spaced 17 = 2l+1 apart so four pairwise
    # disjoint bad l-cubes fit and the counting hypothesis fails
    params = MSAParams(alpha=1.7, p=12.0, d=1, weights=W, kappa0=0.2, kappa_inf=0.1)
    box = Box((0,), 34)  # floor(8^1.7) = 34
    v = np.full(box.n_sites, 0.9)
    planted = [(-26,), (-9,), (8,), (25,)]
    v[box.index_of(np.array(planted))] = 0.0
    outer = assemble(box, v, 1e-3, KERNEL)
    verdict = coupling_check(outer, 0.0, 8, 5.0, params)
    assert verdict.status == NOT_APPLICABLE
    assert not verdict.hyp_bad_count
    assert verdict.bad_count == 4
    assert verdict.bad_centers == tuple(planted)
    assert verdict.margins["bad-cube-count"] == -1.0


def test_sub_cube_hypothesis_checked_when_scales_allow():
    # l = 3 with alpha = 1.9 gives L = 8 >= 2l, so the 2l sub-cubes exist
    params = MSAParams(alpha=1.9, p=40.0, d=1, weights=W, kappa0=0.2, kappa_inf=0.1)
    outer = draw(Box((0,), 8), UNIFORM, 0.05, KERNEL, seed=6, trial=0)
    v = coupling_check(outer, 0.5, 3, 0.2, params)
    assert v.n_sub_enr_checked > 0
