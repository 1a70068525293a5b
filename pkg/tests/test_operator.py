"""Finite-volume operator assembly and restriction."""

import numpy as np
import pytest

from loghop import (
    Box,
    DeskScaleError,
    DisorderSpec,
    HoppingKernel,
    ValidationError,
    assemble,
    draw,
    restrict,
    spectrum,
)
from loghop.kernels import kernel_eval

NN = HoppingKernel("table", table={(1,): 1.0, (-1,): 1.0})


def test_three_site_path_spectrum():
    s = assemble(Box((0,), 1), np.zeros(3), 1.0, NN)
    np.testing.assert_allclose(np.sort(spectrum(s)), [-np.sqrt(2), 0.0, np.sqrt(2)], atol=1e-12)


def test_potential_sits_on_diagonal():
    v = np.array([3.0, -1.0, 0.5])
    s = assemble(Box((0,), 1), v, 0.5, NN)
    np.testing.assert_array_equal(np.diag(s.matrix), v)


def test_epsilon_zero_is_diagonal():
    v = np.array([3.0, -1.0, 0.5])
    s = assemble(Box((0,), 1), v, 0.0, NN)
    np.testing.assert_array_equal(s.matrix, np.diag(v))


def test_assembly_linear_in_epsilon():
    box = Box((0, 0), 3)
    k = HoppingKernel("log-power", gamma=1.0, rho=2.0)
    v = np.linspace(-1, 1, box.n_sites)
    a = assemble(box, v, 0.25, k).matrix
    b = assemble(box, v, 0.5, k).matrix
    off_a = a - np.diag(np.diag(a))
    off_b = b - np.diag(np.diag(b))
    np.testing.assert_allclose(2.0 * off_a, off_b, rtol=1e-15)


def test_matrix_matches_pointwise_kernel():
    box = Box((1, -1), 2)
    for k in (
        HoppingKernel("log-power", gamma=1.0, rho=2.0),
        HoppingKernel("log-power", gamma=1.0, rho=2.0, phase_vector=(0.3, -0.9)),
        HoppingKernel("table", table={(1, 0): 0.5 + 0.25j, (-1, 0): 0.5 - 0.25j}),
    ):
        s = assemble(box, np.zeros(box.n_sites), 1.0, k)
        sites = box.sites()
        n = box.n_sites
        expected = np.array(
            [[kernel_eval(k, sites[i] - sites[j]) for j in range(n)] for i in range(n)]
        )
        np.testing.assert_allclose(s.matrix, expected, atol=1e-15)


def test_hermitian_exactly():
    box = Box((0,), 6)
    for k in (
        HoppingKernel("log-power", gamma=1.0, rho=2.0, phase_vector=(0.7,)),
        HoppingKernel("table", table={(2,): 0.1 + 0.3j, (-2,): 0.1 - 0.3j}),
    ):
        m = assemble(box, np.zeros(box.n_sites), 1.0, k).matrix
        assert np.array_equal(m, m.conj().T)


def test_restriction_is_principal_submatrix_and_fresh_draw():
    spec = DisorderSpec("uniform", M=1.0)
    k = HoppingKernel("log-power", gamma=1.0, rho=2.0)
    big = draw(Box((0, 0), 4), spec, 0.1, k, seed=2, trial=5)
    sub_box = Box((1, -1), 2)
    sub = restrict(big, sub_box)
    idx = big.box.index_of(sub_box.sites())
    np.testing.assert_array_equal(sub.matrix, big.matrix[np.ix_(idx, idx)])
    # hopping depends only on displacements, so restriction equals reassembly
    fresh = draw(sub_box, spec, 0.1, k, seed=2, trial=5)
    np.testing.assert_array_equal(sub.matrix, fresh.matrix)


def test_restrict_validates_containment():
    spec = DisorderSpec("uniform", M=1.0)
    k = HoppingKernel("log-power", gamma=1.0, rho=2.0)
    big = draw(Box((0,), 4), spec, 0.1, k, seed=0, trial=0)
    with pytest.raises(ValidationError):
        restrict(big, Box((4,), 1))


def test_validation_and_cap():
    with pytest.raises(ValidationError):
        assemble(Box((0,), 1), np.zeros(3), -0.1, NN)
    with pytest.raises(ValidationError):
        assemble(Box((0,), 1), np.zeros(4), 0.1, NN)
    with pytest.raises(DeskScaleError):
        assemble(Box((0, 0, 0), 20), np.zeros(41**3), 0.1, NN)
