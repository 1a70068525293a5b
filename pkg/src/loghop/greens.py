"""Spectra, Green's functions, and cube goodness classification.

A cube is non-resonant at energy E when the spectrum of its Hamiltonian
stays exp(-log^{rho'} L) away from E, and good when on top of that the
Green's function decays from the center under the log-power envelope at
every boundary-shell site.

Green's functions come from an LU factorization of the shifted matrix; an
eigendecomposition route is available both as an independent cross-check
and to amortize energy sweeps.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import NearResonanceError, ValidationError
from .geometry import Box, out_shell_sites
from .operator import OperatorSample, restrict
from .weights import WeightParams, decay_envelope, nr_threshold

NEAR_RESONANCE_FLOOR = 1e-12


def spectrum(sample: OperatorSample) -> np.ndarray:
    """All eigenvalues, ascending."""
    return np.linalg.eigvalsh(sample.matrix)


@dataclass
class EigenSystem:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # columns, orthonormal


def eigenpairs(sample: OperatorSample) -> EigenSystem:
    w, u = np.linalg.eigh(sample.matrix)
    return EigenSystem(w, u)


def resonance_distance(sample: OperatorSample, E: float, w: np.ndarray | None = None) -> float:
    if w is None:
        w = spectrum(sample)
    return float(np.min(np.abs(w - E)))


def is_enr(
    sample: OperatorSample, E: float, rho_prime: float, w: np.ndarray | None = None
) -> bool:
    """Non-resonant at E: spectral distance at least exp(-log^{rho'} L)."""
    L = sample.box.radius
    if L == 1:
        warnings.warn("radius-1 box: non-resonance threshold degenerates to 1", stacklevel=2)
    return resonance_distance(sample, E, w) >= nr_threshold(L, rho_prime)


def greens(sample: OperatorSample, E: float, w: np.ndarray | None = None) -> np.ndarray:
    """G = (H - E)^{-1} via LU factorization of the shifted matrix."""
    gap = resonance_distance(sample, E, w)
    if gap < NEAR_RESONANCE_FLOOR:
        raise NearResonanceError(
            f"dist(E, spectrum) = {gap:.3e} is below {NEAR_RESONANCE_FLOOR:.0e}; "
            "the shifted matrix is numerically singular"
        )
    shifted = sample.matrix - E * np.eye(sample.n, dtype=sample.matrix.dtype)
    return lu_solve(lu_factor(shifted), np.eye(sample.n, dtype=shifted.dtype))


def greens_from_eigen(eig: EigenSystem, E: float) -> np.ndarray:
    """Resolvent through the spectral decomposition; cross-check route."""
    gap = float(np.min(np.abs(eig.values - E)))
    if gap < NEAR_RESONANCE_FLOOR:
        raise NearResonanceError(f"dist(E, spectrum) = {gap:.3e} is numerically singular")
    return (eig.vectors / (eig.values - E)) @ eig.vectors.conj().T


@dataclass
class CubeReport:
    box: Box
    energy: float
    resonance_distance: float
    enr: bool
    kappa: float
    good: bool
    worst_witness: tuple | None  # (site, attained |G|, allowed envelope)
    n_checked: int


def classify_cube(
    sample: OperatorSample,
    E: float,
    kappa: float,
    weights: WeightParams,
    eig: EigenSystem | None = None,
    all_sources: bool = False,
) -> CubeReport:
    """Good means non-resonant and envelope-bounded on the out-shell.

    The source of the Green's function is the cube center; all_sources=True
    checks every site as a source instead, a strictly stronger test.
    """
    box = sample.box
    if kappa <= 0:
        raise ValidationError(f'violates "kappa > 0": kappa={kappa}')
    w = eig.values if eig is not None else spectrum(sample)
    gap = float(np.min(np.abs(w - E)))
    enr = gap >= nr_threshold(box.radius, weights.rho_prime)
    if not enr:
        return CubeReport(box, float(E), gap, False, float(kappa), False, None, 0)

    shell = out_shell_sites(box)
    shell_idx = box.index_of(shell)
    if eig is not None:
        g = (eig.vectors / (eig.values - E)) @ eig.vectors.conj().T
    else:
        shifted = sample.matrix - E * np.eye(sample.n, dtype=sample.matrix.dtype)
        g = lu_solve(lu_factor(shifted), np.eye(sample.n, dtype=shifted.dtype))

    if all_sources:
        src_sites = box.sites()
    else:
        src_sites = np.asarray([box.center], dtype=np.int64)
    src_idx = box.index_of(src_sites)

    worst = None
    worst_ratio = -np.inf
    n_checked = 0
    good = True
    for s_idx, s_site in zip(src_idx, src_sites):
        r = np.max(np.abs(shell - s_site), axis=1)
        keep = r >= 1
        attained = np.abs(g[shell_idx[keep], s_idx])
        allowed = decay_envelope(r[keep], kappa, weights.rho)
        n_checked += int(keep.sum())
        ratio = attained / allowed
        k = int(np.argmax(ratio))
        if ratio[k] > worst_ratio:
            worst_ratio = float(ratio[k])
            y = shell[keep][k]
            worst = (tuple(int(v) for v in y), float(attained[k]), float(allowed[k]))
        if (attained > allowed).any():
            good = False
    return CubeReport(box, float(E), gap, True, float(kappa), good, worst, n_checked)


def geometric_resolvent_residual(
    outer: OperatorSample, inner_box: Box, E: float, outer_greens: np.ndarray | None = None
) -> float:
    """Max deviation in the two-scale resolvent identity.

    For the inner-box center x and every y in the outer box outside the
    inner box,

        G_L(x, y) = - sum_{m in B_l} sum_{n in B_L \\ B_l}
                        G_l(x, m) H(m, n) G_L(n, y)

    with H the assembled outer matrix (its off-diagonal block is exactly
    epsilon times the hopping between the regions).  The identity is exact
    linear algebra, so the return value is numerical noise when the code is
    right.
    """
    if not outer.box.contains_box(inner_box) or inner_box.radius >= outer.box.radius:
        raise ValidationError("inner box must be strictly inside the outer box")
    inner = restrict(outer, inner_box)
    g_out = greens(outer, E) if outer_greens is None else outer_greens
    g_in = greens(inner, E)

    in_idx = outer.box.index_of(inner_box.sites())
    mask = np.ones(outer.n, dtype=bool)
    mask[in_idx] = False
    out_idx = np.nonzero(mask)[0]

    x_out = outer.box.index_of(inner_box.center)[0]
    x_in = inner_box.index_of(inner_box.center)[0]

    lhs = g_out[x_out, out_idx]
    coupling = outer.matrix[np.ix_(in_idx, out_idx)]
    rhs = -(g_in[x_in, :] @ coupling) @ g_out[np.ix_(out_idx, out_idx)]
    return float(np.max(np.abs(lhs - rhs)))
