"""Finite-volume Hamiltonians: hopping restricted to a box plus i.i.d. diagonal.

Matrices are dense and Hermitian, indexed by the box's lexicographic site
ordering.  Assembly refuses beyond a desk-scale site cap; this is a
laboratory for scale-by-scale statements, not an HPC solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .disorder import DisorderSpec, sample_potential
from .errors import DeskScaleError, ValidationError
from .geometry import Box
from .kernels import HoppingKernel

DESK_SCALE_CAP = 20000


@dataclass
class OperatorSample:
    """One realization of the operator on a box.

    potential is aligned with box.sites(); matrix rows/columns use the same
    ordering.  seed and trial are None when the potential was supplied
    directly rather than drawn.
    """

    box: Box
    potential: np.ndarray
    epsilon: float
    kernel: HoppingKernel
    matrix: np.ndarray
    seed: int | None = None
    trial: int | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.matrix)


def _pairwise_radii(sites: np.ndarray) -> np.ndarray:
    """Chebyshev distance matrix, chunked to bound peak memory."""
    n = len(sites)
    r = np.empty((n, n), dtype=np.int64)
    step = max(1, 10**7 // max(1, n))
    for i in range(0, n, step):
        d = sites[i : i + step, None, :] - sites[None, :, :]
        r[i : i + step] = np.abs(d).max(axis=2)
    return r


def _radial_hopping(sites: np.ndarray, kernel: HoppingKernel) -> np.ndarray:
    r = _pairwise_radii(sites)
    table = kernel.envelope(np.arange(r.max() + 1))
    m = table[r]
    if kernel.phase_vector is not None:
        p = np.exp(1j * (sites @ np.asarray(kernel.phase_vector)))
        m = m * np.outer(p, p.conj())
        # numpy's vectorized complex multiply is not conjugate-commutative
        # (FMA), so mirror one triangle to keep Hermiticity exact
        il = np.tril_indices(len(sites), -1)
        m[il] = m.conj().T[il]
    return m


def _table_hopping(box: Box, sites: np.ndarray, kernel: HoppingKernel) -> np.ndarray:
    is_c = kernel.is_complex
    m = np.zeros((len(sites), len(sites)), dtype=complex if is_c else float)
    done = set()
    for off, val in kernel.table.items():
        neg = tuple(-c for c in off)
        if neg in done:
            continue
        done.add(off)
        val = kernel.amplitude * (val if is_c else val.real)
        if kernel.phase_vector is not None:
            val = val * np.exp(1j * float(np.dot(kernel.phase_vector, off)))
        targets = sites + np.asarray(off, dtype=np.int64)
        inside = box.contains_sites(targets)
        src = np.nonzero(inside)[0]
        dst = box.index_of(targets[inside])
        # H(j, k) = phi(x_j - x_k), so the stored value sits at (k + off, k);
        # both triangles come from one representative so Hermiticity is exact
        m[dst, src] = val
        m[src, dst] = np.conj(val)
    return m


def assemble(box: Box, potential, epsilon: float, kernel: HoppingKernel) -> OperatorSample:
    """H = epsilon * hopping + diag(potential) over the box sites."""
    if epsilon < 0:
        raise ValidationError(f'violates "epsilon >= 0": epsilon={epsilon}')
    if box.n_sites > DESK_SCALE_CAP:
        raise DeskScaleError(
            f"box has {box.n_sites} sites; dense assembly is capped at {DESK_SCALE_CAP}"
        )
    potential = np.asarray(potential, dtype=float)
    if potential.shape != (box.n_sites,):
        raise ValidationError(
            f"potential must cover all {box.n_sites} box sites, got shape {potential.shape}"
        )
    sites = box.sites()
    if kernel.radial:
        hop = _radial_hopping(sites, kernel)
    else:
        hop = _table_hopping(box, sites, kernel)
    m = epsilon * hop
    np.fill_diagonal(m, potential)
    return OperatorSample(box, potential, float(epsilon), kernel, m)


def draw(
    box: Box, spec: DisorderSpec, epsilon: float, kernel: HoppingKernel, seed: int, trial: int
) -> OperatorSample:
    """Sample a potential and assemble, recording the draw identity."""
    v = sample_potential(box, spec, seed, trial)
    out = assemble(box, v, epsilon, kernel)
    out.seed, out.trial = int(seed), int(trial)
    return out


def restrict(sample: OperatorSample, sub: Box) -> OperatorSample:
    """Operator on a sub-box of the same realization.

    Valid because hopping entries depend only on displacements: the sub-box
    matrix is exactly the principal submatrix over the sub-box sites.
    """
    if not sample.box.contains_box(sub):
        raise ValidationError(f"sub-box {sub} is not contained in {sample.box}")
    idx = sample.box.index_of(sub.sites())
    return OperatorSample(
        sub,
        sample.potential[idx],
        sample.epsilon,
        sample.kernel,
        sample.matrix[np.ix_(idx, idx)],
        sample.seed,
        sample.trial,
    )
