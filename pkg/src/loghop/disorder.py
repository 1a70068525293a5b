"""Disorder distributions and reproducible i.i.d. potential sampling.

The potential value at a lattice site depends only on (seed, trial, site),
never on the box it is sampled through, so restricting a field to a sub-box
and resampling the sub-box agree bitwise.  This is what makes resolvent
identities between nested boxes testable on a single disorder realization.

Sampling uses the Philox counter-based generator: the key encodes
(seed, trial) and the counter encodes the site, so parallel workers never
share stream state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .errors import ValidationError

_OFF = 1 << 63  # shifts signed coordinates into uint64 range
_MASK = (1 << 64) - 1

UNIFORM = "uniform"
POWER = "power"
BERNOULLI = "bernoulli"
TABLE = "table"

_KINDS = (UNIFORM, POWER, BERNOULLI, TABLE)


@dataclass
class DisorderSpec:
    """Single-site law with its declared Holder regularity (lam, beta, beta0).

    kind "uniform": uniform on [-M, M].
    kind "power": quantile u -> u**(1/lam) on [0, 1], CDF v -> v**lam.
    kind "bernoulli": atoms {-M, +M}, p = P(+M).  Not Holder continuous.
    kind "table": piecewise-linear quantile through equally spaced
    probability nodes, so the law is continuous with piecewise-constant
    density.
    """

    kind: str
    M: float = 1.0
    lam: float = 1.0
    beta: float = 1.0
    beta0: float = 1.0
    p: float = 0.5
    table: tuple | None = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown disorder kind {self.kind!r}, expected one of {_KINDS}")
        if not (self.M > 0 and np.isfinite(self.M)):
            raise ValidationError(f'violates "M > 0": M={self.M}')
        if not (0 < self.lam <= 1):
            raise ValidationError(f'violates "0 < lambda <= 1": lambda={self.lam}')
        if not (self.beta > 0 and np.isfinite(self.beta)):
            raise ValidationError(f'violates "beta > 0": beta={self.beta}')
        if not (self.beta0 > 0 and np.isfinite(self.beta0)):
            raise ValidationError(f'violates "beta0 > 0": beta0={self.beta0}')
        if self.kind == POWER and self.M < 1:
            raise ValidationError(
                f'power law is supported on [0, 1]; violates "M >= 1": M={self.M}'
            )
        if self.kind == BERNOULLI and not (0 <= self.p <= 1):
            raise ValidationError(f'violates "0 <= p <= 1": p={self.p}')
        if self.kind == TABLE:
            if self.table is None or len(self.table) < 2:
                raise ValidationError("table kind needs at least 2 quantile values")
            q = np.asarray(self.table, dtype=float)
            if not np.isfinite(q).all():
                raise ValidationError("table values must be finite")
            if (np.diff(q) <= 0).any():
                raise ValidationError("table values must be strictly increasing (continuous law)")
            if np.abs(q).max() > self.M:
                raise ValidationError(f'violates "supp within [-M, M]": M={self.M}')
            self.table = tuple(float(v) for v in q)

    @property
    def is_continuous(self) -> bool:
        return self.kind != BERNOULLI


def _potential_key(seed: int, trial: int) -> np.ndarray:
    # even sub-key: potential stream; odd sub-key: auxiliary stream
    return np.array([seed & _MASK, (2 * trial) & _MASK], dtype=np.uint64)


def aux_generator(seed: int, trial: int) -> Generator:
    """Auxiliary per-trial stream, disjoint from every potential stream."""
    key = np.array([seed & _MASK, (2 * trial + 1) & _MASK], dtype=np.uint64)
    return Generator(Philox(key=key, counter=np.zeros(4, dtype=np.uint64)))


def _row_uniforms(key: np.ndarray, prefix, start: int, n: int, d: int) -> np.ndarray:
    """Uniforms for n consecutive sites along the fastest coordinate.

    Counter layout: word 0 = fastest coordinate, words 1..2 = slower
    coordinates, word 3 = dimension tag.  Philox emits 4 words per counter
    block, so taking every 4th raw output walks the sites of the row.
    """
    counter = np.zeros(4, dtype=np.uint64)
    counter[0] = np.uint64((start + _OFF) & _MASK)
    for k, c in enumerate(prefix):
        counter[1 + k] = np.uint64((int(c) + _OFF) & _MASK)
    counter[3] = np.uint64(d)
    raw = Philox(key=key, counter=counter).random_raw(4 * n)[::4]
    return (raw >> np.uint64(11)) * 2.0**-53


def _box_uniforms(box, seed: int, trial: int) -> np.ndarray:
    d, L = box.dim, box.radius
    if d > 3:
        raise ValidationError(f'violates "d <= 3" (counter has 3 coordinate words): d={d}')
    if trial < 0:
        raise ValidationError(f'violates "trial >= 0": trial={trial}')
    key = _potential_key(seed, trial)
    side = 2 * L + 1
    start = box.center[-1] - L
    if d == 1:
        return _row_uniforms(key, (), start, side, d)
    prefix_axes = [range(c - L, c + L + 1) for c in box.center[:-1]]
    rows = np.empty((side ** (d - 1), side))
    idx = 0
    for prefix in np.stack(np.meshgrid(*prefix_axes, indexing="ij"), axis=-1).reshape(-1, d - 1):
        rows[idx] = _row_uniforms(key, prefix, start, side, d)
        idx += 1
    return rows.ravel()


def quantile(spec: DisorderSpec, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF transform of uniforms in [0, 1)."""
    u = np.asarray(u, dtype=float)
    if spec.kind == UNIFORM:
        return -spec.M + 2 * spec.M * u
    if spec.kind == POWER:
        return u ** (1.0 / spec.lam)
    if spec.kind == BERNOULLI:
        return np.where(u < spec.p, spec.M, -spec.M)
    nodes = np.linspace(0.0, 1.0, len(spec.table))
    return np.interp(u, nodes, np.asarray(spec.table))


def sample_potential(box, spec: DisorderSpec, seed: int, trial: int) -> np.ndarray:
    """I.i.d. potential over box sites, in the box's lexicographic order."""
    return quantile(spec, _box_uniforms(box, seed, trial))


def cdf(spec: DisorderSpec, v) -> np.ndarray:
    """Analytic CDF of the single-site law."""
    v = np.asarray(v, dtype=float)
    if spec.kind == UNIFORM:
        return np.clip((v + spec.M) / (2 * spec.M), 0.0, 1.0)
    if spec.kind == POWER:
        return np.clip(v, 0.0, 1.0) ** spec.lam
    if spec.kind == BERNOULLI:
        return np.where(v >= spec.M, 1.0, np.where(v >= -spec.M, 1.0 - spec.p, 0.0))
    q = np.asarray(spec.table)
    return np.interp(v, q, np.linspace(0.0, 1.0, len(q)), left=0.0, right=1.0)


def max_interval_mass(spec: DisorderSpec, width: float) -> float:
    """sup over a of mu([a, a + width]), computed from the analytic CDF."""
    if width < 0:
        raise ValidationError(f'violates "width >= 0": width={width}')
    if spec.kind == UNIFORM:
        return min(width / (2 * spec.M), 1.0)
    if spec.kind == POWER:
        # concave CDF: the heaviest window starts at the left endpoint
        return min(width, 1.0) ** spec.lam
    if spec.kind == BERNOULLI:
        if width >= 2 * spec.M:
            return 1.0
        return max(spec.p, 1.0 - spec.p)
    # piecewise-linear CDF: the sup is attained with a window edge at a knot
    q = np.asarray(spec.table)
    starts = np.concatenate([q, q - width])
    return float(np.max(cdf(spec, starts + width) - cdf(spec, starts)))


@dataclass
class HolderReport:
    kind: str
    lam: float
    beta: float
    widths: tuple
    masses: tuple
    bounds: tuple
    passed: bool
    first_violation: tuple | None  # (width, mass, bound)


def holder_check(spec: DisorderSpec, widths) -> HolderReport:
    """Check mu([a, b]) <= beta^{-1} (b - a)^lam at each grid width b - a.

    Widths beyond beta0 are outside the regularity hypothesis and rejected.
    A Bernoulli law fails at every width small enough to isolate an atom;
    the failure is reported, not raised.
    """
    ws = np.atleast_1d(np.asarray(widths, dtype=float))
    if (ws <= 0).any() or (ws > spec.beta0).any():
        raise ValidationError(f'violates "0 < width <= beta0": beta0={spec.beta0}')
    masses = np.array([max_interval_mass(spec, w) for w in ws])
    bounds = ws**spec.lam / spec.beta
    bad = np.nonzero(masses > bounds)[0]
    first = (float(ws[bad[0]]), float(masses[bad[0]]), float(bounds[bad[0]])) if bad.size else None
    return HolderReport(
        spec.kind,
        spec.lam,
        spec.beta,
        tuple(float(w) for w in ws),
        tuple(float(m) for m in masses),
        tuple(float(b) for b in bounds),
        bad.size == 0,
        first,
    )
