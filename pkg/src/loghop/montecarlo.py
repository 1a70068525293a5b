"""Monte Carlo estimates with trial-keyed determinism.

Every trial draws its randomness from a counter-based key (seed, trial),
so results are a pure function of (config, seed, trials) and merging
per-block tallies in block order reproduces the serial run bitwise,
whatever the worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupling import COUNTEREXAMPLE, NOT_APPLICABLE, PASS, CouplingVerdict, coupling_check
from .disorder import DisorderSpec, sample_potential
from .errors import HypothesisError, ValidationError
from .geometry import Box
from .greens import classify_cube, eigenpairs
from .kernels import HoppingKernel
from .msa import MSAParams, next_scale
from .operator import assemble, draw
from .parallel import map_blocks, trial_blocks
from .weights import WeightParams, nr_threshold


def wilson_interval(hits: int, trials: int, z: float = 1.959963984540054) -> tuple:
    """95% score interval for a binomial proportion (z defaults to 97.5%)."""
    if trials <= 0:
        raise ValidationError(f'violates "trials > 0": trials={trials}')
    p = hits / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    # the boundary cases are exactly 0 and 1; float cancellation is not
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass
class WegnerReport:
    L: int
    d: int
    energy: float
    eps: float
    trials: int
    hits: int
    frequency: float
    ci: tuple
    bound: float
    within_bound: bool


def _wegner_block(args) -> int:
    (lo, hi), box, spec, E, eps, seed, epsilon, kernel = args
    hits = 0
    for t in range(lo, hi):
        v = sample_potential(box, spec, seed, t)
        if epsilon == 0.0 or kernel is None:
            dist = float(np.min(np.abs(v - E)))
        else:
            w = np.linalg.eigvalsh(assemble(box, v, epsilon, kernel).matrix)
            dist = float(np.min(np.abs(w - E)))
        hits += dist <= eps
    return hits


def wegner_bound(spec: DisorderSpec, L: int, d: int, eps: float) -> float:
    """beta^{-1} 2^lam (2L+1)^{d(1+lam)} eps^lam."""
    return (2.0**spec.lam) * (2 * L + 1) ** (d * (1 + spec.lam)) * eps**spec.lam / spec.beta


def wegner_check(
    L: int,
    E: float,
    eps: float,
    spec: DisorderSpec,
    d: int,
    trials: int,
    seed: int,
    workers: int = 1,
    epsilon: float = 0.0,
    kernel: HoppingKernel | None = None,
) -> WegnerReport:
    """Monte Carlo frequency of a spectral near-hit vs the analytic bound.

    The regularity hypothesis requires eps (2L+1)^d <= beta0 and a
    continuous single-site law; Bernoulli draws are refused.
    """
    if trials < 1:
        raise ValidationError(f'violates "trials >= 1": trials={trials}')
    if not spec.is_continuous:
        raise HypothesisError("single-site law is not Holder continuous (atomic)")
    if eps * (2 * L + 1) ** d > spec.beta0:
        raise HypothesisError(
            f'violates "eps (2L+1)^d <= beta0": {eps * (2 * L + 1) ** d:.3g} > {spec.beta0}'
        )
    box = Box((0,) * d, L)
    jobs = [(b, box, spec, E, eps, seed, epsilon, kernel) for b in trial_blocks(trials)]
    hits = int(sum(map_blocks(_wegner_block, jobs, workers)))
    freq = hits / trials
    bound = wegner_bound(spec, L, d, eps)
    return WegnerReport(
        L, d, float(E), float(eps), trials, hits, freq,
        wilson_interval(hits, trials), bound, freq <= bound,
    )


@dataclass
class PairResonanceReport:
    L: int
    l: int
    d: int
    threshold: float
    trials: int
    hits: int
    frequency: float
    ci: tuple
    bound: float
    vacuous: bool  # bound exceeds 1: satisfied by any frequency, reported honestly
    within_bound: bool


def _pair_block(args) -> int:
    (lo, hi), box, spec, threshold, seed, epsilon, kernel, identical = args
    hits = 0
    for t in range(lo, hi):
        t2 = 2 * t if identical else 2 * t + 1
        va = sample_potential(box, spec, seed, 2 * t)
        vb = sample_potential(box, spec, seed, t2)
        if epsilon == 0.0 or kernel is None:
            wa, wb = np.sort(va), np.sort(vb)
        else:
            wa = np.linalg.eigvalsh(assemble(box, va, epsilon, kernel).matrix)
            wb = np.linalg.eigvalsh(assemble(box, vb, epsilon, kernel).matrix)
        pos = np.clip(np.searchsorted(wa, wb), 1, len(wa) - 1)
        dist = np.minimum(np.abs(wb - wa[pos - 1]), np.abs(wb - wa[pos])).min()
        hits += dist <= threshold
    return hits


def pair_resonance_check(
    L: int,
    l: int,
    spec: DisorderSpec,
    d: int,
    weights: WeightParams,
    trials: int,
    seed: int,
    workers: int = 1,
    epsilon: float = 0.0,
    kernel: HoppingKernel | None = None,
    identical_draws: bool = False,
) -> PairResonanceReport:
    """Frequency of spectra of two independent cubes nearly colliding.

    Compares against 2 beta^{-1} 4^lam (2L+1)^{d(4+lam)} e^{-lam log^{rho'} l},
    which is typically vacuous (> 1) at desk scales; the report says so
    rather than hiding it.  identical_draws reuses one potential for both
    cubes as a diagnostic; the frequency is then 1 by construction.
    """
    if trials < 1:
        raise ValidationError(f'violates "trials >= 1": trials={trials}')
    if 26 * l > L:
        raise ValidationError(f'violates "26 l <= L": l={l}, L={L}')
    if not spec.is_continuous:
        raise HypothesisError("single-site law is not Holder continuous (atomic)")
    threshold = 2.0 * nr_threshold(L, weights.rho_prime)
    box = Box((0,) * d, L)
    jobs = [
        (b, box, spec, threshold, seed, epsilon, kernel, identical_draws)
        for b in trial_blocks(trials)
    ]
    hits = int(sum(map_blocks(_pair_block, jobs, workers)))
    bound = (
        2.0
        * (4.0**spec.lam)
        * (2 * L + 1) ** (d * (4 + spec.lam))
        * math.exp(-spec.lam * math.log(l) ** weights.rho_prime)
        / spec.beta
    )
    freq = hits / trials
    return PairResonanceReport(
        L, l, d, threshold, trials, hits, freq,
        wilson_interval(hits, trials), bound, bound > 1.0, freq <= bound,
    )


@dataclass
class BadPairReport:
    L: int
    d: int
    kappa: float
    energies: tuple
    trials: int
    hits: int
    frequency: float | None
    ci: tuple | None
    no_data: bool

    def merged_with(self, other: "BadPairReport") -> "BadPairReport":
        """Pool tallies from a disjoint trial range; exact, order-free."""
        if (self.L, self.d, self.kappa, self.energies) != (
            other.L, other.d, other.kappa, other.energies,
        ):
            raise ValidationError("cannot merge estimates from different configurations")
        trials = self.trials + other.trials
        hits = self.hits + other.hits
        if trials == 0:
            return BadPairReport(
                self.L, self.d, self.kappa, self.energies, 0, 0, None, None, True
            )
        return BadPairReport(
            self.L, self.d, self.kappa, self.energies, trials, hits,
            hits / trials, wilson_interval(hits, trials), False,
        )


def _bad_pair_block(args) -> int:
    (lo, hi), box, spec, epsilon, kernel, kappa, energies, weights, seed = args
    hits = 0
    for t in range(lo, hi):
        sa = draw(box, spec, epsilon, kernel, seed, 2 * t)
        sb = draw(box, spec, epsilon, kernel, seed, 2 * t + 1)
        ea, eb = eigenpairs(sa), eigenpairs(sb)
        for E in energies:
            if classify_cube(sa, E, kappa, weights, eig=ea).good:
                continue
            if not classify_cube(sb, E, kappa, weights, eig=eb).good:
                hits += 1
                break
    return hits


def estimate_bad_pair_prob(
    L: int,
    kappa: float,
    energies,
    spec: DisorderSpec,
    epsilon: float,
    kernel: HoppingKernel,
    weights: WeightParams,
    d: int,
    trials: int,
    seed: int,
    workers: int = 1,
    trial_offset: int = 0,
) -> BadPairReport:
    """Frequency of: some grid energy makes two independent cubes both bad.

    The exists-E event over an interval is approximated from below by the
    finite grid; the two cubes use disjoint trial sub-streams, standing in
    for far-apart boxes of one lattice.
    """
    energies = tuple(float(e) for e in np.atleast_1d(energies))
    if not energies:
        raise ValidationError("energy grid must be nonempty")
    box = Box((0,) * d, L)
    if trials == 0:
        return BadPairReport(L, d, float(kappa), energies, 0, 0, None, None, True)
    jobs = [
        (b, box, spec, epsilon, kernel, kappa, energies, weights, seed)
        for b in trial_blocks(trials, trial_offset)
    ]
    hits = int(sum(map_blocks(_bad_pair_block, jobs, workers)))
    return BadPairReport(
        L, d, float(kappa), energies, trials, hits,
        hits / trials, wilson_interval(hits, trials), False,
    )


@dataclass
class CouplingScanReport:
    l: int
    L: int
    d: int
    kappa: float
    energy: float
    trials: int
    n_pass: int
    n_counterexample: int
    n_not_applicable: int
    tightest_counts: dict  # hypothesis name -> how often it had the least slack
    counterexamples: tuple  # trial indices, for post-mortems


def _coupling_block(args) -> list:
    (lo, hi), box, spec, epsilon, kernel, E, l, kappa, params, seed = args
    out = []
    for t in range(lo, hi):
        sample = draw(box, spec, epsilon, kernel, seed, t)
        v = coupling_check(sample, E, l, kappa, params)
        out.append((t, v.status, v.tightest))
    return out


def coupling_scan(
    l: int,
    E: float,
    kappa: float,
    params: MSAParams,
    spec: DisorderSpec,
    epsilon: float,
    kernel: HoppingKernel,
    trials: int,
    seed: int,
    workers: int = 1,
) -> CouplingScanReport:
    """Randomized suite over disorder draws; counts verdicts per status."""
    L = next_scale(l, params.alpha)
    box = Box((0,) * params.d, L)
    jobs = [
        (b, box, spec, epsilon, kernel, E, l, kappa, params, seed)
        for b in trial_blocks(trials)
    ]
    rows = [r for block in map_blocks(_coupling_block, jobs, workers) for r in block]
    statuses = [s for _, s, _ in rows]
    tightest: dict = {}
    for _, _, name in rows:
        tightest[name] = tightest.get(name, 0) + 1
    return CouplingScanReport(
        l, L, params.d, float(kappa), float(E), trials,
        statuses.count(PASS),
        statuses.count(COUNTEREXAMPLE),
        statuses.count(NOT_APPLICABLE),
        tightest,
        tuple(t for t, s, _ in rows if s == COUNTEREXAMPLE),
    )


__all__ = [
    "wilson_interval",
    "WegnerReport",
    "wegner_check",
    "wegner_bound",
    "PairResonanceReport",
    "pair_resonance_check",
    "BadPairReport",
    "estimate_bad_pair_prob",
    "CouplingScanReport",
    "coupling_scan",
    "CouplingVerdict",
]
