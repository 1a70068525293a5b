"""Scale ladder and decay-exponent recursion, carried in the log domain.

The rigorous recursion only has small per-step losses once log L is of
order 10^3 or more, far beyond any box a matrix could realize.  The ladder
therefore works with logL as a real number and never materializes sites;
matrix experiments live in the Monte Carlo modules instead.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ScaleOverflowError, ValidationError
from .weights import WeightParams

_UINT63_LOG = 63 * math.log(2.0)


@dataclass
class MSAParams:
    alpha: float
    p: float
    d: int
    weights: WeightParams
    kappa0: float
    kappa_inf: float
    # κ-update constant: 30 + 2^rho by default; the alternative 30 + alpha^{rho'}
    # switches the recursion and the series bound together so the
    # iterated-vs-series comparison stays coherent.
    alt_constant: bool = False

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValidationError(f'violates "d >= 1": d={self.d}')
        if not self.p > 5 * self.d:
            raise ValidationError(f'violates "p > 5d": p={self.p}, d={self.d}')
        hi = 2 * self.p / (self.p + 2 * self.d)
        if not (1.25 < self.alpha < hi):
            raise ValidationError(
                f'violates "5/4 < alpha < 2p/(p+2d)": alpha={self.alpha}, upper={hi:.6g}'
            )
        g = self.weights.gamma
        if not (0 < self.kappa0 <= g / 5):
            raise ValidationError(
                f'violates "kappa0 in (0, gamma/5]": kappa0={self.kappa0}, gamma/5={g / 5}'
            )
        if not (0 < self.kappa_inf < self.kappa0):
            raise ValidationError(
                f'violates "0 < kappa_inf < kappa0": '
                f"kappa_inf={self.kappa_inf}, kappa0={self.kappa0}"
            )

    @property
    def update_constant(self) -> float:
        if self.alt_constant:
            return 30.0 + self.alpha**self.weights.rho_prime
        return 30.0 + 2.0**self.weights.rho


def next_scale(L: int, alpha: float) -> int:
    """floor(L^alpha), the integer scale jump."""
    if L < 2:
        raise ValidationError(f'violates "L >= 2": L={L}')
    if alpha < 1:
        raise ValidationError(f'violates "alpha >= 1": alpha={alpha}')
    if alpha * math.log(L) > _UINT63_LOG:
        raise ScaleOverflowError(
            f"L^alpha exceeds 2^63 at L={L}, alpha={alpha}; use the log-domain ladder"
        )
    out = math.floor(L**alpha)
    if out <= L:
        warnings.warn(f"degenerate scale step: floor({L}^{alpha}) = {out} <= {L}", stacklevel=2)
    return out


def step_loss(logL: float, params: MSAParams) -> float:
    """Per-step decay-exponent loss, evaluated from logL.

    Three terms: the out-shell geometry term 10 gamma / L^{4 alpha/5 - 1}
    (note 4 alpha/5 > 1 inside the admissible alpha range), the envelope
    chain term 10 gamma / log^{rho-1} L, and the resonance term
    C / log^{rho - rho'} L.
    """
    if logL <= 0:
        raise ValidationError(f'violates "logL > 0": logL={logL}')
    w = params.weights
    g = w.gamma
    power_term = 10.0 * g * math.exp(-(0.8 * params.alpha - 1.0) * logL)
    chain_term = 10.0 * g / logL ** (w.rho - 1.0)
    resonance_term = params.update_constant / logL ** (w.rho - w.rho_prime)
    return power_term + chain_term + resonance_term


def kappa_step(kappa: float, logL: float, params: MSAParams) -> float:
    return kappa - step_loss(logL, params)


@dataclass
class ScaleLadder:
    logL: list = field(default_factory=list)
    kappa: list = field(default_factory=list)
    valid: bool = False
    horizon: int = 0
    total_loss: float = 0.0
    series_bound: float = math.inf


def series_loss_bound(params: MSAParams, logL0: float) -> float:
    """Closed-form upper bound on the total loss along the whole ladder.

    The two log-power terms sum as geometric series with ratios
    alpha^{-(rho-1)} and alpha^{-(rho-rho')}.  The exponential term is
    dominated by a geometric series via alpha^s >= 1 + s(alpha - 1).
    """
    if logL0 <= 0:
        raise ValidationError(f'violates "logL0 > 0": logL0={logL0}')
    w = params.weights
    a = params.alpha
    g = w.gamma
    chain = (10.0 * g / logL0 ** (w.rho - 1.0)) / (1.0 - a ** -(w.rho - 1.0))
    resonance = (params.update_constant / logL0 ** (w.rho - w.rho_prime)) / (
        1.0 - a ** -(w.rho - w.rho_prime)
    )
    c = 0.8 * a - 1.0
    head = 10.0 * g * math.exp(-c * logL0)
    power = head / -math.expm1(-c * (a - 1.0) * logL0)
    return chain + resonance + power


def ladder(params: MSAParams, logL0: float, horizon: int) -> ScaleLadder:
    """Iterate the recursion for `horizon` steps from logL0.

    valid means every kappa along the way stays strictly above kappa_inf.
    The closed-form series bound rides along as a cross-check: the iterated
    total loss can never exceed it.
    """
    if horizon < 1:
        raise ValidationError(f'violates "horizon >= 1": horizon={horizon}')
    if logL0 <= 0:
        raise ValidationError(f'violates "logL0 > 0": logL0={logL0}')
    logs = [float(logL0)]
    kappas = [params.kappa0]
    for _ in range(horizon):
        kappas.append(kappa_step(kappas[-1], logs[-1], params))
        logs.append(params.alpha * logs[-1])
    valid = min(kappas) > params.kappa_inf
    total = params.kappa0 - kappas[-1]
    return ScaleLadder(logs, kappas, valid, horizon, total, series_loss_bound(params, logL0))


def min_valid_logL0(params: MSAParams, tol: float = 1e-9) -> float:
    """Smallest logL0 whose series-bounded total loss fits under kappa0 - kappa_inf.

    The series bound decreases in logL0, so bisection applies; tol is
    relative.
    """
    budget = params.kappa0 - params.kappa_inf
    lo, hi = 1.0, 2.0
    while series_loss_bound(params, hi) >= budget:
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError("no admissible starting scale below overflow")
    while series_loss_bound(params, lo) < budget and lo > 1e-300:
        lo /= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if series_loss_bound(params, mid) < budget:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * hi:
            break
    return hi


@dataclass
class InitialScaleConstants:
    zeta: float
    eta: float
    epsilon0: float
    L0: int
    gamma_norm: float


def initial_constants(
    beta: float, lam: float, p: float, d: int, L0: int, gamma_norm: float
) -> InitialScaleConstants:
    """Base-scale thresholds seeding the induction.

    zeta = (1/2) (beta^{-1} L0^p (2L0+1)^d)^{-1/lambda}, eta = zeta/2, and
    the coupling cap epsilon0 = min(zeta/(4 |Gamma|), zeta^2/(2 (2L0+1)^d)).
    """
    if min(beta, lam, p, gamma_norm) <= 0 or L0 < 1:
        raise ValidationError("all inputs must be positive (L0 >= 1)")
    if lam > 1:
        raise ValidationError(f'violates "lambda in (0, 1]": lambda={lam}')
    sites = float(2 * L0 + 1) ** d
    zeta = 0.5 * (L0**p * sites / beta) ** (-1.0 / lam)
    if not zeta < 0.5:
        raise ValidationError(f'violates "zeta < 1/2": zeta={zeta}')
    eps0 = min(zeta / (4.0 * gamma_norm), zeta**2 / (2.0 * sites))
    return InitialScaleConstants(zeta, zeta / 2.0, eps0, int(L0), float(gamma_norm))


def kappa_trajectory_floor(params: MSAParams, logL0: float) -> float:
    """Lower bound on every kappa_s: kappa0 minus the series bound."""
    return params.kappa0 - series_loss_bound(params, logL0)


def np_losses(params: MSAParams, logs) -> np.ndarray:
    """Vectorized per-step losses, for reports and plots."""
    return np.array([step_loss(x, params) for x in np.atleast_1d(logs)])
