"""Hopping kernels phi(x) and row-sum bounds on the hopping operator norm.

Three kinds: the log-power envelope exp(-gamma * log^rho(|x|+1)), the
stretched exponential exp(-|x|^s) with s in (0,1), and an explicit finite
table.  All are Hermitian-symmetric, vanish at x = 0 (the diagonal belongs
to the potential), and may carry a unimodular phase exp(i a.x) which keeps
the symmetry phi(-x) = conj(phi(x)) automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ValidationError

# Magnitudes below this are flushed to exact zero (subnormal cut-off).
FLUSH = 1e-300

LOG_POWER = "log-power"
STRETCHED = "stretched"
TABLE = "table"


@dataclass
class HoppingKernel:
    kind: str
    gamma: float | None = None
    rho: float | None = None
    s: float | None = None
    table: dict | None = None  # displacement tuple -> value
    phase_vector: tuple | None = None  # phi(x) *= exp(i * a.x)
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.kind == LOG_POWER:
            if self.gamma is None or not self.gamma > 0:
                raise ValidationError(f'violates "gamma > 0": gamma={self.gamma}')
            if self.rho is None or not self.rho > 1:
                raise ValidationError(f'violates "rho > 1": rho={self.rho}')
        elif self.kind == STRETCHED:
            if self.s is None or not 0 < self.s < 1:
                raise ValidationError(f'violates "s in (0,1)": s={self.s}')
        elif self.kind == TABLE:
            if not self.table:
                raise ValidationError("table kernel requires a nonempty table")
            self.table = {tuple(int(c) for c in k): complex(v) for k, v in self.table.items()}
            for disp, val in self.table.items():
                if all(c == 0 for c in disp):
                    raise ValidationError("table kernel must not carry a diagonal entry")
                mirror = tuple(-c for c in disp)
                if mirror not in self.table or abs(self.table[mirror] - val.conjugate()) > 1e-15:
                    raise ValidationError(
                        f"table breaks Hermitian symmetry phi(-x) = conj(phi(x)) at {disp}"
                    )
        else:
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValidationError(f'violates "amplitude in [0,1]": {self.amplitude}')
        if self.phase_vector is not None:
            self.phase_vector = tuple(float(a) for a in self.phase_vector)

    @property
    def is_complex(self) -> bool:
        if self.phase_vector is not None and any(a != 0.0 for a in self.phase_vector):
            return True
        if self.kind == TABLE:
            return any(v.imag != 0.0 for v in self.table.values())
        return False

    @property
    def radial(self) -> bool:
        """True when |phi| depends on the displacement only through |x|_inf."""
        return self.kind in (LOG_POWER, STRETCHED)

    def envelope(self, r):
        """|phi| at sup-norm radius r (scalar or array); radial kinds only."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.kind == LOG_POWER:
            out = self.amplitude * np.exp(-self.gamma * np.log1p(r) ** self.rho)
        elif self.kind == STRETCHED:
            out = self.amplitude * np.exp(-(r ** self.s))
        else:
            raise ValidationError("explicit-table kernel has no radial envelope")
        out = np.where(r == 0, 0.0, out)
        out[np.abs(out) < FLUSH] = 0.0
        return out


def kernel_eval(kernel: HoppingKernel, x):
    """phi(x) for one displacement; 0 at the origin and outside table support."""
    disp = tuple(int(c) for c in np.atleast_1d(x))
    if all(c == 0 for c in disp):
        return 0.0
    if kernel.kind == TABLE:
        val = kernel.table.get(disp, 0.0)
        val = kernel.amplitude * complex(val)
    else:
        r = max(abs(c) for c in disp)
        val = complex(kernel.envelope(np.array([r]))[0])
    if kernel.phase_vector is not None:
        val *= np.exp(1j * float(np.dot(kernel.phase_vector, disp)))
    if abs(val) < FLUSH:
        return 0.0
    return val if kernel.is_complex else val.real


def _shell_count(r, d: int):
    """Number of sites at sup-norm radius exactly r in Z^d."""
    r = np.asarray(r, dtype=float)
    return np.where(r == 0, 1.0, (2 * r + 1) ** d - (2 * r - 1) ** d)


def tail_row_sum(kernel: HoppingKernel, d: int, beyond: int) -> float:
    """Analytic upper bound on sum_{|x| > beyond} |phi(x)|.

    Bounds the shell count by 2d*3^(d-1)*(1+r)^(d-1) and compares the shell
    sum with an integral of the (checked decreasing) envelope.  The integral
    is evaluated after a change of variables that makes the integrand decay
    exponentially, so quadrature is reliable.
    """
    if kernel.kind == TABLE:
        tot = 0.0
        for disp, val in kernel.table.items():
            if max(abs(c) for c in disp) > beyond:
                tot += abs(val)
        return kernel.amplitude * tot
    if kernel.amplitude == 0.0:
        return 0.0
    R = max(int(beyond), 1)
    pref = 2 * d * 3 ** (d - 1) * kernel.amplitude
    if kernel.kind == LOG_POWER:
        g, rho = kernel.gamma, kernel.rho
        T = math.log1p(R)
        # decreasing beyond R needs gamma*rho*log^(rho-1)(1+R) > d
        if g * rho * T ** (rho - 1.0) <= d:
            raise ValidationError(
                f"tail bound needs a larger truncation radius: gamma*rho*log^(rho-1)(1+R)="
                f"{g * rho * T ** (rho - 1.0):.3g} <= d={d} at R={R}"
            )
        # substitute 1+r = e^t: integral of (1+r)^(d-1) e^(-g log^rho(1+r)) dr
        val, err = quad(lambda t: math.exp(d * t - g * t ** rho), T, math.inf)
    else:
        s = kernel.s
        if s * R ** s <= (d - 1):
            raise ValidationError(
                f"tail bound needs a larger truncation radius: s*R^s={s * R ** s:.3g} <= d-1 at R={R}"
            )
        # substitute u = r^s: integral of (1+r)^(d-1) e^(-r^s) dr
        val, err = quad(
            lambda u: (1.0 + u ** (1.0 / s)) ** (d - 1) * math.exp(-u) * u ** (1.0 / s - 1.0) / s,
            R ** s,
            math.inf,
        )
    return pref * (val + 10.0 * abs(err))


def gamma_norm_bound(kernel: HoppingKernel, d: int, radius: int = 10**4) -> float:
    """Upper bound on the hopping operator 2-norm via the translation row sum.

    Row sums of a translation-invariant kernel are all equal, so the Schur
    test gives |Gamma|_2 <= sum_x |phi(x)|; the sum is truncated at `radius`
    (by exact shell sums) and completed with the analytic tail bound.  The
    result is monotone nonincreasing in the truncation radius.
    """
    if radius < 1:
        raise ValidationError(f'violates "R >= 1": R={radius}')
    if kernel.kind == TABLE:
        return kernel.amplitude * float(sum(abs(v) for v in kernel.table.values()))
    if kernel.amplitude == 0.0:
        return 0.0
    rr = np.arange(1, radius + 1, dtype=float)
    truncated = float(np.sum(_shell_count(rr, d) * kernel.envelope(rr)))
    return truncated + tail_row_sum(kernel, d, radius)
