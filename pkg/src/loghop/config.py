"""TOML run configuration.

Four blocks: [model] (kernel, disorder, epsilon, d), [geometry] (L, l,
alpha), [msa] (p, kappa0, kappa_inf, rho, rho_prime, energy interval, grid
points), [execution] (seeds, trials, workers, out).  All parameter-range
rules are re-validated on load through the domain constructors, so
rejection messages quote the violated constraint.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .disorder import DisorderSpec
from .errors import ValidationError
from .kernels import LOG_POWER, TABLE, HoppingKernel
from .msa import MSAParams
from .weights import WeightParams


@dataclass
class RunConfig:
    kernel: HoppingKernel
    disorder: DisorderSpec
    epsilon: float
    d: int
    L: int
    l: int
    alpha: float
    weights: WeightParams
    msa: MSAParams
    energy_interval: tuple
    grid_points: int
    seeds: tuple
    trials: int
    workers: int
    out: str | None
    hash: str

    @property
    def energy_grid(self) -> list:
        lo, hi = self.energy_interval
        if self.grid_points == 1:
            return [0.5 * (lo + hi)]
        step = (hi - lo) / (self.grid_points - 1)
        return [lo + k * step for k in range(self.grid_points)]


def _require(block: dict, key: str, where: str):
    if key not in block:
        raise ValidationError(f"missing key {key!r} in [{where}]")
    return block[key]


def _kernel_from(block: dict) -> HoppingKernel:
    kind = _require(block, "kind", "model.kernel")
    if kind == TABLE:
        entries = _require(block, "entries", "model.kernel")
        table: dict = {}
        for e in entries:
            off = tuple(int(v) for v in e["offset"])
            val = complex(e.get("value", 0.0), e.get("imag", 0.0))
            table[off] = val
            neg = tuple(-v for v in off)
            if neg not in table:
                table[neg] = val.conjugate()
        return HoppingKernel(TABLE, table=table, amplitude=block.get("amplitude", 1.0))
    phase = block.get("phase")
    return HoppingKernel(
        kind,
        gamma=block.get("gamma"),
        rho=block.get("rho"),
        s=block.get("s"),
        phase_vector=tuple(phase) if phase is not None else None,
        amplitude=block.get("amplitude", 1.0),
    )


def _disorder_from(block: dict) -> DisorderSpec:
    return DisorderSpec(
        kind=_require(block, "kind", "model.disorder"),
        M=block.get("M", 1.0),
        lam=block.get("lambda", 1.0),
        beta=block.get("beta", 1.0),
        beta0=block.get("beta0", 1.0),
        p=block.get("p", 0.5),
        table=tuple(block["table"]) if "table" in block else None,
    )


def load_config(path) -> RunConfig:
    raw = Path(path).read_bytes()
    data = tomllib.loads(raw.decode("utf-8"))

    model = data.get("model", {})
    geometry = data.get("geometry", {})
    msa_block = data.get("msa", {})
    execution = data.get("execution", {})

    kernel = _kernel_from(_require(model, "kernel", "model"))
    disorder = _disorder_from(_require(model, "disorder", "model"))
    d = int(_require(model, "d", "model"))
    epsilon = float(model.get("epsilon", 0.0))

    L = int(_require(geometry, "L", "geometry"))
    l = int(_require(geometry, "l", "geometry"))
    alpha = float(_require(geometry, "alpha", "geometry"))

    rho = msa_block.get("rho", kernel.rho)
    if rho is None:
        raise ValidationError("msa.rho is required when the kernel has no rho of its own")
    if kernel.kind == LOG_POWER and kernel.rho is not None and rho != kernel.rho:
        raise ValidationError(
            f"msa.rho={rho} disagrees with the kernel rho={kernel.rho}"
        )
    gamma = kernel.gamma if kernel.gamma is not None else msa_block.get("gamma")
    if gamma is None:
        raise ValidationError("a gamma is required (kernel gamma or msa.gamma)")
    weights = WeightParams(
        gamma=float(gamma),
        rho=float(rho),
        rho_prime=float(_require(msa_block, "rho_prime", "msa")),
    )
    msa = MSAParams(
        alpha=alpha,
        p=float(_require(msa_block, "p", "msa")),
        d=d,
        weights=weights,
        kappa0=float(_require(msa_block, "kappa0", "msa")),
        kappa_inf=float(_require(msa_block, "kappa_inf", "msa")),
        alt_constant=bool(msa_block.get("alt_constant", False)),
    )

    interval = msa_block.get("energy_interval", [0.0, 0.0])
    if len(interval) != 2 or interval[0] > interval[1]:
        raise ValidationError(f'violates "E_lo <= E_hi": energy_interval={interval}')

    seeds = execution.get("seeds", [execution.get("seed", 0)])
    return RunConfig(
        kernel=kernel,
        disorder=disorder,
        epsilon=epsilon,
        d=d,
        L=L,
        l=l,
        alpha=alpha,
        weights=weights,
        msa=msa,
        energy_interval=(float(interval[0]), float(interval[1])),
        grid_points=int(msa_block.get("grid_points", 41)),
        seeds=tuple(int(s) for s in seeds),
        trials=int(execution.get("trials", 100)),
        workers=int(execution.get("workers", 1)),
        out=execution.get("out"),
        hash=config_hash(data),
    )


def config_hash(data: dict) -> str:
    """Stable digest of the parsed config content."""
    canon = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]
