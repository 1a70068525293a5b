"""Long-range hopping Anderson models with sub-exponential weights.

Finite-volume operators on integer lattices with hopping envelopes that
decay like exp(-gamma log^rho(1+r)), disorder sampling that is stable
under box restriction, resolvent and eigenvector diagnostics, and the
log-domain scale ladder that tracks decay rates across scales.
"""

from .errors import (
    DeskScaleError,
    HypothesisError,
    NearResonanceError,
    RefusalError,
    ScaleOverflowError,
    ValidationError,
)
from .weights import (
    WeightParams,
    QuasiMetricCertificate,
    decay_envelope,
    log_weight,
    nr_threshold,
    quasi_metric_constant,
    sup_norm,
    verify_quasi_metric,
)
from .kernels import LOG_POWER, STRETCHED, TABLE, HoppingKernel, tail_row_sum
from .geometry import (
    Box,
    DangerousCover,
    box_distance,
    chebyshev,
    cover_disjointness_check,
    dangerous_cover,
    out_shell_sites,
)
from .disorder import DisorderSpec, aux_generator, holder_check, sample_potential
from .operator import OperatorSample, assemble, draw, restrict
from .greens import (
    classify_cube,
    eigenpairs,
    geometric_resolvent_residual,
    greens,
    is_enr,
    resonance_distance,
    spectrum,
)
from .msa import (
    MSAParams,
    ScaleLadder,
    initial_constants,
    kappa_step,
    ladder,
    min_valid_logL0,
    next_scale,
    series_loss_bound,
    step_loss,
)
from .coupling import COUNTEREXAMPLE, NOT_APPLICABLE, PASS, CouplingVerdict, coupling_check
from .montecarlo import (
    coupling_scan,
    estimate_bad_pair_prob,
    pair_resonance_check,
    wegner_bound,
    wegner_check,
    wilson_interval,
)
from .localization import (
    decay_fit,
    decay_profile,
    eigen_decay_experiment,
    generalized_eigen_check,
    participation_ratio,
    poisson_residual,
)
from .config import RunConfig, config_hash, load_config

__version__ = "0.1.0"

__all__ = [
    "Box",
    "COUNTEREXAMPLE",
    "CouplingVerdict",
    "DangerousCover",
    "DeskScaleError",
    "DisorderSpec",
    "HoppingKernel",
    "HypothesisError",
    "LOG_POWER",
    "MSAParams",
    "NOT_APPLICABLE",
    "NearResonanceError",
    "OperatorSample",
    "PASS",
    "QuasiMetricCertificate",
    "RefusalError",
    "RunConfig",
    "STRETCHED",
    "ScaleLadder",
    "ScaleOverflowError",
    "TABLE",
    "ValidationError",
    "WeightParams",
    "assemble",
    "aux_generator",
    "box_distance",
    "chebyshev",
    "classify_cube",
    "config_hash",
    "coupling_check",
    "coupling_scan",
    "cover_disjointness_check",
    "dangerous_cover",
    "decay_envelope",
    "decay_fit",
    "decay_profile",
    "draw",
    "eigen_decay_experiment",
    "eigenpairs",
    "estimate_bad_pair_prob",
    "generalized_eigen_check",
    "geometric_resolvent_residual",
    "greens",
    "holder_check",
    "initial_constants",
    "is_enr",
    "kappa_step",
    "ladder",
    "load_config",
    "log_weight",
    "min_valid_logL0",
    "next_scale",
    "nr_threshold",
    "out_shell_sites",
    "pair_resonance_check",
    "participation_ratio",
    "poisson_residual",
    "quasi_metric_constant",
    "resonance_distance",
    "restrict",
    "sample_potential",
    "series_loss_bound",
    "spectrum",
    "step_loss",
    "sup_norm",
    "tail_row_sum",
    "verify_quasi_metric",
    "wegner_bound",
    "wegner_check",
    "wilson_interval",
]
