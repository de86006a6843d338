"""Discrete fractional Laplacian on Z^d: Riesz kernels, Hardy weights and criticality."""

from .criticality import (
    Criticality,
    ScanReport,
    classify,
    null_sequence_energy,
    null_sequence_report,
    scan,
    shell_exponent,
    summability_partial,
    weight_ratio_at_infinity,
)
from .hardy import (
    HardyParams,
    HardyTables,
    alpha0,
    build_hardy_tables,
    hardy_deficit,
    hardy_weight,
    optimal_constant,
    psi,
    psi_log_derivative,
)
from .heat import heat_kernel, heat_kernel_1d, heat_kernel_table_1d
from .lattice import ModelParams, ParameterError
from .operator import (
    LatticeFunction,
    apply_frac_laplacian,
    green_apply,
    green_kernel,
    ground_state_residual,
    quadratic_form,
)
from .riesz import (
    CoverageError,
    KernelTable,
    QuadratureFailure,
    QuadratureSpec,
    build_table,
    riesz,
    riesz_asymptotic,
    riesz_asymptotic_constant,
    riesz_many,
    total_mass,
)

__version__ = "0.1.0"
