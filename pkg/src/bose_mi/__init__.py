"""Entanglement and mutual information of free lattice bosons.

The package evaluates thermal states of non-interacting bosons on a ring
with nearest-neighbour, infinite-range or power-law hopping, and computes
subsystem entropies from truncated two-point correlation matrices.
"""

__version__ = "0.1.0"

from .analysis import ScalingFit, SweepRecord, SweepSpec, fit_log_scaling, run_sweep
from .correlation import (
    CorrelationMatrix,
    EntropyReport,
    RegimePrediction,
    analytic_mi_infinite_range,
    asymptotic_regime_mi,
    correlation_matrix,
    entropy_from_spectrum,
    mutual_information,
    spectrum,
)
from .dispersion import (
    DispersionTable,
    HoppingKind,
    HoppingModel,
    SmallKExpansion,
    dispersion_at,
    dispersion_table,
    dispersion_thermo_limit,
    small_k_expansion,
)
from .errors import (
    BoseMIError,
    ClassificationError,
    ConvergenceError,
    DomainError,
    InsufficientDataError,
    ModeIndexError,
    PartitionError,
    PositivityError,
    TailMassError,
)
from .special import SeriesControl, bose_einstein_F, gamma_fn, polylog_g, zeta
from .thermo import (
    GrandCanonicalState,
    TcMethod,
    TcResult,
    condensate_at_tc,
    condensate_at_tc_asymptotic,
    delta_mu,
    has_finite_tc,
    solve_mu,
    tc_infinite_range,
    tc_long_range,
    thermal_entropy,
)
from .zero_temperature import (
    SchmidtSpectrum,
    entanglement_entropy_exact,
    entropy_gaussian_asymptotic,
    entropy_poisson_asymptotic,
    poisson_entropy_exact,
    poisson_spectrum,
    schmidt_spectrum,
)
