"""Pseudo-spectral solver and numerical-verification toolkit for the
periodic dispersion-generalized Benjamin-Ono equation."""

__version__ = "0.1.0"

from .spectral import (
    TorusGrid,
    SpectralField,
    to_spectral,
    from_spectral,
    apply_multiplier,
    product_dealiased,
)
from .littlewood_paley import (
    BumpProfile,
    DEFAULT_BUMP,
    chi,
    chi_k,
    chi_le,
    chi_gt,
    eta_l,
    lp_project,
    lp_project_le,
    lp_project_gt,
    sobolev_norm,
)
from .dispersion import (
    DispersionSpec,
    fractional_bo,
    whitham_capillary,
    custom,
    omega,
    check_conditions,
    ConditionReport,
)
from .resonance import (
    FrequencyTriple,
    resonance,
    inv_resonance_gap,
    BoundCase,
    BoundCaseKind,
    symbol_eval,
    worst_constant,
    ConstantReport,
)
from .boxes import (
    BoxLab,
    BoxFunction,
    sample_box_function,
    multi_convolution_at_origin,
    convolution_at_origin,
    convolution_sweep,
    s_phi,
    ConvolutionReport,
)
from .solver import (
    SolverConfig,
    RunRecord,
    nonlinearity,
    step,
    solve,
    diagnostics,
    propagate_linear,
)
from .experiments import (
    ScenarioConfig,
    ScenarioReport,
    random_smooth_datum,
    packet_datum,
    run_scenario,
)
from .config import FullConfig, parse_config, serialize_config
from .errors import (
    DgboError,
    ConfigurationError,
    NumericError,
    DomainError,
    ResourceError,
    AdmissibilityError,
    BlowUpError,
)

__all__ = [name for name in dir() if not name.startswith("_")]
