"""wickjet: exact-arithmetic Wick star products, formal Toeplitz operators
on jets of Kahler potentials, and a CP^1 closed-form cross-check oracle."""

from .coefficients import ComplexRational, Rat
from .errors import (
    DegreeWindowError,
    DimensionMismatch,
    PreconditionError,
    SolveError,
    TruncationMismatch,
    WickjetError,
)
from .jets import (
    CurvatureTensor,
    FunctionJets,
    PotentialJets,
    apply_normalization,
    curvature,
    flat_potential,
    fubini_study_potential,
    function_to_wick,
    k_normalize,
    random_real_analytic_potential,
    volume_log_jets,
    weight_series,
)
from .integrals import (
    WeightSeries,
    formal_integral,
    gaussian_moment,
    inner_product,
    projection,
    toeplitz_apply,
    toeplitz_symbol,
)
from .btrep import (
    BTContext,
    bt_coefficient,
    bt_star_eval,
    local_asymptotic_coeffs,
    rep_act,
    vacuum_reduce,
)
from .cp1 import (
    FactorialRational,
    RationalSymbol,
    ToeplitzMatrix,
    composition_residual,
    cp1_gram,
    cp1_inner,
    cp1_toeplitz,
    expand_at_infinity,
    fs_ratio_symbol,
    mobius_pullback,
    peak_section,
    symbol_jets,
)
from .series import HbarSeries, WickSeries, total_degree
from .suites import SUITES, SuiteReport, run_suite, run_suites
from .wick import (
    anti_fock_act,
    classical_exp,
    fock_act,
    star_exp,
    star_inverse,
    star_log,
    wick_star,
)

__all__ = [
    "ComplexRational",
    "Rat",
    "WickSeries",
    "HbarSeries",
    "total_degree",
    "wick_star",
    "fock_act",
    "anti_fock_act",
    "classical_exp",
    "star_exp",
    "star_log",
    "star_inverse",
    "WeightSeries",
    "gaussian_moment",
    "formal_integral",
    "inner_product",
    "toeplitz_symbol",
    "toeplitz_apply",
    "projection",
    "PotentialJets",
    "FunctionJets",
    "CurvatureTensor",
    "k_normalize",
    "apply_normalization",
    "volume_log_jets",
    "weight_series",
    "function_to_wick",
    "curvature",
    "flat_potential",
    "fubini_study_potential",
    "random_real_analytic_potential",
    "BTContext",
    "bt_star_eval",
    "bt_coefficient",
    "rep_act",
    "local_asymptotic_coeffs",
    "vacuum_reduce",
    "FactorialRational",
    "RationalSymbol",
    "ToeplitzMatrix",
    "cp1_inner",
    "cp1_gram",
    "cp1_toeplitz",
    "peak_section",
    "expand_at_infinity",
    "fs_ratio_symbol",
    "symbol_jets",
    "mobius_pullback",
    "composition_residual",
    "SuiteReport",
    "SUITES",
    "run_suite",
    "run_suites",
    "WickjetError",
    "DimensionMismatch",
    "TruncationMismatch",
    "DegreeWindowError",
    "PreconditionError",
    "SolveError",
]

__version__ = "0.1.0"
