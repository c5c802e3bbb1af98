"""Active-variable truncation and changing-dimension approximation.

A library plus CLI for approximation in weighted tensor-product Hilbert
spaces whose product weights ``d^{-|u|}`` penalize high interaction orders.
It computes certified interaction-truncation levels, builds and prices the
changing-dimension algorithm, enumerates the sorted tensor eigenvalues that
drive the spectral-optimal algorithm, and fits empirical tractability
regimes to priced complexity grids.
"""

from .cda import (
    ApplyResult,
    CdaApplier,
    CdaPlan,
    apply_plan,
    build_plan,
    price_plan,
    r_growth_bounds,
)
from .cost import (
    ComplexityReport,
    CostModel,
    complexity_curve,
    eval_cost,
    tractability_classify,
)
from .errors import ActiveVarsError
from .harness import (
    GOLDEN_MAJORANT_CEILINGS,
    RunConfig,
    majorant_table,
    make_test_function,
    mc_l2_error,
    mean_function,
    random_function,
    single_subset_function,
    table_check,
)
from .optimal import (
    TensorEigenStream,
    eigencount,
    eigenvalue_decay_bound,
    optimal_algorithm,
    power_sum_identity,
)
from .space import (
    AnovaFunction,
    Functional,
    SubsetIndex,
    act,
    anova_from_json,
    anova_to_json,
    embedding_norm_bound,
    embedding_norm_special,
    eval_pointwise,
    g_norm_exact,
    h_norm,
    weight,
)
from .spectrum import (
    KernelSpec,
    Spectrum,
    build_spectrum,
    custom_kernel,
    eval_eigenfunction,
    korobov_kernel,
    power_sum,
    spectrum_from_json,
    spectrum_to_json,
    wiener_kernel,
)
from .truncation import (
    TruncationReport,
    binomial_tail,
    factorial_majorant,
    orthogonal_level_bound,
    orthogonal_truncation_level,
    truncation_level,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveVarsError",
    "AnovaFunction",
    "ApplyResult",
    "CdaApplier",
    "CdaPlan",
    "ComplexityReport",
    "CostModel",
    "Functional",
    "GOLDEN_MAJORANT_CEILINGS",
    "KernelSpec",
    "RunConfig",
    "Spectrum",
    "SubsetIndex",
    "TensorEigenStream",
    "TruncationReport",
    "act",
    "anova_from_json",
    "anova_to_json",
    "apply_plan",
    "binomial_tail",
    "build_plan",
    "build_spectrum",
    "complexity_curve",
    "custom_kernel",
    "eigencount",
    "eigenvalue_decay_bound",
    "embedding_norm_bound",
    "embedding_norm_special",
    "eval_cost",
    "eval_eigenfunction",
    "eval_pointwise",
    "factorial_majorant",
    "g_norm_exact",
    "h_norm",
    "korobov_kernel",
    "majorant_table",
    "make_test_function",
    "mc_l2_error",
    "mean_function",
    "optimal_algorithm",
    "orthogonal_level_bound",
    "orthogonal_truncation_level",
    "power_sum",
    "power_sum_identity",
    "price_plan",
    "r_growth_bounds",
    "random_function",
    "single_subset_function",
    "spectrum_from_json",
    "spectrum_to_json",
    "table_check",
    "tractability_classify",
    "truncation_level",
    "weight",
    "wiener_kernel",
]
