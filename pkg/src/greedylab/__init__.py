"""Greedy-type constants and inequality checks for finite basis models."""
from .analysis import (
    ConstantReport,
    Estimate,
    VectorFamily,
    check_rho_admissibility,
    compute_report,
    estimate_Ca,
    estimate_Cq,
    estimate_Csg,
    estimate_Cu,
    estimate_democracies,
    extremal_vectors,
    sigma_m,
    sigma_tilde_m,
    sigma_tilde_w,
    sigma_w,
)
from .chebyshev import ChebyshevResult, chebyshev_greedy_sum, chebyshev_min, chebyshev_oracle
from .greedy import all_greedy_sets, greedy_set, greedy_sum, natural_greedy_ordering, truncate
from .spaces import (
    IndexSet,
    NormModel,
    SignPattern,
    Vector,
    basis_constants,
    coordinate,
    norm,
    parse_space,
    partial_sum,
    project,
    schauder_constant,
    sign_indicator,
)
from .verifier import InequalityCheck, SuiteConfig, default_suite, load_suite, run_suite
from .weights import Weight, WeightRegime, classify_regime, measure, parse_weight, subsets_with_measure_at_most

__version__ = "0.1.0"
