"""Random completely multiplicative functions: exact dependence, moment and limit computations."""

from rmflab.arith import (
    ExponentVector,
    SpfTable,
    build_spf,
    factorize,
    mu_power_divisor,
    multiplicative_stats,
    power_free_part,
    rough_part,
)
from rmflab.counting import (
    MomentCountReport,
    QuadrupleSolution,
    family_quadruples,
    fourth_moment_counts,
    moment_2q_nontrivial,
    ratio_property_check,
    second_moment_exact_roots,
    second_moment_exact_uniform,
    u_family,
)
from rmflab.dependence import (
    DependenceWitness,
    KernelBasis,
    WitnessModQ,
    find_dependence_roots,
    find_dependence_uniform,
    integer_kernel,
    scan_dependences_roots,
    scan_dependences_uniform,
    valuation_matrix,
    value_order,
    verify_witness,
)
from rmflab.errors import ResourceLimitError, UnsupportedDistributionError
from rmflab.halasz import HalaszReport, LimitClassification, classify_limit, halasz_M, rate_fit
from rmflab.simulate import (
    FiniteAtoms,
    MultSample,
    UniformContinuous,
    UniformRoots,
    empirical_fourier,
    empirical_mean,
    mean_abs_partial_sum,
    partial_sum_products,
    pattern_counts,
    sample_function,
)

__version__ = "0.1.0"
