"""lcalim: exact and Monte Carlo verification of limit theorems for row
sums of triangular arrays on the torus, the p-adic integers and the
p-adic solenoid."""

from .groups import (
    Character,
    CompactSubgroup,
    DepthOverflowError,
    GroupElement,
    GroupId,
    GroupMismatchError,
    Neighborhood,
    add,
    annihilator_contains,
    arg_of,
    char_eval,
    character,
    cyclic_subgroup,
    from_angle,
    from_base_angle,
    from_digits,
    from_int,
    from_turns,
    full_subgroup,
    h_trunc,
    identity,
    in_nbhd,
    lambda_subgroup,
    local_inner,
    neg,
    padic_group,
    padic_metric,
    scale,
    solenoid_group,
    solenoid_lift,
    solenoid_project,
    torus_group,
    trivial_subgroup,
)
from .measures import (
    DiscreteMeasure,
    LevyMeasure,
    LimitLaw,
    QuadraticFormParam,
    compound_poisson_law,
    convolve,
    cpoisson_ft,
    cylinder_mass,
    dirac_law,
    discrete_measure,
    gauss_ft,
    gauss_law,
    genpoisson_ft,
    haar_law,
    limit_law,
    limit_law_ft,
    local_mean,
    measure_ft,
    point_mass,
    qform_eval,
    tail_mass_measure,
    validate_levy,
    zero_levy,
    zero_measure,
)
from .arrays import (
    BernoulliArray,
    GeneralArray,
    IIDSymmetricArray,
    Prediction,
    RademacherArray,
    RowDistribution,
    Schedule,
    bernoulli_rate,
    char_moment,
    constant,
    generating_subgroup,
    infinitesimality_stat,
    linear,
    power,
    predict_limit,
    row_dist,
    row_distribution,
    row_ft_exact,
    sum_cylinder,
    sum_local_means,
    sum_tail,
    sum_var_g,
    symmetric_stat,
    table,
)
from .verify import (
    ConfigError,
    ConvergenceReport,
    EquivalenceReport,
    TrendVerdict,
    VerifySettings,
    check_theorem,
    compound_growth,
    crosscheck_gensym2,
    default_characters,
    default_neighborhoods,
    ft_sup_distance,
    trend_classify,
)
from .sampling import (
    EmpiricalFT,
    SeededStream,
    derive_seed,
    empirical_ft,
    empirical_law_ft,
    sample_limit_law,
    sample_row_sum,
)

__version__ = "0.1.0"
