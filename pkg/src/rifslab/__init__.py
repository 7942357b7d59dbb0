"""Simulation and numerical analysis of random homogeneous self-similar sets."""

__version__ = "0.1.0"

from .coding import (
    CLT_MASS,
    CylinderMeasure,
    LevelStats,
    MnEstimate,
    cylinder_probability,
    estimate_mn_measure,
    level_stats,
    mn_membership,
    mn_statistic,
    sample_word,
)
from .content import (
    ContentTrace,
    ScaleGrid,
    WalkTrace,
    average_content,
    content_trace,
    divergence_summary,
    equicontractive_average_surrogate,
    equicontractive_walk,
)
from .core import (
    BudgetExceededError,
    IfsTuple,
    ModeMismatchError,
    PrefixCover,
    Realization,
    RifsDistribution,
    RifsError,
    Similarity,
    WordMismatchError,
    apply_word,
    composed_ratio,
    prefix_cover,
    sample_realization,
    validate_distribution,
)
from .dimension import (
    DimensionResult,
    almost_sure_dimension,
    expected_log_hutchinson,
    hutchinson_sum,
    is_almost_deterministic,
)
from .neighborhood import (
    IntervalUnion,
    SandwichBound,
    eps_neighborhood_measure_1d,
    monte_carlo_measure,
    sandwich_bounds,
    union_measure,
)
from .separation import (
    SeparatedSet,
    SeparationParams,
    build_separated_set,
    check_separation,
    mn_separated_points,
)
from .walk import (
    EnvelopeTrace,
    FrequencyParams,
    clt_diagnostic,
    excursion_check,
    frequency_p,
    lil_envelope,
)
