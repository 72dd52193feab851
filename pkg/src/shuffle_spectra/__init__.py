"""Spectrum, mixing bounds and simulation for the one-sided k-transposition
shuffle on n cards.

The formula spectrum is indexed by standard Young tableaux; a brute-force
transition-matrix oracle validates it at small n, curve evaluators turn the
spectrum into squared-l2 / TV bounds, and a seeded Monte Carlo layer
estimates mixing behaviour at larger n.
"""

__version__ = "0.1.0"

from .combinatorics import (
    EMPTY_PARTITION,
    GrowthSequence,
    Partition,
    count_by_t21,
    dim_square_mass,
    dimension,
    enumerate_growth_sequences,
    enumerate_partitions,
)
from .errors import (
    DomainError,
    NumericError,
    ResourceLimitError,
    ShuffleSpectraError,
)
from .scalars import XFloat, format_scalar, rel_close
from .spectrum import (
    NuCache,
    NuKey,
    eigenvalue,
    f_decomposition,
    first_row_hook_eig,
    nu,
    nu_component,
    nu_closed_a1,
    nu_closed_a2_flat,
    nu_closed_u0,
    raven_bound,
    spectrum_table,
    t_arrow,
)
from .chain import (
    compare_spectra,
    exact_distances,
    oracle_spectrum,
    step_distribution,
    transition_matrix,
)
from .mixing import (
    DistanceCurve,
    ThresholdSet,
    l2_lower_sq,
    l2_upper_sq,
    l2_upper_sq_bounded,
    thresholds,
    tv_lower_asymptotic,
)
from .montecarlo import (
    Estimate,
    SimConfig,
    empirical_tmix,
    sample_generator,
    tv_lower_estimate,
    u_bn,
    untouched_statistic,
)
