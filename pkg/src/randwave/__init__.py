"""Random-wave model on the flat torus: Haar block bases, concentration bounds
and quantum-unique-ergodicity experiments."""

from .concentration import (
    LargeDeviationParams,
    TailBoundReport,
    chernoff_lower_exponential_sum,
    chernoff_upper_exponential_sum,
    empirical_tail,
    gamma_tail_exact,
    large_deviation_bound,
    lln_decompose,
    quadratic_form,
)
from .que import (
    DeviationRecord,
    ErgodicAverageRecord,
    block_deviation_experiment,
    direct_matrix_coefficient,
    ergodic_average,
    matrix_coefficient,
    que_threshold,
    recentered_diagonal,
    summability_check,
)
from .randmat import (
    HaarUnitary,
    decompose_sphere_vector,
    sample_exponentials,
    sample_haar_unitary,
    sample_sphere_vector,
)
from .rng import make_rng
from .spectral import (
    Observable,
    ProjectedObservable,
    SpectralBlock,
    SpectralWindow,
    enumerate_block,
    observable_matrix,
    project,
    projected_eigenvalues,
    recenter,
    symbol_average,
    szego_moment,
    trivial_bound_check,
    weyl_count,
)

__version__ = "0.1.0"
