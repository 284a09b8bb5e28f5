"""Bicluster estimation by squared-residue minimization with exact
post-selection tests (truncated chi for known variance, truncated F for
unknown variance) and a reproducible Monte-Carlo harness."""

from ._rng import SeededRng
from .backend import BACKEND
from .core import (
    BlockMeans,
    BlockStructure,
    BlockSums,
    DataMatrix,
    DataVector,
    block_mean_mle,
    block_sums,
    devectorize,
    load_matrix_csv,
    materialize_projection,
    projected_quadratic,
    save_matrix_csv,
    squared_residue,
    vectorize,
)
from .enumeration import count_structures, iter_structures
from .estimate import (
    CoolingSchedule,
    EstimateResult,
    exact_minimizer,
    log_schedule_constant,
    sa_minimizer,
    tan_witten_minimizer,
)
from .harness import (
    ScenarioConfig,
    Summary,
    TrialRecord,
    generate_trial,
    make_config,
    mean_vector,
    null_memberships,
    read_records_csv,
    run_scenario,
    summarize,
    write_records_csv,
)
from .inference import (
    Decomposition,
    DegenerateSignalError,
    FTestPieces,
    QuadCoeffs,
    TruncationResult,
    decompose,
    exact_truncation,
    naive_p_value,
    sa_truncation,
    selective_p_value,
    truncated_f_p_value,
    truncation_coeffs,
    unknown_variance_statistic,
    unknown_variance_truncation,
)
from .specfun import (
    chi_cdf,
    f_cdf,
    f_quantile,
    gaussian_sample,
    ks_uniform_statistic,
    reg_inc_beta,
    reg_lower_gamma,
)

__version__ = "0.1.0"
