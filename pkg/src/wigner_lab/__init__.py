"""wigner-lab: Monte Carlo spectral statistics for Hermitian Wigner matrices.

Samples Wigner ensembles, computes local eigenvalue statistics (interval-hit
probabilities, density of states down to microscopic scales, gap tails,
eigenvector norms, two-point correlations, resolvent decompositions, inverse
overlap moments), and checks them against closed-form values and exact
small-instance oracles.
"""

__version__ = "0.1.0"

from .distributions import (
    Bernoulli,
    EntryDistribution,
    Gaussian,
    ScoreIntegral,
    SmoothedBernoulli,
    Uniform,
    make_builtin,
    sample,
    score_integral,
)
from .ensemble import (
    EnsembleSpec,
    GueLogDensity,
    WignerMatrix,
    entry_stream_positions,
    gue_log_joint_density,
    gue_log_normalization,
    gue_spec,
    read_matrix,
    sample_matrix,
    write_matrix,
)
from .errors import (
    DegenerateSelectionError,
    EigensolverError,
    HypothesisError,
    InvalidSpecError,
    NoDensityError,
    WignerLabError,
)
from .inverse_moments import (
    InverseMomentQuery,
    build_frame,
    estimate_inverse_moment,
    gaussian_oracle,
    inverse_moment_grid,
    inverse_moment_study,
)
from .report import StatReport, RunManifest, write_csv, write_json
from .schur import (
    OmegaClassification,
    SchurDecomposition,
    cd_coefficients,
    classify_omega,
    classify_spectrum,
    decompose,
    delta_tail,
    denominator_parts,
    resolvent_from_decomposition,
    schur_diagonal,
    schur_identity_check,
)
from .spectral import (
    DOSQuery,
    SpectralSample,
    count_sorted,
    counting,
    dos_estimate,
    eigen_decompose,
    semicircle_cdf,
    semicircle_density,
)
from .universality import (
    CorrelationQuery,
    DelocQuery,
    deloc_statistic,
    normalized_lp_statistic,
    sine_kernel,
    sine_target,
    two_point_correlation,
)
from .wegner import GapStatistic, WegnerQuery, collect_gap_deltas, gap_tail, wegner_probability
