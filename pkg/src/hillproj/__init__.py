"""Spectral projections of Hill operators with distributional potentials.

The package builds truncated Fourier-basis matrices of -y'' + v y for
periodic, antiperiodic and Dirichlet boundary conditions, computes Riesz
spectral projections by contour quadrature, eigendecomposition and a
perturbation series, and aggregates them into decay, localization,
decomposition and inequality reports.
"""

from .analysis import (
    DecayReport,
    LemmaReport,
    LocalizationReport,
    ReconstructionReport,
    RhoStudyRow,
    decay_report,
    elementary_checks,
    hs_norm,
    lemma_sums,
    localization_report,
    reconstruct,
    rho_bound_study,
)
from .basis import (
    BoundaryCondition,
    MatrixLabel,
    OperatorMatrix,
    TruncationWindow,
    basis_indices,
    build_operator_matrix,
    build_v_matrix,
    build_w_matrix,
    kbar_w_kbar,
    r0_diag,
    required_window,
)
from .errors import (
    BudgetError,
    ConfigError,
    ContractionError,
    CountError,
    HillprojError,
    IllConditionedError,
    ParityError,
    QuadratureError,
    SpectralProximityError,
    WindowError,
)
from .potential import (
    PotentialSpec,
    SequenceStats,
    make_example,
    r_of,
    read_potential,
    rho_n,
    sequence_stats,
    tail_energy,
    v_hat,
    write_potential,
    zero_potential,
)
from .projections import (
    CircleContour,
    ProjectionMethod,
    ProjectionResult,
    RectangleContour,
    a00_closed_form,
    count_in_disc,
    disc_contour,
    free_projection,
    p_upper_rectangle,
    projection_diff_series,
    riesz_projection_eigen,
    riesz_projection_quadrature,
)
from .resolvent import (
    SeriesResult,
    chain_sum_check,
    resolvent_diff_series,
    resolvent_direct,
    series_term,
)

__version__ = "0.1.0"
