"""One-bit sensing on the sphere: geometry, sign maps, nets, widths, checks.

The package splits into small layers: ``sphere`` holds geometry and sign
geometry primitives, ``measurements`` the direction ensembles and bit maps,
``nets`` packing/covering and shattering machinery, ``processes`` the width
and empirical-process estimators, ``verify`` the theorem-level check
routines, and ``harness``/``cli`` the seeded experiment runner.
"""

from .errors import (
    DegenerateGeodesicError,
    DimensionMismatchError,
    EnsembleKindError,
    FeasibilityError,
    InvalidDimensionError,
    NotSeparatingError,
    NumericalError,
    PreconditionError,
)
from .harness import (
    EXPERIMENT_ORDER,
    EXPERIMENTS,
    ExperimentConfig,
    ReportRow,
    resolve_m,
    run,
    run_experiment,
    summarize,
)
from .measurements import (
    HALF_NORMAL_MEAN,
    EnsembleKind,
    MeasurementEnsemble,
    SignPattern,
    SignProductReport,
    conditional_metric_sq,
    hamming_distance,
    linear_l1_distance,
    one_bit_map,
    sign_matrix,
    sign_product_statistic,
)
from .nets import (
    NetReport,
    VcEntropyReport,
    VcReport,
    canonical_witness,
    first_uncovered_cover,
    greedy_packing,
    nearest_center_projection,
    sandwich_check,
    sauer_bound,
    shatter_check,
    vc_entropy_check,
)
from .processes import (
    CovarianceMatrix,
    ProcessMetric,
    SudakovReport,
    WidthEstimate,
    WidthMethod,
    covariance_matrix,
    estimate_gaussian_width,
    estimate_hemisphere_width_cholesky,
    estimate_hemisphere_width_empirical,
    hemisphere_covariance,
    hemisphere_empirical_samples,
    metric_distances,
    sudakov_check,
    symmetrized_process_sup,
)
from .rng import substream
from .sphere import (
    GeneratorTag,
    Geodesic,
    PointSet,
    SparseSpec,
    UnitVector,
    geodesic_distance,
    geodesic_point,
    in_convex_sparse_set,
    in_sparse_set,
    in_wedge,
    pairwise_geodesic,
    sample_convex_sparse,
    sample_gaussian_vector,
    sample_sparse_unit,
    sample_uniform_sphere,
    signs,
    sparse_net,
    transversal_mask,
    transversal_separation,
    uniform_sphere_rows,
    wedge_mask,
)
from .verify import (
    CellReport,
    MetricRatioReport,
    RipReport,
    embedding_size,
    finite_embedding,
    linear_l1_rip,
    margin_separation_count,
    metric_ratio_check,
    one_bit_rip,
    sign_product_rip,
    small_cells_check,
)

__version__ = "0.1.0"

__all__ = [
    "CellReport",
    "CovarianceMatrix",
    "DegenerateGeodesicError",
    "DimensionMismatchError",
    "EXPERIMENTS",
    "EXPERIMENT_ORDER",
    "EnsembleKind",
    "EnsembleKindError",
    "ExperimentConfig",
    "FeasibilityError",
    "GeneratorTag",
    "Geodesic",
    "HALF_NORMAL_MEAN",
    "InvalidDimensionError",
    "MeasurementEnsemble",
    "MetricRatioReport",
    "NetReport",
    "NotSeparatingError",
    "NumericalError",
    "PointSet",
    "PreconditionError",
    "ProcessMetric",
    "ReportRow",
    "RipReport",
    "SignPattern",
    "SignProductReport",
    "SparseSpec",
    "SudakovReport",
    "UnitVector",
    "VcEntropyReport",
    "VcReport",
    "WidthEstimate",
    "WidthMethod",
    "canonical_witness",
    "conditional_metric_sq",
    "covariance_matrix",
    "embedding_size",
    "estimate_gaussian_width",
    "estimate_hemisphere_width_cholesky",
    "estimate_hemisphere_width_empirical",
    "finite_embedding",
    "first_uncovered_cover",
    "geodesic_distance",
    "geodesic_point",
    "greedy_packing",
    "hamming_distance",
    "hemisphere_covariance",
    "hemisphere_empirical_samples",
    "in_convex_sparse_set",
    "in_sparse_set",
    "in_wedge",
    "linear_l1_distance",
    "linear_l1_rip",
    "margin_separation_count",
    "metric_distances",
    "metric_ratio_check",
    "nearest_center_projection",
    "one_bit_map",
    "one_bit_rip",
    "pairwise_geodesic",
    "resolve_m",
    "run",
    "run_experiment",
    "sample_convex_sparse",
    "sample_gaussian_vector",
    "sample_sparse_unit",
    "sample_uniform_sphere",
    "sandwich_check",
    "sauer_bound",
    "shatter_check",
    "sign_matrix",
    "sign_product_rip",
    "sign_product_statistic",
    "signs",
    "small_cells_check",
    "sparse_net",
    "substream",
    "sudakov_check",
    "summarize",
    "symmetrized_process_sup",
    "transversal_mask",
    "transversal_separation",
    "uniform_sphere_rows",
    "vc_entropy_check",
    "wedge_mask",
]
