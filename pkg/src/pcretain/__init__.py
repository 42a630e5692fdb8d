"""Cross-examination of PCA component-retention criteria under several covariance estimators."""

__version__ = "0.1.0"

from .covest import (  # noqa: E402
    DataMatrix,
    Estimator,
    EstimatorKind,
    estimate,
    ledoit_wolf,
    mle_covariance,
    pdc_covariance,
    spdc_covariance,
    unbiased_covariance,
)
from .inferstats import (  # noqa: E402
    anova_oneway,
    f_sf,
    regularized_incomplete_beta,
    studentized_range_isf,
    studentized_range_sf,
    tukey_hsd,
)
from .matrixcore import EigenSpectrum, SymmetricMatrix, eigen_decompose, psd_sqrt  # noqa: E402
from .pca import PcaResult, pca_from_covariance, project_scores  # noqa: E402
from .retain import (  # noqa: E402
    RetentionConfig,
    RetentionDecision,
    cumulative_variance_rule,
    decide_all,
    kaiser_guttman,
    pareto_data,
    scree_largest_drop,
)
from .simkit import (  # noqa: E402
    ExperimentGrid,
    PopulationSpec,
    compare_estimators,
    default_population,
    run_grid,
    sample_mvn,
)
