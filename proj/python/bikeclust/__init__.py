"""Daily bike-share demand clustering.

Thin wrapper over the C++ core: Hartigan-Wong k-means, cluster-count validation
(gap statistic, silhouette, elbow) and the file-based pipeline stages.
"""

from ._core import (
    BikeclustError,
    config_digest,
    detect_elbow,
    elbow_curve,
    gap_statistic,
    hartigan_wong,
    pearson_correlation,
    run_cluster,
    run_ingest,
    run_pipeline,
    run_report,
    run_validate,
    seasonal_averages,
    silhouette,
    standardize,
    validate_k,
)

__all__ = [
    "BikeclustError",
    "config_digest",
    "detect_elbow",
    "elbow_curve",
    "gap_statistic",
    "hartigan_wong",
    "pearson_correlation",
    "run_cluster",
    "run_ingest",
    "run_pipeline",
    "run_report",
    "run_validate",
    "seasonal_averages",
    "silhouette",
    "standardize",
    "validate_k",
]
