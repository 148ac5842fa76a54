"""gaitbench: gait recognition from ASF/AMC motion capture.

The package covers the full pipeline: parsing ASF/AMC archives, building
a prototypical skeleton, extracting normalized gait cycles by DTW
distance to an exemplar, turning cycles into templates with geometric or
learned feature extractors, and evaluating every method with
class-separability coefficients and rank-based classifier metrics.
"""

__version__ = "0.1.0"

from .asfamc import (
    Joint,
    MotionSequence,
    Skeleton,
    mean_skeleton,
    parse_amc,
    parse_asf,
    write_amc,
    write_asf,
)
from .dtw import DtwConfig, dtw_distance
from .evaluation import (
    DistanceMatrix,
    MetricsReport,
    SetupConfig,
    class_separability,
    classifier_metrics,
    classify_wta,
    evaluate_methods,
    split_data,
)
from .features import (
    Template,
    extract_geometric_features,
    extract_template,
    get_method,
    method_ids,
    raw_template,
    template_distance,
)
from .kinematics import JointCoordinateSequence, forward_kinematics, normalize_root
from .learning import (
    LabeledDataset,
    LinearTransform,
    MahalanobisClassifier,
    ScatterSet,
    apply_transform,
    compute_scatter,
    fit_mahalanobis,
    learn_mmc,
    learn_pcalda,
    mahalanobis_distance,
)
from .report import parse_report, write_report
from .sample import GaitSample, resample_linear, sample_from_motion
from .segmentation import (
    GaitDatabase,
    WindowSearch,
    candidate_windows,
    extract_gait_cycles,
    load_database,
    save_database,
)

__all__ = [
    "DistanceMatrix",
    "DtwConfig",
    "GaitDatabase",
    "GaitSample",
    "Joint",
    "JointCoordinateSequence",
    "LabeledDataset",
    "LinearTransform",
    "MahalanobisClassifier",
    "MetricsReport",
    "MotionSequence",
    "ScatterSet",
    "SetupConfig",
    "Skeleton",
    "Template",
    "WindowSearch",
    "apply_transform",
    "candidate_windows",
    "class_separability",
    "classifier_metrics",
    "classify_wta",
    "compute_scatter",
    "dtw_distance",
    "evaluate_methods",
    "extract_gait_cycles",
    "extract_geometric_features",
    "extract_template",
    "fit_mahalanobis",
    "forward_kinematics",
    "get_method",
    "learn_mmc",
    "learn_pcalda",
    "load_database",
    "mahalanobis_distance",
    "mean_skeleton",
    "method_ids",
    "normalize_root",
    "parse_amc",
    "parse_asf",
    "parse_report",
    "raw_template",
    "resample_linear",
    "sample_from_motion",
    "save_database",
    "split_data",
    "template_distance",
    "write_amc",
    "write_asf",
    "write_report",
]
