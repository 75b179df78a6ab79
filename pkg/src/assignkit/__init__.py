"""Label assignment and matching toolkit for box detection experiments."""

from .anchors import (
    DEFAULT_LEVELS,
    SIZE_FRACTION,
    Anchor,
    AnchorGridSpec,
    anchor_box_array,
    anchor_centers,
    generate_initial_boxes,
)
from .assign import (
    UNBOUNDED,
    AssignConfig,
    assign_labels,
    balanced_iou_assign,
    iou_assign,
    sample_foreground,
)
from .costs import (
    SCORE_EPS,
    CostWeights,
    GroundTruth,
    LossBreakdown,
    Prediction,
    background_cls_total,
    build_cost_matrix,
    detection_loss,
    min_cost_match,
)
from .dataio import (
    CocoDataset,
    CocoFormatError,
    JitterSpec,
    Scene,
    dataset_to_coco,
    load_coco_annotations,
    load_predictions,
    random_scene,
    read_results_records,
    synthesize_predictions,
    synthesize_proposals,
    write_results_records,
)
from .geometry import (
    Box,
    as_box_array,
    box_areas,
    giou,
    iou,
    pairwise_giou,
    pairwise_iou,
)
from .matching import (
    BACKGROUND,
    IGNORE,
    InfeasibleMatchingError,
    matched_cost,
    solve_assignment,
    solve_b_matching,
)
from .nms import ScoredBox, nms, nms_arrays, topk_prefilter
from .stats import (
    BUCKET_NAMES,
    AssignReport,
    BucketStats,
    StrategySpec,
    assignment_stats,
    bucket_of,
    compare_strategies,
    format_summary_table,
    merge_reports,
    write_histogram_svg,
    write_report_csv,
)

__version__ = "0.1.0"
