"""Assignment quality reports: per-object positive counts by size bucket.

Objects bucket by pixel area: ``small < 32**2 <= medium < 96**2 <=
large``.  Crowd-flagged ground truths are never assignment targets, so
they are excluded from the buckets (their per-object count is zero by
construction).  Reports pool counts over all scenes they cover.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .assign import AssignConfig, assign_labels, iou_assign
from .costs import CostWeights, GroundTruth, Prediction, build_cost_matrix
from .dataio import Scene
from .matching import solve_assignment, solve_b_matching

__all__ = [
    "BUCKET_NAMES",
    "BucketStats",
    "AssignReport",
    "bucket_of",
    "assignment_stats",
    "merge_reports",
    "StrategySpec",
    "compare_strategies",
    "format_summary_table",
    "write_report_csv",
    "write_histogram_svg",
]

BUCKET_NAMES = ("small", "medium", "large")
_SMALL_MAX = 32.0**2
_MEDIUM_MAX = 96.0**2


def bucket_of(area: float) -> str:
    if area < _SMALL_MAX:
        return "small"
    if area < _MEDIUM_MAX:
        return "medium"
    return "large"


@dataclass(frozen=True)
class BucketStats:
    num_gts: int = 0
    total_positives: int = 0
    num_unmatched: int = 0

    @property
    def mean_positives(self) -> float:
        return self.total_positives / self.num_gts if self.num_gts else 0.0

    def __add__(self, other: "BucketStats") -> "BucketStats":
        return BucketStats(
            self.num_gts + other.num_gts,
            self.total_positives + other.total_positives,
            self.num_unmatched + other.num_unmatched,
        )


@dataclass(frozen=True)
class AssignReport:
    """Pooled per-object positive counts for one assignment strategy."""

    strategy: str
    config: dict = field(default_factory=dict)
    per_gt_positive_counts: tuple[int, ...] = ()
    buckets: dict[str, BucketStats] = field(
        default_factory=lambda: {name: BucketStats() for name in BUCKET_NAMES}
    )

    @property
    def total_positives(self) -> int:
        return sum(self.per_gt_positive_counts)


def assignment_stats(
    labels: np.ndarray,
    gts: Sequence[GroundTruth],
    strategy: str = "",
    config: Mapping | None = None,
) -> AssignReport:
    """Count positives per ground truth and fold them into size buckets.

    ``per_gt_positive_counts`` has one entry per ground truth in order
    (crowds included, always zero); buckets cover non-crowd ground
    truths only, so bucket totals still sum to the total positive count.
    """
    labels = np.asarray(labels, dtype=np.int64)
    counts = np.zeros(len(gts), dtype=np.int64)
    matched = labels[labels >= 0]
    if matched.size:
        if matched.max() >= len(gts):
            raise ValueError("labels refer to a ground truth that does not exist")
        np.add.at(counts, matched, 1)
    buckets = {name: BucketStats() for name in BUCKET_NAMES}
    for gt, count in zip(gts, counts):
        if gt.is_crowd:
            continue
        name = bucket_of(gt.box.area)
        prev = buckets[name]
        buckets[name] = BucketStats(
            num_gts=prev.num_gts + 1,
            total_positives=prev.total_positives + int(count),
            num_unmatched=prev.num_unmatched + (1 if count == 0 else 0),
        )
    return AssignReport(
        strategy=strategy,
        config=dict(config or {}),
        per_gt_positive_counts=tuple(int(c) for c in counts),
        buckets=buckets,
    )


def merge_reports(reports: Sequence[AssignReport]) -> AssignReport:
    """Pool several scenes' reports for the same strategy."""
    if not reports:
        return AssignReport(strategy="")
    strategy = reports[0].strategy
    config = reports[0].config
    counts: list[int] = []
    buckets = {name: BucketStats() for name in BUCKET_NAMES}
    for rep in reports:
        if rep.strategy != strategy:
            raise ValueError("cannot merge reports from different strategies")
        counts.extend(rep.per_gt_positive_counts)
        for name in BUCKET_NAMES:
            buckets[name] = buckets[name] + rep.buckets[name]
    return AssignReport(
        strategy=strategy,
        config=config,
        per_gt_positive_counts=tuple(counts),
        buckets=buckets,
    )


@dataclass(frozen=True)
class StrategySpec:
    """A labeled assignment strategy to run over scenes.

    kind is one of ``hungarian`` (optimal one-to-one matching),
    ``bmatch`` (exactly ``b`` predictions per object), ``iou`` (uncapped
    threshold assignment), or ``iou-balanced`` (threshold assignment
    with the per-object cap from ``assign.balance_k``).
    """

    label: str
    kind: str
    assign: AssignConfig = AssignConfig()
    b: int = 1
    weights: CostWeights = CostWeights()

    KINDS = ("hungarian", "bmatch", "iou", "iou-balanced")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"kind must be one of {self.KINDS}, got {self.kind!r}")
        if self.b < 1:
            raise ValueError(f"b must be >= 1, got {self.b}")

    def describe(self) -> dict:
        out: dict = {"strategy": self.label, "kind": self.kind}
        if self.kind in ("hungarian", "bmatch"):
            out.update(
                w_cls=self.weights.w_cls,
                w_l1=self.weights.w_l1,
                w_giou=self.weights.w_giou,
            )
            if self.kind == "bmatch":
                out["b"] = self.b
        else:
            out.update(
                tau=self.assign.tau,
                balance_k=self.assign.balance_k,
                gamma=self.assign.gamma,
                fallback=self.assign.fallback,
                seed=self.assign.seed,
            )
        return out


def run_strategy(
    strategy: StrategySpec, scene: Scene, preds: Sequence[Prediction]
) -> np.ndarray:
    """Labels of one strategy on one scene's predictions."""
    if strategy.kind in ("hungarian", "bmatch"):
        return _run_matching(strategy, scene, preds)
    boxes = np.asarray([p.box.astuple() for p in preds], dtype=np.float64).reshape(
        -1, 4
    )
    cfg = strategy.assign
    if strategy.kind == "iou":
        cfg = replace(cfg, balance_k=None)
    return assign_labels(boxes, scene.gts, cfg)


def _run_matching(
    strategy: StrategySpec, scene: Scene, preds: Sequence[Prediction]
) -> np.ndarray:
    targets = [(i, g) for i, g in enumerate(scene.gts) if not g.is_crowd]
    labels = np.full(len(preds), -1, dtype=np.int64)
    if not targets or not preds:
        return labels
    cost = build_cost_matrix(
        list(preds),
        [g for _, g in targets],
        strategy.weights,
        (scene.width, scene.height),
    )
    if strategy.kind == "bmatch":
        raw = solve_b_matching(cost, strategy.b)
    else:
        raw = solve_assignment(cost)
    orig = np.asarray([i for i, _ in targets], dtype=np.int64)
    matched = raw >= 0
    labels[matched] = orig[raw[matched]]
    return labels


PredictionSource = Callable[[Scene], Sequence[Prediction]]


def compare_strategies(
    scenes: Sequence[Scene],
    strategies: Sequence[StrategySpec],
    source: PredictionSource,
) -> tuple[list[AssignReport], str]:
    """Run every strategy over every scene on a shared prediction source.

    The source is called once per scene; all strategies see the same
    predictions.  Returns one pooled report per strategy plus a
    formatted summary table.
    """
    per_strategy: dict[str, list[AssignReport]] = {s.label: [] for s in strategies}
    for scene in scenes:
        preds = list(source(scene))
        for strategy in strategies:
            labels = run_strategy(strategy, scene, preds)
            per_strategy[strategy.label].append(
                assignment_stats(
                    labels, scene.gts, strategy.label, strategy.describe()
                )
            )
    reports = [merge_reports(per_strategy[s.label]) for s in strategies]
    return reports, format_summary_table(reports)


def format_summary_table(reports: Sequence[AssignReport]) -> str:
    header = f"{'strategy':<16} {'bucket':<8} {'gts':>6} {'pos':>8} {'mean':>8} {'unmatched':>10}"
    lines = [header, "-" * len(header)]
    for rep in reports:
        for name in BUCKET_NAMES:
            b = rep.buckets[name]
            lines.append(
                f"{rep.strategy:<16} {name:<8} {b.num_gts:>6} "
                f"{b.total_positives:>8} {b.mean_positives:>8.3f} {b.num_unmatched:>10}"
            )
    return "\n".join(lines)


def write_report_csv(
    reports: Sequence[AssignReport], path, header_config: Mapping | None = None
) -> None:
    """One row per strategy and bucket, preceded by config echo comments.

    Deterministic: fixed column order, sorted config keys, repr floats.
    """
    with open(path, "w", newline="") as fh:
        if header_config:
            for key in sorted(header_config):
                fh.write(f"# {key}={header_config[key]!r}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["strategy", "bucket", "num_gts", "positives", "mean", "unmatched"]
        )
        for rep in reports:
            for name in BUCKET_NAMES:
                b = rep.buckets[name]
                writer.writerow(
                    [
                        rep.strategy,
                        name,
                        b.num_gts,
                        b.total_positives,
                        repr(b.mean_positives),
                        b.num_unmatched,
                    ]
                )


def write_histogram_svg(
    reports: Sequence[AssignReport], path, max_count: int | None = None
) -> None:
    """Histogram of per-object positive counts, one series per strategy."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed hash salt and no date stamp: identical inputs give identical bytes
    with matplotlib.rc_context({"svg.hashsalt": "assignkit"}):
        fig, ax = plt.subplots(figsize=(7, 4))
        top = max_count
        if top is None:
            top = max(
                (max(r.per_gt_positive_counts, default=0) for r in reports), default=0
            )
        bins = np.arange(top + 2) - 0.5
        for rep in reports:
            ax.hist(
                rep.per_gt_positive_counts,
                bins=bins,
                histtype="step",
                label=rep.strategy or "assignment",
            )
        ax.set_xlabel("positives per object")
        ax.set_ylabel("objects")
        ax.legend(loc="upper right")
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
