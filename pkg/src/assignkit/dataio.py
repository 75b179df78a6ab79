"""COCO-format ingestion, prediction files, and synthetic generators.

Annotation and result files follow the standard COCO layout: boxes are
``[x, y, w, h]`` with a top-left corner, category ids are arbitrary
integers.  Internally boxes are corner-form and category ids are
remapped to a dense ``[0, C)`` class index; the mapping is carried on
the loaded dataset.  Ground-truth boxes are clipped to the image at load
time and boxes left with zero area are dropped (counted, with a
warning).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from .anchors import AnchorGridSpec, anchor_centers
from .costs import GroundTruth, Prediction
from .geometry import Box, as_box_array, pairwise_iou

__all__ = [
    "CocoFormatError",
    "Scene",
    "CocoDataset",
    "load_coco_annotations",
    "dataset_to_coco",
    "load_predictions",
    "read_results_records",
    "write_results_records",
    "JitterSpec",
    "synthesize_predictions",
    "synthesize_proposals",
    "random_scene",
]


class CocoFormatError(ValueError):
    """Malformed or inconsistent annotation/result file."""


@dataclass(frozen=True)
class Scene:
    """One image's ground truths, with boxes already clipped to bounds."""

    image_id: int
    width: float
    height: float
    gts: tuple[GroundTruth, ...] = ()

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(
                f"scene size must be positive, got {self.width}x{self.height}"
            )


@dataclass
class CocoDataset:
    """Loaded scenes plus the category remapping used to densify class ids."""

    scenes: list[Scene]
    category_index: dict[int, int]  # original category id -> dense class index
    category_names: dict[int, str]  # original category id -> name
    num_dropped_boxes: int = 0

    def __len__(self) -> int:
        return len(self.scenes)

    def __getitem__(self, i: int) -> Scene:
        return self.scenes[i]

    def __iter__(self) -> Iterator[Scene]:
        return iter(self.scenes)

    @property
    def num_classes(self) -> int:
        return len(self.category_index)


def _load_json(path) -> object:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CocoFormatError(f"{path}: not valid JSON ({exc})") from exc


def _require(record: Mapping, field: str, context: str):
    if field not in record:
        raise CocoFormatError(f"{context}: missing required field {field!r}")
    return record[field]


def _parse_bbox(raw, context: str) -> tuple[float, float, float, float]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise CocoFormatError(f"{context}: bbox must be [x, y, w, h], got {raw!r}")
    try:
        x, y, w, h = (float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise CocoFormatError(f"{context}: bbox entries must be numbers") from exc
    if not all(np.isfinite(v) for v in (x, y, w, h)):
        raise CocoFormatError(f"{context}: bbox entries must be finite")
    if w < 0 or h < 0:
        raise CocoFormatError(f"{context}: bbox size must be non-negative")
    return x, y, w, h


def load_coco_annotations(path) -> CocoDataset:
    """Parse a COCO annotation file into scenes.

    Every listed image yields a Scene (possibly with zero ground
    truths).  Raises :class:`CocoFormatError` on unparsable JSON,
    missing fields, annotations referencing unknown images or
    categories, or malformed boxes.
    """
    data = _load_json(path)
    if not isinstance(data, dict):
        raise CocoFormatError(f"{path}: top level must be a JSON object")
    images = _require(data, "images", str(path))
    annotations = _require(data, "annotations", str(path))

    scenes_meta: dict[int, tuple[float, float]] = {}
    order: list[int] = []
    for rec in images:
        image_id = int(_require(rec, "id", "image record"))
        width = float(_require(rec, "width", f"image {image_id}"))
        height = float(_require(rec, "height", f"image {image_id}"))
        if width <= 0 or height <= 0:
            raise CocoFormatError(f"image {image_id}: non-positive size")
        if image_id in scenes_meta:
            raise CocoFormatError(f"image id {image_id} listed twice")
        scenes_meta[image_id] = (width, height)
        order.append(image_id)

    category_names: dict[int, str] = {}
    if "categories" in data:
        for rec in data["categories"]:
            cat_id = int(_require(rec, "id", "category record"))
            category_names[cat_id] = str(rec.get("name", str(cat_id)))
        known_cats = set(category_names)
    else:
        known_cats = None  # derive from annotations

    per_image: dict[int, list[tuple[int, Box, bool]]] = {i: [] for i in scenes_meta}
    seen_cats: set[int] = set()
    dropped = 0
    for idx, rec in enumerate(annotations):
        ctx = f"annotation {rec.get('id', idx)}"
        image_id = int(_require(rec, "image_id", ctx))
        if image_id not in scenes_meta:
            raise CocoFormatError(f"{ctx}: unknown image_id {image_id}")
        cat_id = int(_require(rec, "category_id", ctx))
        if known_cats is not None and cat_id not in known_cats:
            raise CocoFormatError(f"{ctx}: unknown category_id {cat_id}")
        seen_cats.add(cat_id)
        x, y, w, h = _parse_bbox(_require(rec, "bbox", ctx), ctx)
        width, height = scenes_meta[image_id]
        box = Box.from_xywh(x, y, w, h).clip(width, height)
        if box.area <= 0.0:
            dropped += 1
            continue
        per_image[image_id].append((cat_id, box, bool(rec.get("iscrowd", 0))))

    if known_cats is None:
        category_names = {c: str(c) for c in sorted(seen_cats)}
    category_index = {c: i for i, c in enumerate(sorted(category_names))}

    if dropped:
        warnings.warn(
            f"{path}: dropped {dropped} ground-truth box(es) with zero area "
            "after clipping",
            stacklevel=2,
        )

    scenes = []
    for image_id in order:
        width, height = scenes_meta[image_id]
        gts = tuple(
            GroundTruth(box=box, class_id=category_index[cat], is_crowd=crowd)
            for cat, box, crowd in per_image[image_id]
        )
        scenes.append(Scene(image_id=image_id, width=width, height=height, gts=gts))
    return CocoDataset(
        scenes=scenes,
        category_index=category_index,
        category_names=category_names,
        num_dropped_boxes=dropped,
    )


def dataset_to_coco(dataset: CocoDataset) -> dict:
    """Serialize scenes back to the COCO annotation layout."""
    index_to_cat = {v: k for k, v in dataset.category_index.items()}
    images = [
        {"id": s.image_id, "width": s.width, "height": s.height}
        for s in dataset.scenes
    ]
    annotations = []
    for scene in dataset.scenes:
        for gt in scene.gts:
            x, y, w, h = gt.box.to_xywh()
            annotations.append(
                {
                    "id": len(annotations) + 1,
                    "image_id": scene.image_id,
                    "category_id": index_to_cat[gt.class_id],
                    "bbox": [x, y, w, h],
                    "area": gt.box.area,
                    "iscrowd": int(gt.is_crowd),
                }
            )
    categories = [
        {"id": cat_id, "name": dataset.category_names.get(cat_id, str(cat_id))}
        for cat_id in sorted(dataset.category_index)
    ]
    return {"images": images, "annotations": annotations, "categories": categories}


def read_results_records(path) -> list[dict]:
    """Load a COCO results file as validated raw records."""
    data = _load_json(path)
    if not isinstance(data, list):
        raise CocoFormatError(f"{path}: results file must be a JSON array")
    for idx, rec in enumerate(data):
        ctx = f"result {idx}"
        if not isinstance(rec, dict):
            raise CocoFormatError(f"{ctx}: must be an object")
        _require(rec, "image_id", ctx)
        _require(rec, "category_id", ctx)
        _parse_bbox(_require(rec, "bbox", ctx), ctx)
        score = float(_require(rec, "score", ctx))
        if not np.isfinite(score):
            raise CocoFormatError(f"{ctx}: score must be finite")
    return data


def write_results_records(records: Sequence[Mapping], path) -> None:
    with open(path, "w") as fh:
        json.dump(list(records), fh)


def load_predictions(path, category_index: Mapping[int, int]) -> dict[int, list[Prediction]]:
    """Load a COCO results file into per-image prediction lists.

    Each record's score lands at its category's dense class index in an
    otherwise-zero score vector of width ``len(category_index)``.
    Unknown categories and scores outside ``[0, 1]`` are format errors.
    """
    num_classes = len(category_index)
    if num_classes == 0:
        raise ValueError("category_index must not be empty")
    out: dict[int, list[Prediction]] = {}
    for idx, rec in enumerate(read_results_records(path)):
        ctx = f"result {idx}"
        cat_id = int(rec["category_id"])
        if cat_id not in category_index:
            raise CocoFormatError(f"{ctx}: unknown category_id {cat_id}")
        score = float(rec["score"])
        if not (0.0 <= score <= 1.0):
            raise CocoFormatError(f"{ctx}: score {score} outside [0, 1]")
        x, y, w, h = _parse_bbox(rec["bbox"], ctx)
        scores = np.zeros(num_classes, dtype=np.float64)
        scores[category_index[cat_id]] = score
        pred = Prediction(box=Box.from_xywh(x, y, w, h), scores=scores)
        out.setdefault(int(rec["image_id"]), []).append(pred)
    return out


@dataclass(frozen=True)
class JitterSpec:
    """Noise model for synthesizing predictions from ground truths.

    center_sigma: center shift stddev as a fraction of the box size.
    scale_sigma: stddev of the log-scale jitter of width and height.
    dup_count: jittered copies emitted per ground truth.
    fp_rate: expected false positives per ground truth (Poisson).
    score_noise: stddev of the additive noise on IoU-derived scores.
    """

    center_sigma: float = 0.1
    scale_sigma: float = 0.1
    dup_count: int = 1
    fp_rate: float = 0.0
    score_noise: float = 0.0

    def __post_init__(self) -> None:
        for name in ("center_sigma", "scale_sigma", "fp_rate", "score_noise"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.dup_count < 1:
            raise ValueError(f"dup_count must be >= 1, got {self.dup_count}")


def _num_classes_for(scene: Scene, num_classes: int | None) -> int:
    if num_classes is not None:
        if num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        return num_classes
    if scene.gts:
        return max(g.class_id for g in scene.gts) + 1
    return 1


def _jittered_copies(
    gt_boxes: np.ndarray, spec: JitterSpec, rng: np.random.Generator
) -> np.ndarray:
    """One jittered corner-form copy per input row."""
    cx = 0.5 * (gt_boxes[:, 0] + gt_boxes[:, 2])
    cy = 0.5 * (gt_boxes[:, 1] + gt_boxes[:, 3])
    w = gt_boxes[:, 2] - gt_boxes[:, 0]
    h = gt_boxes[:, 3] - gt_boxes[:, 1]
    n = gt_boxes.shape[0]
    cx = cx + rng.normal(0.0, 1.0, n) * spec.center_sigma * w
    cy = cy + rng.normal(0.0, 1.0, n) * spec.center_sigma * h
    w = w * np.exp(rng.normal(0.0, spec.scale_sigma, n))
    h = h * np.exp(rng.normal(0.0, spec.scale_sigma, n))
    return np.stack(
        [cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h], axis=1
    )


def _iou_scores(
    boxes: np.ndarray,
    sources: np.ndarray,
    gt_boxes: np.ndarray,
    spec: JitterSpec,
    rng: np.random.Generator,
) -> np.ndarray:
    """Score of each jittered box: IoU to its source gt plus noise, clamped."""
    if boxes.shape[0] == 0:
        return np.zeros(0)
    iou = pairwise_iou(boxes, gt_boxes)[np.arange(boxes.shape[0]), sources]
    noisy = iou + rng.normal(0.0, 1.0, boxes.shape[0]) * spec.score_noise
    return np.clip(noisy, 0.0, 1.0)


def _false_positives(
    count: int,
    scene: Scene,
    num_classes: int,
    rng: np.random.Generator,
) -> list[Prediction]:
    out = []
    for _ in range(count):
        xs = np.sort(rng.uniform(0.0, scene.width, 2))
        ys = np.sort(rng.uniform(0.0, scene.height, 2))
        scores = np.zeros(num_classes)
        scores[int(rng.integers(num_classes))] = rng.uniform(0.0, 1.0)
        out.append(
            Prediction(box=Box(xs[0], ys[0], xs[1], ys[1]), scores=scores)
        )
    return out


def _as_predictions(
    boxes: np.ndarray, scores: np.ndarray, classes: np.ndarray, num_classes: int
) -> list[Prediction]:
    preds = []
    for row, score, cls in zip(boxes, scores, classes):
        vec = np.zeros(num_classes)
        vec[cls] = score
        preds.append(Prediction(box=Box(*row), scores=vec))
    return preds


def synthesize_predictions(
    scene: Scene,
    spec: JitterSpec = JitterSpec(),
    seed: int = 0,
    num_classes: int | None = None,
) -> list[Prediction]:
    """Jittered copies of each ground truth plus random false positives.

    Emits ``dup_count`` noisy copies per ground truth (in ground-truth
    order), scored by their IoU to the source box plus noise, then
    ``Poisson(fp_rate * len(gts))`` uniformly random boxes with uniform
    scores.  Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    nc = _num_classes_for(scene, num_classes)
    if not scene.gts:
        return []
    gt_boxes = as_box_array([g.box for g in scene.gts])
    classes = np.asarray([g.class_id for g in scene.gts], dtype=np.int64)
    sources = np.repeat(np.arange(len(scene.gts)), spec.dup_count)
    copies = _jittered_copies(gt_boxes[sources], spec, rng)
    scores = _iou_scores(copies, sources, gt_boxes, spec, rng)
    preds = _as_predictions(copies, scores, classes[sources], nc)
    n_fp = int(rng.poisson(spec.fp_rate * len(scene.gts)))
    preds.extend(_false_positives(n_fp, scene, nc, rng))
    return preds


def synthesize_proposals(
    scene: Scene,
    grid: AnchorGridSpec,
    spec: JitterSpec = JitterSpec(),
    seed: int = 0,
    num_classes: int | None = None,
) -> list[Prediction]:
    """Grid-driven proposal pool: one jittered copy per covering grid cell.

    Walks every cell center of the multi-level grid; a center lying
    inside one or more (non-crowd) ground truths emits one jittered copy
    of the smallest such box (ties to the lower index).  Larger objects
    cover more cells across more levels and therefore attract
    proportionally more proposals, mimicking how dense proposal pools
    concentrate on large objects.  False positives are appended exactly
    as in :func:`synthesize_predictions`.  ``dup_count`` is ignored; the
    grid supplies the multiplicity.
    """
    rng = np.random.default_rng(seed)
    nc = _num_classes_for(scene, num_classes)
    targets = [g for g in scene.gts if not g.is_crowd]
    if not targets:
        return []
    gt_boxes = as_box_array([g.box for g in targets])
    classes = np.asarray([g.class_id for g in targets], dtype=np.int64)
    centers, _ = anchor_centers(grid)
    cx, cy = centers[:, 0:1], centers[:, 1:2]  # (N, 1) against (1, K) gt edges
    inside = (
        (cx >= gt_boxes[None, :, 0])
        & (cx <= gt_boxes[None, :, 2])
        & (cy >= gt_boxes[None, :, 1])
        & (cy <= gt_boxes[None, :, 3])
    )
    areas = (gt_boxes[:, 2] - gt_boxes[:, 0]) * (gt_boxes[:, 3] - gt_boxes[:, 1])
    masked = np.where(inside, areas[None, :], np.inf)
    covered = inside.any(axis=1)
    sources = masked.argmin(axis=1)[covered]
    copies = _jittered_copies(gt_boxes[sources], spec, rng)
    scores = _iou_scores(copies, sources, gt_boxes, spec, rng)
    preds = _as_predictions(copies, scores, classes[sources], nc)
    n_fp = int(rng.poisson(spec.fp_rate * len(targets)))
    preds.extend(_false_positives(n_fp, scene, nc, rng))
    return preds


def random_scene(
    image_id: int,
    width: float,
    height: float,
    rng: np.random.Generator,
    max_gts: int = 12,
    min_gts: int = 1,
    num_classes: int = 10,
    min_side: float = 6.0,
    max_side_frac: float = 0.6,
) -> Scene:
    """A random scene with log-uniform object sizes spanning all buckets."""
    if max_gts < min_gts:
        raise ValueError("max_gts must be >= min_gts")
    count = int(rng.integers(min_gts, max_gts + 1))
    gts = []
    hi = max_side_frac * min(width, height)
    for _ in range(count):
        side = float(np.exp(rng.uniform(np.log(min_side), np.log(hi))))
        aspect = float(np.exp(rng.normal(0.0, 0.3)))
        w = min(side * aspect, width)
        h = min(side / aspect, height)
        cx = rng.uniform(0.5 * w, width - 0.5 * w)
        cy = rng.uniform(0.5 * h, height - 0.5 * h)
        box = Box.from_cxcywh(cx, cy, w, h).clip(width, height)
        if box.area <= 0.0:
            continue
        gts.append(GroundTruth(box=box, class_id=int(rng.integers(num_classes))))
    return Scene(image_id=image_id, width=width, height=height, gts=tuple(gts))
