"""Command-line front end.

Subcommands: ``assign`` (run an assignment strategy over a dataset and
report per-object positive statistics), ``match`` (minimum-cost
matching of predictions to objects), ``nms`` (suppress a results file),
``bench`` (wall-clock medians of the core operations), and ``synth``
(generate a synthetic results file from annotations).

Every value flag can be defaulted through an ``ASSIGNKIT_``-prefixed
environment variable (e.g. ``ASSIGNKIT_SEED=7``); explicit flags win.
Exit codes: 0 success, 1 I/O or data errors, 2 invalid flags.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import os
import statistics
import sys
import time
from dataclasses import replace
from typing import Callable, Sequence

import numpy as np

from .anchors import AnchorGridSpec, anchor_box_array
from .assign import AssignConfig, iou_assign
from .costs import (
    CostWeights,
    GroundTruth,
    Prediction,
    build_cost_matrix,
    min_cost_match,
)
from .dataio import (
    CocoDataset,
    CocoFormatError,
    JitterSpec,
    Scene,
    load_coco_annotations,
    load_predictions,
    read_results_records,
    synthesize_predictions,
    synthesize_proposals,
    write_results_records,
)
from .geometry import Box
from .matching import (
    InfeasibleMatchingError,
    matched_cost,
    solve_assignment,
    solve_b_matching,
)
from .nms import nms_arrays
from .stats import (
    StrategySpec,
    assignment_stats,
    format_summary_table,
    merge_reports,
    run_strategy,
    write_histogram_svg,
    write_report_csv,
)

ENV_PREFIX = "ASSIGNKIT_"

# Reference parameter bundles for the two matching stages: the coarse
# proposal stage uses a higher overlap bar and keeps more foreground,
# the refinement stage the opposite.
STAGE_DEFAULTS = {
    "first": {"tau": 0.7, "gamma": 0.5, "nms": 0.9, "topk": 1000, "class_aware": False},
    "second": {"tau": 0.6, "gamma": 0.25, "nms": 0.7, "topk": 10000, "class_aware": True},
}
DEFAULT_BALANCE_K = 4
DEFAULT_STRIDES = "64,32,16,8"


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def _resolve(flag_value, env_name: str, cast: Callable, fallback):
    """Flag > environment > fallback; returns (value, came_from_flag)."""
    if flag_value is not None:
        return flag_value, True
    raw = _env(env_name)
    if raw is not None:
        try:
            return cast(raw), False
        except (TypeError, ValueError) as exc:
            raise SystemExit(
                _fail(f"invalid {ENV_PREFIX}{env_name}={raw!r}: {exc}", 2)
            )
    return fallback, False


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _parse_balance_k(raw: str) -> int | None:
    if raw.lower() in ("inf", "none", "unbounded"):
        return None
    value = int(raw)
    if value < 1:
        raise ValueError(f"balance-k must be >= 1 or 'inf', got {value}")
    return value


def _parse_gamma(raw: str) -> float | str | None:
    if raw.lower() == "none":
        return None
    if raw.lower() == "stage":
        return "stage"
    return float(raw)


def _parse_strides(raw: str) -> tuple[tuple[int, int], ...]:
    strides = tuple(int(s) for s in raw.split(",") if s.strip())
    if not strides:
        raise ValueError("at least one stride is required")
    return tuple((level, stride) for level, stride in enumerate(strides))


def _scene_seed(seed: int, image_id: int) -> int:
    return int(np.random.SeedSequence([seed, image_id]).generate_state(1)[0])


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise ValueError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assignkit", description="Box label assignment experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_assign = sub.add_parser("assign", help="run an assignment strategy and report")
    p_assign.add_argument("--ann", required=True, help="COCO annotation file")
    p_assign.add_argument("--pred", help="COCO results file to assign")
    p_assign.add_argument(
        "--anchors", action="store_true", help="assign the initial multi-level grid"
    )
    p_assign.add_argument(
        "--proposals",
        action="store_true",
        help="assign a grid-driven synthetic proposal pool",
    )
    p_assign.add_argument("--strides", help=f"grid strides, default {DEFAULT_STRIDES}")
    p_assign.add_argument(
        "--strategy",
        choices=StrategySpec.KINDS,
        default="iou",
        help="assignment strategy",
    )
    p_assign.add_argument("--stage", choices=("first", "second"))
    p_assign.add_argument("--tau", type=float, help="IoU positive threshold")
    p_assign.add_argument(
        "--balance-k", type=str, help="per-object positive cap, or 'inf'"
    )
    p_assign.add_argument(
        "--gamma", type=str, help="foreground ratio cap: float, 'stage', or 'none'"
    )
    p_assign.add_argument("--b", type=int, help="predictions per object for bmatch")
    p_assign.add_argument(
        "--fallback", action=argparse.BooleanOptionalAction, default=None
    )
    _add_jitter_flags(p_assign)
    _add_weight_flags(p_assign)
    p_assign.add_argument("--seed", type=int)
    p_assign.add_argument("--workers", type=int)
    p_assign.add_argument("--out", help="output directory")
    p_assign.set_defaults(func=cmd_assign)

    p_match = sub.add_parser("match", help="minimum-cost matching per scene")
    p_match.add_argument("--ann", required=True)
    p_match.add_argument("--pred", help="COCO results file; default: synthesized")
    p_match.add_argument("--b", type=int, help="predictions per object (default 1)")
    _add_jitter_flags(p_match)
    _add_weight_flags(p_match)
    p_match.add_argument("--seed", type=int)
    p_match.add_argument("--out", help="matches CSV path")
    p_match.set_defaults(func=cmd_match)

    p_nms = sub.add_parser("nms", help="suppress a results file")
    p_nms.add_argument("--pred", required=True, help="COCO results file")
    p_nms.add_argument("--stage", choices=("first", "second"))
    p_nms.add_argument("--iou-thresh", type=float)
    p_nms.add_argument("--topk", type=int, help="cap input boxes per image first")
    p_nms.add_argument(
        "--class-aware", action=argparse.BooleanOptionalAction, default=None
    )
    p_nms.add_argument("--out", required=True, help="survivor results file")
    p_nms.set_defaults(func=cmd_nms)

    p_bench = sub.add_parser("bench", help="time the core operations")
    p_bench.add_argument(
        "--ops", default="nms,hungarian,iou_assign", help="comma-separated ops"
    )
    p_bench.add_argument("--sizes", help="comma-separated input sizes")
    p_bench.add_argument("--runs", type=int, help="timed repetitions (default 20)")
    p_bench.add_argument("--seed", type=int)
    p_bench.add_argument("--out", help="CSV path (default: stdout)")
    p_bench.set_defaults(func=cmd_bench)

    p_synth = sub.add_parser("synth", help="synthesize a results file")
    p_synth.add_argument("--ann", required=True)
    p_synth.add_argument("--out", required=True)
    _add_jitter_flags(p_synth)
    p_synth.add_argument("--seed", type=int)
    p_synth.set_defaults(func=cmd_synth)

    return parser


def _add_jitter_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dup-count", type=int)
    parser.add_argument("--center-sigma", type=float)
    parser.add_argument("--scale-sigma", type=float)
    parser.add_argument("--fp-rate", type=float)
    parser.add_argument("--score-noise", type=float)


def _add_weight_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--w-cls", type=float)
    parser.add_argument("--w-l1", type=float)
    parser.add_argument("--w-giou", type=float)


def _jitter_from_args(args) -> JitterSpec:
    dup, _ = _resolve(args.dup_count, "DUP_COUNT", int, 4)
    center, _ = _resolve(args.center_sigma, "CENTER_SIGMA", float, 0.1)
    scale, _ = _resolve(args.scale_sigma, "SCALE_SIGMA", float, 0.1)
    fp, _ = _resolve(args.fp_rate, "FP_RATE", float, 0.0)
    noise, _ = _resolve(args.score_noise, "SCORE_NOISE", float, 0.05)
    return JitterSpec(
        center_sigma=center,
        scale_sigma=scale,
        dup_count=dup,
        fp_rate=fp,
        score_noise=noise,
    )


def _weights_from_args(args) -> CostWeights:
    w_cls, _ = _resolve(args.w_cls, "W_CLS", float, 2.0)
    w_l1, _ = _resolve(args.w_l1, "W_L1", float, 5.0)
    w_giou, _ = _resolve(args.w_giou, "W_GIOU", float, 2.0)
    return CostWeights(w_cls=w_cls, w_l1=w_l1, w_giou=w_giou)


def _load_dataset(path: str) -> CocoDataset:
    return load_coco_annotations(path)


def _prediction_source(
    args, dataset: CocoDataset, jitter: JitterSpec, seed: int
) -> tuple[Callable[[Scene], list[Prediction]], str]:
    """Build the per-scene prediction source selected by the flags."""
    strides_raw, _ = _resolve(args.strides, "STRIDES", str, DEFAULT_STRIDES)
    levels = _parse_strides(strides_raw)
    num_classes = max(dataset.num_classes, 1)
    if args.pred:
        by_image = load_predictions(args.pred, dataset.category_index)

        def from_file(scene: Scene) -> list[Prediction]:
            return by_image.get(scene.image_id, [])

        return from_file, f"file:{args.pred}"
    if args.anchors:

        def from_grid(scene: Scene) -> list[Prediction]:
            spec = AnchorGridSpec(scene.width, scene.height, levels)
            boxes = anchor_box_array(spec)
            flat = np.full(num_classes, 0.5)
            return [Prediction(box=Box(*row), scores=flat) for row in boxes]

        return from_grid, f"anchors:{strides_raw}"
    if args.proposals:

        def from_proposals(scene: Scene) -> list[Prediction]:
            spec = AnchorGridSpec(scene.width, scene.height, levels)
            return synthesize_proposals(
                scene, spec, jitter, _scene_seed(seed, scene.image_id), num_classes
            )

        return from_proposals, f"proposals:{strides_raw}"

    def from_jitter(scene: Scene) -> list[Prediction]:
        return synthesize_predictions(
            scene, jitter, _scene_seed(seed, scene.image_id), num_classes
        )

    return from_jitter, "synthesized"


def cmd_assign(args, parser: argparse.ArgumentParser) -> int:
    if sum(map(bool, (args.pred, args.anchors, args.proposals))) > 1:
        parser.error("--pred, --anchors, and --proposals are mutually exclusive")
    stage, _ = _resolve(args.stage, "STAGE", str, "second")
    stage_cfg = STAGE_DEFAULTS[stage]
    seed, _ = _resolve(args.seed, "SEED", int, 0)
    workers, _ = _resolve(args.workers, "WORKERS", int, os.cpu_count() or 1)
    out_dir, _ = _resolve(args.out, "OUT", str, "out")
    tau, _ = _resolve(args.tau, "TAU", float, stage_cfg["tau"])
    fallback = True if args.fallback is None else args.fallback

    balance_raw, balance_explicit = _resolve(args.balance_k, "BALANCE_K", str, None)
    gamma_raw, gamma_explicit = _resolve(args.gamma, "GAMMA", str, None)
    b_value, b_explicit = _resolve(args.b, "B", int, 1)

    if args.strategy in ("hungarian", "iou") and balance_explicit:
        parser.error(f"--balance-k does not apply to strategy {args.strategy!r}")
    if args.strategy != "bmatch" and b_explicit:
        parser.error(f"--b only applies to strategy 'bmatch', not {args.strategy!r}")
    if args.strategy == "bmatch" and b_value < 1:
        parser.error(f"--b must be >= 1, got {b_value}")
    if args.strategy in ("hungarian", "bmatch") and gamma_explicit:
        parser.error(f"--gamma does not apply to strategy {args.strategy!r}")

    try:
        balance_k = (
            _parse_balance_k(balance_raw)
            if balance_raw is not None
            else (DEFAULT_BALANCE_K if args.strategy == "iou-balanced" else None)
        )
        gamma_value = _parse_gamma(gamma_raw) if gamma_raw is not None else None
    except ValueError as exc:
        parser.error(str(exc))
    if gamma_value == "stage":
        gamma_value = stage_cfg["gamma"]
    if not (0.0 < tau <= 1.0):
        parser.error(f"--tau must lie in (0, 1], got {tau}")
    if gamma_value is not None and not (0.0 < gamma_value <= 1.0):
        parser.error(f"--gamma must lie in (0, 1], got {gamma_value}")

    try:
        assign_cfg = AssignConfig(
            tau=tau,
            balance_k=balance_k,
            gamma=gamma_value,
            fallback=fallback,
            seed=seed,
        )
        strategy = StrategySpec(
            label=args.strategy,
            kind=args.strategy,
            assign=assign_cfg,
            b=b_value,
            weights=_weights_from_args(args),
        )
    except ValueError as exc:
        parser.error(str(exc))

    jitter = _jitter_from_args(args)
    try:
        dataset = _load_dataset(args.ann)
        source, source_label = _prediction_source(args, dataset, jitter, seed)
        scene_reports = _run_scenes(dataset.scenes, strategy, source, workers)
    except (CocoFormatError, OSError) as exc:
        return _fail(str(exc), 1)
    except InfeasibleMatchingError as exc:
        return _fail(f"matching infeasible: {exc}", 1)

    report = merge_reports(scene_reports)
    config_echo = dict(
        sorted(
            {
                **strategy.describe(),
                "stage": stage,
                "seed": seed,
                "source": source_label,
                "ann": args.ann,
                "num_scenes": len(dataset.scenes),
            }.items()
        )
    )
    os.makedirs(out_dir, exist_ok=True)
    write_report_csv([report], os.path.join(out_dir, "report.csv"), config_echo)
    write_histogram_svg([report], os.path.join(out_dir, "histogram.svg"))
    print(format_summary_table([report]))
    print(f"wrote {os.path.join(out_dir, 'report.csv')}")
    return 0


def _run_scenes(
    scenes: Sequence[Scene],
    strategy: StrategySpec,
    source: Callable[[Scene], list[Prediction]],
    workers: int,
):
    """Per-scene reports, merged in image-id order regardless of pool size."""

    def one(scene: Scene):
        preds = source(scene)
        labels = run_strategy(strategy, scene, preds)
        return scene.image_id, assignment_stats(
            labels, scene.gts, strategy.label, strategy.describe()
        )

    if workers <= 1 or len(scenes) <= 1:
        results = [one(scene) for scene in scenes]
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, scenes))
    return [rep for _, rep in sorted(results, key=lambda pair: pair[0])]


def cmd_match(args, parser: argparse.ArgumentParser) -> int:
    seed, _ = _resolve(args.seed, "SEED", int, 0)
    b_value, _ = _resolve(args.b, "B", int, 1)
    if b_value < 1:
        parser.error(f"--b must be >= 1, got {b_value}")
    out_path, _ = _resolve(args.out, "OUT", str, "matches.csv")
    weights = _weights_from_args(args)
    jitter = _jitter_from_args(args)
    try:
        dataset = _load_dataset(args.ann)
        if args.pred:
            by_image = load_predictions(args.pred, dataset.category_index)
        else:
            by_image = {
                s.image_id: synthesize_predictions(
                    s, jitter, _scene_seed(seed, s.image_id), dataset.num_classes or 1
                )
                for s in dataset.scenes
            }
        rows = []
        total_objective = 0.0
        for scene in sorted(dataset.scenes, key=lambda s: s.image_id):
            preds = by_image.get(scene.image_id, [])
            targets = [g for g in scene.gts if not g.is_crowd]
            if not targets:
                continue
            size = (scene.width, scene.height)
            if b_value == 1:
                labels, objective = min_cost_match(preds, targets, weights, size)
                cost = build_cost_matrix(preds, targets, weights, size)
            else:
                cost = build_cost_matrix(preds, targets, weights, size)
                labels = solve_b_matching(cost, b_value)
                objective = matched_cost(cost, labels)
            total_objective += objective
            for pred_idx in np.flatnonzero(labels >= 0):
                gt_idx = labels[pred_idx]
                rows.append(
                    [
                        scene.image_id,
                        int(pred_idx),
                        int(gt_idx),
                        repr(float(cost[pred_idx, gt_idx])),
                    ]
                )
    except (CocoFormatError, OSError) as exc:
        return _fail(str(exc), 1)
    except InfeasibleMatchingError as exc:
        return _fail(f"matching infeasible: {exc}", 1)

    with open(out_path, "w", newline="") as fh:
        fh.write(f"# b={b_value!r}\n# seed={seed!r}\n")
        fh.write(
            f"# w_cls={weights.w_cls!r}\n# w_giou={weights.w_giou!r}\n"
            f"# w_l1={weights.w_l1!r}\n"
        )
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["image_id", "pred_index", "gt_index", "pair_cost"])
        writer.writerows(rows)
    print(f"matched {len(rows)} pairs, total objective {total_objective:.6f}")
    print(f"wrote {out_path}")
    return 0


def cmd_nms(args, parser: argparse.ArgumentParser) -> int:
    stage, _ = _resolve(args.stage, "STAGE", str, "second")
    stage_cfg = STAGE_DEFAULTS[stage]
    thresh, _ = _resolve(args.iou_thresh, "IOU_THRESH", float, stage_cfg["nms"])
    topk, _ = _resolve(args.topk, "TOPK", int, stage_cfg["topk"])
    class_aware = (
        stage_cfg["class_aware"] if args.class_aware is None else args.class_aware
    )
    if not (0.0 <= thresh <= 1.0):
        parser.error(f"--iou-thresh must lie in [0, 1], got {thresh}")
    if topk < 0:
        parser.error(f"--topk must be >= 0, got {topk}")

    try:
        records = read_results_records(args.pred)
    except (CocoFormatError, OSError) as exc:
        return _fail(str(exc), 1)

    by_image: dict[int, list[tuple[int, dict]]] = {}
    for idx, rec in enumerate(records):
        by_image.setdefault(int(rec["image_id"]), []).append((idx, rec))

    survivors: list[dict] = []
    for image_id in sorted(by_image):
        members = by_image[image_id]
        scores = np.asarray([float(r["score"]) for _, r in members])
        order = np.lexsort((np.arange(scores.size), -scores))[:topk]
        members = [members[i] for i in order]
        boxes = np.asarray(
            [
                [r["bbox"][0], r["bbox"][1], r["bbox"][0] + r["bbox"][2], r["bbox"][1] + r["bbox"][3]]
                for _, r in members
            ],
            dtype=np.float64,
        ).reshape(-1, 4)
        scores = np.asarray([float(r["score"]) for _, r in members])
        classes = np.asarray([int(r["category_id"]) for _, r in members])
        kept = nms_arrays(
            boxes, scores, thresh, classes if class_aware else None
        )
        survivors.extend(members[i][1] for i in kept)

    try:
        write_results_records(survivors, args.out)
    except OSError as exc:
        return _fail(str(exc), 1)
    mode = "class-aware" if class_aware else "class-agnostic"
    print(
        f"kept {len(survivors)} of {len(records)} boxes "
        f"({mode}, iou > {thresh} suppressed)"
    )
    return 0


def _bench_boxes(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Clustered detector-like boxes: duplicates piled around object centers."""
    num_objects = max(1, n // 50)
    obj_cx = rng.uniform(0, 800, num_objects)
    obj_cy = rng.uniform(0, 800, num_objects)
    obj_w = rng.uniform(20, 120, num_objects)
    obj_h = rng.uniform(20, 120, num_objects)
    member = rng.integers(num_objects, size=n)
    cx = obj_cx[member] + rng.normal(0, 4, n)
    cy = obj_cy[member] + rng.normal(0, 4, n)
    w = obj_w[member] * np.exp(rng.normal(0, 0.08, n))
    h = obj_h[member] * np.exp(rng.normal(0, 0.08, n))
    boxes = np.stack([cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2], axis=1)
    scores = rng.uniform(0, 1, n)
    return boxes, scores


def _bench_inputs(op: str, size: int, rng: np.random.Generator):
    if op == "nms":
        boxes, scores = _bench_boxes(size, rng)
        return lambda: nms_arrays(boxes, scores, 0.7)
    if op == "hungarian":
        k = max(1, size // 30)
        cost = rng.uniform(0, 1, (size, k))
        return lambda: solve_assignment(cost)
    if op == "iou_assign":
        boxes, _ = _bench_boxes(size, rng)
        k = max(1, size // 240)
        gts = []
        for _ in range(k):
            x1, y1 = rng.uniform(0, 700, 2)
            w, h = rng.uniform(20, 120, 2)
            gts.append(GroundTruth(box=Box(x1, y1, x1 + w, y1 + h), class_id=0))
        cfg = AssignConfig(tau=0.6)
        return lambda: iou_assign(boxes, gts, cfg)
    raise ValueError(f"unknown op {op!r}")


def cmd_bench(args, parser: argparse.ArgumentParser) -> int:
    seed, _ = _resolve(args.seed, "SEED", int, 0)
    runs, _ = _resolve(args.runs, "RUNS", int, 20)
    sizes_raw, _ = _resolve(args.sizes, "SIZES", str, "1000,10000")
    if runs < 1:
        parser.error(f"--runs must be >= 1, got {runs}")
    ops = [op.strip() for op in args.ops.split(",") if op.strip()]
    valid = ("nms", "hungarian", "iou_assign")
    for op in ops:
        if op not in valid:
            parser.error(f"unknown op {op!r}; choose from {valid}")
    try:
        sizes = [int(s) for s in sizes_raw.split(",") if s.strip()]
    except ValueError:
        parser.error(f"--sizes must be comma-separated integers, got {sizes_raw!r}")
    if not sizes or any(s < 1 for s in sizes):
        parser.error(f"--sizes must be positive, got {sizes_raw!r}")

    op_tag = {"nms": 1, "hungarian": 2, "iou_assign": 3}
    lines = [["op", "size", "runs", "median_ms", "mean_ms"]]
    for op in ops:
        for size in sizes:
            rng = np.random.default_rng(np.random.SeedSequence([seed, op_tag[op], size]))
            fn = _bench_inputs(op, size, rng)
            fn()
            fn()  # warm up caches and allocator before timing
            samples = []
            for _ in range(runs):
                start = time.perf_counter()
                fn()
                samples.append((time.perf_counter() - start) * 1000.0)
            lines.append(
                [
                    op,
                    str(size),
                    str(runs),
                    f"{statistics.median(samples):.3f}",
                    f"{statistics.fmean(samples):.3f}",
                ]
            )

    rendered = "\n".join(",".join(row) for row in lines) + "\n"
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(f"# seed={seed!r}\n")
                fh.write(rendered)
        except OSError as exc:
            return _fail(str(exc), 1)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(rendered)
    return 0


def cmd_synth(args, parser: argparse.ArgumentParser) -> int:
    seed, _ = _resolve(args.seed, "SEED", int, 0)
    jitter = _jitter_from_args(args)
    try:
        dataset = _load_dataset(args.ann)
    except (CocoFormatError, OSError) as exc:
        return _fail(str(exc), 1)
    index_to_cat = {v: k for k, v in dataset.category_index.items()}
    records = []
    for scene in sorted(dataset.scenes, key=lambda s: s.image_id):
        preds = synthesize_predictions(
            scene, jitter, _scene_seed(seed, scene.image_id), dataset.num_classes or 1
        )
        for pred in preds:
            x, y, w, h = pred.box.to_xywh()
            cls = pred.top_class
            records.append(
                {
                    "image_id": scene.image_id,
                    "category_id": index_to_cat.get(cls, cls),
                    "bbox": [x, y, w, h],
                    "score": pred.top_score,
                }
            )
    try:
        write_results_records(records, args.out)
    except OSError as exc:
        return _fail(str(exc), 1)
    print(f"wrote {len(records)} predictions to {args.out}")
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    raise SystemExit(main())
