#!/usr/bin/env python3
"""Generate a small random COCO-style annotation file for experiments."""

import argparse
import json

import numpy as np

from assignkit import CocoDataset, dataset_to_coco, random_scene


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True, help="annotation JSON to write")
    parser.add_argument("--num-images", type=int, default=20)
    parser.add_argument("--width", type=float, default=640.0)
    parser.add_argument("--height", type=float, default=480.0)
    parser.add_argument("--max-gts", type=int, default=12)
    parser.add_argument("--num-classes", type=int, default=10)
    parser.add_argument(
        "--crowd-prob", type=float, default=0.0, help="chance a box is crowd-flagged"
    )
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


def main() -> int:
    args = parse_args()
    rng = np.random.default_rng(args.seed)
    scenes = []
    for image_id in range(1, args.num_images + 1):
        scene = random_scene(
            image_id,
            args.width,
            args.height,
            rng,
            max_gts=args.max_gts,
            num_classes=args.num_classes,
        )
        if args.crowd_prob > 0.0 and scene.gts:
            flips = rng.uniform(size=len(scene.gts)) < args.crowd_prob
            gts = tuple(
                g if not flip else type(g)(box=g.box, class_id=g.class_id, is_crowd=True)
                for g, flip in zip(scene.gts, flips)
            )
            scene = type(scene)(
                image_id=scene.image_id,
                width=scene.width,
                height=scene.height,
                gts=gts,
            )
        scenes.append(scene)

    dataset = CocoDataset(
        scenes=scenes,
        category_index={c: c for c in range(args.num_classes)},
        category_names={c: f"class_{c}" for c in range(args.num_classes)},
    )
    with open(args.out, "w") as fh:
        json.dump(dataset_to_coco(dataset), fh)
    total = sum(len(s.gts) for s in scenes)
    print(f"wrote {args.num_images} images / {total} boxes to {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
