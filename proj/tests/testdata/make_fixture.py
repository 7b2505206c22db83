#!/usr/bin/env python3
# Copyright 2026 The Motiontrace Authors.
# SPDX-License-Identifier: Apache-2.0
"""Writes the synthetic two-video fixture used by the tests.

Motion is linear and depth is affine in (column, frame), so every grounding
number can be worked out by hand. Depth files are packed here with struct,
independently of the C++ encoder.
"""

import json
import os
import struct
import sys

W, H = 32, 24


def write_depth(directory, frame, fn, skip=False):
    if skip:
        return
    values = [fn(col, row, frame) for row in range(H) for col in range(W)]
    path = os.path.join(directory, "depth_%06d.bin" % frame)
    with open(path, "wb") as f:
        f.write(b"MGD1" + struct.pack("<III", W, H, frame))
        f.write(struct.pack("<%df" % len(values), *values))


def write_jsonl(path, rows):
    with open(path, "w", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")


def clip_a(root):
    # 48 frames at 8 fps: six 8-frame segments.
    d = os.path.join(root, "clip_a")
    os.makedirs(os.path.join(d, "depth"), exist_ok=True)
    dets = []
    for f in range(24):  # ball, segments 0-2
        x = 4 + 0.5 * f
        dets.append({"frame": f, "entity": "ball",
                     "bbox": [x - 2, 10, x + 2, 14], "score": 0.9})
    for f in range(16, 48):  # cup, segments 2-5
        dets.append({"frame": f, "entity": "cup", "bbox": [20, 4, 26, 10],
                     "score": 0.8 if f != 30 else 0.95})
    dets.append({"frame": 40, "entity": "ball", "bbox": [1, 1, 3, 3],
                 "score": 0.2})  # below threshold, ignored
    write_jsonl(os.path.join(d, "detections.jsonl"), dets)

    ball = []
    for dy in (12, 13):
        ball.append([[4 + 0.5 * f, dy, 1 if f < 24 else 0] for f in range(48)])
    cup = [[[23, 7, 1 if f >= 16 else 0] for f in range(48)]]
    with open(os.path.join(d, "tracks.json"), "w") as f:
        json.dump([{"entity_label": "ball", "points": ball},
                   {"entity_label": "cup", "points": cup}], f)

    for f in range(48):
        # Frame 45 has no depth file.
        write_depth(os.path.join(d, "depth"), f,
                    lambda c, r, t: 2.0 + 0.0625 * t, skip=(f == 45))


def clip_b(root, corrupt=False):
    # 40 frames at 10 fps: five 8-frame segments.
    name = "clip_bad" if corrupt else "clip_b"
    d = os.path.join(root, name)
    os.makedirs(os.path.join(d, "depth"), exist_ok=True)
    dets = []
    for f in range(0, 40, 2):
        x, y = 6 + 0.25 * f, 4 + 0.25 * f
        dets.append({"frame": f, "entity": "person",
                     "bbox": [x - 3, y - 3, x + 3, y + 3], "score": 0.7})
    write_jsonl(os.path.join(d, "detections.jsonl"), dets)
    points = []
    for k in range(3):
        points.append([[6 + 0.25 * f, 4 + 0.25 * f + k, 1]
                       for f in range(40)])
    with open(os.path.join(d, "tracks.json"), "w") as f:
        json.dump([{"entity_label": "person", "points": points}], f)
    for f in range(40):
        write_depth(os.path.join(d, "depth"), f,
                    lambda c, r, t: 2.0 + c / 16.0)
    if corrupt:
        path = os.path.join(d, "depth", "depth_000003.bin")
        with open(path, "r+b") as fh:
            fh.truncate(40)


def main(root):
    clip_a(root)
    clip_b(root)
    clip_b(root, corrupt=True)

    def entry(video_id, frames, fps):
        return {"video_id": video_id, "width": W, "height": H, "fps": fps,
                "frame_count": frames,
                "detections": video_id + "/detections.jsonl",
                "tracks": video_id + "/tracks.json",
                "depth_dir": video_id + "/depth"}

    with open(os.path.join(root, "dataset.json"), "w") as f:
        json.dump({"videos": [entry("clip_a", 48, 8.0),
                              entry("clip_b", 40, 10.0)]}, f, indent=2)
    with open(os.path.join(root, "dataset_corrupt.json"), "w") as f:
        json.dump({"videos": [entry("clip_a", 48, 8.0),
                              entry("clip_bad", 40, 10.0)]}, f, indent=2)
    qa = [
        {"id": "a1", "video_id": "clip_a",
         "question": "Which way does the ball roll before the cup appears?",
         "ground_truth": "The ball rolls to the right, toward the cup.",
         "question_type": "factual", "category": "MAR",
         "polarity": "positive", "entities": ["ball", "cup"]},
        {"id": "b1", "video_id": "clip_b",
         "question": "Does the person stop walking at any point?",
         "ground_truth": "No, the person keeps walking diagonally.",
         "question_type": "critical", "category": "PA",
         "polarity": "negative", "entities": []},
    ]
    write_jsonl(os.path.join(root, "qa.jsonl"), qa)
    bad_qa = [dict(qa[0]), dict(qa[1], video_id="clip_bad", id="bad1")]
    write_jsonl(os.path.join(root, "qa_corrupt.jsonl"), bad_qa)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else
         os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixture"))
