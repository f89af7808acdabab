#!/usr/bin/env python3
"""Regenerates the deterministic test fixtures under tests/data.

  visthink_shape.jsonl   34-task manifest with 970/317/308 samples per category
  smoke/                 12-sample manifest with tiny PNG images
"""
import json
import struct
import zlib
from pathlib import Path

ROOT = Path(__file__).resolve().parents[2] / "tests" / "data"

PERCEPTION = [
    "image quality assessment", "counting", "fine-grained recognition", "OCR", "existence",
    "hallucination check", "image emotion", "color recognition", "attribute recognition",
    "low-light perception", "scene recognition", "landmark recognition", "celebrity recognition",
    "object localization", "image topic", "artwork recognition",
]
LOGIC = [
    "occlusion reasoning", "future prediction", "chart reasoning", "physical reasoning",
    "function reasoning", "math reasoning", "visual analogy", "pattern induction", "visual puzzle",
]
SPATIAL = [
    "position", "spatial relation", "3d pose", "view transformation", "rotation reasoning",
    "multi-view correspondence", "depth ordering", "geometry reasoning", "assembly sequence",
]
SOURCES = {
    "Perception": ["MME", "MMBench", "SEED", "MMStar", "R-Bench", "Q-Bench"],
    "LogicReasoning": ["EMMA", "MMBench", "SEED", "KiVA", "MMStar", "HallusionBench"],
    "SpatialReasoning": ["LogicVista", "LEGO", "Spatial-457", "MMBench"],
}
TOTALS = {"Perception": 970, "LogicReasoning": 317, "SpatialReasoning": 308}
COLORS = ["red", "blue", "green", "yellow", "purple", "orange", "black", "white"]


def png(width, height, rgb):
    raw = b"".join(b"\x00" + bytes(rgb) * width for _ in range(height))

    def chunk(tag, data):
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    ihdr = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", ihdr) + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b"")


def options_for(i):
    start = i % len(COLORS)
    texts = [COLORS[(start + k) % len(COLORS)] for k in range(4)]
    return [{"label": l, "text": t} for l, t in zip("ABCD", texts)]


def shape_manifest():
    lines = []
    for category, tasks in (("Perception", PERCEPTION), ("LogicReasoning", LOGIC), ("SpatialReasoning", SPATIAL)):
        total = TOTALS[category]
        base, extra = divmod(total, len(tasks))
        for t, task in enumerate(tasks):
            count = base + (1 if t < extra else 0)
            for k in range(count):
                n = len(lines)
                opts = options_for(n)
                lines.append({
                    "sample_id": f"vt-{n:05d}",
                    "image": f"images/vt-{n:05d}.png",
                    "question": f"Which color best describes the highlighted object? ({task} #{k})",
                    "options": opts,
                    "answer": "ABCD"[n % 4],
                    "task": task,
                    "category": category,
                    "source": SOURCES[category][t % len(SOURCES[category])],
                })
    assert len(lines) == 1595
    return lines


def smoke():
    tasks = [
        ("counting", "Perception", "MME", "How many objects are in the picture?", ["one", "two", "three", "four"]),
        ("color recognition", "Perception", "MMStar", "What color is the square?", ["red", "green", "blue", "gray"]),
        ("chart reasoning", "LogicReasoning", "SEED", "Which bar in the chart is tallest?", ["left", "middle", "right", "none"]),
        ("visual puzzle", "LogicReasoning", "KiVA", "Which panel completes the sequence?", ["first", "second", "third", "fourth"]),
        ("spatial relation", "SpatialReasoning", "MMBench", "Where is the cup relative to the plate?", ["above", "below", "beside", "inside"]),
        ("depth ordering", "SpatialReasoning", "Spatial-457", "Which object is closest to the camera?", ["tree", "car", "house", "bench"]),
    ]
    dir_ = ROOT / "smoke"
    (dir_ / "images").mkdir(parents=True, exist_ok=True)
    records = []
    for i in range(12):
        task, cat, src, q, texts = tasks[i % len(tasks)]
        sid = f"smoke-{i:02d}"
        rgb = ((37 * i) % 256, (91 * i + 40) % 256, (53 * i + 90) % 256)
        (dir_ / "images" / f"{sid}.png").write_bytes(png(8, 8, rgb))
        records.append({
            "sample_id": sid,
            "image": f"images/{sid}.png",
            "question": q,
            "options": [{"label": l, "text": t} for l, t in zip("ABCD", texts)],
            "answer": "ABCD"[(i * 3) % 4],
            "task": task,
            "category": cat,
            "source": src,
        })
    write_jsonl(dir_ / "manifest.jsonl", records)


def write_jsonl(path, records):
    with open(path, "w", newline="\n") as f:
        for r in records:
            f.write(json.dumps(r, separators=(",", ":")) + "\n")


if __name__ == "__main__":
    write_jsonl(ROOT / "visthink_shape.jsonl", shape_manifest())
    smoke()
