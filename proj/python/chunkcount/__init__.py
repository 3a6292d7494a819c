"""Chunk-parallel vehicle counting on detection streams."""

import json

from ._core import (
    Detection,
    Error,
    IoError,
    ParseError,
    Scenario,
    Scene,
    SequencingError,
    ValidationError,
    ground_truth_count,
    partition,
    read_detections,
    report_content,
    road_scenario,
    simulate,
    solve_assignment,
    write_detections,
)
from ._core import oracle_json, run_json

__all__ = [
    "Detection",
    "Error",
    "IoError",
    "ParseError",
    "Scenario",
    "Scene",
    "SequencingError",
    "ValidationError",
    "ground_truth_count",
    "oracle",
    "partition",
    "read_detections",
    "report_content",
    "road_scenario",
    "run",
    "simulate",
    "solve_assignment",
    "write_detections",
]


def run(detections, scene, chunks=1, workers=1, dedup=True, total_frames=None, scene_label=""):
    """Count with `chunks` chunks on `workers` threads; returns the report as a dict."""
    return json.loads(run_json(detections, scene, chunks, workers, dedup, total_frames, scene_label))


def oracle(detections, scene, total_frames=None, scene_label=""):
    """Single-pass count of the whole stream; returns the report as a dict."""
    return json.loads(oracle_json(detections, scene, total_frames, scene_label))
