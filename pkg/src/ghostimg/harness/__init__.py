"""Configuration parsing, frame persistence, scenario runs and the ``ghost`` CLI."""

from .config import ScenarioSpec, parse_config
from .fileio import read_frames, write_frames
from .scenarios import RunManifest, run_scenario

__all__ = ["ScenarioSpec", "parse_config", "read_frames", "write_frames", "RunManifest",
           "run_scenario"]
