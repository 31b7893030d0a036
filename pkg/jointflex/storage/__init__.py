"""Scene and trace file storage."""
from jointflex.storage.scene_files import (
    SceneDocument,
    load_scene,
    parse_scene,
    parse_scene_document,
    save_scene,
    serialize_scene,
)
from jointflex.storage.trace_files import build_trace, read_trace, replay_trace, write_trace

__all__ = [
    "SceneDocument",
    "build_trace",
    "load_scene",
    "parse_scene",
    "parse_scene_document",
    "read_trace",
    "replay_trace",
    "save_scene",
    "serialize_scene",
    "write_trace",
]
