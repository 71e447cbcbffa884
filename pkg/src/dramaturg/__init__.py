"""Dramaturg: interactive hierarchical script co-writing."""

from .engine import Engine, LoopDetectorConfig, detect_loops, replay_history
from .gateway import Gateway, HttpBackend, MockBackend, mock_script, truncate_at_marker
from .model import (
    Candidate,
    CharacterSpec,
    GenerationSlot,
    LogLine,
    Provenance,
    SamplingConfig,
    Scene,
    SlotKind,
    StorySession,
    resolve_slot_text,
    unique_locations,
)
from .prompts import (
    Prompt,
    PromptSet,
    builtin_prompt_set,
    builtin_prompt_set_names,
    load_prompt_set,
    select_characters_for_beat,
)
from .scriptio import (
    assemble_script,
    export_plaintext,
    load_session,
    render_partial_script,
    save_session,
    sessions_equal,
)

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "CharacterSpec",
    "Engine",
    "Gateway",
    "GenerationSlot",
    "HttpBackend",
    "LogLine",
    "LoopDetectorConfig",
    "MockBackend",
    "Prompt",
    "PromptSet",
    "Provenance",
    "SamplingConfig",
    "Scene",
    "SlotKind",
    "StorySession",
    "assemble_script",
    "builtin_prompt_set",
    "builtin_prompt_set_names",
    "detect_loops",
    "export_plaintext",
    "load_prompt_set",
    "load_session",
    "mock_script",
    "render_partial_script",
    "replay_history",
    "resolve_slot_text",
    "save_session",
    "select_characters_for_beat",
    "sessions_equal",
    "truncate_at_marker",
    "unique_locations",
]
