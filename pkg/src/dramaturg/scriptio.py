"""Session persistence, script assembly and plain-text export.

Sessions are stored as versioned JSON documents (``.dramaturg.json``),
human-inspectable and diff-friendly, with history events as an ordered
array of tagged records. Saves are atomic (write to a temp file in the
same directory, then rename).

Export layout, pinned by golden tests::

    {TITLE}

    CHARACTERS

    {name}: {description}          (one block per character)

    SCENE {n} — {place} ({plot element})

    {location description}

    [{beat}]

    SPEAKER
      utterance lines indented by two spaces

    (standalone stage directions verbatim)
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import IncompleteSession, SerializationError, VersionMismatch
from .model import (
    Candidate,
    CharacterSpec,
    GenerationSlot,
    LogLine,
    SamplingConfig,
    Scene,
    SlotKind,
    StorySession,
    resolve_slot_text,
)
from .parsing import DialogueLine, parse_characters, parse_dialogue, parse_plot, parse_title

FORMAT_VERSION = 1

_TIMESTAMP_KEYS = frozenset({"at", "created_at"})


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def sampling_to_dict(config: SamplingConfig) -> dict:
    return {
        "nucleus_mass": config.nucleus_mass,
        "temperature": config.temperature,
        "max_tokens": config.max_tokens,
        "seed": config.seed,
    }


def sampling_from_dict(data: dict) -> SamplingConfig:
    return SamplingConfig(
        nucleus_mass=data["nucleus_mass"],
        temperature=data["temperature"],
        max_tokens=data["max_tokens"],
        seed=data["seed"],
    )


def candidate_to_dict(candidate: Candidate) -> dict:
    return {
        "raw_text": candidate.raw_text,
        "seed": candidate.seed,
        "sampling": sampling_to_dict(candidate.sampling),
        "prompt_hash": candidate.prompt_hash,
        "created_at": candidate.created_at,
        "loop_flagged": candidate.loop_flagged,
        "loop_counts": [[block, count] for block, count in candidate.loop_counts],
    }


def candidate_from_dict(data: dict) -> Candidate:
    return Candidate(
        raw_text=data["raw_text"],
        seed=data["seed"],
        sampling=sampling_from_dict(data["sampling"]),
        prompt_hash=data["prompt_hash"],
        created_at=data["created_at"],
        loop_flagged=data.get("loop_flagged", False),
        loop_counts=tuple((block, count) for block, count in data.get("loop_counts", [])),
    )


def slot_to_dict(slot: GenerationSlot) -> dict:
    return {
        "kind": slot.kind.value,
        "key": slot.key,
        "candidates": [candidate_to_dict(c) for c in slot.candidates],
        "accepted": slot.accepted,
        "edited_text": slot.edited_text,
        "edit_render_hash": slot.edit_render_hash,
    }


def slot_from_dict(data: dict) -> GenerationSlot:
    return GenerationSlot(
        kind=SlotKind(data["kind"]),
        key=data["key"],
        candidates=[candidate_from_dict(c) for c in data["candidates"]],
        accepted=data["accepted"],
        edited_text=data["edited_text"],
        edit_render_hash=data.get("edit_render_hash"),
    )


def session_to_dict(session: StorySession) -> dict:
    return {
        "id": session.id,
        "log_line": session.log_line.text,
        "prompt_set_name": session.prompt_set_name,
        "title": slot_to_dict(session.title_slot),
        "characters": slot_to_dict(session.character_slot),
        "plot": slot_to_dict(session.plot_slot),
        "locations": [[name, slot_to_dict(slot)] for name, slot in session.location_slots.items()],
        "dialogues": [slot_to_dict(slot) for slot in session.dialogue_slots],
        "history": list(session.history),
    }


def session_from_dict(data: dict) -> StorySession:
    return StorySession(
        id=data["id"],
        log_line=LogLine(data["log_line"]),
        prompt_set_name=data["prompt_set_name"],
        title_slot=slot_from_dict(data["title"]),
        character_slot=slot_from_dict(data["characters"]),
        plot_slot=slot_from_dict(data["plot"]),
        location_slots={name: slot_from_dict(slot) for name, slot in data["locations"]},
        dialogue_slots=[slot_from_dict(slot) for slot in data["dialogues"]],
        history=list(data["history"]),
    )


def save_session(session: StorySession, path: str | Path) -> None:
    """Atomically write the session file (temp file + rename)."""
    path = Path(path)
    payload = {"format_version": FORMAT_VERSION, "session": session_to_dict(session)}
    text = json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def load_session(path: str | Path) -> StorySession:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SerializationError(f"cannot read session file: {exc}") from exc
    try:
        payload = json.loads(raw)
    except ValueError as exc:
        raise SerializationError(f"session file is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise SerializationError("session file has no format_version field")
    if payload["format_version"] != FORMAT_VERSION:
        raise VersionMismatch(
            f"session format {payload['format_version']} is not supported (expected {FORMAT_VERSION})"
        )
    try:
        return session_from_dict(payload["session"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError(f"malformed session document: {exc}") from exc


def scrub_timestamps(value):
    """Copy of a JSON-ish structure with timestamp fields pinned."""
    if isinstance(value, dict):
        return {
            key: ("<t>" if key in _TIMESTAMP_KEYS else scrub_timestamps(item))
            for key, item in value.items()
        }
    if isinstance(value, list):
        return [scrub_timestamps(item) for item in value]
    return value


def sessions_equal(a: StorySession, b: StorySession, ignore_timestamps: bool = False) -> bool:
    left, right = session_to_dict(a), session_to_dict(b)
    if ignore_timestamps:
        left, right = scrub_timestamps(left), scrub_timestamps(right)
    return left == right


# ---------------------------------------------------------------------------
# Assembly and export
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SceneBundle:
    scene: Scene
    location_description: str
    dialogue: list[DialogueLine]


@dataclass(frozen=True)
class ScriptDocument:
    title: str
    log_line: str
    characters: list[CharacterSpec]
    scenes: list[SceneBundle]
    provenance_summary: dict[str, str]


def missing_slots(session: StorySession) -> list[str]:
    return [slot.address for slot in session.all_slots() if not slot.is_resolvable()]


def provenance_summary(session: StorySession) -> dict[str, str]:
    return {
        slot.address: slot.provenance.value
        for slot in session.all_slots()
        if not slot.is_empty
    }


def assemble_script(session: StorySession) -> ScriptDocument:
    """Build the deterministic script document from resolved slot texts.

    Pure: the session is never mutated. Raises IncompleteSession listing
    every unresolved slot address.
    """
    missing = missing_slots(session)
    if missing:
        raise IncompleteSession(missing)
    title = parse_title(resolve_slot_text(session.title_slot))
    characters = parse_characters(resolve_slot_text(session.character_slot))
    scenes = parse_plot(resolve_slot_text(session.plot_slot))
    bundles = []
    for index, scene in enumerate(scenes):
        place = scene.place.strip()
        description = resolve_slot_text(session.location_slots[place]).strip()
        dialogue = parse_dialogue(resolve_slot_text(session.dialogue_slots[index]))
        bundles.append(SceneBundle(scene, description, dialogue))
    return ScriptDocument(
        title=title,
        log_line=session.log_line.text,
        characters=characters,
        scenes=bundles,
        provenance_summary=provenance_summary(session),
    )


def _character_block(characters: list[CharacterSpec]) -> list[str]:
    lines = ["CHARACTERS", ""]
    for character in characters:
        lines.append(f"{character.name}: {character.description}")
        lines.append("")
    return lines


def _dialogue_block(dialogue: list[DialogueLine]) -> list[str]:
    lines: list[str] = []
    for turn in dialogue:
        if turn.speaker:
            lines.append(turn.speaker)
            if turn.stage_direction:
                lines.extend(turn.stage_direction.split("\n"))
            if turn.utterance:
                lines.extend("  " + text for text in turn.utterance.split("\n"))
        else:
            lines.extend((turn.stage_direction or "").split("\n"))
        lines.append("")
    return lines


def _scene_block(
    number: int,
    scene: Scene,
    location_description: str | None,
    dialogue: list[DialogueLine] | None,
) -> list[str]:
    lines = [f"SCENE {number} — {scene.place.strip()} ({scene.plot_element})", ""]
    if location_description:
        lines.append(location_description)
        lines.append("")
    lines.append(f"[{scene.beat}]")
    lines.append("")
    if dialogue:
        lines.extend(_dialogue_block(dialogue))
    return lines


def export_plaintext(document: ScriptDocument) -> str:
    """Render a complete script document to the documented layout."""
    lines: list[str] = [document.title, ""]
    lines.extend(_character_block(document.characters))
    for number, bundle in enumerate(document.scenes, start=1):
        lines.extend(_scene_block(number, bundle.scene, bundle.location_description, bundle.dialogue))
    return "\n".join(lines).rstrip("\n") + "\n"


def render_partial_script(session: StorySession) -> str:
    """Export whatever is resolved so far, using the same layout.

    On a complete session the output is byte-identical to
    ``export_plaintext(assemble_script(session))``.
    """

    def resolved(slot: GenerationSlot) -> str | None:
        return resolve_slot_text(slot) if slot.is_resolvable() else None

    lines: list[str] = []
    title_text = resolved(session.title_slot)
    if title_text is not None:
        lines.extend([parse_title(title_text), ""])
    character_text = resolved(session.character_slot)
    if character_text is not None:
        lines.extend(_character_block(parse_characters(character_text)))
    plot_text = resolved(session.plot_slot)
    if plot_text is not None:
        scenes = parse_plot(plot_text)
        for index, scene in enumerate(scenes):
            place = scene.place.strip()
            location_slot = session.location_slots.get(place)
            description = resolved(location_slot) if location_slot else None
            dialogue_slot = (
                session.dialogue_slots[index] if index < len(session.dialogue_slots) else None
            )
            dialogue_text = resolved(dialogue_slot) if dialogue_slot else None
            lines.extend(
                _scene_block(
                    index + 1,
                    scene,
                    description.strip() if description is not None else None,
                    parse_dialogue(dialogue_text) if dialogue_text is not None else None,
                )
            )
    if not lines:
        return ""
    return "\n".join(lines).rstrip("\n") + "\n"


__all__ = [
    "FORMAT_VERSION",
    "SceneBundle",
    "ScriptDocument",
    "assemble_script",
    "candidate_from_dict",
    "candidate_to_dict",
    "export_plaintext",
    "load_session",
    "missing_slots",
    "provenance_summary",
    "render_partial_script",
    "save_session",
    "scrub_timestamps",
    "session_from_dict",
    "session_to_dict",
    "sessions_equal",
    "slot_from_dict",
    "slot_to_dict",
]
