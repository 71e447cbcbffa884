"""Parsers for the tagged text each prompt family makes the model emit."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (
    EmptyTitle,
    InvalidCharacter,
    MalformedScene,
    NoCharactersFound,
    NoScenesFound,
)
from .gateway import truncate_at_marker
from .markers import CHARACTER_TAG, DESCRIPTION_TAG, END, STOP
from .model import CharacterSpec, Scene

_PLACE_PREFIX = "Place:"
_ELEMENT_PREFIX = "Plot element:"
_BEAT_PREFIX = "Beat:"


def parse_title(raw: str) -> str:
    """Trimmed single-line title; trailing periods are preserved."""
    for line in raw.split("\n"):
        title = line.strip()
        if title:
            return title
    raise EmptyTitle("model returned no title text")


def parse_characters(raw: str) -> list[CharacterSpec]:
    """Parse ``<character>NAME <description>DESC<stop>`` units.

    A final unit lacking ``<stop>`` is accepted (the model ran out of
    tokens). Units without a description tag are dropped as noise.
    Duplicate names keep the first occurrence (case-insensitive).
    """
    text = truncate_at_marker(raw, [END])
    characters: list[CharacterSpec] = []
    seen: set[str] = set()
    for unit in text.split(CHARACTER_TAG)[1:]:
        unit = unit.split(STOP)[0]
        name, sep, description = unit.partition(DESCRIPTION_TAG)
        if not sep:
            continue
        name = name.strip()
        description = description.strip()
        if not name or not description:
            continue
        if name.lower() in seen:
            continue
        seen.add(name.lower())
        try:
            characters.append(CharacterSpec(name=name, description=description))
        except InvalidCharacter:
            continue
    if not characters:
        raise NoCharactersFound("no <character> units found in output")
    return characters


def parse_plot(raw: str) -> list[Scene]:
    """Parse repeated Place / Plot element / Beat triples into scenes.

    Beat text may span multiple lines until the next ``Place:`` line or
    the end of text; anything after ``<end>`` is ignored. A triple with
    a missing field raises MalformedScene with its 1-based ordinal.
    """
    text = truncate_at_marker(raw, [END])
    scenes: list[Scene] = []
    place: str | None = None
    element: str | None = None
    beat_lines: list[str] | None = None

    def close_scene() -> None:
        nonlocal place, element, beat_lines
        if place is None:
            return
        ordinal = len(scenes) + 1
        if element is None:
            raise MalformedScene(ordinal, f"scene {ordinal} has no {_ELEMENT_PREFIX!r} line")
        beat = "\n".join(beat_lines).strip() if beat_lines else ""
        if not beat:
            raise MalformedScene(ordinal, f"scene {ordinal} has no beat text")
        scenes.append(Scene(place=place, plot_element=element, beat=beat))
        place = element = beat_lines = None

    for line in text.split("\n"):
        stripped = line.strip()
        if stripped.startswith(_PLACE_PREFIX):
            close_scene()
            place = stripped[len(_PLACE_PREFIX):].strip()
        elif place is None:
            continue  # preamble before the first scene
        elif element is None and stripped.startswith(_ELEMENT_PREFIX):
            element = stripped[len(_ELEMENT_PREFIX):].strip()
        elif beat_lines is None and stripped.startswith(_BEAT_PREFIX):
            beat_lines = [stripped[len(_BEAT_PREFIX):].strip()]
        elif beat_lines is not None:
            beat_lines.append(line.rstrip())
        elif stripped:
            raise MalformedScene(
                len(scenes) + 1,
                f"scene {len(scenes) + 1}: unexpected line {stripped!r}",
            )
    close_scene()
    if not scenes:
        raise NoScenesFound("no Place/Plot element/Beat triples in output")
    return scenes


def render_scenes(scenes: list[Scene]) -> str:
    """Serialize scenes back to the generated plot-outline format."""
    blocks = [
        f"{_PLACE_PREFIX} {s.place}\n{_ELEMENT_PREFIX} {s.plot_element}\n{_BEAT_PREFIX} {s.beat}"
        for s in scenes
    ]
    return "\n\n".join(blocks)


@dataclass(frozen=True)
class DialogueLine:
    """One parsed dialogue entry.

    Spoken turns have a non-empty upper-case speaker; standalone stage
    directions (and any free text that matches no cue) have an empty
    speaker and carry their text in ``stage_direction``.
    """

    speaker: str
    stage_direction: str | None = None
    utterance: str = ""


_CUE_RE = re.compile(r"^(?P<name>[^a-z()]+?)(?:\s*(?P<paren>\(.*\)))?$")


def _match_cue(line: str) -> tuple[str, str | None] | None:
    match = _CUE_RE.match(line)
    if not match:
        return None
    name = match.group("name").strip()
    if not name or not any(c.isalpha() for c in name):
        return None
    return name, match.group("paren")


class _Turns:
    def __init__(self) -> None:
        self.entries: list[dict] = []
        self.current: dict | None = None

    def open_turn(self, speaker: str, direction: str | None) -> None:
        self.current = {
            "speaker": speaker,
            "directions": [direction] if direction else [],
            "utterance": [],
        }
        self.entries.append(self.current)

    def add_direction(self, direction: str) -> None:
        if self.current is not None and not self.current["utterance"]:
            self.current["directions"].append(direction)
        else:
            self.entries.append({"speaker": "", "directions": [direction], "utterance": []})
            self.current = None

    def add_text(self, text: str) -> None:
        if self.current is not None:
            self.current["utterance"].append(text)
        else:
            # free text with no cue: kept as a stage direction
            self.entries.append({"speaker": "", "directions": [text], "utterance": []})


def parse_dialogue(raw: str) -> list[DialogueLine]:
    """Parse speaker-cue formatted dialogue.

    An all-caps line starts a new turn (an inline trailing parenthetical
    becomes its stage direction). Lines fully enclosed in parentheses,
    possibly spanning several lines, become stage directions: attached
    to the open turn when it has no utterance yet, standalone otherwise.
    Everything else is utterance text for the open turn.
    """
    text = truncate_at_marker(raw, [END])
    turns = _Turns()
    paren_block: list[str] | None = None

    for line in text.split("\n"):
        stripped = line.strip()
        if paren_block is not None:
            paren_block.append(stripped)
            if stripped.endswith(")"):
                turns.add_direction("\n".join(paren_block))
                paren_block = None
            continue
        if not stripped:
            continue
        if stripped.startswith("("):
            close = stripped.find(")")
            if close == -1:
                paren_block = [stripped]
            elif close == len(stripped) - 1:
                turns.add_direction(stripped)
            else:
                turns.add_direction(stripped[: close + 1])
                turns.add_text(stripped[close + 1 :].strip())
            continue
        cue = _match_cue(stripped)
        if cue is not None:
            turns.open_turn(cue[0], cue[1])
            continue
        turns.add_text(stripped)

    if paren_block is not None:
        # unclosed parenthetical at end of text
        turns.add_direction("\n".join(paren_block))

    out: list[DialogueLine] = []
    for entry in turns.entries:
        direction = " ".join(entry["directions"]) if entry["directions"] else None
        out.append(
            DialogueLine(
                speaker=entry["speaker"],
                stage_direction=direction,
                utterance="\n".join(entry["utterance"]),
            )
        )
    return out
