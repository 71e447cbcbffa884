"""Hierarchical story document: the domain types shared by all subsystems.

A story session holds one generation slot per level of the hierarchy
(title, characters, plot, one slot per unique location, one slot per
scene's dialogue). Slots accumulate candidates; the writer accepts or
edits them. All types here are plain values; sessions are mutated only
through the engine's event log so that replaying the log reconstructs
the exact state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import EmptySlot, InvalidCharacter, InvalidLogLine, InvalidScene
from .markers import END, find_reserved_marker


@dataclass(frozen=True)
class SamplingConfig:
    """Sampling knobs passed to the language model for one generation."""

    nucleus_mass: float = 0.9
    temperature: float = 1.0
    max_tokens: int = 511
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.nucleus_mass <= 1.0:
            raise ValueError("nucleus_mass must be in (0, 1]")
        if self.temperature <= 0.0:
            raise ValueError("temperature must be positive")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class LogLine:
    """One-to-few sentences summarizing the central dramatic conflict."""

    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise InvalidLogLine("log line is empty")
        marker = find_reserved_marker(self.text)
        if marker is not None:
            raise InvalidLogLine(f"log line contains reserved marker {marker!r}")


@dataclass(frozen=True)
class CharacterSpec:
    name: str
    description: str

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise InvalidCharacter("character name is empty")
        if "\n" in self.name:
            raise InvalidCharacter("character name contains a newline")
        if not self.description.strip():
            raise InvalidCharacter(f"character {self.name!r} has no description")
        for value in (self.name, self.description):
            marker = find_reserved_marker(value)
            if marker is not None:
                raise InvalidCharacter(f"character field contains reserved marker {marker!r}")


def validate_character_list(characters: list[CharacterSpec]) -> None:
    """Names must be unique case-insensitively within one cast."""
    seen: set[str] = set()
    for c in characters:
        key = c.name.strip().lower()
        if key in seen:
            raise InvalidCharacter(f"duplicate character name {c.name!r}")
        seen.add(key)


@dataclass(frozen=True)
class ArcScaffold:
    """An ordered vocabulary of narrative-arc labels."""

    name: str
    labels: tuple[str, ...]


FREYTAG = ArcScaffold(
    "freytag",
    (
        "Exposition",
        "Inciting Incident",
        "Conflict",
        "Rising Action",
        "Dilemma",
        "Climax",
        "Falling Action",
        "Resolution",
        "Denouement",
    ),
)

HERO_JOURNEY = ArcScaffold(
    "hero_journey",
    (
        "The Ordinary World",
        "Call to Adventure",
        "Refusal of the Call",
        "Crossing the First Threshold",
        "Tests, Allies, and Enemies",
        "The Approach to the Inmost Cave",
        "The Ordeal",
        "The Reward",
        "The Road Back",
        "The Resurrection",
        "The Return",
    ),
)

ARC_SCAFFOLDS = (FREYTAG, HERO_JOURNEY)

_CANONICAL_LABELS = frozenset(label for s in ARC_SCAFFOLDS for label in s.labels)


def is_canonical_plot_element(label: str) -> bool:
    """True when the label belongs to a shipped arc scaffold.

    Labels are compared after stripping whitespace and trailing periods;
    generated labels usually carry one ("Exposition.").
    """
    return label.strip().rstrip(".").strip() in _CANONICAL_LABELS


@dataclass(frozen=True)
class Scene:
    """One plot-outline entry: a place, an arc label, and a beat summary."""

    place: str
    plot_element: str
    beat: str

    def __post_init__(self) -> None:
        if not self.place.strip():
            raise InvalidScene("scene place is empty")
        if not self.beat.strip():
            raise InvalidScene("scene beat is empty")
        for value in (self.place, self.plot_element, self.beat):
            marker = find_reserved_marker(value)
            if marker is not None:
                raise InvalidScene(f"scene field contains reserved marker {marker!r}")

    @property
    def canonical_element(self) -> bool:
        return is_canonical_plot_element(self.plot_element)


def unique_locations(scenes: list[Scene]) -> list[str]:
    """Distinct scene place names in first-appearance order.

    Names are compared after whitespace trimming, exact case otherwise;
    the trimmed form is returned.
    """
    out: list[str] = []
    seen: set[str] = set()
    for scene in scenes:
        place = scene.place.strip()
        if place not in seen:
            seen.add(place)
            out.append(place)
    return out


class SlotKind(str, Enum):
    TITLE = "title"
    CHARACTERS = "characters"
    PLOT = "plot"
    LOCATION = "location"
    DIALOGUE = "dialogue"


class Provenance(str, Enum):
    GENERATED = "generated"
    EDITED = "edited"
    MIXED = "mixed"


@dataclass(frozen=True)
class Candidate:
    """One model generation for a slot, already truncated at ``<end>``."""

    raw_text: str
    seed: int
    sampling: SamplingConfig
    prompt_hash: str
    created_at: str
    loop_flagged: bool = False
    loop_counts: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        if END in self.raw_text:
            raise ValueError("candidate text still contains the <end> marker")


@dataclass
class GenerationSlot:
    kind: SlotKind
    key: str = ""
    candidates: list[Candidate] = field(default_factory=list)
    accepted: int | None = None
    edited_text: str | None = None
    # Prompt hash captured when the edit was applied; None when an edit was
    # saved while the slot's prompt could not be rendered. Used for staleness.
    edit_render_hash: str | None = None

    def __post_init__(self) -> None:
        if self.accepted is not None and not 0 <= self.accepted < len(self.candidates):
            raise ValueError("accepted index out of range")

    @property
    def provenance(self) -> Provenance:
        if self.edited_text is None:
            return Provenance.GENERATED
        if self.accepted is not None and self.edited_text != self.candidates[self.accepted].raw_text:
            return Provenance.MIXED
        return Provenance.EDITED

    @property
    def is_empty(self) -> bool:
        return not self.candidates and self.edited_text is None

    def is_resolvable(self) -> bool:
        return self.edited_text is not None or self.accepted is not None

    @property
    def address(self) -> str:
        if self.kind in (SlotKind.LOCATION, SlotKind.DIALOGUE):
            return f"{self.kind.value}:{self.key}"
        return self.kind.value


def resolve_slot_text(slot: GenerationSlot) -> str:
    """The slot's effective text: the edit if present, else the accepted candidate."""
    if slot.edited_text is not None:
        return slot.edited_text
    if slot.accepted is not None:
        return slot.candidates[slot.accepted].raw_text
    raise EmptySlot(f"slot {slot.address!r} has no accepted candidate and no edit")


@dataclass
class StorySession:
    """The full hierarchical document plus its append-only event history."""

    id: str
    log_line: LogLine
    prompt_set_name: str
    title_slot: GenerationSlot = field(default_factory=lambda: GenerationSlot(SlotKind.TITLE))
    character_slot: GenerationSlot = field(default_factory=lambda: GenerationSlot(SlotKind.CHARACTERS))
    plot_slot: GenerationSlot = field(default_factory=lambda: GenerationSlot(SlotKind.PLOT))
    location_slots: dict[str, GenerationSlot] = field(default_factory=dict)
    dialogue_slots: list[GenerationSlot] = field(default_factory=list)
    history: list[dict] = field(default_factory=list)

    def slot(self, address: str) -> GenerationSlot:
        """Look up a slot by its address string (see parse_address)."""
        from .errors import UnknownSlot

        kind, key = parse_address(address)
        if kind is SlotKind.TITLE:
            return self.title_slot
        if kind is SlotKind.CHARACTERS:
            return self.character_slot
        if kind is SlotKind.PLOT:
            return self.plot_slot
        if kind is SlotKind.LOCATION:
            if key not in self.location_slots:
                raise UnknownSlot(f"no location slot named {key!r}")
            return self.location_slots[key]
        index = int(key)
        if not 0 <= index < len(self.dialogue_slots):
            raise UnknownSlot(f"dialogue index {index} out of range")
        return self.dialogue_slots[index]

    def all_slots(self) -> list[GenerationSlot]:
        return [
            self.title_slot,
            self.character_slot,
            self.plot_slot,
            *self.location_slots.values(),
            *self.dialogue_slots,
        ]


def parse_address(address: str) -> tuple[SlotKind, str]:
    """Split an address like ``dialogue:3`` or ``location:The well.`` into kind and key."""
    from .errors import UnknownSlot

    if address in (SlotKind.TITLE.value, SlotKind.CHARACTERS.value, SlotKind.PLOT.value):
        return SlotKind(address), ""
    kind, sep, key = address.partition(":")
    if not sep or kind not in (SlotKind.LOCATION.value, SlotKind.DIALOGUE.value):
        raise UnknownSlot(f"malformed slot address {address!r}")
    if kind == SlotKind.DIALOGUE.value:
        if not key.isdigit():
            raise UnknownSlot(f"dialogue address needs a numeric index, got {key!r}")
        return SlotKind.DIALOGUE, key
    if not key:
        raise UnknownSlot("location address needs a name")
    return SlotKind.LOCATION, key


__all__ = [
    "ARC_SCAFFOLDS",
    "ArcScaffold",
    "Candidate",
    "CharacterSpec",
    "FREYTAG",
    "GenerationSlot",
    "HERO_JOURNEY",
    "LogLine",
    "Provenance",
    "SamplingConfig",
    "Scene",
    "SlotKind",
    "StorySession",
    "is_canonical_plot_element",
    "parse_address",
    "resolve_slot_text",
    "unique_locations",
    "validate_character_list",
]
