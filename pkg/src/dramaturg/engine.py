"""The hierarchical generation orchestrator.

Runs the title -> characters -> plot -> locations -> dialogues pipeline,
parses each family's tagged output, detects degenerate loops in dialogue
and resamples, and exposes the interactive operations (generate,
continue, edit, accept). Sessions are mutated exclusively by applying
events that are appended to the session history, so replaying a history
from scratch reconstructs the exact state.
"""

from __future__ import annotations

import re
import threading
import uuid
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Callable

from .errors import (
    EmptySlot,
    FullGenerationError,
    InvalidCandidateIndex,
    OutputParseError,
    UnknownSlot,
    UnparseableEdit,
    UpstreamMissing,
)
from .gateway import Gateway, text_digest, truncate_at_marker
from .markers import CHARACTER_TAG, DESCRIPTION_TAG, RESERVED_MARKERS, STOP
from .model import (
    Candidate,
    CharacterSpec,
    GenerationSlot,
    LogLine,
    SamplingConfig,
    Scene,
    SlotKind,
    StorySession,
    parse_address,
    resolve_slot_text,
    unique_locations,
)
from .parsing import parse_characters, parse_plot
from .prompts import (
    Prompt,
    PromptSet,
    render_character_prompt,
    render_dialogue_prompt,
    render_location_prompt,
    render_plot_prompt,
    render_title_prompt,
    select_characters_for_beat,
)
from .scriptio import candidate_from_dict, candidate_to_dict


@dataclass(frozen=True)
class LoopDetectorConfig:
    """Settings for the repeated-block detector applied to dialogue."""

    block_delimiter: str = "\n\n"
    repeat_threshold: int = 3
    max_resamples: int = 5

    def __post_init__(self) -> None:
        if self.repeat_threshold < 2:
            raise ValueError("repeat_threshold must be >= 2")
        if self.max_resamples < 1:
            raise ValueError("max_resamples must be >= 1")
        if not self.block_delimiter:
            raise ValueError("block_delimiter must be non-empty")


def detect_loops(text: str, config: LoopDetectorConfig | None = None) -> dict[str, int]:
    """Frequency of each block, blocks being delimiter-separated chunks.

    The text is split on runs of the block delimiter (two consecutive
    newlines by default), blocks are whitespace-trimmed and empty blocks
    dropped before exact-match counting.
    """
    config = config or LoopDetectorConfig()
    pattern = "(?:" + re.escape(config.block_delimiter) + ")+"
    blocks = [b.strip() for b in re.split(pattern, text)]
    return dict(Counter(b for b in blocks if b))


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# Event application (the single mutation path, shared with replay)
# ---------------------------------------------------------------------------


def apply_created(event: dict) -> StorySession:
    return StorySession(
        id=event["session_id"],
        log_line=LogLine(event["log_line"]),
        prompt_set_name=event["prompt_set_name"],
    )


def apply_mutation(session: StorySession, event: dict) -> None:
    kind = event["type"]
    if kind == "candidate_added":
        slot = session.slot(event["address"])
        slot.candidates.append(candidate_from_dict(event["candidate"]))
        if event.get("cleared_edit") is not None:
            slot.edited_text = None
            slot.edit_render_hash = None
        if event["auto_accepted"]:
            slot.accepted = len(slot.candidates) - 1
        if event["address"] == SlotKind.PLOT.value and event["auto_accepted"]:
            _sync_plot_derivatives(session)
    elif kind == "accepted":
        slot = session.slot(event["address"])
        if not 0 <= event["index"] < len(slot.candidates):
            raise InvalidCandidateIndex(f"candidate index {event['index']} out of range")
        slot.accepted = event["index"]
        if event.get("cleared_edit") is not None:
            slot.edited_text = None
            slot.edit_render_hash = None
        if event["address"] == SlotKind.PLOT.value:
            _sync_plot_derivatives(session)
    elif kind == "edited":
        slot = session.slot(event["address"])
        slot.edited_text = event["text"]
        slot.edit_render_hash = event.get("render_hash")
        if event["address"] == SlotKind.PLOT.value:
            _sync_plot_derivatives(session)
    else:
        raise ValueError(f"unknown event type {kind!r}")


def replay_history(events: list[dict]) -> StorySession:
    """Rebuild a session from scratch by replaying its event log."""
    if not events or events[0]["type"] != "created":
        raise ValueError("history must start with a created event")
    session = apply_created(events[0])
    session.history.append(events[0])
    for event in events[1:]:
        apply_mutation(session, event)
        session.history.append(event)
    return session


def _sync_plot_derivatives(session: StorySession) -> None:
    """Re-derive location and dialogue slots from the resolved plot.

    Scene identity is positional: dialogue slots are truncated or
    extended by position when the scene count changes. Dropped slot
    content stays recoverable by replaying history to the prior state.
    An unparseable plot counts as zero scenes.
    """
    try:
        scenes = parse_plot(resolve_slot_text(session.plot_slot))
    except (OutputParseError, EmptySlot):
        scenes = []
    places = unique_locations(scenes)
    kept = {
        place: session.location_slots.get(place, GenerationSlot(SlotKind.LOCATION, key=place))
        for place in places
    }
    session.location_slots.clear()
    session.location_slots.update(kept)
    del session.dialogue_slots[len(scenes):]
    while len(session.dialogue_slots) < len(scenes):
        session.dialogue_slots.append(
            GenerationSlot(SlotKind.DIALOGUE, key=str(len(session.dialogue_slots)))
        )


@dataclass
class _Generated:
    """Outcome of one gateway round (plus loop resamples) for a slot."""

    text: str
    seed: int
    config: SamplingConfig
    calls: list[dict]
    loop_flagged: bool
    loop_counts: tuple[tuple[str, int], ...]


class Engine:
    """Single orchestrator for one prompt set; sessions pass through it.

    Mutations on one session are serialized through a per-session lock;
    distinct sessions are fully independent. The clock and session-id
    factory are injectable so tests can pin them.
    """

    def __init__(
        self,
        prompt_set: PromptSet,
        gateway: Gateway,
        sampling: SamplingConfig | None = None,
        loop_config: LoopDetectorConfig | None = None,
        clock: Callable[[], str] | None = None,
        id_factory: Callable[[], str] | None = None,
    ):
        self.prompt_set = prompt_set
        self.gateway = gateway
        self.sampling = sampling or SamplingConfig()
        self.loop_config = loop_config or LoopDetectorConfig()
        self._clock = clock or _utc_now
        self._id_factory = id_factory or (lambda: uuid.uuid4().hex)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- session lifecycle --------------------------------------------------

    def new_session(self, log_line: LogLine) -> StorySession:
        event = {
            "type": "created",
            "at": self._clock(),
            "session_id": self._id_factory(),
            "log_line": log_line.text,
            "prompt_set_name": self.prompt_set.name,
        }
        session = apply_created(event)
        session.history.append(event)
        return session

    def _lock_for(self, session: StorySession) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session.id, threading.Lock())

    def _commit(self, session: StorySession, event: dict) -> None:
        apply_mutation(session, event)
        session.history.append(event)

    # -- prompt construction ------------------------------------------------

    def _cast(self, session: StorySession) -> list[CharacterSpec]:
        if not session.character_slot.is_resolvable():
            raise UpstreamMissing("characters")
        try:
            return parse_characters(resolve_slot_text(session.character_slot))
        except OutputParseError as exc:
            raise UpstreamMissing("characters") from exc

    def _scenes(self, session: StorySession) -> list[Scene]:
        if not session.plot_slot.is_resolvable():
            raise UpstreamMissing("plot")
        try:
            return parse_plot(resolve_slot_text(session.plot_slot))
        except OutputParseError as exc:
            raise UpstreamMissing("plot") from exc

    def render_prompt(self, session: StorySession, address: str) -> Prompt:
        """Render the family prompt for a slot from current upstream texts.

        Raises UpstreamMissing when a required upstream slot is not
        resolved, naming that slot.
        """
        kind, key = parse_address(address)
        if kind is SlotKind.TITLE:
            return render_title_prompt(self.prompt_set, session.log_line)
        if kind is SlotKind.CHARACTERS:
            return render_character_prompt(self.prompt_set, session.log_line)
        if kind is SlotKind.PLOT:
            return render_plot_prompt(self.prompt_set, session.log_line, self._cast(session))
        if kind is SlotKind.LOCATION:
            self._scenes(session)
            if key not in session.location_slots:
                raise UnknownSlot(f"no location slot named {key!r}")
            return render_location_prompt(self.prompt_set, session.log_line, key)
        scenes = self._scenes(session)
        index = int(key)
        if not 0 <= index < len(scenes):
            raise UnknownSlot(f"dialogue index {index} out of range")
        scene = scenes[index]
        place = scene.place.strip()
        location_slot = session.location_slots.get(place)
        if location_slot is None or not location_slot.is_resolvable():
            raise UpstreamMissing(f"location:{place}")
        cast = select_characters_for_beat(self._cast(session), scene.beat)
        previous_beat = scenes[index - 1].beat if index > 0 else None
        return render_dialogue_prompt(
            self.prompt_set,
            session.log_line,
            scene,
            previous_beat,
            resolve_slot_text(location_slot).strip(),
            cast,
        )

    # -- generation ---------------------------------------------------------

    def _run_gateway(self, prompt: Prompt, seed: int, dialogue: bool) -> _Generated:
        config = replace(self.sampling, seed=seed)
        completion = self.gateway.complete(prompt, config)
        text = truncate_at_marker(completion.text, list(prompt.stop_markers))
        calls: list[dict] = []
        loop_flagged = False
        counts: dict[str, int] = {}
        if dialogue:
            counts = detect_loops(text, self.loop_config)
            peak = max(counts.values(), default=0)
            calls.append({"seed": seed, "loop_max": peak})
            resamples = 0
            while peak >= self.loop_config.repeat_threshold and resamples < self.loop_config.max_resamples:
                resamples += 1
                seed += 1
                config = replace(self.sampling, seed=seed)
                completion = self.gateway.complete(prompt, config)
                text = truncate_at_marker(completion.text, list(prompt.stop_markers))
                counts = detect_loops(text, self.loop_config)
                peak = max(counts.values(), default=0)
                calls.append({"seed": seed, "loop_max": peak})
            loop_flagged = peak >= self.loop_config.repeat_threshold
        else:
            calls.append({"seed": seed})
        loop_counts = tuple(sorted(counts.items())) if loop_flagged else ()
        return _Generated(text, seed, config, calls, loop_flagged, loop_counts)

    def _candidate_event(
        self,
        session: StorySession,
        address: str,
        prompt: Prompt,
        generated: _Generated,
        raw_text: str,
        continued: bool,
    ) -> dict:
        slot = session.slot(address)
        auto_accepted = continued or not slot.candidates
        candidate = Candidate(
            raw_text=raw_text,
            seed=generated.seed,
            sampling=generated.config,
            prompt_hash=text_digest(prompt.text),
            created_at=self._clock(),
            loop_flagged=generated.loop_flagged,
            loop_counts=generated.loop_counts,
        )
        event = {
            "type": "candidate_added",
            "at": self._clock(),
            "address": address,
            "candidate": candidate_to_dict(candidate),
            "auto_accepted": auto_accepted,
            "gateway_calls": generated.calls,
            "cleared_edit": slot.edited_text,
        }
        if continued:
            event["continued"] = True
        return event

    def generate(self, session: StorySession, address: str, seed: int | None = None) -> Candidate:
        """Generate a new candidate for a slot and append it.

        The first candidate of a slot with no prior candidates is
        auto-accepted; later candidates wait for an explicit accept.
        Regenerating an edited slot clears the edit (the cleared text is
        recorded in the event). Dialogue output goes through the loop
        detector and is resampled with incremented seeds; a candidate
        still looping after max_resamples is appended flagged.
        """
        with self._lock_for(session):
            prompt = self.render_prompt(session, address)
            slot = session.slot(address)
            if seed is None:
                seed = len(slot.candidates)
            kind, _ = parse_address(address)
            generated = self._run_gateway(prompt, seed, dialogue=kind is SlotKind.DIALOGUE)
            event = self._candidate_event(session, address, prompt, generated, generated.text, False)
            self._commit(session, event)
            return session.slot(address).candidates[-1]

    def continue_generation(
        self, session: StorySession, address: str, seed: int | None = None
    ) -> Candidate:
        """Extend the slot's current text with a fresh completion.

        The prompt is the family prompt plus the current resolved text;
        the new candidate holds the concatenated whole and is accepted.
        A completion that immediately emits the end marker produces a
        candidate equal to the prior text.
        """
        with self._lock_for(session):
            slot = session.slot(address)
            if not slot.is_resolvable():
                raise EmptySlot(f"slot {address!r} has nothing to continue")
            base = self.render_prompt(session, address)
            current = resolve_slot_text(slot)
            prompt = Prompt(text=base.text + current, family=base.family, stop_markers=base.stop_markers)
            if seed is None:
                seed = slot.candidates[slot.accepted].seed if slot.accepted is not None else 0
            generated = self._run_gateway(prompt, seed, dialogue=False)
            event = self._candidate_event(
                session, address, prompt, generated, current + generated.text, True
            )
            self._commit(session, event)
            return session.slot(address).candidates[-1]

    # -- interactive operations ----------------------------------------------

    def apply_edit(self, session: StorySession, address: str, new_text: str) -> StorySession:
        """Set a slot's edited text; plot edits re-derive downstream slots.

        Downstream slots are not invalidated; staleness is reported
        separately so the writer decides what to regenerate.
        """
        with self._lock_for(session):
            session.slot(address)  # raises UnknownSlot for missing slots
            kind, _ = parse_address(address)
            # character slots legitimately carry the roster tags
            allowed = (
                {CHARACTER_TAG, DESCRIPTION_TAG, STOP}
                if kind is SlotKind.CHARACTERS
                else set()
            )
            for marker in RESERVED_MARKERS:
                if marker in new_text and marker not in allowed:
                    raise UnparseableEdit(f"edit contains reserved marker {marker!r}")
            if kind is SlotKind.PLOT:
                try:
                    parse_plot(new_text)
                except OutputParseError as exc:
                    raise UnparseableEdit(f"plot edit does not parse: {exc}") from exc
            try:
                render_hash = text_digest(self.render_prompt(session, address).text)
            except Exception:
                render_hash = None
            event = {
                "type": "edited",
                "at": self._clock(),
                "address": address,
                "text": new_text,
                "render_hash": render_hash,
            }
            self._commit(session, event)
            return session

    def accept(self, session: StorySession, address: str, index: int) -> StorySession:
        """Mark a candidate as the slot's accepted text, clearing any edit."""
        with self._lock_for(session):
            slot = session.slot(address)
            if not 0 <= index < len(slot.candidates):
                raise InvalidCandidateIndex(
                    f"slot {address!r} has {len(slot.candidates)} candidates, no index {index}"
                )
            event = {
                "type": "accepted",
                "at": self._clock(),
                "address": address,
                "index": index,
                "cleared_edit": slot.edited_text,
            }
            self._commit(session, event)
            return session

    # -- staleness ------------------------------------------------------------

    def compute_staleness(self, session: StorySession) -> dict[str, bool]:
        """True per address when upstream text changed since the slot's
        current text was generated or edited."""
        result: dict[str, bool] = {}
        for slot in session.all_slots():
            address = slot.address
            baseline: str | None = None
            if slot.edited_text is not None:
                baseline = slot.edit_render_hash
            elif slot.accepted is not None:
                baseline = slot.candidates[slot.accepted].prompt_hash
            if baseline is None:
                result[address] = False
                continue
            try:
                current = text_digest(self.render_prompt(session, address).text)
            except Exception:
                result[address] = False
                continue
            result[address] = current != baseline
        return result

    # -- full pipeline ---------------------------------------------------------

    def generate_full(
        self,
        session: StorySession,
        seed: int = 0,
        parallel: bool = False,
        max_workers: int = 4,
    ) -> StorySession:
        """Fill every unresolved slot in hierarchy order.

        Location and dialogue generations are independent per key and may
        run concurrently; their gateway calls overlap but slot writes are
        committed in canonical order, so the resulting session equals the
        serial one. Errors abort the pipeline tagged with the failing
        slot; completed slots are retained.
        """
        for address in ("title", "characters", "plot"):
            if not session.slot(address).is_resolvable():
                self._generate_tagged(session, address, seed)
        location_addresses = [
            f"location:{name}"
            for name, slot in session.location_slots.items()
            if not slot.is_resolvable()
        ]
        self._generate_stage(session, location_addresses, seed, parallel, max_workers)
        dialogue_addresses = [
            f"dialogue:{i}"
            for i, slot in enumerate(session.dialogue_slots)
            if not slot.is_resolvable()
        ]
        self._generate_stage(session, dialogue_addresses, seed, parallel, max_workers)
        return session

    def _generate_tagged(self, session: StorySession, address: str, seed: int) -> None:
        try:
            self.generate(session, address, seed=seed)
        except Exception as exc:
            raise FullGenerationError(address, exc) from exc

    def _generate_stage(
        self,
        session: StorySession,
        addresses: list[str],
        seed: int,
        parallel: bool,
        max_workers: int,
    ) -> None:
        if not parallel or len(addresses) <= 1:
            for address in addresses:
                self._generate_tagged(session, address, seed)
            return
        prompts: dict[str, Prompt] = {}
        for address in addresses:
            try:
                prompts[address] = self.render_prompt(session, address)
            except Exception as exc:
                raise FullGenerationError(address, exc) from exc

        def run(address: str) -> _Generated:
            kind, _ = parse_address(address)
            return self._run_gateway(prompts[address], seed, dialogue=kind is SlotKind.DIALOGUE)

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            futures = {address: pool.submit(run, address) for address in addresses}
        with self._lock_for(session):
            # commit in canonical order so parallel equals serial execution
            for address in addresses:
                future = futures[address]
                error = future.exception()
                if error is not None:
                    raise FullGenerationError(address, error) from error
                generated = future.result()
                event = self._candidate_event(
                    session, address, prompts[address], generated, generated.text, False
                )
                self._commit(session, event)
