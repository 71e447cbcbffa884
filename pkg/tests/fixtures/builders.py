"""Random-but-valid session builders for round-trip and determinism tests."""

import random

from dramaturg.engine import Engine
from dramaturg.gateway import Gateway, MockBackend
from dramaturg.model import LogLine, StorySession
from dramaturg.prompts import PromptSet

_WORDS = [
    "river", "lantern", "quarrel", "harbor", "signal", "opera", "vault",
    "garden", "comet", "whisper", "ledger", "thaw",
]


def random_session(prompt_set: PromptSet, rng: random.Random) -> StorySession:
    """Drive a mock-backed engine through a random operation sequence."""
    backend = MockBackend()
    engine = Engine(
        prompt_set,
        Gateway(backend),
        clock=lambda: f"2026-01-01T00:00:{rng.randrange(60):02d}+00:00",
        id_factory=lambda: f"s{rng.randrange(10**9)}",
    )
    words = rng.sample(_WORDS, 4)
    session = engine.new_session(LogLine(f"A story of the {words[0]} and the {words[1]}."))
    engine.generate(session, "title", seed=rng.randrange(5))
    engine.generate(session, "characters", seed=rng.randrange(5))
    engine.generate(session, "plot", seed=rng.randrange(5))
    for _ in range(rng.randrange(4)):
        op = rng.choice(["regen_title", "edit_title", "accept_title", "gen_location", "edit_dialogue"])
        if op == "regen_title":
            engine.generate(session, "title", seed=rng.randrange(9))
        elif op == "edit_title":
            engine.apply_edit(session, "title", f"The {words[2].title()} {rng.randrange(100)}")
        elif op == "accept_title":
            slot = session.title_slot
            if slot.candidates:
                engine.accept(session, "title", rng.randrange(len(slot.candidates)))
        elif op == "gen_location":
            names = list(session.location_slots)
            if names:
                engine.generate(session, f"location:{rng.choice(names)}", seed=rng.randrange(5))
        elif op == "edit_dialogue":
            if session.dialogue_slots:
                index = rng.randrange(len(session.dialogue_slots))
                engine.apply_edit(
                    session,
                    f"dialogue:{index}",
                    f"VOICE ONE\nA line about {words[3]} {rng.randrange(100)}.",
                )
    return session
