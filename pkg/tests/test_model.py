import pytest
from hypothesis import given
from hypothesis import strategies as st

from dramaturg.errors import (
    EmptySlot,
    InvalidCharacter,
    InvalidLogLine,
    InvalidScene,
    UnknownSlot,
)
from dramaturg.model import (
    FREYTAG,
    HERO_JOURNEY,
    Candidate,
    CharacterSpec,
    GenerationSlot,
    LogLine,
    Provenance,
    SamplingConfig,
    Scene,
    SlotKind,
    is_canonical_plot_element,
    parse_address,
    resolve_slot_text,
    unique_locations,
    validate_character_list,
)


def make_candidate(text: str, seed: int = 0) -> Candidate:
    return Candidate(
        raw_text=text,
        seed=seed,
        sampling=SamplingConfig(seed=seed),
        prompt_hash="x" * 8,
        created_at="2026-01-01T00:00:00+00:00",
    )


class TestLogLine:
    def test_round_trips_text(self):
        text = (
            "Teddy is a lounge singer at the Pool Pit, a popular club. Teddy is in love "
            "with a patron, Rosie, who attends regularly with her husband Gerald. Teddy "
            "puts out a fire and saves the day."
        )
        assert LogLine(text).text == text

    @pytest.mark.parametrize("bad", ["", "   ", "\n\t"])
    def test_rejects_empty(self, bad):
        with pytest.raises(InvalidLogLine):
            LogLine(bad)

    @pytest.mark.parametrize(
        "marker", ["<end>", "<stop>", "<character>", "<description>", "<scenes>", "<dialog>"]
    )
    def test_rejects_reserved_markers(self, marker):
        with pytest.raises(InvalidLogLine):
            LogLine(f"A story with {marker} inside.")


class TestCharacterSpec:
    def test_rejects_newline_in_name(self):
        with pytest.raises(InvalidCharacter):
            CharacterSpec("Bad\nName", "A description.")

    def test_rejects_marker(self):
        with pytest.raises(InvalidCharacter):
            CharacterSpec("Name", "Uses <stop> wrongly.")

    def test_duplicate_names_case_insensitive(self):
        cast = [CharacterSpec("Teddy", "A singer."), CharacterSpec("TEDDY", "Copy.")]
        with pytest.raises(InvalidCharacter):
            validate_character_list(cast)

    def test_unique_names_pass(self):
        validate_character_list(
            [CharacterSpec("Teddy", "A singer."), CharacterSpec("Rosie", "A patron.")]
        )


class TestScene:
    def test_rejects_marker_in_beat(self):
        with pytest.raises(InvalidScene):
            Scene("The bar.", "Climax.", "Something <end> happens.")

    def test_canonical_flag_strips_trailing_period(self):
        assert Scene("X", "Exposition.", "Beat text.").canonical_element
        assert Scene("X", "Tests, Allies, and Enemies.", "Beat.").canonical_element
        assert not Scene("X", "Dénouement.", "Beat.").canonical_element
        assert not Scene("X", "Act One.", "Beat.").canonical_element

    def test_verbatim_label_kept(self):
        scene = Scene("X", "My Custom Label.", "Beat.")
        assert scene.plot_element == "My Custom Label."


class TestArcScaffolds:
    def test_freytag_labels_exact(self):
        assert FREYTAG.labels == (
            "Exposition",
            "Inciting Incident",
            "Conflict",
            "Rising Action",
            "Dilemma",
            "Climax",
            "Falling Action",
            "Resolution",
            "Denouement",
        )

    def test_hero_journey_labels_exact(self):
        assert HERO_JOURNEY.labels == (
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
        )

    def test_membership_helper(self):
        assert is_canonical_plot_element("The Road Back")
        assert not is_canonical_plot_element("road back")


class TestResolveSlotText:
    def test_accepted_candidate_passthrough(self):
        slot = GenerationSlot(SlotKind.TITLE, candidates=[make_candidate("A")], accepted=0)
        assert resolve_slot_text(slot) == "A"

    def test_edit_wins(self):
        slot = GenerationSlot(
            SlotKind.TITLE, candidates=[make_candidate("A")], accepted=0, edited_text="B"
        )
        assert resolve_slot_text(slot) == "B"

    def test_empty_slot_raises(self):
        with pytest.raises(EmptySlot):
            resolve_slot_text(GenerationSlot(SlotKind.TITLE))


class TestProvenance:
    def test_generated_without_edit(self):
        slot = GenerationSlot(SlotKind.TITLE, candidates=[make_candidate("A")], accepted=0)
        assert slot.provenance is Provenance.GENERATED

    def test_edited_without_candidates(self):
        slot = GenerationSlot(SlotKind.TITLE, edited_text="mine")
        assert slot.provenance is Provenance.EDITED

    def test_mixed_when_edit_differs_from_accepted(self):
        slot = GenerationSlot(
            SlotKind.TITLE, candidates=[make_candidate("A")], accepted=0, edited_text="A!"
        )
        assert slot.provenance is Provenance.MIXED

    def test_identical_edit_is_not_mixed(self):
        slot = GenerationSlot(
            SlotKind.TITLE, candidates=[make_candidate("A")], accepted=0, edited_text="A"
        )
        assert slot.provenance is Provenance.EDITED

    def test_accepted_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            GenerationSlot(SlotKind.TITLE, candidates=[], accepted=0)


def scene(place: str) -> Scene:
    return Scene(place, "Exposition.", "Something happens.")


class TestUniqueLocations:
    def test_first_appearance_order(self):
        scenes = (
            [scene("Medea's modest home")] * 3
            + [scene("Outside the Royal Palace")] * 5
            + [scene("On a winged chariot")]
        )
        assert unique_locations(scenes) == [
            "Medea's modest home",
            "Outside the Royal Palace",
            "On a winged chariot",
        ]

    def test_single_scene(self):
        assert unique_locations([scene("The bar.")]) == ["The bar."]

    def test_case_sensitive(self):
        assert unique_locations([scene("A"), scene("a")]) == ["A", "a"]

    def test_trims_whitespace(self):
        assert unique_locations([scene(" The bar. "), scene("The bar.")]) == ["The bar."]

    @given(st.lists(st.text(alphabet="abcXYZ ", min_size=1).filter(str.strip), min_size=1, max_size=12))
    def test_idempotent(self, places):
        scenes = [scene(p) for p in places]
        first = unique_locations(scenes)
        assert unique_locations([scene(p) for p in first]) == first


class TestAddresses:
    @pytest.mark.parametrize(
        "address,expected",
        [
            ("title", (SlotKind.TITLE, "")),
            ("characters", (SlotKind.CHARACTERS, "")),
            ("plot", (SlotKind.PLOT, "")),
            ("location:The Pool Pit.", (SlotKind.LOCATION, "The Pool Pit.")),
            ("dialogue:3", (SlotKind.DIALOGUE, "3")),
        ],
    )
    def test_parse(self, address, expected):
        assert parse_address(address) == expected

    @pytest.mark.parametrize("bad", ["", "scene:1", "dialogue:x", "location:", "dialogue"])
    def test_rejects_malformed(self, bad):
        with pytest.raises(UnknownSlot):
            parse_address(bad)


class TestSamplingConfig:
    def test_defaults(self):
        config = SamplingConfig()
        assert (config.nucleus_mass, config.temperature, config.max_tokens) == (0.9, 1.0, 511)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"nucleus_mass": 0.0},
            {"nucleus_mass": 1.2},
            {"temperature": 0.0},
            {"max_tokens": 0},
            {"seed": -1},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SamplingConfig(**kwargs)


class TestCandidate:
    def test_rejects_untruncated_text(self):
        with pytest.raises(ValueError):
            make_candidate("text with <end> marker")
