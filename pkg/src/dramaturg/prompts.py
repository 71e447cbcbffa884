"""Prompt-set loading and rendering for the five few-shot prompt families.

A prompt set bundles five templates (title, character, plot, location,
dialogue) defining one style. Templates are stored in ``.promptset``
files: UTF-8 text where a line ``@family <name>`` opens a section and
everything until the next directive is the verbatim template body. One
trailing newline is stripped from each section, so a template that must
end with a newline carries an extra blank line in the file. A
``@repeat CHARACTER_DESCRIPTION`` line inside a section marks the
repeatable placeholder: at render time the line holding it expands to
one line per character when the placeholder stands alone, otherwise the
characters are joined inline with single spaces.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO

from .errors import (
    EmptyCharacterList,
    EmptyLocationName,
    MissingFamily,
    PromptSetParseError,
    UnknownPlaceholder,
)
from .markers import END
from .model import CharacterSpec, LogLine, Scene

logger = logging.getLogger(__name__)

_PLACEHOLDER_RE = re.compile(r"<([A-Z][A-Z0-9_]*)>")
_REPEATABLE = "CHARACTER_DESCRIPTION"


class PromptFamily(str, Enum):
    TITLE = "title"
    CHARACTER = "character"
    PLOT = "plot"
    LOCATION = "location"
    DIALOGUE = "dialogue"


REQUIRED_PLACEHOLDERS: dict[PromptFamily, frozenset[str]] = {
    PromptFamily.TITLE: frozenset({"LOG_LINE"}),
    PromptFamily.CHARACTER: frozenset({"LOG_LINE"}),
    PromptFamily.PLOT: frozenset({"LOG_LINE", "CHARACTER_DESCRIPTION"}),
    PromptFamily.LOCATION: frozenset({"LOG_LINE", "LOCATION_NAME"}),
    PromptFamily.DIALOGUE: frozenset(
        {
            "LOG_LINE",
            "CHARACTER_DESCRIPTION",
            "PLACE_NAME",
            "PLACE_DESCRIPTION",
            "PLOT_ELEMENT",
            "PREVIOUS_BEAT",
            "BEAT",
        }
    ),
}


@dataclass(frozen=True)
class TemplateText:
    """Verbatim template body plus its repeatable placeholder, if any."""

    body: str
    repeat_placeholder: str | None = None

    def placeholders(self) -> set[str]:
        return set(_PLACEHOLDER_RE.findall(self.body))


@dataclass(frozen=True)
class PromptSet:
    name: str
    title_prefix: TemplateText
    character_prefix: TemplateText
    plot_prefix: TemplateText
    location_prefix: TemplateText
    dialogue_prefix: TemplateText

    def template(self, family: PromptFamily) -> TemplateText:
        return getattr(self, f"{family.value}_prefix")


@dataclass(frozen=True)
class Prompt:
    """A fully rendered prompt ready to send to the language model."""

    text: str
    family: PromptFamily
    stop_markers: tuple[str, ...] = (END,)


def parse_prompt_set(text: str, name: str) -> PromptSet:
    """Parse the ``.promptset`` grammar and validate every template."""
    sections: dict[str, list[str]] = {}
    repeats: dict[str, str] = {}
    current: str | None = None
    known = {f.value for f in PromptFamily}

    for lineno, line in enumerate(text.split("\n"), start=1):
        if line.startswith("@family"):
            family = line[len("@family"):].strip()
            if family not in known:
                raise PromptSetParseError(f"line {lineno}: unknown family {family!r}")
            if family in sections:
                raise PromptSetParseError(f"line {lineno}: duplicate family {family!r}")
            sections[family] = []
            current = family
        elif line.startswith("@repeat"):
            if current is None:
                raise PromptSetParseError(f"line {lineno}: @repeat outside a family section")
            placeholder = line[len("@repeat"):].strip()
            if placeholder != _REPEATABLE:
                raise PromptSetParseError(
                    f"line {lineno}: only {_REPEATABLE} may be marked repeatable"
                )
            repeats[current] = placeholder
        elif current is None:
            if line.strip():
                raise PromptSetParseError(f"line {lineno}: content before the first @family")
        else:
            sections[current].append(line)

    missing = [f.value for f in PromptFamily if f.value not in sections]
    if missing:
        raise MissingFamily("prompt set is missing families: " + ", ".join(missing))

    templates: dict[PromptFamily, TemplateText] = {}
    for family in PromptFamily:
        body = "\n".join(sections[family.value])
        if body.endswith("\n"):
            body = body[:-1]
        template = TemplateText(body, repeats.get(family.value))
        _validate_template(family, template)
        templates[family] = template

    return PromptSet(
        name=name,
        title_prefix=templates[PromptFamily.TITLE],
        character_prefix=templates[PromptFamily.CHARACTER],
        plot_prefix=templates[PromptFamily.PLOT],
        location_prefix=templates[PromptFamily.LOCATION],
        dialogue_prefix=templates[PromptFamily.DIALOGUE],
    )


def _validate_template(family: PromptFamily, template: TemplateText) -> None:
    required = REQUIRED_PLACEHOLDERS[family]
    found = template.placeholders()
    unknown = found - required
    if unknown:
        raise UnknownPlaceholder(
            f"{family.value} template contains unknown placeholders: " + ", ".join(sorted(unknown))
        )
    absent = required - found
    if absent:
        raise PromptSetParseError(
            f"{family.value} template is missing placeholders: " + ", ".join(sorted(absent))
        )
    if END not in template.body:
        raise PromptSetParseError(
            f"{family.value} template has no {END} terminated example"
        )
    if _REPEATABLE in required and template.repeat_placeholder != _REPEATABLE:
        raise PromptSetParseError(
            f"{family.value} template must mark @repeat {_REPEATABLE}"
        )


def load_prompt_set(source: str | Path | IO[str], name: str | None = None) -> PromptSet:
    """Load a prompt set from a path or an open text resource."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        return parse_prompt_set(path.read_text(encoding="utf-8"), name or path.stem)
    return parse_prompt_set(source.read(), name or "unnamed")


def builtin_prompt_set_names() -> list[str]:
    root = resources.files("dramaturg") / "prompts"
    return sorted(p.name[: -len(".promptset")] for p in root.iterdir() if p.name.endswith(".promptset"))


def builtin_prompt_set(name: str) -> PromptSet:
    resource = resources.files("dramaturg") / "prompts" / f"{name}.promptset"
    if not resource.is_file():
        raise MissingFamily(f"no built-in prompt set named {name!r}")
    return parse_prompt_set(resource.read_text(encoding="utf-8"), name)


def describe_character(character: CharacterSpec) -> str:
    """Render one character for prompt embedding.

    Generated descriptions usually restate the name ("Medea is the
    protagonist..."), in which case the description stands alone;
    otherwise the name is prefixed so the model still sees it.
    """
    if character.description.startswith(character.name):
        return character.description
    return f"{character.name}: {character.description}"


def select_characters_for_beat(
    characters: list[CharacterSpec], beat: str
) -> list[CharacterSpec]:
    """Characters whose name occurs verbatim in the beat, in input order.

    Plain case-sensitive substring matching: a cast of Jo and Joanna both
    match a beat naming only Joanna. Accepted as a documented limitation.
    """
    return [c for c in characters if c.name in beat]


def _substitute(body: str, values: dict[str, str]) -> str:
    for key, value in values.items():
        body = body.replace(f"<{key}>", value)
    return body


def _expand_repeat(body: str, items: list[str]) -> str:
    token = f"<{_REPEATABLE}>"
    out: list[str] = []
    for line in body.split("\n"):
        if token not in line:
            out.append(line)
        elif line.strip() == token:
            out.extend(line.replace(token, item) for item in items)
        else:
            out.append(line.replace(token, " ".join(items)))
    return "\n".join(out)


def _finish(family: PromptFamily, text: str) -> Prompt:
    leftover = REQUIRED_PLACEHOLDERS[family].intersection(_PLACEHOLDER_RE.findall(text))
    if leftover:
        raise PromptSetParseError(
            f"{family.value} prompt left placeholders unresolved: " + ", ".join(sorted(leftover))
        )
    return Prompt(text=text, family=family)


def render_title_prompt(prompt_set: PromptSet, log_line: LogLine) -> Prompt:
    text = _substitute(prompt_set.title_prefix.body, {"LOG_LINE": log_line.text})
    return _finish(PromptFamily.TITLE, text)


def render_character_prompt(prompt_set: PromptSet, log_line: LogLine) -> Prompt:
    text = _substitute(prompt_set.character_prefix.body, {"LOG_LINE": log_line.text})
    return _finish(PromptFamily.CHARACTER, text)


def render_plot_prompt(
    prompt_set: PromptSet, log_line: LogLine, characters: list[CharacterSpec]
) -> Prompt:
    if not characters:
        raise EmptyCharacterList("plot prompt needs at least one character")
    body = _expand_repeat(prompt_set.plot_prefix.body, [describe_character(c) for c in characters])
    text = _substitute(body, {"LOG_LINE": log_line.text})
    return _finish(PromptFamily.PLOT, text)


def render_location_prompt(
    prompt_set: PromptSet, log_line: LogLine, location_name: str
) -> Prompt:
    if not location_name.strip():
        raise EmptyLocationName("location name is empty")
    text = _substitute(
        prompt_set.location_prefix.body,
        {"LOG_LINE": log_line.text, "LOCATION_NAME": location_name},
    )
    return _finish(PromptFamily.LOCATION, text)


def render_dialogue_prompt(
    prompt_set: PromptSet,
    log_line: LogLine,
    scene: Scene,
    previous_beat: str | None,
    location_description: str,
    characters: list[CharacterSpec],
) -> Prompt:
    """Render the dialogue prompt for one scene.

    ``previous_beat`` is None (rendered empty) for the first scene.
    ``characters`` must already be filtered to the beat; an empty list is
    permitted and rendered as an empty Characters value.
    """
    if not characters:
        logger.warning("dialogue prompt for place %r has no beat-matched characters", scene.place)
    body = _expand_repeat(
        prompt_set.dialogue_prefix.body, [describe_character(c) for c in characters]
    )
    text = _substitute(
        body,
        {
            "LOG_LINE": log_line.text,
            "PLACE_NAME": scene.place,
            "PLACE_DESCRIPTION": location_description,
            "PLOT_ELEMENT": scene.plot_element,
            "PREVIOUS_BEAT": previous_beat or "",
            "BEAT": scene.beat,
        },
    )
    return _finish(PromptFamily.DIALOGUE, text)
