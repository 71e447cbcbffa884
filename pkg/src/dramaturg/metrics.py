"""Edit analytics: distances, lemma overlap, repetition and length stats.

These quantify how far a writer's edits moved from the generated text.
Lemmatization uses a deterministic suffix-rule table plus a small
irregulars lexicon instead of a dictionary resource, so scores are
reproducible without external data; the rules are POS-blind and
imperfect by design.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyInput, EmptyOriginal
from .model import StorySession, resolve_slot_text

_WORD_RE = re.compile(r"\w+", re.UNICODE)

NGRAM_RANGE = range(1, 11)


def levenshtein(a: str, b: str) -> int:
    """Character-level edit distance; insert, delete, substitute all cost 1."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    previous = list(range(len(b) + 1))
    for i, char_a in enumerate(a, start=1):
        current = [i]
        for j, char_b in enumerate(b, start=1):
            cost = 0 if char_a == char_b else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def relative_levenshtein(original: str, edited: str) -> float:
    """Edit distance divided by the original length, in characters."""
    if not original:
        raise EmptyOriginal("relative distance needs a non-empty original")
    return levenshtein(original, edited) / len(original)


def tokenize(text: str) -> list[str]:
    """Unicode word tokens; punctuation is discarded."""
    return _WORD_RE.findall(text)


_IRREGULAR_LEMMAS = {
    "am": "be",
    "are": "be",
    "is": "be",
    "was": "be",
    "were": "be",
    "been": "be",
    "being": "be",
    "has": "have",
    "had": "have",
    "having": "have",
    "does": "do",
    "did": "do",
    "done": "do",
    "goes": "go",
    "going": "go",
    "went": "go",
    "gone": "go",
    "said": "say",
    "made": "make",
    "men": "man",
    "women": "woman",
    "children": "child",
    "mice": "mouse",
    "feet": "foot",
    "teeth": "tooth",
    "people": "person",
}

_ES_STEMS = ("s", "x", "z", "ch", "sh")


def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in "aeious":
        return stem[:-1]
    return stem


def lemmatize(token: str) -> str:
    """Lowercase a token and apply the shipped suffix rules."""
    word = token.lower()
    if word in _IRREGULAR_LEMMAS:
        return _IRREGULAR_LEMMAS[word]
    if len(word) > 4 and word.endswith("ies"):
        return word[:-3] + "y"
    if len(word) > 4 and word.endswith("ied"):
        return word[:-3] + "y"
    if word.endswith("sses"):
        return word[:-2]
    if len(word) > 3 and word.endswith("es") and word[:-2].endswith(_ES_STEMS):
        return word[:-2]
    if len(word) > 3 and word.endswith("s") and not word.endswith(("ss", "us", "is")):
        return word[:-1]
    if len(word) >= 6 and word.endswith("ing"):
        return _undouble(word[:-3])
    if len(word) >= 5 and word.endswith("ed"):
        return _undouble(word[:-2])
    return word


def lemma_set(text: str) -> set[str]:
    return {lemmatize(token) for token in tokenize(text)}


def jaccard_lemma_similarity(a: str, b: str) -> float:
    """Lemma-set overlap |A∩B| / |A∪B|; two empty sets count as 1.0."""
    set_a, set_b = lemma_set(a), lemma_set(b)
    union = set_a | set_b
    if not union:
        return 1.0
    return len(set_a & set_b) / len(union)


@dataclass(frozen=True)
class RepetitionReport:
    ngram_overlap: dict[int, float]
    total_consecutive_repetition: float
    longest_consecutive_repetition: float


def _ngram_overlap(tokens: list[str], n: int) -> float:
    total = len(tokens) - n + 1
    if total <= 0:
        return 0.0
    distinct = len({tuple(tokens[i : i + n]) for i in range(total)})
    return 1.0 - distinct / total


def _repeat_mask(tokens: list[str]) -> list[bool]:
    """Mark every token inside an immediately repeating block sequence."""
    count = len(tokens)
    mask = [False] * count
    for width in range(1, count // 2 + 1):
        for start in range(count - 2 * width + 1):
            if tokens[start : start + width] == tokens[start + width : start + 2 * width]:
                for index in range(start, start + 2 * width):
                    mask[index] = True
    return mask


def repetition_scores(text: str) -> RepetitionReport:
    """N-gram overlap for n in 1..10 plus consecutive-repetition scores.

    Overlap is 1 - distinct/total n-grams (0 when there are none). TCR
    is the fraction of tokens inside any immediately repeating run; LCR
    is the longest contiguous such run divided by the token count.
    """
    tokens = tokenize(text)
    overlaps = {n: _ngram_overlap(tokens, n) for n in NGRAM_RANGE}
    if not tokens:
        return RepetitionReport(overlaps, 0.0, 0.0)
    mask = _repeat_mask(tokens)
    total = sum(mask) / len(tokens)
    longest = 0
    run = 0
    for flag in mask:
        run = run + 1 if flag else 0
        longest = max(longest, run)
    return RepetitionReport(overlaps, total, longest / len(tokens))


@dataclass(frozen=True)
class LengthStats:
    deltas: list[int]
    normalized_abs: list[float]


def length_stats(pairs: list[tuple[str, str]]) -> LengthStats:
    """Signed character deltas (edited - original) and min-max scaled
    absolute deltas; a constant series normalizes to all zeros."""
    if not pairs:
        raise EmptyInput("length_stats needs at least one pair")
    deltas = [len(edited) - len(original) for original, edited in pairs]
    magnitudes = [abs(d) for d in deltas]
    low, high = min(magnitudes), max(magnitudes)
    if high == low:
        normalized = [0.0 for _ in magnitudes]
    else:
        normalized = [(m - low) / (high - low) for m in magnitudes]
    return LengthStats(deltas, normalized)


@dataclass(frozen=True)
class EditReport:
    slot_address: str
    levenshtein: int
    relative_levenshtein: float | None
    jaccard_lemma: float
    length_delta: int
    repetition: RepetitionReport


def edit_report(slot_address: str, original: str, edited: str) -> EditReport:
    relative = relative_levenshtein(original, edited) if original else None
    return EditReport(
        slot_address=slot_address,
        levenshtein=levenshtein(original, edited),
        relative_levenshtein=relative,
        jaccard_lemma=jaccard_lemma_similarity(original, edited),
        length_delta=len(edited) - len(original),
        repetition=repetition_scores(edited),
    )


def session_edit_reports(session: StorySession) -> list[EditReport]:
    """One report per slot with content: accepted text vs effective text.

    Unedited slots compare a text with itself (distance 0); slots edited
    from scratch have no original, so the relative distance is None.
    """
    reports = []
    for slot in session.all_slots():
        if not slot.is_resolvable():
            continue
        original = slot.candidates[slot.accepted].raw_text if slot.accepted is not None else ""
        reports.append(edit_report(slot.address, original, resolve_slot_text(slot)))
    return reports


def report_rows(reports: list[EditReport]) -> list[list[str]]:
    """Rows for the column-delimited CLI report."""
    header = (
        ["slot", "levenshtein", "relative", "jaccard", "length_delta"]
        + [f"{n}gram" for n in NGRAM_RANGE]
        + ["tcr", "lcr"]
    )
    rows = [header]
    for report in reports:
        rows.append(
            [
                report.slot_address,
                str(report.levenshtein),
                "" if report.relative_levenshtein is None else f"{report.relative_levenshtein:.6f}",
                f"{report.jaccard_lemma:.6f}",
                str(report.length_delta),
                *(f"{report.repetition.ngram_overlap[n]:.6f}" for n in NGRAM_RANGE),
                f"{report.repetition.total_consecutive_repetition:.6f}",
                f"{report.repetition.longest_consecutive_repetition:.6f}",
            ]
        )
    return rows
