"""Pydantic request/response models: the wire contract for the studio UI."""

from __future__ import annotations

from pydantic import BaseModel, Field


class CreateSessionRequest(BaseModel):
    log_line: str
    prompt_set: str = "medea"


class GenerateRequest(BaseModel):
    seed: int | None = Field(default=None, ge=0)


class ContinueRequest(BaseModel):
    seed: int | None = Field(default=None, ge=0)


class EditRequest(BaseModel):
    text: str


class AcceptRequest(BaseModel):
    candidate_index: int = Field(ge=0)


class SeedPolicy(BaseModel):
    base_seed: int = Field(default=0, ge=0)
    parallel: bool = True


class GenerateFullRequest(BaseModel):
    seed_policy: SeedPolicy = SeedPolicy()


class SamplingOut(BaseModel):
    nucleus_mass: float
    temperature: float
    max_tokens: int
    seed: int


class CandidateOut(BaseModel):
    raw_text: str
    seed: int
    sampling: SamplingOut
    prompt_hash: str
    created_at: str
    loop_flagged: bool
    loop_counts: dict[str, int]


class SlotOut(BaseModel):
    address: str
    kind: str
    key: str
    candidates: list[CandidateOut]
    accepted: int | None
    edited_text: str | None
    provenance: str
    resolved_text: str | None
    stale: bool
    upstream_missing: str | None = None


class SceneOut(BaseModel):
    index: int
    place: str
    plot_element: str
    beat: str
    canonical_element: bool


class SessionSummary(BaseModel):
    id: str
    log_line: str
    prompt_set: str


class SessionState(BaseModel):
    id: str
    log_line: str
    prompt_set: str
    slots: list[SlotOut]
    scenes: list[SceneOut]
    locations: list[str]
    history_length: int


class RepetitionOut(BaseModel):
    ngram_overlap: dict[int, float]
    total_consecutive_repetition: float
    longest_consecutive_repetition: float


class EditReportOut(BaseModel):
    slot: str
    levenshtein: int
    relative_levenshtein: float | None
    jaccard_lemma: float
    length_delta: int
    repetition: RepetitionOut


class JobOut(BaseModel):
    id: str
    session_id: str
    status: str
    error: str | None = None
    failed_slot: str | None = None


class PromptSetsOut(BaseModel):
    prompt_sets: list[str]


class ErrorBody(BaseModel):
    detail: str
    missing: str | list[str] | None = None
