"""FastAPI application wrapping the co-writing engine.

Requests are handled concurrently; per-session mutations are serialized
through the engine's per-session locks, gateway calls are bounded by the
service-wide limit, and every successful mutating endpoint appends
exactly one history event before the session file is rewritten.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Callable

from fastapi import Depends, FastAPI, Header, HTTPException, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from ..engine import Engine
from ..errors import (
    BackendRejected,
    BackendUnavailable,
    ContextOverflow,
    DramaturgError,
    EmptyCharacterList,
    EmptyLocationName,
    EmptySlot,
    FullGenerationError,
    IncompleteSession,
    InvalidCandidateIndex,
    InvalidCharacter,
    InvalidLogLine,
    InvalidScene,
    OutputParseError,
    UnknownSlot,
    UnparseableEdit,
    UpstreamMissing,
)
from ..gateway import Gateway, HttpBackend, MockBackend
from ..metrics import session_edit_reports
from ..model import GenerationSlot, LogLine, StorySession, resolve_slot_text
from ..parsing import parse_plot
from ..prompts import PromptSet, builtin_prompt_set, builtin_prompt_set_names, load_prompt_set
from ..scriptio import load_session, render_partial_script, save_session
from .config import ServiceConfig
from .jobs import JobRegistry
from .schemas import (
    AcceptRequest,
    CandidateOut,
    ContinueRequest,
    CreateSessionRequest,
    EditReportOut,
    EditRequest,
    GenerateFullRequest,
    GenerateRequest,
    JobOut,
    PromptSetsOut,
    RepetitionOut,
    SamplingOut,
    SceneOut,
    SessionState,
    SessionSummary,
    SlotOut,
)

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (UpstreamMissing, 409),
    (EmptySlot, 409),
    (IncompleteSession, 409),
    (UnknownSlot, 404),
    (InvalidLogLine, 400),
    (InvalidCharacter, 400),
    (InvalidScene, 400),
    (InvalidCandidateIndex, 400),
    (UnparseableEdit, 400),
    (EmptyCharacterList, 400),
    (EmptyLocationName, 400),
    (BackendRejected, 502),
    (BackendUnavailable, 502),
    (ContextOverflow, 502),
    (OutputParseError, 502),
]


def _error_response(exc: DramaturgError) -> JSONResponse:
    if isinstance(exc, FullGenerationError):
        inner = _error_response(exc.cause) if isinstance(exc.cause, DramaturgError) else None
        status = inner.status_code if inner else 502
        return JSONResponse(
            status_code=status,
            content={"detail": str(exc), "missing": exc.slot_address},
        )
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            body: dict = {"detail": str(exc)}
            if isinstance(exc, UpstreamMissing):
                body["missing"] = exc.missing
            if isinstance(exc, IncompleteSession):
                body["missing"] = exc.missing
            return JSONResponse(status_code=status, content=body)
    return JSONResponse(status_code=500, content={"detail": str(exc)})


class SessionStore:
    """Disk-backed session registry; one owner per session file."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, StorySession] = {}
        self._lock = threading.Lock()

    def path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.dramaturg.json"

    def save(self, session: StorySession) -> None:
        with self._lock:
            self._cache[session.id] = session
        save_session(session, self.path(session.id))

    def get(self, session_id: str) -> StorySession:
        with self._lock:
            if session_id in self._cache:
                return self._cache[session_id]
        path = self.path(session_id)
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        session = load_session(path)
        with self._lock:
            self._cache.setdefault(session_id, session)
        return self._cache[session_id]


def _load_prompt_sets(config: ServiceConfig) -> dict[str, PromptSet]:
    sets = {name: builtin_prompt_set(name) for name in builtin_prompt_set_names()}
    if config.prompt_set_dir:
        for path in sorted(Path(config.prompt_set_dir).glob("*.promptset")):
            sets[path.stem] = load_prompt_set(path)
    return sets


def create_app(
    config: ServiceConfig | None = None,
    backend=None,
    clock: Callable[[], str] | None = None,
    id_factory: Callable[[], str] | None = None,
) -> FastAPI:
    config = config or ServiceConfig()
    if backend is None:
        if config.backend == "http":
            backend = HttpBackend(
                config.backend_url or "",
                api_key=config.api_key,
                context_window=config.context_window,
            )
        else:
            backend = MockBackend(context_window=config.context_window)
    gateway = Gateway(backend, max_in_flight=config.max_concurrent)
    prompt_sets = _load_prompt_sets(config)
    engines: dict[str, Engine] = {
        name: Engine(pset, gateway, clock=clock, id_factory=id_factory)
        for name, pset in prompt_sets.items()
    }
    store = SessionStore(config.session_dir)
    jobs = JobRegistry()
    generation_slots = threading.BoundedSemaphore(config.max_concurrent)

    app = FastAPI(title="dramaturg studio", version="0.1.0")
    app.state.store = store
    app.state.jobs = jobs
    app.state.backend = backend

    def require_auth(authorization: str | None = Header(default=None)) -> None:
        if config.auth_token is None:
            return
        if authorization != f"Bearer {config.auth_token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    auth = Depends(require_auth)

    @app.exception_handler(DramaturgError)
    def on_domain_error(request: Request, exc: DramaturgError) -> JSONResponse:
        return _error_response(exc)

    def engine_for(session: StorySession) -> Engine:
        engine = engines.get(session.prompt_set_name)
        if engine is None:
            raise HTTPException(
                status_code=400, detail=f"unknown prompt set {session.prompt_set_name!r}"
            )
        return engine

    def candidate_out(candidate) -> CandidateOut:
        return CandidateOut(
            raw_text=candidate.raw_text,
            seed=candidate.seed,
            sampling=SamplingOut(
                nucleus_mass=candidate.sampling.nucleus_mass,
                temperature=candidate.sampling.temperature,
                max_tokens=candidate.sampling.max_tokens,
                seed=candidate.sampling.seed,
            ),
            prompt_hash=candidate.prompt_hash,
            created_at=candidate.created_at,
            loop_flagged=candidate.loop_flagged,
            loop_counts=dict(candidate.loop_counts),
        )

    def slot_out(engine: Engine, session: StorySession, slot: GenerationSlot, stale: bool) -> SlotOut:
        upstream_missing = None
        try:
            engine.render_prompt(session, slot.address)
        except UpstreamMissing as exc:
            upstream_missing = exc.missing
        except DramaturgError:
            pass
        return SlotOut(
            address=slot.address,
            kind=slot.kind.value,
            key=slot.key,
            candidates=[candidate_out(c) for c in slot.candidates],
            accepted=slot.accepted,
            edited_text=slot.edited_text,
            provenance=slot.provenance.value,
            resolved_text=resolve_slot_text(slot) if slot.is_resolvable() else None,
            stale=stale,
            upstream_missing=upstream_missing,
        )

    def session_state(session: StorySession) -> SessionState:
        engine = engine_for(session)
        staleness = engine.compute_staleness(session)
        scenes: list[SceneOut] = []
        if session.plot_slot.is_resolvable():
            try:
                parsed = parse_plot(resolve_slot_text(session.plot_slot))
            except OutputParseError:
                parsed = []
            scenes = [
                SceneOut(
                    index=i,
                    place=s.place,
                    plot_element=s.plot_element,
                    beat=s.beat,
                    canonical_element=s.canonical_element,
                )
                for i, s in enumerate(parsed)
            ]
        return SessionState(
            id=session.id,
            log_line=session.log_line.text,
            prompt_set=session.prompt_set_name,
            slots=[
                slot_out(engine, session, slot, staleness.get(slot.address, False))
                for slot in session.all_slots()
            ],
            scenes=scenes,
            locations=list(session.location_slots),
            history_length=len(session.history),
        )

    @app.get("/prompt_sets", response_model=PromptSetsOut, dependencies=[auth])
    def list_prompt_sets() -> PromptSetsOut:
        return PromptSetsOut(prompt_sets=sorted(prompt_sets))

    @app.post("/sessions", status_code=201, response_model=SessionSummary, dependencies=[auth])
    def create_session(body: CreateSessionRequest) -> SessionSummary:
        engine = engines.get(body.prompt_set)
        if engine is None:
            raise HTTPException(status_code=400, detail=f"unknown prompt set {body.prompt_set!r}")
        session = engine.new_session(LogLine(body.log_line))
        store.save(session)
        return SessionSummary(
            id=session.id, log_line=session.log_line.text, prompt_set=session.prompt_set_name
        )

    @app.get("/sessions/{session_id}", response_model=SessionState, dependencies=[auth])
    def get_session(session_id: str) -> SessionState:
        return session_state(store.get(session_id))

    def _with_generation_slot(work):
        if not generation_slots.acquire(blocking=False):
            raise HTTPException(status_code=503, detail="generation concurrency limit reached")
        try:
            return work()
        finally:
            generation_slots.release()

    @app.post(
        "/sessions/{session_id}/slots/{address:path}/generate",
        response_model=CandidateOut,
        dependencies=[auth],
    )
    def generate(session_id: str, address: str, body: GenerateRequest) -> CandidateOut:
        session = store.get(session_id)
        engine = engine_for(session)

        def work():
            candidate = engine.generate(session, address, seed=body.seed)
            store.save(session)
            return candidate_out(candidate)

        return _with_generation_slot(work)

    @app.post(
        "/sessions/{session_id}/slots/{address:path}/continue",
        response_model=CandidateOut,
        dependencies=[auth],
    )
    def continue_generation(
        session_id: str, address: str, body: ContinueRequest | None = None
    ) -> CandidateOut:
        session = store.get(session_id)
        engine = engine_for(session)
        seed = body.seed if body is not None else None

        def work():
            candidate = engine.continue_generation(session, address, seed=seed)
            store.save(session)
            return candidate_out(candidate)

        return _with_generation_slot(work)

    @app.put(
        "/sessions/{session_id}/slots/{address:path}/edit",
        response_model=SlotOut,
        dependencies=[auth],
    )
    def edit(session_id: str, address: str, body: EditRequest) -> SlotOut:
        session = store.get(session_id)
        engine = engine_for(session)
        engine.apply_edit(session, address, body.text)
        store.save(session)
        staleness = engine.compute_staleness(session)
        slot = session.slot(address)
        return slot_out(engine, session, slot, staleness.get(slot.address, False))

    @app.put(
        "/sessions/{session_id}/slots/{address:path}/accept",
        response_model=SlotOut,
        dependencies=[auth],
    )
    def accept(session_id: str, address: str, body: AcceptRequest) -> SlotOut:
        session = store.get(session_id)
        engine = engine_for(session)
        engine.accept(session, address, body.candidate_index)
        store.save(session)
        staleness = engine.compute_staleness(session)
        slot = session.slot(address)
        return slot_out(engine, session, slot, staleness.get(slot.address, False))

    @app.post(
        "/sessions/{session_id}/generate_full",
        status_code=202,
        response_model=JobOut,
        dependencies=[auth],
    )
    def generate_full(session_id: str, body: GenerateFullRequest | None = None) -> JobOut:
        session = store.get(session_id)
        engine = engine_for(session)
        policy = body.seed_policy if body is not None else GenerateFullRequest().seed_policy

        def work() -> None:
            try:
                engine.generate_full(
                    session, seed=policy.base_seed, parallel=policy.parallel
                )
            finally:
                store.save(session)

        job = jobs.submit(session.id, work)
        return JobOut(id=job.id, session_id=job.session_id, status=job.status)

    @app.get("/jobs/{job_id}", response_model=JobOut, dependencies=[auth])
    def get_job(job_id: str) -> JobOut:
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return JobOut(
            id=job.id,
            session_id=job.session_id,
            status=job.status,
            error=job.error,
            failed_slot=job.failed_slot,
        )

    @app.get("/sessions/{session_id}/metrics", response_model=list[EditReportOut], dependencies=[auth])
    def metrics(session_id: str) -> list[EditReportOut]:
        session = store.get(session_id)
        return [
            EditReportOut(
                slot=report.slot_address,
                levenshtein=report.levenshtein,
                relative_levenshtein=report.relative_levenshtein,
                jaccard_lemma=report.jaccard_lemma,
                length_delta=report.length_delta,
                repetition=RepetitionOut(
                    ngram_overlap=report.repetition.ngram_overlap,
                    total_consecutive_repetition=report.repetition.total_consecutive_repetition,
                    longest_consecutive_repetition=report.repetition.longest_consecutive_repetition,
                ),
            )
            for report in session_edit_reports(session)
        ]

    @app.get("/sessions/{session_id}/export", response_class=PlainTextResponse, dependencies=[auth])
    def export(session_id: str) -> str:
        return render_partial_script(store.get(session_id))

    return app
