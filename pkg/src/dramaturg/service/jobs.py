"""Polled long-running jobs for full-script generation."""

from __future__ import annotations

import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from ..errors import FullGenerationError


@dataclass
class Job:
    id: str
    session_id: str
    status: str = "queued"  # queued | running | done | error
    error: str | None = None
    failed_slot: str | None = None
    _done: threading.Event = field(default_factory=threading.Event, repr=False)

    def wait(self, timeout: float | None = None) -> bool:
        return self._done.wait(timeout)


class JobRegistry:
    def __init__(self, max_workers: int = 2):
        self._executor = ThreadPoolExecutor(max_workers=max_workers)
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, session_id: str, work: Callable[[], None]) -> Job:
        job = Job(id=uuid.uuid4().hex, session_id=session_id)
        with self._lock:
            self._jobs[job.id] = job
        self._executor.submit(self._run, job, work)
        return job

    def _run(self, job: Job, work: Callable[[], None]) -> None:
        job.status = "running"
        try:
            work()
            job.status = "done"
        except FullGenerationError as exc:
            job.status = "error"
            job.error = str(exc)
            job.failed_slot = exc.slot_address
        except Exception as exc:
            job.status = "error"
            job.error = str(exc)
        finally:
            job._done.set()

    def get(self, job_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(job_id)

    def shutdown(self) -> None:
        self._executor.shutdown(wait=False)
