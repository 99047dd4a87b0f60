"""Asynchronous generation jobs over a bounded worker pool.

A job moves Queued -> Running -> Done/Failed, each transition persisted.
After a restart finished jobs are restored as-is; jobs caught mid-run are
marked Failed rather than silently re-queued.
"""

from __future__ import annotations

import datetime
import threading
from concurrent.futures import ThreadPoolExecutor

from .store import FileStore, new_id

QUEUED = "queued"
RUNNING = "running"
DONE = "done"
FAILED = "failed"


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


class JobManager:
    def __init__(self, store: FileStore, workers: int = 2):
        self.store = store
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        for job_id, record in store.load_all("jobs").items():
            if record.get("status") == RUNNING or record.get("status") == QUEUED:
                record["status"] = FAILED
                record["error"] = "interrupted by restart"
                record["finished"] = _now()
                store.save("jobs", job_id, record)
            self._jobs[job_id] = record

    def submit(self, kind: str, meta: dict, work) -> dict:
        """Queue ``work`` (a zero-arg callable returning a JSON-able result)."""
        job_id = new_id()
        record = {
            "id": job_id,
            "kind": kind,
            "status": QUEUED,
            "submitted": _now(),
            "finished": None,
            "result": None,
            "error": None,
            **meta,
        }
        with self._lock:
            self._jobs[job_id] = record
        self.store.save("jobs", job_id, record)
        self._pool.submit(self._run, job_id, work)
        return dict(record)

    def _run(self, job_id: str, work) -> None:
        self._transition(job_id, status=RUNNING)
        try:
            result = work()
        except Exception as e:  # noqa: BLE001 - job faults become Failed records
            self._transition(job_id, status=FAILED, error=str(e), finished=_now())
            return
        self._transition(job_id, status=DONE, result=result, finished=_now())

    def _transition(self, job_id: str, **changes) -> None:
        with self._lock:
            record = self._jobs[job_id]
            record.update(changes)
            snapshot = dict(record)
        self.store.save("jobs", job_id, snapshot)

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            record = self._jobs.get(job_id)
            return dict(record) if record else None

    def shutdown(self) -> None:
        self._pool.shutdown(wait=False, cancel_futures=True)
