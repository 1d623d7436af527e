from __future__ import annotations

import csv
import json
import sqlite3
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Tuple

from core.logging import get_logger

from .critical import CriticalCandidate
from .verify import VerificationReport

__all__ = ["ReportStorage", "new_run_id"]

LOGGER = get_logger("flagmirror.storage")

_VERIFICATION_COLUMNS = (
    "run_id",
    "shape",
    "trials",
    "seed",
    "externals",
    "passed",
    "grading_ok",
    "positivity_ok",
    "term_count_ok",
    "elapsed_s",
    "created_utc",
)
_CRITICAL_COLUMNS = ("run_id", "shape", "source", "q", "x", "grad_norm", "created_utc")


def new_run_id() -> str:
    return uuid.uuid4().hex[:12]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _flag(value: Optional[bool]) -> Optional[int]:
    return None if value is None else int(value)


class ReportStorage:
    """
    Tabellen:
    - verification_runs(run_id, shape, trials, seed, externals, passed, grading_ok,
      positivity_ok, term_count_ok, elapsed_s, created_utc)
    - critical_points(run_id, shape, source, q, x, grad_norm, created_utc)
    """

    def __init__(self, db_path: str, csv_dir: Optional[str] = None):
        self.db = Path(db_path)
        self.db.parent.mkdir(parents=True, exist_ok=True)
        self.csv_runs = (Path(csv_dir) / "verification_runs.csv") if csv_dir else None
        self.csv_points = (Path(csv_dir) / "critical_points.csv") if csv_dir else None
        if csv_dir:
            Path(csv_dir).mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._conn = sqlite3.connect(str(self.db), check_same_thread=False)
        with self._lock:
            c = self._conn.cursor()
            c.execute(
                """CREATE TABLE IF NOT EXISTS verification_runs(
                run_id TEXT, shape TEXT, trials INTEGER, seed INTEGER, externals TEXT,
                passed INTEGER, grading_ok INTEGER, positivity_ok INTEGER, term_count_ok INTEGER,
                elapsed_s REAL, created_utc TEXT
            )"""
            )
            c.execute(
                """CREATE TABLE IF NOT EXISTS critical_points(
                run_id TEXT, shape TEXT, source TEXT, q TEXT, x TEXT, grad_norm REAL, created_utc TEXT
            )"""
            )
            self._conn.commit()

    def _append_csv(self, path: Optional[Path], header: Sequence[str], rows: Sequence[Tuple[Any, ...]]) -> None:
        if path is None or not rows:
            return
        fresh = not path.exists()
        with path.open("a", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp)
            if fresh:
                writer.writerow(header)
            writer.writerows(rows)

    def write_verification(self, reports: Iterable[VerificationReport], run_id: Optional[str] = None) -> str:
        run_id = run_id or new_run_id()
        created = _now()
        rows = [
            (
                run_id,
                r.shape.spec,
                r.trials,
                r.seed,
                r.convention,
                int(r.passed),
                _flag(r.grading_ok),
                _flag(r.positivity_ok),
                _flag(r.term_count_ok),
                float(r.elapsed_s),
                created,
            )
            for r in reports
        ]
        with self._lock:
            self._conn.executemany("INSERT INTO verification_runs VALUES (?,?,?,?,?,?,?,?,?,?,?)", rows)
            self._conn.commit()
        self._append_csv(self.csv_runs, _VERIFICATION_COLUMNS, rows)
        LOGGER.debug("store table=verification_runs run_id=%s rows=%d", run_id, len(rows))
        return run_id

    def write_critical(self, points: Iterable[CriticalCandidate], run_id: Optional[str] = None) -> str:
        run_id = run_id or new_run_id()
        created = _now()
        rows = []
        for p in points:
            payload = p.to_json()
            rows.append(
                (
                    run_id,
                    p.shape.spec,
                    p.source.value,
                    json.dumps([[z.real, z.imag] for z in p.q]),
                    json.dumps(payload["x"], sort_keys=True),
                    p.grad_norm,
                    created,
                )
            )
        with self._lock:
            self._conn.executemany("INSERT INTO critical_points VALUES (?,?,?,?,?,?,?)", rows)
            self._conn.commit()
        self._append_csv(self.csv_points, _CRITICAL_COLUMNS, rows)
        LOGGER.debug("store table=critical_points run_id=%s rows=%d", run_id, len(rows))
        return run_id

    def close(self) -> None:
        with self._lock:
            self._conn.close()
