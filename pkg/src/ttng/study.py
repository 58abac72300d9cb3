"""Motif-matching study: sessions, training gate, response capture, analytics.

Participants are assigned to dataset sets round-robin. Each session runs a
training phase (advance only on correct picks) followed by the set's tasks in
a seeded-shuffled order, one response per task, no revisiting, no correctness
feedback. Every mutation is appended to a JSONL journal; all analytics can be
recomputed from the journal alone.
"""

from __future__ import annotations

import csv
import io
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateResponse,
    StudyNotConfigured,
    UnknownResponse,
    UnknownSession,
    UnknownTask,
    WrongPhase,
)
from .motifs import MOTIF_NAMES, column_profile
from .pipeline import StudyDataset

import random

REASONING_TAGS = ("Topic", "Entity", "Event", "Structure", "Causality", "Sentiment")

PHASES = ("training", "task", "done")

_PROFILES = {name.value: column_profile(name) for name in MOTIF_NAMES}


@dataclass
class StudySession:
    session_id: str
    participant_id: str
    set_id: int
    training_tasks: tuple[str, ...]
    tasks: tuple[str, ...]
    phase: str = "training"
    training_index: int = 0
    task_index: int = 0
    training_attempts: dict[str, int] = field(default_factory=dict)
    task_started: dict[str, float] = field(default_factory=dict)

    def current_task(self) -> str | None:
        if self.phase == "training":
            return self.training_tasks[self.training_index]
        if self.phase == "task":
            return self.tasks[self.task_index]
        return None


@dataclass(frozen=True)
class Response:
    response_id: str
    session_id: str
    participant_id: str
    task_id: str
    selected: str
    confidence: int
    reasoning: str
    elapsed_ms: int


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows = participant-selected motif, columns = ground-truth motif."""

    grid: tuple[tuple[int, ...], ...]  # [selected][truth], MOTIF_NAMES order

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n.value for n in MOTIF_NAMES)

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.grid)

    def column_totals(self) -> tuple[int, ...]:
        return tuple(sum(row[c] for row in self.grid) for c in range(len(self.grid)))

    def to_json(self) -> dict:
        return {
            "motifs": list(self.names),
            "grid": [list(row) for row in self.grid],
            "row_totals": list(self.row_totals()),
            "column_totals": list(self.column_totals()),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["selected\\truth", *self.names, "grand_total"])
        for name, row, total in zip(self.names, self.grid, self.row_totals()):
            writer.writerow([name, *row, total])
        writer.writerow(["column_total", *self.column_totals(), sum(self.row_totals())])
        return buf.getvalue()


class Study:
    """In-memory study state with an append-only journal."""

    def __init__(
        self,
        dataset: StudyDataset,
        journal_path: str | Path | None = None,
        training_count: int = 2,
        confidence_range: tuple[int, int] = (1, 5),
    ):
        if dataset is None or not dataset.stories:
            raise StudyNotConfigured("study needs a dataset with stories")
        self.dataset = dataset
        self.training_count = training_count
        self.confidence_range = confidence_range
        self.sessions: dict[str, StudySession] = {}
        self.responses: dict[str, Response] = {}
        self.tags: dict[str, tuple[str, ...]] = {}
        self._created = 0
        # One reentrant lock serialises all state mutations and journal
        # appends; service endpoints may run on multiple worker threads.
        self._lock = threading.RLock()
        self._journal_path = Path(journal_path) if journal_path else None
        self._truth = {s.story_id: s.motif for s in dataset.stories}
        # Ground truth goes into the journal once per run so analytics can be
        # recomputed from the journal file alone.
        self._journal({"event": "truth", "ts": time.time(), "labels": dict(self._truth)})

    # journal ------------------------------------------------------------

    def _journal(self, event: dict) -> None:
        if self._journal_path is None:
            return
        with self._lock:
            self._journal_path.parent.mkdir(parents=True, exist_ok=True)
            with self._journal_path.open("a") as fh:
                fh.write(json.dumps(event) + "\n")

    # sessions -----------------------------------------------------------

    def ground_truth(self, task_id: str) -> str:
        if task_id not in self._truth:
            raise UnknownTask(f"no task {task_id!r}")
        return self._truth[task_id]

    def _training_for_set(self, set_id: int) -> tuple[str, ...]:
        """Train on stories of the neighbouring set so no task is pre-seen."""
        other = (set_id + 1) % self.dataset.sets
        pool = [s.story_id for s in self.dataset.stories if s.set_id == other]
        return tuple(pool[: self.training_count])

    def create_session(self, participant_id: str, seed: int | None = None) -> StudySession:
        with self._lock:
            set_id = self._created % self.dataset.sets
            self._created += 1
        task_ids = [s.story_id for s in self.dataset.stories_for_set(set_id)]
        rng = random.Random(seed if seed is not None else uuid.uuid4().int)
        rng.shuffle(task_ids)
        session = StudySession(
            session_id=uuid.uuid4().hex[:12],
            participant_id=participant_id,
            set_id=set_id,
            training_tasks=self._training_for_set(set_id),
            tasks=tuple(task_ids),
        )
        if not session.training_tasks:
            session.phase = "task"
        self.sessions[session.session_id] = session
        self._journal(
            {
                "event": "session",
                "ts": time.time(),
                "session_id": session.session_id,
                "participant_id": participant_id,
                "set_id": set_id,
                "seed": seed,
                "training_tasks": list(session.training_tasks),
                "tasks": list(session.tasks),
            }
        )
        return session

    def session(self, session_id: str) -> StudySession:
        if session_id not in self.sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self.sessions[session_id]

    def current_payload(self, session_id: str) -> dict:
        """What the participant sees now. Never includes ground truth."""
        session = self.session(session_id)
        task_id = session.current_task()
        payload = {
            "session_id": session.session_id,
            "phase": session.phase,
            "options": [n.value for n in MOTIF_NAMES],
        }
        if session.phase == "training":
            payload["progress"] = {
                "done": session.training_index,
                "total": len(session.training_tasks),
            }
        elif session.phase == "task":
            payload["progress"] = {"done": session.task_index, "total": len(session.tasks)}
        if task_id is None:
            return payload
        session.task_started.setdefault(task_id, time.time())
        story = self.dataset.by_id(task_id).story
        payload["task_id"] = task_id
        payload["announcements"] = [
            {"content": c.content, "timestamp": c.time[0]} for c in story.chapters
        ]
        return payload

    # training -----------------------------------------------------------

    def submit_training(self, session_id: str, task_id: str, selected: str) -> dict:
        with self._lock:
            return self._submit_training(session_id, task_id, selected)

    def _submit_training(self, session_id: str, task_id: str, selected: str) -> dict:
        session = self.session(session_id)
        if session.phase != "training":
            raise WrongPhase(f"session is in phase {session.phase!r}")
        if task_id != session.current_task():
            raise UnknownTask(f"task {task_id!r} is not the current training task")
        attempts = session.training_attempts.get(task_id, 0) + 1
        session.training_attempts[task_id] = attempts
        correct = self.ground_truth(task_id) == selected
        if correct:
            session.training_index += 1
            if session.training_index >= len(session.training_tasks):
                session.phase = "task"
        self._journal(
            {
                "event": "training",
                "ts": time.time(),
                "session_id": session_id,
                "task_id": task_id,
                "selected": selected,
                "correct": correct,
                "attempts": attempts,
            }
        )
        return {"correct": correct, "advance": correct, "attempts": attempts,
                "phase": session.phase}

    # task responses -------------------------------------------------------

    def submit_task(
        self, session_id: str, task_id: str, selected: str, confidence: int, reasoning: str
    ) -> dict:
        with self._lock:
            return self._submit_task(session_id, task_id, selected, confidence, reasoning)

    def _submit_task(
        self, session_id: str, task_id: str, selected: str, confidence: int, reasoning: str
    ) -> dict:
        session = self.session(session_id)
        if session.phase != "task":
            raise WrongPhase(f"session is in phase {session.phase!r}")
        if task_id != session.current_task():
            if any(r.session_id == session_id and r.task_id == task_id
                   for r in self.responses.values()):
                raise DuplicateResponse(f"task {task_id!r} already answered")
            raise UnknownTask(f"task {task_id!r} is not the current task")
        lo, hi = self.confidence_range
        if not lo <= confidence <= hi:
            raise ValueError(f"confidence must be in [{lo}, {hi}]")
        if selected not in self._profile_names():
            raise ValueError(f"selected motif {selected!r} is not one of the nine options")

        started = session.task_started.get(task_id, time.time())
        elapsed_ms = max(1, int((time.time() - started) * 1000))
        response = Response(
            response_id=f"{session_id}-{session.task_index:02d}",
            session_id=session_id,
            participant_id=session.participant_id,
            task_id=task_id,
            selected=selected,
            confidence=confidence,
            reasoning=reasoning,
            elapsed_ms=elapsed_ms,
        )
        self.responses[response.response_id] = response
        session.task_index += 1
        if session.task_index >= len(session.tasks):
            session.phase = "done"
        self._journal(
            {
                "event": "response",
                "ts": time.time(),
                "response_id": response.response_id,
                "session_id": session_id,
                "participant_id": session.participant_id,
                "task_id": task_id,
                "selected": selected,
                "confidence": confidence,
                "reasoning": reasoning,
                "elapsed_ms": elapsed_ms,
            }
        )
        return {"ok": True, "response_id": response.response_id, "phase": session.phase}

    @staticmethod
    def _profile_names() -> tuple[str, ...]:
        return tuple(_PROFILES)

    # tagging & export -----------------------------------------------------

    def tag_reasoning(self, response_id: str, tags: list[str]) -> dict:
        if response_id not in self.responses:
            raise UnknownResponse(f"no response {response_id!r}")
        for tag in tags:
            if tag not in REASONING_TAGS:
                raise ValueError(f"unknown reasoning tag {tag!r}; known: {REASONING_TAGS}")
        with self._lock:
            self.tags[response_id] = tuple(dict.fromkeys(tags))
        self._journal(
            {"event": "tags", "ts": time.time(), "response_id": response_id,
             "tags": list(self.tags[response_id])}
        )
        return {"ok": True, "tags": list(self.tags[response_id])}

    def export_responses(self, format: str = "json") -> str:
        if format == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf)
            writer.writerow(
                ["response_id", "session_id", "participant_id", "task_id", "selected",
                 "ground_truth", "confidence", "reasoning", "elapsed_ms", "tags"]
            )
            for r in self.responses.values():
                writer.writerow(
                    [r.response_id, r.session_id, r.participant_id, r.task_id, r.selected,
                     self._truth.get(r.task_id, ""), r.confidence, r.reasoning, r.elapsed_ms,
                     "|".join(self.tags.get(r.response_id, ()))]
                )
            return buf.getvalue()
        if format == "json":
            return json.dumps(
                {
                    "sessions": [
                        {
                            "session_id": s.session_id,
                            "participant_id": s.participant_id,
                            "set_id": s.set_id,
                            "phase": s.phase,
                            "tasks": list(s.tasks),
                            "training_tasks": list(s.training_tasks),
                        }
                        for s in self.sessions.values()
                    ],
                    "responses": [response_to_json(r) for r in self.responses.values()],
                    "tags": {rid: list(t) for rid, t in self.tags.items()},
                },
                indent=2,
            )
        raise ValueError(f"unknown export format {format!r}")

    # analytics --------------------------------------------------------------

    def confusion(self) -> ConfusionMatrix:
        return confusion_matrix(list(self.responses.values()), self._truth)

    def accuracy(self) -> dict:
        return accuracy_stats(list(self.responses.values()), self._truth)

    def tag_distribution(self) -> dict:
        return tag_distribution(list(self.responses.values()), self.tags, self._truth)


def response_to_json(r: Response) -> dict:
    return {
        "response_id": r.response_id,
        "session_id": r.session_id,
        "participant_id": r.participant_id,
        "task_id": r.task_id,
        "selected": r.selected,
        "confidence": r.confidence,
        "reasoning": r.reasoning,
        "elapsed_ms": r.elapsed_ms,
    }


# --- journal-based analytics (usable without a live Study) ---------------------


def confusion_matrix(responses: list[Response], truth: dict[str, str]) -> ConfusionMatrix:
    """Tally selected (rows) against ground truth (columns)."""
    index = {name.value: i for i, name in enumerate(MOTIF_NAMES)}
    grid = [[0] * len(index) for _ in index]
    for r in responses:
        if r.selected in index and truth.get(r.task_id) in index:
            grid[index[r.selected]][index[truth[r.task_id]]] += 1
    return ConfusionMatrix(grid=tuple(tuple(row) for row in grid))


def temporal_match(selected: str, truth: str) -> bool:
    """Same per-column node-count profile, e.g. Linear vs EarlyTurn (both 1,1,1)."""
    return _PROFILES[selected] == _PROFILES[truth]


def accuracy_stats(responses: list[Response], truth: dict[str, str]) -> dict:
    """Per-participant and per-motif accuracy plus the temporal-match rate."""
    per_participant: dict[str, dict[str, int]] = {}
    per_motif: dict[str, dict[str, int]] = {
        name.value: {"correct": 0, "total": 0} for name in MOTIF_NAMES
    }
    temporal_hits = 0
    for r in responses:
        actual = truth.get(r.task_id)
        if actual is None:
            continue
        stats = per_participant.setdefault(r.participant_id, {"correct": 0, "total": 0})
        stats["total"] += 1
        per_motif[actual]["total"] += 1
        if r.selected == actual:
            stats["correct"] += 1
            per_motif[actual]["correct"] += 1
        if temporal_match(r.selected, actual):
            temporal_hits += 1

    corrects = [s["correct"] for s in per_participant.values()]
    distribution: dict[int, int] = {}
    for c in corrects:
        distribution[c] = distribution.get(c, 0) + 1
    total = len(responses)
    return {
        "participants": len(per_participant),
        "responses": total,
        "mean_correct": sum(corrects) / len(corrects) if corrects else 0.0,
        "max_correct": max(corrects, default=0),
        "correct_distribution": {str(k): v for k, v in sorted(distribution.items())},
        "per_motif_accuracy": {
            motif: (counts["correct"] / counts["total"] if counts["total"] else None)
            for motif, counts in per_motif.items()
        },
        "temporal_match_rate": temporal_hits / total if total else 0.0,
    }


def tag_distribution(
    responses: list[Response], tags: dict[str, tuple[str, ...]], truth: dict[str, str]
) -> dict:
    """Reasoning-tag counts split by response correctness (bar-chart ready)."""
    split = {"correct": {t: 0 for t in REASONING_TAGS},
             "incorrect": {t: 0 for t in REASONING_TAGS}}
    for r in responses:
        bucket = "correct" if truth.get(r.task_id) == r.selected else "incorrect"
        for tag in tags.get(r.response_id, ()):
            split[bucket][tag] += 1
    return split


def load_journal(path: str | Path) -> tuple[list[Response], dict[str, tuple[str, ...]], list[dict]]:
    """Rebuild responses, tags, and session records from a journal file."""
    responses: list[Response] = []
    tags: dict[str, tuple[str, ...]] = {}
    sessions: list[dict] = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        event = json.loads(line)
        kind = event.get("event")
        if kind == "response":
            responses.append(
                Response(
                    response_id=event["response_id"],
                    session_id=event["session_id"],
                    participant_id=event["participant_id"],
                    task_id=event["task_id"],
                    selected=event["selected"],
                    confidence=event["confidence"],
                    reasoning=event["reasoning"],
                    elapsed_ms=event["elapsed_ms"],
                )
            )
        elif kind == "tags":
            tags[event["response_id"]] = tuple(event["tags"])
        elif kind == "session":
            sessions.append(event)
    return responses, tags, sessions
