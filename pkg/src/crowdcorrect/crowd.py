"""Crowd correction loop: micro-tasks, answers, majority-vote aggregation.

Tasks live on a TaskBoard persisted as an append-only JSONL event log
(worker-registered / task-created / answer-recorded / task-resolved), so any
board state can be reproduced by replaying its log.

Scheduling hands each worker the least-answered open tasks first (ties:
fewest answers on the same post, then task id), which keeps coverage across
the feature set as even as possible. A task resolves once it has reached its
quorum and one choice strictly leads; ties keep the task open for more
answers until quorum + 4, after which it is exhausted.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from .autocorrect import ISSUE_ABBREVIATION, ISSUE_JARGON, ISSUE_MISSPELLING, ISSUE_NONE
from .extract import (
    STATUS_CLEAN,
    STATUS_CROWD,
    STATUS_NEEDS_CROWD,
    STATUS_UNRESOLVED,
    FeatureRecord,
)
from .ingest import RawPost, utcnow_iso
from .knowledge import Candidate

IDENTIFICATION = "identification"
SUGGESTION = "suggestion"
CORRECTION = "correction"

OPEN = "open"
RESOLVED = "resolved"
EXHAUSTED = "exhausted"

SUGGESTION_OPTIONS = (ISSUE_JARGON, ISSUE_ABBREVIATION, ISSUE_MISSPELLING, ISSUE_NONE)
DEFAULT_QUORUM = 3
EXTRA_ANSWERS_AFTER_TIE = 4  # max answers = quorum + 4
MAX_CORRECTION_OPTIONS = 5


class CrowdError(Exception):
    code = "CROWD_ERROR"


class UnknownTask(CrowdError):
    code = "UNKNOWN_TASK"


class UnknownWorker(CrowdError):
    code = "UNKNOWN_WORKER"


class DuplicateAnswer(CrowdError):
    code = "DUPLICATE_ANSWER"


class TaskClosed(CrowdError):
    code = "TASK_CLOSED"


class InvalidChoice(CrowdError):
    code = "INVALID_CHOICE"


class CorruptLog(CrowdError):
    code = "CORRUPT_LOG"


@dataclass(frozen=True)
class WorkerProfile:
    worker_id: str
    name: str
    email: str


def worker_id_for(email: str) -> str:
    if not email:
        raise ValueError("email must be non-empty")
    return hashlib.sha1(email.casefold().encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class MicroTask:
    task_id: str
    kind: str
    post_id: str
    prompt: str
    options: tuple[str, ...]
    allows_free_text: bool
    quorum: int
    feature_id: str | None = None
    surface: str | None = None  # the feature being asked about
    post_text: str = ""
    state: str = OPEN
    # suggestion tasks cache per-class candidates so the follow-up
    # correction task can be generated without re-querying any source
    candidates_by_class: dict | None = None

    def __post_init__(self):
        assert self.quorum >= 1
        if self.kind == SUGGESTION:
            assert self.options == SUGGESTION_OPTIONS
        elif self.kind == IDENTIFICATION:
            assert len(self.options) == 2 and self.options[1] == "other"
        elif self.kind == CORRECTION:
            assert self.allows_free_text
        else:
            raise ValueError(f"unknown task kind {self.kind!r}")

    @property
    def max_answers(self) -> int:
        return self.quorum + EXTRA_ANSWERS_AFTER_TIE

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "kind": self.kind,
            "post_id": self.post_id,
            "feature_id": self.feature_id,
            "surface": self.surface,
            "post_text": self.post_text,
            "prompt": self.prompt,
            "options": list(self.options),
            "allows_free_text": self.allows_free_text,
            "quorum": self.quorum,
            "state": self.state,
            "candidates_by_class": self.candidates_by_class,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "MicroTask":
        return cls(
            task_id=obj["task_id"],
            kind=obj["kind"],
            post_id=obj["post_id"],
            feature_id=obj.get("feature_id"),
            surface=obj.get("surface"),
            post_text=obj.get("post_text", ""),
            prompt=obj["prompt"],
            options=tuple(obj["options"]),
            allows_free_text=obj["allows_free_text"],
            quorum=obj["quorum"],
            state=obj.get("state", OPEN),
            candidates_by_class=obj.get("candidates_by_class"),
        )


@dataclass(frozen=True)
class Answer:
    task_id: str
    worker_id: str
    choice: tuple[str, object]  # ("option", index) or ("text", string)
    received_at: str = ""

    def to_dict(self) -> dict:
        key, value = self.choice
        return {
            "task_id": self.task_id,
            "worker_id": self.worker_id,
            "choice": {key: value},
            "received_at": self.received_at,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "Answer":
        choice = obj["choice"]
        if "option" in choice:
            pair = ("option", int(choice["option"]))
        elif "text" in choice:
            pair = ("text", str(choice["text"]))
        else:
            raise ValueError(f"bad choice {choice!r}")
        return cls(obj["task_id"], obj["worker_id"], pair, obj.get("received_at", ""))


@dataclass(frozen=True)
class AggregateResult:
    task_id: str
    counts: dict
    quorum_met: bool
    resolved: bool
    winner: str | None = None


def normalize_choice(task: MicroTask, choice: tuple[str, object]) -> str:
    """Vote-grouping key for a choice: the chosen option, or trimmed,
    case-folded free text."""
    kind, value = choice
    if kind == "option":
        idx = int(value)
        if not 0 <= idx < len(task.options):
            raise InvalidChoice(f"option index {idx} out of range for {task.task_id}")
        return task.options[idx].casefold()
    if kind == "text":
        if not task.allows_free_text:
            raise InvalidChoice(f"task {task.task_id} does not accept free text")
        text = str(value).strip().casefold()
        if not text:
            raise InvalidChoice("free-text answer is empty")
        return text
    raise InvalidChoice(f"unknown choice kind {kind!r}")


def aggregate(task: MicroTask, answers: list[Answer]) -> AggregateResult:
    """Count normalized votes. Resolution needs quorum and a strict leader;
    option spellings are used as display values where they exist."""
    display = {opt.casefold(): opt for opt in task.options}
    counts: dict[str, int] = {}
    for ans in answers:
        key = normalize_choice(task, ans.choice)
        counts[key] = counts.get(key, 0) + 1
    quorum_met = len(answers) >= task.quorum
    winner_key = None
    if counts:
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        if len(ranked) == 1 or ranked[0][1] > ranked[1][1]:
            winner_key = ranked[0][0]
    resolved = quorum_met and winner_key is not None
    return AggregateResult(
        task_id=task.task_id,
        counts={display.get(k, k): n for k, n in counts.items()},
        quorum_met=quorum_met,
        resolved=resolved,
        winner=display.get(winner_key, winner_key) if resolved else None,
    )


# ---------------------------------------------------------------------------
# task generation
# ---------------------------------------------------------------------------

def generate_identification_tasks(posts: list[RawPost], category: str,
                                  quorum: int = DEFAULT_QUORUM) -> list[MicroTask]:
    if not category:
        raise ValueError("category must be non-empty")
    return [
        MicroTask(
            task_id=f"i:{post.id}",
            kind=IDENTIFICATION,
            post_id=post.id,
            post_text=post.text,
            prompt=f"Is this post related to {category}?\n\n{post.text}",
            options=(category, "other"),
            allows_free_text=False,
            quorum=quorum,
        )
        for post in posts
    ]


def generate_suggestion_task(feature: FeatureRecord, post: RawPost,
                             quorum: int = DEFAULT_QUORUM,
                             candidates_by_class: dict | None = None) -> MicroTask:
    if feature.status != STATUS_NEEDS_CROWD:
        raise ValueError("suggestion tasks are generated for needs_crowd features only")
    prompt = (
        f'In the post below, is the word "{feature.surface}" a jargon, '
        f"abbreviation, misspelling, or none of these?\n\n{post.text}"
    )
    serialized = None
    if candidates_by_class is not None:
        serialized = {
            issue: [[c.replacement, c.score, c.source_id] for c in cands]
            for issue, cands in candidates_by_class.items()
        }
    return MicroTask(
        task_id=f"s:{feature.feature_id}",
        kind=SUGGESTION,
        post_id=feature.post_id,
        feature_id=feature.feature_id,
        surface=feature.surface,
        post_text=post.text,
        prompt=prompt,
        options=SUGGESTION_OPTIONS,
        allows_free_text=False,
        quorum=quorum,
        candidates_by_class=serialized,
    )


def generate_correction_task(feature_id: str, post_id: str, surface: str,
                             post_text: str, resolved_issue: str,
                             candidates: list[Candidate] | list[tuple],
                             quorum: int = DEFAULT_QUORUM) -> MicroTask:
    if resolved_issue == ISSUE_NONE:
        raise ValueError("no correction task for issue class 'none'")
    options: list[str] = []
    for cand in candidates:
        replacement = cand.replacement if isinstance(cand, Candidate) else cand[0]
        if replacement not in options:
            options.append(replacement)
        if len(options) == MAX_CORRECTION_OPTIONS:
            break
    prompt = (
        f'The word "{surface}" in the post below is a {resolved_issue}. '
        f"Pick the best correction, or write your own.\n\n{post_text}"
    )
    return MicroTask(
        task_id=f"c:{feature_id}",
        kind=CORRECTION,
        post_id=post_id,
        feature_id=feature_id,
        surface=surface,
        post_text=post_text,
        prompt=prompt,
        options=tuple(options),
        allows_free_text=True,
        quorum=quorum,
    )


# ---------------------------------------------------------------------------
# event-sourced board
# ---------------------------------------------------------------------------

@dataclass
class _TaskState:
    task: MicroTask
    answers: list[Answer] = field(default_factory=list)
    answered_by: set[str] = field(default_factory=set)
    winner: str | None = None


class TaskBoard:
    """Mutable task/answer state behind a single serialized writer.

    Every mutation happens under one lock and appends its events to the log
    (when a path is configured) in the same critical section, so an answer,
    the resolution it triggers and any follow-up task it spawns are observed
    together, in memory and on disk.
    """

    def __init__(self, log_path: str | Path | None = None, clock=utcnow_iso):
        self._lock = threading.RLock()
        self._clock = clock
        self._tasks: dict[str, _TaskState] = {}
        self._workers: dict[str, WorkerProfile] = {}
        self._log_path = Path(log_path) if log_path else None
        self._log_fh = None
        if self._log_path is not None:
            self._log_path.parent.mkdir(parents=True, exist_ok=True)
            if self._log_path.exists():
                self._apply_log(self._log_path)
            self._log_fh = open(self._log_path, "a", encoding="utf-8")

    # -- persistence ---------------------------------------------------

    def _emit(self, *events: dict):
        if self._log_fh is not None:
            self._log_fh.write("".join(json.dumps(e, ensure_ascii=False, sort_keys=True) + "\n"
                                       for e in events))
            self._log_fh.flush()

    def close(self):
        if self._log_fh is not None:
            self._log_fh.close()
            self._log_fh = None

    def _apply_log(self, path: Path):
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                    self._apply_event(event)
                except (ValueError, KeyError, AssertionError) as exc:
                    raise CorruptLog(f"line {lineno}: {exc}") from None

    def _apply_event(self, event: dict):
        kind = event["event"]
        if kind == "worker_registered":
            profile = WorkerProfile(event["worker_id"], event["name"], event["email"])
            self._workers[profile.worker_id] = profile
        elif kind == "task_created":
            task = MicroTask.from_dict(event["task"])
            self._tasks[task.task_id] = _TaskState(task=task)
        elif kind == "answer_recorded":
            ans = Answer.from_dict(event["answer"])
            state = self._tasks[ans.task_id]
            state.answers.append(ans)
            state.answered_by.add(ans.worker_id)
        elif kind == "task_resolved":
            state = self._tasks[event["task_id"]]
            state.task = replace(state.task, state=event["state"])
            state.winner = event.get("winner")
        else:
            raise ValueError(f"unknown event {kind!r}")

    # -- workers ---------------------------------------------------------

    def register_worker(self, name: str, email: str) -> WorkerProfile:
        with self._lock:
            wid = worker_id_for(email)
            if wid not in self._workers:
                profile = WorkerProfile(wid, name, email)
                self._emit({"event": "worker_registered", "worker_id": wid,
                            "name": name, "email": email})
                self._workers[wid] = profile
            return self._workers[wid]

    def workers(self) -> list[WorkerProfile]:
        return list(self._workers.values())

    # -- tasks -----------------------------------------------------------

    def add_task(self, task: MicroTask):
        with self._lock:
            if task.task_id in self._tasks:
                return
            self._emit({"event": "task_created", "task": task.to_dict()})
            self._tasks[task.task_id] = _TaskState(task=task)

    def add_tasks(self, tasks):
        for task in tasks:
            self.add_task(task)

    def get(self, task_id: str) -> MicroTask:
        state = self._tasks.get(task_id)
        if state is None:
            raise UnknownTask(task_id)
        return state.task

    def tasks(self) -> list[MicroTask]:
        return [s.task for s in self._tasks.values()]

    def answers_for(self, task_id: str) -> list[Answer]:
        return list(self._tasks[task_id].answers)

    def winner_of(self, task_id: str) -> str | None:
        return self._tasks[task_id].winner

    def answer_count(self, task_id: str) -> int:
        return len(self._tasks[task_id].answers)

    def result_of(self, task_id: str) -> AggregateResult:
        state = self._tasks.get(task_id)
        if state is None:
            raise UnknownTask(task_id)
        return aggregate(state.task, state.answers)

    # -- scheduling --------------------------------------------------------

    def next_batch(self, worker_id: str, batch_size: int = 10) -> tuple[list[MicroTask], bool]:
        """Open tasks this worker has not answered, least-answered first.
        Returns (tasks, no_tasks_available)."""
        with self._lock:
            if worker_id not in self._workers:
                raise UnknownWorker(worker_id)
            post_totals: dict[str, int] = {}
            for state in self._tasks.values():
                post_totals[state.task.post_id] = (
                    post_totals.get(state.task.post_id, 0) + len(state.answers)
                )
            eligible = [
                state
                for state in self._tasks.values()
                if state.task.state == OPEN and worker_id not in state.answered_by
            ]
            eligible.sort(
                key=lambda s: (len(s.answers), post_totals[s.task.post_id], s.task.task_id)
            )
            batch = [s.task for s in eligible[:batch_size]]
            return batch, not batch

    # -- answering ---------------------------------------------------------

    def submit_answer(self, answer: Answer) -> AggregateResult:
        with self._lock:
            state = self._tasks.get(answer.task_id)
            if state is None:
                raise UnknownTask(answer.task_id)
            if answer.worker_id not in self._workers:
                raise UnknownWorker(answer.worker_id)
            if state.task.state != OPEN:
                raise TaskClosed(answer.task_id)
            if answer.worker_id in state.answered_by:
                raise DuplicateAnswer(f"{answer.worker_id} already answered {answer.task_id}")
            normalize_choice(state.task, answer.choice)  # validates
            if not answer.received_at:
                answer = replace(answer, received_at=self._clock())

            events = [{"event": "answer_recorded", "answer": answer.to_dict()}]
            state.answers.append(answer)
            state.answered_by.add(answer.worker_id)

            result = aggregate(state.task, state.answers)
            follow_up = None
            if result.resolved:
                state.task = replace(state.task, state=RESOLVED)
                state.winner = result.winner
                events.append({"event": "task_resolved", "task_id": state.task.task_id,
                               "state": RESOLVED, "winner": result.winner})
                follow_up = self._correction_follow_up(state)
            elif len(state.answers) >= state.task.max_answers:
                state.task = replace(state.task, state=EXHAUSTED)
                events.append({"event": "task_resolved", "task_id": state.task.task_id,
                               "state": EXHAUSTED, "winner": None})
            if follow_up is not None and follow_up.task_id not in self._tasks:
                events.append({"event": "task_created", "task": follow_up.to_dict()})
                self._tasks[follow_up.task_id] = _TaskState(task=follow_up)
            self._emit(*events)
            return result

    def _correction_follow_up(self, state: _TaskState) -> MicroTask | None:
        """A resolved suggestion with an actual issue spawns the matching
        correction task, using the candidate lists cached at generation."""
        task = state.task
        if task.kind != SUGGESTION or state.winner == ISSUE_NONE:
            return None
        cached = (task.candidates_by_class or {}).get(state.winner, [])
        return generate_correction_task(
            feature_id=task.feature_id,
            post_id=task.post_id,
            surface=task.surface or "",
            post_text=task.post_text,
            resolved_issue=state.winner,
            candidates=[tuple(c) for c in cached],
            quorum=task.quorum,
        )

    # -- progress ------------------------------------------------------------

    def progress(self) -> dict:
        with self._lock:
            by_state = {OPEN: 0, RESOLVED: 0, EXHAUSTED: 0}
            answers = 0
            for state in self._tasks.values():
                by_state[state.task.state] += 1
                answers += len(state.answers)
            return {
                "workers": len(self._workers),
                "tasks_total": len(self._tasks),
                "tasks_open": by_state[OPEN],
                "tasks_resolved": by_state[RESOLVED],
                "tasks_exhausted": by_state[EXHAUSTED],
                "answers_total": answers,
            }


def replay(log_path: str | Path) -> TaskBoard:
    """Rebuild a board from its event log without holding it open for
    writing (raises CorruptLog on the first bad line)."""
    board = TaskBoard(log_path=None)
    board._apply_log(Path(log_path))
    return board


# ---------------------------------------------------------------------------
# applying crowd results back onto the feature store
# ---------------------------------------------------------------------------

def apply_crowd_results(board: TaskBoard, features: list[FeatureRecord]) -> tuple[list[FeatureRecord], dict]:
    """Fold resolved tasks back into feature records.

    Returns the updated records plus {post_id: category} labels from
    identification winners.
    """
    by_feature_suggestion: dict[str, _TaskState] = {}
    by_feature_correction: dict[str, _TaskState] = {}
    categories: dict[str, str] = {}
    for state in board._tasks.values():
        task = state.task
        if task.kind == SUGGESTION and task.feature_id:
            by_feature_suggestion[task.feature_id] = state
        elif task.kind == CORRECTION and task.feature_id:
            by_feature_correction[task.feature_id] = state
        elif task.kind == IDENTIFICATION and task.state == RESOLVED:
            categories[task.post_id] = state.winner

    out = []
    for feat in features:
        if feat.status != STATUS_NEEDS_CROWD:
            out.append(feat)
            continue
        suggestion = by_feature_suggestion.get(feat.feature_id)
        correction = by_feature_correction.get(feat.feature_id)
        if suggestion is not None and suggestion.task.state == EXHAUSTED:
            out.append(feat.with_(status=STATUS_UNRESOLVED))
            continue
        if suggestion is not None and suggestion.task.state == RESOLVED:
            if suggestion.winner == ISSUE_NONE:
                out.append(feat.with_(status=STATUS_CLEAN, issue_class=ISSUE_NONE))
                continue
            feat = feat.with_(issue_class=suggestion.winner)
        if correction is not None and correction.task.state == RESOLVED:
            result = aggregate(correction.task, correction.answers)
            share = result.counts.get(correction.winner, 0) / len(correction.answers)
            out.append(
                feat.with_(
                    status=STATUS_CROWD,
                    correction=correction.winner,
                    provenance={
                        "method": "crowd",
                        "source_id": correction.task.task_id,
                        "score": round(share, 6),
                    },
                )
            )
        elif correction is not None and correction.task.state == EXHAUSTED:
            out.append(feat.with_(status=STATUS_UNRESOLVED))
        else:
            out.append(feat)
    return out, categories
