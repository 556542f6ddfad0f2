"""Deterministic simulated crowd workers.

Each worker answers correctly with probability ``accuracy`` against a known
truth, otherwise picks a uniformly random wrong option. Worker RNG streams
are derived from (seed, worker_id), so a whole simulation is reproducible
from its seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .crowd import (
    CORRECTION,
    EXHAUSTED,
    IDENTIFICATION,
    OPEN,
    RESOLVED,
    SUGGESTION,
    Answer,
    MicroTask,
    TaskBoard,
    TaskClosed,
)

WRONG_FREE_TEXT = "(no idea)"
BATCH_SIZE = 10


@dataclass
class WorkerModel:
    worker_id: str
    accuracy: float
    rng_seed: int

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must be within [0,1]")
        self.rng = random.Random(f"{self.rng_seed}|{self.worker_id}")


def simulate_answer(task: MicroTask, truth: str, model: WorkerModel) -> Answer:
    """Answer with the truth with probability ``accuracy``, otherwise with a
    uniformly random wrong option (or a fixed wrong free text when the task
    has no options to be wrong with)."""
    folded = [opt.casefold() for opt in task.options]
    truth_idx = folded.index(truth.casefold()) if truth.casefold() in folded else None
    if truth_idx is None and not task.allows_free_text:
        raise ValueError(f"truth {truth!r} is not a valid choice for {task.task_id}")

    if model.rng.random() < model.accuracy:
        if truth_idx is not None:
            choice = ("option", truth_idx)
        else:
            choice = ("text", truth)
    else:
        wrong = [i for i in range(len(task.options)) if i != truth_idx]
        if wrong:
            choice = ("option", model.rng.choice(wrong))
        else:
            choice = ("text", WRONG_FREE_TEXT)
    return Answer(task_id=task.task_id, worker_id=model.worker_id, choice=choice)


class TruthOracle:
    """Resolves the expected answer for any task, including correction tasks
    created mid-run.

    Explicit truths are keyed by (kind, ref_id) where ref_id is the post id
    for identification tasks and the feature id otherwise. Tasks without an
    explicit truth fall back to "there is no issue here": suggestion ->
    "none", correction -> the surface itself.
    """

    def __init__(self, entries: dict[tuple[str, str], str]):
        self.entries = dict(entries)

    @classmethod
    def from_rows(cls, rows) -> "TruthOracle":
        return cls({(kind, ref_id): truth for kind, ref_id, truth in rows})

    def truth_for(self, task: MicroTask) -> str:
        ref = task.post_id if task.kind == IDENTIFICATION else (task.feature_id or "")
        explicit = self.entries.get((task.kind, ref))
        if explicit is not None:
            return explicit
        if task.kind == SUGGESTION:
            return "none"
        if task.kind == CORRECTION:
            return task.surface or ""
        raise KeyError(f"no truth for identification task {task.task_id}")


def run_simulation(board: TaskBoard, oracle: TruthOracle, n_workers: int,
                   accuracy: float, seed: int,
                   batch_size: int = BATCH_SIZE) -> dict:
    """Drive next_batch/submit_answer with ``n_workers`` simulated workers
    until every task is resolved or exhausted (or no worker can contribute
    anything further). Fully deterministic for a given seed."""
    workers = []
    for i in range(n_workers):
        profile = board.register_worker(f"sim-{i:04d}", f"sim-{i:04d}@example.test")
        workers.append(WorkerModel(profile.worker_id, accuracy, seed))

    answers_spent = 0
    progressed = True
    while progressed:
        progressed = False
        for model in workers:
            batch, unavailable = board.next_batch(model.worker_id, batch_size)
            if unavailable:
                continue
            for task in batch:
                if board.get(task.task_id).state != OPEN:
                    continue
                answer = simulate_answer(task, oracle.truth_for(task), model)
                try:
                    board.submit_answer(answer)
                except TaskClosed:
                    continue
                answers_spent += 1
                progressed = True

    tasks = board.tasks()
    resolved = [t for t in tasks if t.state == RESOLVED]
    correct = sum(
        1
        for t in resolved
        if (board.winner_of(t.task_id) or "").casefold() == oracle.truth_for(t).casefold()
    )
    return {
        "tasks_total": len(tasks),
        "resolved": len(resolved),
        "exhausted": sum(1 for t in tasks if t.state == EXHAUSTED),
        "resolution_rate": len(resolved) / len(tasks) if tasks else 0.0,
        "accuracy_of_winners": correct / len(resolved) if resolved else 0.0,
        "answers_spent": answers_spent,
    }
