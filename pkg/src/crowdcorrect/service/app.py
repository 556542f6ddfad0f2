"""HTTP API over a task board: worker registration, task batches, answers
and progress. All mutations funnel through the board's single-writer lock;
responses are plain views of board state.

Store directory resolution: explicit argument, then the CROWDCORRECT_STORE
environment variable.
"""

from __future__ import annotations

import os
import socket
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..crowd import (
    CrowdError,
    DuplicateAnswer,
    InvalidChoice,
    MicroTask,
    Answer,
    TaskBoard,
    TaskClosed,
    UnknownTask,
    UnknownWorker,
)
from ..store import TASKS_FILENAME
from .schemas import (
    AggregateView,
    AnswerRequest,
    ErrorBody,
    NextTasksResponse,
    ProgressResponse,
    RegisterRequest,
    RegisterResponse,
    TaskView,
)

STORE_ENV = "CROWDCORRECT_STORE"
LOCK_FILENAME = "service.lock"

_STATUS_BY_ERROR = {
    DuplicateAnswer: 409,
    TaskClosed: 409,
    UnknownTask: 404,
    UnknownWorker: 404,
    InvalidChoice: 422,
}


class PortInUse(OSError):
    pass


class StoreLocked(OSError):
    pass


def resolve_store_dir(store_dir: str | Path | None) -> Path:
    value = store_dir or os.environ.get(STORE_ENV)
    if not value:
        raise ValueError(f"no store directory: pass one or set {STORE_ENV}")
    return Path(value)


def _task_view(board: TaskBoard, task: MicroTask) -> TaskView:
    return TaskView(
        task_id=task.task_id,
        kind=task.kind,
        post_id=task.post_id,
        feature_id=task.feature_id,
        surface=task.surface,
        post_text=task.post_text,
        prompt=task.prompt,
        options=list(task.options),
        allows_free_text=task.allows_free_text,
        quorum=task.quorum,
        state=task.state,
        answers=board.answer_count(task.task_id),
    )


def create_app(board: TaskBoard, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="crowdcorrect", version="0.1.0")
    app.state.board = board

    @app.exception_handler(CrowdError)
    async def crowd_error_handler(_request: Request, exc: CrowdError):
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        body = ErrorBody(code=exc.code, message=str(exc))
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.post("/workers", response_model=RegisterResponse)
    def register_worker(req: RegisterRequest):
        profile = board.register_worker(req.name, req.email)
        return RegisterResponse(worker_id=profile.worker_id)

    @app.get("/tasks/next", response_model=NextTasksResponse)
    def next_tasks(worker_id: str, n: int = Query(default=10, ge=1, le=50)):
        batch, unavailable = board.next_batch(worker_id, n)
        return NextTasksResponse(
            tasks=[_task_view(board, t) for t in batch],
            no_tasks_available=unavailable,
        )

    @app.get("/tasks/{task_id}", response_model=TaskView)
    def get_task(task_id: str):
        return _task_view(board, board.get(task_id))

    @app.post("/answers", response_model=AggregateView)
    def submit_answer(req: AnswerRequest):
        result = board.submit_answer(
            Answer(task_id=req.task_id, worker_id=req.worker_id,
                   choice=req.choice.as_pair())
        )
        return AggregateView(
            task_id=result.task_id,
            counts=result.counts,
            quorum_met=result.quorum_met,
            resolved=result.resolved,
            winner=result.winner,
        )

    @app.get("/progress", response_model=ProgressResponse)
    def progress():
        return ProgressResponse(**board.progress())

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _check_port(port: int, host: str = "127.0.0.1"):
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            sock.bind((host, port))
        except OSError as exc:
            raise PortInUse(f"port {port} is unavailable: {exc}") from exc


class _StoreLock:
    """Exclusive lock file so only one service writes a store at a time."""

    def __init__(self, directory: Path):
        self.path = directory / LOCK_FILENAME

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise StoreLocked(f"{self.path} exists; another service holds the store") from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        return self

    def __exit__(self, *exc_info):
        self.path.unlink(missing_ok=True)


def serve(store_dir: str | Path | None = None, port: int = 8040,
          host: str = "127.0.0.1", ui_dir: str | Path | None = None):
    """Run the service until interrupted; flushes the event log on the way
    out. Raises PortInUse / StoreLocked before touching anything."""
    import uvicorn

    directory = resolve_store_dir(store_dir)
    directory.mkdir(parents=True, exist_ok=True)
    _check_port(port, host)
    with _StoreLock(directory):
        board = TaskBoard(directory / TASKS_FILENAME)
        try:
            app = create_app(board, ui_dir=ui_dir)
            uvicorn.run(app, host=host, port=port, log_level="info")
        finally:
            board.close()
