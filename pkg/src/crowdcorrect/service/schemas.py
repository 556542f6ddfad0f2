"""Pydantic request/response models for the crowd-task HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class RegisterRequest(BaseModel):
    name: str = Field(min_length=1)
    email: str = Field(min_length=3)


class RegisterResponse(BaseModel):
    worker_id: str


class ChoiceBody(BaseModel):
    """Exactly one of ``option`` (index) or ``text`` (free text)."""

    option: int | None = None
    text: str | None = None

    @model_validator(mode="after")
    def exactly_one(self):
        if (self.option is None) == (self.text is None):
            raise ValueError("choice needs exactly one of 'option' or 'text'")
        return self

    def as_pair(self) -> tuple[str, object]:
        if self.option is not None:
            return ("option", self.option)
        return ("text", self.text)


class AnswerRequest(BaseModel):
    task_id: str
    worker_id: str
    choice: ChoiceBody


class TaskView(BaseModel):
    task_id: str
    kind: str
    post_id: str
    feature_id: str | None
    surface: str | None
    post_text: str
    prompt: str
    options: list[str]
    allows_free_text: bool
    quorum: int
    state: str
    answers: int


class NextTasksResponse(BaseModel):
    tasks: list[TaskView]
    no_tasks_available: bool


class AggregateView(BaseModel):
    task_id: str
    counts: dict[str, int]
    quorum_met: bool
    resolved: bool
    winner: str | None


class ProgressResponse(BaseModel):
    workers: int
    tasks_total: int
    tasks_open: int
    tasks_resolved: int
    tasks_exhausted: int
    answers_total: int


class ErrorBody(BaseModel):
    code: str
    message: str
