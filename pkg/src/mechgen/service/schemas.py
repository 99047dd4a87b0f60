"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DomainUploadResponse(BaseModel):
    id: str
    ok: bool
    violations: list[dict] = Field(default_factory=list)


class JobRequest(BaseModel):
    domain_id: str
    horizon: int | None = None
    max_candidates: int | None = None
    time_budget: float | None = None


class AdaptRequest(BaseModel):
    domain_id: str
    seed_mechanics: list = Field(default_factory=list)
    overlay: dict | None = None
    max_candidates: int | None = None
    time_budget: float | None = None


class JobResponse(BaseModel):
    id: str
    kind: str
    status: str
    domain_id: str | None = None
    submitted: str | None = None
    finished: str | None = None
    result: dict | None = None
    error: str | None = None


class SessionRequest(BaseModel):
    domain_id: str | None = None
    domain: dict | None = None
    mechanics: list = Field(default_factory=list)
    instance: str | None = None
    controls: list | None = None


class ActRequest(BaseModel):
    agent: str
    action: int | str


class ErrorBody(BaseModel):
    code: str
    message: str
