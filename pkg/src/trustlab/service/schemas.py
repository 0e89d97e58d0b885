"""Pydantic request/response models for the session service API."""

from __future__ import annotations

from pydantic import BaseModel, Field


class RegisterRequest(BaseModel):
    slot: str


class RegisterResponse(BaseModel):
    subject_id: str
    slot: str


class StartResponse(BaseModel):
    subject_id: str
    started: bool = True


class AmountRequest(BaseModel):
    amount: int


class TimePrefAnswer(BaseModel):
    position: int = Field(ge=0)
    choice: str


class TrustAnswer(BaseModel):
    position: int = Field(ge=0)
    value: int


class CertaintyAnswer(BaseModel):
    block: int = Field(ge=0)
    agreement: int
    certainty: int


class DemographicsAnswer(BaseModel):
    answers: dict[str, str]


class AckResponse(BaseModel):
    subject_id: str
    stage: str


class ExportRequest(BaseModel):
    out_dir: str


class ExportResponse(BaseModel):
    paths: dict[str, str]
    row_counts: dict[str, int]


class LotteryResponse(BaseModel):
    winner: str
    reward: int
    weights: dict[str, int]


class StrategyUpload(BaseModel):
    config: dict


class StrategyUploadResponse(BaseModel):
    version: str
    accepted: bool = True


class SessionSummary(BaseModel):
    slots: list[str]
    subjects_by_stage: dict[str, int]
    total_subjects: int
