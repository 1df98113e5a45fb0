# -*- coding: utf-8 -*-
"""
报告与输入文件的 pydantic 模型。写出前先把 payload 转成 JSON 安全形式（非有限数为 null）再校验，
schema 子命令输出的就是这些模型的 JSON Schema。
"""
from __future__ import annotations

import json
from typing import Any, Dict, List, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from tools.errors import InputError
from tools.file_util import dumps


class CloudModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    points: List[List[float]] = Field(min_length=1)
    weights: Optional[List[float]] = None
    k: int = Field(default=1, ge=1)
    boundary_distance: Optional[List[float]] = None


class JetModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    base_points: List[List[float]] = Field(min_length=1)
    values: List[List[float]]
    derivatives: List[List[List[float]]]
    alpha: float = Field(gt=0, le=1)


class VerdictModel(BaseModel):
    name: str
    passed: Optional[bool] = None
    statistic: Optional[float] = None
    threshold: Optional[float] = None
    scales: List[int] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)


class ProfileModel(BaseModel):
    index: Optional[int] = None
    x: List[float]
    radii: List[float]
    valid: List[bool]
    betas: Dict[str, List[Optional[float]]]
    cyl_excess: List[Optional[float]]
    parab_excess: List[Optional[float]]
    thetas: List[Optional[float]]
    densities: List[Optional[float]]
    planes: List[Optional[Dict[str, Any]]]


class PointModel(BaseModel):
    index: int
    x: List[float]
    verdicts: Dict[str, VerdictModel]
    uniform_subset: bool
    canonical_subset: bool
    measured_delta: Optional[float] = None
    measured_M: Optional[float] = None
    stabilization: Dict[str, Any]
    holder: Optional[Dict[str, Any]] = None
    beta_diagnostics: List[Dict[str, Any]]
    profile: Optional[ProfileModel] = None


class AnalysedPointModel(PointModel):
    profile: ProfileModel


class CriterionCountModel(BaseModel):
    passed: int = Field(ge=0)
    failed: int = Field(ge=0)
    indeterminate: int = Field(ge=0)
    pass_fraction: Optional[float] = Field(default=None, ge=0, le=1)


class AggregateModel(BaseModel):
    model_config = ConfigDict(extra="allow")

    queries: int = Field(ge=0)
    criteria: Dict[str, CriterionCountModel]
    indeterminate_points: int = Field(ge=0)
    uniform_subset: Dict[str, Any]
    relative_density_subset: Dict[str, Any]
    canonical_subset: Dict[str, Any]
    measured_delta: Optional[float] = None
    measured_M: Optional[float] = None


class ClassifyReportModel(BaseModel):
    params: Dict[str, Any]
    constants: Dict[str, Any]
    per_point: List[PointModel]
    aggregate: AggregateModel


class CloudSummaryModel(BaseModel):
    n_points: int = Field(ge=1)
    n: int = Field(ge=2)
    k: int = Field(ge=1)
    total_mass: float = Field(gt=0)


class AnalysisReportModel(ClassifyReportModel):
    cloud: CloudSummaryModel
    per_point: List[AnalysedPointModel]


class LemmaCheckModel(BaseModel):
    name: str
    samples: int = Field(ge=0)
    violations: int = Field(ge=0)
    worst_margin: Optional[float] = None
    passed: bool
    details: Dict[str, Any] = Field(default_factory=dict)


class VerifyReportModel(BaseModel):
    seed: int = Field(ge=0)
    sabotage: Optional[str] = None
    passed: bool
    first_failure: Optional[str] = None
    lemmas: List[LemmaCheckModel]


REPORT_MODELS: Dict[str, Type[BaseModel]] = {
    "classify": ClassifyReportModel,
    "analyze": AnalysisReportModel,
    "verify": VerifyReportModel,
    "cloud": CloudModel,
    "jet": JetModel,
}


def json_safe(payload: Any) -> Any:
    """与写文件时相同的转换：numpy 转内置类型，非有限数转 null。"""
    return json.loads(dumps(payload))


def validate_report(kind: str, payload: Any) -> Dict[str, Any]:
    """校验并返回 JSON 安全的 payload；不符合模型时报 InputError。"""
    model = REPORT_MODELS.get(kind)
    if model is None:
        raise InputError(f"未知的报告类型 {kind!r}，可选: {', '.join(REPORT_MODELS)}")
    data = json_safe(payload)
    try:
        model.model_validate(data)
    except ValidationError as e:
        raise InputError(f"{kind} 报告不符合 schema: {e.error_count()} 处错误，首个: {e.errors()[0]['msg']}")
    return data


def report_schema(kind: str = "classify") -> Dict[str, Any]:
    model = REPORT_MODELS.get(kind)
    if model is None:
        raise InputError(f"未知的报告类型 {kind!r}")
    return model.model_json_schema()
