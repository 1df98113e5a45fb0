# -*- coding: utf-8 -*-
"""读写点云（.csv / .json）与 JSON 报告；按扩展名分派，解析错误带行号。"""
from __future__ import annotations

import csv
import json
import math
import os
from typing import Any, List, Optional

import numpy as np

from tools.cloud import WeightedCloud
from tools.errors import InputError, ParseError

_WEIGHT_NAMES = ("w", "weight", "weights")


def read_cloud(path: str, k: Optional[int] = None, total_mass_hint: Optional[float] = None) -> WeightedCloud:
    """
    根据扩展名读取点云。CSV 列为 x1..xn[,w]；JSON 为 {points, weights, k}。
    缺少权重列时每点权重为 total_mass_hint/N，未给提示则为 1。
    """
    path = (path or "").strip()
    if not path or not os.path.isfile(path):
        raise ParseError(f"文件不存在: {path}")
    ext = os.path.splitext(path)[1].lower()
    if ext == ".csv":
        return _read_csv(path, k, total_mass_hint)
    if ext == ".json":
        return _read_json_cloud(path, k, total_mass_hint)
    raise ParseError(f"不支持的类型 {ext}，请使用 .csv / .json")


def _default_weights(n_points: int, total_mass_hint: Optional[float]) -> np.ndarray:
    if total_mass_hint is not None:
        if not (total_mass_hint > 0):
            raise InputError("total_mass_hint 必须为正")
        return np.full(n_points, float(total_mass_hint) / n_points)
    return np.ones(n_points)


def _parse_float(text: str, row: int) -> float:
    try:
        v = float(text)
    except (TypeError, ValueError):
        raise ParseError(f"非数值字段 {text!r}", row=row)
    if not math.isfinite(v):
        raise ParseError(f"非有限数值 {text!r}", row=row)
    return v


def _read_csv(path: str, k: Optional[int], total_mass_hint: Optional[float]) -> WeightedCloud:
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(f)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ParseError("文件内容为空")
    has_weight = False
    first_row, first = rows[0]
    try:
        [float(c) for c in first]
    except ValueError:
        names = [c.strip().lower() for c in first]
        has_weight = names[-1] in _WEIGHT_NAMES
        rows = rows[1:]
        if not rows:
            raise ParseError("只有表头没有数据", row=first_row)
    width = len(rows[0][1])
    points: List[List[float]] = []
    weights: List[float] = []
    for row, cells in rows:
        if len(cells) != width:
            raise ParseError(f"列数 {len(cells)} 与首行 {width} 不符", row=row)
        vals = [_parse_float(c.strip(), row) for c in cells]
        if has_weight:
            if vals[-1] <= 0:
                raise ParseError(f"权重必须为正，得到 {vals[-1]}", row=row)
            weights.append(vals[-1])
            vals = vals[:-1]
        points.append(vals)
    if k is None:
        k = 1
    w = np.asarray(weights) if has_weight else _default_weights(len(points), total_mass_hint)
    return WeightedCloud(np.asarray(points), w, k)


def _read_json_cloud(path: str, k: Optional[int], total_mass_hint: Optional[float]) -> WeightedCloud:
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON 格式错误: {e.msg}", row=e.lineno)
    if not isinstance(data, dict) or "points" not in data:
        raise ParseError("JSON 缺少 points 字段")
    pts = data["points"]
    if not isinstance(pts, list) or not pts:
        raise ParseError("points 为空")
    width = None
    for i, p in enumerate(pts):
        if not isinstance(p, list) or (width is not None and len(p) != width):
            raise ParseError("点坐标格式错误", row=i + 1)
        width = len(p)
        for c in p:
            if not isinstance(c, (int, float)) or not math.isfinite(c):
                raise ParseError(f"非有限坐标 {c!r}", row=i + 1)
    weights = data.get("weights")
    if weights is None:
        w = _default_weights(len(pts), total_mass_hint)
    else:
        if len(weights) != len(pts):
            raise ParseError("weights 长度与 points 不符")
        for i, v in enumerate(weights):
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
                raise ParseError(f"权重必须为有限正数，得到 {v!r}", row=i + 1)
        w = np.asarray(weights, dtype=float)
    kk = int(data.get("k", 1)) if k is None else int(k)
    return WeightedCloud(np.asarray(pts, dtype=float), w, kk, data.get("boundary_distance"))


def write_cloud(path: str, cloud: WeightedCloud) -> None:
    ext = os.path.splitext(path)[1].lower()
    if ext == ".csv":
        n = cloud.ambient_dim
        with open(path, "w", encoding="utf-8", newline="") as f:
            wr = csv.writer(f)
            wr.writerow([f"x{i + 1}" for i in range(n)] + ["w"])
            for p, w in zip(cloud.points.tolist(), cloud.weights.tolist()):
                wr.writerow([repr(c) for c in p] + [repr(w)])
        return
    write_json(path, cloud.to_dict())


def _jsonable(value: Any) -> Any:
    """非有限浮点转为 None，numpy 类型转为内置类型。"""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def dumps(payload: Any) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)


def write_json(path: str, payload: Any) -> None:
    """键排序、固定缩进，相同输入得到逐字节相同的文件。"""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(payload) + "\n")


def read_json(path: str) -> Any:
    if not path or not os.path.isfile(path):
        raise ParseError(f"文件不存在: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"JSON 格式错误: {e.msg}", row=e.lineno)
