# -*- coding: utf-8 -*-
"""
从 analyze 报告导出两列制表符分隔的绘图数据：log r 对 log β_p、log r 对 log θ_j、r 对超额比。
每个查询点一个块（# 标题行开头，块之间空一行），零值与缺失值作为断点（空行）而不是 −∞；
另有按尺度取中位数的汇总文件。
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from tools.errors import InputError
from tools.logger_util import log


@dataclass(frozen=True)
class Series:
    name: str
    x: np.ndarray
    y: np.ndarray  # nan 表示断点


def _as_array(values: Sequence[Optional[float]]) -> np.ndarray:
    return np.array([np.nan if v is None else float(v) for v in values], dtype=float)


def _log_or_gap(values: Sequence[Optional[float]]) -> np.ndarray:
    v = _as_array(values)
    out = np.full(v.shape, np.nan)
    pos = np.isfinite(v) & (v > 0)
    out[pos] = np.log(v[pos])
    return out


def _p_name(label: str) -> str:
    return "inf" if label == "inf" else f"{float(label):g}"


def profile_series(profile: Dict[str, Any]) -> List[Series]:
    radii = np.asarray(profile["radii"], dtype=float)
    logr = np.log(radii)
    out: List[Series] = []
    for label in sorted(profile.get("betas", {}), key=lambda s: math.inf if s == "inf" else float(s)):
        out.append(Series(f"beta_p{_p_name(label)}", logr, _log_or_gap(profile["betas"][label])))
    thetas = profile.get("thetas") or []
    out.append(Series("theta", logr[: len(thetas)], _log_or_gap(thetas)))
    out.append(Series("cyl_excess", radii, _as_array(profile["cyl_excess"])))
    out.append(Series("parab_excess", radii, _as_array(profile["parab_excess"])))
    return out


def _median_series(name: str, group: List[Series]) -> Series:
    """同名序列逐尺度取有限值的中位数；横坐标取最长的那条。"""
    longest = max(group, key=lambda s: s.x.size)
    ys = np.full(longest.x.size, np.nan)
    for j in range(longest.x.size):
        vals = [s.y[j] for s in group if j < s.y.size and np.isfinite(s.y[j])]
        if vals:
            ys[j] = float(np.median(vals))
    return Series(name, longest.x, ys)


def format_blocks(blocks: Sequence[Tuple[str, Series]]) -> str:
    lines: List[str] = []
    for title, s in blocks:
        lines.append(f"# {title}")
        for xv, yv in zip(s.x, s.y):
            if np.isfinite(yv):
                lines.append(f"{float(xv)!r}\t{float(yv)!r}")
            elif lines[-1] != "":
                lines.append("")
        if lines[-1] != "":
            lines.append("")
    return "\n".join(lines) + "\n"


def write_plot_data(report: Dict[str, Any], out_dir: str, prefix: str = "rectiscope") -> List[str]:
    """每种量一个逐点文件和一个汇总文件，返回写出的路径（按名字排序）。"""
    profiles = [(p.get("index"), p["profile"]) for p in report.get("per_point") or [] if p.get("profile")]
    if not profiles:
        raise InputError("报告中没有逐尺度剖面，请先用 analyze 生成报告")
    os.makedirs(out_dir, exist_ok=True)
    grouped: Dict[str, List[Tuple[Any, Series]]] = {}
    for index, prof in profiles:
        for s in profile_series(prof):
            grouped.setdefault(s.name, []).append((index, s))
    paths: List[str] = []
    for name in sorted(grouped):
        items = grouped[name]
        per_point = os.path.join(out_dir, f"{prefix}_{name}.tsv")
        with open(per_point, "w", encoding="utf-8") as f:
            f.write(format_blocks([(f"point {index}", s) for index, s in items]))
        agg = os.path.join(out_dir, f"{prefix}_{name}_aggregate.tsv")
        with open(agg, "w", encoding="utf-8") as f:
            f.write(format_blocks([("median", _median_series(name, [s for _, s in items]))]))
        paths.extend([per_point, agg])
    log(f"绘图数据已写出 {len(paths)} 个文件到 {out_dir}")
    return paths


def read_plot_file(path: str) -> List[np.ndarray]:
    """读回一个绘图文件，按块与断点切成若干 (m,2) 数组。"""
    segments: List[np.ndarray] = []
    rows: List[Tuple[float, float]] = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                if rows:
                    segments.append(np.asarray(rows))
                    rows = []
                continue
            a, b = line.split("\t")
            rows.append((float(a), float(b)))
    if rows:
        segments.append(np.asarray(rows))
    return segments
