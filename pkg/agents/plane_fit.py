# -*- coding: utf-8 -*-
"""
β_p(x,r) 与（近似）最优仿射 k 平面。
p=2 为加权二阶矩精确解；其他 p 为多起点重加权迭代，返回的值是 β_p 的可证上界。
"""
from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

import config
from agents.fit_cache import FitCache, make_key
from tools.cloud import WeightedCloud
from tools.errors import EmptyBallError, InputError
from tools.geometry import AffinePlane, LinearPlane, orthogonal_complement
from tools.logger_util import log


@dataclass(frozen=True)
class BetaResult:
    x: np.ndarray
    r: float
    p: float
    value: float
    plane: AffinePlane
    is_exact: bool
    rank_deficient: bool = False
    mass: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": np.asarray(self.x).tolist(),
            "r": self.r,
            "p": "inf" if math.isinf(self.p) else self.p,
            "value": self.value,
            "plane": self.plane.to_dict(),
            "is_exact": self.is_exact,
            "rank_deficient": self.rank_deficient,
        }


def call_seed(x: Any, r: float, p: float, seed: int) -> int:
    """由 (x, r, p, 全局种子) 派生每次调用的种子，与调度顺序无关。"""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(np.asarray(x, dtype=float)).tobytes())
    h.update(struct.pack("<dd", float(r), float(p) if math.isfinite(p) else -1.0))
    h.update(struct.pack("<q", int(seed)))
    return int.from_bytes(h.digest()[:8], "little")


def _ball(cloud: WeightedCloud, x: Any, r: float) -> Tuple[np.ndarray, np.ndarray]:
    idx = cloud.ball_indices(x, r)
    if idx.size == 0:
        raise EmptyBallError(f"B(x, {r:.4g}) 内没有点")
    return cloud.points[idx], cloud.weights[idx]


def _sign_normalize(E: np.ndarray) -> np.ndarray:
    """每列首个非零分量取正。"""
    E = E.copy()
    for j in range(E.shape[1]):
        col = E[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size and col[nz[0]] < 0:
            E[:, j] = -col
    return E


def _weighted_frame(Y: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """加权重心、按特征值降序排列的特征向量矩阵与特征值。"""
    s = float(np.sum(u))
    c = (u @ Y) / s
    D = Y - c
    cov = (D * u[:, None]).T @ D
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(-vals, kind="stable")
    return c, _sign_normalize(vecs[:, order]), vals[order]


def _fill_basis(E: np.ndarray, vals: np.ndarray, k: int) -> Tuple[np.ndarray, bool]:
    """秩不足时用环境坐标轴（下标小者优先）补齐缺失方向。"""
    n = E.shape[0]
    top = max(float(vals[0]), 0.0) if vals.size else 0.0
    rank = int(np.sum(vals > 1e-12 * max(top, 1e-300))) if top > 0 else 0
    if rank >= k:
        return E[:, :k], False
    cols = [E[:, j] for j in range(rank)]
    for i in range(n):
        if len(cols) == k:
            break
        v = np.eye(n)[:, i]
        for c in cols:
            v = v - (c @ v) * c
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
    return np.column_stack(cols), True


def _plane_from(Y: np.ndarray, u: np.ndarray, k: int) -> Tuple[AffinePlane, bool]:
    c, E, vals = _weighted_frame(Y, u)
    B, deficient = _fill_basis(E, vals, k)
    return AffinePlane.through(c, LinearPlane(B)), deficient


def _drop_lightest(Y: np.ndarray, w: np.ndarray, quantile: float) -> Tuple[np.ndarray, np.ndarray]:
    """丢弃累计权重不超过 quantile·总质量的最轻点（至少保留一个）。"""
    if quantile <= 0:
        return Y, w
    order = np.argsort(w, kind="stable")
    cum = np.cumsum(w[order])
    drop = order[cum <= quantile * cum[-1]]
    if drop.size >= w.size:
        drop = drop[:-1]
    keep = np.setdiff1d(np.arange(w.size), drop)
    return Y[keep], w[keep]


def objective(Y: np.ndarray, w: np.ndarray, plane: AffinePlane, p: float, r: float, k: int) -> float:
    """β_p 在给定平面处的值：(r^{−k} Σ w (d/r)^p)^{1/p}；p=∞ 时为 max d/r。"""
    d = plane.dist_many(Y) / r
    if math.isinf(p):
        return float(np.max(d)) if d.size else 0.0
    return float((np.sum(w * d ** p) / r ** k) ** (1.0 / p))


def fit_beta2(cloud: WeightedCloud, x: Any, r: float) -> BetaResult:
    """加权重心 + 加权协方差前 k 个特征向量；值为精确最小值。"""
    Y, w = _ball(cloud, x, r)
    k = cloud.k
    plane, deficient = _plane_from(Y, w, k)
    if deficient:
        log(f"B(x,{r:.4g}) 内点的秩不足 {k}，缺失方向用坐标轴补齐", level="DEBUG")
    value = objective(Y, w, plane, 2.0, r, k)
    return BetaResult(np.asarray(x, dtype=float), float(r), 2.0, value, plane, True, deficient, float(np.sum(w)))


def _refine_offset(Y: np.ndarray, plane: AffinePlane) -> AffinePlane:
    """固定方向，在法空间里取法向分量的最小包围球中心（余维 1 取中点）。"""
    B = plane.linear.basis
    N = Y - (Y @ B) @ B.T
    n, k = B.shape
    if n - k == 1:
        nu = orthogonal_complement(plane.linear).basis[:, 0]
        t = N @ nu
        center = 0.5 * (t.min() + t.max()) * nu
    else:
        # Badoiu–Clarkson 迭代
        center = plane.offset.copy()
        for it in range(1, 201):
            far = N[int(np.argmax(np.linalg.norm(N - center, axis=1)))]
            center = center + (far - center) / (it + 1)
    return AffinePlane.through(center, plane.linear)


def _start_planes(seed_plane: AffinePlane, E: np.ndarray, rng: np.random.Generator, restarts: int) -> list:
    """β_2 平面 + 在局部特征标架下随机扰动的若干平面。"""
    starts = [seed_plane]
    n, k = seed_plane.linear.basis.shape
    for _ in range(restarts):
        local = np.eye(n)[:, :k] + 0.3 * rng.standard_normal((n, k))
        Q, _ = np.linalg.qr(E @ local)
        starts.append(AffinePlane.through(seed_plane.offset, LinearPlane(Q)))
    return starts


def _irls(Y: np.ndarray, w: np.ndarray, start: AffinePlane, p: float, r: float, k: int) -> Tuple[AffinePlane, float]:
    """有限 p：u = w·d^{p−2} 重加权；p=∞：Lawson 乘性更新 u ← u·d 后再调整偏移。"""
    best = start
    best_val = objective(Y, w, start, p, r, k)
    max_iter = int(getattr(config, "BETA_P_MAX_ITER", 60))
    tol = float(getattr(config, "BETA_P_REL_TOL", 1e-10))
    u = w / np.sum(w)
    for _ in range(max_iter):
        if best_val <= 0:
            break
        d = np.maximum(best.dist_many(Y), 1e-12 * r)
        if math.isinf(p):
            u = u * d
            u = u / np.sum(u)
        else:
            u = w * d ** (p - 2.0)
        cand, _ = _plane_from(Y, u, k)
        if math.isinf(p):
            cand = _refine_offset(Y, cand)
        val = objective(Y, w, cand, p, r, k)
        # 只接受单调下降
        if val >= best_val * (1.0 - tol):
            if val < best_val:
                best, best_val = cand, val
            break
        best, best_val = cand, val
    return best, best_val


def fit_betap(
    cloud: WeightedCloud,
    x: Any,
    r: float,
    p: float,
    seed: Optional[int] = None,
    quantile: Optional[float] = None,
    cache: Optional[FitCache] = None,
) -> BetaResult:
    """p=2 走精确路径；否则多起点迭代，返回达到的目标值（上界）。"""
    p = float(p)
    if not (p >= 1):
        raise InputError(f"p 必须在 [1, ∞] 内，得到 {p}")
    seed = int(getattr(config, "GLOBAL_SEED", 0) if seed is None else seed)
    q = float(getattr(config, "BETA_INF_QUANTILE", 0.0) if quantile is None else quantile)
    if not (0 <= q < 1):
        raise InputError("quantile 必须在 [0,1) 内")
    if cache is not None:
        key = make_key(x, r, p, q, seed)
        return cache.get_or_compute(key, lambda: _fit_betap(cloud, x, r, p, seed, q))
    return _fit_betap(cloud, x, r, p, seed, q)


def _fit_betap(cloud: WeightedCloud, x: Any, r: float, p: float, seed: int, q: float) -> BetaResult:
    if p == 2.0:
        return fit_beta2(cloud, x, r)
    Y, w = _ball(cloud, x, r)
    if math.isinf(p):
        Y, w = _drop_lightest(Y, w, q)
    k = cloud.k
    c, E, vals = _weighted_frame(Y, w)
    B, deficient = _fill_basis(E, vals, k)
    seed_plane = AffinePlane.through(c, LinearPlane(B))
    best, best_val = seed_plane, objective(Y, w, seed_plane, p, r, k)
    if best_val > 0:
        rng = np.random.default_rng(np.random.SeedSequence(call_seed(x, r, p, seed)))
        restarts = 0 if math.isinf(p) else int(getattr(config, "BETA_P_RESTARTS", 4))
        for start in _start_planes(seed_plane, E, rng, restarts):
            plane, val = _irls(Y, w, start, p, r, k)
            if val < best_val:
                best, best_val = plane, val
        if math.isinf(p):
            refined = _refine_offset(Y, best)
            val = objective(Y, w, refined, p, r, k)
            if val < best_val:
                best, best_val = refined, val
    return BetaResult(np.asarray(x, dtype=float), float(r), p, best_val, best, False, deficient, float(np.sum(w)))


def p_objective_at(cloud: WeightedCloud, x: Any, r: float, p: float, plane: AffinePlane) -> float:
    """给定平面处的 p 目标值（任意平面都可行，因此是 β_p 的上界）。"""
    Y, w = _ball(cloud, x, r)
    return objective(Y, w, plane, float(p), r, cloud.k)
