# -*- coding: utf-8 -*-
"""加权点云：H^k⌞E 的离散替身，带 KD 树球查询、密度比与区域外超额质量."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from tools.errors import InputError
from tools.geometry import Region


@dataclass(frozen=True)
class DensityEstimate:
    x: np.ndarray
    r: float
    theta: float


class WeightedCloud:
    """构造后不可变；所有查询为纯函数，可并发调用。

    boundary_distance 为每点到采样域边界的距离，None 表示无边界（闭曲线、全采样）。
    球为闭球 |p − x| ≤ r。
    """

    def __init__(
        self,
        points: Any,
        weights: Optional[Any] = None,
        k: int = 1,
        boundary_distance: Optional[Any] = None,
    ):
        P = np.asarray(points, dtype=float)
        if P.ndim != 2 or P.shape[0] == 0:
            raise InputError("points 必须是非空的 N×n 数组")
        if not np.all(np.isfinite(P)):
            raise InputError("坐标含 NaN/Inf")
        N, n = P.shape
        if weights is None:
            w = np.ones(N)
        else:
            w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape[0] != N:
            raise InputError(f"权重个数 {w.shape[0]} 与点数 {N} 不符")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InputError("权重必须是有限正数")
        if not (1 <= int(k) <= n - 1):
            raise InputError(f"内蕴维数 k={k} 需满足 1 ≤ k ≤ n−1 (n={n})")
        bd = None
        if boundary_distance is not None:
            bd = np.asarray(boundary_distance, dtype=float).reshape(-1)
            if bd.shape[0] != N:
                raise InputError("boundary_distance 长度与点数不符")
            bd.setflags(write=False)
        P = P.copy()
        w = w.copy()
        P.setflags(write=False)
        w.setflags(write=False)
        self._points = P
        self._weights = w
        self._k = int(k)
        self._boundary = bd
        self._tree = cKDTree(P)
        self._min_spacing: Optional[float] = None

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def k(self) -> int:
        return self._k

    @property
    def ambient_dim(self) -> int:
        return int(self._points.shape[1])

    @property
    def boundary_distance(self) -> Optional[np.ndarray]:
        return self._boundary

    @property
    def tree(self) -> cKDTree:
        return self._tree

    def __len__(self) -> int:
        return int(self._points.shape[0])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self._weights))

    def domain_mask(self, r: float) -> np.ndarray:
        """r 邻域完全被采样的点。"""
        if self._boundary is None:
            return np.ones(len(self), dtype=bool)
        return self._boundary >= r

    def ball_indices(self, x: Any, r: float) -> np.ndarray:
        if not (r > 0):
            raise InputError("半径 r 必须为正")
        idx = self._tree.query_ball_point(np.asarray(x, dtype=float), r)
        return np.asarray(sorted(idx), dtype=np.intp)

    def ball_mass(self, x: Any, r: float) -> float:
        idx = self.ball_indices(x, r)
        return float(np.sum(self._weights[idx])) if idx.size else 0.0

    def density_ratio(self, x: Any, r: float) -> DensityEstimate:
        """Θ = μ(B(x,r)) / (2r)^k。"""
        m = self.ball_mass(x, r)
        return DensityEstimate(np.asarray(x, dtype=float), float(r), m / (2.0 * r) ** self._k)

    def split_mass(self, x: Any, r: float, region: Region) -> Tuple[float, float]:
        """(区域内质量, 区域外质量)，两者之和等于 ball_mass。"""
        idx = self.ball_indices(x, r)
        if idx.size == 0:
            return 0.0, 0.0
        inside = region.contains_many(self._points[idx])
        w = self._weights[idx]
        return float(np.sum(w[inside])), float(np.sum(w[~inside]))

    def excess_ratio(self, x: Any, r: float, region: Region) -> float:
        """球内、区域外的质量除以 r^k（不是 (2r)^k）。"""
        _, outside = self.split_mass(x, r, region)
        return outside / r ** self._k

    def min_spacing(self) -> float:
        """最小非零点距；点数为 1 或全部重合时为 0。"""
        if self._min_spacing is None:
            if len(self) < 2:
                value = 0.0
            else:
                d, _ = self._tree.query(self._points, k=2)
                nz = d[:, 1][d[:, 1] > 0]
                value = float(nz.min()) if nz.size else 0.0
            self._min_spacing = value
        return self._min_spacing

    def diameter_bound(self) -> float:
        """包围盒对角线，作为直径上界。"""
        return float(np.linalg.norm(self._points.max(axis=0) - self._points.min(axis=0)))

    def with_weights(self, factor: float) -> "WeightedCloud":
        return WeightedCloud(self._points, self._weights * factor, self._k, self._boundary)

    def transformed(self, rotation: Any, translation: Any) -> "WeightedCloud":
        """刚体运动 p ↦ R p + t；边界距离不变。"""
        R = np.asarray(rotation, dtype=float)
        t = np.asarray(translation, dtype=float)
        return WeightedCloud(self._points @ R.T + t, self._weights, self._k, self._boundary)

    def subset(self, indices: Any) -> "WeightedCloud":
        idx = np.asarray(indices, dtype=np.intp)
        bd = None if self._boundary is None else self._boundary[idx]
        return WeightedCloud(self._points[idx], self._weights[idx], self._k, bd)

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "points": self._points.tolist(),
            "weights": self._weights.tolist(),
            "k": self._k,
        }
        if self._boundary is not None:
            d["boundary_distance"] = self._boundary.tolist()
        return d


def concatenate(clouds: Sequence[WeightedCloud]) -> WeightedCloud:
    """不交并；任一输入无边界信息时对应点视为无边界。"""
    if not clouds:
        raise InputError("至少需要一个点云")
    k = clouds[0].k
    if any(c.k != k or c.ambient_dim != clouds[0].ambient_dim for c in clouds):
        raise InputError("点云的维数不一致")
    pts = np.vstack([c.points for c in clouds])
    w = np.concatenate([c.weights for c in clouds])
    bd = None
    if any(c.boundary_distance is not None for c in clouds):
        bd = np.concatenate([
            c.boundary_distance if c.boundary_distance is not None else np.full(len(c), np.inf)
            for c in clouds
        ])
    return WeightedCloud(pts, w, k, bd)
