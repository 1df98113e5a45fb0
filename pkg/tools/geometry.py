# -*- coding: utf-8 -*-
"""
线性代数基础：线性/仿射 k 平面、正交投影、Grassmann 距离、
区域判定（抛物体、柱体、锥体）、Lemma 管状见证与初等不等式。
所有对象构造后不可变，函数均为纯函数，可在多线程中直接共享。
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from scipy.special import gamma

import config
from tools.errors import DegenerateInputError, InputError


def _tol() -> float:
    return float(getattr(config, "PLANE_EQUAL_TOL", 1e-10))


def _slack() -> float:
    return float(getattr(config, "MEMBERSHIP_SLACK", 1e-12))


def _as_vector(y: Any, n: int) -> np.ndarray:
    v = np.asarray(y, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise InputError(f"向量维度 {v.shape[0]} 与环境维度 {n} 不符")
    return v


def _as_points(Y: Any, n: int) -> np.ndarray:
    P = np.asarray(Y, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1)
    if P.shape[1] != n:
        raise InputError(f"点的维度 {P.shape[1]} 与环境维度 {n} 不符")
    return P


@dataclass(frozen=True, eq=False)
class LinearPlane:
    """过原点的 k 维子空间，basis 为 n×k 列正交矩阵。

    0 维平面只作为 tube_witness 在 k=1 时的结果出现；需要 k≥1 的运算自行检查。
    """
    basis: np.ndarray

    def __post_init__(self) -> None:
        B = np.asarray(self.basis, dtype=float)
        if B.ndim != 2 or B.shape[0] < 1:
            raise InputError("basis 必须是 n×k 矩阵")
        n, k = B.shape
        if k > n:
            raise InputError(f"平面维数 {k} 超过环境维数 {n}")
        if not np.all(np.isfinite(B)):
            raise InputError("basis 含非有限值")
        if k and np.max(np.abs(B.T @ B - np.eye(k))) > _tol():
            raise InputError("basis 的列不是正交归一的")
        B = B.copy()
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def from_spanning(cls, vectors: Any) -> "LinearPlane":
        """由张成向量（作为列）做 QR 正交化；向量线性相关时报错。"""
        A = np.asarray(vectors, dtype=float)
        if A.ndim == 1:
            A = A.reshape(-1, 1)
        Q, R = np.linalg.qr(A)
        diag = np.abs(np.diag(R))
        if diag.size and diag.min() <= _tol() * max(1.0, diag.max()):
            raise DegenerateInputError("张成向量线性相关")
        return cls(Q)

    @classmethod
    def coordinate(cls, n: int, k: int) -> "LinearPlane":
        """前 k 个坐标轴张成的平面 R^k ⊂ R^n。"""
        return cls(np.eye(n)[:, :k])

    @property
    def ambient_dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ambient_dim": self.ambient_dim,
            "dim": self.dim,
            "basis": self.basis.tolist(),
            "offset": [0.0] * self.ambient_dim,
        }


@dataclass(frozen=True, eq=False)
class AffinePlane:
    """V = Ṽ + a，offset a 与 Ṽ 正交，分解唯一。"""
    linear: LinearPlane
    offset: np.ndarray

    def __post_init__(self) -> None:
        a = _as_vector(self.offset, self.linear.ambient_dim)
        if self.linear.dim and np.max(np.abs(self.linear.basis.T @ a)) > _tol() * max(1.0, float(np.linalg.norm(a))):
            raise InputError("offset 与平面不正交")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "offset", a)

    @classmethod
    def through(cls, point: Any, linear: LinearPlane) -> "AffinePlane":
        """过给定点、方向为 linear 的仿射平面。"""
        p = _as_vector(point, linear.ambient_dim)
        return cls(linear, p - linear.basis @ (linear.basis.T @ p))

    @property
    def ambient_dim(self) -> int:
        return self.linear.ambient_dim

    @property
    def dim(self) -> int:
        return self.linear.dim

    def dist_many(self, Y: Any) -> np.ndarray:
        P = _as_points(Y, self.ambient_dim)
        B = self.linear.basis
        D = P - self.offset
        N = D - (D @ B) @ B.T
        return np.linalg.norm(N, axis=1)

    def dist(self, y: Any) -> float:
        return float(self.dist_many(_as_vector(y, self.ambient_dim))[0])

    def nearest_point(self, y: Any) -> np.ndarray:
        """平面上离 y 最近的点。"""
        v = _as_vector(y, self.ambient_dim)
        B = self.linear.basis
        return self.offset + B @ (B.T @ (v - self.offset))

    def to_dict(self) -> Dict[str, Any]:
        d = self.linear.to_dict()
        d["offset"] = self.offset.tolist()
        return d


PlaneLike = Union[LinearPlane, AffinePlane]


def plane_from_dict(d: Dict[str, Any]) -> AffinePlane:
    n = int(d["ambient_dim"])
    k = int(d["dim"])
    B = np.asarray(d["basis"], dtype=float).reshape(n, k)
    return AffinePlane(LinearPlane(B), np.asarray(d.get("offset") or [0.0] * n, dtype=float))


def _linear(V: PlaneLike) -> LinearPlane:
    return V.linear if isinstance(V, AffinePlane) else V


def project(V: PlaneLike, y: Any) -> Tuple[np.ndarray, np.ndarray]:
    """返回 (切向分量, 法向分量)，两者之和为 y。"""
    L = _linear(V)
    v = _as_vector(y, L.ambient_dim)
    t = L.basis @ (L.basis.T @ v)
    return t, v - t


def orthogonal_complement(V: PlaneLike) -> LinearPlane:
    L = _linear(V)
    n, k = L.ambient_dim, L.dim
    if k == 0:
        return LinearPlane(np.eye(n))
    Q, _ = np.linalg.qr(L.basis, mode="complete")
    return LinearPlane(Q[:, k:])


def grassmann_distance(V: PlaneLike, W: PlaneLike) -> float:
    """d(V,W) = ‖P_V − P_W‖（谱范数），仿射平面取其线性部分。"""
    A, B = _linear(V), _linear(W)
    if A.ambient_dim != B.ambient_dim:
        raise InputError("两平面环境维数不同")
    if A.dim != B.dim:
        raise InputError(f"两平面维数不同: {A.dim} vs {B.dim}")
    d = float(np.linalg.norm(A.projector - B.projector, 2))
    return min(1.0, max(0.0, d))


def random_plane(n: int, k: int, rng: np.random.Generator) -> LinearPlane:
    """Haar 随机 k 平面（高斯矩阵做 QR）。"""
    Q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return LinearPlane(Q)


def unit_ball_volume(n: int) -> float:
    """ω_n：R^n 单位球的 Lebesgue 体积。"""
    if n < 0:
        raise InputError("维数必须非负")
    return float(math.pi ** (n / 2.0) / gamma(n / 2.0 + 1.0))


def hausdorff_normalization(k: int) -> float:
    """k 维面积乘以此因子后满足 H^k(B(x,r)) = (2r)^k。"""
    return float(2.0 ** k / unit_ball_volume(k))


@dataclass(frozen=True, eq=False)
class SlantMap:
    """线性映射 L: V → V^⊥，矩阵在 V 与 V^⊥ 的固定正交基下表示（(n−k)×k）。"""
    domain: LinearPlane
    codomain: LinearPlane
    matrix: np.ndarray

    def __post_init__(self) -> None:
        M = np.asarray(self.matrix, dtype=float)
        if M.shape != (self.codomain.dim, self.domain.dim):
            raise InputError(f"斜映射矩阵形状 {M.shape} 与平面维数不符")
        if not np.all(np.isfinite(M)):
            raise InputError("斜映射矩阵含非有限值")
        M = M.copy()
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def zero(cls, V: LinearPlane) -> "SlantMap":
        C = orthogonal_complement(V)
        return cls(V, C, np.zeros((C.dim, V.dim)))

    @classmethod
    def from_plane(cls, W: PlaneLike, over: LinearPlane) -> "SlantMap":
        """把 W 写成 V 上的图 {v + L v}；W 与 V^⊥ 有公共方向时报错。"""
        A = _linear(W).basis
        B = over.basis
        C = orthogonal_complement(over)
        T = B.T @ A
        if abs(np.linalg.det(T)) <= _tol():
            raise DegenerateInputError("平面不能写成基平面上的图")
        return cls(over, C, (C.basis.T @ A) @ np.linalg.inv(T))

    @property
    def operator_norm(self) -> float:
        if self.matrix.size == 0:
            return 0.0
        return float(np.linalg.norm(self.matrix, 2))

    def apply_many(self, Y: Any) -> np.ndarray:
        """对每行 y 返回 L(P_V y)，作为 R^n 中的向量。"""
        P = _as_points(Y, self.domain.ambient_dim)
        s = P @ self.domain.basis
        return (s @ self.matrix.T) @ self.codomain.basis.T

    def graph_plane(self) -> LinearPlane:
        B, C = self.domain.basis, self.codomain.basis
        return LinearPlane.from_spanning(B + C @ self.matrix)


@dataclass(frozen=True, eq=False)
class Paraboloid:
    """Q_α(x,V,λ)；带 slant 时为斜抛物体 |P_{V⊥}y − L(P_V y)| ≤ λ|P_V y|^{1+α}（y 相对顶点）。"""
    apex: np.ndarray
    plane: LinearPlane
    lam: float
    alpha: float
    slant: Optional[SlantMap] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "apex", _as_vector(self.apex, self.plane.ambient_dim))
        if not (self.lam > 0):
            raise InputError("λ 必须为正")
        if not (0 < self.alpha <= 1):
            raise InputError("α 必须在 (0,1] 内")
        if self.slant is not None and self.slant.domain.dim != self.plane.dim:
            raise InputError("斜映射的定义域与平面不符")

    def contains_many(self, Y: Any) -> np.ndarray:
        P = _as_points(Y, self.plane.ambient_dim) - self.apex
        B = self.plane.basis
        s = P @ B
        normal = P - s @ B.T
        if self.slant is not None:
            normal = normal - self.slant.apply_many(P)
        tan = np.linalg.norm(s, axis=1)
        return np.linalg.norm(normal, axis=1) <= self.lam * tan ** (1.0 + self.alpha) + _slack()


@dataclass(frozen=True, eq=False)
class Cylinder:
    """B(V,η) = {y : dist(y,V) < η}；η = inf 表示全空间。"""
    plane: AffinePlane
    eta: float

    def __post_init__(self) -> None:
        if not (self.eta > 0):
            raise InputError("η 必须为正")

    def contains_many(self, Y: Any) -> np.ndarray:
        P = _as_points(Y, self.plane.ambient_dim)
        if math.isinf(self.eta):
            return np.ones(P.shape[0], dtype=bool)
        return self.plane.dist_many(P) < self.eta + _slack()


@dataclass(frozen=True, eq=False)
class Cone:
    """X(x,V,s) = {y : |P_{V⊥}(y−x)| ≤ s|P_V(y−x)|}。"""
    apex: np.ndarray
    plane: LinearPlane
    aperture: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "apex", _as_vector(self.apex, self.plane.ambient_dim))
        if not (self.aperture > 0):
            raise InputError("锥开口 s 必须为正")

    def contains_many(self, Y: Any) -> np.ndarray:
        P = _as_points(Y, self.plane.ambient_dim) - self.apex
        s = P @ self.plane.basis
        normal = P - s @ self.plane.basis.T
        return np.linalg.norm(normal, axis=1) <= self.aperture * np.linalg.norm(s, axis=1) + _slack()


Region = Union[Paraboloid, Cylinder, Cone]


def region_contains(R: Region, y: Any) -> bool:
    return bool(R.contains_many(y)[0])


@dataclass(frozen=True, eq=False)
class TubeWitness:
    """(k−1) 维平面 Z 及半径 width：两柱体之交落在 B(Z, width) 内。"""
    plane: LinearPlane
    width: float
    theta: float
    normal_direction: np.ndarray = field(repr=False)

    def dist_many(self, Y: Any) -> np.ndarray:
        P = _as_points(Y, self.plane.ambient_dim)
        B = self.plane.basis
        return np.linalg.norm(P - (P @ B) @ B.T, axis=1)


def tube_witness(V: LinearPlane, W: LinearPlane, eta: float) -> TubeWitness:
    """取 W^⊥ 中使 |P_V e| 最大的单位 e，Z = span{e, V^⊥}^⊥，宽度 2nη/θ。"""
    if V.dim < 1:
        raise InputError("tube_witness 需要 k ≥ 1")
    if not (eta > 0):
        raise InputError("η 必须为正")
    theta = grassmann_distance(V, W)
    if theta < _tol():
        raise DegenerateInputError(f"两平面几乎重合 (θ={theta:.3e})")
    D = orthogonal_complement(W).basis
    B = V.basis
    # P_V 限制在 W^⊥ 上的最大奇异方向
    _, sv, vt = np.linalg.svd(B.T @ D)
    e = D @ vt[0]
    c = B.T @ e
    c = c / np.linalg.norm(c)
    Q, _ = np.linalg.qr(c.reshape(-1, 1), mode="complete")
    Z = LinearPlane(B @ Q[:, 1:])
    n = V.ambient_dim
    return TubeWitness(Z, 2.0 * n * eta / theta, theta, B @ c)


@dataclass(frozen=True)
class ElemResult:
    """初等不等式的结果：hypotheses_ok=False 时 failed 给出不满足的假设名。"""
    hypotheses_ok: bool
    conclusion: bool
    failed: Optional[str] = None
    margin: float = 0.0

    def __bool__(self) -> bool:
        return self.conclusion


def elem_terms(a: Any, b: Any, w: Any, lam: Any, alpha: Any) -> Dict[str, np.ndarray]:
    """向量化计算三个假设与结论，供单点判断与验证套件批量使用。"""
    a, b, w = np.asarray(a, float), np.asarray(b, float), np.asarray(w, float)
    lam, alpha = np.asarray(lam, float), np.asarray(alpha, float)
    tol = float(getattr(config, "PYTHAGORAS_TOL", 1e-9))
    slack = _slack()
    pyth = np.abs(a * a + b * b - w * w) <= tol * np.maximum(1.0, w * w)
    lower = a >= lam * b ** (1.0 + alpha) - slack
    upper = a <= lam ** (-1.0 / alpha) + slack
    rhs = 0.5 * lam * w ** (1.0 + alpha)
    return {
        "pythagoras": pyth,
        "paraboloid": lower,
        "small": upper,
        "conclusion": a >= rhs - slack,
        "margin": a - rhs,
    }


def elem_inequality_holds(a: float, b: float, w: float, lam: float, alpha: float) -> ElemResult:
    """a ≥ (λ/2)w^{1+α}；假设 a²+b²=w²、a ≥ λb^{1+α}、a ≤ λ^{−1/α}。"""
    if min(a, b, w) < 0 or lam <= 0 or not (0 < alpha <= 1):
        raise InputError("a,b,w 须非负，λ>0，α∈(0,1]")
    t = elem_terms(a, b, w, lam, alpha)
    failed = None
    for name in ("pythagoras", "paraboloid", "small"):
        if not bool(t[name]):
            failed = name
            break
    return ElemResult(failed is None, bool(t["conclusion"]), failed, float(t["margin"]))
