# -*- coding: utf-8 -*-
"""
合成加权点云：仿射平面、圆、球面、C^{1,α} 图（缺项级数）、四角 Cantor 集、折线雪花、加噪声。
权重是参数化的 k 维求积权重再乘以 2^k/ω_k，使 H^k(B(x,r)) 与 (2r)^k 同一量纲；Cantor 集总质量归一为 1。
同一 spec + seed 得到逐位相同的点云。
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Tuple

import numpy as np

from tools.cloud import WeightedCloud
from tools.errors import InputError
from tools.geometry import hausdorff_normalization

KINDS = (
    "affine_plane",
    "circle",
    "sphere",
    "c1alpha_graph",
    "c1beta_graph",
    "four_corner_cantor",
    "snowflake",
    "noisy",
)

_DEFAULT_PARAMS: Dict[str, Dict[str, Any]] = {
    "affine_plane": {"rotate": False},
    "circle": {"radius": 1.0},
    "sphere": {"radius": 1.0},
    "c1alpha_graph": {"alpha": 0.5, "b": 4, "J_terms": 8, "t0": 0.0, "t1": 1.0},
    "c1beta_graph": {"beta": 0.25, "b": 4, "J_terms": 8, "t0": 0.0, "t1": 1.0},
    "four_corner_cantor": {"depth": 6},
    "snowflake": {"depth": 8, "angles": None},
    "noisy": {"base": None, "sigma": 1e-3},
}

_DEFAULT_DIMS: Dict[str, Tuple[int, int]] = {
    "affine_plane": (3, 2),
    "circle": (2, 1),
    "sphere": (3, 2),
    "c1alpha_graph": (2, 1),
    "c1beta_graph": (2, 1),
    "four_corner_cantor": (2, 1),
    "snowflake": (2, 1),
}


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    k: int
    sample_count: int
    seed: int = 0
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InputError(f"未知的生成器类型 {self.kind!r}，可选: {', '.join(KINDS)}")
        merged = dict(_DEFAULT_PARAMS[self.kind])
        merged.update(self.params or {})
        if isinstance(merged.get("base"), GeneratorSpec):
            merged["base"] = merged["base"].to_dict()
        object.__setattr__(self, "params", merged)
        if int(self.sample_count) < 10:
            raise InputError("sample_count 至少为 10")
        if not (1 <= self.k <= self.n - 1):
            raise InputError(f"需要 1 ≤ k ≤ n−1，得到 k={self.k}, n={self.n}")
        _validate(self)

    @classmethod
    def default(cls, kind: str, sample_count: int = 1000, seed: int = 0, **params: Any) -> "GeneratorSpec":
        """按类型取常用维数 (n, k)；noisy 继承 base 的维数。"""
        if kind == "noisy":
            base = params.get("base")
            if base is None:
                raise InputError("noisy 需要 base")
            b = base if isinstance(base, GeneratorSpec) else GeneratorSpec.from_dict(base)
            params["base"] = b.to_dict()
            return cls(kind, b.n, b.k, sample_count, seed, params)
        if kind not in _DEFAULT_DIMS:
            raise InputError(f"未知的生成器类型 {kind!r}")
        n, k = _DEFAULT_DIMS[kind]
        return cls(kind, n, k, sample_count, seed, params)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind, "n": int(self.n), "k": int(self.k),
            "sample_count": int(self.sample_count), "seed": int(self.seed), "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "GeneratorSpec":
        try:
            return cls(str(d["kind"]), int(d["n"]), int(d["k"]), int(d["sample_count"]), int(d.get("seed", 0)), dict(d.get("params") or {}))
        except KeyError as e:
            raise InputError(f"生成器描述缺少字段 {e.args[0]}")


def _unit_interval(name: str, v: Any) -> None:
    if not (isinstance(v, (int, float)) and 0 < float(v) <= 1):
        raise InputError(f"{name} 必须在 (0,1] 内")


def _validate(spec: GeneratorSpec) -> None:
    p = spec.params
    kind = spec.kind
    if kind == "circle":
        if spec.k != 1 or not (p["radius"] > 0):
            raise InputError("circle 需要 k = 1 且半径为正")
    elif kind == "sphere":
        if spec.k != 2 or spec.n < 3 or not (p["radius"] > 0):
            raise InputError("sphere 需要 k = 2、n ≥ 3 且半径为正")
    elif kind in ("c1alpha_graph", "c1beta_graph"):
        _unit_interval("alpha" if kind == "c1alpha_graph" else "beta", p["alpha" if kind == "c1alpha_graph" else "beta"])
        if spec.k != 1 or int(p["b"]) < 2 or int(p["J_terms"]) < 1 or not (p["t1"] > p["t0"]):
            raise InputError("图生成器需要 k = 1、b ≥ 2、J_terms ≥ 1、t1 > t0")
    elif kind == "four_corner_cantor":
        if spec.k != 1 or spec.n != 2 or not (1 <= int(p["depth"]) <= 10):
            raise InputError("four_corner_cantor 需要 n = 2、k = 1、1 ≤ depth ≤ 10")
    elif kind == "snowflake":
        if spec.k != 1 or spec.n != 2 or not (1 <= int(p["depth"]) <= 16):
            raise InputError("snowflake 需要 n = 2、k = 1、1 ≤ depth ≤ 16")
        if p["angles"] is not None:
            ang = np.asarray(p["angles"], dtype=float)
            if ang.size < int(p["depth"]) or np.any(ang < 0) or np.any(ang >= math.pi / 2):
                raise InputError("angles 至少要有 depth 个，且每个在 [0, π/2) 内")
    elif kind == "noisy":
        if p["base"] is None or not (p["sigma"] >= 0):
            raise InputError("noisy 需要 base 与非负 sigma")
        base = GeneratorSpec.from_dict(p["base"])
        if base.kind == "noisy":
            raise InputError("noisy 不能嵌套")
        if (base.n, base.k) != (spec.n, spec.k):
            raise InputError("noisy 的 (n,k) 必须与 base 相同")


def _random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def _embed(Y: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((Y.shape[0], n))
    out[:, : Y.shape[1]] = Y
    return out


def _affine_plane(spec: GeneratorSpec, rng: np.random.Generator) -> WeightedCloud:
    """[−1,1]^k 上的格心网格，每轴 ceil(N^{1/k}) 个点。"""
    k, n = spec.k, spec.n
    m = int(math.ceil(spec.sample_count ** (1.0 / k) - 1e-9))
    h = 2.0 / m
    axis = -1.0 + h * (np.arange(m) + 0.5)
    grids = np.meshgrid(*([axis] * k), indexing="ij")
    T = np.column_stack([g.ravel() for g in grids])
    P = _embed(T, n)
    if spec.params.get("rotate"):
        P = P @ _random_rotation(n, rng).T
    w = np.full(T.shape[0], h ** k * hausdorff_normalization(k))
    bd = np.min(1.0 - np.abs(T), axis=1)
    return WeightedCloud(P, w, k, bd)


def _circle(spec: GeneratorSpec, rng: np.random.Generator) -> WeightedCloud:
    N = int(spec.sample_count)
    R = float(spec.params["radius"])
    phase = rng.uniform(0.0, 2.0 * math.pi / N)
    th = phase + 2.0 * math.pi * np.arange(N) / N
    P = _embed(R * np.column_stack([np.cos(th), np.sin(th)]), spec.n)
    return WeightedCloud(P, np.full(N, 2.0 * math.pi * R / N), 1)


def _sphere(spec: GeneratorSpec, rng: np.random.Generator) -> WeightedCloud:
    """Fibonacci 格点，面积元 4πR²/N。"""
    N = int(spec.sample_count)
    R = float(spec.params["radius"])
    i = np.arange(N) + 0.5
    z = 1.0 - 2.0 * i / N
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i + rng.uniform(0.0, 2.0 * math.pi)
    s = np.sqrt(1.0 - z * z)
    P = _embed(R * np.column_stack([s * np.cos(phi), s * np.sin(phi), z]), spec.n)
    w = np.full(N, 4.0 * math.pi * R * R / N * hausdorff_normalization(2))
    return WeightedCloud(P, w, 2)


def lacunary(t: np.ndarray, exponent: float, b: int, terms: int) -> np.ndarray:
    """f(t) = Σ_{j=1..J} b^{−j(1+a)} cos(b^j t)。"""
    f = np.zeros_like(t, dtype=float)
    for j in range(1, terms + 1):
        f += float(b) ** (-j * (1.0 + exponent)) * np.cos(float(b) ** j * t)
    return f


def _polyline_cloud(P: np.ndarray, t_weights: np.ndarray, n: int) -> WeightedCloud:
    """曲线点列 + 弧长权重；边界距离取到两端点的欧氏距离。"""
    ends = P[[0, -1]]
    bd = np.minimum(np.linalg.norm(P - ends[0], axis=1), np.linalg.norm(P - ends[1], axis=1))
    return WeightedCloud(_embed(P, n), t_weights * hausdorff_normalization(1), 1, bd)


def _graph(spec: GeneratorSpec, rng: np.random.Generator) -> WeightedCloud:
    p = spec.params
    a = float(p["alpha"] if spec.kind == "c1alpha_graph" else p["beta"])
    N = int(spec.sample_count)
    t0, t1 = float(p["t0"]), float(p["t1"])
    dt = (t1 - t0) / N
    t = t0 + dt * (np.arange(N) + 0.5)
    f = lacunary(t, a, int(p["b"]), int(p["J_terms"]))
    df = np.gradient(f, t)
    w = np.sqrt(1.0 + df * df) * dt
    return _polyline_cloud(np.column_stack([t, f]), w, spec.n)


def _cantor(spec: GeneratorSpec, rng: np.random.Generator) -> WeightedCloud:
    """4^depth 个第 depth 层正方形的中心，压缩比 1/4，角偏移 {0, 3/4}²；每点权重 4^{−depth}。"""
    d = int(spec.params["depth"])
    corners = np.array([[0.0, 0.0], [0.75, 0.0], [0.0, 0.75], [0.75, 0.75]])
    P = np.zeros((1, 2))
    for level in range(d):
        scale = 4.0 ** (-level)
        P = (P[:, None, :] + scale * corners[None, :, :]).reshape(-1, 2)
    P = P + 0.5 * 4.0 ** (-d)
    return WeightedCloud(P, np.full(P.shape[0], 4.0 ** (-d)), 1)


def snowflake_angles(depth: int) -> np.ndarray:
    """α_g = 1/√g（g 从 1 起），限制在 π/3 以内。"""
    g = np.arange(1, depth + 1, dtype=float)
    return np.minimum(1.0 / np.sqrt(g), math.pi / 3)


def snowflake_polyline(depth: int, angles: Any = None) -> np.ndarray:
    """从 [0,1]×{0} 出发，第 g 代把每段 AB 换成 A→M′→B，M′ 为中点沿法向抬高 tan(α_g)|AB|/2，方向逐代交替。"""
    ang = snowflake_angles(depth) if angles is None else np.asarray(angles, dtype=float)
    V = np.array([[0.0, 0.0], [1.0, 0.0]])
    for g in range(depth):
        A, B = V[:-1], V[1:]
        d = B - A
        normal = np.column_stack([-d[:, 1], d[:, 0]])
        sign = 1.0 if g % 2 == 0 else -1.0
        mid = 0.5 * (A + B) + sign * 0.5 * math.tan(ang[g]) * normal
        out = np.empty((2 * V.shape[0] - 1, 2))
        out[0::2] = V
        out[1::2] = mid
        V = out
    return V


def _snowflake(spec: GeneratorSpec, rng: np.random.Generator) -> WeightedCloud:
    """折线按弧长等距取格心点，每点权重 = 总长/N。"""
    p = spec.params
    V = snowflake_polyline(int(p["depth"]), p["angles"])
    seg = np.linalg.norm(np.diff(V, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(cum[-1])
    N = int(spec.sample_count)
    s = total * (np.arange(N) + 0.5) / N
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, seg.size - 1)
    u = ((s - cum[idx]) / seg[idx])[:, None]
    P = V[idx] + u * (V[idx + 1] - V[idx])
    return _polyline_cloud(P, np.full(N, total / N), spec.n)


def _noisy(spec: GeneratorSpec, rng: np.random.Generator) -> WeightedCloud:
    base_d = spec.params["base"]
    base = GeneratorSpec.from_dict(base_d)
    cloud = generate(base)
    P = cloud.points + float(spec.params["sigma"]) * rng.standard_normal(cloud.points.shape)
    return WeightedCloud(P, cloud.weights, cloud.k, cloud.boundary_distance)


_BUILDERS: Dict[str, Callable[[GeneratorSpec, np.random.Generator], WeightedCloud]] = {
    "affine_plane": _affine_plane,
    "circle": _circle,
    "sphere": _sphere,
    "c1alpha_graph": _graph,
    "c1beta_graph": _graph,
    "four_corner_cantor": _cantor,
    "snowflake": _snowflake,
    "noisy": _noisy,
}


def generate(spec: GeneratorSpec) -> WeightedCloud:
    """按 spec 生成点云；所有随机性来自 spec.seed。"""
    rng = np.random.default_rng(np.random.SeedSequence(int(spec.seed)))
    cloud = _BUILDERS[spec.kind](spec, rng)
    if cloud.ambient_dim != spec.n:
        raise InputError(f"生成的点云维数 {cloud.ambient_dim} 与 n={spec.n} 不符")
    return cloud


def generate_kind(kind: str, sample_count: int = 1000, seed: int = 0, **params: Any) -> WeightedCloud:
    return generate(GeneratorSpec.default(kind, sample_count, seed, **params))
