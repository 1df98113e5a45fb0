# -*- coding: utf-8 -*-
"""
构造性引理的数值验证：每个检查在随机平面或生成点云上比较“左边 ≤ 右边”，
统计样本数、违例数与最差余量（右边 + 容差 − 左边）。
sabotage 指定的检查会把第一个左边放大到界的 VERIFY_SABOTAGE_FACTOR 倍，用来确认检查本身能失败。
同一 seed 的结果逐位一致。
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import config
from agents.criteria import jones_integral_check
from agents.generators import GeneratorSpec, generate_kind
from agents.multiscale import PointProfile, ScaleGrid, sample_slab, stabilize_planes
from agents.plane_fit import fit_beta2, fit_betap, p_objective_at
from agents.whitney import JetData, geometric_lemma_check, whitney_constants
from tools.cloud import WeightedCloud
from tools.constants import rectifiability_constants
from tools.errors import InputError
from tools.geometry import (
    AffinePlane,
    Cylinder,
    LinearPlane,
    Paraboloid,
    SlantMap,
    elem_terms,
    grassmann_distance,
    orthogonal_complement,
    random_plane,
    tube_witness,
)
from tools.logger_util import log, log_lemma


@dataclass
class LemmaCheck:
    name: str
    samples: int
    violations: int
    worst_margin: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "samples": self.samples,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "passed": self.passed,
            "details": self.details,
        }


class _Tally:
    """累计 lhs ≤ rhs + tol 的比较；nan 一律算违例。"""

    def __init__(self, name: str, sabotaged: bool = False):
        self.name = name
        self._sabotage = sabotaged
        self.samples = 0
        self.violations = 0
        self.worst = math.inf

    def add(self, lhs: Any, rhs: Any, tol: float = 0.0) -> None:
        left = np.array(lhs, dtype=float, ndmin=1).reshape(-1)
        if left.size == 0:
            return
        bound = np.broadcast_to(np.asarray(rhs, dtype=float), left.shape) + tol
        if self._sabotage:
            factor = float(getattr(config, "VERIFY_SABOTAGE_FACTOR", 1.5))
            left[0] = factor * bound[0] if bound[0] > 0 else bound[0] + 1.0
            self._sabotage = False
        margin = bound - left
        margin = np.where(np.isnan(margin), -np.inf, margin)
        self.samples += int(left.size)
        self.violations += int(np.sum(margin < 0))
        self.worst = min(self.worst, float(np.min(margin)))

    def result(self, details: Dict[str, Any]) -> LemmaCheck:
        passed = self.samples > 0 and self.violations == 0
        return LemmaCheck(self.name, self.samples, self.violations, self.worst, passed, details)


class _CloudPack:
    """验证用的生成点云，按需生成后缓存。"""

    _RECIPES: Dict[str, Tuple[str, int, Dict[str, Any]]] = {
        "circle": ("circle", 2000, {}),
        "sphere": ("sphere", 1500, {}),
        "graph": ("c1alpha_graph", 2000, {"alpha": 0.5}),
        "cantor": ("four_corner_cantor", 1024, {"depth": 5}),
        "snowflake": ("snowflake", 2000, {"depth": 6}),
        "plane": ("affine_plane", 400, {"rotate": True}),
        "noisy": ("noisy", 2000, {"sigma": 1e-3}),
    }

    def __init__(self, seed: int):
        self._seed = int(seed)
        self._clouds: Dict[str, WeightedCloud] = {}

    @property
    def names(self) -> List[str]:
        return list(self._RECIPES)

    def get(self, name: str) -> WeightedCloud:
        if name not in self._clouds:
            kind, count, params = self._RECIPES[name]
            params = dict(params)
            if kind == "noisy":
                params["base"] = GeneratorSpec.default("circle", count, self._seed).to_dict()
            self._clouds[name] = generate_kind(kind, count, self._seed, **params)
        return self._clouds[name]

    def draw(self, rng: np.random.Generator) -> Tuple[WeightedCloud, np.ndarray]:
        cloud = self.get(self.names[int(rng.integers(len(self._RECIPES)))])
        return cloud, cloud.points[int(rng.integers(len(cloud)))]


def _unit_rows(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    g = rng.standard_normal((m, d))
    return g / np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)


def _ball_rows(rng: np.random.Generator, m: int, d: int, radius: float) -> np.ndarray:
    """R^d 中半径 radius 的开球内均匀分布。"""
    u = rng.uniform(0.0, 1.0, size=(m, 1)) ** (1.0 / d)
    return _unit_rows(rng, m, d) * radius * u * (1.0 - 1e-12)


def _origin_plane(V: LinearPlane) -> AffinePlane:
    return AffinePlane(V, np.zeros(V.ambient_dim))


def _dims(rng: np.random.Generator, max_k: Optional[int] = None) -> Tuple[int, int]:
    n = int(rng.integers(2, 5))
    k = int(rng.integers(1, n))
    return n, k if max_k is None else min(k, max_k)


def _check_tube(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """B(V,η) ∩ B(W,η) 中的点到 Z 的距离不超过 2nη/θ。"""
    pairs = int(getattr(config, "VERIFY_PLANE_PAIRS", 50))
    count = int(getattr(config, "VERIFY_SAMPLES", 10000))
    skipped = 0
    accepted = 0
    for _ in range(pairs):
        n, k = _dims(rng)
        V, W = random_plane(n, k, rng), random_plane(n, k, rng)
        eta = float(rng.uniform(0.01, 0.2))
        if grassmann_distance(V, W) < 1e-3:
            skipped += 1
            continue
        wit = tube_witness(V, W, eta)
        normal = orthogonal_complement(V).basis
        # Z 方向任取，沿 normal_direction 取到 ±2·width，再加 V^⊥ 中半径 η 的扰动
        along_z = rng.uniform(-1.0, 1.0, size=(count, k - 1)) @ wit.plane.basis.T
        across = rng.uniform(-2.0 * wit.width, 2.0 * wit.width, size=(count, 1)) * wit.normal_direction
        Y = along_z + across + _ball_rows(rng, count, n - k, eta) @ normal.T
        Y = Y[_origin_plane(W).dist_many(Y) < eta]
        accepted += Y.shape[0]
        tally.add(wit.dist_many(Y), wit.width)
    return {"pairs": pairs, "skipped": skipped, "accepted": accepted}


def _check_parabequiv(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """‖L‖ ≤ 1/2 时 Q_α(0,V,λ) ∩ B(0,r_λ) ⊂ Q^L_α(0,R^k,6·4^α λ)，r_λ = (4λ)^{−1/α}。"""
    configs = 20
    per = int(getattr(config, "VERIFY_SAMPLES", 10000)) // 2
    for _ in range(configs):
        n, k = _dims(rng)
        lam = float(math.exp(rng.uniform(math.log(0.5), math.log(5.0))))
        alpha = float(rng.uniform(0.1, 1.0))
        base = LinearPlane.coordinate(n, k)
        L = rng.standard_normal((n - k, k))
        L *= rng.uniform(0.0, 0.5) / max(float(np.linalg.norm(L, 2)), 1e-12)
        slant = SlantMap(base, orthogonal_complement(base), L)
        V = slant.graph_plane()
        r_lam = (4.0 * lam) ** (-1.0 / alpha)
        s = _ball_rows(rng, per, k, r_lam)
        height = lam * np.linalg.norm(s, axis=1, keepdims=True) ** (1.0 + alpha)
        Y = s @ V.basis.T + (_ball_rows(rng, per, n - k, 1.0) * height) @ orthogonal_complement(V).basis.T
        Y = Y[np.linalg.norm(Y, axis=1) <= r_lam]
        coords = Y @ base.basis
        off = Y - coords @ base.basis.T - slant.apply_many(Y)
        lam_p = 6.0 * 4.0 ** alpha * lam
        tally.add(np.linalg.norm(off, axis=1), lam_p * np.linalg.norm(coords, axis=1) ** (1.0 + alpha), tol=1e-12)
    return {"configs": configs}


def _check_parabcyl(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """
    逐点：λr^α ≤ 1/4 时，环 r/2 ≤ |y| ≤ r 中落在 Q_α(0,V,4^{1+α}λ) 之外的点满足 dist(y,V) ≥ λr^{1+α}。
    测度：抛物体外质量 ≤ 各二进尺度柱体外质量之和 + B(x,r_J/2) 的质量。
    """
    per = int(getattr(config, "VERIFY_SAMPLES", 10000)) // 2
    for _ in range(20):
        n, k = _dims(rng)
        lam = float(math.exp(rng.uniform(math.log(0.5), math.log(5.0))))
        alpha = float(rng.uniform(0.1, 1.0))
        lam_q = 4.0 ** (1.0 + alpha) * lam
        r = (4.0 * lam) ** (-1.0 / alpha) * float(rng.uniform(0.1, 1.0))
        V = random_plane(n, k, rng)
        Vc = orthogonal_complement(V)
        wide = _unit_rows(rng, per, n) * r * rng.uniform(0.5, 1.0, size=(per, 1))
        # 贴着 V 的样本，法向分量不超过 2λ′r^{1+α}
        t = _unit_rows(rng, per, k) * r * rng.uniform(0.5, 1.0, size=(per, 1))
        h = _unit_rows(rng, per, n - k) * 2.0 * lam_q * r ** (1.0 + alpha) * rng.uniform(0.0, 1.0, size=(per, 1))
        Y = np.vstack([wide, t @ V.basis.T + h @ Vc.basis.T])
        norm = np.linalg.norm(Y, axis=1)
        Y = Y[(norm >= 0.5 * r) & (norm <= r)]
        outside = ~Paraboloid(np.zeros(n), V, lam_q, alpha).contains_many(Y)
        dist = _origin_plane(V).dist_many(Y[outside])
        tally.add(np.full(dist.shape, lam * r ** (1.0 + alpha)), dist)

    lam, alpha, J = 1.0, 1.0, 6
    r = 0.25
    radii = r * 0.5 ** np.arange(J + 1)
    clouds = 0
    for name in ("circle", "graph", "snowflake", "cantor", "plane", "sphere"):
        cloud = pack.get(name)
        k = cloud.k
        for _ in range(5):
            x = cloud.points[int(rng.integers(len(cloud)))]
            if rng.uniform() < 0.5:
                V = fit_beta2(cloud, x, r).plane.linear
            else:
                V = random_plane(cloud.ambient_dim, k, rng)
            through = AffinePlane.through(x, V)
            _, out_q = cloud.split_mass(x, r, Paraboloid(x, V, 4.0 ** (1.0 + alpha) * lam, alpha))
            out_cyl = sum(cloud.split_mass(x, ri, Cylinder(through, lam * ri ** (1.0 + alpha)))[1] for ri in radii)
            core = cloud.ball_mass(x, 0.5 * radii[-1])
            tally.add(out_q / r ** k, (out_cyl + core) / r ** k, tol=1e-12)
            clouds += 1
    return {"measure_points": clouds, "r": r, "J": J}


def _check_growth(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """β_2(x,tr)² ≤ β_2(x,r)²/t^{k+2}。"""
    floor = float(getattr(config, "GROWTH_ABS_FLOOR", 1e-14))
    draws = int(getattr(config, "VERIFY_CLOUD_DRAWS", 100))
    for _ in range(draws):
        cloud, x = pack.draw(rng)
        r = float(rng.choice([0.4, 0.2, 0.1]))
        t = float(rng.choice([0.5, 1.0 / 3.0]))
        big = fit_beta2(cloud, x, r).value
        small = fit_beta2(cloud, x, t * r).value
        tally.add(small ** 2, big ** 2 / t ** (cloud.k + 2), tol=floor)
    return {"draws": draws}


def _check_fubini(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """ρ·∫β_2² dr/r ≤ 二进平均和 ≤ ∫β_2² dr/r。"""
    tol = float(getattr(config, "VERIFY_FUBINI_TOL", 0.05))
    grid = ScaleGrid(0.25, 0.5, 5)
    points = 0
    for name in ("circle", "graph", "cantor", "snowflake"):
        cloud = pack.get(name)
        for _ in range(3):
            x = cloud.points[int(rng.integers(len(cloud)))]
            chk = jones_integral_check(cloud, x, grid, refine=4, tol=tol)
            tally.add(chk.lower * (1.0 - tol), chk.averaged_sum, tol=1e-15)
            tally.add(chk.averaged_sum, chk.upper * (1.0 + tol), tol=1e-15)
            points += 1
    return {"points": points, "tol": tol}


def _check_betap(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """
    β_2 与 β_p 平面处目标值的比较：p ≤ 2 时 β_2² ≤ D^{2−p}·obj_p^p（D = 该平面处 max d/r，D ≤ 2 时即 2^{2−p} 形式）；
    p > 2 时 β_2 ≤ obj_p·(μ(B)/r^k)^{1/2−1/p}。另查 obj_p 不超过 β_2 平面处的值。
    """
    ps = (1.0, 1.5, 3.0, 4.0, math.inf)
    draws = int(getattr(config, "VERIFY_CLOUD_DRAWS", 100)) // 2
    within_two = 0
    for _ in range(draws):
        cloud, x = pack.draw(rng)
        r = float(rng.choice([0.4, 0.2, 0.1]))
        k = cloud.k
        b2 = fit_beta2(cloud, x, r)
        fit_seed = int(rng.integers(2 ** 31))
        for p in ps:
            res = fit_betap(cloud, x, r, p, seed=fit_seed, quantile=0.0)
            density = res.mass / r ** k
            if p <= 2.0:
                dmax = p_objective_at(cloud, x, r, math.inf, res.plane)
                rhs = math.sqrt(dmax ** (2.0 - p) * res.value ** p)
                within_two += int(dmax <= 2.0)
            elif math.isinf(p):
                rhs = res.value * math.sqrt(density)
            else:
                rhs = res.value * density ** (0.5 - 1.0 / p)
            tally.add(b2.value, rhs, tol=1e-12 * max(1.0, rhs) + 1e-14)
            at_seed = p_objective_at(cloud, x, r, p, b2.plane)
            tally.add(res.value, at_seed, tol=1e-12 * max(1.0, at_seed))
    return {"draws": draws, "p": ["inf" if math.isinf(p) else p for p in ps], "within_two": within_two}


def _check_dist(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """sup_{v∈V,|v|=1}|P_{W^⊥}v| 与谱范数一致；d(V,W) = d(V^⊥,W^⊥)；直线夹角的 sin 闭式。"""
    pairs = int(getattr(config, "VERIFY_PLANE_PAIRS", 50))
    count = int(getattr(config, "VERIFY_DIST_SAMPLES", 100000))
    gap_max = 0.0
    for _ in range(pairs):
        n, k = _dims(rng, max_k=3)
        V, W = random_plane(n, k, rng), random_plane(n, k, rng)
        d = grassmann_distance(V, W)
        v = _unit_rows(rng, count, k) @ V.basis.T
        mc = float(np.max(np.linalg.norm(v - (v @ W.basis) @ W.basis.T, axis=1)))
        tally.add(mc, d, tol=1e-12)
        tally.add(d - mc, 1e-3)
        gap_max = max(gap_max, d - mc)
        dc = grassmann_distance(orthogonal_complement(V), orthogonal_complement(W))
        tally.add(abs(d - dc), 1e-10)
    angles = np.linspace(0.0, math.pi / 2.0, 100)
    e1 = LinearPlane(np.array([[1.0], [0.0]]))
    err = [abs(grassmann_distance(e1, LinearPlane(np.array([[math.cos(a)], [math.sin(a)]]))) - math.sin(a)) for a in angles]
    tally.add(err, 1e-12)
    return {"pairs": pairs, "mc_samples": count, "max_mc_gap": gap_max, "angles": int(angles.size)}


def _check_distequiv(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """W 为 V 上 L 的图时 d(V,W) ≤ ‖L‖ ≤ d/√(1−d²)，且斜映射可从 W 还原。"""
    pairs = int(getattr(config, "VERIFY_PLANE_PAIRS", 50))
    for _ in range(pairs):
        n, k = _dims(rng)
        V = random_plane(n, k, rng)
        L = rng.standard_normal((n - k, k))
        L *= rng.uniform(0.01, 3.0) / max(float(np.linalg.norm(L, 2)), 1e-12)
        slant = SlantMap(V, orthogonal_complement(V), L)
        W = slant.graph_plane()
        d = grassmann_distance(V, W)
        norm = slant.operator_norm
        tally.add(d, norm, tol=1e-12)
        tally.add(norm, d / math.sqrt(max(1e-300, 1.0 - d * d)), tol=1e-8 * max(1.0, norm))
        back = SlantMap.from_plane(W, V).matrix
        tally.add(float(np.linalg.norm(back - L, 2)), 1e-8 * (1.0 + norm * norm))
    return {"pairs": pairs}


def _check_elem(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """a²+b²=w²、a ≥ λb^{1+α}、a ≤ λ^{−1/α} 时 a ≥ (λ/2)w^{1+α}。"""
    m = 10 * int(getattr(config, "VERIFY_SAMPLES", 10000))
    lam = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=m))
    alpha = 1.0 - 0.95 * rng.uniform(0.0, 1.0, size=m)
    a = lam ** (-1.0 / alpha) * (1.0 - rng.uniform(0.0, 1.0, size=m))
    b = (a / lam) ** (1.0 / (1.0 + alpha)) * rng.uniform(0.0, 1.0, size=m)
    w = np.hypot(a, b)
    t = elem_terms(a, b, w, lam, alpha)
    hyp = t["pythagoras"] & t["paraboloid"] & t["small"]
    tally.add((a - t["margin"])[hyp], a[hyp] * (1.0 + 1e-12))
    return {"samples_drawn": m, "hypotheses_failed": int(np.sum(~hyp))}


def _check_key(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """
    |x−y| ≤ r、δ = μ(B(x,r))/r^k、ε = 两点 2r 球中柱体外质量/r^k 的较大者；ε ≤ δ/4 时
    (i) μ(B(x,r) ∩ C(x) ∩ C(y)) ≥ (δ/2)r^k，(ii) d(V_x,V_y) ≤ C(n,δ,M,λ) r^α。
    """
    lam = 4.0
    setups = (("circle", 1.0), ("graph", 0.5), ("snowflake", 0.5), ("sphere", 1.0))
    draws = int(getattr(config, "VERIFY_CLOUD_DRAWS", 100))
    skipped = 0
    for _ in range(draws):
        name, alpha = setups[int(rng.integers(len(setups)))]
        cloud = pack.get(name)
        k = cloud.k
        x = cloud.points[int(rng.integers(len(cloud)))]
        r = float(rng.choice([0.05, 0.1, 0.2]))
        near = cloud.ball_indices(x, r)
        y = cloud.points[int(rng.choice(near))]
        Vx, Vy = fit_beta2(cloud, x, r).plane, fit_beta2(cloud, y, r).plane
        eta = lam * r ** (1.0 + alpha)
        Cx, Cy = Cylinder(Vx, eta), Cylinder(Vy, eta)
        delta = cloud.ball_mass(x, r) / r ** k
        eps = max(cloud.split_mass(x, 2.0 * r, Cx)[1], cloud.split_mass(y, 2.0 * r, Cy)[1]) / r ** k
        if eps > delta / 4.0:
            skipped += 1
            continue
        P = cloud.points[near]
        both = Cx.contains_many(P) & Cy.contains_many(P)
        common = float(np.sum(cloud.weights[near][both]))
        tally.add(0.5 * delta * r ** k, common, tol=1e-12)
        M = max(cloud.ball_mass(z, s) / s ** k for z in (x, y) for s in (r / 4.0, r / 2.0, r, 2.0 * r, 4.0 * r))
        consts = rectifiability_constants(k, cloud.ambient_dim, alpha, lam, delta, M, 0.5)
        tally.add(grassmann_distance(Vx, Vy), consts.C_key * r ** alpha)
    return {"draws": draws, "skipped": skipped}


def _check_geometric(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """半径 R 的短圆弧配切线：λ = C = 1/R 时假设成立，jet 满足 M_taylor ≤ 6·4^α λ。"""
    arcs = 10
    m = 40
    half = 0.1
    for _ in range(arcs):
        n = int(rng.integers(2, 4))
        R = float(rng.uniform(0.5, 2.0))
        th = float(rng.uniform(0.0, 2.0 * math.pi)) + np.linspace(-half, half, m)
        Q = random_plane(n, n, rng).basis
        pts = np.zeros((m, n))
        tan = np.zeros((m, n))
        pts[:, :2] = R * np.column_stack([np.cos(th), np.sin(th)])
        tan[:, :2] = np.column_stack([-np.sin(th), np.cos(th)])
        cloud = WeightedCloud(pts @ Q.T, np.full(m, 2.0 * half * R / m), 1)
        planes = [LinearPlane(v.reshape(-1, 1)) for v in tan @ Q.T]
        lam = 1.0 / R
        res = geometric_lemma_check(cloud, planes, lam, lam, 1.0)
        tally.add(res.paraboloid_violations + res.holder_violations + res.slant_violations, 0.0)
        tally.add(res.diameter, res.diameter_bound)
        if res.constants is None:
            tally.add(1.0, 0.0)
        else:
            tally.add(res.constants.M_taylor, 6.0 * 4.0 * lam, tol=1e-9)
    return {"arcs": arcs, "points_per_arc": m}


def _rotation(a: np.ndarray, b: np.ndarray, psi: float) -> np.ndarray:
    """在 span{a,b} 内把 a 转向 b 角度 psi（a ⊥ b 为单位向量）。"""
    n = a.size
    return (
        np.eye(n)
        + math.sin(psi) * (np.outer(b, a) - np.outer(a, b))
        + (math.cos(psi) - 1.0) * (np.outer(a, a) + np.outer(b, b))
    )


def _check_rot(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """
    合成平面序列：V_j 由 V_0 转 C r_j^α 得到，过 x + o_j，|o_j| ≤ λr_j^{1+α}/2。
    检查 stabilize_planes 给出证书，采样点落在 B(x+V_∞, λ″r_j^{1+α}) 内，|x_j| 满足几何级数界。
    """
    count = int(getattr(config, "VERIFY_SAMPLES", 10000))
    trials = 6
    certified = 0
    for _ in range(trials):
        n, k = _dims(rng, max_k=2)
        n = min(n, 3)
        k = min(k, n - 1)
        lam = float(rng.uniform(0.5, 4.0))
        C = float(rng.uniform(0.5, 2.0))
        alpha = float(rng.uniform(0.2, 1.0))
        grid = ScaleGrid(float(rng.uniform(0.05, 0.5)), 0.5, 6)
        radii = grid.radii
        V0 = random_plane(n, k, rng)
        a = V0.basis @ _unit_rows(rng, 1, k)[0]
        b = orthogonal_complement(V0).basis @ _unit_rows(rng, 1, n - k)[0]
        x = rng.standard_normal(n)
        planes: List[Optional[AffinePlane]] = []
        for r in radii:
            W = LinearPlane(_rotation(a, b, C * r ** alpha) @ V0.basis)
            o = orthogonal_complement(W).basis @ _unit_rows(rng, 1, n - k)[0]
            o *= 0.5 * lam * r ** (1.0 + alpha) * rng.uniform(0.0, 1.0)
            planes.append(AffinePlane.through(x + o, W))
        profile = PointProfile.from_planes(x, grid, planes)
        res = stabilize_planes(profile, grid, lam, alpha, C, samples=count // 10, seed=int(rng.integers(2 ** 31)))
        certified += int(res.certified)
        tally.add(0.0 if res.certified else 1.0, 0.0)
        geo = 1.0 - grid.rho ** (1.0 + alpha)
        lam_pp = lam + C + (2.0 * lam + C) / geo
        inf_plane = AffinePlane.through(x, planes[-1].linear)
        for j, r in enumerate(radii):
            Y = sample_slab(x, planes[j], lam * r ** (1.0 + alpha), r, count, rng)
            tally.add(inf_plane.dist_many(Y), lam_pp * r ** (1.0 + alpha))
            xj = float(np.linalg.norm(planes[j].nearest_point(x) - x))
            tally.add(xj, (2.0 * lam + C) * r ** (1.0 + alpha) / geo)
        tally.add(profile.thetas, C * radii[:-1] ** alpha, tol=1e-12)
    return {"trials": trials, "certified": certified}


def _check_whitney(rng: np.random.Generator, tally: _Tally, pack: _CloudPack) -> Dict[str, Any]:
    """x² 的 jet 给出 M_taylor = 1、M_holder = 2；仿射 jet 常数为 0；加仿射项不改变常数。"""
    X = np.linspace(0.0, 1.0, 5)
    wc = whitney_constants(JetData(X, X ** 2, (2.0 * X).reshape(-1, 1, 1), 1.0))
    tally.add([abs(wc.M_taylor - 1.0), abs(wc.M_holder - 2.0)], 1e-12)

    g = np.linspace(-1.0, 1.0, 6)
    base2 = np.array(np.meshgrid(g, g[:5], indexing="ij")).reshape(2, -1).T
    for _ in range(5):
        A = rng.standard_normal((2, 2))
        c = rng.standard_normal(2)
        N = base2.shape[0]
        jet = JetData(base2, base2 @ A.T + c, np.broadcast_to(A, (N, 2, 2)), float(rng.uniform(0.2, 1.0)))
        wc = whitney_constants(jet)
        tally.add([wc.M_taylor, wc.M_holder], 0.0, tol=1e-9)

    X = np.linspace(-1.0, 1.0, 41)
    for _ in range(5):
        alpha = float(rng.uniform(0.2, 1.0))
        F = np.abs(X) ** (1.0 + alpha)
        L = (1.0 + alpha) * np.sign(X) * np.abs(X) ** alpha
        ref = whitney_constants(JetData(X, F, L.reshape(-1, 1, 1), alpha))
        a, c = float(rng.standard_normal()), float(rng.standard_normal())
        moved = whitney_constants(JetData(X, F + a * X + c, (L + a).reshape(-1, 1, 1), alpha))
        tally.add(abs(moved.M_taylor - ref.M_taylor), 1e-9 * max(1.0, ref.M_taylor))
        tally.add(abs(moved.M_holder - ref.M_holder), 1e-9 * max(1.0, ref.M_holder))
    return {}


_CHECKS: Tuple[Tuple[str, Callable[[np.random.Generator, _Tally, _CloudPack], Dict[str, Any]]], ...] = (
    ("tube", _check_tube),
    ("parabequiv", _check_parabequiv),
    ("parabcyl", _check_parabcyl),
    ("growth", _check_growth),
    ("fubini", _check_fubini),
    ("betap", _check_betap),
    ("dist", _check_dist),
    ("distequiv", _check_distequiv),
    ("elem", _check_elem),
    ("key", _check_key),
    ("geometric", _check_geometric),
    ("rot", _check_rot),
    ("whitney", _check_whitney),
)

CHECK_NAMES: Tuple[str, ...] = tuple(name for name, _ in _CHECKS)


@dataclass
class VerifyReport:
    seed: int
    sabotage: Optional[str]
    checks: List[LemmaCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def first_failure(self) -> Optional[str]:
        for c in self.checks:
            if not c.passed:
                return c.name
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "sabotage": self.sabotage,
            "passed": self.passed,
            "first_failure": self.first_failure,
            "lemmas": [c.to_dict() for c in self.checks],
        }


def run_verify(seed: Optional[int] = None, sabotage: Optional[str] = None, only: Optional[Sequence[str]] = None) -> VerifyReport:
    """按固定顺序跑全部检查（only 给定时只跑其中几项）；每项的随机流由 (seed, 序号) 派生。"""
    seed = int(getattr(config, "GLOBAL_SEED", 0) if seed is None else seed)
    if seed < 0:
        raise InputError("seed 必须非负")
    if sabotage is not None and sabotage not in CHECK_NAMES:
        raise InputError(f"未知的检查名 {sabotage!r}，可选: {', '.join(CHECK_NAMES)}")
    if only is not None:
        unknown = [name for name in only if name not in CHECK_NAMES]
        if unknown:
            raise InputError(f"未知的检查名: {', '.join(unknown)}")
    pack = _CloudPack(seed)
    checks: List[LemmaCheck] = []
    for i, (name, fn) in enumerate(_CHECKS):
        if only is not None and name not in only:
            continue
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        tally = _Tally(name, sabotage == name)
        check = tally.result(fn(rng, tally, pack))
        log_lemma(check.name, check.samples, check.violations, check.worst_margin, check.passed)
        checks.append(check)
    report = VerifyReport(seed, sabotage, checks)
    if not report.passed:
        log(f"验证失败，首个失败的检查: {report.first_failure}", level="ERROR")
    return report
