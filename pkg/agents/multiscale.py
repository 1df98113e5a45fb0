# -*- coding: utf-8 -*-
"""
多尺度扫描：二进尺度网格、模数序列、单点剖面（平面、β、柱/抛物体超额、转角、密度）、
平面稳定化与转角的 Hölder 指数拟合。
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

import config
from agents.fit_cache import FitCache
from agents.plane_fit import fit_betap
from tools.cloud import WeightedCloud
from tools.errors import InputError, NonSummableError
from tools.geometry import AffinePlane, Cylinder, LinearPlane, Paraboloid, grassmann_distance, orthogonal_complement
from tools.logger_util import log


@dataclass(frozen=True)
class ScaleGrid:
    """r_j = r0·ρ^j，j = 0..J。"""
    r0: float
    rho: float
    J: int

    def __post_init__(self) -> None:
        if not (self.r0 > 0):
            raise InputError("r0 必须为正")
        if not (0 < self.rho < 1):
            raise InputError("ρ 必须在 (0,1) 内")
        if int(self.J) < 1:
            raise InputError("J 至少为 1")

    @property
    def radii(self) -> np.ndarray:
        return self.r0 * self.rho ** np.arange(int(self.J) + 1)

    def resolution_floor(self, cloud: WeightedCloud) -> float:
        return float(getattr(config, "RESOLUTION_FLOOR_FACTOR", 4.0)) * cloud.min_spacing()

    def check_resolution(self, cloud: WeightedCloud) -> np.ndarray:
        """各尺度是否高于分辨率下限；低于时记一条警告。"""
        ok = self.radii >= self.resolution_floor(cloud)
        if not np.all(ok):
            log(
                f"尺度 r_J={self.radii[-1]:.3g} 低于分辨率下限 {self.resolution_floor(cloud):.3g}，"
                f"{int(np.sum(~ok))} 个尺度将标记为无效",
                level="WARNING",
            )
        return ok

    def to_dict(self) -> Dict[str, Any]:
        return {"r0": self.r0, "rho": self.rho, "J": int(self.J), "radii": self.radii.tolist()}


@dataclass(frozen=True)
class ModulusSequence:
    """λ_j 与尾和 ω_m = Σ_{j≥m} λ_j（在 J 处截断）。"""
    lambdas: Tuple[float, ...]

    def __post_init__(self) -> None:
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.size == 0 or not np.all(np.isfinite(lam)) or np.any(lam < 0):
            raise InputError("λ_j 必须是非负有限数")
        object.__setattr__(self, "lambdas", tuple(float(v) for v in lam))
        _check_summable(lam)

    @classmethod
    def power_of_radii(cls, grid: ScaleGrid, alpha: float, lam: float = 1.0) -> "ModulusSequence":
        """λ_j = λ·r_j^α，对应 Hölder 情形。"""
        return cls(tuple(lam * grid.radii ** alpha))

    @classmethod
    def inverse_power(cls, count: int, s: float) -> "ModulusSequence":
        """λ_j = 1/(j+1)^s，j = 0..count−1。"""
        return cls(tuple(1.0 / np.arange(1, count + 1) ** s))

    @property
    def omegas(self) -> np.ndarray:
        lam = np.asarray(self.lambdas)
        return np.cumsum(lam[::-1])[::-1]


def _check_summable(lam: np.ndarray) -> None:
    """尾部几何衰减（比值 ≤ 0.99）或幂衰减指数 > 1 才认为可和。"""
    pos = np.flatnonzero(lam > 0)
    if pos.size < 3:
        return
    tail = lam[pos[pos.size // 2:]]
    j = pos[pos.size // 2:]
    if tail.size >= 2:
        ratios = tail[1:] / tail[:-1]
        if np.all(ratios <= 0.99) and np.all(np.diff(j) == 1):
            return
    if tail.size >= 2:
        fit = linregress(np.log(j + 1.0), np.log(tail))
        if -fit.slope > 1.0 + 1e-6:
            return
    raise NonSummableError("λ_j 的尾部衰减不足以保证 Σλ_j < ∞")


@dataclass
class PointProfile:
    """单点在各尺度上的量；无效尺度处数组为 nan、平面为 None。"""
    x: np.ndarray
    radii: np.ndarray
    valid: np.ndarray
    planes: List[Optional[AffinePlane]]
    betas: Dict[float, np.ndarray]
    cyl_excess: np.ndarray
    parab_excess: np.ndarray
    thetas: np.ndarray
    densities: np.ndarray
    masses: np.ndarray
    index: Optional[int] = None
    reference: Optional[LinearPlane] = None
    beta_planes: Dict[float, List[Optional[AffinePlane]]] = field(default_factory=dict)

    @classmethod
    def from_planes(cls, x: Any, grid: ScaleGrid, planes: Sequence[Optional[AffinePlane]]) -> "PointProfile":
        """只有平面序列的剖面（合成平面序列与稳定化检查用）。"""
        radii = grid.radii
        if len(planes) != radii.size:
            raise InputError("平面个数与尺度个数不符")
        valid = np.array([p is not None for p in planes])
        nan = np.full(radii.size, np.nan)
        return cls(
            x=np.asarray(x, dtype=float), radii=radii, valid=valid, planes=list(planes), betas={},
            cyl_excess=nan.copy(), parab_excess=nan.copy(), thetas=_thetas(planes),
            densities=nan.copy(), masses=nan.copy(),
        )

    def tail_indices(self, m_tail: int) -> np.ndarray:
        """最细的 m_tail 个有效尺度的下标（升序）。"""
        idx = np.flatnonzero(self.valid)
        return idx[-int(m_tail):] if idx.size else idx

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "x": self.x.tolist(),
            "radii": self.radii.tolist(),
            "valid": self.valid.tolist(),
            "betas": {("inf" if math.isinf(p) else repr(p)): v.tolist() for p, v in self.betas.items()},
            "cyl_excess": self.cyl_excess.tolist(),
            "parab_excess": self.parab_excess.tolist(),
            "thetas": self.thetas.tolist(),
            "densities": self.densities.tolist(),
            "planes": [None if p is None else p.to_dict() for p in self.planes],
        }


def _thetas(planes: Sequence[Optional[AffinePlane]]) -> np.ndarray:
    out = np.full(max(0, len(planes) - 1), np.nan)
    for j in range(len(planes) - 1):
        a, b = planes[j], planes[j + 1]
        if a is not None and b is not None:
            out[j] = grassmann_distance(a, b)
    return out


def point_domain_ok(cloud: WeightedCloud, x: Any, r: float, index: Optional[int] = None) -> bool:
    """x 的 r 邻域是否完全被采样；x 不是云点时借用最近点的边界距离。"""
    bd = cloud.boundary_distance
    if bd is None:
        return True
    if index is not None:
        return bool(bd[index] >= r)
    d, nn = cloud.tree.query(np.asarray(x, dtype=float))
    return bool(bd[int(nn)] - d >= r)


def point_profile(
    cloud: WeightedCloud,
    x: Any,
    grid: ScaleGrid,
    alpha: float,
    lam: float,
    p_list: Sequence[float] = (2.0,),
    reference: Optional[LinearPlane] = None,
    index: Optional[int] = None,
    seed: Optional[int] = None,
    quantile: Optional[float] = None,
    cache: Optional[FitCache] = None,
    resolution_ok: Optional[np.ndarray] = None,
) -> PointProfile:
    """
    每个尺度：V_j 取 β_2 平面；柱体超额宽度 λ r_j^{1+α}；抛物体超额对参考平面
    （缺省为最细有效尺度平面的线性部分）。空球或边界截断的尺度标为无效。
    """
    x = np.asarray(x, dtype=float)
    radii = grid.radii
    if resolution_ok is None:
        resolution_ok = radii >= grid.resolution_floor(cloud)
    size = radii.size
    planes: List[Optional[AffinePlane]] = [None] * size
    p_keys = sorted({float(p) for p in p_list} | {2.0})
    betas = {p: np.full(size, np.nan) for p in p_keys}
    beta_planes: Dict[float, List[Optional[AffinePlane]]] = {p: [None] * size for p in p_keys}
    cyl = np.full(size, np.nan)
    dens = np.full(size, np.nan)
    masses = np.full(size, np.nan)
    valid = np.zeros(size, dtype=bool)
    k = cloud.k
    for j, r in enumerate(radii):
        if not resolution_ok[j] or not point_domain_ok(cloud, x, r, index):
            continue
        mass = cloud.ball_mass(x, r)
        if mass <= 0:
            continue
        valid[j] = True
        masses[j] = mass
        dens[j] = mass / (2.0 * r) ** k
        for p in p_keys:
            res = fit_betap(cloud, x, r, p, seed=seed, quantile=quantile, cache=cache)
            betas[p][j] = res.value
            beta_planes[p][j] = res.plane
        planes[j] = beta_planes[2.0][j]
        cyl[j] = cloud.excess_ratio(x, r, Cylinder(planes[j], lam * r ** (1.0 + alpha)))
    prof = PointProfile(
        x=x, radii=radii, valid=valid, planes=planes, betas=betas,
        cyl_excess=cyl, parab_excess=np.full(size, np.nan), thetas=_thetas(planes),
        densities=dens, masses=masses, index=index, beta_planes=beta_planes,
    )
    ref = reference
    if ref is None and np.any(valid):
        ref = planes[int(np.flatnonzero(valid)[-1])].linear
    if ref is not None:
        set_reference(prof, cloud, ref, lam, alpha)
    return prof


def set_reference(profile: PointProfile, cloud: WeightedCloud, reference: LinearPlane, lam: float, alpha: float) -> None:
    """按参考平面重算各有效尺度的抛物体超额。"""
    region = Paraboloid(profile.x, reference, lam, alpha)
    out = np.full(profile.radii.size, np.nan)
    for j in np.flatnonzero(profile.valid):
        out[j] = cloud.excess_ratio(profile.x, profile.radii[j], region)
    profile.parab_excess = out
    profile.reference = reference


@dataclass
class StabilizationResult:
    v_inf: Optional[LinearPlane]
    nearest_points: List[Optional[np.ndarray]]
    xj_bounds: np.ndarray
    certified: bool
    first_violation: Optional[int] = None
    reason: str = ""
    checked_points: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v_inf": None if self.v_inf is None else self.v_inf.to_dict(),
            "nearest_points": [None if p is None else p.tolist() for p in self.nearest_points],
            "xj_bounds": self.xj_bounds.tolist(),
            "certified": self.certified,
            "first_violation": self.first_violation,
            "reason": self.reason,
            "checked_points": self.checked_points,
        }


def _intersection_witness(
    x: np.ndarray, A: AffinePlane, B: AffinePlane, eta: float, r: float, cloud: Optional[WeightedCloud]
) -> Optional[np.ndarray]:
    """B(A,η) ∩ B(B,η) ∩ B(x,r) 中的一个点：优先用云点，否则用交替投影的中点。"""
    slack = float(getattr(config, "MEMBERSHIP_SLACK", 1e-12))
    if cloud is not None:
        idx = cloud.ball_indices(x, r)
        if idx.size:
            P = cloud.points[idx]
            ok = (A.dist_many(P) < eta + slack) & (B.dist_many(P) < eta + slack)
            if np.any(ok):
                return P[int(np.flatnonzero(ok)[0])]
    a = A.nearest_point(x)
    candidates = [a, B.nearest_point(x)]
    b = a
    for _ in range(200):
        b = B.nearest_point(a)
        a_next = A.nearest_point(b)
        if np.linalg.norm(a_next - a) < 1e-15:
            a = a_next
            break
        a = a_next
    candidates.append(0.5 * (a + b))
    for c in candidates:
        if A.dist(c) < eta + slack and B.dist(c) < eta + slack and np.linalg.norm(c - x) <= r + slack:
            return c
    return None


def sample_slab(
    x: np.ndarray, V: AffinePlane, eta: float, r: float, count: int, rng: np.random.Generator
) -> np.ndarray:
    """B(V,η) ∩ B(x,r) 中的均匀拒绝采样。"""
    n, k = V.linear.basis.shape
    C = orthogonal_complement(V.linear).basis
    base = V.nearest_point(x)
    out: List[np.ndarray] = []
    got = 0
    for _ in range(50):
        t = rng.uniform(-r, r, size=(count, k))
        g = rng.standard_normal((count, n - k))
        g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        rad = eta * rng.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / max(1, n - k))
        Y = base + t @ V.linear.basis.T + (g * rad * (1.0 - 1e-12)) @ C.T
        Y = Y[np.linalg.norm(Y - x, axis=1) <= r]
        out.append(Y)
        got += Y.shape[0]
        if got >= count:
            break
    Y = np.vstack(out) if out else np.zeros((0, n))
    return Y[:count]


def stabilize_planes(
    profile: PointProfile,
    grid: ScaleGrid,
    lam: float,
    alpha: float,
    C: float,
    cloud: Optional[WeightedCloud] = None,
    samples: int = 0,
    seed: Optional[int] = None,
) -> StabilizationResult:
    """
    检查相邻平面的相交条件与 θ_j ≤ C r_j^α，取 V_∞ 为最细有效尺度平面的线性部分，
    并验证 B(V_j, λr_j^{1+α}) ∩ B(x,r_j) ⊂ x + B(V_∞, λ″r_j^{1+α}) 以及最近点 |x_j − x| 的界。
    包含关系用云点检查；samples > 0 时另在每个尺度上采样 samples 个点。
    """
    x = profile.x
    radii = grid.radii
    valid = np.flatnonzero(profile.valid)
    nearest: List[Optional[np.ndarray]] = [None] * radii.size
    rho = grid.rho
    geo = 1.0 - rho ** (1.0 + alpha)
    bounds = (2.0 * lam + C) * radii ** (1.0 + alpha) / geo
    lam_pp = lam + C + (2.0 * lam + C) / geo
    if valid.size < 2 or not np.any(profile.valid[valid[:-1] + 1]):
        return StabilizationResult(None, nearest, bounds, False, None, "有效相邻尺度不足 2 个")
    v_inf = profile.planes[int(valid[-1])].linear
    inf_plane = AffinePlane.through(x, v_inf)
    slack = float(getattr(config, "MEMBERSHIP_SLACK", 1e-12))
    rng = np.random.default_rng(int(getattr(config, "GLOBAL_SEED", 0) if seed is None else seed))
    checked = 0
    first: Optional[int] = None
    reason = ""

    def fail(j: int, why: str) -> None:
        nonlocal first, reason
        if first is None:
            first, reason = j, why

    for j in valid:
        Vj = profile.planes[int(j)]
        r = radii[j]
        eta = lam * r ** (1.0 + alpha)
        xj = Vj.nearest_point(x) - x
        nearest[j] = xj
        if np.linalg.norm(xj) > bounds[j] + slack:
            fail(int(j), f"|x_j|={np.linalg.norm(xj):.3g} 超过界 {bounds[j]:.3g}")
        if j + 1 < radii.size and profile.valid[j + 1]:
            Vn = profile.planes[int(j) + 1]
            theta = grassmann_distance(Vj, Vn)
            if theta > C * r ** alpha + slack:
                fail(int(j), f"θ_j={theta:.3g} > C r_j^α={C * r ** alpha:.3g}")
            if _intersection_witness(x, Vj, Vn, eta, r, cloud) is None:
                fail(int(j), "相邻平面的柱体之交在球内为空")
        width = lam_pp * r ** (1.0 + alpha)
        pts = []
        if cloud is not None:
            idx = cloud.ball_indices(x, r)
            if idx.size:
                P = cloud.points[idx]
                pts.append(P[Vj.dist_many(P) < eta + slack])
        if samples > 0:
            pts.append(sample_slab(x, Vj, eta, r, samples, rng))
        if pts:
            Y = np.vstack(pts)
            checked += Y.shape[0]
            if Y.shape[0] and np.any(inf_plane.dist_many(Y) >= width + slack):
                fail(int(j), f"有点落在 B(V_∞, λ″r_j^(1+α)) 之外 (λ″={lam_pp:.3g})")
    return StabilizationResult(v_inf, nearest, bounds, first is None, first, reason, checked)


@dataclass(frozen=True)
class HolderFit:
    C_est: float
    alpha_est: float
    residual: float
    used: int
    excluded: int


def holder_fit(theta_seq: Any, radii: Any) -> HolderFit:
    """最小二乘拟合 log θ_j = log C + α log r_j；全部低于下限时 α = +inf（平面已稳定）。"""
    th = np.asarray(theta_seq, dtype=float)
    rr = np.asarray(radii, dtype=float)[: th.size]
    floor = float(getattr(config, "THETA_FLOOR", 1e-12))
    finite = np.isfinite(th)
    pos = finite & (th > floor)
    excluded = int(np.sum(finite & ~pos))
    if not np.any(pos):
        return HolderFit(0.0, math.inf, 0.0, 0, excluded)
    if int(np.sum(pos)) < 3:
        raise InputError("Hölder 拟合至少需要 3 个正的转角")
    lx, ly = np.log(rr[pos]), np.log(th[pos])
    fit = linregress(lx, ly)
    resid = ly - (fit.intercept + fit.slope * lx)
    return HolderFit(float(math.exp(fit.intercept)), float(fit.slope), float(np.sqrt(np.mean(resid ** 2))), int(np.sum(pos)), excluded)
