# -*- coding: utf-8 -*-
"""
判据评估：固定平面抛物体、旋转平面柱体、近似切锥、一般模数、β 诊断（上界、Jones、Ghinassi），
以及对整片点云的分类报告（均匀子集、相对密度子集、单图区间标志）。
limsup 一律用最细 m_tail 个有效尺度上的最大值代替。
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist
from scipy.stats import linregress

import config
from agents.fit_cache import FitCache
from agents.multiscale import (
    HolderFit,
    ModulusSequence,
    PointProfile,
    ScaleGrid,
    holder_fit,
    point_domain_ok,
    point_profile,
    set_reference,
    stabilize_planes,
)
from agents.plane_fit import fit_beta2
from tools.cloud import WeightedCloud
from tools.constants import ConstantSet, cone_threshold, eps0, rectifiability_constants
from tools.errors import InputError
from tools.geometry import Cone, Cylinder, LinearPlane, Paraboloid
from tools.logger_util import log, log_verdict


@dataclass
class Verdict:
    """passed=None 表示没有有效尺度（不确定）。"""
    name: str
    passed: Optional[bool]
    statistic: Optional[float] = None
    threshold: Optional[float] = None
    scales: List[int] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "scales": [int(j) for j in self.scales],
            "details": self.details,
        }


def _p_label(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:g}"


def _valid_scales(cloud: WeightedCloud, x: np.ndarray, grid: ScaleGrid, index: Optional[int]) -> np.ndarray:
    radii = grid.radii
    floor = grid.resolution_floor(cloud)
    ok = np.zeros(radii.size, dtype=bool)
    for j, r in enumerate(radii):
        ok[j] = r >= floor and point_domain_ok(cloud, x, r, index) and cloud.ball_mass(x, r) > 0
    return ok


def _tail(valid: np.ndarray, m_tail: int) -> np.ndarray:
    idx = np.flatnonzero(valid)
    return idx[-int(m_tail):] if idx.size else idx


def criterion_fixed_plane(
    cloud: WeightedCloud,
    x: Any,
    V: LinearPlane,
    grid: ScaleGrid,
    lam: float,
    alpha: float,
    m_tail: int,
    profile: Optional[PointProfile] = None,
    index: Optional[int] = None,
) -> Verdict:
    """尾部尺度上 r^{−k}·μ(B(x,r) \\ Q_α(x,V,λ)) 的最大值 < ε₀(k) 则通过。"""
    x = np.asarray(x, dtype=float)
    valid = profile.valid if profile is not None else _valid_scales(cloud, x, grid, index)
    tail = _tail(valid, m_tail)
    threshold = eps0(cloud.k)
    if tail.size == 0:
        return Verdict("fixed_paraboloid", None, None, threshold)
    region = Paraboloid(x, V, lam, alpha)
    stat = max(cloud.excess_ratio(x, grid.radii[j], region) for j in tail)
    return Verdict("fixed_paraboloid", bool(stat < threshold), float(stat), threshold, tail.tolist())


def _lower_density(profile: PointProfile, tail: np.ndarray) -> float:
    return float(np.min(profile.densities[tail])) if tail.size else 0.0


def criterion_rotating(
    cloud: WeightedCloud,
    x: Any,
    grid: ScaleGrid,
    lam: float,
    alpha: float,
    m_tail: int,
    profile: Optional[PointProfile] = None,
    index: Optional[int] = None,
    seed: Optional[int] = None,
    cache: Optional[FitCache] = None,
) -> Verdict:
    """Θ_* 估计 > 下限，且尾部柱体超额 < (1−2^{−k})ε₀(k)Θ_*。"""
    if profile is None:
        profile = point_profile(cloud, x, grid, alpha, lam, index=index, seed=seed, cache=cache)
    tail = profile.tail_indices(m_tail)
    k = cloud.k
    if tail.size == 0:
        return Verdict("rotating_cylinder", None)
    theta_lower = _lower_density(profile, tail)
    threshold = (1.0 - 2.0 ** (-k)) * eps0(k) * theta_lower
    stat = float(np.max(profile.cyl_excess[tail]))
    floor = float(getattr(config, "DENSITY_FLOOR", 1e-9))
    passed = theta_lower > floor and stat < threshold
    return Verdict("rotating_cylinder", bool(passed), stat, threshold, tail.tolist(), {"theta_lower": theta_lower})


def criterion_cone(
    cloud: WeightedCloud,
    x: Any,
    V: LinearPlane,
    grid: ScaleGrid,
    s: float,
    m_tail: int,
    profile: Optional[PointProfile] = None,
    index: Optional[int] = None,
) -> Verdict:
    """近似切锥：尾部 (2r)^{−k}·μ(B(x,r) \\ X(x,V,s)) < 240^{−(k+1)}(1+s²)^{−k/2}。"""
    x = np.asarray(x, dtype=float)
    valid = profile.valid if profile is not None else _valid_scales(cloud, x, grid, index)
    tail = _tail(valid, m_tail)
    k = cloud.k
    threshold = cone_threshold(k, s)
    if tail.size == 0:
        return Verdict("approximate_cone", None, None, threshold)
    region = Cone(x, V, s)
    stat = 0.0
    for j in tail:
        r = grid.radii[j]
        _, outside = cloud.split_mass(x, r, region)
        stat = max(stat, outside / (2.0 * r) ** k)
    return Verdict("approximate_cone", bool(stat < threshold), float(stat), threshold, tail.tolist(), {"aperture": s})


def modulus_criterion(
    cloud: WeightedCloud,
    x: Any,
    grid: ScaleGrid,
    mod: ModulusSequence,
    m_tail: int,
    profile: Optional[PointProfile] = None,
    index: Optional[int] = None,
    seed: Optional[int] = None,
    cache: Optional[FitCache] = None,
) -> Verdict:
    """柱体宽度换成 λ_j·r_j，阈值同旋转平面判据；报告附带尾和 ω_m。"""
    radii = grid.radii
    lambdas = np.asarray(mod.lambdas)
    if lambdas.size < radii.size:
        raise InputError(f"模数序列长度 {lambdas.size} 少于尺度个数 {radii.size}")
    if profile is None:
        profile = point_profile(cloud, x, grid, 1.0, 1.0, index=index, seed=seed, cache=cache)
    tail = profile.tail_indices(m_tail)
    k = cloud.k
    omegas = mod.omegas[: radii.size].tolist()
    if tail.size == 0:
        return Verdict("modulus", None, details={"omegas": omegas})
    stat = 0.0
    for j in tail:
        width = lambdas[j] * radii[j]
        if width <= 0:
            # 宽度为 0 的柱体不含任何点
            stat = max(stat, profile.masses[j] / radii[j] ** k)
            continue
        stat = max(stat, cloud.excess_ratio(profile.x, radii[j], Cylinder(profile.planes[j], width)))
    theta_lower = _lower_density(profile, tail)
    threshold = (1.0 - 2.0 ** (-k)) * eps0(k) * theta_lower
    floor = float(getattr(config, "DENSITY_FLOOR", 1e-9))
    passed = theta_lower > floor and stat < threshold
    return Verdict("modulus", bool(passed), float(stat), threshold, tail.tolist(), {"omegas": omegas, "theta_lower": theta_lower})


def loglog_slope(values: np.ndarray, radii: np.ndarray) -> Optional[float]:
    """
    log β 对 log r 的最小二乘斜率（scipy linregress），只用有限且高于 BETA_FLOOR 的值，
    其余当作空缺；剩下不足 2 个时返回 None。
    """
    floor = float(getattr(config, "BETA_FLOOR", 1e-12))
    m = np.isfinite(values) & (values > floor)
    if int(np.sum(m)) < 2:
        return None
    return float(linregress(np.log(radii[m]), np.log(values[m])).slope)


def chebyshev_lambda(sup_stat: float, p: float, k: int, theta_lower: float) -> float:
    """
    使柱体超额 ≤ (sup_stat/λ)^p 低于 (1−2^{−k})ε₀(k)Θ_* 的 λ；p=∞ 时 λ = sup_stat 即可使超额为 0。
    Θ_* 不为正时返回 inf。
    """
    if math.isinf(p):
        return float(sup_stat)
    target = (1.0 - 2.0 ** (-k)) * eps0(k) * theta_lower
    if target <= 0:
        return math.inf
    return float(sup_stat * target ** (-1.0 / p))


@dataclass
class BetaDiagnostics:
    p: float
    sup_stat: float
    jones_sum: float
    ghinassi_sum: float
    slope_p: Optional[float]
    slope_2: Optional[float]
    slope_inf: Optional[float]
    beta_bound: Verdict
    jones_finite: Verdict
    ghinassi_finite: Verdict
    chebyshev_lambda: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": _p_label(self.p),
            "sup_stat": self.sup_stat,
            "jones_sum": self.jones_sum,
            "ghinassi_sum": self.ghinassi_sum,
            "slope_p": self.slope_p,
            "slope_2": self.slope_2,
            "slope_inf": self.slope_inf,
            "chebyshev_lambda": self.chebyshev_lambda,
            "verdicts": [v.to_dict() for v in (self.beta_bound, self.jones_finite, self.ghinassi_finite)],
        }


def _decay_verdict(name: str, values: np.ndarray, radii: np.ndarray, tail: np.ndarray, slope_min: float) -> Verdict:
    """
    和式有限性的斜率替代（jones_finite、ghinassi_finite 用）：尾部全在 BETA_FLOOR 以下直接通过；
    否则对所有正的有效值做 log values ~ log r 线性回归，斜率 ≥ slope_min 通过。
    这只是有限网格上的经验判定，不是和式本身的界。正值少于 2 个时不确定。
    """
    floor = float(getattr(config, "BETA_FLOOR", 1e-12))
    if tail.size and np.all(values[tail] <= floor):
        return Verdict(name, True, 0.0, slope_min, tail.tolist(), {"at_floor": True})
    slope = loglog_slope(values, radii)
    if slope is None:
        return Verdict(name, None, None, slope_min)
    return Verdict(name, bool(slope >= slope_min), slope, slope_min, np.flatnonzero(np.isfinite(values)).tolist())


def bound_verdict(name: str, betas: np.ndarray, radii: np.ndarray, alpha: float) -> Verdict:
    """
    limsup r^{−α}β_p < ∞ 的有限网格替代。q_j = r_j^{−α}β_p(x,r_j)，只看有效尺度（非 nan）：
    fine 为半径 < BETA_BOUND_SHRINK·r_min 的尺度上 q 的最大值，coarse 为其余尺度上的最大值；
    fine < BETA_BOUND_GROWTH·coarse 则通过。统计量为 fine/coarse。
    q 全在下限以下时通过；没有更粗的尺度时不确定。
    """
    shrink = float(getattr(config, "BETA_BOUND_SHRINK", 4.0))
    growth = float(getattr(config, "BETA_BOUND_GROWTH", 2.0))
    floor = float(getattr(config, "BETA_FLOOR", 1e-12))
    ok = np.isfinite(betas)
    if not np.any(ok):
        return Verdict(name, None, None, growth)
    q = np.where(ok, betas / radii ** alpha, np.nan)
    r_min = float(np.min(radii[ok]))
    fine = ok & (radii < shrink * r_min)
    coarse = ok & ~fine
    details: Dict[str, Any] = {"shrink": shrink, "slope": loglog_slope(betas, radii)}
    if np.all(betas[ok] <= floor):
        details["at_floor"] = True
        return Verdict(name, True, 0.0, growth, np.flatnonzero(ok).tolist(), details)
    if not np.any(coarse):
        return Verdict(name, None, None, growth, np.flatnonzero(ok).tolist(), details)
    q_fine = float(np.max(q[fine]))
    q_coarse = float(np.max(q[coarse]))
    details.update(fine_max=q_fine, coarse_max=q_coarse)
    ratio = math.inf if q_coarse <= floor else q_fine / q_coarse
    return Verdict(name, bool(ratio < growth), ratio, growth, np.flatnonzero(ok).tolist(), details)


def beta_diagnostics(
    cloud: WeightedCloud,
    x: Any,
    grid: ScaleGrid,
    alpha: float,
    p: float,
    m_tail: Optional[int] = None,
    profile: Optional[PointProfile] = None,
    index: Optional[int] = None,
    seed: Optional[int] = None,
    cache: Optional[FitCache] = None,
) -> BetaDiagnostics:
    """
    sup_stat = max r_j^{−α}β_p；jones_sum = Σβ_2²；ghinassi_sum = Σβ_∞²/r_j^{2α}（只在有效尺度上）。
    beta_bound 看 r^{−α}β_p 在最细几个尺度上是否比更粗尺度明显变大（见 bound_verdict），
    细节里附带 sup_stat 与斜率。jones_finite 要求 β_2 的 log-log 斜率 ≥ JONES_SLOPE_MIN，
    ghinassi_finite 要求 β_∞ 斜率 ≥ α + GHINASSI_SLOPE_MARGIN；这两个是斜率替代（见 _decay_verdict），
    尾部全为 0 时直接通过。
    """
    p = float(p)
    m_tail = int(getattr(config, "CRITERION_M_TAIL", 5) if m_tail is None else m_tail)
    need = {2.0, p, math.inf}
    if profile is None or not need.issubset(profile.betas.keys()):
        profile = point_profile(cloud, x, grid, alpha, float(getattr(config, "CRITERION_LAMBDA", 4.0)),
                                p_list=sorted(need), index=index, seed=seed, cache=cache)
    radii = profile.radii
    valid = profile.valid
    bp = np.where(valid, profile.betas[p], np.nan)
    b2 = np.where(valid, profile.betas[2.0], np.nan)
    binf = np.where(valid, profile.betas[math.inf], np.nan)
    tail = profile.tail_indices(m_tail)
    if not np.any(valid):
        none = Verdict("beta_bound", None)
        return BetaDiagnostics(p, math.nan, math.nan, math.nan, None, None, None, none,
                               Verdict("jones_finite", None), Verdict("ghinassi_finite", None))
    sup_stat = float(np.nanmax(bp / radii ** alpha))
    jones = float(np.nansum(b2 ** 2))
    ghin = float(np.nansum(binf ** 2 / radii ** (2.0 * alpha)))
    bound = bound_verdict(f"beta_bound_p{_p_label(p)}", bp, radii, alpha)
    bound.details["sup_stat"] = sup_stat
    jones_v = _decay_verdict("jones_finite", b2, radii, tail, float(getattr(config, "JONES_SLOPE_MIN", 0.1)))
    jones_v.details["jones_sum"] = jones
    ghin_v = _decay_verdict(
        "ghinassi_finite", binf, radii, tail, alpha + float(getattr(config, "GHINASSI_SLOPE_MARGIN", 0.05))
    )
    ghin_v.details["ghinassi_sum"] = ghin
    theta_lower = _lower_density(profile, tail)
    return BetaDiagnostics(
        p, sup_stat, jones, ghin,
        loglog_slope(bp, radii), loglog_slope(b2, radii), loglog_slope(binf, radii),
        bound, jones_v, ghin_v, chebyshev_lambda(sup_stat, p, cloud.k, theta_lower),
    )


@dataclass(frozen=True)
class JonesIntegralCheck:
    integral: float
    averaged_sum: float
    lower: float
    upper: float
    ok: bool
    samples: int


def jones_integral_check(
    cloud: WeightedCloud, x: Any, grid: ScaleGrid, refine: int = 4, tol: Optional[float] = None
) -> JonesIntegralCheck:
    """
    I = ∫_{r_J}^{r_0} β_2² dr/r（对数网格梯形），A = r_0^{−1}∫_{ρr_0}^{r_0} Σ_j β_2(sρ^j)² ds；
    两者满足 ρ·I ≤ A ≤ I（在离散容差内）。
    """
    x = np.asarray(x, dtype=float)
    tol = float(getattr(config, "VERIFY_FUBINI_TOL", 0.05) if tol is None else tol)
    R = max(1, int(refine))
    J = int(grid.J)
    m = np.arange(J * R + 1)
    rr = grid.r0 * grid.rho ** (m / R)
    b2 = np.array([fit_beta2(cloud, x, r).value ** 2 for r in rr])
    logs = np.log(rr)
    integral = float(abs(trapezoid(b2, logs)))
    s = rr[: R + 1]
    S = np.array([sum(b2[i + j * R] for j in range(J)) for i in range(R + 1)])
    averaged = float(abs(trapezoid(S, s)) / grid.r0)
    lower, upper = grid.rho * integral, integral
    ok = lower * (1.0 - tol) <= averaged <= upper * (1.0 + tol) + 1e-300
    return JonesIntegralCheck(integral, averaged, lower, upper, bool(ok), int(rr.size))


@dataclass
class ClassifyParams:
    alpha: float = 1.0
    lam: float = 4.0
    delta: float = 0.5
    M: float = 8.0
    grid: ScaleGrid = field(default_factory=lambda: ScaleGrid(0.5, 0.5, 8))
    p_list: Sequence[float] = (2.0, math.inf)
    m_tail: int = 5
    stride: int = 10
    seed: int = 0
    quantile: float = 0.0
    cone_aperture: float = 1.0
    modulus: Optional[ModulusSequence] = None
    C: Optional[float] = None
    threads: int = 1
    keep_profiles: bool = False

    @classmethod
    def from_config(cls, **overrides: Any) -> "ClassifyParams":
        base = dict(
            alpha=float(getattr(config, "CRITERION_ALPHA", 0.5)),
            lam=float(getattr(config, "CRITERION_LAMBDA", 4.0)),
            delta=float(getattr(config, "CRITERION_DELTA", 0.5)),
            M=float(getattr(config, "CRITERION_M", 8.0)),
            grid=ScaleGrid(
                float(getattr(config, "GRID_R0", 0.5)),
                float(getattr(config, "GRID_RHO", 0.5)),
                int(getattr(config, "GRID_J", 8)),
            ),
            p_list=tuple(getattr(config, "CRITERION_P_LIST", (2.0, math.inf))),
            m_tail=int(getattr(config, "CRITERION_M_TAIL", 5)),
            stride=int(getattr(config, "QUERY_STRIDE", 10)),
            seed=int(getattr(config, "GLOBAL_SEED", 0)),
            quantile=float(getattr(config, "BETA_INF_QUANTILE", 0.0)),
            cone_aperture=float(getattr(config, "CONE_APERTURE", 1.0)),
            threads=int(getattr(config, "WORKER_THREADS", 1)),
        )
        base.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**base)

    def validate(self) -> None:
        if not (0 < self.alpha <= 1):
            raise InputError("α 必须在 (0,1] 内")
        if min(self.lam, self.delta, self.M) <= 0:
            raise InputError("λ、δ、M 必须为正")
        if self.delta > self.M:
            raise InputError("δ 不能大于 M")
        if self.m_tail < 1 or self.stride < 1:
            raise InputError("m_tail 与 stride 至少为 1")
        if not self.p_list or any(not (float(p) >= 1) for p in self.p_list):
            raise InputError("p 必须在 [1, ∞] 内")
        if self.cone_aperture <= 0:
            raise InputError("锥开口 s 必须为正")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha, "lambda": self.lam, "delta": self.delta, "M": self.M,
            "grid": self.grid.to_dict(), "p_list": [_p_label(float(p)) for p in self.p_list],
            "m_tail": self.m_tail, "stride": self.stride, "seed": self.seed, "quantile": self.quantile,
            "cone_aperture": self.cone_aperture, "C": self.C,
            "modulus": None if self.modulus is None else list(self.modulus.lambdas),
        }


@dataclass
class PointReport:
    index: int
    x: np.ndarray
    verdicts: Dict[str, Verdict]
    uniform: bool
    canonical: bool
    measured_delta: Optional[float]
    measured_M: Optional[float]
    stabilization_certified: bool
    stabilization_violation: Optional[int]
    holder: Optional[HolderFit]
    diagnostics: List[BetaDiagnostics]
    profile: Optional[PointProfile] = None

    @property
    def indeterminate(self) -> bool:
        return all(v.passed is None for v in self.verdicts.values())

    def to_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {
            "index": self.index,
            "x": self.x.tolist(),
            "verdicts": {name: v.to_dict() for name, v in self.verdicts.items()},
            "uniform_subset": self.uniform,
            "canonical_subset": self.canonical,
            "measured_delta": self.measured_delta,
            "measured_M": self.measured_M,
            "stabilization": {"certified": self.stabilization_certified, "first_violation": self.stabilization_violation},
            "holder": None if self.holder is None else {
                "C_est": self.holder.C_est, "alpha_est": self.holder.alpha_est,
                "residual": self.holder.residual, "used": self.holder.used,
            },
            "beta_diagnostics": [d_.to_dict() for d_ in self.diagnostics],
        }
        if self.profile is not None:
            d["profile"] = self.profile.to_dict()
        return d


def measured_bounds(profile: PointProfile, k: int) -> Tuple[Optional[float], Optional[float]]:
    """有效尺度上 μ(B(x,r))/r^k 的最小、最大值，即实测的 δ 与 M。"""
    valid = np.flatnonzero(profile.valid)
    if valid.size == 0:
        return None, None
    ratio = profile.masses[valid] / profile.radii[valid] ** k
    return float(np.min(ratio)), float(np.max(ratio))


def uniform_subset_member(profile: PointProfile, k: int, delta: float, M: float, eps: float) -> bool:
    """每个有效尺度上 δr^k ≤ μ(B) ≤ Mr^k 且抛物体超额严格 < ε；没有有效尺度时不属于。"""
    valid = np.flatnonzero(profile.valid)
    if valid.size == 0:
        return False
    ratio = profile.masses[valid] / profile.radii[valid] ** k
    excess = profile.parab_excess[valid]
    return bool(np.all(ratio >= delta) and np.all(ratio <= M) and np.all(excess < eps))


def canonical_subset(profile: PointProfile, k: int, excess_bound: float) -> bool:
    """½(2r)^k ≤ μ(B) ≤ 2(2r)^k 且抛物体超额 ≤ excess_bound，在每个有效尺度上成立。"""
    valid = np.flatnonzero(profile.valid)
    if valid.size == 0:
        return False
    dens = profile.masses[valid] / (2.0 * profile.radii[valid]) ** k
    excess = profile.parab_excess[valid]
    return bool(np.all(dens >= 0.5) and np.all(dens <= 2.0) and np.all(excess <= excess_bound))


def evaluate_point(
    cloud: WeightedCloud,
    index: int,
    params: ClassifyParams,
    consts: ConstantSet,
    cache: Optional[FitCache] = None,
    resolution_ok: Optional[np.ndarray] = None,
) -> PointReport:
    """单个查询点上跑全部判据；只读共享的点云与缓存。"""
    x = cloud.points[index]
    grid = params.grid
    k = cloud.k
    p_all = sorted({float(p) for p in params.p_list} | {2.0, math.inf})
    prof = point_profile(
        cloud, x, grid, params.alpha, params.lam, p_list=p_all, index=index,
        seed=params.seed, quantile=params.quantile, cache=cache, resolution_ok=resolution_ok,
    )
    stab = stabilize_planes(prof, grid, params.lam, params.alpha, consts.C, cloud=cloud, seed=params.seed)
    verdicts: Dict[str, Verdict] = {}
    if stab.v_inf is not None:
        set_reference(prof, cloud, stab.v_inf, params.lam, params.alpha)
        V = stab.v_inf
        verdicts["fixed_paraboloid"] = criterion_fixed_plane(cloud, x, V, grid, params.lam, params.alpha, params.m_tail, prof)
        verdicts["approximate_cone"] = criterion_cone(cloud, x, V, grid, params.cone_aperture, params.m_tail, prof)
    else:
        verdicts["fixed_paraboloid"] = Verdict("fixed_paraboloid", None, None, consts.eps0)
        verdicts["approximate_cone"] = Verdict("approximate_cone", None, None, cone_threshold(k, params.cone_aperture))
    verdicts["rotating_cylinder"] = criterion_rotating(cloud, x, grid, params.lam, params.alpha, params.m_tail, prof)
    diagnostics: List[BetaDiagnostics] = []
    for p in [float(p) for p in params.p_list]:
        diag = beta_diagnostics(cloud, x, grid, params.alpha, p, params.m_tail, prof)
        diagnostics.append(diag)
        verdicts[diag.beta_bound.name] = diag.beta_bound
    if diagnostics:
        verdicts["jones_finite"] = diagnostics[0].jones_finite
        verdicts["ghinassi_finite"] = diagnostics[0].ghinassi_finite
    if params.modulus is not None:
        verdicts["modulus"] = modulus_criterion(cloud, x, grid, params.modulus, params.m_tail, prof)

    mdelta, mM = measured_bounds(prof, k)
    eps_u = float(getattr(config, "UNIFORM_EPS_SCALE", 0.99)) * consts.uniform_eps
    uniform = uniform_subset_member(prof, k, params.delta, params.M, eps_u)
    canonical = canonical_subset(prof, k, consts.canonical_excess)
    holder = None
    th = prof.thetas[np.isfinite(prof.thetas)]
    if th.size >= 3:
        try:
            holder = holder_fit(prof.thetas, prof.radii)
        except InputError:
            holder = None
    for name, v in verdicts.items():
        log_verdict(index, name, v.passed, v.statistic, v.threshold)
    return PointReport(
        index=int(index), x=np.asarray(x), verdicts=verdicts, uniform=uniform, canonical=canonical,
        measured_delta=mdelta, measured_M=mM, stabilization_certified=stab.certified,
        stabilization_violation=stab.first_violation, holder=holder, diagnostics=diagnostics,
        profile=prof if params.keep_profiles else None,
    )


def query_indices(cloud: WeightedCloud, stride: int) -> np.ndarray:
    """确定性子采样：每隔 stride 个点取一个。"""
    return np.arange(0, len(cloud), max(1, int(stride)))


def relative_density_subset(
    cloud: WeightedCloud,
    queries: np.ndarray,
    member: np.ndarray,
    grid: ScaleGrid,
    m_tail: int,
    t: float = 0.5,
) -> np.ndarray:
    """
    云点继承最近查询点的 F′ 归属；返回 F′ 中在每个尾部尺度上 μ(F′∩B)/μ(B) ≥ t 的查询点下标。
    """
    if queries.size == 0 or not np.any(member):
        return np.zeros(0, dtype=np.intp)
    qtree = cKDTree(cloud.points[queries])
    _, nearest = qtree.query(cloud.points)
    in_f = member[nearest]
    radii = grid.radii
    floor = grid.resolution_floor(cloud)
    keep: List[int] = []
    for qi in np.flatnonzero(member):
        idx_pt = int(queries[qi])
        x = cloud.points[idx_pt]
        ok_scales = [j for j, r in enumerate(radii) if r >= floor and point_domain_ok(cloud, x, r, idx_pt)]
        tail = ok_scales[-int(m_tail):]
        good = bool(tail)
        for j in tail:
            idx = cloud.ball_indices(x, radii[j])
            total = float(np.sum(cloud.weights[idx]))
            part = float(np.sum(cloud.weights[idx][in_f[idx]]))
            if total <= 0 or part < t * total:
                good = False
                break
        if good:
            keep.append(idx_pt)
    return np.asarray(keep, dtype=np.intp)


def _diameter(points: np.ndarray) -> float:
    cap = int(getattr(config, "WHITNEY_PAIR_CAP", 20000))
    if points.shape[0] < 2:
        return 0.0
    if points.shape[0] > cap:
        points = points[:: int(math.ceil(points.shape[0] / cap))]
    return float(np.max(pdist(points)))


@dataclass
class CriterionReport:
    params: ClassifyParams
    constants: ConstantSet
    points: List[PointReport]
    aggregate: Dict[str, Any]

    @property
    def all_indeterminate(self) -> bool:
        return bool(self.points) and all(p.indeterminate for p in self.points)

    def pass_fraction(self, name: str) -> Optional[float]:
        return self.aggregate["criteria"].get(name, {}).get("pass_fraction")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params.to_dict(),
            "constants": self.constants.to_dict(),
            "per_point": [p.to_dict() for p in self.points],
            "aggregate": self.aggregate,
        }


def _aggregate(reports: List[PointReport], cloud: WeightedCloud, queries: np.ndarray,
               params: ClassifyParams, consts: ConstantSet) -> Dict[str, Any]:
    names: List[str] = []
    for rep in reports:
        for name in rep.verdicts:
            if name not in names:
                names.append(name)
    crit: Dict[str, Any] = {}
    for name in names:
        vs = [rep.verdicts[name].passed for rep in reports if name in rep.verdicts]
        det = [v for v in vs if v is not None]
        crit[name] = {
            "passed": int(sum(1 for v in det if v)),
            "failed": int(sum(1 for v in det if not v)),
            "indeterminate": int(len(vs) - len(det)),
            "pass_fraction": (sum(1 for v in det if v) / len(det)) if det else None,
        }
    member = np.array([rep.uniform for rep in reports], dtype=bool)
    fprime = queries[member] if member.size else np.zeros(0, dtype=np.intp)
    diam = _diameter(cloud.points[fprime]) if fprime.size else 0.0
    rel = relative_density_subset(cloud, queries, member, params.grid, params.m_tail)
    deltas = [rep.measured_delta for rep in reports if rep.measured_delta is not None]
    Ms = [rep.measured_M for rep in reports if rep.measured_M is not None]
    return {
        "queries": int(len(reports)),
        "criteria": crit,
        "indeterminate_points": int(sum(1 for rep in reports if rep.indeterminate)),
        "uniform_subset": {
            "indices": fprime.tolist(),
            "count": int(fprime.size),
            "diameter": diam,
            "r1": consts.r1,
            "single_graph_regime": bool(fprime.size > 0 and diam <= consts.r1),
        },
        "relative_density_subset": {"indices": rel.tolist(), "count": int(rel.size), "t": 0.5},
        "canonical_subset": {"count": int(sum(1 for rep in reports if rep.canonical))},
        "measured_delta": min(deltas) if deltas else None,
        "measured_M": max(Ms) if Ms else None,
        "stabilization_certified": int(sum(1 for rep in reports if rep.stabilization_certified)),
        "beta_values_are_upper_bounds_for_p_not_2": True,
    }


def classify(cloud: WeightedCloud, params: ClassifyParams, queries: Optional[np.ndarray] = None) -> CriterionReport:
    """对查询点逐点评估全部判据并汇总；结果按点顺序聚合，与线程调度无关。"""
    from worker import run_point_tasks

    params.validate()
    n = cloud.ambient_dim
    consts = rectifiability_constants(cloud.k, n, params.alpha, params.lam, params.delta, params.M, params.grid.rho, params.C)
    if queries is None:
        queries = query_indices(cloud, params.stride)
    queries = np.asarray(queries, dtype=np.intp)
    resolution_ok = params.grid.check_resolution(cloud)
    cache = FitCache(int(getattr(config, "FIT_CACHE_MAX_SIZE", 4096)))
    t0 = time.monotonic()
    reports = run_point_tasks(
        [int(i) for i in queries],
        lambda i: evaluate_point(cloud, i, params, consts, cache, resolution_ok),
        threads=params.threads,
    )
    agg = _aggregate(reports, cloud, queries, params, consts)
    log(f"分类完成: {len(reports)} 个查询点, 用时 {time.monotonic() - t0:.1f}s", level="INFO")
    return CriterionReport(params, consts, reports, agg)
