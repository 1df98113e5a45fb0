# -*- coding: utf-8 -*-
"""
Whitney C^{1,α} 1-jet 检查：最小常数 M_taylor / M_holder / M_bound，
以及“抛物体包含 + Hölder 平面”到图 jet 的几何引理流程。只检查条件，不构造延拓。
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

import config
from tools.cloud import WeightedCloud
from tools.errors import InconsistentJetError, InputError, NonGraphError, TiltError
from tools.geometry import LinearPlane, Paraboloid, SlantMap, grassmann_distance, orthogonal_complement
from tools.logger_util import log


@dataclass(frozen=True, eq=False)
class JetData:
    """base_points (N,k)、values (N,d)、derivatives (N,d,k)。"""
    base_points: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    alpha: float

    def __post_init__(self) -> None:
        X = np.asarray(self.base_points, dtype=float)
        F = np.asarray(self.values, dtype=float)
        L = np.asarray(self.derivatives, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if F.ndim == 1:
            F = F.reshape(-1, 1)
        if L.ndim == 1:
            L = L.reshape(-1, 1, 1)
        if not (X.shape[0] == F.shape[0] == L.shape[0]):
            raise InputError("base_points、values、derivatives 的长度必须相同")
        if L.shape[1:] != (F.shape[1], X.shape[1]):
            raise InputError(f"导数形状 {L.shape[1:]} 应为 {(F.shape[1], X.shape[1])}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(F)) and np.all(np.isfinite(L))):
            raise InputError("jet 含非有限值")
        if not (0 < self.alpha <= 1):
            raise InputError("α 必须在 (0,1] 内")
        for name, arr in (("base_points", X), ("values", F), ("derivatives", L)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.base_points.shape[0])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "base_points": self.base_points.tolist(),
            "values": self.values.tolist(),
            "derivatives": self.derivatives.tolist(),
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "JetData":
        return cls(np.asarray(d["base_points"]), np.asarray(d["values"]), np.asarray(d["derivatives"]), float(d["alpha"]))


@dataclass(frozen=True)
class WhitneyConstants:
    M_taylor: float
    M_holder: float
    M_bound: float
    pairs: int
    subsampled: bool = False

    @property
    def M(self) -> float:
        return max(self.M_taylor, self.M_holder, self.M_bound)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "M_taylor": self.M_taylor, "M_holder": self.M_holder, "M_bound": self.M_bound,
            "M": self.M, "pairs": self.pairs, "subsampled": self.subsampled,
        }


def _dedupe(jet: JetData) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """完全相同的重复基点只保留一个；值或导数不同则报错。"""
    X, F, L = jet.base_points, jet.values, jet.derivatives
    dup = sorted(cKDTree(X).query_pairs(r=0.0))
    if not dup:
        return X, F, L
    drop = set()
    for i, j in dup:
        if not (np.array_equal(F[i], F[j]) and np.array_equal(L[i], L[j])):
            raise InconsistentJetError(f"基点 {i} 与 {j} 重合但值或导数不同")
        drop.add(j)
    keep = np.array([i for i in range(X.shape[0]) if i not in drop], dtype=np.intp)
    return X[keep], F[keep], L[keep]


def _spectral(M: np.ndarray) -> np.ndarray:
    """最后两维的谱范数；d 或 k 为 1 时就是 Frobenius 范数。"""
    if M.shape[-1] == 1 or M.shape[-2] == 1:
        return np.sqrt(np.sum(M * M, axis=(-2, -1)))
    return np.linalg.norm(M, ord=2, axis=(-2, -1))


def whitney_constants(jet: JetData) -> WhitneyConstants:
    """
    M_taylor = max |f(y)−f(x)−L_x(y−x)| / |x−y|^{1+α}（有序对），
    M_holder = max ‖L_x−L_y‖ / |x−y|^α，M_bound = max(|f|, ‖L‖)。
    点数超过 WHITNEY_PAIR_CAP 时按固定步长子采样。
    """
    X, F, L = _dedupe(jet)
    N = X.shape[0]
    if N < 2:
        raise InputError("至少需要 2 个不同的基点")
    cap = int(getattr(config, "WHITNEY_PAIR_CAP", 20000))
    subsampled = False
    if N > cap:
        step = int(math.ceil(N / cap))
        X, F, L = X[::step], F[::step], L[::step]
        N = X.shape[0]
        subsampled = True
        log(f"Whitney 常数：点数超过 {cap}，按步长 {step} 子采样", level="WARNING")
    a = float(jet.alpha)
    chunk = max(1, int(getattr(config, "WHITNEY_CHUNK", 512)))
    m_taylor = 0.0
    m_holder = 0.0
    for s in range(0, N, chunk):
        xs, fs, ls = X[s:s + chunk], F[s:s + chunk], L[s:s + chunk]
        diff = X[None, :, :] - xs[:, None, :]                      # (c,N,k)  y − x
        dist = np.linalg.norm(diff, axis=2)
        mask = dist > 0
        safe = np.where(mask, dist, 1.0)
        pred = np.einsum("cdk,cnk->cnd", ls, diff)
        rem = np.linalg.norm(F[None, :, :] - fs[:, None, :] - pred, axis=2)
        t = np.where(mask, rem / safe ** (1.0 + a), 0.0)
        m_taylor = max(m_taylor, float(np.max(t)))
        dL = L[None, :, :, :] - ls[:, None, :, :]
        nrm = _spectral(dL)
        h = np.where(mask, nrm / safe ** a, 0.0)
        m_holder = max(m_holder, float(np.max(h)))
    f_max = float(np.max(np.linalg.norm(F, axis=1)))
    l_max = float(np.max(_spectral(L)))
    return WhitneyConstants(m_taylor, m_holder, max(f_max, l_max), N * (N - 1), subsampled)


def _plane_list(cloud: WeightedCloud, planes: Any) -> List[LinearPlane]:
    if isinstance(planes, dict):
        try:
            out = [planes[i] for i in range(len(cloud))]
        except KeyError as e:
            raise InputError(f"缺少点 {e.args[0]} 的平面")
    else:
        out = list(planes)
    if len(out) != len(cloud):
        raise InputError(f"平面个数 {len(out)} 与点数 {len(cloud)} 不符")
    return [p.linear if hasattr(p, "linear") else p for p in out]


def graph_jet_from_cloud(cloud: WeightedCloud, planes: Any, base: LinearPlane, alpha: float) -> JetData:
    """
    点云投影到 base 上得到基点，法向分量为值，每点平面在 base 上的斜映射矩阵为导数。
    任一平面与 base 的距离超过 GRAPH_TILT_MAX 报 TiltError；投影重合报 NonGraphError。
    """
    plist = _plane_list(cloud, planes)
    if base.ambient_dim != cloud.ambient_dim or base.dim != cloud.k:
        raise InputError("基平面维数与点云不符")
    tilt_max = float(getattr(config, "GRAPH_TILT_MAX", 0.25))
    for i, V in enumerate(plist):
        d = grassmann_distance(V, base)
        if d > tilt_max:
            raise TiltError(f"平面相对基平面倾斜超过 {tilt_max}", i, d)
    P = cloud.points
    B = base.basis
    Cb = orthogonal_complement(base).basis
    X = P @ B
    F = P @ Cb
    slack = float(getattr(config, "MEMBERSHIP_SLACK", 1e-12))
    pairs = sorted(cKDTree(X).query_pairs(r=slack))
    if pairs:
        raise NonGraphError("投影到基平面后两点重合", pairs[0])
    Ls = np.stack([SlantMap.from_plane(V, base).matrix for V in plist])
    return JetData(X, F, Ls, float(alpha))


@dataclass
class GeometricLemmaResult:
    hypotheses_ok: bool
    diam_ok: bool
    diameter: float
    diameter_bound: float
    paraboloid_violations: int
    holder_violations: int
    slant_violations: int = 0
    jet: Optional[JetData] = None
    constants: Optional[WhitneyConstants] = None
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "hypotheses_ok": self.hypotheses_ok,
            "diam_ok": self.diam_ok,
            "diameter": self.diameter,
            "diameter_bound": self.diameter_bound,
            "paraboloid_violations": self.paraboloid_violations,
            "holder_violations": self.holder_violations,
            "slant_violations": self.slant_violations,
            "jet": None if self.jet is None else self.jet.to_dict(),
            "whitney": None if self.constants is None else self.constants.to_dict(),
            "reason": self.reason,
        }


def lemma_diameter_bound(lam: float, C: float, alpha: float) -> float:
    """min{(4C)^{−1/α}, (4λ)^{−1/α}}；C = 0 时只剩 λ 项。"""
    by_c = math.inf if C <= 0 else (4.0 * C) ** (-1.0 / alpha)
    return min(by_c, (4.0 * lam) ** (-1.0 / alpha))


def geometric_lemma_check(cloud: WeightedCloud, planes: Any, lam: float, C: float, alpha: float) -> GeometricLemmaResult:
    """
    逐对检查 y ∈ Q_α(x,V_x,λ) 与 d(V_x,V_y) ≤ C|x−y|^α；两者都成立时以首点平面为基构造图 jet，
    并用斜抛物体常数 λ′ = 6·4^α λ 复查。直径超界时仍输出 jet，只记警告。
    """
    if lam <= 0 or C < 0 or not (0 < alpha <= 1):
        raise InputError("需要 λ > 0、C ≥ 0、α ∈ (0,1]")
    plist = _plane_list(cloud, planes)
    P = cloud.points
    N = P.shape[0]
    slack = float(getattr(config, "MEMBERSHIP_SLACK", 1e-12))
    projectors = np.stack([V.projector for V in plist])
    parab_bad = 0
    holder_bad = 0
    for i in range(N):
        parab_bad += int(np.sum(~Paraboloid(P[i], plist[i], lam, alpha).contains_many(P)))
        dist = np.linalg.norm(P - P[i], axis=1)
        dV = np.linalg.norm(projectors - projectors[i], ord=2, axis=(1, 2))
        holder_bad += int(np.sum(dV > C * dist ** alpha + slack))
    diameter = float(np.max(pdist(P))) if N > 1 else 0.0
    bound = lemma_diameter_bound(lam, C, alpha)
    hyp = parab_bad == 0 and holder_bad == 0
    diam_ok = diameter <= bound
    result = GeometricLemmaResult(hyp, diam_ok, diameter, bound, parab_bad, holder_bad)
    if not hyp:
        result.reason = f"抛物体违例 {parab_bad}，Hölder 违例 {holder_bad}"
        return result
    if not diam_ok:
        log(f"几何引理：直径 {diameter:.4g} 超过界 {bound:.4g}，jet 仍然输出", level="WARNING")
        result.reason = "直径超界"
    base = plist[0]
    try:
        jet = graph_jet_from_cloud(cloud, plist, base, alpha)
    except (TiltError, NonGraphError) as e:
        result.reason = str(e)
        return result
    lam_p = 6.0 * 4.0 ** alpha * lam
    slant_bad = 0
    for i in range(N):
        slant = SlantMap(base, orthogonal_complement(base), jet.derivatives[i])
        slant_bad += int(np.sum(~Paraboloid(P[i], base, lam_p, alpha, slant=slant).contains_many(P)))
    result.slant_violations = slant_bad
    result.jet = jet
    result.constants = whitney_constants(jet)
    return result
