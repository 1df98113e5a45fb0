# -*- coding: utf-8 -*-
"""判据常数 ε₀(k)、C(n,δ,M,λ)、r₁、λ′、λ″ 及派生阈值."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from tools.errors import InputError
from tools.geometry import unit_ball_volume


def eps0(k: int) -> float:
    """ε₀(k) = 2^k · 240^{−(k+1)}。"""
    return 2.0 ** k * 240.0 ** (-(k + 1))


def cone_threshold(k: int, s: float) -> float:
    """近似切锥判据的阈值 240^{−(k+1)}(1+s²)^{−k/2}。"""
    return 240.0 ** (-(k + 1)) * (1.0 + s * s) ** (-k / 2.0)


@dataclass(frozen=True)
class ConstantSet:
    k: int
    n: int
    alpha: float
    lam: float
    delta: float
    M: float
    rho: float
    eps0: float
    C_key: float
    r1: float
    lambda_prime: float
    lambda_dprime: float
    omega_n: float
    # 派生阈值
    parabequiv_lambda: float
    parabcyl_lambda: float
    uniform_eps: float
    rotating_eps: float
    rotating_factor: float
    canonical_excess: float
    C_override: Optional[float] = None

    @property
    def C(self) -> float:
        """实际用于 r₁、λ′、λ″ 的 C（可被覆盖，测试中常取 0）。"""
        return self.C_key if self.C_override is None else self.C_override

    @property
    def diameter_bound(self) -> float:
        """几何引理的直径上界 min{(4C)^{−1/α}, (4λ)^{−1/α}}。"""
        c = self.C
        by_c = math.inf if c <= 0 else (4.0 * c) ** (-1.0 / self.alpha)
        return min(by_c, (4.0 * self.lam) ** (-1.0 / self.alpha))

    def rotating_threshold(self, theta_lower: float) -> float:
        """(1−2^{−k})ε₀(k)Θ_*。"""
        return self.rotating_factor * theta_lower

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["inputs"] = {
            "k": self.k, "n": self.n, "alpha": self.alpha, "lambda": self.lam,
            "delta": self.delta, "M": self.M, "rho": self.rho, "C_override": self.C_override,
        }
        d["diameter_bound"] = self.diameter_bound
        return d


def rectifiability_constants(
    k: int,
    n: int,
    alpha: float,
    lam: float,
    delta: float,
    M: float,
    rho: float,
    C: Optional[float] = None,
) -> ConstantSet:
    """按公式直接求值；C 缺省时取 C_key。"""
    if not (1 <= k <= n - 1):
        raise InputError(f"需要 1 ≤ k ≤ n−1，得到 k={k}, n={n}")
    if not (0 < alpha <= 1):
        raise InputError("α 必须在 (0,1] 内")
    if not (0 < rho < 1):
        raise InputError("ρ 必须在 (0,1) 内")
    if min(lam, delta, M) <= 0:
        raise InputError("λ、δ、M 必须为正")
    if C is not None and C < 0:
        raise InputError("C 不能为负")

    omega = unit_ball_volume(n)
    c_key = 20.0 ** (n + 1) * 2.0 * n * M * lam / (delta * omega)
    c = c_key if C is None else float(C)
    a1 = 4.0 ** (1.0 + alpha)
    r1 = (4.0 * lam * (2.0 + a1) + 8.0 * c) ** (-1.0 / alpha)
    lam_p = 2.0 * c + (1.0 + a1) * lam
    lam_pp = lam + c + (2.0 * lam + c) / (1.0 - rho ** (1.0 + alpha))
    e0 = eps0(k)
    q = 4.0 ** k + 1.0
    half = 1.0 - 2.0 ** (-k)
    return ConstantSet(
        k=k, n=n, alpha=float(alpha), lam=float(lam), delta=float(delta), M=float(M), rho=float(rho),
        eps0=e0, C_key=c_key, r1=r1, lambda_prime=lam_p, lambda_dprime=lam_pp, omega_n=omega,
        parabequiv_lambda=6.0 * 4.0 ** alpha * lam,
        parabcyl_lambda=a1 * lam,
        uniform_eps=delta / q,
        rotating_eps=half * delta / q,
        rotating_factor=half * e0,
        canonical_excess=1.0 / (8.0 * q),
        C_override=None if C is None else float(C),
    )
