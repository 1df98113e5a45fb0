# -*- coding: utf-8 -*-
"""
rectiscope 命令行：generate / analyze / classify / verify / report / schema。
退出码：0 成功；1 文件缺失或解析失败；2 参数无效；3 分类结果全部不确定；4 引理验证失败。
"""
import os
import sys

# 保证项目目录优先，避免与 site-packages 里同名的 tools 冲突
_script_dir = os.path.dirname(os.path.abspath(__file__))
if _script_dir not in sys.path:
    sys.path.insert(0, _script_dir)
for _n in list(sys.modules):
    if _n == "tools" or _n.startswith("tools."):
        if not (getattr(sys.modules[_n], "__file__", None) or "").startswith(_script_dir):
            del sys.modules[_n]

import argparse
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import config
from agents.criteria import ClassifyParams, classify
from agents.generators import KINDS, GeneratorSpec, generate
from agents.multiscale import ModulusSequence, ScaleGrid
from agents.verify_suite import CHECK_NAMES, run_verify
from tools.errors import InputError, ParseError
from tools.file_util import dumps, read_cloud, read_json, write_cloud, write_json
from tools.logger_util import log
from tools.plot_data import write_plot_data
from tools.schemas import REPORT_MODELS, report_schema, validate_report

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INPUT = 2
EXIT_INDETERMINATE = 3
EXIT_VERIFY = 4

COMMANDS = ("generate", "analyze", "classify", "verify", "report", "schema")


def _parse_p(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity", "∞"):
        return math.inf
    try:
        p = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"p 必须是数字或 inf，得到 {text!r}")
    if not (p >= 1):
        raise argparse.ArgumentTypeError("p 必须在 [1, ∞] 内")
    return p


def _parse_param(text: str) -> Tuple[str, Any]:
    """KEY=VALUE，VALUE 按 JSON 解析，失败时当字符串。"""
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"生成器参数应为 KEY=VALUE，得到 {text!r}")
    key, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


@dataclass
class RunConfig:
    """一次运行的全部输入；所有随机性都来自 seed。"""
    command: str
    input: Optional[str] = None
    out: Optional[str] = None
    k: Optional[int] = None
    alpha: Optional[float] = None
    lam: Optional[float] = None
    delta: Optional[float] = None
    M: Optional[float] = None
    p_list: Optional[Tuple[float, ...]] = None
    r0: Optional[float] = None
    rho: Optional[float] = None
    J: Optional[int] = None
    m_tail: Optional[int] = None
    stride: Optional[int] = None
    seed: int = 0
    kind: Optional[str] = None
    count: int = 1000
    params: Dict[str, Any] = field(default_factory=dict)
    quantile: Optional[float] = None
    threads: Optional[int] = None
    C: Optional[float] = None
    modulus_power: Optional[float] = None
    sabotage: Optional[str] = None
    report_kind: str = "classify"
    prefix: str = "rectiscope"

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise InputError(f"未知命令 {self.command!r}")
        if self.input and self.out and os.path.abspath(self.input) == os.path.abspath(self.out):
            raise InputError("--input 与 --out 不能是同一个文件")
        if self.seed < 0:
            raise InputError("--seed 必须非负")
        if self.command in ("analyze", "classify", "report") and not self.input:
            raise InputError(f"{self.command} 需要 --input")
        if self.command == "generate":
            if not self.kind:
                raise InputError(f"generate 需要 --kind，可选: {', '.join(KINDS)}")
            if not self.out:
                raise InputError("generate 需要 --out")
        if self.command == "report" and not self.out:
            self.out = os.path.dirname(os.path.abspath(self.input or "."))
        if self.sabotage is not None and self.sabotage not in CHECK_NAMES:
            raise InputError(f"--sabotage 可选: {', '.join(CHECK_NAMES)}")
        if self.report_kind not in REPORT_MODELS:
            raise InputError(f"--report-kind 可选: {', '.join(REPORT_MODELS)}")
        if self.k is not None and self.k < 1:
            raise InputError("--k 至少为 1")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        return cls(
            command=args.command, input=args.input, out=args.out, k=args.k,
            alpha=args.alpha, lam=args.lam, delta=args.delta, M=args.M,
            p_list=tuple(args.p) if args.p else None,
            r0=args.r0, rho=args.rho, J=args.scales, m_tail=args.tail, stride=args.stride,
            seed=int(getattr(config, "GLOBAL_SEED", 0) if args.seed is None else args.seed),
            kind=args.kind, count=args.count, params=dict(args.param or []),
            quantile=args.quantile_esssup, threads=args.threads, C=args.C,
            modulus_power=args.modulus_power, sabotage=args.sabotage,
            report_kind=args.report_kind, prefix=args.prefix,
        )

    def grid(self) -> ScaleGrid:
        return ScaleGrid(
            float(getattr(config, "GRID_R0", 0.5) if self.r0 is None else self.r0),
            float(getattr(config, "GRID_RHO", 0.5) if self.rho is None else self.rho),
            int(getattr(config, "GRID_J", 8) if self.J is None else self.J),
        )

    def classify_params(self, keep_profiles: bool = False) -> ClassifyParams:
        grid = self.grid()
        modulus = None
        if self.modulus_power is not None:
            modulus = ModulusSequence.inverse_power(int(grid.J) + 1, self.modulus_power)
        params = ClassifyParams.from_config(
            alpha=self.alpha, lam=self.lam, delta=self.delta, M=self.M, grid=grid,
            p_list=self.p_list, m_tail=self.m_tail, stride=self.stride, seed=self.seed,
            quantile=self.quantile, modulus=modulus, C=self.C, threads=self.threads,
            keep_profiles=keep_profiles,
        )
        params.validate()
        return params


def _emit(cfg: RunConfig, payload: Dict[str, Any]) -> None:
    if cfg.out:
        write_json(cfg.out, payload)
        log(f"报告已写入 {cfg.out}")
    else:
        sys.stdout.write(dumps(payload) + "\n")


def run_generate(cfg: RunConfig) -> int:
    spec = GeneratorSpec.default(cfg.kind or "", cfg.count, cfg.seed, **cfg.params)
    cloud = generate(spec)
    write_cloud(cfg.out or "", cloud)
    log(f"已生成 {spec.kind}: {len(cloud)} 个点 (n={cloud.ambient_dim}, k={cloud.k}) -> {cfg.out}")
    return EXIT_OK


def _run_criteria(cfg: RunConfig, keep_profiles: bool) -> int:
    params = cfg.classify_params(keep_profiles=keep_profiles)
    cloud = read_cloud(cfg.input or "", cfg.k)
    report = classify(cloud, params)
    payload = report.to_dict()
    kind = "classify"
    if keep_profiles:
        kind = "analyze"
        payload["cloud"] = {
            "n_points": len(cloud), "n": cloud.ambient_dim, "k": cloud.k, "total_mass": cloud.total_mass,
        }
    payload = validate_report(kind, payload)
    _emit(cfg, payload)
    for name, counts in sorted(report.aggregate["criteria"].items()):
        frac = counts["pass_fraction"]
        log(f"{name}: 通过比例 {'-' if frac is None else f'{frac:.3f}'}", level="RESULT")
    if report.all_indeterminate:
        log("所有查询点都没有有效尺度，结果不确定", level="WARNING")
        return EXIT_INDETERMINATE
    return EXIT_OK


def run_classify(cfg: RunConfig) -> int:
    return _run_criteria(cfg, keep_profiles=False)


def run_analyze(cfg: RunConfig) -> int:
    return _run_criteria(cfg, keep_profiles=True)


def run_verify_command(cfg: RunConfig) -> int:
    report = run_verify(seed=cfg.seed, sabotage=cfg.sabotage)
    _emit(cfg, validate_report("verify", report.to_dict()))
    if not report.passed:
        log(f"引理验证未通过: {report.first_failure}", level="ERROR")
        return EXIT_VERIFY
    return EXIT_OK


def run_report(cfg: RunConfig) -> int:
    data = read_json(cfg.input or "")
    validate_report("analyze", data)
    paths = write_plot_data(data, cfg.out or ".", cfg.prefix)
    for p in paths:
        sys.stdout.write(p + "\n")
    return EXIT_OK


def run_schema(cfg: RunConfig) -> int:
    _emit(cfg, report_schema(cfg.report_kind))
    return EXIT_OK


_HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "generate": run_generate,
    "analyze": run_analyze,
    "classify": run_classify,
    "verify": run_verify_command,
    "report": run_report,
    "schema": run_schema,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rectiscope", description="加权点云的 C^{1,α} 可求长性多尺度诊断")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", help="点云 (.csv/.json) 或 analyze 报告")
    parser.add_argument("--out", help="输出文件；report 命令为输出目录")
    parser.add_argument("--k", type=int, help="内蕴维数（CSV 输入必需）")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--lambda", dest="lam", type=float)
    parser.add_argument("--delta", type=float)
    parser.add_argument("--M", type=float)
    parser.add_argument("--p", type=_parse_p, action="append", help="可重复；inf 表示 β_∞")
    parser.add_argument("--r0", type=float)
    parser.add_argument("--rho", type=float)
    parser.add_argument("--scales", type=int, help="尺度个数 J")
    parser.add_argument("--tail", type=int, help="尾部尺度数 m")
    parser.add_argument("--stride", type=int, help="查询点子采样步长")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--kind", choices=KINDS, help="generate 的点云类型")
    parser.add_argument("--count", type=int, default=1000, help="generate 的采样点数")
    parser.add_argument("--param", type=_parse_param, action="append", help="生成器参数 KEY=VALUE，可重复")
    parser.add_argument("--quantile-esssup", dest="quantile_esssup", type=float, help="β_∞ 丢弃的最轻权重分位")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--C", type=float, help="覆盖 C(n,δ,M,λ)")
    parser.add_argument("--modulus-power", dest="modulus_power", type=float, help="附加 λ_j = 1/(j+1)^s 的连续模判据")
    parser.add_argument("--sabotage", help="测试用：让指定的引理检查失败")
    parser.add_argument("--report-kind", dest="report_kind", default="classify", help="schema 命令输出哪种报告的 schema")
    parser.add_argument("--prefix", default="rectiscope", help="report 命令输出文件名前缀")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        return _HANDLERS[cfg.command](cfg)
    except ParseError as e:
        log(f"读取失败: {e}", level="ERROR")
        return EXIT_PARSE
    except InputError as e:
        log(f"参数无效: {e}", level="ERROR")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
