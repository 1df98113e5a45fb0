# -*- coding: utf-8 -*-
"""滚动日志：写 stderr 与 logs/rectiscope.log；日志失败不影响计算."""
import os
import sys
import threading
import time
from typing import Optional

import config

_LEVELS = {"DEBUG": 10, "INFO": 20, "WARNING": 30, "ERROR": 40}
# 不受 LOG_LEVEL 过滤
_ALWAYS = ("RESULT", "METRICS")

# 多个 worker 线程同时写同一个文件
_file_lock = threading.Lock()


def _log_path() -> Optional[str]:
    if not getattr(config, "LOG_TO_FILE", True):
        return None
    log_dir = getattr(config, "LOG_DIR", None) or os.path.join(os.path.dirname(__file__), "..", "logs")
    try:
        os.makedirs(log_dir, exist_ok=True)
    except OSError:
        return None
    return os.path.join(log_dir, getattr(config, "LOG_FILE_NAME", "rectiscope.log"))


def _rotate(path: str) -> None:
    """超过 LOG_ROTATING_MAX_BYTES 时 path → path.1 → … → path.N，最旧的丢弃。"""
    limit = int(getattr(config, "LOG_ROTATING_MAX_BYTES", 5 * 1024 * 1024))
    keep = int(getattr(config, "LOG_BACKUP_COUNT", 3))
    if not os.path.isfile(path) or os.path.getsize(path) < limit:
        return
    names = [path] + [f"{path}.{i}" for i in range(1, keep + 1)]
    if os.path.exists(names[-1]):
        os.remove(names[-1])
    for src, dst in zip(reversed(names[:-1]), reversed(names[1:])):
        if os.path.exists(src):
            os.replace(src, dst)


def _enabled(level: str) -> bool:
    if level in _ALWAYS:
        return True
    threshold = _LEVELS.get(str(getattr(config, "LOG_LEVEL", "INFO")).upper(), 20)
    return _LEVELS.get(level, 20) >= threshold


def log(msg: str, level: str = "INFO") -> None:
    if not _enabled(level):
        return
    line = f"[{time.strftime('%Y-%m-%d %H:%M:%S', time.localtime())}] [{level}] {msg}"
    try:
        # stdout 留给 JSON 输出
        print(line, file=sys.stderr, flush=True)
    except Exception:
        pass
    path = _log_path()
    if path is None:
        return
    with _file_lock:
        try:
            _rotate(path)
            with open(path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
        except Exception:
            pass


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:.4g}"


def log_verdict(index: int, name: str, passed: Optional[bool], statistic: Optional[float], threshold: Optional[float]) -> None:
    """每个查询点一行判定结果；passed=None 表示无有效尺度（不确定）."""
    if not getattr(config, "LOG_VERDICTS", True):
        return
    state = "不确定" if passed is None else ("通过" if passed else "未通过")
    log(f"点 #{index} {name}: {state} (统计量={_fmt(statistic)} 阈值={_fmt(threshold)})", level="RESULT")


def log_metrics(done: int, mean_ms: float, pending: int) -> None:
    log(f"METRICS points_done={done} mean_ms={mean_ms:.1f} pending={pending}", level="METRICS")


def log_lemma(name: str, samples: int, violations: int, worst_margin: float, passed: bool) -> None:
    state = "通过" if passed else "失败"
    log(
        f"引理检查 {name}: {state} (样本={samples} 违例={violations} 最差余量={worst_margin:.3e})",
        level="RESULT" if passed else "ERROR",
    )
