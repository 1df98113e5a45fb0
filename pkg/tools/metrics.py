# -*- coding: utf-8 -*-
"""轻量指标：已完成查询点数、单点耗时、剩余任务数，供日志周期输出."""
from __future__ import annotations

import threading
import time


class Metrics:
    """线程安全：工作线程调用 record_point，主线程周期调用 snapshot。"""
    def __init__(self, total: int = 0):
        self._lock = threading.Lock()
        self._total = max(0, int(total))
        self._done = 0
        self._elapsed_ms = 0.0
        self._last_log = time.monotonic()

    def record_point(self, ms: float) -> None:
        with self._lock:
            self._done += 1
            self._elapsed_ms += float(ms)

    def snapshot(self) -> tuple[int, float, int]:
        """返回 (已完成数, 平均毫秒, 剩余数)."""
        with self._lock:
            done = self._done
            mean = self._elapsed_ms / done if done else 0.0
            return done, mean, max(0, self._total - done)

    def due(self, interval_sec: float) -> bool:
        """距上次输出超过 interval_sec 时返回 True 并重置计时."""
        with self._lock:
            now = time.monotonic()
            if now - self._last_log >= interval_sec:
                self._last_log = now
                return True
            return False
