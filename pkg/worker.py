# -*- coding: utf-8 -*-
"""
逐点任务执行：查询点在线程池里并行评估，结果写入按序号的槽；
点云与拟合缓存只读共享，周期输出进度指标，任一点失败时在全部结束后抛出序号最小的那个异常。
"""
from __future__ import annotations

import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from typing import Callable, List, Optional, Sequence, TypeVar

import config
from shared_state import ResultSlots
from tools.logger_util import log, log_metrics
from tools.metrics import Metrics

T = TypeVar("T")
R = TypeVar("R")


def _run_one(slots: ResultSlots, slot: int, item: T, fn: Callable[[T], R], metrics: Metrics) -> None:
    t0 = time.perf_counter()
    try:
        slots.set_result(slot, fn(item))
    except Exception as e:
        slots.set_error(slot, e)
    finally:
        metrics.record_point((time.perf_counter() - t0) * 1000.0)


def run_point_tasks(items: Sequence[T], fn: Callable[[T], R], threads: Optional[int] = None) -> List[R]:
    """threads ≤ 1 时在当前线程顺序执行；返回值顺序与 items 一致。"""
    threads = int(getattr(config, "WORKER_THREADS", 1) if threads is None else threads)
    interval = float(getattr(config, "METRICS_LOG_INTERVAL_SEC", 30))
    slots = ResultSlots(len(items))
    metrics = Metrics(len(items))
    if threads <= 1:
        for i, item in enumerate(items):
            _run_one(slots, i, item, fn, metrics)
            if metrics.due(interval):
                log_metrics(*metrics.snapshot())
    else:
        with ThreadPoolExecutor(max_workers=threads, thread_name_prefix="rectiscope") as pool:
            pending = {pool.submit(_run_one, slots, i, item, fn, metrics) for i, item in enumerate(items)}
            while pending:
                _, pending = wait(pending, timeout=max(0.1, interval), return_when=FIRST_COMPLETED)
                if metrics.due(interval):
                    log_metrics(*metrics.snapshot())
    log_metrics(*metrics.snapshot())
    err = slots.first_error()
    if err is not None:
        slot, e = err
        log(f"查询点任务 #{slot} 失败: {e}", level="ERROR")
        raise e
    return slots.results()
