# -*- coding: utf-8 -*-
"""β 拟合结果缓存：LRU，避免同一 (x, r, p) 在剖面与诊断中重复拟合。"""
from __future__ import annotations

import threading
from collections import OrderedDict
from typing import Any, Callable, Hashable, Optional, Tuple

import numpy as np


def make_key(x: Any, r: float, p: float, quantile: float, seed: int) -> Tuple[Hashable, ...]:
    """坐标按字节参与键，保证与浮点打印精度无关。"""
    xb = np.ascontiguousarray(np.asarray(x, dtype=float)).tobytes()
    return (xb, float(r), float(p), float(quantile), int(seed))


class FitCache:
    """线程安全 LRU；值一旦写入不再修改。"""

    def __init__(self, max_size: int = 4096) -> None:
        self._data: "OrderedDict[Hashable, Any]" = OrderedDict()
        self._max_size = max(1, int(max_size))
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable) -> Optional[Any]:
        with self._lock:
            if key not in self._data:
                self.misses += 1
                return None
            value = self._data.pop(key)
            # 重新放到尾部，维持 LRU
            self._data[key] = value
            self.hits += 1
            return value

    def put(self, key: Hashable, value: Any) -> None:
        with self._lock:
            if key in self._data:
                self._data.pop(key)
            self._data[key] = value
            while len(self._data) > self._max_size:
                self._data.popitem(last=False)  # 弹出最老

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        """未命中时在锁外计算；并发重复计算结果相同，后写覆盖无害。"""
        value = self.get(key)
        if value is None:
            value = compute()
            self.put(key, value)
        return value

    def __len__(self) -> int:
        with self._lock:
            return len(self._data)
