# -*- coding: utf-8 -*-
"""线程安全结果槽：工作线程按查询点序号写入，主线程在全部完成后按序读取，聚合与调度顺序无关"""
from __future__ import annotations

import threading
from typing import Any, List, Optional, Tuple


class ResultSlots:
    """每个查询点一个槽；槽里放结果或异常。"""

    def __init__(self, size: int):
        self._lock = threading.Lock()
        self._values: List[Any] = [None] * int(size)
        self._errors: List[Optional[BaseException]] = [None] * int(size)
        self._filled = 0

    def set_result(self, slot: int, value: Any) -> None:
        with self._lock:
            self._values[slot] = value
            self._filled += 1

    def set_error(self, slot: int, error: BaseException) -> None:
        with self._lock:
            self._errors[slot] = error
            self._filled += 1

    @property
    def filled(self) -> int:
        with self._lock:
            return self._filled

    def first_error(self) -> Optional[Tuple[int, BaseException]]:
        """按槽序号最小的异常，保证多线程下报错内容确定。"""
        with self._lock:
            for i, e in enumerate(self._errors):
                if e is not None:
                    return i, e
            return None

    def results(self) -> List[Any]:
        with self._lock:
            return list(self._values)

    def __len__(self) -> int:
        return len(self._values)
