# -*- coding: utf-8 -*-
import time

import pytest

from shared_state import ResultSlots
from tools.metrics import Metrics
from worker import run_point_tasks


def test_results_keep_item_order_with_threads():
    def slow_square(i):
        time.sleep(0.001 * (5 - i % 5))
        return i * i

    assert run_point_tasks(list(range(20)), slow_square, threads=4) == [i * i for i in range(20)]


def test_sequential_when_single_thread():
    seen = []
    run_point_tasks([3, 1, 2], seen.append, threads=1)
    assert seen == [3, 1, 2]


def test_lowest_failing_slot_is_raised():
    def fn(i):
        if i in (2, 5):
            raise ValueError(f"bad {i}")
        return i

    with pytest.raises(ValueError, match="bad 2"):
        run_point_tasks(list(range(8)), fn, threads=3)


def test_result_slots():
    slots = ResultSlots(3)
    slots.set_result(2, "c")
    slots.set_error(0, RuntimeError("x"))
    assert slots.filled == 2
    assert slots.first_error()[0] == 0
    assert slots.results() == [None, None, "c"]


def test_metrics_snapshot():
    m = Metrics(total=4)
    m.record_point(10.0)
    m.record_point(30.0)
    assert m.snapshot() == (2, 20.0, 2)
    assert m.due(0.0)
