# -*- coding: utf-8 -*-
"""测试公共夹具：小规模确定性点云；日志只写 stderr。"""
import math
import os
import sys

_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if _ROOT not in sys.path:
    sys.path.insert(0, _ROOT)

import numpy as np
import pytest

import config

config.LOG_TO_FILE = False
config.LOG_VERDICTS = False

from agents.multiscale import ScaleGrid
from tools.cloud import WeightedCloud


@pytest.fixture(autouse=True)
def _quiet_logs(monkeypatch):
    monkeypatch.setattr(config, "LOG_TO_FILE", False)
    monkeypatch.setattr(config, "LOG_VERDICTS", False)


@pytest.fixture
def circle_cloud():
    """单位圆上 400 个等距点，弧长权重。"""
    N = 400
    th = 2.0 * math.pi * np.arange(N) / N
    P = np.column_stack([np.cos(th), np.sin(th)])
    return WeightedCloud(P, np.full(N, 2.0 * math.pi / N), 1)


@pytest.fixture
def segment_cloud():
    """[-1,1]×{0} 上 401 个等距点，原点是第 200 个点。"""
    t = np.linspace(-1.0, 1.0, 401)
    P = np.column_stack([t, np.zeros_like(t)])
    return WeightedCloud(P, np.full(t.size, t[1] - t[0]), 1)


@pytest.fixture
def corner_cloud():
    """y = |t| 的直角折线，顶点 (0,0) 是第 200 个点。"""
    t = np.linspace(-1.0, 1.0, 401)
    P = np.column_stack([t, np.abs(t)])
    return WeightedCloud(P, np.full(t.size, (t[1] - t[0]) * math.sqrt(2.0)), 1)


@pytest.fixture
def small_grid():
    return ScaleGrid(0.5, 0.5, 2)
