# -*- coding: utf-8 -*-
"""工具：几何原语、加权点云、常数、文件读写、报告模型、日志与指标。"""
from tools.cloud import WeightedCloud
from tools.errors import InputError, ParseError, RectiscopeError
from tools.file_util import read_cloud, write_cloud, read_json, write_json
from tools.geometry import AffinePlane, LinearPlane, grassmann_distance
from tools.logger_util import log, log_metrics, log_verdict
from tools.metrics import Metrics

__all__ = [
    "WeightedCloud",
    "InputError",
    "ParseError",
    "RectiscopeError",
    "read_cloud",
    "write_cloud",
    "read_json",
    "write_json",
    "AffinePlane",
    "LinearPlane",
    "grassmann_distance",
    "log",
    "log_metrics",
    "log_verdict",
    "Metrics",
]
