# -*- coding: utf-8 -*-
"""Agents：平面拟合、多尺度剖面、判据、Whitney 常数、点云生成与引理验证。"""
from agents.criteria import ClassifyParams, CriterionReport, classify
from agents.generators import GeneratorSpec, generate, generate_kind
from agents.multiscale import ModulusSequence, ScaleGrid, point_profile
from agents.plane_fit import fit_beta2, fit_betap
from agents.verify_suite import run_verify
from agents.whitney import JetData, whitney_constants

__all__ = [
    "ClassifyParams",
    "CriterionReport",
    "classify",
    "GeneratorSpec",
    "generate",
    "generate_kind",
    "ModulusSequence",
    "ScaleGrid",
    "point_profile",
    "fit_beta2",
    "fit_betap",
    "run_verify",
    "JetData",
    "whitney_constants",
]
