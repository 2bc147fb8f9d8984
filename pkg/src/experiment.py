#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Experiment Module

Monte Carlo harness: for every clustering level, calibrate the Holme-Kim
triad probability, generate replicate networks, and compare the baseline
infection curve against the curves obtained after isolating the top fraction
of nodes by each centrality measure. All measures are evaluated on the same
replicate graphs (paired design); curves are averaged per step across
replicates and peaks are taken from the mean curve.

Seed rule: replicate r at level l uses RngStream(master_seed).spawn(l).spawn(r).
"""

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from centrality import (
    DEFAULT_SETTINGS,
    Measure,
    SolverSettings,
    compute_centrality,
    top_fraction,
)
from epidemic import (
    GammaFit,
    InfectionCurve,
    aggregate_curve,
    curve_peak,
    fit_gamma,
    mean_curve,
)
from errors import DegenerateSampleError, EmptyCurveError, ExportError, InvalidParamsError, ParseError
from generators import GeneratorParams, calibrate_triad_probability, holme_kim
from graph_core import Graph, global_clustering_coefficient, isolate_nodes
from rng import RngStream

BASELINE = "None"
RESULT_SCHEMA_VERSION = 1
SEED_RULE = "replicate r at level l: RngStream(master_seed).spawn(l).spawn(r)"


class ExperimentConfig(BaseModel):
    """实验配置 (JSON 字段名与属性名一致, 不允许多余字段)"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(200, ge=2)
    m: int = Field(2, ge=1)
    replicates: int = Field(10, ge=1)
    gcc_targets: List[float] = Field(default_factory=lambda: [0.116, 0.156, 0.186, 0.192])
    isolation_fraction: float = Field(0.03, ge=0.0, lt=1.0)
    measures: List[Measure] = Field(default_factory=lambda: list(Measure))
    master_seed: int = Field(20230409, ge=0, lt=1 << 64)
    calibration_tolerance: float = Field(0.01, gt=0.0)
    calibration_samples: int = Field(20, ge=1)
    calibration_max_iterations: int = Field(30, ge=1)
    # 指定后跳过标定, 每个元素对应一个层级的 p_t
    triad_probabilities: Optional[List[float]] = None

    @field_validator("measures", mode="before")
    @classmethod
    def _parse_measures(cls, value):
        if value is None:
            return []
        parsed = []
        for item in value:
            if isinstance(item, str) and item.strip().lower() == "none":
                continue  # 基线总是包含在结果中
            measure = item if isinstance(item, Measure) else Measure.parse(str(item))
            if measure not in parsed:
                parsed.append(measure)
        # 统一按表格行顺序
        return sorted(parsed, key=list(Measure).index)

    @field_validator("gcc_targets")
    @classmethod
    def _check_targets(cls, value):
        for target in value:
            if not 0.0 <= target <= 1.0:
                raise ValueError(f"GCC target {target} outside [0, 1]")
        if len(set(value)) != len(value):
            raise ValueError("GCC targets must be distinct")
        return value

    @field_validator("triad_probabilities")
    @classmethod
    def _check_probabilities(cls, value):
        if value is not None:
            if not value:
                raise ValueError("triad_probabilities must not be empty")
            for p in value:
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"triad probability {p} outside [0, 1]")
        return value

    @model_validator(mode="after")
    def _check_sizes(self):
        if self.n < self.m + 1:
            raise ValueError(f"n must be >= m + 1 (n={self.n}, m={self.m})")
        if self.triad_probabilities is None and not self.gcc_targets:
            raise ValueError("either gcc_targets or triad_probabilities is required")
        return self

    @property
    def calibrated(self) -> bool:
        return self.triad_probabilities is None


@dataclass(frozen=True)
class LevelResult:
    """单个聚类层级的生成信息"""
    index: int
    triad_probability: float
    replicate_gcc: float
    gcc_target: Optional[float] = None
    calibrated_gcc: Optional[float] = None
    band: Optional[Tuple[float, float]] = None

    @property
    def key(self) -> float:
        """表格列键: 标定时为目标GCC, 否则为重复网络的平均GCC"""
        return self.gcc_target if self.gcc_target is not None else self.replicate_gcc

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["band"] = list(self.band) if self.band is not None else None
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LevelResult":
        band = tuple(data["band"]) if data.get("band") is not None else None
        return cls(**{**data, "band": band})


@dataclass(frozen=True, eq=False)
class CellResult:
    """(层级, 指标) 单元格"""
    gcc: float
    measure: str
    curve: InfectionCurve
    peak_t: int
    peak_count: float
    gamma: Optional[GammaFit]
    isolated: int

    def to_dict(self, baseline: Optional[InfectionCurve] = None) -> Dict[str, Any]:
        data = {
            "gcc": self.gcc,
            "measure": self.measure,
            "peak_t": self.peak_t,
            "peak_count": self.peak_count,
            "isolated": self.isolated,
            "gamma": self.gamma.to_dict() if self.gamma is not None else None,
            "curve": self.curve.to_dict(),
            "normalized": self.curve.normalized().tolist(),
        }
        if baseline is not None:
            data["normalized_by_baseline"] = self.curve.normalized(baseline.transmissions).tolist()
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CellResult":
        gamma = GammaFit(**data["gamma"]) if data.get("gamma") is not None else None
        return cls(
            gcc=data["gcc"],
            measure=data["measure"],
            curve=InfectionCurve.from_dict(data["curve"]),
            peak_t=data["peak_t"],
            peak_count=data["peak_count"],
            gamma=gamma,
            isolated=data["isolated"],
        )


@dataclass(eq=False)
class ExperimentResult:
    """实验结果"""
    config: ExperimentConfig
    settings: SolverSettings
    levels: List[LevelResult]
    cells: Dict[Tuple[float, str], CellResult] = field(default_factory=dict)

    @property
    def row_labels(self) -> List[str]:
        return [BASELINE] + [m.label for m in self.config.measures]

    @property
    def level_keys(self) -> List[float]:
        return [level.key for level in self.levels]

    def cell(self, gcc: float, row: str) -> CellResult:
        return self.cells[(gcc, row)]

    def to_dict(self) -> Dict[str, Any]:
        cells = []
        for key in self.level_keys:
            baseline = self.cells[(key, BASELINE)].curve
            for row in self.row_labels:
                cells.append(self.cells[(key, row)].to_dict(baseline))
        return {
            "provenance": {
                "schema_version": RESULT_SCHEMA_VERSION,
                "master_seed": self.config.master_seed,
                "seed_rule": SEED_RULE,
            },
            "config": self.config.model_dump(mode="json"),
            "solver": asdict(self.settings),
            "levels": [level.to_dict() for level in self.levels],
            "cells": cells,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentResult":
        config = ExperimentConfig.model_validate(data["config"])
        result = cls(
            config=config,
            settings=SolverSettings(**data["solver"]),
            levels=[LevelResult.from_dict(d) for d in data["levels"]],
        )
        for item in data["cells"]:
            cell = CellResult.from_dict(item)
            result.cells[(cell.gcc, cell.measure)] = cell
        return result


def _empty_curve() -> InfectionCurve:
    return InfectionCurve(counts=np.zeros(1, dtype=np.int64), unreachable_count=0, normalization=0)


def _evaluate_replicate(
    g: Graph,
    measures: Sequence[Measure],
    fraction: float,
    settings: SolverSettings
) -> Tuple[Dict[str, InfectionCurve], Dict[str, int]]:
    """单个网络: 基线 + 每个指标隔离后的聚合曲线"""
    curves = {BASELINE: aggregate_curve(g, range(g.n))}
    isolated = {BASELINE: 0}
    for measure in measures:
        # 按隔离前的重要性排序, 再切断连接
        scores = compute_centrality(g, measure, settings)
        targets = set(top_fraction(scores, fraction, g.n))
        sources = [v for v in range(g.n) if v not in targets]
        if not sources:
            curves[measure.label] = _empty_curve()
        else:
            curves[measure.label] = aggregate_curve(isolate_nodes(g, targets), sources)
        isolated[measure.label] = len(targets)
    return curves, isolated


def evaluate_replicates(
    graphs: Sequence[Graph],
    measures: Sequence[Measure],
    fraction: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
    workers: int = 1
) -> Tuple[Dict[str, InfectionCurve], Dict[str, int]]:
    """
    在同一组网络上评估基线与各指标 (配对设计)

    Args:
        graphs: 重复网络
        measures: 中心性指标
        fraction: 隔离比例
        settings: 求解器参数
        workers: 并行进程数, 1 表示串行

    Returns:
        (行标签 -> 平均曲线, 行标签 -> 每个网络隔离的节点数)
    """
    task = partial(_evaluate_replicate, measures=list(measures), fraction=fraction, settings=settings)
    if workers > 1 and len(graphs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(task, graphs))
    else:
        outputs = [task(g) for g in graphs]

    rows = [BASELINE] + [m.label for m in measures]
    means = {row: mean_curve([curves[row] for curves, _ in outputs]) for row in rows}
    isolated = outputs[0][1] if outputs else {row: 0 for row in rows}
    return means, isolated


def _make_cell(gcc: float, row: str, curve: InfectionCurve, isolated: int) -> CellResult:
    try:
        peak_t, peak_count = curve_peak(curve)
    except EmptyCurveError:
        # 隔离后没有任何传播: 峰值记为 0
        logger.warning(f"no transmissions left for {row} at GCC {gcc:.4f}, recording an empty peak")
        return CellResult(gcc=gcc, measure=row, curve=curve, peak_t=0, peak_count=0.0, gamma=None, isolated=isolated)
    try:
        gamma = fit_gamma(curve)
    except DegenerateSampleError:
        gamma = None
    return CellResult(
        gcc=gcc,
        measure=row,
        curve=curve,
        peak_t=peak_t,
        peak_count=float(peak_count),
        gamma=gamma,
        isolated=isolated,
    )


def run_experiment(
    config: ExperimentConfig,
    settings: SolverSettings = DEFAULT_SETTINGS,
    workers: int = 1
) -> ExperimentResult:
    """
    运行完整实验

    Args:
        config: 实验配置
        settings: 求解器参数
        workers: 并行进程数

    Returns:
        ExperimentResult

    Raises:
        UnreachableTargetError: 目标GCC无法通过标定达到
        InvalidParamsError: 两个层级落在同一个GCC列上
    """
    settings.validate()
    master = RngStream(config.master_seed)
    level_values = config.gcc_targets if config.calibrated else config.triad_probabilities

    levels: List[LevelResult] = []
    cells: Dict[Tuple[float, str], CellResult] = {}

    for index, level_value in enumerate(level_values):
        level_rng = master.spawn(index)
        if config.calibrated:
            calibration = calibrate_triad_probability(
                level_value,
                config.n,
                config.m,
                tol=config.calibration_tolerance,
                rng=level_rng,
                samples=config.calibration_samples,
                max_iterations=config.calibration_max_iterations,
            )
            p_t = calibration.triad_probability
        else:
            calibration = None
            p_t = level_value

        params = GeneratorParams(n=config.n, m=config.m, triad_probability=p_t)
        graphs = [holme_kim(params, level_rng.spawn(r)) for r in range(config.replicates)]
        gccs = [global_clustering_coefficient(g) for g in graphs]
        replicate_gcc = float(np.mean([x for x in gccs if x is not None])) if any(
            x is not None for x in gccs) else 0.0

        level = LevelResult(
            index=index,
            triad_probability=p_t,
            replicate_gcc=replicate_gcc,
            gcc_target=level_value if config.calibrated else None,
            calibrated_gcc=calibration.mean_gcc if calibration else None,
            band=calibration.band if calibration else None,
        )
        if level.gcc_target is not None and abs(replicate_gcc - level.gcc_target) >= config.calibration_tolerance:
            logger.warning(
                f"level {index}: replicate GCC {replicate_gcc:.4f} is outside "
                f"{level.gcc_target} +/- {config.calibration_tolerance}"
            )
        clash = next((lv for lv in levels if lv.key == level.key), None)
        if clash is not None:
            raise InvalidParamsError(
                f"levels {clash.index} and {index} both map to GCC {level.key!r}; "
                f"choose triad probabilities that give distinct clustering"
            )
        levels.append(level)
        logger.info(
            f"level {index}: p_t={p_t:.4f}, replicate GCC={replicate_gcc:.4f}, "
            f"evaluating {len(config.measures)} measures on {len(graphs)} networks"
        )

        means, isolated = evaluate_replicates(
            graphs, config.measures, config.isolation_fraction, settings, workers
        )
        for row, curve in means.items():
            cells[(level.key, row)] = _make_cell(level.key, row, curve, isolated[row])

    levels.sort(key=lambda lv: lv.key)
    return ExperimentResult(config=config, settings=settings, levels=levels, cells=cells)


@dataclass(frozen=True)
class PeakTable:
    """行 = 指标, 列 = GCC 层级"""
    rows: List[str]
    columns: List[float]
    cells: List[List[float]]

    def value(self, row: str, gcc: float) -> float:
        return self.cells[self.rows.index(row)][self.columns.index(gcc)]

    def format(self, precision: int = 1) -> str:
        header = ["GCC"] + [f"{c:.3f}" for c in self.columns]
        body = [[row] + [f"{v:.{precision}f}" for v in values] for row, values in zip(self.rows, self.cells)]
        widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
        lines = []
        for r in [header] + body:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(r, widths)))
        return "\n".join(lines)


def peak_table(result: ExperimentResult) -> PeakTable:
    """峰值表: None, Deg, Clos, Bet, Eig, Katz, Page, Exf × 升序GCC"""
    columns = result.level_keys
    rows = result.row_labels
    cells = [[result.cells[(gcc, row)].peak_count for gcc in columns] for row in rows]
    return PeakTable(rows=rows, columns=columns, cells=cells)


def reduction_table(result: ExperimentResult) -> PeakTable:
    """相对峰值下降 (None - measure) / None"""
    table = peak_table(result)
    baseline = table.cells[0]
    cells = [
        [(b - v) / b if b > 0 else 0.0 for b, v in zip(baseline, values)]
        for values in table.cells[1:]
    ]
    return PeakTable(rows=table.rows[1:], columns=table.columns, cells=cells)


def _fmt(value: float) -> str:
    return repr(float(value))


def export(result: ExperimentResult, fmt: str, path: Union[str, Path]) -> List[Path]:
    """
    导出实验结果

    Args:
        result: 实验结果
        fmt: "csv" (path 为目录, 写 curves.csv / peaks.csv / reductions.csv)
             或 "json" (path 为文件)
        path: 输出路径

    Returns:
        写出的文件列表
    """
    path = Path(path)
    try:
        if fmt == "json":
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8") as f:
                json.dump(result.to_dict(), f, indent=2)
                f.write("\n")
            return [path]

        if fmt == "csv":
            path.mkdir(parents=True, exist_ok=True)
            curves_path = path / "curves.csv"
            peaks_path = path / "peaks.csv"
            reductions_path = path / "reductions.csv"

            with open(curves_path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(["gcc", "measure", "t", "mean_count", "normalized"])
                for gcc in result.level_keys:
                    for row in result.row_labels:
                        curve = result.cells[(gcc, row)].curve
                        normalized = curve.normalized()
                        for t, count in enumerate(curve.counts):
                            writer.writerow([_fmt(gcc), row, t, _fmt(count), _fmt(normalized[t])])

            with open(peaks_path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(["gcc", "measure", "peak_t", "peak_count"])
                for gcc in result.level_keys:
                    for row in result.row_labels:
                        cell = result.cells[(gcc, row)]
                        writer.writerow([_fmt(gcc), row, cell.peak_t, _fmt(cell.peak_count)])

            reductions = reduction_table(result)
            with open(reductions_path, "w", encoding="utf-8", newline="") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(["gcc", "measure", "relative_reduction"])
                for j, gcc in enumerate(reductions.columns):
                    for i, row in enumerate(reductions.rows):
                        writer.writerow([_fmt(gcc), row, _fmt(reductions.cells[i][j])])

            return [curves_path, peaks_path, reductions_path]

    except OSError as e:
        raise ExportError(f"cannot write {fmt} export to {path}: {e}") from e

    raise InvalidParamsError(f"unknown export format {fmt!r}, expected 'csv' or 'json'")


def load_result(path: Union[str, Path]) -> ExperimentResult:
    """读取 JSON 导出"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise ExportError(f"cannot read result {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON in {path}: {e.msg}", e.lineno) from e
    return ExperimentResult.from_dict(data)
