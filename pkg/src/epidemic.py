#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Epidemic Curve Module

SI cascade with transmission probability ~1: every infected node infects all
of its neighbours at the next step, so a node's infection time equals its hop
distance from the seed. The infection curve is the histogram of those
distances; gamma fit and peak extraction characterise it.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from errors import DegenerateSampleError, EmptyCurveError, InvalidParamsError
from graph_core import UNREACHABLE, Graph, all_pairs_distances, bfs_distances


@dataclass(frozen=True, eq=False)
class InfectionCurve:
    """
    感染曲线

    counts[t] 为第 t 步新感染的节点数 (多源时按源累加), counts[0] 为源节点数。
    """
    counts: np.ndarray
    unreachable_count: float
    normalization: float

    @property
    def duration(self) -> int:
        return len(self.counts) - 1

    @property
    def transmissions(self) -> float:
        """t >= 1 的有限距离感染总数"""
        return float(self.counts[1:].sum())

    def count(self, t: int) -> float:
        return self.counts[t] if 0 <= t < len(self.counts) else 0

    def to_mapping(self) -> Dict[int, Any]:
        return {t: c.item() for t, c in enumerate(self.counts)}

    def normalized(self, denominator: Optional[float] = None) -> np.ndarray:
        """
        归一化曲线 (t >= 1 上的概率质量函数, t = 0 处为 0)

        Args:
            denominator: 归一化分母, 默认为本曲线的 transmissions
        """
        total = self.transmissions if denominator is None else denominator
        out = np.zeros(len(self.counts), dtype=np.float64)
        if total > 0:
            out[1:] = self.counts[1:] / total
        return out

    def mean_distance(self) -> float:
        total = self.transmissions
        if total <= 0:
            raise EmptyCurveError("curve has no infections at t >= 1")
        t = np.arange(len(self.counts))
        return float((self.counts[1:] * t[1:]).sum() / total)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "counts": [c.item() for c in self.counts],
            "unreachable_count": _plain(self.unreachable_count),
            "normalization": _plain(self.normalization),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "InfectionCurve":
        counts = data["counts"]
        dtype = np.int64 if all(isinstance(c, int) for c in counts) else np.float64
        return cls(
            counts=np.asarray(counts, dtype=dtype),
            unreachable_count=data["unreachable_count"],
            normalization=data["normalization"],
        )


def _plain(value):
    return value.item() if isinstance(value, np.generic) else value


@dataclass(frozen=True)
class GammaFit:
    """矩估计得到的伽马分布"""
    shape: float
    scale: float

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale * self.scale

    @property
    def mode(self) -> float:
        return max(self.shape - 1.0, 0.0) * self.scale

    def pdf(self, t) -> np.ndarray:
        return stats.gamma.pdf(t, a=self.shape, scale=self.scale)

    def to_dict(self) -> Dict[str, float]:
        return {"shape": self.shape, "scale": self.scale}


def curve_from_distances(distances: np.ndarray) -> InfectionCurve:
    """由距离矩阵(或向量)统计感染曲线"""
    finite = distances[distances != UNREACHABLE]
    counts = np.bincount(finite, minlength=1).astype(np.int64)
    unreachable = int(distances.size - finite.size)
    return InfectionCurve(
        counts=counts,
        unreachable_count=unreachable,
        normalization=int(counts.sum())
    )


def infection_histogram(g: Graph, source: int) -> InfectionCurve:
    """
    单源感染曲线

    Args:
        g: 图
        source: 初始感染节点

    Returns:
        InfectionCurve, counts[t] = 与源距离为 t 的节点数
    """
    dist = np.asarray(bfs_distances(g, source).dist, dtype=np.int64)
    return curve_from_distances(dist)


def aggregate_curve(g: Graph, sources: Sequence[int]) -> InfectionCurve:
    """
    多源感染曲线: 各源直方图逐项相加

    Args:
        g: 图
        sources: 初始感染节点序列 (非空)
    """
    if len(sources) == 0:
        raise InvalidParamsError("aggregate_curve needs at least one source")
    return curve_from_distances(all_pairs_distances(g, sources))


def mean_curve(curves: Sequence[InfectionCurve]) -> InfectionCurve:
    """蒙特卡洛平均: 按 t 对齐(补零)后逐项取均值"""
    if not curves:
        raise InvalidParamsError("mean_curve needs at least one curve")
    length = max(len(c.counts) for c in curves)
    total = np.zeros(length, dtype=np.float64)
    unreachable = 0.0
    normalization = 0.0
    # 固定顺序累加, 保证结果可复现
    for c in curves:
        total[:len(c.counts)] += c.counts
        unreachable += float(c.unreachable_count)
        normalization += float(c.normalization)
    k = len(curves)
    return InfectionCurve(
        counts=total / k,
        unreachable_count=unreachable / k,
        normalization=normalization / k
    )


def fit_gamma(curve: InfectionCurve) -> GammaFit:
    """
    伽马分布矩估计 (只使用 t >= 1)

    shape = mu^2 / var, scale = var / mu

    Raises:
        DegenerateSampleError: 样本为空或方差为0
    """
    t = np.arange(len(curve.counts), dtype=np.float64)[1:]
    w = np.asarray(curve.counts[1:], dtype=np.float64)
    total = w.sum()
    if total <= 0:
        raise DegenerateSampleError("no distances at t >= 1 to fit")

    mu = float((w * t).sum() / total)
    var = float((w * (t - mu) ** 2).sum() / total)
    if var <= 1e-12 * mu * mu:
        raise DegenerateSampleError(f"zero variance sample (all distances = {mu:g})")
    return GammaFit(shape=mu * mu / var, scale=var / mu)


def curve_peak(curve: InfectionCurve) -> Tuple[int, Any]:
    """
    曲线峰值 (只考虑 t >= 1, 并列时取较小的 t)

    Returns:
        (t_peak, peak_count)
    """
    tail = curve.counts[1:]
    if len(tail) == 0 or tail.max() <= 0:
        raise EmptyCurveError("curve has no infections at t >= 1")
    t = int(np.argmax(tail)) + 1
    return t, curve.counts[t].item()


@dataclass(frozen=True)
class CapacityReport:
    """医疗容量线对比"""
    capacity: float
    steps_above: int
    first_step_above: Optional[int]
    peak_excess: float

    @property
    def under_capacity(self) -> bool:
        return self.steps_above == 0


def capacity_exceedance(curve: InfectionCurve, capacity: float) -> CapacityReport:
    """统计 t >= 1 上超过容量线的步数及超出量"""
    if capacity < 0:
        raise InvalidParamsError(f"capacity must be non-negative, got {capacity}")
    tail = np.asarray(curve.counts[1:], dtype=np.float64)
    above: List[int] = [int(i) + 1 for i in np.flatnonzero(tail > capacity)]
    excess = float(max(tail.max() - capacity, 0.0)) if len(tail) else 0.0
    return CapacityReport(
        capacity=capacity,
        steps_above=len(above),
        first_step_above=above[0] if above else None,
        peak_excess=excess
    )
