#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Network Generators Module

Scale-free social networks by preferential attachment (Barabasi-Albert) and
by preferential attachment with triad formation (Holme-Kim), plus bisection
calibration of the triad probability against a target global clustering
coefficient.

Both models start from a complete graph on m+1 nodes; every later node adds m
distinct edges, so edge count = C(m+1, 2) + (n - m - 1) * m.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np
from loguru import logger

from errors import DegenerateGraphError, InvalidParamsError, UnreachableTargetError
from graph_core import Graph, global_clustering_coefficient
from rng import RngStream

MODELS = ("ba", "hk")


@dataclass(frozen=True)
class GeneratorParams:
    """生成器参数"""
    n: int
    m: int = 2
    triad_probability: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        errors = []
        if self.m < 1:
            errors.append(f"m must be >= 1, got {self.m}")
        if self.n < self.m + 1:
            errors.append(f"n must be >= m + 1, got n={self.n}, m={self.m}")
        if not 0.0 <= self.triad_probability <= 1.0:
            errors.append(f"triad probability must be in [0, 1], got {self.triad_probability}")
        if not 0 <= self.seed < (1 << 64):
            errors.append(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if errors:
            raise InvalidParamsError("; ".join(errors))

    def rng(self) -> RngStream:
        return RngStream(self.seed)


class PreferentialPool:
    """
    按度数比例抽样的节点池

    每条边的两个端点各入池一次,均匀抽取池元素即等价于按度数加权抽样。
    """

    def __init__(self):
        self._pool: List[int] = []
        self._nodes: Set[int] = set()

    @classmethod
    def from_graph(cls, g: Graph) -> "PreferentialPool":
        pool = cls()
        for u, v in g.edges():
            pool.add_edge(u, v)
        return pool

    def add_edge(self, u: int, v: int) -> None:
        self._pool.append(u)
        self._pool.append(v)
        self._nodes.add(u)
        self._nodes.add(v)

    def __len__(self) -> int:
        return len(self._pool)

    def draw(self, rng: RngStream, exclude: Set[int]) -> int:
        """抽取一个不在 exclude 中的节点 (拒绝采样)"""
        if len(exclude) >= len(self._nodes) and self._nodes <= exclude:
            raise DegenerateGraphError("no eligible node left for preferential attachment")
        while True:
            node = self._pool[rng.randrange(len(self._pool))]
            if node not in exclude:
                return node


def attachment_probabilities(g: Graph) -> np.ndarray:
    """新节点连接到各现有节点的概率 (与度数成正比)"""
    d = g.degrees.astype(np.float64)
    total = d.sum()
    if total == 0:
        raise DegenerateGraphError("graph has no edges")
    return d / total


def _grow(params: GeneratorParams, rng: RngStream) -> Graph:
    n, m, p_t = params.n, params.m, params.triad_probability
    adj: List[Set[int]] = [set() for _ in range(n)]
    pool = PreferentialPool()

    # 初始完全图 K_{m+1}
    for u in range(m + 1):
        for v in range(u + 1, m + 1):
            adj[u].add(v)
            adj[v].add(u)
            pool.add_edge(u, v)

    for new in range(m + 1, n):
        chosen: List[int] = []
        chosen_set: Set[int] = set()
        pivot: Optional[int] = None

        while len(chosen) < m:
            target = None
            # p_t == 0 时不消耗随机数, 保证与BA模型输出一致
            if pivot is not None and p_t > 0.0 and rng.random() < p_t:
                candidates = [u for u in sorted(adj[pivot]) if u not in chosen_set]
                if candidates:
                    target = rng.choice(candidates)
            if target is None:
                target = pool.draw(rng, chosen_set)
                pivot = target
            chosen.append(target)
            chosen_set.add(target)

        for t in chosen:
            adj[new].add(t)
            adj[t].add(new)
            pool.add_edge(t, new)

    return Graph(n=n, adjacency=tuple(tuple(sorted(s)) for s in adj))


def barabasi_albert(params: GeneratorParams, rng: Optional[RngStream] = None) -> Graph:
    """
    Barabasi-Albert 优先连接模型

    Args:
        params: 生成参数 (triad_probability 被忽略)
        rng: 随机流,默认由 params.seed 创建

    Returns:
        连通简单图
    """
    params.validate()
    ba_params = GeneratorParams(n=params.n, m=params.m, triad_probability=0.0, seed=params.seed)
    return _grow(ba_params, rng or params.rng())


def holme_kim(params: GeneratorParams, rng: Optional[RngStream] = None) -> Graph:
    """
    Holme-Kim 模型: 优先连接 + 三元闭包

    新节点的第一条边做优先连接; 之后每条边以概率 p_t 连到最近一次优先连接
    目标的随机邻居 (形成三角形),邻居用尽时退回优先连接。

    Args:
        params: 生成参数
        rng: 随机流,默认由 params.seed 创建

    Returns:
        连通简单图
    """
    params.validate()
    return _grow(params, rng or params.rng())


def generate(model: str, params: GeneratorParams, rng: Optional[RngStream] = None) -> Graph:
    if model == "ba":
        return barabasi_albert(params, rng)
    if model == "hk":
        return holme_kim(params, rng)
    raise InvalidParamsError(f"unknown model {model!r}, expected one of {MODELS}")


def mean_gcc(n: int, m: int, triad_probability: float, rng: RngStream, samples: int = 20) -> float:
    """
    Holme-Kim 图的平均全局聚类系数

    第 i 个样本固定使用 rng.spawn(i), 不同 p_t 之间共用同一组随机流。
    """
    values = []
    for i in range(samples):
        params = GeneratorParams(n=n, m=m, triad_probability=triad_probability)
        gcc = global_clustering_coefficient(holme_kim(params, rng.spawn(i)))
        if gcc is not None:
            values.append(gcc)
    if not values:
        raise DegenerateGraphError(f"no sampled graph has a connected triplet (n={n}, m={m})")
    return float(np.mean(values))


@dataclass(frozen=True)
class CalibrationResult:
    """p_t 标定结果"""
    target_gcc: float
    triad_probability: float
    mean_gcc: float
    band: Tuple[float, float]
    iterations: int


def calibrate_triad_probability(
    target_gcc: float,
    n: int,
    m: int,
    tol: float = 0.01,
    rng: Optional[RngStream] = None,
    samples: int = 20,
    max_iterations: int = 30
) -> CalibrationResult:
    """
    二分搜索 p_t 使平均GCC落在目标值 tol 范围内

    Args:
        target_gcc: 目标全局聚类系数
        n: 节点数
        m: 每个新节点的边数
        tol: 容差
        rng: 随机流
        samples: 每次评估的样本图数量
        max_iterations: 最大二分次数

    Returns:
        CalibrationResult

    Raises:
        UnreachableTargetError: 目标超出 [GCC(p_t=0), GCC(p_t=1)] 范围
    """
    GeneratorParams(n=n, m=m).validate()
    if tol <= 0:
        raise InvalidParamsError(f"tolerance must be positive, got {tol}")
    rng = rng or RngStream(0)

    low_gcc = mean_gcc(n, m, 0.0, rng, samples)
    high_gcc = mean_gcc(n, m, 1.0, rng, samples)
    band = (low_gcc, high_gcc)
    logger.debug(f"calibration band for n={n}, m={m}: [{low_gcc:.4f}, {high_gcc:.4f}]")

    if target_gcc < low_gcc - tol or target_gcc > high_gcc + tol:
        raise UnreachableTargetError(target_gcc, band)
    if target_gcc <= low_gcc:
        return CalibrationResult(target_gcc, 0.0, low_gcc, band, 0)
    if target_gcc >= high_gcc:
        return CalibrationResult(target_gcc, 1.0, high_gcc, band, 0)

    lo, hi = 0.0, 1.0
    best_p, best_gcc = (0.0, low_gcc) if target_gcc - low_gcc < high_gcc - target_gcc else (1.0, high_gcc)
    iterations = 0
    # 先收敛到 tol/4, 为重复采样留出余量
    while iterations < max_iterations:
        iterations += 1
        mid = 0.5 * (lo + hi)
        gcc = mean_gcc(n, m, mid, rng, samples)
        logger.debug(f"  iter {iterations}: p_t={mid:.6f} -> GCC={gcc:.4f}")
        if abs(gcc - target_gcc) < abs(best_gcc - target_gcc):
            best_p, best_gcc = mid, gcc
        if abs(gcc - target_gcc) < tol / 4:
            break
        if gcc < target_gcc:
            lo = mid
        else:
            hi = mid

    if abs(best_gcc - target_gcc) >= tol:
        raise UnreachableTargetError(target_gcc, band)

    logger.info(f"calibrated p_t={best_p:.4f} for target GCC {target_gcc} (mean {best_gcc:.4f})")
    return CalibrationResult(target_gcc, best_p, best_gcc, band, iterations)


def ccdf_slope(degrees: Sequence[int], low: int, high: int) -> float:
    """
    度分布互补累积函数在 [low, high] 上的双对数斜率 (最小二乘)

    Returns:
        斜率 (幂律尾部为负值)
    """
    d = np.asarray(degrees, dtype=np.int64)
    ks = np.arange(low, high + 1)
    ccdf = np.array([np.mean(d >= k) for k in ks])
    mask = ccdf > 0
    if mask.sum() < 2:
        raise DegenerateGraphError(f"fewer than two degrees observed in [{low}, {high}]")
    slope, _ = np.polyfit(np.log(ks[mask]), np.log(ccdf[mask]), 1)
    return float(slope)
