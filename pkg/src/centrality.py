#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Centrality Module

Seven node-importance measures (degree, closeness, betweenness, eigenvector,
Katz, PageRank, expected force) and selection of the top fraction of nodes as
isolation targets. All measures are pure functions of an immutable Graph.
"""

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.sparse.linalg import eigsh

from errors import DegenerateGraphError, InvalidParamsError, NoConvergenceError
from graph_core import UNREACHABLE, Graph, all_pairs_distances


class Measure(str, Enum):
    """中心性指标 (枚举顺序即结果表的行顺序)"""
    DEGREE = "degree"
    CLOSENESS = "closeness"
    BETWEENNESS = "betweenness"
    EIGENVECTOR = "eigenvector"
    KATZ = "katz"
    PAGERANK = "pagerank"
    EXPECTED_FORCE = "expected_force"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "Measure":
        key = text.strip().lower()
        for measure in cls:
            if key in (measure.value, measure.label.lower()):
                return measure
        raise InvalidParamsError(
            f"unknown measure {text!r}, expected one of {[m.value for m in cls]}"
        )


_LABELS = {
    Measure.DEGREE: "Deg",
    Measure.CLOSENESS: "Clos",
    Measure.BETWEENNESS: "Bet",
    Measure.EIGENVECTOR: "Eig",
    Measure.KATZ: "Katz",
    Measure.PAGERANK: "Page",
    Measure.EXPECTED_FORCE: "Exf",
}


@dataclass(frozen=True, eq=False)
class CentralityScores:
    """节点中心性得分"""
    measure: Measure
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SolverSettings:
    """迭代求解器参数"""
    tolerance: float = 1e-10
    max_iterations: int = 10_000
    katz_alpha_fraction: float = 0.85
    pagerank_damping: float = 0.85

    def validate(self) -> None:
        errors = []
        if self.tolerance <= 0:
            errors.append("tolerance must be positive")
        if self.max_iterations < 1:
            errors.append("max_iterations must be >= 1")
        if not 0.0 < self.katz_alpha_fraction < 1.0:
            errors.append("katz_alpha_fraction must be in (0, 1)")
        if not 0.0 < self.pagerank_damping < 1.0:
            errors.append("pagerank_damping must be in (0, 1)")
        if errors:
            raise InvalidParamsError("; ".join(errors))


DEFAULT_SETTINGS = SolverSettings()


def degree_centrality(g: Graph) -> CentralityScores:
    return CentralityScores(Measure.DEGREE, g.degrees.astype(np.float64))


def closeness_centrality(g: Graph) -> CentralityScores:
    """
    接近中心性 (Wasserman-Faust 连通分量修正)

    values[i] = (r-1)/sum(dist) * (r-1)/(n-1), r 为 i 可达的节点数(含自身)
    """
    n = g.n
    values = np.zeros(n, dtype=np.float64)
    if n <= 1:
        return CentralityScores(Measure.CLOSENESS, values)

    dist = all_pairs_distances(g)
    for i in range(n):
        row = dist[i]
        reach = row != UNREACHABLE
        r = int(reach.sum())
        total = int(row[reach].sum())
        if r > 1 and total > 0:
            values[i] = (r - 1) / total * (r - 1) / (n - 1)
    return CentralityScores(Measure.CLOSENESS, values)


def betweenness_centrality(g: Graph) -> CentralityScores:
    """
    介数中心性 (Brandes 单源累积), 无序点对, 不归一化
    """
    n = g.n
    adjacency = g.adjacency
    cb = [0.0] * n

    for s in range(n):
        stack: List[int] = []
        preds: List[List[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        sigma[s] = 1
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])

        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adjacency[v]:
                if dist[w] < 0:
                    queue.append(w)
                    dist[w] = dist[v] + 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)

        # 按距离从远到近回溯依赖值
        delta = [0.0] * n
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]

    # 无向图中每个点对被两个端点各计一次
    values = np.asarray(cb, dtype=np.float64) / 2.0
    return CentralityScores(Measure.BETWEENNESS, values)


def eigenvector_centrality(g: Graph, settings: SolverSettings = DEFAULT_SETTINGS) -> CentralityScores:
    """
    特征向量中心性 (Bonacich): 邻接矩阵主特征向量, 单位欧氏长度

    对 A + I 做幂迭代: 特征向量与 A 相同, 二部图上也不会振荡。
    """
    settings.validate()
    if g.edge_count == 0:
        raise DegenerateGraphError("eigenvector centrality is undefined on an edgeless graph")

    a = g.adjacency_matrix()
    x = np.full(g.n, 1.0 / math.sqrt(g.n))
    residual = float("inf")
    for iteration in range(1, settings.max_iterations + 1):
        y = a @ x + x
        y /= np.linalg.norm(y)
        residual = float(np.max(np.abs(y - x)))
        x = y
        if residual < settings.tolerance:
            logger.debug(f"eigenvector converged in {iteration} iterations")
            return CentralityScores(Measure.EIGENVECTOR, x)

    raise NoConvergenceError(
        f"eigenvector centrality did not converge in {settings.max_iterations} iterations",
        iterate=x,
        residual=residual
    )


def spectral_radius(g: Graph) -> float:
    """邻接矩阵最大特征值"""
    if g.edge_count == 0:
        return 0.0
    a = g.adjacency_matrix()
    if g.n <= 1000:
        return float(np.linalg.eigvalsh(a.toarray())[-1])
    return float(eigsh(a, k=1, which="LA", return_eigenvectors=False)[0])


def katz_centrality(g: Graph, settings: SolverSettings = DEFAULT_SETTINGS) -> CentralityScores:
    """
    Katz 中心性: x = alpha * A x + 1, alpha = katz_alpha_fraction / lambda_max

    结果不归一化。
    """
    settings.validate()
    ones = np.ones(g.n, dtype=np.float64)
    lam = spectral_radius(g)
    if lam <= 0.0:
        return CentralityScores(Measure.KATZ, ones)

    alpha = settings.katz_alpha_fraction / lam
    a = g.adjacency_matrix()
    x = ones.copy()
    residual = float("inf")
    for iteration in range(1, settings.max_iterations + 1):
        y = alpha * (a @ x) + ones
        residual = float(np.max(np.abs(y - x)))
        x = y
        if residual < settings.tolerance:
            logger.debug(f"katz converged in {iteration} iterations (alpha={alpha:.6f})")
            return CentralityScores(Measure.KATZ, x)

    raise NoConvergenceError(
        f"katz centrality did not converge in {settings.max_iterations} iterations",
        iterate=x,
        residual=residual
    )


def pagerank(g: Graph, settings: SolverSettings = DEFAULT_SETTINGS) -> CentralityScores:
    """
    PageRank: 阻尼随机游走的平稳分布, 度为0的节点把质量均匀分给所有节点
    """
    settings.validate()
    n = g.n
    if n == 0:
        return CentralityScores(Measure.PAGERANK, np.zeros(0))

    d = settings.pagerank_damping
    a = g.adjacency_matrix()
    deg = g.degrees.astype(np.float64)
    dangling = deg == 0
    inv_deg = np.zeros(n)
    inv_deg[~dangling] = 1.0 / deg[~dangling]

    v = np.full(n, 1.0 / n)
    residual = float("inf")
    for iteration in range(1, settings.max_iterations + 1):
        new = (1.0 - d) / n + d * (a @ (v * inv_deg)) + d * v[dangling].sum() / n
        new /= new.sum()
        residual = float(np.abs(new - v).sum())
        v = new
        if residual < settings.tolerance:
            logger.debug(f"pagerank converged in {iteration} iterations")
            return CentralityScores(Measure.PAGERANK, v)

    raise NoConvergenceError(
        f"pagerank did not converge in {settings.max_iterations} iterations",
        iterate=v,
        residual=residual
    )


def _cluster_forces(g: Graph, i: int) -> List[int]:
    """节点 i 所有两步传播序列 (j, k) 对应簇 {i,j,k} 的外向边数"""
    nbrs = g.neighbor_sets
    deg = g.degrees
    forces = []
    for j in g.adjacency[i]:
        frontier = (nbrs[i] | nbrs[j]) - {i, j}
        for k in sorted(frontier):
            internal = 1 + (k in nbrs[i]) + (k in nbrs[j])
            forces.append(int(deg[i] + deg[j] + deg[k]) - 2 * internal)
    return forces


def expected_force(g: Graph) -> CentralityScores:
    """
    Expected force: 两步传播后簇外向边数归一化分布的熵 (自然对数)
    """
    values = np.zeros(g.n, dtype=np.float64)
    for i in range(g.n):
        forces = np.asarray(_cluster_forces(g, i), dtype=np.float64)
        total = forces.sum()
        if total <= 0:
            continue
        p = forces[forces > 0] / total
        values[i] = float(-(p * np.log(p)).sum())
    return CentralityScores(Measure.EXPECTED_FORCE, values)


def compute_centrality(
    g: Graph,
    measure: Measure,
    settings: SolverSettings = DEFAULT_SETTINGS
) -> CentralityScores:
    """按指标名分派"""
    if measure is Measure.DEGREE:
        return degree_centrality(g)
    if measure is Measure.CLOSENESS:
        return closeness_centrality(g)
    if measure is Measure.BETWEENNESS:
        return betweenness_centrality(g)
    if measure is Measure.EIGENVECTOR:
        return eigenvector_centrality(g, settings)
    if measure is Measure.KATZ:
        return katz_centrality(g, settings)
    if measure is Measure.PAGERANK:
        return pagerank(g, settings)
    if measure is Measure.EXPECTED_FORCE:
        return expected_force(g)
    raise InvalidParamsError(f"unsupported measure {measure!r}")


def all_centralities(
    g: Graph,
    measures: Optional[Sequence[Measure]] = None,
    settings: SolverSettings = DEFAULT_SETTINGS
) -> Dict[Measure, CentralityScores]:
    measures = list(Measure) if measures is None else measures
    return {m: compute_centrality(g, m, settings) for m in measures}


def selection_size(fraction: float, n: int) -> int:
    """round(fraction * n), 0.5 向上取整"""
    return int(math.floor(fraction * n + 0.5 + 1e-9))


def top_fraction(scores: CentralityScores, fraction: float, n: Optional[int] = None) -> Tuple[int, ...]:
    """
    选出得分最高的 round(fraction * n) 个节点

    Args:
        scores: 中心性得分
        fraction: 比例 [0, 1]
        n: 节点数,默认为得分向量长度

    Returns:
        按得分降序排列的节点编号, 同分时编号小者优先
    """
    if not 0.0 <= fraction <= 1.0:
        raise InvalidParamsError(f"fraction must be in [0, 1], got {fraction}")
    n = len(scores) if n is None else n
    k = min(selection_size(fraction, n), len(scores))
    if k == 0:
        return ()
    order = sorted(range(len(scores)), key=lambda i: (-scores.values[i], i))
    return tuple(order[:k])
