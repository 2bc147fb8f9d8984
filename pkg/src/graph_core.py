#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Graph Core Module

Immutable undirected simple graph over dense node ids 0..n-1, plus the
structural primitives the rest of the pipeline consumes: degree, BFS
distances, node isolation, global clustering coefficient and edge-list IO.

Edge-list format:
    n <count>
    u v
    ...
"""

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from errors import ExportError, OutOfRangeError, ParseError, SelfLoopError

UNREACHABLE = -1


@dataclass(frozen=True)
class Graph:
    """无向简单图 (邻接表按升序存储)"""
    n: int
    adjacency: Tuple[Tuple[int, ...], ...]

    def degree(self, i: int) -> int:
        _check_node(self, i)
        return len(self.adjacency[i])

    def neighbors(self, i: int) -> Tuple[int, ...]:
        _check_node(self, i)
        return self.adjacency[i]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)

    @property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> List[Tuple[int, int]]:
        """返回所有边 (u < v),按字典序"""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    @cached_property
    def neighbor_sets(self) -> Tuple[frozenset, ...]:
        return tuple(frozenset(a) for a in self.adjacency)

    def adjacency_matrix(self) -> sparse.csr_matrix:
        """0/1 邻接矩阵 (CSR)"""
        return self._csr

    @cached_property
    def _csr(self) -> sparse.csr_matrix:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter(
            (v for row in self.adjacency for v in row),
            dtype=np.int64,
            count=int(indptr[-1])
        )
        data = np.ones(len(indices), dtype=np.float64)
        return sparse.csr_matrix((data, indices, indptr), shape=(self.n, self.n))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class DistanceMap:
    """单源BFS距离, 不可达为 UNREACHABLE"""
    source: int
    dist: Tuple[int, ...]

    def reachable(self) -> List[int]:
        return [v for v, d in enumerate(self.dist) if d != UNREACHABLE]


def _check_node(g: Graph, i: int) -> None:
    if not 0 <= i < g.n:
        raise OutOfRangeError(f"node {i} outside [0, {g.n})")


def build_graph(n: int, edges: Iterable[Tuple[int, int]]) -> Graph:
    """
    由边列表构造图,重复边合并

    Args:
        n: 节点数
        edges: (u, v) 边序列

    Returns:
        Graph对象
    """
    if n < 0:
        raise OutOfRangeError(f"node count must be non-negative, got {n}")

    neighbor_sets: List[Set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not 0 <= u < n or not 0 <= v < n:
            raise OutOfRangeError(f"edge ({u}, {v}) has endpoint outside [0, {n})")
        if u == v:
            raise SelfLoopError(f"self-loop on node {u}")
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)

    return Graph(n=n, adjacency=tuple(tuple(sorted(s)) for s in neighbor_sets))


def degree(g: Graph, i: int) -> int:
    return g.degree(i)


def bfs_distances(g: Graph, source: int) -> DistanceMap:
    """
    无权最短路 (跳数)

    Args:
        g: 图
        source: 源节点

    Returns:
        DistanceMap
    """
    _check_node(g, source)
    dist = [UNREACHABLE] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in g.adjacency[u]:
            if dist[v] == UNREACHABLE:
                dist[v] = du
                queue.append(v)
    return DistanceMap(source=source, dist=tuple(dist))


def all_pairs_distances(g: Graph, sources: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    多源BFS距离矩阵, 行对应 sources

    Args:
        g: 图
        sources: 源节点列表,默认全部节点

    Returns:
        int64 矩阵 (len(sources), n), 不可达为 UNREACHABLE
    """
    if sources is None:
        sources = range(g.n)
    indices = np.asarray(list(sources), dtype=np.int64)
    for s in indices:
        _check_node(g, int(s))
    if len(indices) == 0 or g.n == 0:
        return np.empty((len(indices), g.n), dtype=np.int64)

    raw = csgraph.shortest_path(
        g.adjacency_matrix(),
        method="D",
        directed=False,
        unweighted=True,
        indices=indices
    )
    result = np.full(raw.shape, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(raw)
    result[finite] = raw[finite].astype(np.int64)
    return result


def isolate_nodes(g: Graph, targets: Iterable[int]) -> Graph:
    """
    切断目标节点的所有边,节点编号保持不变

    Args:
        g: 原图
        targets: 需要隔离的节点

    Returns:
        新的Graph
    """
    cut = set(targets)
    for t in cut:
        _check_node(g, t)
    if not cut:
        return g

    adjacency = tuple(
        () if u in cut else tuple(v for v in row if v not in cut)
        for u, row in enumerate(g.adjacency)
    )
    return Graph(n=g.n, adjacency=adjacency)


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    count, _ = csgraph.connected_components(g.adjacency_matrix(), directed=False)
    return count == 1


def triangle_count(g: Graph) -> int:
    a = g.adjacency_matrix()
    return int(round((a @ a).multiply(a).sum())) // 6


def connected_triplet_count(g: Graph) -> int:
    d = g.degrees
    return int((d * (d - 1) // 2).sum())


def global_clustering_coefficient(g: Graph) -> Optional[float]:
    """
    全局聚类系数 = 3 * 三角形数 / 连通三元组数

    Returns:
        [0, 1] 之间的比值; 不存在三元组时返回None (未定义,区别于0)
    """
    triplets = connected_triplet_count(g)
    if triplets == 0:
        return None
    return 3.0 * triangle_count(g) / triplets


def read_edge_list(path: Union[str, Path]) -> Graph:
    """
    读取边列表文件

    Args:
        path: 文件路径

    Returns:
        Graph对象
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise ExportError(f"cannot read edge list {path}: {e}") from e

    n: Optional[int] = None
    edges: List[Tuple[int, int]] = []

    for line_number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()

        if n is None:
            if len(tokens) != 2 or tokens[0] != "n":
                raise ParseError("expected header 'n <count>'", line_number)
            try:
                n = int(tokens[1])
            except ValueError:
                raise ParseError(f"bad node count {tokens[1]!r}", line_number)
            if n < 0:
                raise ParseError(f"negative node count {n}", line_number)
            continue

        if len(tokens) != 2:
            raise ParseError(f"expected 'u v', got {line!r}", line_number)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(f"non-integer endpoint in {line!r}", line_number)
        if not 0 <= u < n or not 0 <= v < n:
            raise ParseError(f"endpoint out of range [0, {n}) in {line!r}", line_number)
        if u == v:
            raise ParseError(f"self-loop on node {u}", line_number)
        edges.append((u, v))

    if n is None:
        raise ParseError("missing header 'n <count>'", 1)

    return build_graph(n, edges)


def write_edge_list(g: Graph, path: Union[str, Path]) -> None:
    """写出边列表文件 (带节点数头部,孤立节点不会丢失)"""
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edges()]
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write("\n".join(lines) + "\n")
    except OSError as e:
        raise ExportError(f"cannot write edge list {path}: {e}") from e
