#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Unit tests for Centrality Module

Hand-computed cases plus brute-force oracles (path enumeration, dense
eigen/linear solves, exhaustive two-step enumeration) and networkx.
"""

import itertools
import math
import os
import random
import sys
import unittest

import networkx as nx
import numpy as np

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from centrality import (
    CentralityScores,
    Measure,
    SolverSettings,
    all_centralities,
    betweenness_centrality,
    closeness_centrality,
    compute_centrality,
    degree_centrality,
    eigenvector_centrality,
    expected_force,
    katz_centrality,
    pagerank,
    spectral_radius,
    top_fraction,
)
from errors import DegenerateGraphError, InvalidParamsError, NoConvergenceError
from graph_core import UNREACHABLE, Graph, all_pairs_distances, build_graph, is_connected


def path(n):
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def star(leaves):
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete(n):
    return build_graph(n, itertools.combinations(range(n), 2))


def er_graphs(count=30, p=0.15):
    rnd = random.Random(2023)
    graphs = []
    for _ in range(count):
        n = rnd.randint(30, 50)
        edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rnd.random() < p]
        graphs.append(build_graph(n, edges))
    return graphs


def to_networkx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


# ---- oracles ----

def betweenness_oracle(g: Graph) -> np.ndarray:
    """sigma_st(i) = sigma_si * sigma_it 当 d(s,i) + d(i,t) = d(s,t)"""
    dist = all_pairs_distances(g).tolist()
    sigma = [[0.0] * g.n for _ in range(g.n)]
    for s in range(g.n):
        order = sorted((d, v) for v, d in enumerate(dist[s]) if d != UNREACHABLE)
        sigma[s][s] = 1
        for d, v in order:
            if v == s:
                continue
            sigma[s][v] = sum(sigma[s][u] for u in g.adjacency[v] if dist[s][u] == d - 1)
    values = np.zeros(g.n)
    for s, t in itertools.combinations(range(g.n), 2):
        if dist[s][t] == UNREACHABLE:
            continue
        for i in range(g.n):
            if i in (s, t) or dist[s][i] == UNREACHABLE or dist[i][t] == UNREACHABLE:
                continue
            if dist[s][i] + dist[i][t] == dist[s][t]:
                values[i] += sigma[s][i] * sigma[i][t] / sigma[s][t]
    return values


def closeness_oracle(g: Graph) -> np.ndarray:
    values = np.zeros(g.n)
    for i in range(g.n):
        reach = [d for d in all_pairs_distances(g, [i])[0] if d != UNREACHABLE]
        r, total = len(reach), sum(reach)
        if r > 1:
            values[i] = (r - 1) / total * (r - 1) / (g.n - 1)
    return values


def katz_oracle(g: Graph, fraction: float) -> np.ndarray:
    a = g.adjacency_matrix().toarray()
    alpha = fraction / np.max(np.linalg.eigvalsh(a))
    return np.linalg.solve(np.eye(g.n) - alpha * a, np.ones(g.n))


def pagerank_oracle(g: Graph, d: float) -> np.ndarray:
    n = g.n
    a = g.adjacency_matrix().toarray()
    deg = a.sum(axis=0)
    s = np.zeros((n, n))
    for j in range(n):
        s[:, j] = a[:, j] / deg[j] if deg[j] > 0 else 1.0 / n
    return np.linalg.solve(np.eye(n) - d * s, np.full(n, (1 - d) / n))


def expected_force_oracle(g: Graph) -> np.ndarray:
    adj = [set(g.adjacency[u]) for u in range(g.n)]
    values = np.zeros(g.n)
    for i in range(g.n):
        forces = []
        for j in g.adjacency[i]:
            for k in range(g.n):
                if k in (i, j) or not (k in adj[i] or k in adj[j]):
                    continue
                cluster = {i, j, k}
                # 一端在簇内, 一端在簇外的边
                forces.append(sum(1 for u in cluster for v in adj[u] if v not in cluster))
        total = sum(forces)
        if total > 0:
            values[i] = -sum(f / total * math.log(f / total) for f in forces if f > 0)
    return values


class TestMeasure(unittest.TestCase):
    """指标枚举测试"""

    def test_table_order_and_labels(self):
        self.assertEqual([m.label for m in Measure], ["Deg", "Clos", "Bet", "Eig", "Katz", "Page", "Exf"])

    def test_parse(self):
        self.assertIs(Measure.parse("pagerank"), Measure.PAGERANK)
        self.assertIs(Measure.parse("Exf"), Measure.EXPECTED_FORCE)
        self.assertIs(Measure.parse(" DEGREE "), Measure.DEGREE)
        with self.assertRaises(InvalidParamsError):
            Measure.parse("harmonic")

    def test_settings_validation(self):
        with self.assertRaises(InvalidParamsError):
            SolverSettings(pagerank_damping=1.0).validate()
        with self.assertRaises(InvalidParamsError):
            SolverSettings(tolerance=0).validate()


class TestHandComputed(unittest.TestCase):
    """手算示例"""

    def test_degree(self):
        self.assertEqual(degree_centrality(complete(3)).values.tolist(), [2, 2, 2])
        self.assertEqual(degree_centrality(star(4)).values.tolist(), [4, 1, 1, 1, 1])

    def test_closeness(self):
        v = closeness_centrality(path(3)).values
        self.assertAlmostEqual(v[1], 1.0)
        self.assertAlmostEqual(v[0], 2 / 3)
        two_edges = build_graph(4, [(0, 1), (2, 3)])
        np.testing.assert_allclose(closeness_centrality(two_edges).values, [1 / 3] * 4)

    def test_closeness_isolated_node(self):
        g = build_graph(3, [(0, 1)])
        self.assertEqual(closeness_centrality(g).values[2], 0.0)

    def test_betweenness(self):
        self.assertEqual(betweenness_centrality(path(3)).values.tolist(), [0.0, 1.0, 0.0])
        self.assertAlmostEqual(betweenness_centrality(star(4)).values[0], 6.0)
        np.testing.assert_allclose(betweenness_centrality(cycle(4)).values, [0.5] * 4)

    def test_eigenvector(self):
        np.testing.assert_allclose(eigenvector_centrality(complete(3)).values, [1 / math.sqrt(3)] * 3, atol=1e-9)
        v = eigenvector_centrality(star(4)).values
        self.assertAlmostEqual(v[0] / v[1], 2.0, places=6)
        self.assertAlmostEqual(float(np.linalg.norm(v)), 1.0)
        np.testing.assert_allclose(eigenvector_centrality(cycle(6)).values, [1 / math.sqrt(6)] * 6, atol=1e-9)

    def test_eigenvector_bipartite_converges(self):
        v = eigenvector_centrality(path(4)).values
        self.assertTrue(np.all(v > 0))

    def test_eigenvector_edgeless(self):
        with self.assertRaises(DegenerateGraphError):
            eigenvector_centrality(build_graph(3, []))

    def test_katz(self):
        v = katz_centrality(cycle(4)).values
        self.assertAlmostEqual(float(v.max() - v.min()), 0.0, places=9)
        single = katz_centrality(build_graph(2, [(0, 1)]), SolverSettings(katz_alpha_fraction=0.1)).values
        np.testing.assert_allclose(single, [1 / 0.9, 1 / 0.9], atol=1e-9)
        s = katz_centrality(star(4)).values
        self.assertGreater(s[0], s[1])

    def test_katz_edgeless_is_ones(self):
        self.assertEqual(katz_centrality(build_graph(3, [])).values.tolist(), [1.0, 1.0, 1.0])

    def test_katz_no_convergence(self):
        with self.assertRaises(NoConvergenceError) as ctx:
            katz_centrality(star(4), SolverSettings(max_iterations=1))
        self.assertIsNotNone(ctx.exception.iterate)
        self.assertGreater(ctx.exception.residual, 0)

    def test_pagerank(self):
        np.testing.assert_allclose(pagerank(complete(3)).values, [1 / 3] * 3, atol=1e-12)
        v = pagerank(path(3)).values
        self.assertGreater(v[1], v[0])
        self.assertAlmostEqual(float(v.sum()), 1.0, places=12)
        np.testing.assert_allclose(v, pagerank_oracle(path(3), 0.85), atol=1e-9)

    def test_pagerank_dangling(self):
        g = build_graph(3, [(0, 1)])
        v = pagerank(g).values
        np.testing.assert_allclose(v, pagerank_oracle(g, 0.85), atol=1e-9)
        self.assertAlmostEqual(float(v.sum()), 1.0, places=12)

    def test_expected_force(self):
        self.assertEqual(expected_force(build_graph(3, [(0, 1)])).values[2], 0.0)
        self.assertEqual(expected_force(path(4)).values[0], 0.0)
        v = expected_force(star(4)).values
        self.assertAlmostEqual(v[0], math.log(12))
        self.assertAlmostEqual(v[1], math.log(3))

    def test_spectral_radius(self):
        self.assertAlmostEqual(spectral_radius(star(4)), 2.0)
        self.assertEqual(spectral_radius(build_graph(2, [])), 0.0)


class TestOracles(unittest.TestCase):
    """30 个随机图上与独立实现比对"""

    @classmethod
    def setUpClass(cls):
        cls.graphs = er_graphs()

    def test_betweenness(self):
        for g in self.graphs:
            ours = betweenness_centrality(g).values
            np.testing.assert_allclose(ours, betweenness_oracle(g), atol=1e-6)
            nx_values = nx.betweenness_centrality(to_networkx(g), normalized=False)
            np.testing.assert_allclose(ours, [nx_values[i] for i in range(g.n)], atol=1e-6)

    def test_closeness(self):
        for g in self.graphs:
            ours = closeness_centrality(g).values
            np.testing.assert_allclose(ours, closeness_oracle(g), rtol=0, atol=1e-12)
            nx_values = nx.closeness_centrality(to_networkx(g), wf_improved=True)
            np.testing.assert_allclose(ours, [nx_values[i] for i in range(g.n)], atol=1e-12)

    def test_eigenvector(self):
        checked = 0
        for g in self.graphs:
            if not is_connected(g):
                continue
            _, vecs = np.linalg.eigh(g.adjacency_matrix().toarray())
            oracle = np.abs(vecs[:, -1])
            np.testing.assert_allclose(eigenvector_centrality(g).values, oracle, atol=1e-6)
            checked += 1
        self.assertGreater(checked, 0)

    def test_katz(self):
        for g in self.graphs:
            np.testing.assert_allclose(katz_centrality(g).values, katz_oracle(g, 0.85), atol=1e-8)

    def test_pagerank(self):
        for g in self.graphs:
            ours = pagerank(g).values
            np.testing.assert_allclose(ours, pagerank_oracle(g, 0.85), atol=1e-8)
            self.assertAlmostEqual(float(ours.sum()), 1.0, delta=1e-9)
            nx_values = nx.pagerank(to_networkx(g), alpha=0.85, tol=1e-12, max_iter=10_000)
            np.testing.assert_allclose(ours, [nx_values[i] for i in range(g.n)], atol=1e-6)

    def test_expected_force(self):
        for g in self.graphs:
            np.testing.assert_allclose(expected_force(g).values, expected_force_oracle(g), atol=1e-9)

    def test_all_scores_finite(self):
        for g in self.graphs[:5]:
            measures = [m for m in Measure if m is not Measure.EIGENVECTOR or is_connected(g)]
            for scores in all_centralities(g, measures).values():
                self.assertTrue(np.all(np.isfinite(scores.values)))


class TestInvariants(unittest.TestCase):
    """对称性与重标号测试"""

    def test_vertex_transitive_constant(self):
        for g in (cycle(6), complete(5)):
            for m in Measure:
                v = compute_centrality(g, m).values
                self.assertAlmostEqual(float(v.max() - v.min()), 0.0, places=8, msg=m.value)

    def test_relabeling_equivariance(self):
        g = er_graphs(count=1)[0]
        perm = list(range(g.n))
        random.Random(1).shuffle(perm)
        h = build_graph(g.n, [(perm[u], perm[v]) for u, v in g.edges()])
        for fn in (degree_centrality, expected_force):
            a, b = fn(g).values, fn(h).values
            np.testing.assert_allclose([b[perm[i]] for i in range(g.n)], a, atol=1e-12)


class TestTopFraction(unittest.TestCase):
    """隔离目标选择测试"""

    def scores(self, values):
        return CentralityScores(Measure.DEGREE, np.asarray(values, dtype=float))

    def test_three_percent_of_200(self):
        values = np.arange(200, dtype=float)
        self.assertEqual(top_fraction(self.scores(values), 0.03), (199, 198, 197, 196, 195, 194))

    def test_zero_fraction(self):
        self.assertEqual(top_fraction(self.scores([3, 2, 1]), 0.0), ())

    def test_ties_by_lower_id(self):
        self.assertEqual(top_fraction(self.scores([1.0] * 5), 0.4), (0, 1))

    def test_scale_invariance(self):
        values = np.random.default_rng(0).random(50)
        self.assertEqual(top_fraction(self.scores(values), 0.1), top_fraction(self.scores(values * 7.5), 0.1))

    def test_invalid_fraction(self):
        with self.assertRaises(InvalidParamsError):
            top_fraction(self.scores([1, 2]), 1.5)


if __name__ == '__main__':
    unittest.main()
