#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Unit tests for Command-Line Surface

Golden outputs on tiny graphs; exit codes per failure class.
"""

import io
import json
import os
import sys
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout

# Add src directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

import cli
from generators import GeneratorParams, holme_kim
from graph_core import build_graph, read_edge_list, write_edge_list


class CliTestCase(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = self.tmp.name

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.dir, name)

    def graph_file(self, name: str, n: int, edges) -> str:
        p = self.path(name)
        write_edge_list(build_graph(n, edges), p)
        return p

    def run_cli(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.main(list(argv))
        return code, out.getvalue(), err.getvalue()

    def read(self, p: str) -> str:
        with open(p, encoding="utf-8") as f:
            return f.read()


class TestGenerate(CliTestCase):
    """generate 命令测试"""

    def test_minimal_ba_is_triangle(self):
        out = self.path("g.txt")
        code, stdout, _ = self.run_cli("generate", "--model", "ba", "--n", "3", "--m", "2", "--out", out)
        self.assertEqual(code, 0)
        self.assertEqual(stdout, "")
        self.assertEqual(self.read(out), "n 3\n0 1\n0 2\n1 2\n")

    def test_same_seed_identical_files(self):
        a, b = self.path("a.txt"), self.path("b.txt")
        for p in (a, b):
            self.run_cli("generate", "--model", "hk", "--n", "80", "--pt", "0.5", "--seed", "17", "--out", p)
        self.assertEqual(self.read(a), self.read(b))
        self.assertEqual(read_edge_list(a), holme_kim(GeneratorParams(n=80, m=2, triad_probability=0.5, seed=17)))

    def test_invalid_triad_probability(self):
        code, _, stderr = self.run_cli("generate", "--model", "hk", "--n", "10", "--pt", "1.5",
                                       "--out", self.path("x.txt"))
        self.assertEqual(code, 1)
        self.assertIn("INVALID_PARAMS", stderr)
        self.assertFalse(os.path.exists(self.path("x.txt")))

    def test_unknown_flag(self):
        with self.assertRaises(SystemExit) as ctx:
            self.run_cli("generate", "--model", "ba", "--n", "5", "--colour", "red", "--out", self.path("x.txt"))
        self.assertEqual(ctx.exception.code, 1)

    def test_unknown_model(self):
        with self.assertRaises(SystemExit) as ctx:
            self.run_cli("generate", "--model", "ws", "--n", "5", "--out", self.path("x.txt"))
        self.assertEqual(ctx.exception.code, 1)


class TestGcc(CliTestCase):
    """gcc 命令测试"""

    def test_triangle(self):
        g = self.graph_file("t.txt", 3, [(0, 1), (1, 2), (0, 2)])
        code, stdout, _ = self.run_cli("gcc", "--in", g)
        self.assertEqual(code, 0)
        self.assertEqual(stdout, "gcc 1.0\ntriangles 1\ntriplets 3\n")

    def test_undefined(self):
        g = self.graph_file("e.txt", 2, [(0, 1)])
        _, stdout, _ = self.run_cli("gcc", "--in", g)
        self.assertEqual(stdout.splitlines()[0], "gcc undefined")

    def test_parse_error_exit_code(self):
        p = self.path("bad.txt")
        with open(p, "w", encoding="utf-8") as f:
            f.write("n 3\n0 1\n0 5\n")
        code, stdout, stderr = self.run_cli("gcc", "--in", p)
        self.assertEqual(code, 3)
        self.assertEqual(stdout, "")
        self.assertIn("PARSE_ERROR", stderr)
        self.assertIn("line 3", stderr)

    def test_missing_file(self):
        code, _, stderr = self.run_cli("gcc", "--in", self.path("missing.txt"))
        self.assertEqual(code, 3)
        self.assertIn("IO_ERROR", stderr)


class TestCentrality(CliTestCase):
    """centrality 命令测试"""

    def test_star_degree(self):
        g = self.graph_file("s.txt", 5, [(0, i) for i in range(1, 5)])
        out = self.path("s.csv")
        code, _, _ = self.run_cli("centrality", "--in", g, "--measure", "degree", "--out", out)
        self.assertEqual(code, 0)
        self.assertEqual(self.read(out), (
            "node_id,measure,score\n"
            "0,degree,4.0\n"
            "1,degree,1.0\n"
            "2,degree,1.0\n"
            "3,degree,1.0\n"
            "4,degree,1.0\n"
        ))

    def test_all_measures_shape(self):
        g = self.graph_file("p.txt", 4, [(0, 1), (1, 2), (2, 3)])
        out = self.path("all.csv")
        self.run_cli("centrality", "--in", g, "--measure", "all", "--out", out)
        rows = self.read(out).splitlines()[1:]
        self.assertEqual(len(rows), 7 * 4)
        self.assertEqual([int(r.split(",")[0]) for r in rows], sorted(int(r.split(",")[0]) for r in rows))

    def test_triangle_pagerank(self):
        g = self.graph_file("t.txt", 3, [(0, 1), (1, 2), (0, 2)])
        out = self.path("pr.csv")
        self.run_cli("centrality", "--in", g, "--measure", "pagerank", "--out", out)
        scores = [float(r.split(",")[2]) for r in self.read(out).splitlines()[1:]]
        self.assertEqual(len(scores), 3)
        for s in scores:
            self.assertAlmostEqual(s, 1 / 3, places=12)
        self.assertAlmostEqual(sum(scores), 1.0, places=12)

    def test_unknown_measure(self):
        g = self.graph_file("t.txt", 3, [(0, 1)])
        code, _, stderr = self.run_cli("centrality", "--in", g, "--measure", "harmonic", "--out", self.path("x.csv"))
        self.assertEqual(code, 1)
        self.assertIn("unknown measure", stderr)

    def test_edgeless_eigenvector_is_runtime_error(self):
        g = self.graph_file("e.txt", 3, [])
        code, _, stderr = self.run_cli("centrality", "--in", g, "--measure", "eigenvector", "--out", self.path("x.csv"))
        self.assertEqual(code, 2)
        self.assertIn("DEGENERATE", stderr)


class TestCurve(CliTestCase):
    """curve 命令测试"""

    def test_path_single_source(self):
        g = self.graph_file("p.txt", 5, [(i, i + 1) for i in range(4)])
        out = self.path("c.csv")
        code, stdout, _ = self.run_cli("curve", "--in", g, "--sources", "0", "--out", out)
        self.assertEqual(code, 0)
        self.assertEqual(self.read(out), "t,count,normalized\n0,1,0.0\n1,1,0.25\n2,1,0.25\n3,1,0.25\n4,1,0.25\n")
        lines = stdout.splitlines()
        self.assertEqual(lines[:3], ["isolated 0", "peak_t 1", "peak_count 1"])
        self.assertTrue(lines[3].startswith("gamma_shape "))

    def test_zero_isolation_is_identity(self):
        g = self.graph_file("p.txt", 6, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 5)])
        a, b = self.path("a.csv"), self.path("b.csv")
        _, out_a, _ = self.run_cli("curve", "--in", g, "--out", a)
        _, out_b, _ = self.run_cli("curve", "--in", g, "--isolate-top", "0", "--by", "katz", "--out", b)
        self.assertEqual(self.read(a), self.read(b))
        self.assertEqual(out_a, out_b)

    def test_degenerate_gamma_reported(self):
        g = self.graph_file("s.txt", 5, [(0, i) for i in range(1, 5)])
        code, stdout, _ = self.run_cli("curve", "--in", g, "--sources", "0", "--out", self.path("c.csv"))
        self.assertEqual(code, 0)
        self.assertIn("gamma undefined", stdout)

    def test_capacity_line(self):
        g = self.graph_file("s.txt", 5, [(0, i) for i in range(1, 5)])
        _, stdout, _ = self.run_cli("curve", "--in", g, "--capacity", "20", "--out", self.path("c.csv"))
        self.assertIn("capacity 20.0 steps_above 0 first_step_above -", stdout)

    def test_isolation_flattens_demo_network(self):
        g = holme_kim(GeneratorParams(n=50, m=2, triad_probability=0.5, seed=3))
        p = self.path("demo.txt")
        write_edge_list(g, p)

        def peak(*extra):
            _, stdout, _ = self.run_cli("curve", "--in", p, "--out", self.path("c.csv"), *extra)
            fields = dict(line.split(" ", 1) for line in stdout.splitlines() if " " in line)
            return int(fields["isolated"]), float(fields["peak_count"])

        none_isolated, baseline = peak()
        self.assertEqual(none_isolated, 0)
        isolated, flattened = peak("--isolate-top", "0.06", "--by", "degree")
        self.assertEqual(isolated, 3)
        self.assertLess(flattened, baseline)


class TestIsolate(CliTestCase):
    """isolate 命令测试"""

    def test_explicit_nodes(self):
        g = self.graph_file("t.txt", 3, [(0, 1), (1, 2), (0, 2)])
        out = self.path("cut.txt")
        code, stdout, _ = self.run_cli("isolate", "--in", g, "--nodes", "0", "--out", out)
        self.assertEqual(code, 0)
        self.assertEqual(stdout, "0\n")
        self.assertEqual(self.read(out), "n 3\n1 2\n")

    def test_top_fraction(self):
        g = self.graph_file("s.txt", 5, [(0, i) for i in range(1, 5)])
        out = self.path("cut.txt")
        _, stdout, _ = self.run_cli("isolate", "--in", g, "--top", "0.34", "--by", "degree", "--out", out)
        self.assertEqual(stdout, "0 1\n")
        self.assertEqual(read_edge_list(out).edge_count, 0)

    def test_out_of_range_node(self):
        g = self.graph_file("t.txt", 3, [(0, 1)])
        code, _, stderr = self.run_cli("isolate", "--in", g, "--nodes", "7", "--out", self.path("x.txt"))
        self.assertEqual(code, 1)
        self.assertIn("OUT_OF_RANGE", stderr)

    def test_requires_selection(self):
        g = self.graph_file("t.txt", 3, [(0, 1)])
        with self.assertRaises(SystemExit) as ctx:
            self.run_cli("isolate", "--in", g, "--out", self.path("x.txt"))
        self.assertEqual(ctx.exception.code, 1)


class TestExperiment(CliTestCase):
    """experiment 命令测试"""

    def config_file(self, **fields) -> str:
        data = {"n": 24, "replicates": 1, "triad_probabilities": [0.3], "measures": [], "master_seed": 11}
        data.update(fields)
        p = self.path("experiment.json")
        with open(p, "w", encoding="utf-8") as f:
            json.dump(data, f)
        return p

    def test_baseline_only(self):
        out_dir = self.path("run")
        code, stdout, _ = self.run_cli("experiment", "--config", self.config_file(), "--out-dir", out_dir)
        self.assertEqual(code, 0)
        self.assertEqual(sorted(os.listdir(out_dir)), ["curves.csv", "peaks.csv", "reductions.csv", "result.json"])
        lines = stdout.splitlines()
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[1].strip().startswith("None"))

    def test_reduction_table_printed(self):
        code, stdout, _ = self.run_cli("experiment", "--config", self.config_file(measures=["degree"]),
                                       "--out-dir", self.path("run"))
        self.assertEqual(code, 0)
        tables = stdout.split("\n\n")
        self.assertEqual(len(tables), 2)
        self.assertIn("Deg", tables[1])

    def test_identical_invocations(self):
        config = self.config_file(measures=["degree", "closeness"])
        a, b = self.path("a"), self.path("b")
        self.run_cli("experiment", "--config", config, "--out-dir", a)
        self.run_cli("--debug", "experiment", "--config", config, "--out-dir", b)
        for name in ("curves.csv", "peaks.csv", "reductions.csv", "result.json"):
            with open(os.path.join(a, name), "rb") as fa, open(os.path.join(b, name), "rb") as fb:
                self.assertEqual(fa.read(), fb.read(), name)

    def test_invalid_config(self):
        code, _, stderr = self.run_cli("experiment", "--config", self.config_file(replicates=0),
                                       "--out-dir", self.path("run"))
        self.assertEqual(code, 1)
        self.assertIn("INVALID_PARAMS", stderr)

    def test_missing_system_config(self):
        code, _, stderr = self.run_cli("--config", self.path("nope.yaml"), "gcc", "--in", self.path("g.txt"))
        self.assertEqual(code, 3)
        self.assertIn("config file not found", stderr)


if __name__ == '__main__':
    unittest.main()
