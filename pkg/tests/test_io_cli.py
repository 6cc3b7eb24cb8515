import json
import subprocess
import sys
from importlib import resources

import jsonschema
import numpy as np
import pytest

from conftest import NEG, chain
from tropmartin import io
from tropmartin.cli import main, target_expr
from tropmartin.core import TropicalError, TropicalMatrix, TropicalVector

SCHEMA = json.loads(resources.files("tropmartin").joinpath("report.schema.json").read_text())


def run_cli(argv, capsys):
    code = main(argv)
    out = json.loads(capsys.readouterr().out)
    jsonschema.validate(out, SCHEMA)
    return code, out


@pytest.fixture
def ex2_file(tmp_path):
    p = tmp_path / "ex2.edges"
    p.write_text(io.emit_graph(chain(4, zero_loop=True)))
    return p


class TestGraphFiles:
    def test_two_arcs(self):
        A = io.parse_graph_text("a b 1.5\nb a -2\n")
        assert A.labels == ("a", "b") and A.entry("a", "b") == 1.5 and A.entry("b", "a") == -2

    def test_comments_and_blank_lines(self):
        A = io.parse_graph_text("# header\n\nx y 0  # inline\n")
        assert A.entry("x", "y") == 0

    def test_bad_weight_location(self):
        with pytest.raises(io.GraphParseError) as exc:
            io.parse_graph_text("x y z\n")
        assert (exc.value.line, exc.value.col) == (1, 5)

    def test_wrong_field_count(self):
        with pytest.raises(io.GraphParseError) as exc:
            io.parse_graph_text("a b 1\na b\n")
        assert exc.value.line == 2

    def test_integer_mode(self):
        with pytest.raises(io.GraphParseError):
            io.parse_graph_text("a b 0.5\n", integer=True)

    def test_empty_with_nodes(self):
        A = io.parse_graph_text("", nodes=["a", "b"])
        assert A.n == 2 and np.all(np.isneginf(A.dense()))

    def test_unknown_node_under_override(self):
        with pytest.raises(io.GraphParseError):
            io.parse_graph_text("a c 1\n", nodes=["a", "b"])

    def test_duplicate_warns(self):
        with pytest.warns(io.DuplicateEdgeWarning):
            A = io.parse_graph_text("a b 1\na b 2\n")
        assert A.entry("a", "b") == 2

    def test_posinf_rejected(self):
        with pytest.raises(io.GraphParseError):
            io.parse_graph_text("a b inf\n")

    def test_json_graph(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(json.dumps({"nodes": ["b", "a"], "edges": [["a", "b", -1], ["b", "a", None]]}))
        A = io.parse_graph(p)
        assert A.labels == ("b", "a") and A.entry("a", "b") == -1 and A.entry("b", "a") == NEG

    def test_malformed_json(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text('{"edges": [')
        with pytest.raises(io.GraphParseError):
            io.parse_graph(p)

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            W = rng.integers(-5, 3, (5, 5)).astype(float)
            W[rng.random((5, 5)) < 0.5] = NEG
            A = TropicalMatrix.from_dense(W)
            assert io.parse_graph_text(io.emit_graph(A), nodes=A.labels) == A
            assert io.parse_graph_json(io.emit_graph_json(A)) == A


class TestVectorFiles:
    def test_round_trip(self):
        u = TropicalVector(("a", "b", "c"), [1.0, NEG, -3.0])
        assert io.parse_vector_text(io.emit_vector(u), u.labels) == u

    def test_unknown_node(self):
        with pytest.raises(io.GraphParseError) as exc:
            io.parse_vector_text("a 1\nz 2\n", ["a"])
        assert exc.value.line == 2


class TestJson:
    def test_infinities(self):
        assert json.loads(io.dumps({"x": [NEG, np.inf, 1.5, 2.0]})) == {"x": [None, "inf", 1.5, 2]}

    def test_nan_rejected(self):
        with pytest.raises(TropicalError):
            io.dumps(float("nan"))

    def test_sorted_keys(self):
        assert io.dumps({"b": 1, "a": 2}).index('"a"') < io.dumps({"b": 1, "a": 2}).index('"b"')


class TestTargetExpr:
    def test_forms(self):
        assert target_expr("k")(4) == 4
        assert target_expr("-k")(4) == -4
        assert target_expr("(2*k, k//2 + 1)")(5) == (10, 3)

    def test_rejects_names(self):
        with pytest.raises(TropicalError):
            target_expr("__import__('os')")


class TestCli:
    def test_spectra(self, ex2_file, capsys):
        code, out = run_cli(["spectra", "--graph", str(ex2_file), "--pi", "basepoint:0"], capsys)
        assert code == 0 and out["results"]["rho"] == 0 and out["results"]["recurrent"] == ["0"]

    def test_star_single_node(self, tmp_path, capsys):
        p = tmp_path / "empty.edges"
        p.write_text("")
        code, out = run_cli(["star", "--graph", str(p), "--nodes", "a"], capsys)
        assert code == 0 and out["results"]["values"] == [[0]]

    def test_star_divergent(self, tmp_path, capsys):
        p = tmp_path / "loop.edges"
        p.write_text("a a 1\n")
        _, out = run_cli(["star", "--graph", str(p)], capsys)
        assert out["results"]["values"] == [["inf"]]

    def test_martin(self, ex2_file, capsys):
        code, out = run_cli(["martin", "--graph", str(ex2_file), "--pi", "basepoint:0", "--mode", "integer"], capsys)
        assert code == 0 and out["results"]["minimal"] == ["0"]

    def test_decompose(self, ex2_file, tmp_path, capsys):
        v = tmp_path / "u.vec"
        v.write_text("0 0\n1 -1\n2 -1\n3 -1\n")
        code, out = run_cli(
            ["decompose", "--graph", str(ex2_file), "--pi", "basepoint:0", "--vector", str(v), "--extremal"], capsys
        )
        assert code == 0 and out["results"]["measure"]["density"] == {"0": 0}
        assert out["results"]["extremal"] is True

    def test_boundary(self, tmp_path, capsys):
        csv = tmp_path / "w.csv"
        code, out = run_cli(
            ["boundary", "--rule", "tripod", "--targets", "(k,1)", "--window", "3", "--probe", "(k,1)", "--probe-start", "2", "--csv", str(csv)],
            capsys,
        )
        assert code == 0 and out["results"]["h_flat_self"] == -2
        assert out["results"]["probe_slacks"] is None
        assert csv.read_text().startswith("node,value")

    def test_busemann(self, capsys):
        code, out = run_cli(["busemann", "--norm", "linf", "--dim", "2", "enumerate"], capsys)
        assert code == 0 and out["results"]["count"] == 8
        code, out = run_cli(["busemann", "ray", "--X", "5,0", "--y", "1,1"], capsys)
        assert code == 0 and out["results"]["offset"] == [5, 0]

    @pytest.mark.parametrize("check", ["eigen", "asymptotics", "characterization"])
    def test_laxoleinik(self, check, capsys):
        code, out = run_cli(["laxoleinik", "--check", check], capsys)
        assert code == 0, out

    def test_fixtures(self, capsys):
        code, out = run_cli(["fixtures", "--suite", "all", "--count", "20"], capsys)
        assert code == 0 and all(a["passed"] for a in out["assertions"])

    def test_parse_error_exit(self, tmp_path, capsys):
        p = tmp_path / "bad.edges"
        p.write_text("x y z\n")
        code, out = run_cli(["star", "--graph", str(p)], capsys)
        assert code == 2 and ":1:5" in out["error"]["message"]

    def test_missing_file_exit(self, tmp_path, capsys):
        code, out = run_cli(["star", "--graph", str(tmp_path / "nope")], capsys)
        assert code == 2 and out["error"]["type"] == "FileNotFoundError"

    def test_assertion_failure_exit(self, capsys):
        code, out = run_cli(["laxoleinik", "--check", "characterization", "--lambda", "2"], capsys)
        assert code == 1 and not out["assertions"][0]["passed"]

    def test_float_mode_zero_tol(self, ex2_file, capsys):
        code, out = run_cli(["star", "--graph", str(ex2_file), "--tol", "0"], capsys)
        assert code == 2

    def test_out_file(self, ex2_file, tmp_path):
        dest = tmp_path / "r.json"
        assert main(["spectra", "--graph", str(ex2_file), "--out", str(dest)]) == 0
        jsonschema.validate(json.loads(dest.read_text()), SCHEMA)

    def test_module_entry(self, ex2_file):
        proc = subprocess.run(
            [sys.executable, "-m", "tropmartin", "spectra", "--graph", str(ex2_file)], capture_output=True, text=True
        )
        assert proc.returncode == 0 and json.loads(proc.stdout)["results"]["rho"] == 0
