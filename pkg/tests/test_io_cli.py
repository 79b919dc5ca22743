import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyplap import io
from hyplap.cli import main
from hyplap.experiments import bench, time_to_error
from hyplap.functional import Labeling
from hyplap.hgraph import Hypergraph
from hyplap.solver import SolverConfig, solve_AE_p2
from helpers import H2_SOLUTION, h1, h1_labels, h2, h2_labels, random_connected


def write(path, text):
    path.write_text(text)
    return str(path)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000))
def test_hypergraph_round_trip(seed):
    import tempfile
    from pathlib import Path

    rng = np.random.default_rng(seed)
    H = random_connected(rng, int(rng.integers(2, 30)))
    with tempfile.TemporaryDirectory() as d:
        f = Path(d) / "h.txt"
        io.write_hypergraph(H, f)
        G = io.load_hypergraph(f)
    assert G.n == H.n and G.edges == H.edges


def test_labels_solution_points_round_trip(tmp_path):
    L = Labeling({3: 0.1, 0: -2.5, 7: 1e-17})
    io.write_labels(L, tmp_path / "l.txt")
    assert io.load_labels(tmp_path / "l.txt").as_dict() == L.as_dict()
    u = np.random.default_rng(0).normal(size=9)
    io.write_solution(u, tmp_path / "s.csv")
    np.testing.assert_array_equal(io.load_solution(tmp_path / "s.csv"), u)
    P = np.random.default_rng(1).normal(size=(5, 2))
    io.write_points(P, tmp_path / "p.txt")
    np.testing.assert_array_equal(io.load_points(tmp_path / "p.txt"), P)


def test_trace_format(tmp_path):
    io.write_trace([(0, 1.0, 2.0), (10, 0.5, 0.25)], tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines() == ["iter,delta_sup,residual_sup", "0,1.0,2.0", "10,0.5,0.25"]


def test_comments_and_blank_lines(tmp_path):
    f = write(tmp_path / "h.txt", "# a comment\n\nH 3 1\n# edge follows\nE 2.0 0 1 2\n")
    assert io.load_hypergraph(f).edges == [(2.0, (0, 1, 2))]


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("H 3 x\n", 1),
        ("X 3 1\n", 1),
        ("H 3 1\nE 1.0 0 zz\n", 2),
        ("H 3 1\n\nE -1.0 0 1\n", 3),
        ("H 3 1\nE 1.0 0 5\n", 2),
        ("H 3 1\nE 1.0 1 1\n", 2),
        ("H 3 1\nV 1.0 0 1\n", 2),
        ("H 3 2\nE 1.0 0 1\n", 0),
        ("", 0),
    ],
)
def test_hypergraph_parse_errors(tmp_path, text, lineno):
    with pytest.raises(io.ParseError) as exc:
        io.load_hypergraph(write(tmp_path / "h.txt", text))
    assert exc.value.lineno == lineno


def test_label_parse_errors(tmp_path):
    with pytest.raises(io.ParseError) as exc:
        io.load_labels(write(tmp_path / "l.txt", "0 1.0\n2 0.5\n0 3.0\n"))
    assert exc.value.lineno == 3 and "duplicate" in str(exc.value)
    with pytest.raises(io.ParseError):
        io.load_labels(write(tmp_path / "l.txt", "0 abc\n"))
    with pytest.raises(io.ParseError):
        io.load_labels(write(tmp_path / "l.txt", "0 1 2\n"))


def test_points_parse_errors(tmp_path):
    with pytest.raises(io.ParseError):
        io.load_points(write(tmp_path / "p.txt", "0 1\n2\n"))
    with pytest.raises(io.ParseError):
        io.load_points(write(tmp_path / "p.txt", "0 q\n"))


def test_categorical_csv(tmp_path):
    f = write(tmp_path / "d.csv", "class,a,b\ne,x,y\np,x,z\ne,w,z\n")
    rows, y, classes = io.load_categorical_csv(f, "class")
    assert rows == [["x", "y"], ["x", "z"], ["w", "z"]]
    assert y.tolist() == [1, 2, 1] and classes == ["e", "p"]
    with pytest.raises(KeyError):
        io.load_categorical_csv(f, "nope")
    with pytest.raises(io.ParseError) as exc:
        io.load_categorical_csv(write(tmp_path / "bad.csv", "a,b\n1,2\n3\n"))
    assert exc.value.lineno == 3
    with pytest.raises(io.ParseError):
        io.load_categorical_csv(write(tmp_path / "empty.csv", "a,b\n"))


@pytest.fixture
def h2_files(tmp_path):
    io.write_hypergraph(h2(), tmp_path / "h2.txt")
    io.write_labels(h2_labels(), tmp_path / "h2.labels")
    return str(tmp_path / "h2.txt"), str(tmp_path / "h2.labels")


def test_cli_solve(tmp_path, h2_files, capsys):
    hg, lab = h2_files
    out = tmp_path / "run"
    assert main(["solve", "--hypergraph", hg, "--labels", lab, "--tol", "1e-12", "--trace-every", "5", "--out", str(out)]) == 0
    np.testing.assert_allclose(io.load_solution(out / "solution.csv"), H2_SOLUTION, atol=1e-9)
    report = json.loads((out / "report.json").read_text())
    assert report["converged"]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["method"] == "ae-p2" and manifest["tol"] == 1e-12 and "backend" in manifest
    assert (out / "trace.csv").read_text().startswith("iter,delta_sup,residual_sup\n")
    first = (out / "solution.csv").read_bytes()
    main(["solve", "--hypergraph", hg, "--labels", lab, "--tol", "1e-12", "--trace-every", "5", "--out", str(out)])
    assert (out / "solution.csv").read_bytes() == first
    capsys.readouterr()


def test_cli_solve_general_p_and_nonconvergence(tmp_path, h2_files, capsys):
    hg, lab = h2_files
    out = tmp_path / "p3"
    assert main(["solve", "--hypergraph", hg, "--labels", lab, "--method", "ae", "--p", "3", "--scheme", "jacobi", "--tol", "1e-10", "--out", str(out)]) == 0
    assert main(["solve", "--hypergraph", hg, "--labels", lab, "--max-iter", "2", "--tol", "1e-14", "--out", str(out)]) == 1
    assert main(["solve", "--hypergraph", hg, "--labels", lab, "--method", "fh", "--max-iter", "100", "--out", str(out)]) == 0
    capsys.readouterr()


def test_cli_knn(tmp_path, capsys):
    pts = write(tmp_path / "p.txt", "0.0\n0.1\n0.4\n1.0\n")
    assert main(["knn", "--points", pts, "--k", "1", "--kind", "graph", "--out", str(tmp_path / "g.txt")]) == 0
    assert [e for _, e in io.load_hypergraph(tmp_path / "g.txt").edges] == [(0, 1), (1, 2), (2, 3)]
    assert main(["knn", "--points", pts, "--k", "2", "--out", str(tmp_path / "h.txt")]) == 0
    assert io.load_hypergraph(tmp_path / "h.txt").m == 4
    capsys.readouterr()


def test_cli_verify(tmp_path, capsys):
    io.write_hypergraph(h1(), tmp_path / "h1.txt")
    io.write_labels(h1_labels(), tmp_path / "h1.labels")
    out = tmp_path / "v.json"
    rc = main(["verify", "--hypergraph", str(tmp_path / "h1.txt"), "--labels", str(tmp_path / "h1.labels"),
               "--seeds", "0", "1", "--iters", "1000000", "--out", str(out)])
    assert rc == 0
    res = json.loads(out.read_text())
    assert res["proposition_D"] and res["D"][0]["D"] == list(range(6))
    capsys.readouterr()


def test_cli_ssl_csv(tmp_path, capsys):
    rows = ["label,c1,c2"] + [f"a,x,{i % 2}" for i in range(6)] + [f"b,y,{i % 2}" for i in range(6)]
    f = write(tmp_path / "d.csv", "\n".join(rows) + "\n")
    out = tmp_path / "m.json"
    dump = tmp_path / "dump.txt"
    assert main(["ssl", "--dataset", f, "--label-column", "label", "--train-size", "4", "--runs", "3",
                 "--out", str(out), "--dump-hypergraph", str(dump)]) == 0
    m = json.loads(out.read_text())
    assert {"errors", "mean", "std", "seconds_per_run"} <= set(m)
    assert len(m["errors"]) == 3
    assert io.load_hypergraph(dump).m == 4
    with pytest.raises(SystemExit):
        main(["ssl", "--dataset", f, "--train-size", "4"])
    capsys.readouterr()


def test_cli_ssl_hypergraph(tmp_path, h2_files, capsys):
    hg, _ = h2_files
    lab = write(tmp_path / "classes.txt", "\n".join(f"{i} {1 if i < 3 else 2}" for i in range(7)) + "\n")
    out = tmp_path / "m.json"
    assert main(["ssl", "--dataset", hg, "--labels", lab, "--train-rate", "1.0", "--runs", "1", "--eval-all", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["errors"] == [0.0]
    capsys.readouterr()


def test_cli_interp1d(tmp_path, capsys):
    out = tmp_path / "i"
    assert main(["interp1d", "--n", "60", "--labeled", "4", "--k", "3", "6", "--tol", "1e-6", "--out", str(out)]) == 0
    m = json.loads((out / "metrics.json").read_text())
    assert {(r["method"], r["k"]) for r in m["runs"]} == {("fce", 3), ("fce", 6), ("ae-p2", 3), ("ae-p2", 6)}
    assert (out / "ae-p2_k6.svg").read_text().startswith("<svg")
    assert json.loads((out / "manifest.json").read_text())["experiment"] == "interp1d"
    first = (out / "solution_fce_k3.csv").read_bytes()
    assert main(["interp1d", "--n", "60", "--labeled", "4", "--k", "3", "6", "--tol", "1e-6", "--parallel-grid", "--out", str(out)]) == 0
    assert (out / "solution_fce_k3.csv").read_bytes() == first
    capsys.readouterr()


def test_cli_bench(tmp_path, h2_files, capsys):
    hg, lab = h2_files
    out = tmp_path / "b"
    assert main(["bench", "--hypergraph", hg, "--labels", lab, "--methods", "ae-p2", "fh", "--stride", "1",
                 "--max-iter", "2000", "--out", str(out)]) == 0
    m = json.loads((out / "metrics.json").read_text())
    assert m["ae-p2"]["time_to_1e-3"] < float("inf")
    assert (out / "bench_fh.csv").exists()
    out2 = tmp_path / "b2"
    assert main(["bench", "--n", "80", "--labeled", "4", "--k", "6", "--methods", "ae-p2", "--out", str(out2)]) == 0
    capsys.readouterr()


def test_bench_h2_reaches_target():
    res = bench(h2(), h2_labels(), ["ae-p2"], references={"ae-p2": H2_SOLUTION}, cfg=SolverConfig(tol=1e-12))
    traj = res["ae-p2"]["trajectory"]
    assert time_to_error(traj, 1e-6) < float("inf")
    assert next(it for it, _, e in traj if e <= 1e-6) <= 1000


def test_bench_against_own_solution_ends_at_zero():
    u, _ = solve_AE_p2(h1(), h1_labels(), SolverConfig(tol=1e-14))
    res = bench(h1(), h1_labels(), ["ae-p2"], references={"ae-p2": u}, cfg=SolverConfig(tol=1e-14))
    assert res["ae-p2"]["trajectory"][-1][2] <= 1e-12
    times = [s for _, s, _ in res["ae-p2"]["trajectory"]]
    assert times == sorted(times)


def test_bench_ae_faster_than_fh():
    rng = np.random.default_rng(3)
    H = random_connected(rng, 40, max_size=5)
    L = Labeling({0: 0.0, 13: 1.0, 27: 0.4})
    refs = {"ae-p2": solve_AE_p2(H, L, SolverConfig(tol=1e-12))[0]}
    refs["fh"] = refs["ae-p2"]
    res = bench(H, L, ["ae-p2", "fh"], references=refs, cfg=SolverConfig(tol=1e-12, max_iter=20_000), stride=10)
    assert time_to_error(res["ae-p2"]["trajectory"], 1e-3) < time_to_error(res["fh"]["trajectory"], 1e-3)
