import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "querygames.cli"]


def run(*args, stdin=None):
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, input=stdin, timeout=300
    )


@pytest.fixture(scope="module")
def graphs(tmp_path_factory):
    root = tmp_path_factory.mktemp("graphs")
    paths = {}
    for family, n, name in (("path", 8, "p8"), ("complete", 5, "k5"), ("complete", 6, "k6")):
        out = root / f"{name}.txt"
        assert run("make", "--family", family, "--n", str(n), "--out", str(out)).returncode == 0
        paths[name] = out
    return paths


@pytest.fixture(scope="module")
def instance_file(tmp_path_factory):
    from querygames.hardness import PLANTED_COVER_INSTANCE

    path = tmp_path_factory.mktemp("inst") / "planted.txt"
    path.write_text(PLANTED_COVER_INSTANCE)
    return path


# -- compute -----------------------------------------------------------------


def test_compute_path_pair(graphs):
    r = run("compute", "--graph", str(graphs["p8"]), "--kind", "pair")
    assert r.returncode == 0 and r.stdout.strip() == "3"


def test_compute_complete_edge(graphs):
    r = run("compute", "--graph", str(graphs["k5"]), "--kind", "edge")
    assert r.returncode == 0 and r.stdout.strip() == "4"


def test_compute_oversized_graph_resource_exit(tmp_path):
    out = tmp_path / "big.txt"
    run("make", "--family", "path", "--n", "30", "--out", str(out))
    r = run("compute", "--graph", str(out), "--kind", "pair")
    assert r.returncode == 3
    assert "resource" in r.stderr


def test_compute_tree_depth_matches_value(graphs):
    r = run("compute", "--graph", str(graphs["p8"]), "--kind", "pair", "--tree")
    assert r.returncode == 0
    assert r.stdout.splitlines()[0] == "value 3"
    assert "target" in r.stdout


# -- simulate ----------------------------------------------------------------


def test_simulate_sp_elim_exact_rounds(graphs):
    r = run(
        "simulate",
        "--graph",
        str(graphs["k6"]),
        "--kind",
        "edge",
        "--strategy",
        "sp-elim",
        "--trials",
        "5",
        "--seed",
        "3",
    )
    assert r.returncode == 0
    rows = [ln for ln in r.stdout.splitlines() if ln and not ln.startswith(("#", "trial"))]
    assert len(rows) == 5
    for row in rows:
        fields = row.split(",")
        assert fields[7] == "5" and fields[8] == "1"  # rounds == n-1, success


def test_simulate_byte_stable_and_jobs_equivalent(graphs, tmp_path):
    args = [
        "simulate",
        "--graph",
        str(graphs["k6"]),
        "--kind",
        "edge",
        "--strategy",
        "random",
        "--trials",
        "6",
        "--seed",
        "11",
    ]
    a = run(*args, "--out", str(tmp_path / "a.csv"))
    b = run(*args, "--out", str(tmp_path / "b.csv"))
    c = run(*args, "--jobs", "2", "--out", str(tmp_path / "c.csv"))
    assert a.returncode == b.returncode == c.returncode == 0
    ta = (tmp_path / "a.csv").read_bytes()
    assert ta == (tmp_path / "b.csv").read_bytes()
    assert ta == (tmp_path / "c.csv").read_bytes()


def test_simulate_unknown_strategy_usage_exit(graphs):
    r = run(
        "simulate", "--graph", str(graphs["k5"]), "--kind", "edge", "--strategy", "nope"
    )
    assert r.returncode == 2
    assert "unknown strategy" in r.stderr


# -- sweep -------------------------------------------------------------------


def test_sweep_small_grid(tmp_path):
    out = tmp_path / "sweep.csv"
    r = run(
        "sweep",
        "--xi",
        "0.55,0.7",
        "--n",
        "300",
        "--trials",
        "2",
        "--seed",
        "5",
        "--out",
        str(out),
    )
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# schema: sweep-v1"
    assert lines[1] == "xi,n,d,i,trial,seed,budget,rounds,success"
    rows = [ln.split(",") for ln in lines[2:]]
    assert len(rows) == 4
    assert all(r[3] == "1" for r in rows)  # effective exponent 1 at these scales


def test_sweep_empty_xi_usage_error():
    r = run("sweep", "--xi", "", "--n", "100")
    assert r.returncode == 2


def test_sweep_out_of_range_xi_usage_error():
    r = run("sweep", "--xi", "1.5", "--n", "100")
    assert r.returncode == 2


# -- reduction workflow ------------------------------------------------------


def test_reduce_writes_graph_and_reports_diameter(instance_file, tmp_path):
    out = tmp_path / "reduction.txt"
    r = run("reduce", "--instance", str(instance_file), "--out", str(out))
    assert r.returncode == 0
    assert out.read_text().startswith("1077 ")
    assert "measured diameter: 4" in r.stderr


def test_verify_lemma_positive_exit_zero(instance_file):
    r = run("verify-lemma", "--instance", str(instance_file), "--random-algs", "5")
    assert r.returncode == 0
    assert "verdict: pass" in r.stdout


def test_verify_lemma_bad_instance_usage_exit(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("6 2 2\n1 2\n4 5 6\n")
    r = run("verify-lemma", "--instance", str(bad))
    assert r.returncode == 2


# -- expansion ---------------------------------------------------------------


def test_expansion_csv(tmp_path):
    out = tmp_path / "exp.csv"
    r = run(
        "expansion",
        "--gnp",
        "400,0.25",
        "--checks",
        "sphere,nice",
        "--trials",
        "20",
        "--seed",
        "9",
        "--out",
        str(out),
    )
    assert r.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# schema: expansion-v1"
    assert lines[1] == "check,params,observed,reference,ratio,passed"
    assert any(ln.startswith("sphere-growth,") for ln in lines)
    assert any(ln.startswith("niceness,") for ln in lines)


# -- interactive play --------------------------------------------------------


def test_play_scripted_bisection(tmp_path):
    g = tmp_path / "p4.txt"
    run("make", "--family", "path", "--n", "4", "--out", str(g))
    r = run(
        "play",
        "--graph",
        str(g),
        "--kind",
        "edge",
        "--side",
        "algorithm",
        stdin="1 2\n0 1\n",
    )
    assert r.returncode == 0
    assert "target located" in r.stdout and "after 2 rounds" in r.stdout


def test_play_rejects_non_edge_without_charging(tmp_path):
    g = tmp_path / "p4.txt"
    run("make", "--family", "path", "--n", "4", "--out", str(g))
    r = run(
        "play",
        "--graph",
        str(g),
        "--kind",
        "edge",
        "--side",
        "algorithm",
        stdin="0 2\n1 2\n0 1\n",
    )
    assert r.returncode == 0
    assert "invalid query" in r.stdout
    assert "after 2 rounds" in r.stdout  # the bad query cost no round


def test_play_human_adversary_on_triangle(tmp_path):
    g = tmp_path / "k3.txt"
    run("make", "--family", "complete", "--n", "3", "--out", str(g))
    r = run(
        "play",
        "--graph",
        str(g),
        "--kind",
        "edge",
        "--side",
        "adversary",
        stdin="0\n1\n2\n2\n",
    )
    assert r.returncode == 0
    assert "after 2 rounds" in r.stdout
