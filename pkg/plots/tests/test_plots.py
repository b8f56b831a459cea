import statistics
import subprocess
import sys
from pathlib import Path

import pytest

from queryplots.compare import plot_strategy_comparison, rounds_by_strategy
from queryplots.exponent import plot_exponent, theoretical_exponent
from queryplots.rows import (
    RowError,
    effective_exponent,
    read_simulate_rows,
    read_sweep_rows,
)

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture(scope="module")
def sample_sweep_text():
    return (DATA / "sample_sweep.csv").read_text()


# -- parsing -----------------------------------------------------------------


def test_read_sweep_rows(sample_sweep_text):
    rows = read_sweep_rows(sample_sweep_text)
    assert len(rows) == 63  # 3 xi x 3 n x 7 trials
    assert {r.xi for r in rows} == {0.55, 0.6, 0.7}
    assert all(r.i == 1 for r in rows)


def test_malformed_row_reports_number(sample_sweep_text):
    lines = sample_sweep_text.splitlines()
    lines[5] = "0.55,400,notanumber,1,3,0,240,100,1"
    with pytest.raises(RowError, match="row 6"):
        read_sweep_rows("\n".join(lines))


def test_missing_header_reports_row():
    with pytest.raises(RowError, match="row 1"):
        read_sweep_rows("1,2,3\n")


def test_empty_file_errors():
    with pytest.raises(RowError):
        read_sweep_rows("")


def test_effective_exponent_matches_rows(sample_sweep_text):
    for r in read_sweep_rows(sample_sweep_text):
        assert effective_exponent(r.n, r.d) == r.i


# -- exponent plot -----------------------------------------------------------


def test_plot_exponent_smoke(sample_sweep_text, tmp_path):
    out = tmp_path / "exponent.png"
    pts = plot_exponent(sample_sweep_text, out)
    assert out.exists() and out.stat().st_size > 0
    assert len(pts) == 9  # 3 xi values x 3 sizes


def test_plot_exponent_rejects_single_xi(sample_sweep_text, tmp_path):
    rows = [
        ln
        for ln in sample_sweep_text.splitlines()
        if ln.startswith(("#", "xi")) or ln.startswith("0.6,")
    ]
    with pytest.raises(RowError, match="2 distinct xi"):
        plot_exponent("\n".join(rows), tmp_path / "nope.png")


def test_overlay_matches_one_minus_i_xi(sample_sweep_text):
    rows = read_sweep_rows(sample_sweep_text)
    for r in rows:
        assert theoretical_exponent(r.xi, r.i) == pytest.approx(1 - r.i * r.xi)


def test_fitted_exponent_near_theory(sample_sweep_text):
    # regressing log(median rounds) on log n removes the constant and most of
    # the log factor; the checked-in data lands within 0.25 of 1 - xi
    import math
    from collections import defaultdict

    rows = read_sweep_rows(sample_sweep_text)
    med = defaultdict(list)
    for r in rows:
        med[(r.xi, r.n)].append(r.rounds)
    for xi in sorted({r.xi for r in rows}):
        ns = sorted({r.n for r in rows if r.xi == xi})
        pts = [(math.log(n), math.log(statistics.median(med[(xi, n)]))) for n in ns]
        xb = sum(x for x, _ in pts) / len(pts)
        yb = sum(y for _, y in pts) / len(pts)
        slope = sum((x - xb) * (y - yb) for x, y in pts) / sum(
            (x - xb) ** 2 for x, _ in pts
        )
        assert abs(slope - theoretical_exponent(xi, 1)) <= 0.25


def test_plot_exponent_from_fresh_sweep(tmp_path):
    out_csv = tmp_path / "fresh.csv"
    r = subprocess.run(
        [
            sys.executable, "-m", "querygames.cli", "sweep",
            "--xi", "0.55,0.7", "--n", "300", "--trials", "2",
            "--seed", "3", "--out", str(out_csv),
        ],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert r.returncode == 0, r.stderr
    out_png = tmp_path / "fresh.png"
    pts = plot_exponent(out_csv.read_text(), out_png)
    assert out_png.exists() and out_png.stat().st_size > 0
    for xi, n, _emp, i in pts:
        assert i == 1  # these scales sit in the first regime


def test_plot_exponent_deterministic(sample_sweep_text, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    plot_exponent(sample_sweep_text, a)
    plot_exponent(sample_sweep_text, b)
    assert a.read_bytes() == b.read_bytes()


# -- comparison plot -----------------------------------------------------------


def test_plot_comparison_smoke(tmp_path):
    texts = [
        (DATA / "sample_comparison_phase_pair.csv").read_text(),
        (DATA / "sample_comparison_sp_elim.csv").read_text(),
    ]
    out = tmp_path / "compare.png"
    grouped = plot_strategy_comparison(texts, out)
    assert out.exists() and out.stat().st_size > 0
    assert set(grouped) == {"phase-pair", "sp-elim"}
    # known ordering on the diameter-2 ensemble
    assert statistics.median(grouped["phase-pair"]) <= statistics.median(grouped["sp-elim"])


def test_plot_comparison_empty_input_errors(tmp_path):
    with pytest.raises(RowError):
        plot_strategy_comparison([""], tmp_path / "x.png")


def test_rounds_by_strategy_groups():
    text = (DATA / "sample_comparison_sp_elim.csv").read_text()
    grouped = rounds_by_strategy(read_simulate_rows(text))
    assert list(grouped) == ["sp-elim"]
    assert len(grouped["sp-elim"]) == 10


def test_cli_entrypoints(tmp_path):
    out = tmp_path / "cli.png"
    r = subprocess.run(
        [
            sys.executable, "-m", "queryplots.exponent",
            "--in", str(DATA / "sample_sweep.csv"), "--out", str(out),
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert r.returncode == 0, r.stderr
    assert out.exists()
    r = subprocess.run(
        [
            sys.executable, "-m", "queryplots.compare",
            "--in", str(DATA / "sample_comparison_phase_pair.csv"),
            str(DATA / "sample_comparison_sp_elim.csv"),
            "--out", str(tmp_path / "cli2.png"),
        ],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert r.returncode == 0, r.stderr
