import math
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rqae import ConfigurationError, critical_points, oracle_cost, schedule_eis
from rqae.cli import main
from rqae.harness import (
    AlgorithmSpec,
    CompareRow,
    DepthHistogramRow,
    SweepRow,
    compare,
    default_a_grid,
    default_compare_specs,
    depth_stats,
    emit_csv,
    iteration_of,
    read_csv,
    run_trials,
    sweep,
)
from rqae.plotting import emit_plot

finite = st.floats(allow_nan=False, allow_infinity=False)


def test_default_a_grid():
    grid = default_a_grid()
    assert len(grid) == 256
    assert grid[0] == 1 / 257 and grid[-1] == 256 / 257


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        AlgorithmSpec("iqae")
    with pytest.raises(ConfigurationError):
        AlgorithmSpec("mlae")
    with pytest.raises(ConfigurationError):
        AlgorithmSpec("rqae-a", K=0)


@pytest.mark.parametrize("name", ["mc", "mlae-lis", "mlae-eis", "djqae", "rqae-u", "rqae-a", "qpe"])
def test_sweep_at_zero_is_exact(name):
    rows = sweep(AlgorithmSpec(name, K=3, R=8, t=3, grid_size=256), [0.0], trials=100, seed=1)
    assert rows[0].bias == 0.0 and rows[0].rmse == 0.0 and rows[0].crlb == 0.0


def test_sweep_rows_sorted_and_consistent():
    rows = sweep(AlgorithmSpec("mlae-eis", K=3, R=8), [0.7, 0.1, 0.4], trials=64, seed=2)
    assert [r.a for r in rows] == [0.1, 0.4, 0.7]
    for r in rows:
        assert r.rmse**2 - r.bias**2 >= -1e-12
        assert r.crlb > 0
        assert r.trials == 64


def test_sweep_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        sweep(AlgorithmSpec("mc"), [0.5], trials=0)
    with pytest.raises(ConfigurationError):
        sweep(AlgorithmSpec("mc"), [], trials=5)


def test_run_trials_independent_of_workers():
    spec = AlgorithmSpec("rqae-a", K=3, R=8, grid_size=256)
    amps = np.linspace(0.01, 0.99, 600)
    one = run_trials(spec, amps, seed=4, workers=1)
    many = run_trials(spec, amps, seed=4, workers=4)
    assert np.array_equal(one.estimates, many.estimates)
    assert np.array_equal(one.shots, many.shots)


def test_compare_costs():
    specs = [AlgorithmSpec("mlae-eis", K=4, R=32), AlgorithmSpec("rqae-u", K=4, R=16), AlgorithmSpec("mc", R=64)]
    rows = compare(specs, samples=64, seed=3)
    assert rows[0].mean_cost == oracle_cost(schedule_eis(4, 32))
    K, R = 4, 16
    low = sum(R * 2 ** (i - 1) for i in range(1, K + 1))
    assert low <= rows[1].mean_cost <= sum(R * 2**i for i in range(1, K + 1))
    assert rows[2].mean_cost == 64
    assert all(r.rmse >= 0 for r in rows)


def test_default_compare_specs():
    specs = default_compare_specs(("mc", "rqae-a", "qpe"), k_max=4, t_max=5, mc_max_exp=6)
    assert [s.R for s in specs if s.name == "mc"] == [16, 32, 64]
    assert {s.R for s in specs if s.name == "rqae-a"} == {16}
    assert [s.t for s in specs if s.name == "qpe"] == [2, 3, 4, 5]
    with pytest.raises(ConfigurationError):
        default_compare_specs(("mlae",))


def test_depth_stats_uniform():
    K, R, trials = 4, 32, 1024
    rows = depth_stats("uniform", K, R, 0.3, trials, seed=5)
    assert [r.depth for r in rows] == list(range(1, 2**K))
    for i in range(1, K + 1):
        members = [r for r in rows if iteration_of(r.depth) == i]
        assert sum(r.mean_shots for r in members) == pytest.approx(R, abs=1e-9)
        expected = R / 2 ** (i - 1)
        # multinomial mean, standard error sqrt(R p (1 - p) / trials)
        p = 1 / 2 ** (i - 1)
        se = math.sqrt(R * p * (1 - p) / trials)
        for r in members:
            assert abs(r.mean_shots - expected) <= 5 * se + 1e-12


def test_iteration_of():
    assert [iteration_of(m) for m in (1, 2, 3, 4, 7, 8, 31)] == [1, 2, 2, 3, 3, 4, 5]


def test_csv_empty_and_single(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path, SweepRow)
    assert path.read_bytes() == b"a,bias,rmse,crlb,trials\n"
    emit_csv([SweepRow(0.5, -0.001, 0.01, 0.004, 1024)], path)
    lines = path.read_bytes().split(b"\n")
    assert lines[0] == b"a,bias,rmse,crlb,trials" and len(lines) == 3 and lines[2] == b""
    with pytest.raises(ValueError):
        emit_csv([], path)


@given(st.lists(st.builds(SweepRow, finite, finite, finite, finite, st.integers(0, 10**6)), max_size=8))
@settings(max_examples=50)
def test_csv_round_trip(tmp_path_factory, rows):
    path = tmp_path_factory.mktemp("csv") / "rows.csv"
    emit_csv(rows, path, SweepRow)
    assert read_csv(path, SweepRow) == rows


def test_csv_round_trip_other_types(tmp_path):
    rows = [CompareRow("rqae-a", 5, 123.5, 1e-3), CompareRow("mc", 16, 16.0, 0.1)]
    emit_csv(rows, tmp_path / "c.csv")
    assert read_csv(tmp_path / "c.csv", CompareRow) == rows
    hist = [DepthHistogramRow(1, 32.0), DepthHistogramRow(2, 15.25)]
    emit_csv(hist, tmp_path / "h.csv")
    assert read_csv(tmp_path / "h.csv", DepthHistogramRow) == hist


def test_csv_io_error(tmp_path):
    with pytest.raises(OSError, match="cannot write CSV"):
        emit_csv([], tmp_path / "missing" / "x.csv", SweepRow)


def _dashed_markers(svg):
    return re.findall(r'<g id="critical-marker-\d+">', svg)


def test_plot_markers(tmp_path):
    rows = [SweepRow(a, 0.01 * a, 0.02, 0.01, 10) for a in np.linspace(0.05, 0.95, 10)]
    path = emit_plot(rows, tmp_path / "s.svg", x="a", y=("bias", "rmse"), markers=critical_points(17).points)
    svg = path.read_text()
    assert len(_dashed_markers(svg)) == 16
    assert svg.count("stroke-dasharray") >= 16


def test_plot_empty(tmp_path):
    path = emit_plot([], tmp_path / "e.svg", x="a", y=("bias",))
    svg = path.read_text()
    assert svg.startswith("<?xml") and "</svg>" in svg
    assert not _dashed_markers(svg)


def test_plot_loglog_ticks(tmp_path):
    rows = [CompareRow("mc", 2**e, float(2**e), 2.0 ** (-e / 2)) for e in range(4, 13)]
    path = emit_plot(rows, tmp_path / "c.svg", x="mean_cost", y="rmse", group="algorithm", loglog=True)
    assert "</svg>" in path.read_text()


def test_plot_is_reproducible(tmp_path):
    rows = [SweepRow(a, 0.0, 0.01, 0.01, 1) for a in (0.1, 0.5, 0.9)]
    a = emit_plot(rows, tmp_path / "a.svg", x="a", y="rmse").read_bytes()
    b = emit_plot(rows, tmp_path / "b.svg", x="a", y="rmse").read_bytes()
    assert a == b


def test_plot_io_error(tmp_path):
    with pytest.raises(OSError, match="cannot write plot"):
        emit_plot([], tmp_path / "missing" / "x.svg", x="a", y="rmse")


def test_cli_verify(tmp_path, capsys):
    assert main(["verify", "--phi-samples", "5", "--m-max", "8", "--out", str(tmp_path / "v.csv")]) == 0
    assert "PASS" in capsys.readouterr().out
    assert main(["verify", "--phi-samples", "3", "--tol", "0"]) == 2


def test_cli_sweep_outputs(tmp_path):
    out, plot = tmp_path / "s.csv", tmp_path / "s.svg"
    argv = ["sweep", "--algo", "mlae-eis", "--grid-size", "5", "--trials", "16", "--out", str(out),
            "--plot", str(plot), "--mark-critical", "17"]
    assert main(argv) == 0
    rows = read_csv(out, SweepRow)
    assert len(rows) == 5 and all(r.trials == 16 for r in rows)
    assert len(_dashed_markers(plot.read_text())) == 16


def test_cli_explicit_depths(tmp_path, capsys):
    assert main(["sweep", "--algo", "mlae", "--depths", "1,2,4", "--R", "8", "--grid-size", "2", "--trials", "4"]) == 0
    assert "a=" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--algo", "iqae"],
        ["sweep", "--K", "0", "--trials", "2", "--grid-size", "1"],
        ["sweep", "--algo", "mlae"],
        ["sweep", "--a-min", "0.9", "--a-max", "0.1"],
        ["compare", "--algos", "mc,bogus", "--samples", "4"],
        ["depth-stats", "--trials", "0"],
        ["depth-stats", "--a", "1.5", "--trials", "2"],
        ["verify", "--m-max", "0"],
        ["frobnicate"],
    ],
)
def test_cli_configuration_errors(argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_cli_io_error(tmp_path):
    argv = ["depth-stats", "--K", "2", "--trials", "4", "--out", str(tmp_path / "nope" / "d.csv")]
    assert main(argv) == 3


def test_cli_compare_and_depth_stats(tmp_path):
    out = tmp_path / "c.csv"
    argv = ["compare", "--algos", "mc,rqae-u", "--samples", "32", "--k-max", "3", "--mc-max-exp", "5", "--out", str(out),
            "--plot", str(tmp_path / "c.svg")]
    assert main(argv) == 0
    assert [(r.algorithm, r.parameter) for r in read_csv(out, CompareRow)] == [
        ("mc", 16), ("mc", 32), ("rqae-u", 1), ("rqae-u", 2), ("rqae-u", 3)]
    out = tmp_path / "d.csv"
    assert main(["depth-stats", "--rule", "uniform", "--K", "3", "--R", "8", "--trials", "8", "--out", str(out)]) == 0
    assert len(read_csv(out, DepthHistogramRow)) == 7
