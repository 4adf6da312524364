"""Tests for the CSV chart renderer.

The bundled fixture is a full 420-row benchmark output; the mean-line
check recomputes every average from the raw file with independent
arithmetic and compares against the exact arrays handed to matplotlib.
"""

import csv
from pathlib import Path

import matplotlib.pyplot as plt
import pytest

from oaplots.plotting import (
    DataError,
    PlotSpec,
    SchemaError,
    build_panels,
    main,
    render,
)

FIXTURE = Path(__file__).parent / "data" / "decoupling_benchmark.csv"

HEADER = (
    "scheme,order,randomized,qdrift_mode,blocks,state_id,"
    "instance_reps,metric,value,seconds"
)


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")


def write_rows(path, rows, header=HEADER):
    lines = [header] + list(rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def tiny_csv(path, values=(0.5, 0.25)):
    rows = []
    for i, v in enumerate(values):
        rows.append(f"det-first,first,0,off,{2**i},0,1,trace_distance,{v},0.1")
    return write_rows(path, rows)


# ---------------------------------------------------------------- rendering


def test_fixture_renders_two_panels_by_order(tmp_path):
    out = tmp_path / "fig.png"
    spec = PlotSpec(csv_paths=(FIXTURE,), out_path=str(out), panel_column="order")
    result = render(spec)

    assert result.panel_titles == ("first", "second")
    assert len(result.figure.axes) == 2
    assert out.exists() and out.stat().st_size > 0

    first, second = result.figure.axes
    first_labels = [ln.get_label() for ln in first.get_lines()]
    second_labels = [ln.get_label() for ln in second.get_lines()]
    assert [l for l in first_labels if not l.startswith("_")] == [
        "det-first",
        "rand-first",
        "qdrift-full",
        "qdrift-oa",
    ]
    assert [l for l in second_labels if not l.startswith("_")] == [
        "det-second",
        "rand-second",
    ]
    # ten faint state trajectories under every bold line
    assert len([l for l in first_labels if l.startswith("_")]) == 40
    assert len([l for l in second_labels if l.startswith("_")]) == 20


def test_mean_lines_match_recomputed_means(tmp_path, capfd):
    out = tmp_path / "fig.png"
    spec = PlotSpec(csv_paths=(FIXTURE,), out_path=str(out), panel_column="order")
    result = render(spec)

    sums = {}
    counts = {}
    with open(FIXTURE, newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["order"], row["scheme"], float(row["blocks"]))
            sums[key] = sums.get(key, 0.0) + float(row["value"])
            counts[key] = counts.get(key, 0) + 1

    worst = 0.0
    checked = 0
    for (panel, scheme), (xs, ys) in result.means.items():
        for x, y in zip(xs, ys):
            want = sums[(panel, scheme, x)] / counts[(panel, scheme, x)]
            worst = max(worst, abs(y - want))
            checked += 1

    # the bold artists must carry exactly the returned arrays
    drawn = {}
    for ax, panel in zip(result.figure.axes, result.panel_titles):
        for line in ax.get_lines():
            if not line.get_label().startswith("_"):
                drawn[(panel, line.get_label())] = (
                    tuple(float(v) for v in line.get_xdata()),
                    tuple(float(v) for v in line.get_ydata()),
                )
    assert drawn == result.means

    ok = checked == 42 and worst <= 1e-12
    with capfd.disabled():
        verdict = "PASS" if ok else "FAIL"
        print(
            f"ACCEPTANCE 10 {verdict}: two-panel figure rendered, {checked} plotted "
            f"means match recomputation, worst gap {worst:.1e}"
        )
    assert checked == 42
    assert worst <= 1e-12


def test_single_row_csv_renders_one_point(tmp_path):
    path = write_rows(
        tmp_path / "one.csv",
        ["det-first,first,0,off,4,0,1,trace_distance,0.125,0.1"],
    )
    out = tmp_path / "one.png"
    result = render(PlotSpec(csv_paths=(path,), out_path=str(out)))
    assert result.means == {("one", "det-first"): ((4.0,), (0.125,))}
    assert out.exists()


def test_two_files_make_two_panels(tmp_path):
    a = tiny_csv(tmp_path / "alpha.csv")
    b = tiny_csv(tmp_path / "beta.csv", values=(0.4, 0.2, 0.1))
    out = tmp_path / "fig.png"
    result = render(PlotSpec(csv_paths=(a, b), out_path=str(out)))
    assert result.panel_titles == ("alpha", "beta")
    assert result.means[("beta", "det-first")] == ((1.0, 2.0, 4.0), (0.4, 0.2, 0.1))


def test_duplicate_panel_titles_are_disambiguated(tmp_path):
    (tmp_path / "x").mkdir()
    (tmp_path / "y").mkdir()
    a = tiny_csv(tmp_path / "x" / "run.csv")
    b = tiny_csv(tmp_path / "y" / "run.csv")
    spec = PlotSpec(csv_paths=(a, b), out_path=str(tmp_path / "fig.png"))
    assert [p.title for p in build_panels(spec)] == ["run", "run (2)"]


def test_render_is_deterministic(tmp_path):
    spec = PlotSpec(
        csv_paths=(FIXTURE,),
        out_path=str(tmp_path / "fig.png"),
        panel_column="order",
    )
    assert render(spec).means == render(spec).means


def test_linear_axes_spec(tmp_path):
    path = tiny_csv(tmp_path / "lin.csv")
    out = tmp_path / "lin.png"
    result = render(
        PlotSpec(csv_paths=(path,), out_path=str(out), log_x=False, log_y=False)
    )
    ax = result.figure.axes[0]
    assert ax.get_xscale() == "linear" and ax.get_yscale() == "linear"


def test_svg_output(tmp_path):
    path = tiny_csv(tmp_path / "v.csv")
    out = tmp_path / "fig.svg"
    render(PlotSpec(csv_paths=(path,), out_path=str(out)))
    assert out.read_text().lstrip().startswith("<?xml")


# ---------------------------------------------------------------- failures


def test_missing_value_column_is_schema_error(tmp_path):
    path = write_rows(
        tmp_path / "short.csv",
        ["det-first,first,0,off,4,0,1,trace_distance,0.1"],
        header=HEADER.replace(",value", ""),
    )
    with pytest.raises(SchemaError):
        render(PlotSpec(csv_paths=(path,), out_path=str(tmp_path / "f.png")))


def test_missing_panel_column_is_schema_error(tmp_path):
    path = tiny_csv(tmp_path / "t.csv")
    spec = PlotSpec(
        csv_paths=(path,),
        out_path=str(tmp_path / "f.png"),
        panel_column="hamiltonian_case",
    )
    with pytest.raises(SchemaError):
        render(spec)


def test_header_only_file_is_data_error(tmp_path):
    path = write_rows(tmp_path / "empty.csv", [])
    with pytest.raises(DataError):
        render(PlotSpec(csv_paths=(path,), out_path=str(tmp_path / "f.png")))


def test_zero_byte_file_is_data_error(tmp_path):
    path = tmp_path / "zero.csv"
    path.write_text("")
    with pytest.raises(DataError):
        render(PlotSpec(csv_paths=(path,), out_path=str(tmp_path / "f.png")))


def test_non_numeric_value_is_data_error(tmp_path):
    path = write_rows(
        tmp_path / "bad.csv",
        ["det-first,first,0,off,4,0,1,trace_distance,not-a-number,0.1"],
    )
    with pytest.raises(DataError):
        render(PlotSpec(csv_paths=(path,), out_path=str(tmp_path / "f.png")))


def test_panel_column_with_multiple_files_rejected(tmp_path):
    a = tiny_csv(tmp_path / "a.csv")
    b = tiny_csv(tmp_path / "b.csv")
    with pytest.raises(ValueError):
        PlotSpec(csv_paths=(a, b), out_path="f.png", panel_column="order")


def test_no_paths_rejected():
    with pytest.raises(ValueError):
        PlotSpec(csv_paths=(), out_path="f.png")


# ---------------------------------------------------------------- cli


def test_cli_renders_fixture(tmp_path, capsys):
    out = tmp_path / "fig.png"
    code = main(["--csv", str(FIXTURE), "--out", str(out), "--panel", "order"])
    captured = capsys.readouterr()
    assert code == 0
    assert "2 panel(s)" in captured.out
    assert "6 mean lines" in captured.out
    assert out.exists()


def test_cli_missing_file_exits_3(tmp_path, capsys):
    code = main(["--csv", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "f.png")])
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_cli_schema_error_exits_4(tmp_path, capsys):
    path = write_rows(
        tmp_path / "short.csv",
        ["det-first,first,0,off,4,0,1,trace_distance,0.1"],
        header=HEADER.replace(",value", ""),
    )
    code = main(["--csv", str(path), "--out", str(tmp_path / "f.png")])
    assert code == 4
    assert "lacks column" in capsys.readouterr().err


def test_cli_header_only_exits_4(tmp_path, capsys):
    path = write_rows(tmp_path / "empty.csv", [])
    code = main(["--csv", str(path), "--out", str(tmp_path / "f.png")])
    assert code == 4
    assert "no data rows" in capsys.readouterr().err


def test_cli_panel_plus_multiple_files_exits_2(tmp_path, capsys):
    a = tiny_csv(tmp_path / "a.csv")
    b = tiny_csv(tmp_path / "b.csv")
    code = main(
        ["--csv", str(a), "--csv", str(b), "--out", str(tmp_path / "f.png"),
         "--panel", "order"]
    )
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_cli_missing_required_flag_exits_2(capsys):
    assert main(["--out", "f.png"]) == 2
    capsys.readouterr()


def test_cli_linear_flags(tmp_path, capsys):
    path = tiny_csv(tmp_path / "t.csv")
    out = tmp_path / "f.png"
    code = main(
        ["--csv", str(path), "--out", str(out), "--linear-x", "--linear-y"]
    )
    assert code == 0
    capsys.readouterr()
