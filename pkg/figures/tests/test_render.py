import numpy as np
import pytest

from ammab_figures.render import (
    PlotSpecError,
    load_plot_spec,
    main,
    read_curve,
    render,
)

HEADER = "t,mean_regret,p10,p90\n"


def _write_csv(path, rows):
    with open(path, "w") as fh:
        fh.write(HEADER)
        for r in rows:
            fh.write(",".join(str(x) for x in r) + "\n")


def _fake_rows(n, scale):
    return [(100 * (i + 1), scale * (i + 1), scale * i, scale * (i + 2)) for i in range(n)]


@pytest.fixture()
def two_panel_spec(tmp_path):
    for panel in ("left", "right"):
        d = tmp_path / panel
        d.mkdir()
        for j, pol in enumerate(("cg", "ucb", "etc")):
            _write_csv(d / f"regret_{pol}.csv", _fake_rows(20, j + 1))
    lines = ['[output]\npath = "out/fig"\n']
    for panel in ("left", "right"):
        lines.append(f'[[panel]]\ntitle = "{panel}"\n')
        for pol in ("cg", "ucb", "etc"):
            lines.append(
                f'[[panel.curve]]\nlabel = "{pol}"\ncsv = "{panel}/regret_{pol}.csv"\n'
            )
    spec_path = tmp_path / "plots.toml"
    spec_path.write_text("\n".join(lines))
    return spec_path


def test_read_curve_round_trip(tmp_path):
    path = tmp_path / "c.csv"
    rows = _fake_rows(5, 2.5)
    _write_csv(path, rows)
    data = read_curve(path)
    assert np.array_equal(data.t, [r[0] for r in rows])
    assert np.array_equal(data.mean, [r[1] for r in rows])
    assert np.array_equal(data.p10, [r[2] for r in rows])
    assert np.array_equal(data.p90, [r[3] for r in rows])


def test_read_curve_rejects_bad_input(tmp_path):
    missing = tmp_path / "nope.csv"
    with pytest.raises(PlotSpecError):
        read_curve(missing)

    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(PlotSpecError):
        read_curve(empty)

    header_only = tmp_path / "header.csv"
    header_only.write_text(HEADER)
    with pytest.raises(PlotSpecError):
        read_curve(header_only)

    bad_header = tmp_path / "bad.csv"
    bad_header.write_text("round,regret\n1,2\n")
    with pytest.raises(PlotSpecError):
        read_curve(bad_header)

    non_numeric = tmp_path / "nan.csv"
    non_numeric.write_text(HEADER + "1,two,3,4\n")
    with pytest.raises(PlotSpecError):
        read_curve(non_numeric)


def test_two_panel_six_curves(two_panel_spec):
    spec = load_plot_spec(two_panel_spec)
    assert len(spec.panels) == 2
    fig = render(spec)
    axes = fig.get_axes()
    assert len(axes) == 2
    for ax in axes:
        assert len(ax.lines) == 3
        assert len(ax.collections) == 3  # one decile band per curve
    assert spec.output.with_suffix(".png").exists()
    assert spec.output.with_suffix(".svg").exists()


def test_plotted_values_equal_csv(two_panel_spec):
    spec = load_plot_spec(two_panel_spec)
    fig = render(spec)
    for ax, panel in zip(fig.get_axes(), spec.panels):
        for line, curve in zip(ax.lines, panel.curves):
            data = read_curve(curve.csv_path)
            assert np.array_equal(line.get_xdata(), data.t)
            assert np.array_equal(line.get_ydata(), data.mean)


def test_single_curve_single_panel(tmp_path):
    _write_csv(tmp_path / "regret_ucb.csv", _fake_rows(10, 1.0))
    spec_path = tmp_path / "plots.toml"
    spec_path.write_text(
        '[output]\npath = "fig"\n\n[[panel]]\ntitle = "solo"\n\n'
        '[[panel.curve]]\nlabel = "ucb"\ncsv = "regret_ucb.csv"\n'
    )
    assert main(["--spec", str(spec_path)]) == 0
    fig_png = tmp_path / "fig.png"
    assert fig_png.exists()


def test_cli_empty_csv_fails(tmp_path, capsys):
    (tmp_path / "regret_ucb.csv").write_text(HEADER)
    spec_path = tmp_path / "plots.toml"
    spec_path.write_text(
        '[output]\npath = "fig"\n\n[[panel]]\ntitle = "solo"\n\n'
        '[[panel.curve]]\nlabel = "ucb"\ncsv = "regret_ucb.csv"\n'
    )
    assert main(["--spec", str(spec_path)]) == 1
    assert "no data rows" in capsys.readouterr().err
    assert not (tmp_path / "fig.png").exists()


def test_cli_missing_csv_fails(tmp_path, capsys):
    spec_path = tmp_path / "plots.toml"
    spec_path.write_text(
        '[output]\npath = "fig"\n\n[[panel]]\ntitle = "solo"\n\n'
        '[[panel.curve]]\nlabel = "ucb"\ncsv = "absent.csv"\n'
    )
    assert main(["--spec", str(spec_path)]) == 1
    assert "missing CSV" in capsys.readouterr().err


def test_spec_without_panels_fails(tmp_path):
    spec_path = tmp_path / "plots.toml"
    spec_path.write_text('[output]\npath = "fig"\n')
    with pytest.raises(PlotSpecError):
        load_plot_spec(spec_path)


def test_log_scale_toggle(tmp_path):
    _write_csv(tmp_path / "regret_ucb.csv", _fake_rows(10, 1.0))
    spec_path = tmp_path / "plots.toml"
    spec_path.write_text(
        '[output]\npath = "fig"\nlog_scale = true\n\n[[panel]]\ntitle = "solo"\n\n'
        '[[panel.curve]]\nlabel = "ucb"\ncsv = "regret_ucb.csv"\n'
    )
    fig = render(load_plot_spec(spec_path))
    assert fig.get_axes()[0].get_yscale() == "log"
