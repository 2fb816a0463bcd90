"""figgen: schema handling, exact point passthrough, slope checks."""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from figgen import EmptyInputError, FigureSpec, SchemaError, fitted_slope, render
from figgen.cli import main as cli_main
from figgen.render import CSV_FIELDS

HEADER = ",".join(CSV_FIELDS)

# published convergence table (nu = 1) and vanishing-viscosity table; the L2
# column of the convergence file mirrors the harness output (first-order too)
TAUS = [0.01 / 2**i for i in range(6)]
T1_B1 = [0.0018, 8.827e-4, 4.401e-4, 2.197e-4, 1.098e-4, 5.487e-5]
T1_B2 = [0.0013, 6.242e-4, 3.112e-4, 1.554e-4, 7.763e-5, 3.880e-5]
T1_L2 = [3.912e-3, 1.953e-3, 9.757e-4, 4.877e-4, 2.438e-4, 1.219e-4]

T5_NUS = [0.1 / 2**i for i in range(6)]
T5_L2 = [0.0418, 0.0210, 0.0105, 0.0053, 0.0026, 0.0013]
T5_B1 = [0.0188, 0.0095, 0.0047, 0.0024, 0.0012, 5.987e-4]
T5_B2 = [0.0133, 0.0067, 0.0034, 0.0017, 8.431e-4, 4.234e-4]


def write_convergence_csv(path: Path) -> Path:
    lines = [HEADER]
    for tau, l2, b1, b2 in zip(TAUS, T1_L2, T1_B1, T1_B2):
        lines.append(
            f"converge,1.0,{tau!r},64,21,2.0,{l2!r},{b1!r},{b2!r},2.0,False,1.0"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def write_viscosity_csv(path: Path) -> Path:
    lines = [HEADER]
    for nu, l2, b1, b2 in zip(T5_NUS, T5_L2, T5_B1, T5_B2):
        lines.append(
            f"viscosity,{nu!r},0.0001,64,21,0.1,{l2!r},{b1!r},{b2!r},2.0,False,1.0"
        )
    path.write_text("\n".join(lines) + "\n")
    return path


def extract_series(fig_path_spec):
    """Re-render to a live figure and pull the plotted line data."""
    import matplotlib.pyplot as plt

    from figgen.render import load_series

    # the figure itself is closed by render(); verify via a fresh axes pass
    # using the same draw call path
    points = load_series(Path(fig_path_spec.input_csv), fig_path_spec.kind)
    return points


def test_convergence_figure_points_and_slope(tmp_path):
    csv_path = write_convergence_csv(tmp_path / "table1.csv")
    out = tmp_path / "table1.svg"
    spec = FigureSpec(str(csv_path), "convergence", str(out))

    import matplotlib.pyplot as plt

    render(spec)
    assert out.exists() and out.stat().st_size > 0
    assert out.read_text().lstrip().startswith("<?xml")

    # plotted data must equal the CSV values exactly: re-draw on a live figure
    # through the same code path and inspect the Line2D arrays
    captured = {}
    orig_savefig = plt.Figure.savefig

    def grab(self, *a, **k):
        captured["lines"] = [
            (ln.get_label(), ln.get_xydata().copy()) for ax in self.axes for ln in ax.lines
        ]
        return orig_savefig(self, *a, **k)

    plt.Figure.savefig = grab
    try:
        render(spec)
    finally:
        plt.Figure.savefig = orig_savefig
    by_label = {label: xy for label, xy in captured["lines"]}
    for label, expect in (
        ("$L^2$", T1_L2),
        (r"$B^0_{\infty,1}$", T1_B1),
        (r"$B^0_{\infty,2}$", T1_B2),
    ):
        xy = by_label[label]
        assert np.array_equal(xy[:, 0], np.asarray(TAUS))
        assert np.array_equal(xy[:, 1], np.asarray(expect))
        slope = fitted_slope(xy[:, 0], xy[:, 1])
        assert abs(slope - 1.0) <= 0.05, (label, slope)
    assert "slope 1" in by_label


def test_viscosity_figure_slopes(tmp_path):
    csv_path = write_viscosity_csv(tmp_path / "table5.csv")
    out = tmp_path / "table5.svg"
    render(FigureSpec(str(csv_path), "viscosity", str(out)))
    assert out.exists()
    for ys in (T5_L2, T5_B1, T5_B2):
        slope = fitted_slope(T5_NUS, ys)
        assert abs(slope - 1.0) <= 0.05, slope


def test_header_only_csv_is_empty_input(tmp_path):
    csv_path = tmp_path / "empty.csv"
    csv_path.write_text(HEADER + "\n")
    out = tmp_path / "nothing.svg"
    with pytest.raises(EmptyInputError):
        render(FigureSpec(str(csv_path), "convergence", str(out)))
    assert not out.exists()


def test_malformed_header_names_column(tmp_path):
    csv_path = tmp_path / "bad.csv"
    csv_path.write_text("experiment,nu,tau,n_points,N,T,err_L2,bogus\n")
    out = tmp_path / "x.svg"
    with pytest.raises(SchemaError, match="err_B0inf1"):
        render(FigureSpec(str(csv_path), "convergence", str(out)))
    assert not out.exists()


def test_bad_value_names_column(tmp_path):
    csv_path = tmp_path / "val.csv"
    csv_path.write_text(
        HEADER + "\n" + "converge,1.0,0.01,64,21,2.0,abc,1e-3,1e-3,2.0,False,1.0\n"
    )
    with pytest.raises(SchemaError, match="err_L2"):
        render(FigureSpec(str(csv_path), "convergence", str(tmp_path / "y.svg")))


def test_input_csv_not_mutated(tmp_path):
    csv_path = write_convergence_csv(tmp_path / "t.csv")
    before = csv_path.read_bytes()
    render(FigureSpec(str(csv_path), "convergence", str(tmp_path / "t.svg")))
    assert csv_path.read_bytes() == before


def test_deterministic_svg_output(tmp_path):
    csv_path = write_convergence_csv(tmp_path / "t.csv")
    a = tmp_path / "a.svg"
    b = tmp_path / "b.svg"
    render(FigureSpec(str(csv_path), "convergence", str(a)))
    render(FigureSpec(str(csv_path), "convergence", str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_raster_output_on_request(tmp_path):
    csv_path = write_viscosity_csv(tmp_path / "t.csv")
    out = tmp_path / "t.png"
    render(FigureSpec(str(csv_path), "viscosity", str(out)))
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_cli_roundtrip(tmp_path):
    csv_path = write_convergence_csv(tmp_path / "t.csv")
    out = tmp_path / "cli.svg"
    code = cli_main(["--kind", "convergence", "--in", str(csv_path), "--out", str(out)])
    assert code == 0
    assert out.exists()


def test_cli_bad_input_exits_2(tmp_path):
    csv_path = tmp_path / "empty.csv"
    csv_path.write_text(HEADER + "\n")
    code = cli_main(
        ["--kind", "viscosity", "--in", str(csv_path), "--out", str(tmp_path / "o.svg")]
    )
    assert code == 2


def test_cli_subprocess(tmp_path):
    csv_path = write_viscosity_csv(tmp_path / "t.csv")
    out = tmp_path / "sub.svg"
    proc = subprocess.run(
        [sys.executable, "-m", "figgen.cli", "--kind", "viscosity",
         "--in", str(csv_path), "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
