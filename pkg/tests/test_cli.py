"""Command-line interface: outputs, determinism, exit codes."""

import csv
import io
import json

import pytest

from tilelap import catalog
from tilelap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def test_validate_stdout(capsys):
    code, out = run(capsys, "validate", "--surface", "pillowcase")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["key", "value"]
    data = dict(rows)
    assert data["n_cone_points"] == "4"
    assert data["doubled_edges"] == "4"
    assert data["euler_characteristic"] == "2"
    assert data["gauss_bonnet_defect"] == "0"


def test_validate_surface_file_with_bundle(tmp_path, capsys):
    text = catalog.torus().to_text() + "rank: 1\ntransport: 0 -1\n"
    path = tmp_path / "twisted.surf"
    path.write_text(text)
    code, out = run(capsys, "validate", "--surface", str(path))
    assert code == 0


def test_validate_nonflat_bundle_exits_2(tmp_path, capsys):
    # twisting one fold seam of the pillowcase gives cone monodromy != 1
    text = catalog.pillowcase().to_text() + "rank: 1\ntransport: 2 i\n"
    path = tmp_path / "bad.surf"
    path.write_text(text)
    code, _ = run(capsys, "validate", "--surface", str(path))
    assert code == 2


def test_unknown_surface_exits_1(capsys):
    code, _ = run(capsys, "spectrum", "--surface", "nosuch", "--n", "4")
    assert code == 1


def test_bad_arguments_exit_1(capsys):
    assert main(["spectrum"]) == 1
    assert main(["no-such-command"]) == 1
    assert main([]) == 1


def test_spectrum_values(capsys):
    code, out = run(capsys, "spectrum", "--surface", "torus",
                    "--n", "8", "--k", "3")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["i", "rescaled", "raw"]
    assert float(rows[0][1]) == pytest.approx(0.0, abs=1e-9)
    # discrete oracle: 64 * (2 - 2 cos(pi/4))
    assert float(rows[1][1]) == pytest.approx(37.49, abs=0.01)


def test_converge_with_reference(capsys):
    code, out = run(capsys, "converge", "--surface", "square",
                    "--ns", "8,16", "--k", "3",
                    "--reference", "rectangle:1,1")
    assert code == 0
    header, rows = read_csv(out)
    assert "error" in header
    errs = {(r[header.index("n")], r[header.index("i")]):
            float(r[header.index("error")]) for r in rows}
    assert errs[("16", "1")] < errs[("8", "1")]


def test_converge_parallel_matches_serial(capsys):
    code1, out1 = run(capsys, "converge", "--surface", "square",
                      "--ns", "4,8", "--k", "3", "--jobs", "1")
    code2, out2 = run(capsys, "converge", "--surface", "square",
                      "--ns", "4,8", "--k", "3", "--jobs", "2")
    assert code1 == code2 == 0
    assert out1 == out2


def test_eigvec_table(capsys):
    code, out = run(capsys, "eigvec", "--surface", "square", "--ns", "8,16")
    assert code == 0
    header, rows = read_csv(out)
    col = header.index("error")
    errs = [float(r[col]) for r in rows]
    assert errs == sorted(errs, reverse=True)


def test_eigvec_needs_planar_surface(capsys):
    code, _ = run(capsys, "eigvec", "--surface", "pillowcase", "--ns", "8")
    assert code == 1


def test_interp_check(capsys):
    code, out = run(capsys, "interp-check", "--surface", "pillowcase",
                    "--ns", "2,4", "--trials", "3")
    assert code == 0
    header, rows = read_csv(out)
    ratio_col = header.index("pairing_ratio")
    ratios = [float(r[ratio_col]) for r in rows if r[ratio_col]]
    assert len(ratios) == 2


def test_consistency_table(capsys):
    code, out = run(capsys, "consistency", "--surface", "square",
                    "--ns", "8,16")
    assert code == 0
    header, rows = read_csv(out)
    assert "interior" in header


def test_harnack_table(capsys):
    code, out = run(capsys, "harnack", "--surface", "lshape", "--ns", "8,16")
    assert code == 0
    header, rows = read_csv(out)
    col = header.index("max_edge_gap")
    gaps = [float(r[col]) for r in rows]
    assert gaps[1] < gaps[0]


def test_green_modes(capsys):
    for mode, extra in (("ball", ["--radius", "12"]),
                        ("constant", ["--radius", "48"]),
                        ("halfplane", ["--radius", "5", "--source", "0,2"])):
        code, out = run(capsys, "green", "--mode", mode, *extra)
        assert code == 0, mode


def test_flow_and_barrier(capsys):
    code, _ = run(capsys, "flow", "--n", "64")
    assert code == 0
    code, _ = run(capsys, "barrier", "--surface", "pillowcase", "--n", "8")
    assert code == 0


def test_crsf_check(capsys):
    code, out = run(capsys, "crsf-check", "--count", "25", "--seed", "5")
    assert code == 0
    header, rows = read_csv(out)
    col = header.index("rel_error")
    assert max(float(r[col]) for r in rows) <= 1e-9


def test_out_files_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        code, _ = run(capsys, "spectrum", "--surface", "torus", "--n", "8",
                      "--k", "4", "--out", str(out))
        assert code == 0
    assert out1.with_suffix(".csv").read_bytes() == \
        out2.with_suffix(".csv").read_bytes()
    side1 = json.loads(out1.with_suffix(".json").read_text())
    side2 = json.loads(out2.with_suffix(".json").read_text())
    assert side1["command"] == "spectrum"
    assert side1["params"]["n"] == 8
    assert "out" not in side1["params"]
    assert side1["summary"] == side2["summary"]
