import csv
import io
from pathlib import Path

import pytest

from ndekit import cli

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
HARMONIC = "[run]\nmodel = harmonic\nharmonic_omega = 10.0\nharmonic_r_e = 30.0\nv_max = 20\nunits = cm-1\n"


def _rows(path: Path) -> list[list[str]]:
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def _run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path), "--no-timestamp"])


def test_curve_all_labels(tmp_path):
    assert _run(tmp_path, "curve", "--config", str(CONFIG_DIR / "cs2_all_branches.ini")) == 0
    assert len(list(tmp_path.glob("curve_*.csv"))) == 16


def test_expand_reports_c3(tmp_path):
    assert _run(tmp_path, "expand", "--config", str(CONFIG_DIR / "cs2_0g_minus.ini")) == 0
    rows = _rows(tmp_path / "expand.csv")
    header = rows[0]
    row = next(r for r in rows[1:] if r[0] == "0g-" and r[1] == "1")
    assert float(row[header.index("D[cm-1]")]) == 0.0
    c3 = float(row[header.index("C3")])
    assert c3 == pytest.approx(-9.997, rel=1e-6)


def test_harmonic_levels_are_exact(tmp_path):
    cfg = tmp_path / "h.ini"
    cfg.write_text(HARMONIC)
    assert cli.main(["levels", "--config", str(cfg), "--out", str(tmp_path), "--no-timestamp"]) == 0
    rows = _rows(tmp_path / "levels.csv")
    energies = [float(r[1]) for r in rows[1:]]
    assert energies == pytest.approx([10.0 * (v + 0.5) for v in range(21)], rel=1e-9)


def test_deterministic_outputs(tmp_path):
    cfg = tmp_path / "h.ini"
    cfg.write_text(HARMONIC)
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert cli.main(["levels", "--config", str(cfg), "--out", str(out), "--no-timestamp"]) == 0
    assert (a / "levels.csv").read_bytes() == (b / "levels.csv").read_bytes()


def test_timestamp_header_present_by_default(tmp_path):
    cfg = tmp_path / "h.ini"
    cfg.write_text(HARMONIC)
    assert cli.main(["levels", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert "# generated " in (tmp_path / "levels.csv").read_text()


@pytest.fixture(scope="module")
def cs_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("cs")
    assert cli.main(["levels", "--config", str(CONFIG_DIR / "cs2_0g_minus.ini"), "--out", str(out), "--no-timestamp"]) == 0
    return out


def test_levels_then_fit(cs_run):
    out = cs_run
    assert cli.main(["fit", str(out / "levels.csv"), "--config", str(CONFIG_DIR / "cs2_0g_minus.ini"), "--out", str(out), "--no-timestamp"]) == 0
    rows = _rows(out / "fit_report.csv")
    assert len(rows) == 1 + 3 * 5
    k5 = [r for r in rows[1:] if r[1] == "full_k5" and r[0] == "-10"]
    assert float(k5[0][5]) == pytest.approx(-9.99, abs=0.02)
    assert (out / "fit_report.txt").is_file()


def test_fit_sparse_window_rows(cs_run, tmp_path):
    cfg = tmp_path / "sparse.ini"
    cfg.write_text((CONFIG_DIR / "cs2_0g_minus.ini").read_text().replace("windows = 30.0 10.0 5.0 2.0", "windows = 1e-9").replace("fit_all = on", "fit_all = off"))
    assert cli.main(["fit", str(cs_run / "levels.csv"), "--config", str(cfg), "--out", str(tmp_path), "--no-timestamp"]) == 0
    rows = _rows(tmp_path / "fit_report.csv")
    flags = {r[1]: r[-1] for r in rows[1:]}
    assert "wide_confidence_C_m" in flags["full_k5"]
    assert "too_few_levels" in flags["improved_k4"]


def test_terms_table(tmp_path):
    assert _run(tmp_path, "terms", "--config", str(CONFIG_DIR / "cs2_0g_minus.ini")) == 0
    rows = _rows(tmp_path / "terms.csv")
    lead = next(r for r in rows if r[0] == "(D-E)^(1-beta)")
    assert [float(x) for x in lead[1:4]] == pytest.approx([171.63, 142.913, 97.366], rel=1e-3)
    delta = next(r for r in rows if r[0] == "gamma_delta")
    assert float(delta[3]) == pytest.approx(0.1215, rel=1e-3)


def test_lifetime(tmp_path, capsys):
    assert _run(tmp_path, "lifetime", "--C3", "9.997", "--wavelength-nm", "852.347") == 0
    assert "30.5" in capsys.readouterr().out


def test_retardation(tmp_path):
    assert _run(tmp_path, "retardation", "--R", "10", "1000", "--lambda-bar", "2604.5") == 0


def test_exit_codes(tmp_path, monkeypatch):
    bad = tmp_path / "bad.ini"
    bad.write_text("[run]\nbogus = 1\n")
    assert cli.main(["levels", "--config", str(bad)]) == cli.EXIT_CONFIG
    assert cli.main(["levels", "--config", str(tmp_path / "missing.ini")]) == cli.EXIT_CONFIG
    too_high = tmp_path / "high.ini"
    too_high.write_text((CONFIG_DIR / "cs2_0g_minus.ini").read_text().replace("v_max = none", "v_max = 500"))
    assert _run(tmp_path, "levels", "--config", str(too_high)) == cli.EXIT_VALIDATION
    assert _run(tmp_path, "levels", "--units", "furlongs") == cli.EXIT_VALIDATION
    with pytest.raises(SystemExit) as exc:
        cli.main(["nonsense"])
    assert exc.value.code == 2

    def boom(run):
        raise cli.NumericalError("forced")

    monkeypatch.setitem(cli._COMMANDS, "curve", boom)
    assert _run(tmp_path, "curve") == cli.EXIT_NUMERIC
    assert len({cli.EXIT_CONFIG, cli.EXIT_NUMERIC, cli.EXIT_VALIDATION, 0, 2}) == 5
