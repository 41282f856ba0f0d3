import json
import math

import pytest

from kmslab import cli
from kmslab.spectral import QuadratureError
from kmslab.switching import BumpProduct
from kmslab.thermality import ScalingSchedule, thermality_scan

INI = """\
[switching]
kind = bump_product
kappa = 1.0

[physics]
a = 1.0

[schedule]
alpha = 3.141592653589793
p = 2
fixed_lambda = none

[grid]
variable = x
grid_min = 10
grid_max = 28
count = 4
spacing = log

[tolerances]
ln_f_tol = 1e-8

[output]
out = {out}
"""


def _write_ini(tmp_path, text=None):
    path = tmp_path / "run.ini"
    path.write_text(text if text is not None else INI.format(out=tmp_path / "out"), encoding="utf-8")
    return path


def _manifest(path):
    return json.loads((path / "manifest.json").read_text(encoding="utf-8"))


def test_config_parse_validate_echo(tmp_path):
    cfg = cli.read_config(_write_ini(tmp_path), "thermality").validate()
    assert cfg.kappa == 1.0 and cfg.p == 2.0 and cfg.count == 4 and cfg.fixed_lambda is None
    echo = cfg.echo()
    assert echo["schedule"]["alpha"] == math.pi
    again = cli.config_from_mapping(json.loads(json.dumps(echo)))
    assert again == cfg


@pytest.mark.parametrize(
    "text, field",
    [
        ("[grid]\ncount = zero\n", "count"),
        ("[grid]\nbogus = 1\n", "grid.bogus"),
        ("[nonsense]\na = 1\n", "[nonsense]"),
        ("[physics]\na = -1\n", "a"),
    ],
)
def test_config_errors_name_the_field(tmp_path, text, field):
    with pytest.raises(cli.UsageError, match=field.replace("[", r"\[").replace("]", r"\]")):
        cli.read_config(_write_ini(tmp_path, text), "thermality").validate()


def test_table_round_trip(tmp_path):
    rows = [{"a": 0.1, "b": 1.0 / 3.0, "c": "x"}, {"a": -2.5e-300, "b": math.pi, "c": "y"}]
    path = cli.emit_table(rows, ("a", "b", "c"), tmp_path / "t.csv")
    header, back = cli.read_table(path)
    assert header == ["a", "b", "c"]
    assert back == rows
    text = path.read_bytes().decode("utf-8")
    assert text.endswith("\n") and "\r" not in text
    assert "0.33333333333333331" in text  # 17 significant digits


def test_empty_table_is_header_only(tmp_path):
    path = cli.emit_table([], ("E", "lambda"), tmp_path / "e.csv")
    assert path.read_text(encoding="utf-8") == "E,lambda\n"


def test_table_schema_mismatch(tmp_path):
    with pytest.raises(ValueError):
        cli.emit_table([{"a": 1.0}], ("a", "b"), tmp_path / "bad.csv")


def test_zero_points_is_usage_error(tmp_path):
    out = tmp_path / "zero"
    status = cli.main(["thermality", "--points", "0", "--out", str(out)])
    assert status == cli.EXIT_USAGE
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]
    m = _manifest(out)
    assert m["status"] == "error" and "count" in m["errors"][0]["message"]


def test_thermality_run_writes_table_and_manifest(tmp_path):
    ini = _write_ini(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["thermality", "--config", str(ini)]) == cli.EXIT_OK
    header, rows = cli.read_table(out / "thermality.csv")
    assert header == list(cli.THERMALITY_COLUMNS)
    m = _manifest(out)
    assert m["verdict"] == "polynomially_asymptotically_thermal"
    assert m["status"] == "ok" and m["errors"] == []
    assert m["version"] and m["wall_time_s"] >= 0
    assert m["reference"]["inv_T_unruh"] == 2 * math.pi
    assert {"plot_abs_deviation.csv", "plot_B_minus.csv", "plot_B_plus.csv"} <= set(m["files"])
    assert len(list(out.glob("manifest*.json"))) == 1

    # the printed deviations match the in-memory report to the last digit
    grid = list(cli.read_config(ini, "thermality").grid())
    rep = thermality_scan(BumpProduct(1.0), ScalingSchedule(math.pi, 2.0), grid)
    for row, d in zip(rows, rep.deviation):
        assert row["deviation"] == d

    # re-running from the echoed config reproduces the table byte for byte
    rerun = tmp_path / "rerun"
    assert cli.main(["thermality", "--config", str(out / "manifest.json"), "--out", str(rerun)]) == 0
    assert (rerun / "thermality.csv").read_bytes() == (out / "thermality.csv").read_bytes()


def test_overrides_apply(tmp_path):
    ini = _write_ini(tmp_path)
    out = tmp_path / "ov"
    status = cli.main(["response", "--config", str(ini), "--emin", "0.5", "--emax", "1.5", "--points", "3",
                       "--kappa", "2", "--out", str(out)])
    assert status == 0
    m = _manifest(out)
    assert m["config"]["switching"]["kappa"] == 2.0
    assert m["config"]["grid"]["count"] == 3
    header, rows = cli.read_table(out / "response.csv")
    assert header == list(cli.SCHEMAS["response"]) and len(rows) == 3


def test_schedule_violation_is_usage_error(tmp_path):
    out = tmp_path / "bad"
    status = cli.main(["thermality", "--alpha", "1.0", "--out", str(out)])
    assert status == cli.EXIT_USAGE
    assert "alpha > pi*kappa/(2a)" in _manifest(out)["errors"][0]["message"]
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]


def test_numerical_failure_recorded(tmp_path, monkeypatch):
    def boom(*args, **kwargs):
        raise QuadratureError("synthetic failure", estimate=1.0, error=2.0)

    monkeypatch.setattr(cli, "response_frequency", boom)
    out = tmp_path / "fail"
    status = cli.main(["response", "--out", str(out)])
    assert status == cli.EXIT_NUMERICAL
    m = _manifest(out)
    assert m["status"] == "error"
    assert m["errors"][0]["class"] == "QuadratureError"
    assert sorted(p.name for p in out.iterdir()) == ["manifest.json"]


def test_spectrum_and_temp_scan_commands(tmp_path):
    out = tmp_path / "spectrum"
    assert cli.main(["spectrum", "--emin", "1", "--emax", "100", "--points", "5", "--out", str(out)]) == 0
    header, rows = cli.read_table(out / "spectrum.csv")
    assert header == list(cli.SCHEMAS["spectrum"]) and len(rows) == 5
    assert "envelope" in _manifest(out)
    out = tmp_path / "temp"
    assert cli.main(["temp-scan", "--emin", "1", "--emax", "2", "--points", "2", "--out", str(out)]) == 0
    header, rows = cli.read_table(out / "temp_scan.csv")
    assert rows[0]["inv_T_est"] == pytest.approx(2 * math.pi, rel=0.01)
    assert rows[0]["T_est"] == pytest.approx(1 / rows[0]["inv_T_est"])


def test_plateau_command_defaults(tmp_path):
    out = tmp_path / "plateau"
    assert cli.main(["plateau", "--out", str(out)]) == 0
    assert _manifest(out)["verdict"] == "not_thermal"


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "kmslab", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "thermality" in res.stdout
