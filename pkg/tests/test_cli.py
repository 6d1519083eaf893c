"""Command-line behavior, exercised through main() with real artifacts."""

import json

import numpy as np
import pytest

from viscowave.cli import main
from viscowave.reporting import write_csv

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _series_csv(tmp_path):
    times = np.arange(1.0, 13.0)
    rows = [{"t": t, "norm": 2.3 * (1 + t) ** -1.5} for t in times]
    return write_csv(tmp_path / "series.csv", "kernel-decay", ["t", "norm"], rows)


def test_help_exits_cleanly(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    assert "reproduce" in capsys.readouterr().out


def test_a_command_is_required():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_malformed_override_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["highfreq", "--set", "samples8"])
    assert exc.value.code == 2


def test_unknown_override_key_is_a_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["highfreq", "--outdir", str(tmp_path), "--set", "bogus=1"])
    assert exc.value.code == 2


def test_fit_end_to_end(tmp_path, capsys):
    csv_path = _series_csv(tmp_path)
    out = tmp_path / "out"
    code = main(
        [
            "fit",
            "--outdir",
            str(out),
            "--set",
            f"csv={csv_path}",
            "--set",
            "theoretical=-1.5",
        ]
    )
    assert code == 0
    assert "slope" in capsys.readouterr().out
    assert (out / "manifest.json").exists()
    summary = json.loads((out / "fit_summary.json").read_text())
    assert summary["slope"] == pytest.approx(-1.5, rel=1e-9)
    assert (out / "fit.png").read_bytes()[:8] == _PNG_MAGIC


def test_fit_runs_are_byte_identical(tmp_path):
    csv_path = _series_csv(tmp_path)
    out = tmp_path / "out"
    args = ["fit", "--outdir", str(out), "--set", f"csv={csv_path}", "--no-figures"]
    assert main(args) == 0
    first = (out / "fit_summary.json").read_bytes()
    assert main(args) == 0
    assert (out / "fit_summary.json").read_bytes() == first


def test_linear_box_cheap_run_without_figures(tmp_path):
    out = tmp_path / "lin"
    code = main(
        [
            "linear-box",
            "--outdir",
            str(out),
            "--no-figures",
            "--set",
            "n=16",
            "--set",
            "length=40",
            "--set",
            "sigma=2",
            "--set",
            "times=1:8:1",
        ]
    )
    assert code == 0
    assert (out / "linear_box.csv").exists()
    assert (out / "manifest.json").exists()
    assert not list(out.glob("*.png"))


def test_highfreq_prints_the_rate(tmp_path, capsys):
    code = main(
        [
            "highfreq",
            "--outdir",
            str(tmp_path / "hf"),
            "--no-figures",
            "--set",
            "samples=8",
            "--set",
            "mu_list=1",
        ]
    )
    assert code == 0
    assert "ratio" in capsys.readouterr().out


def test_config_file_round_trip(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text(
        "[experiment]\nkind = highfreq\nname = sweep\n\n"
        "[parameters]\nsamples = 8\nmu_list = 1\n\n"
        f"[output]\ndirectory = {tmp_path / 'sweep'}\nfigures = false\n"
    )
    assert main(["highfreq", "--config", str(ini)]) == 0
    manifest = json.loads((tmp_path / "sweep" / "manifest.json").read_text())
    assert manifest["name"] == "sweep"
    with pytest.raises(SystemExit) as exc:
        main(["kernel-decay", "--config", str(ini)])
    assert exc.value.code == 2


def test_reproduce_list(capsys):
    assert main(["reproduce", "--list"]) == 0
    out = capsys.readouterr().out
    assert "eigen-identities" in out
    assert "[slow]" in out


def test_reproduce_rejects_unknown_names():
    with pytest.raises(SystemExit) as exc:
        main(["reproduce", "no-such-check"])
    assert exc.value.code == 2


def test_reproduce_runs_named_criteria(tmp_path, capsys):
    report = tmp_path / "report.json"
    code = main(
        ["reproduce", "eigen-identities", "wave-form", "--report", str(report)]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out
    payload = json.loads(report.read_text())
    assert [entry["name"] for entry in payload] == ["eigen-identities", "wave-form"]
    assert all(entry["passed"] for entry in payload)
