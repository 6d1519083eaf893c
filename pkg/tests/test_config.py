"""Parameter parsing, validation, and the layered config file resolution."""

from pathlib import Path

import numpy as np
import pytest

from viscowave.config import (
    ConfigError,
    EXPERIMENT_KINDS,
    ExperimentSpec,
    load_spec,
    parse_bool,
    parse_float_list,
    parse_times,
    resolve_params,
)


def test_times_comma_list():
    assert parse_times("5,7,9") == [5.0, 7.0, 9.0]


def test_times_inclusive_step_ladder():
    values = parse_times("5:25:2")
    assert values == pytest.approx(list(range(5, 26, 2)))
    assert len(values) == 11


def test_times_linear_ladder():
    assert parse_times("linear:0:10:5") == pytest.approx([0.0, 2.5, 5.0, 7.5, 10.0])


def test_times_geometric_ladder():
    values = parse_times("geometric:10:300:12")
    assert len(values) == 12
    assert values[0] == pytest.approx(10.0)
    assert values[-1] == pytest.approx(300.0)
    ratios = np.diff(np.log(values))
    assert np.allclose(ratios, ratios[0])


@pytest.mark.parametrize(
    "text",
    [
        "geometric:10:300",  # missing the count
        "linear:0:10:1",  # count below 2
        "linear:10:0:4",  # lo above hi
        "geometric:0:10:4",  # geometric from zero
        "1:0:1",  # descending step ladder
        "1:5:0",  # zero step
        "linear:0:10:2.5",  # fractional count
        "",
    ],
)
def test_times_rejects_malformed_ladders(text):
    with pytest.raises(ConfigError):
        parse_times(text)


def test_parse_bool():
    for text in ("1", "true", "YES", "on"):
        assert parse_bool(text) is True
    for text in ("0", "false", "No", "off"):
        assert parse_bool(text) is False
    with pytest.raises(ConfigError):
        parse_bool("maybe")


def test_parse_float_list():
    assert parse_float_list("1, 2, inf") == [1.0, 2.0, np.inf]
    with pytest.raises(ConfigError):
        parse_float_list("")


def test_kernel_decay_defaults():
    p = resolve_params("kernel-decay")
    assert p["mu"] == 1.0
    assert p["band"] == "low"
    assert len(p["times"]) == 12
    assert p["times"][0] == pytest.approx(10.0)
    assert p["times"][-1] == pytest.approx(300.0)


def test_fit_requires_a_csv_path():
    with pytest.raises(ConfigError, match="csv"):
        resolve_params("fit")


def test_unknown_parameter_is_named():
    with pytest.raises(ConfigError, match="bogus"):
        resolve_params("highfreq", {"bogus": "1"})


def test_linear_box_horizon_guard():
    with pytest.raises(ConfigError, match="horizon"):
        resolve_params("linear-box", {"times": "5:30:5"})


@pytest.mark.parametrize(
    "overrides",
    [
        {"k_high": "0"},
        {"delta": "0.3"},
        {"integrator": "leapfrog"},
        {"data": "vortex"},
        {"n": "7"},
    ],
)
def test_nonlinear_box_rejects_bad_values(overrides):
    with pytest.raises(ConfigError):
        resolve_params("nonlinear-box", overrides)


def test_every_kind_resolves_or_demands_input():
    for kind in EXPERIMENT_KINDS:
        if kind == "fit":
            continue
        assert resolve_params(kind)


_INI = """\
[experiment]
name = demo
kind = linear-box

[parameters]
n = 16
length = 40
times = 1:8:1

[output]
directory = out/here
figures = false
"""


def test_load_spec_from_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(_INI)
    spec = load_spec("linear-box", config_path=path)
    assert spec.name == "demo"
    assert spec.kind == "linear-box"
    assert spec.params["n"] == 16
    assert spec.params["length"] == 40.0
    assert spec.params["times"] == pytest.approx(list(range(1, 9)))
    assert spec.outdir == Path("out/here")
    assert spec.figures is False


def test_load_spec_kind_mismatch(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(_INI)
    with pytest.raises(ConfigError, match="kind"):
        load_spec("highfreq", config_path=path)


def test_load_spec_rejects_unknown_sections(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text("[experiment]\nkind = fit\n\n[extras]\nx = 1\n")
    with pytest.raises(ConfigError, match="section"):
        load_spec("fit", config_path=path)


def test_load_spec_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_spec("fit", config_path=tmp_path / "absent.ini")


def test_overrides_beat_the_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(_INI)
    spec = load_spec("linear-box", config_path=path, overrides={"n": "32"})
    assert spec.params["n"] == 32


def test_arguments_beat_the_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(_INI)
    spec = load_spec(
        "linear-box", config_path=path, name="other", outdir=tmp_path / "o", figures=True
    )
    assert spec.name == "other"
    assert spec.outdir == tmp_path / "o"
    assert spec.figures is True


def test_default_outdir_tracks_the_name():
    spec = load_spec("highfreq", name="sweep")
    assert spec.outdir == Path("results") / "sweep"
    assert load_spec("highfreq").outdir == Path("results") / "highfreq"


def test_spec_rejects_unknown_kinds():
    with pytest.raises(ConfigError):
        ExperimentSpec(name="x", kind="bogus", params={}, outdir=Path("o"))
