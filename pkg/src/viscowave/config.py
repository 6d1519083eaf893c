"""Experiment configuration: defaults, INI files, overrides, validation.

Resolution order is defaults < config file < command-line overrides,
after which every parameter is parsed to its typed form and checked
against the preconditions of the module that will consume it.  A run
therefore fails before any compute when, say, a requested output time
sits past the periodic wrap-around horizon.

The config file is plain INI:

    [experiment]
    name = my-run
    kind = linear-box

    [parameters]
    n = 128
    times = 5:25:2

    [output]
    directory = results/my-run
    figures = true

Time ladders accept four grammars: an explicit comma list ``5,7,9``,
an inclusive range ``lo:hi:step``, and the prefixed forms
``linear:lo:hi:count`` and ``geometric:lo:hi:count``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

__all__ = [
    "ConfigError",
    "ExperimentSpec",
    "EXPERIMENT_KINDS",
    "DEFAULTS",
    "parse_bool",
    "parse_float_list",
    "parse_times",
    "resolve_params",
    "load_spec",
]


class ConfigError(ValueError):
    """A parameter failed parsing or violated a module precondition."""


EXPERIMENT_KINDS = ("kernel-decay", "highfreq", "linear-box", "nonlinear-box", "fit")

# Defaults are kept as strings so file values and --set overrides merge
# uniformly before one typed parse at the end.
DEFAULTS: dict[str, dict[str, str]] = {
    "kernel-decay": {
        "mu": "1.0",
        "times": "geometric:10:300:12",
        "band": "low",
        "tol": "1e-7",
    },
    "highfreq": {
        "mu_list": "0.5,1,2",
        "samples": "64",
    },
    "linear-box": {
        "n": "128",
        "length": "100",
        "mu": "1.0",
        "sigma": "4.0",
        "amplitude": "1e-3",
        "times": "5:25:2",
        "p_list": "1,2,inf",
        "split": "false",
    },
    "nonlinear-box": {
        "n": "32",
        "mu": "1.0",
        "dt": "0.02",
        "t_end": "10",
        "cadence": "0.5",
        "length": "6.283185307179586",
        "amplitude": "1e-2",
        "flow_time": "1.0",
        "data": "taylor-green",
        "seed": "",
        "integrator": "etd2",
        "delta": "0.1",
        "k_low": "0",
        "k_high": "3",
    },
    "fit": {
        "csv": "",
        "xcol": "t",
        "ycol": "norm",
        "where": "",
        "tmin": "",
        "tmax": "",
        "theoretical": "",
    },
}


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully resolved, validated experiment description."""

    name: str
    kind: str
    params: dict
    outdir: Path
    figures: bool = True

    def __post_init__(self) -> None:
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")


def parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def parse_float_list(text: str, key: str = "list") -> list[float]:
    """Comma list of floats; ``inf`` is accepted for L^infinity entries."""
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"{key}: empty list")
    return [_parse_float(s, key) for s in items]


def parse_times(text: str, key: str = "times") -> list[float]:
    text = text.strip()
    parts = text.split(":")
    if text.startswith(("linear:", "geometric:")):
        if len(parts) != 4:
            raise ConfigError(f"{key}: expected {parts[0]}:lo:hi:count, got {text!r}")
        lo, hi = _parse_float(parts[1], key), _parse_float(parts[2], key)
        try:
            count = int(parts[3])
        except ValueError:
            raise ConfigError(f"{key}: count must be an integer, got {parts[3]!r}") from None
        if count < 2 or not (0 <= lo < hi):
            raise ConfigError(f"{key}: need 0 <= lo < hi and count >= 2, got {text!r}")
        if parts[0] == "linear":
            vals = np.linspace(lo, hi, count)
        else:
            if lo <= 0:
                raise ConfigError(f"{key}: geometric ladder needs lo > 0")
            vals = np.geomspace(lo, hi, count)
        return [float(v) for v in vals]
    if len(parts) == 3:
        lo, hi, step_sz = (_parse_float(s, key) for s in parts)
        if step_sz <= 0 or hi < lo:
            raise ConfigError(f"{key}: need lo <= hi and step > 0, got {text!r}")
        # inclusive endpoint up to roundoff
        vals = np.arange(lo, hi + 0.5 * step_sz, step_sz)
        return [float(v) for v in vals]
    return parse_float_list(text, key)


def _parse_opt_float(text: str, key: str) -> float | None:
    return None if not text.strip() else _parse_float(text, key)


def _parse_opt_int(text: str, key: str) -> int | None:
    if not text.strip():
        return None
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _parse_int(text: str, key: str) -> int:
    value = _parse_opt_int(text, key)
    if value is None:
        raise ConfigError(f"{key}: value required")
    return value


def _typed_params(kind: str, raw: Mapping[str, str]) -> dict:
    known = DEFAULTS[kind]
    unknown = set(raw) - set(known)
    if unknown:
        raise ConfigError(
            f"{kind}: unknown parameter(s) {sorted(unknown)}; known: {sorted(known)}"
        )
    merged = {**known, **raw}
    p: dict = {}
    if kind == "kernel-decay":
        p["mu"] = _parse_float(merged["mu"], "mu")
        p["times"] = parse_times(merged["times"])
        p["band"] = merged["band"].strip()
        p["tol"] = _parse_float(merged["tol"], "tol")
    elif kind == "highfreq":
        p["mu_list"] = parse_float_list(merged["mu_list"], "mu_list")
        p["samples"] = _parse_int(merged["samples"], "samples")
    elif kind == "linear-box":
        p["n"] = _parse_int(merged["n"], "n")
        p["length"] = _parse_float(merged["length"], "length")
        p["mu"] = _parse_float(merged["mu"], "mu")
        p["sigma"] = _parse_float(merged["sigma"], "sigma")
        p["amplitude"] = _parse_float(merged["amplitude"], "amplitude")
        p["times"] = parse_times(merged["times"])
        p["p_list"] = parse_float_list(merged["p_list"], "p_list")
        p["split"] = parse_bool(merged["split"])
    elif kind == "nonlinear-box":
        p["n"] = _parse_int(merged["n"], "n")
        p["mu"] = _parse_float(merged["mu"], "mu")
        p["dt"] = _parse_float(merged["dt"], "dt")
        p["t_end"] = _parse_float(merged["t_end"], "t_end")
        p["cadence"] = _parse_float(merged["cadence"], "cadence")
        p["length"] = _parse_float(merged["length"], "length")
        p["amplitude"] = _parse_float(merged["amplitude"], "amplitude")
        p["flow_time"] = _parse_float(merged["flow_time"], "flow_time")
        p["data"] = merged["data"].strip()
        p["seed"] = _parse_opt_int(merged["seed"], "seed")
        p["integrator"] = merged["integrator"].strip()
        p["delta"] = _parse_float(merged["delta"], "delta")
        p["k_low"] = _parse_int(merged["k_low"], "k_low")
        p["k_high"] = _parse_int(merged["k_high"], "k_high")
    elif kind == "fit":
        p["csv"] = merged["csv"].strip()
        p["xcol"] = merged["xcol"].strip()
        p["ycol"] = merged["ycol"].strip()
        p["where"] = merged["where"].strip()
        p["tmin"] = _parse_opt_float(merged["tmin"], "tmin")
        p["tmax"] = _parse_opt_float(merged["tmax"], "tmax")
        p["theoretical"] = _parse_opt_float(merged["theoretical"], "theoretical")
    return p


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _validate(kind: str, p: dict) -> None:
    """Range checks mirroring the preconditions of the consuming modules."""
    if kind == "kernel-decay":
        _require(p["mu"] > 0, f"mu must be positive, got {p['mu']}")
        _require(p["band"] in ("low", "full"), f"band must be low or full, got {p['band']!r}")
        _require(p["tol"] > 0, "tol must be positive")
        times = p["times"]
        _require(len(times) >= 8, f"decay fits need >= 8 times, got {len(times)}")
        _require(min(times) > 0, "times must be positive")
        _require(all(b > a for a, b in zip(times, times[1:])), "times must be increasing")
    elif kind == "highfreq":
        _require(all(m > 0 for m in p["mu_list"]), "mu_list entries must be positive")
        _require(p["samples"] >= 8, f"rate fits need >= 8 samples, got {p['samples']}")
    elif kind == "linear-box":
        _require(p["n"] >= 4 and p["n"] % 2 == 0, f"n must be even and >= 4, got {p['n']}")
        _require(p["length"] > 0, "length must be positive")
        _require(p["mu"] > 0, "mu must be positive")
        _require(p["sigma"] > 0, "sigma must be positive")
        _require(p["amplitude"] >= 0, "amplitude must be nonnegative")
        times = p["times"]
        _require(min(times) >= 0, "times must be nonnegative")
        _require(all(b > a for a, b in zip(times, times[1:])), "times must be increasing")
        horizon = p["length"] / 4.0
        _require(
            max(times) <= horizon,
            f"t={max(times)} exceeds the wrap-around horizon L/4={horizon}",
        )
        _require(all(q >= 1 for q in p["p_list"]), "p_list entries must be >= 1")
    elif kind == "nonlinear-box":
        _require(p["n"] >= 4 and p["n"] % 2 == 0, f"n must be even and >= 4, got {p['n']}")
        _require(p["mu"] > 0, "mu must be positive")
        _require(p["dt"] > 0 and p["t_end"] > 0 and p["cadence"] > 0, "dt, t_end, cadence must be positive")
        _require(p["length"] > 0, "length must be positive")
        _require(p["amplitude"] >= 0, "amplitude must be nonnegative")
        _require(p["flow_time"] >= 0, "flow_time must be nonnegative")
        _require(p["data"] in ("taylor-green", "random"), f"data must be taylor-green or random, got {p['data']!r}")
        _require(p["integrator"] in ("etd2", "rk4"), f"integrator must be etd2 or rk4, got {p['integrator']!r}")
        _require(0 <= p["delta"] <= 0.2, f"delta must lie in [0, 0.2], got {p['delta']}")
        _require(p["k_low"] >= 0, "k_low must be nonnegative")
        _require(p["k_high"] >= p["k_low"] + 1, "k_high must be at least k_low + 1")
    elif kind == "fit":
        _require(bool(p["csv"]), "csv path required")
        _require(bool(p["xcol"]) and bool(p["ycol"]), "xcol and ycol required")
        if p["tmin"] is not None and p["tmax"] is not None:
            _require(p["tmin"] < p["tmax"], "tmin must be below tmax")


def resolve_params(kind: str, overrides: Mapping[str, str] | None = None) -> dict:
    """Defaults plus string overrides, parsed and validated, no file."""
    params = _typed_params(kind, {str(k): str(v) for k, v in (overrides or {}).items()})
    _validate(kind, params)
    return params


def _read_config_file(path: Path) -> tuple[dict[str, str], dict[str, str], dict[str, str]]:
    parser = configparser.ConfigParser(interpolation=None)
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    allowed = {"experiment", "parameters", "output"}
    extra = set(parser.sections()) - allowed
    if extra:
        raise ConfigError(f"unknown config section(s) {sorted(extra)}; allowed: {sorted(allowed)}")
    def get(sec: str) -> dict[str, str]:
        return dict(parser.items(sec)) if parser.has_section(sec) else {}

    return get("experiment"), get("parameters"), get("output")


def load_spec(
    kind: str,
    *,
    config_path: Path | str | None = None,
    overrides: Mapping[str, str] | None = None,
    outdir: Path | str | None = None,
    name: str | None = None,
    figures: bool | None = None,
) -> ExperimentSpec:
    """Resolve one experiment from defaults, optional file, and overrides."""
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"unknown experiment kind {kind!r}; choose from {EXPERIMENT_KINDS}")
    raw: dict[str, str] = {}
    file_name = None
    file_outdir = None
    file_figures = None
    if config_path is not None:
        exp, params, output = _read_config_file(Path(config_path))
        if "kind" in exp and exp["kind"].strip() != kind:
            raise ConfigError(
                f"config file says kind={exp['kind'].strip()!r} but the {kind!r} command was invoked"
            )
        file_name = exp.get("name")
        raw.update(params)
        if "directory" in output:
            file_outdir = Path(output["directory"])
        if "figures" in output:
            file_figures = parse_bool(output["figures"])
    if overrides:
        raw.update({str(k): str(v) for k, v in overrides.items()})

    params = _typed_params(kind, raw)
    _validate(kind, params)

    resolved_name = name or file_name or kind
    resolved_outdir = Path(outdir) if outdir is not None else (file_outdir or Path("results") / resolved_name)
    resolved_figures = figures if figures is not None else (file_figures if file_figures is not None else True)
    return ExperimentSpec(
        name=resolved_name,
        kind=kind,
        params=params,
        outdir=resolved_outdir,
        figures=resolved_figures,
    )
