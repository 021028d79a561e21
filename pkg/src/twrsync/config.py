"""Run configuration files: TOML in, canonical TOML out.

Sections and keys:

  [clock]     nu_ppm, gamma_s
  [protocol]  tau_s, t_d_prime_s, and either delays_s = [..] or the linear
              schedule form n / delta_max_s / schedule = "linear"
  [noise]     sigma_a_s, sigma_r_s directly, or snr_db + beta_hz converted
              through the arrival-time bound (a role lacking a direct sigma
              takes the converted value; each role must get exactly one form)
  [run]       trials, seed
  [sweep]     axis, values        (optional section)

Unknown keys are rejected. Missing keys fall back to the documented defaults.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .crlb import toa_crlb
from .model import ClockParams, NoiseModel, ProtocolConfig
from .montecarlo import SWEEP_AXES
from .protocol import linear_delays

__all__ = ["ConfigError", "RunConfig", "DEFAULTS", "parse_config", "load_config", "serialize_config", "default_config"]


class ConfigError(ValueError):
    """Invalid or malformed run configuration."""


DEFAULTS = {
    "clock": {"nu_ppm": 20.0, "gamma_s": 1e-6},
    "protocol": {"tau_s": 1e-7, "t_d_prime_s": 0.0, "n": 4, "delta_max_s": 1e-3},
    "noise": {"sigma_a_s": 1e-10, "sigma_r_s": 1e-10},
    "run": {"trials": 10000, "seed": 0},
}

_KNOWN = {
    "clock": {"nu_ppm", "gamma_s"},
    "protocol": {"tau_s", "t_d_prime_s", "delays_s", "n", "delta_max_s", "schedule"},
    "noise": {"sigma_a_s", "sigma_r_s", "snr_db", "beta_hz"},
    "run": {"trials", "seed"},
    "sweep": {"axis", "values"},
}


@dataclass(frozen=True)
class RunConfig:
    clock: ClockParams
    protocol: ProtocolConfig
    noise: NoiseModel
    trials: int
    seed: int
    sweep_axis: str | None = None
    sweep_values: tuple[float, ...] | tuple[int, ...] | None = None


def _number(section: str, key: str, value, default=None) -> float:
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key} must be finite, got {value!r}")
    return float(value)


def _integer(section: str, key: str, value, default=None) -> int:
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    return value


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a configuration document."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"not valid TOML: {exc}") from exc

    for section, table in raw.items():
        if section not in _KNOWN:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(table, dict):
            raise ConfigError(f"{section} must be a table, got {table!r}")
        for key in table:
            if key not in _KNOWN[section]:
                raise ConfigError(f"unknown key {section}.{key}")

    clock_t = raw.get("clock", {})
    proto_t = raw.get("protocol", {})
    noise_t = raw.get("noise", {})
    run_t = raw.get("run", {})

    try:
        clock = ClockParams(
            nu_ppm=_number("clock", "nu_ppm", clock_t.get("nu_ppm"), DEFAULTS["clock"]["nu_ppm"]),
            gamma=_number("clock", "gamma_s", clock_t.get("gamma_s"), DEFAULTS["clock"]["gamma_s"]),
        )
    except ValueError as exc:
        raise ConfigError(f"clock: {exc}") from exc

    if "delays_s" in proto_t:
        for key in ("n", "delta_max_s", "schedule"):
            if key in proto_t:
                raise ConfigError(f"protocol.delays_s conflicts with protocol.{key}; give exactly one form")
        delays_raw = proto_t["delays_s"]
        if not isinstance(delays_raw, list) or not delays_raw:
            raise ConfigError(f"protocol.delays_s must be a non-empty list, got {delays_raw!r}")
        delays = [_number("protocol", "delays_s", v) for v in delays_raw]
    else:
        schedule = proto_t.get("schedule", "linear")
        if schedule != "linear":
            raise ConfigError(f'protocol.schedule must be "linear", got {schedule!r}')
        n = _integer("protocol", "n", proto_t.get("n"), DEFAULTS["protocol"]["n"])
        delta_max = _number(
            "protocol", "delta_max_s", proto_t.get("delta_max_s"), DEFAULTS["protocol"]["delta_max_s"]
        )
        if n < 2:
            raise ConfigError(f"protocol.n must be >= 2, got {n}")
        if delta_max <= 0.0:
            raise ConfigError(f"protocol.delta_max_s must be > 0, got {delta_max!r}")
        delays = linear_delays(n, delta_max)
    try:
        protocol = ProtocolConfig(
            tau=_number("protocol", "tau_s", proto_t.get("tau_s"), DEFAULTS["protocol"]["tau_s"]),
            delays=delays,
            t_d_prime=_number(
                "protocol", "t_d_prime_s", proto_t.get("t_d_prime_s"), DEFAULTS["protocol"]["t_d_prime_s"]
            ),
        )
    except ValueError as exc:
        raise ConfigError(f"protocol: {exc}") from exc

    noise = _parse_noise(noise_t)

    trials = _integer("run", "trials", run_t.get("trials"), DEFAULTS["run"]["trials"])
    if trials < 1:
        raise ConfigError("run.trials must be ≥ 1")
    seed = _integer("run", "seed", run_t.get("seed"), DEFAULTS["run"]["seed"])
    if not 0 <= seed < 2**64:
        raise ConfigError(f"run.seed must fit in 64 bits, got {seed}")

    sweep_axis, sweep_values = _parse_sweep(raw.get("sweep"))
    return RunConfig(
        clock=clock, protocol=protocol, noise=noise,
        trials=trials, seed=seed, sweep_axis=sweep_axis, sweep_values=sweep_values,
    )


def _parse_noise(table: dict) -> NoiseModel:
    snr_db = _number("noise", "snr_db", table.get("snr_db"))
    beta_hz = _number("noise", "beta_hz", table.get("beta_hz"))
    if (snr_db is None) != (beta_hz is None):
        raise ConfigError("noise.snr_db and noise.beta_hz must be given together")
    sigma_a = _number("noise", "sigma_a_s", table.get("sigma_a_s"))
    sigma_r = _number("noise", "sigma_r_s", table.get("sigma_r_s"))
    if snr_db is not None:
        if sigma_a is not None and sigma_r is not None:
            raise ConfigError(
                "noise.snr_db given but both sigmas are set directly; each role takes exactly one form"
            )
        if beta_hz <= 0.0:
            raise ConfigError(f"noise.beta_hz must be > 0, got {beta_hz!r}")
        converted = math.sqrt(toa_crlb(10.0 ** (snr_db / 10.0), beta_hz))
        sigma_a = converted if sigma_a is None else sigma_a
        sigma_r = converted if sigma_r is None else sigma_r
    else:
        sigma_a = DEFAULTS["noise"]["sigma_a_s"] if sigma_a is None else sigma_a
        sigma_r = DEFAULTS["noise"]["sigma_r_s"] if sigma_r is None else sigma_r
    try:
        return NoiseModel(sigma_a=sigma_a, sigma_r=sigma_r)
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc


def _parse_sweep(table: dict | None) -> tuple[str | None, tuple | None]:
    if table is None:
        return None, None
    if "axis" not in table:
        raise ConfigError("sweep.axis is required in a [sweep] section")
    axis = table["axis"]
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {', '.join(SWEEP_AXES)}; got {axis!r}")
    values_raw = table.get("values")
    if not isinstance(values_raw, list) or not values_raw:
        raise ConfigError("sweep.values must be a non-empty list")
    if axis == "n_replies":
        values = tuple(_integer("sweep", "values", v) for v in values_raw)
        if any(v < 2 for v in values):
            raise ConfigError("sweep.values for n_replies must all be >= 2")
    else:
        values = tuple(_number("sweep", "values", v) for v in values_raw)
        if any(v <= 0.0 for v in values) and axis != "sigma_a":
            raise ConfigError(f"sweep.values for {axis} must all be > 0")
        if axis == "sigma_a" and any(v < 0.0 for v in values):
            raise ConfigError("sweep.values for sigma_a must all be >= 0")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep.values must be strictly increasing")
    return axis, values


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def default_config() -> RunConfig:
    return parse_config("")


def _toml_value(v) -> str:
    if isinstance(v, bool):
        raise TypeError("no boolean keys exist in this format")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"%s"' % v
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {v!r}")


def serialize_config(cfg: RunConfig) -> str:
    """Canonical form: explicit delay list and direct sigmas, fixed key order.
    parse_config(serialize_config(c)) == c."""
    lines = [
        "[clock]",
        f"nu_ppm = {_toml_value(cfg.clock.nu_ppm)}",
        f"gamma_s = {_toml_value(cfg.clock.gamma)}",
        "",
        "[protocol]",
        f"tau_s = {_toml_value(cfg.protocol.tau)}",
        f"t_d_prime_s = {_toml_value(cfg.protocol.t_d_prime)}",
        f"delays_s = {_toml_value([float(d) for d in cfg.protocol.delays])}",
        "",
        "[noise]",
        f"sigma_a_s = {_toml_value(cfg.noise.sigma_a)}",
        f"sigma_r_s = {_toml_value(cfg.noise.sigma_r)}",
        "",
        "[run]",
        f"trials = {_toml_value(cfg.trials)}",
        f"seed = {_toml_value(cfg.seed)}",
    ]
    if cfg.sweep_axis is not None:
        lines += [
            "",
            "[sweep]",
            f"axis = {_toml_value(cfg.sweep_axis)}",
            f"values = {_toml_value(list(cfg.sweep_values))}",
        ]
    return "\n".join(lines) + "\n"
