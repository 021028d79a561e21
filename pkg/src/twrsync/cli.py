"""Command-line front end.

Four subcommands over one TOML configuration:

  simulate   timestamp rows, one per (trial, reply)
  estimate   per-trial estimates, simulated internally or from --obs
  crlb       variance bounds and information matrix at the configured truth
  sweep      Monte Carlo std/bias against predictions along one axis

Output is CSV (crlb: key=value lines) to stdout or atomically to --out.
Exit codes: 0 success, 1 computation failure, 2 bad usage or configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile

from .config import ConfigError, RunConfig, default_config, load_config
from .crlb import crlb_alpha_tau, fim
from .montecarlo import (
    ESTIMATOR_NAMES,
    Scenario,
    SweepSpec,
    TrialEstimates,
    run_estimators,
    run_sweep,
)
from .protocol import ObservationSet, RngSpec, run_exchange

FMT = "%.17g"

_PRED_STD_NAMES = frozenset({"alpha1", "alpha2", "tau2"})


def _fmt(value: float | None) -> str:
    return "" if value is None else FMT % value


def _write_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    # stage next to the target so replace() stays on one filesystem
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".twrsync-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _load(args: argparse.Namespace) -> RunConfig:
    cfg = default_config() if args.config is None else load_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed must fit in 64 bits, got {args.seed}")
        cfg = RunConfig(
            clock=cfg.clock, protocol=cfg.protocol, noise=cfg.noise,
            trials=cfg.trials, seed=args.seed,
            sweep_axis=cfg.sweep_axis, sweep_values=cfg.sweep_values,
        )
    return cfg


def _cmd_simulate(cfg: RunConfig) -> tuple[str, int]:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["trial", "t_a_hat_s", "r_index", "t_r_hat_s"])
    rng = RngSpec(seed=cfg.seed)
    for trial in range(cfg.trials):
        obs = run_exchange(cfg.protocol, cfg.clock, cfg.noise, rng, trial)
        for k in range(obs.n):
            writer.writerow([trial, FMT % obs.t_a_hat, k + 1, FMT % obs.t_r_hat[k]])
    return buf.getvalue(), 0


def _estimate_rows(trials: list[tuple[int, TrialEstimates]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "trial", "alpha1", "alpha2", "tau1_s", "tau2_s",
        "gamma11_s", "gamma12_s", "gamma21_s", "gamma22_s", "degenerate",
    ])
    for trial, est in trials:
        writer.writerow([
            trial,
            _fmt(est.alpha1), _fmt(est.alpha2), _fmt(est.tau1), _fmt(est.tau2),
            _fmt(est.gamma11), _fmt(est.gamma12), _fmt(est.gamma21), _fmt(est.gamma22),
            int(est.degenerate),
        ])
    return buf.getvalue()


def _parse_obs_file(path: str, cfg: RunConfig) -> list[tuple[int, ObservationSet]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise ConfigError(f"observations file {path} is empty")
            fields = set(reader.fieldnames)
            required = {"trial", "r_index", "t_r_hat_s"}
            missing = required - fields
            if missing:
                raise ConfigError(
                    f"observations file lacks columns: {', '.join(sorted(missing))}"
                )
            has_toa = "t_a_hat_s" in fields
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read observations {path}: {exc}") from exc

    if not has_toa:
        print("warning: observations lack t_a_hat_s; offset estimates are omitted", file=sys.stderr)

    by_trial: dict[int, dict[int, float]] = {}
    toa: dict[int, float] = {}
    try:
        for row in rows:
            trial = int(row["trial"])
            r_index = int(row["r_index"])
            by_trial.setdefault(trial, {})[r_index] = float(row["t_r_hat_s"])
            if has_toa:
                toa[trial] = float(row["t_a_hat_s"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed observations row: {exc}") from exc

    n = cfg.protocol.n
    out = []
    for trial in sorted(by_trial):
        replies = by_trial[trial]
        if sorted(replies) != list(range(1, n + 1)):
            raise ConfigError(
                f"trial {trial}: expected replies 1..{n} per the configured schedule, "
                f"got {len(replies)} rows"
            )
        t_r = [replies[k] for k in range(1, n + 1)]
        out.append((trial, ObservationSet(
            t_a_hat=toa.get(trial) if has_toa else None,
            t_r_hat=t_r,
            t_d_prime=cfg.protocol.t_d_prime,
            delays=cfg.protocol.delays,
        )))
    if not out:
        raise ConfigError(f"observations file {path} holds no data rows")
    return out


def _cmd_estimate(cfg: RunConfig, obs_path: str | None) -> tuple[str, int]:
    if obs_path is None:
        rng = RngSpec(seed=cfg.seed)
        pairs = []
        for trial in range(cfg.trials):
            obs = run_exchange(cfg.protocol, cfg.clock, cfg.noise, rng, trial)
            pairs.append((trial, run_estimators(obs, cfg.noise)))
    else:
        pairs = [
            (trial, run_estimators(obs, cfg.noise))
            for trial, obs in _parse_obs_file(obs_path, cfg)
        ]
    return _estimate_rows(pairs), 0


def _cmd_crlb(cfg: RunConfig) -> tuple[str, int]:
    alpha = cfg.clock.alpha
    tau = cfg.protocol.tau
    report = crlb_alpha_tau(alpha, tau, cfg.protocol.delays, cfg.noise)
    matrix = fim(alpha, tau, cfg.protocol.delays, cfg.noise)
    lines = [
        "c_alpha=" + FMT % report.c_alpha,
        "sqrt_c_alpha=" + FMT % report.c_alpha**0.5,
        "c_tau_s2=" + FMT % report.c_tau,
        "sqrt_c_tau_s=" + FMT % report.c_tau**0.5,
        "fim_alpha_alpha=" + FMT % matrix[0, 0],
        "fim_alpha_tau=" + FMT % matrix[0, 1],
        "fim_tau_tau=" + FMT % matrix[1, 1],
        "sigma_a_s=" + FMT % cfg.noise.sigma_a,
        "sigma_r_s=" + FMT % cfg.noise.sigma_r,
    ]
    return "\n".join(lines) + "\n", 0


def _cmd_sweep(cfg: RunConfig) -> tuple[str, int]:
    if cfg.sweep_axis is None:
        raise ConfigError("sweep requires a [sweep] section in the configuration")
    base = Scenario(
        clock=cfg.clock, config=cfg.protocol, noise=cfg.noise,
        trials=cfg.trials, rng=RngSpec(seed=cfg.seed),
    )
    spec = SweepSpec(axis=cfg.sweep_axis, grid=cfg.sweep_values, base=base)
    table = run_sweep(spec)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "axis", "value", "estimator", "std_sim", "std_pred",
        "bias", "failures", "trials", "seed",
    ])
    for row in table.rows:
        value_text = str(row.value) if cfg.sweep_axis == "n_replies" else FMT % row.value
        for name in ESTIMATOR_NAMES:
            col = row.stats.columns[name]
            pred = row.stats.pred_std[name] if name in _PRED_STD_NAMES else None
            writer.writerow([
                row.axis, value_text, name,
                FMT % col.std, _fmt(pred), FMT % col.bias,
                col.failures, row.stats.trials, cfg.seed,
            ])
    for value, message in table.failed:
        print(f"sweep point {value!r} failed: {message}", file=sys.stderr)
    return buf.getvalue(), 1 if table.failed else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twrsync",
        description="Two-way ranging and clock synchronization: simulation, "
        "estimation, variance bounds, Monte Carlo sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "simulate": "write simulated exchange timestamps",
        "estimate": "estimate drift, delay, and offset per trial",
        "crlb": "print variance bounds at the configured truth",
        "sweep": "compare Monte Carlo spread against predictions",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="TOML configuration (defaults apply when omitted)")
        p.add_argument("--out", metavar="PATH", help="output file (stdout when omitted)")
        p.add_argument("--seed", type=int, help="override run.seed")
        if name == "estimate":
            p.add_argument("--obs", metavar="PATH", help="estimate from this simulate-format CSV instead of simulating")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "simulate":
            text, code = _cmd_simulate(cfg)
        elif args.command == "estimate":
            text, code = _cmd_estimate(cfg, args.obs)
        elif args.command == "crlb":
            text, code = _cmd_crlb(cfg)
        else:
            text, code = _cmd_sweep(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_output(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
