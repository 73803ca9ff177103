"""Command-line entry point: single solves and figure-reproduction sweeps."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import yaml

from .alloc import DegenerateChannel
from .channel import RngSeed, draw_channels, load_channels
from .experiment import (
    ExperimentConfig,
    NestingViolation,
    run_absorption_vs_N,
    run_grid,
    run_power_vs_M,
    run_power_vs_N,
    solve_channels,
    write_csv,
    write_trials_csv,
)
from .model import ContractError, Mode

OUT_ENV = "RISNOMA_OUT"
FIGURES = {"fig3": 4, "fig4": 8, "fig5": 16}
DEFAULTS = ExperimentConfig()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")


def _key_value(text: str) -> tuple[str, object]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), yaml.safe_load(value)


def build_parser() -> argparse.ArgumentParser:
    d = DEFAULTS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment config file")
    common.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or results/<command>)")
    common.add_argument("--seed", type=int, help=f"master seed (default: {d.master_seed})")
    common.add_argument("--trials", type=int, help=f"Monte-Carlo trials (default: {d.trials})")
    common.add_argument("--threads", type=int, help="worker processes (default: CPU count)")
    common.add_argument("--mode", choices=[m.value for m in Mode] + ["all"],
                        help="RIS configuration(s) to run (default: all)")
    common.add_argument("--N-list", type=_int_list, dest="N_list",
                        help=f"RIS element counts (default: {','.join(map(str, d.N_list))})")
    common.add_argument("--M-list", type=_int_list, dest="M_list",
                        help=f"jammer antenna counts (default: {','.join(map(str, d.M_list))})")
    common.add_argument("--Pj", type=float,
                        help=f"normalized jammer power Pj/sigma2 (default: {d.Pj_over_sigma2:g})")
    common.add_argument("--T1", type=float, help=f"SINR target of user 1 (default: {d.T1:g})")
    common.add_argument("--T2", type=float, help=f"SINR target of user 2 (default: {d.T2:g})")
    common.add_argument("--restarts", type=int,
                        help=f"optimizer restarts (default: {d.optimizer.restarts})")
    common.add_argument("--set", type=_key_value, action="append", default=[], metavar="KEY=VALUE",
                        help="override any config key, e.g. profile.gain_hj=1 or optimizer.max_iters=200")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="risnoma", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("solve", parents=[common], help="optimize one channel realization")
    s.add_argument("--N", type=int, default=16, help="RIS elements (default: 16)")
    s.add_argument("--M", type=int, default=4, help="jammer antennas (default: 4)")
    s.add_argument("--trial", type=int, default=0, help="trial index within the seed (default: 0)")
    s.add_argument("--channels", help=".npz channel file instead of a seeded draw")
    s.add_argument("--csv", help="also write the result rows to this CSV file")
    for name, M in FIGURES.items():
        sub.add_parser(name, parents=[common], help=f"total power vs N with M={M}")
    sub.add_parser("fig6", parents=[common], help="mean absorption vs N for M=4, 8, 16")
    sub.add_parser("fig7", parents=[common], help="total power vs M with N=16")
    sub.add_parser("sweep", parents=[common], help="custom N x M grid from the config")
    return p


def effective_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    flags = {
        "master_seed": args.seed,
        "trials": args.trials,
        "threads": args.threads,
        "N_list": args.N_list,
        "M_list": args.M_list,
        "Pj_over_sigma2": args.Pj,
        "T1": args.T1,
        "T2": args.T2,
        "optimizer.restarts": args.restarts,
    }
    if args.mode:
        flags["modes"] = [m.value for m in Mode] if args.mode == "all" else [args.mode]
    overrides = dict(args.set)
    overrides.update({k: v for k, v in flags.items() if v is not None})
    return cfg.with_overrides(overrides)


def _progress(done, total):
    if done == total or done % max(1, total // 20) == 0:
        print(f"\r  {done}/{total} units", end="\n" if done == total else "", file=sys.stderr,
              flush=True)


def _output_dir(args, command) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_ENV, "results")) / command


def _run_solve(args, cfg: ExperimentConfig) -> None:
    modes = cfg.modes
    if args.channels:
        cs = load_channels(args.channels)
        N, M = cs.N, cs.M
    else:
        N, M = args.N, args.M
        cs = draw_channels(cfg.profile, N, M, RngSeed(cfg.master_seed, args.trial))
    rows = solve_channels(cfg, cs, args.trial, modes)

    names = ["mode", "N", "M", "p1", "p2", "total_normalized", "gamma1", "gamma2",
             "sigma_j2", "mean_beta", "iterations", "feasible"]
    width = max(map(len, names))
    for r in rows:
        values = [r.mode.value, r.N, r.M, r.p1, r.p2, r.total_normalized, r.gamma1, r.gamma2,
                  r.sigma_j2, r.mean_beta, r.iterations_used, r.feasible]
        for name, v in zip(names, values):
            text = format(v, ".10g") if isinstance(v, float) else str(v)
            print(f"{name:<{width}}  {text}")
        print()
    if args.csv:
        try:
            write_trials_csv(rows, args.csv)
        except OSError as exc:
            raise OSError(f"could not write {args.csv}: {exc}") from exc


def _run_sweep(args, cfg: ExperimentConfig) -> Path:
    cmd = args.command
    if cmd in FIGURES:
        cfg = replace(cfg, M_list=(FIGURES[cmd],))
        run = lambda c: run_power_vs_N(c, FIGURES[cmd], progress=_progress)
    elif cmd == "fig6":
        if args.M_list is None:
            cfg = replace(cfg, M_list=(4, 8, 16))
        cfg = replace(cfg, modes=(Mode.ABSORPTIVE,))
        run = lambda c: run_absorption_vs_N(c, c.M_list, progress=_progress)
    elif cmd == "fig7":
        cfg = replace(cfg, N_list=(16,))
        run = lambda c: run_power_vs_M(c, 16, progress=_progress)
    else:
        run = lambda c: run_grid(c, c.N_list, c.M_list, progress=_progress)

    out = _output_dir(args, cmd)
    out.mkdir(parents=True, exist_ok=True)
    cfg = replace(cfg, output_path=str(out))
    cfg.dump(out / "effective_config")
    print(f"{cmd}: {cfg.trials} trials, N={list(cfg.N_list)}, M={list(cfg.M_list)}, "
          f"modes={[m.value for m in cfg.modes]}", file=sys.stderr)
    result = run(cfg)
    tpath, spath = write_csv(result, out)
    print(f"wrote {tpath} and {spath}", file=sys.stderr)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = effective_config(args)
    except (ContractError, OSError, yaml.YAMLError, TypeError) as exc:
        print(f"risnoma: error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "solve":
            _run_solve(args, cfg)
        else:
            _run_sweep(args, cfg)
    except (OSError, ContractError, DegenerateChannel, NestingViolation) as exc:
        print(f"risnoma: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
