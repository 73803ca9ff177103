"""
Monte-Carlo sweeps over surface size N, jammer antennas M and RIS mode.

A trial index fixes the channel realization. Channel draws have the prefix
property (see `risnoma.channel`): the (N, M) draw of a trial is the leading
block of any larger draw with the same seed. Every mode and every grid
point therefore sees the same underlying channels, so comparisons between
curves are paired.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import yaml

from .alloc import DegenerateChannel
from .channel import GainProfile, RngSeed, draw_channels
from .model import ContractError, Mode, SystemParams
from .optimizer import OptimizationResult, OptimizerConfig, no_ris_baseline, optimize

log = logging.getLogger(__name__)

TRIAL_COLUMNS = ["mode", "N", "M", "trial", "p1", "p2", "total_normalized", "gamma1",
                 "gamma2", "sigma_j2", "mean_beta", "iterations", "feasible"]
SUMMARY_COLUMNS = ["mode", "N", "M", "trials_used", "mean_total_normalized",
                   "stderr_total_normalized", "mean_absorption", "stderr_absorption"]
MODE_ORDER = {m: i for i, m in enumerate(Mode)}
NESTING_TOL = 1e-9
FIG6_M = (4, 8, 16)


class NestingViolation(RuntimeError):
    """The absorptive optimum came out worse than a configuration it contains."""


@dataclass(frozen=True)
class ExperimentConfig:
    profile: GainProfile = field(default_factory=GainProfile)
    sigma2: float = 1.0
    Pj_over_sigma2: float = 40.0
    T1: float = 5.0
    T2: float = 5.0
    N_list: tuple = (2, 4, 8, 16, 32, 64)
    M_list: tuple = (1, 2, 4, 8, 16)
    trials: int = 100
    modes: tuple = tuple(Mode)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    master_seed: int = 0
    output_path: str = "results"
    threads: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "N_list", tuple(int(n) for n in self.N_list))
        object.__setattr__(self, "M_list", tuple(int(m) for m in self.M_list))
        object.__setattr__(self, "modes", tuple(sorted({Mode.parse(m) for m in self.modes},
                                                       key=MODE_ORDER.get)))
        if self.trials < 1:
            raise ContractError("need at least one trial")
        if not (self.N_list and self.M_list and self.modes):
            raise ContractError("N_list, M_list and modes must be non-empty")
        if min(self.N_list) < 0 or min(self.M_list) < 1:
            raise ContractError("N values must be >= 0 and M values >= 1")
        # validates sigma2, Pj and the targets
        self.system_params(0, 1, Mode.NO_RIS)

    @property
    def Pj(self) -> float:
        return self.Pj_over_sigma2 * self.sigma2

    def system_params(self, N: int, M: int, mode: Mode) -> SystemParams:
        return SystemParams(self.sigma2, self.Pj, self.T1, self.T2, N, M, mode)

    # --- (de)serialization -------------------------------------------------

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["profile"] = asdict(self.profile)
        opt = asdict(self.optimizer)
        opt.pop("seed")
        d["optimizer"] = opt
        d["N_list"] = list(self.N_list)
        d["M_list"] = list(self.M_list)
        d["modes"] = [m.value for m in self.modes]
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ContractError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "profile" in data:
            data["profile"] = _sub(GainProfile, data["profile"], "profile")
        if "optimizer" in data:
            data["optimizer"] = _sub(OptimizerConfig, data["optimizer"], "optimizer")
        return cls(**data)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ExperimentConfig":
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, dict):
            raise ContractError(f"{path}: expected a mapping at top level")
        return cls.from_dict(data)

    def dump(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="\n") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=False)

    def with_overrides(self, overrides: dict) -> "ExperimentConfig":
        """Apply ``{"key": value}`` overrides; dotted keys reach into
        ``profile.*`` and ``optimizer.*``."""
        d = self.to_dict()
        for key, value in overrides.items():
            head, _, tail = key.partition(".")
            if tail:
                if head not in ("profile", "optimizer") or tail not in d[head]:
                    raise ContractError(f"unknown config key {key!r}")
                d[head][tail] = value
            else:
                if head not in d:
                    raise ContractError(f"unknown config key {key!r}")
                d[head] = value
        return ExperimentConfig.from_dict(d)


def _sub(klass, data, name):
    if isinstance(data, klass):
        return data
    known = {f.name for f in fields(klass)} - {"seed"}
    unknown = set(data) - known
    if unknown:
        raise ContractError(f"unknown {name} keys: {', '.join(sorted(unknown))}")
    return klass(**data)


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    mode: Mode
    N: int
    M: int
    total_normalized: float
    p1: float
    p2: float
    gamma1: float
    gamma2: float
    sigma_j2: float
    mean_beta: float
    iterations_used: int
    feasible: bool
    objective: float = field(default=math.nan, compare=False)

    def sort_key(self):
        return (MODE_ORDER[self.mode], self.N, self.M, self.trial_index)


@dataclass(frozen=True)
class CellSummary:
    mode: Mode
    N: int
    M: int
    trials_used: int
    infeasible: int
    mean_total_normalized: float
    stderr_total_normalized: float
    mean_absorption: float
    stderr_absorption: float


@dataclass
class SweepResult:
    trials: list = field(default_factory=list)
    cells: dict = field(default_factory=dict)

    def cell(self, mode: Mode | str, N: int, M: int) -> CellSummary:
        return self.cells[(Mode.parse(mode), N, M)]

    def mean_total(self, mode, N, M) -> float:
        return self.cell(mode, N, M).mean_total_normalized

    def mean_absorption(self, mode, N, M) -> float:
        return self.cell(mode, N, M).mean_absorption

    def rows(self, mode=None, N=None, M=None) -> list:
        mode = None if mode is None else Mode.parse(mode)
        return [t for t in self.trials
                if (mode is None or t.mode is mode) and (N is None or t.N == N)
                and (M is None or t.M == M)]


def _mean_stderr(x: np.ndarray) -> tuple[float, float]:
    if x.size == 0:
        return math.nan, math.nan
    mean = float(np.mean(x))
    if x.size < 2 or not np.all(np.isfinite(x)):
        return mean, math.nan
    return mean, float(np.std(x, ddof=1) / math.sqrt(x.size))


def aggregate(trials: Iterable[TrialResult]) -> SweepResult:
    """Sort trial rows and compute per-(mode, N, M) summaries over feasible rows."""
    trials = sorted(trials, key=TrialResult.sort_key)
    groups: dict = {}
    for t in trials:
        groups.setdefault((t.mode, t.N, t.M), []).append(t)
    cells = {}
    for key, rows in groups.items():
        ok = [t for t in rows if t.feasible]
        bad = len(rows) - len(ok)
        if bad:
            log.warning("%s N=%d M=%d: %d infeasible trial(s) excluded from means",
                        key[0].value, key[1], key[2], bad)
        total = np.array([t.total_normalized for t in ok])
        absorption = np.array([1.0 - t.mean_beta for t in ok])
        mt, st = _mean_stderr(total)
        if key[0] is Mode.NO_RIS:
            ma, sa = math.nan, math.nan
        else:
            ma, sa = _mean_stderr(absorption)
        cells[key] = CellSummary(key[0], key[1], key[2], len(ok), bad, mt, st, ma, sa)
    return SweepResult(trials, cells)


def trial_row(trial, mode, N, M, res: OptimizationResult | None, sigma2) -> TrialResult:
    if res is None or not res.feasible:
        return TrialResult(trial, mode, N, M, math.inf, math.inf, math.inf, math.nan, math.nan,
                           math.nan, math.nan, 0 if res is None else res.iterations_used, False)
    a = res.allocation
    if mode is Mode.NO_RIS:
        mean_beta = math.nan
    else:
        mean_beta = float(np.mean(res.ris.beta)) if res.ris.N else math.nan
    return TrialResult(trial, mode, N, M, a.total_normalized, a.p1, a.p2, a.gamma1, a.gamma2,
                       a.sigma_j2, mean_beta, res.iterations_used, True, res.objective)


def _check_nesting(ab: OptimizationResult, other: OptimizationResult, what: str, where: str):
    if not (ab.feasible and other.feasible):
        return
    if ab.objective > other.objective + NESTING_TOL * (1.0 + abs(other.objective)):
        raise NestingViolation(f"{where}: absorptive objective {ab.objective!r} exceeds "
                               f"{what} objective {other.objective!r}")


def solve_trial(cfg: ExperimentConfig, trial: int, N: int, M: int,
                modes: Sequence[Mode]) -> list[TrialResult]:
    """All requested modes on the seeded channel draw of one trial."""
    cs = draw_channels(cfg.profile, N, M, RngSeed(cfg.master_seed, trial))
    return solve_channels(cfg, cs, trial, modes)


def solve_channels(cfg: ExperimentConfig, cs, trial: int,
                   modes: Sequence[Mode]) -> list[TrialResult]:
    """All requested modes on one channel realization, with nesting checks.

    Raises
    ------
    NestingViolation
        If the absorptive result is worse than the phase-only or no-RIS one.
    """
    N, M = cs.N, cs.M
    opt_cfg = replace(cfg.optimizer, seed=RngSeed(cfg.master_seed, trial))
    where = f"trial {trial}, N={N}, M={M}"
    modes = set(modes)

    try:
        base = no_ris_baseline(cs, cfg.system_params(0, M, Mode.NO_RIS))
    except DegenerateChannel:
        base = None
    out = {Mode.NO_RIS: base}

    phase = None
    need_phase = Mode.PHASE_ONLY in modes or (
        Mode.ABSORPTIVE in modes and opt_cfg.warm_start_from_phase_only)
    if need_phase:
        phase = optimize(cs, cfg.system_params(N, M, Mode.PHASE_ONLY), opt_cfg)
        out[Mode.PHASE_ONLY] = phase
    if Mode.ABSORPTIVE in modes:
        ab = optimize(cs, cfg.system_params(N, M, Mode.ABSORPTIVE), opt_cfg,
                      warm_start=phase.ris if phase is not None else None)
        out[Mode.ABSORPTIVE] = ab
        if phase is not None:
            _check_nesting(ab, phase, "phase-only", where)
        if base is not None:
            _check_nesting(ab, base, "no-RIS", where)

    return [trial_row(trial, m, N, M, out[m], cfg.sigma2)
            for m in sorted(modes, key=MODE_ORDER.get)]


def _solve_unit(args):
    return solve_trial(*args)


def run_grid(cfg: ExperimentConfig, N_list: Sequence[int], M_list: Sequence[int],
             modes: Sequence[Mode] | None = None, progress=None) -> SweepResult:
    """Every (trial, N, M) combination for the given modes.

    Units run in a process pool when ``cfg.threads > 1``; results are sorted
    before aggregation, so the output does not depend on the pool size.
    """
    modes = tuple(Mode.parse(m) for m in (modes or cfg.modes))
    units = [(cfg, t, N, M, modes) for M in M_list for N in N_list for t in range(cfg.trials)]
    threads = cfg.threads or os.cpu_count() or 1
    rows: list[TrialResult] = []
    if threads > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for i, chunk in enumerate(pool.map(_solve_unit, units, chunksize=4)):
                rows.extend(chunk)
                if progress:
                    progress(i + 1, len(units))
    else:
        for i, u in enumerate(units):
            rows.extend(_solve_unit(u))
            if progress:
                progress(i + 1, len(units))
    return aggregate(rows)


def run_power_vs_N(cfg: ExperimentConfig, M_fixed: int, progress=None) -> SweepResult:
    if M_fixed not in cfg.M_list:
        raise ContractError(f"M={M_fixed} is not in M_list {list(cfg.M_list)}")
    return run_grid(cfg, cfg.N_list, [M_fixed], progress=progress)


def run_absorption_vs_N(cfg: ExperimentConfig, M_values: Sequence[int] = FIG6_M,
                        progress=None) -> SweepResult:
    """Absorptive mode only; summaries carry the mean absorption ``1 - mean(beta)``."""
    return run_grid(cfg, cfg.N_list, M_values, [Mode.ABSORPTIVE], progress=progress)


def run_power_vs_M(cfg: ExperimentConfig, N_fixed: int = 16, progress=None) -> SweepResult:
    return run_grid(cfg, [N_fixed], cfg.M_list, progress=progress)


# --- CSV ---------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, Mode):
        return v.value
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def write_trials_csv(trials: Iterable[TrialResult], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for t in sorted(trials, key=TrialResult.sort_key):
            w.writerow(_fmt(v) for v in (t.mode, t.N, t.M, t.trial_index, t.p1, t.p2,
                                         t.total_normalized, t.gamma1, t.gamma2, t.sigma_j2,
                                         t.mean_beta, t.iterations_used, t.feasible))


def write_summary_csv(result: SweepResult, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for key in sorted(result.cells, key=lambda k: (MODE_ORDER[k[0]], k[1], k[2])):
            c = result.cells[key]
            w.writerow(_fmt(v) for v in (c.mode, c.N, c.M, c.trials_used,
                                         c.mean_total_normalized, c.stderr_total_normalized,
                                         c.mean_absorption, c.stderr_absorption))


def write_csv(result: SweepResult, path: str | os.PathLike) -> tuple[Path, Path]:
    """Write ``trials.csv`` and ``summary.csv`` into directory `path`."""
    out = Path(path)
    tpath, spath = out / "trials.csv", out / "summary.csv"
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_trials_csv(result.trials, tpath)
        write_summary_csv(result, spath)
    except OSError as exc:
        raise OSError(f"could not write results to {out}: {exc}") from exc
    return tpath, spath


def read_trials_csv(path: str | os.PathLike) -> list[TrialResult]:
    rows = []
    with open(path, newline="") as fh:
        for r in csv.DictReader(fh):
            rows.append(TrialResult(
                trial_index=int(r["trial"]), mode=Mode.parse(r["mode"]), N=int(r["N"]),
                M=int(r["M"]), total_normalized=float(r["total_normalized"]),
                p1=float(r["p1"]), p2=float(r["p2"]), gamma1=float(r["gamma1"]),
                gamma2=float(r["gamma2"]), sigma_j2=float(r["sigma_j2"]),
                mean_beta=float(r["mean_beta"]), iterations_used=int(r["iterations"]),
                feasible=r["feasible"] == "true"))
    return rows
