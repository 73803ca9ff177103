"""Power minimization for RIS-assisted uplink NOMA under a worst-case jammer."""

from .alloc import (
    Allocation,
    DegenerateChannel,
    min_power_allocation,
    reduced_gradient,
    reduced_objective,
    sinr,
)
from .channel import GainProfile, RngSeed, draw_channels, load_channels, save_channels
from .experiment import (
    ExperimentConfig,
    NestingViolation,
    SweepResult,
    TrialResult,
    run_absorption_vs_N,
    run_grid,
    run_power_vs_M,
    run_power_vs_N,
    write_csv,
)
from .jammer import JammerResult, interference_power, solve_jammer
from .model import (
    ChannelSet,
    ContractError,
    Mode,
    RisState,
    SystemParams,
    effective_channel,
    effective_jammer_channel,
    received_signal,
)
from .optimizer import OptimizationResult, OptimizerConfig, no_ris_baseline, optimize, step

__version__ = "0.1.0"
