# %% [markdown]
# # How much does the optimized surface absorb?
#
# Absorption is 1 - mean(beta). Small surfaces facing many jammer antennas
# lean on absorption, and large ones behave almost like a lossless
# phase shifter.

# %%
import os

from risnoma import ExperimentConfig, Mode, OptimizerConfig
from risnoma.experiment import run_absorption_vs_N

trials = int(os.environ.get("TRIALS", 10))
cfg = ExperimentConfig(trials=trials, N_list=(4, 16, 64), master_seed=0,
                       optimizer=OptimizerConfig(restarts=6))
res = run_absorption_vs_N(cfg, M_values=(4, 16))

# %%
for M in (4, 16):
    levels = [res.mean_absorption(Mode.ABSORPTIVE, N, M) for N in cfg.N_list]
    print(f"M={M:>2}: " + "  ".join(f"N={N}: {a:.3f}" for N, a in zip(cfg.N_list, levels)))
