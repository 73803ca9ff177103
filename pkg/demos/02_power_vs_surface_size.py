# %% [markdown]
# # Required power against the number of surface elements
#
# A reduced Monte-Carlo run of the M = 4 sweep. The full-scale version is
# `risnoma fig3` (and `fig4`, `fig5` for M = 8 and 16).
# Set TRIALS in the environment to change the sample size.

# %%
import os
from dataclasses import replace

import numpy as np

from risnoma import ExperimentConfig, Mode, OptimizerConfig
from risnoma.experiment import run_power_vs_N

trials = int(os.environ.get("TRIALS", 20))
cfg = ExperimentConfig(trials=trials, N_list=(2, 4, 8, 16, 32), master_seed=0,
                       optimizer=OptimizerConfig(restarts=8))
res = run_power_vs_N(cfg, M_fixed=4)

# %% [markdown]
# Means are over paired trials: every mode sees the same channels.
# Medians are printed as well because the phase-only power has a heavy
# upper tail at small N.

# %%
print(f"{'N':>4} " + "".join(f"{m.value:>14}" for m in Mode) + f"{'median PO/NR':>15}")
for N in cfg.N_list:
    means = [res.mean_total(m, N, 4) for m in Mode]
    po = np.array([t.total_normalized for t in res.rows(Mode.PHASE_ONLY, N, 4)])
    nr = np.array([t.total_normalized for t in res.rows(Mode.NO_RIS, N, 4)])
    print(f"{N:>4} " + "".join(f"{v:14.4g}" for v in means) + f"{np.median(po / nr):15.3g}")
