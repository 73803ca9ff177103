# %% [markdown]
# # Growing the jammer array
#
# With N = 16 elements fixed, add jammer antennas and watch the benefit of
# the surface grow. The total jammer budget stays at Pj, but a larger array
# buys the jammer more beamforming gain.

# %%
import os

from risnoma import ExperimentConfig, Mode, OptimizerConfig
from risnoma.experiment import run_power_vs_M

trials = int(os.environ.get("TRIALS", 10))
cfg = ExperimentConfig(trials=trials, M_list=(1, 2, 4, 8, 16), master_seed=0,
                       optimizer=OptimizerConfig(restarts=6))
res = run_power_vs_M(cfg, N_fixed=16)

# %%
print(f"{'M':>3} " + "".join(f"{m.value:>14}" for m in Mode) + f"{'NoRis - Abs':>14}")
for M in cfg.M_list:
    v = [res.mean_total(m, 16, M) for m in Mode]
    print(f"{M:>3} " + "".join(f"{x:14.4g}" for x in v) + f"{v[0] - v[2]:14.4g}")
