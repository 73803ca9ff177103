# %% [markdown]
# # One channel draw, three receivers
#
# Draw a single Rayleigh realization, then compare the power the two users
# need without a surface, with a phase-only surface and with an absorptive
# surface. The jammer always picks its best beam against the receiver.

# %%
import numpy as np

from risnoma import (GainProfile, Mode, OptimizerConfig, RngSeed, SystemParams,
                     draw_channels, no_ris_baseline, optimize, solve_jammer)

N, M = 8, 8
cs = draw_channels(GainProfile(), N, M, RngSeed(master_seed=1, trial_index=0))
print(f"|h1|^2 = {abs(cs.h1)**2:.3f}, |h2|^2 = {abs(cs.h2)**2:.3f}, ||hj||^2 = {np.sum(abs(cs.hj)**2):.3f}")

# %%
base = no_ris_baseline(cs.without_ris(), SystemParams(M=M, mode=Mode.NO_RIS))
print(f"no surface:  total power {base.objective:10.3f}")

cfg = OptimizerConfig(restarts=10)
po = optimize(cs, SystemParams(N=N, M=M, mode=Mode.PHASE_ONLY), cfg)
ab = optimize(cs, SystemParams(N=N, M=M, mode=Mode.ABSORPTIVE), cfg, warm_start=po.ris)
print(f"phase-only:  total power {po.objective:10.3f}")
print(f"absorptive:  total power {ab.objective:10.3f}")

# %% [markdown]
# The absorptive optimizer starts from the phase-only answer, so it can only
# improve on it. With eight elements against eight jammer antennas the surface
# cannot steer a null, and switching some elements off pays.

# %%
print("beta :", np.round(ab.ris.beta, 3))
print("theta:", np.round(ab.ris.theta, 3))
for label, res in (("phase-only", po), ("absorptive", ab)):
    jr = solve_jammer(cs, res.ris, 40.0)
    print(f"{label:>11}: interference {jr.sigma_j2:9.3f}, "
          f"SINRs {res.allocation.gamma1:.6f} / {res.allocation.gamma2:.6f}")
