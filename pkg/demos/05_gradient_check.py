# %% [markdown]
# # Checking the analytic gradient
#
# The optimizer descends the reduced objective P(beta, theta) with an exact
# gradient. A central difference makes a cheap sanity check.

# %%
import numpy as np

from risnoma import GainProfile, RisState, RngSeed, SystemParams, draw_channels
from risnoma.alloc import reduced_gradient, reduced_objective

N, M = 12, 4
cs = draw_channels(GainProfile(), N, M, RngSeed(3, 0))
params = SystemParams(N=N, M=M, mode="absorptive")
rng = np.random.default_rng(0)
ris = RisState(rng.uniform(0.1, 0.9, N), rng.uniform(0, 2 * np.pi, N))
d_theta, d_beta = reduced_gradient(cs, ris, params)

# %%
h = 1e-6
fd = np.empty(N)
for n in range(N):
    t_up, t_dn = ris.theta.copy(), ris.theta.copy()
    t_up[n] += h
    t_dn[n] -= h
    fd[n] = (reduced_objective(cs, RisState(ris.beta, t_up), params)
             - reduced_objective(cs, RisState(ris.beta, t_dn), params)) / (2 * h)
print("largest |analytic - FD| / |FD| over theta:", np.max(np.abs(d_theta - fd) / np.abs(fd)))
