# %% [markdown]
# # Invariant checks
#
# `run_verify` collects every structural check into one report. On a sweep
# of random connected graphs all checks pass. A hand-made drift that is not
# Hamiltonian fails the symplectic and energy checks.

# %%
from qobsnet import run_verify
from qobsnet.config import config_from_dict

print(run_verify(seed=42, count=50).text())

# %%
bad = config_from_dict({
    "unchecked": {"R_o": [[1.0, 0.5], [0.0, 1.0]], "b": [0.0, 2.0]},
    "grid": {"t_max": 10, "step": 0.1},
})
print(run_verify(bad).text())
