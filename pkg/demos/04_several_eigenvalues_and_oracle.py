# %% [markdown]
"""
# Prescribing several eigenvalues, and a brute-force cross-check

With `m` targets the correction lies in the span of `phi_1**2, ..., phi_m**2`.
The solver finds the coefficients by Newton's method with the Gram matrix as
Jacobian, moving the targets in from the spectrum of `V0` in homotopy steps.
"""

# %%
import math

import numpy as np

from optpot import (
    SampledFunction,
    lowest_eigenpairs,
    make_grid,
    minimality_oracle,
    preset_potentials,
    sample_potential,
    solve_inverse,
)

grid = make_grid(math.pi, 2000)
V0 = SampledFunction.constant(grid, 0.0)
sol = solve_inverse(V0, (2.0, 5.0))
print("c", sol.c, "sigma", sol.sigma, "distance", sol.distance)
print("residuals", sol.constraint_residuals)

# %% [markdown]
"""
The oracle ignores the squared-mode structure: it minimizes
`||V - V0||**2 + rho * sum (E_k - E_k*)**2` over 32 hat functions with increasing `rho`,
from random starts. It cannot do better than the structured solution.
"""

# %%
rep = minimality_oracle(V0, (2.0, 5.0), basis_dim=32, trials=5, seed=1, solution=sol)
print(f"solver {rep.solver_distance:.8f}  oracle {rep.oracle_distance:.8f}  gap {rep.gap:.2e}")

# %% [markdown]
"""
Mixed moves on a square well: raise the first and third eigenvalue, lower the second.
Each coefficient's sign tells whether its squared mode is added or removed.
"""

# %%
well = sample_potential(preset_potentials(math.pi)["square_well"], grid)
E0 = lowest_eigenpairs(well, 3).eigenvalues
sol = solve_inverse(well, E0 + np.array([0.4, -0.3, 0.5]))
print("E0     ", E0)
print("E(V)   ", sol.spectrum.eigenvalues)
print("c      ", sol.c)
print("sigma  ", sol.sigma)
print("dist   ", sol.distance)
