# %% [markdown]
"""
# How eigenvalues respond to the potential

For a normalized eigenfunction the first-order change of `E_k` along a potential
perturbation `h` is `<phi_k**2, h>`. Below we compare that with central differences
and look at the Gram matrix of the squared eigenfunctions, which is positive definite.
"""

# %%
import math

import numpy as np

from optpot import (
    SampledFunction,
    directional_derivative,
    finite_difference_check,
    gram_matrix,
    make_grid,
    preset_potentials,
    sample_potential,
)

grid = make_grid(math.pi, 2000)
well = sample_potential(preset_potentials(math.pi)["square_well"], grid)
h = SampledFunction(grid, np.cos(2 * grid.x) + 0.2 * grid.x)

for k in range(1, 6):
    d = directional_derivative(well, k, h)
    err = finite_difference_check(well, k, h, t=1e-4)
    print(f"k={k}  dE/dt = {d: .8f}   relative FD mismatch = {err:.1e}")

# %% [markdown]
"""
Shifting the potential by a constant shifts every eigenvalue by the same amount.
"""

# %%
one = SampledFunction.constant(grid, 1.0)
print([round(directional_derivative(well, k, one), 14) for k in range(1, 6)])

# %% [markdown]
"""
For `V = 0` on `(0, pi)` the Gram matrix is `(J + I/2)/pi`; its smallest eigenvalue is
`1/(2 pi)` for every `m >= 2`.
"""

# %%
free = SampledFunction.constant(grid, 0.0)
print(np.round(gram_matrix(free, 3).entries * math.pi, 8))
for m in range(1, 7):
    print(m, gram_matrix(free, m).smallest_eigenvalue, gram_matrix(well, m).smallest_eigenvalue)
