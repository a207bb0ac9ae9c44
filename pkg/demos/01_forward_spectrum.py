# %% [markdown]
"""
# Dirichlet spectrum of a 1D Schrodinger operator

The forward solver discretizes `-u'' + V u = E u` on `(0, L)` with `u(0) = u(L) = 0`
by the 3-point stencil. Eigenvalues are bracketed by Sturm-sequence bisection, which
also certifies their index, and eigenvectors come from inverse iteration.
"""

# %%
import math

import numpy as np

from optpot import (
    SampledFunction,
    assemble,
    count_below,
    lowest_eigenpairs,
    make_grid,
    preset_potentials,
    sample_potential,
)

grid = make_grid(math.pi, 2000)
free = SampledFunction.constant(grid, 0.0)
spec = lowest_eigenpairs(free, 5)
for p in spec:
    print(f"k={p.k}  E={p.E:.10f}  exact={p.k**2}  nodes={p.nodes}")

# %% [markdown]
"""
The error of the 3-point scheme is about `k**4 h**2 / 12`, so halving `h` cuts it by 4.
"""

# %%
for n in (499, 999, 1999, 3999):
    E1 = lowest_eigenpairs(SampledFunction.constant(make_grid(math.pi, n), 0.0), 1)[0].E
    print(f"n={n:5d}  E1 - 1 = {E1 - 1:.3e}")

# %% [markdown]
"""
Sturm counts give the number of eigenvalues below any energy, exactly.
"""

# %%
T = assemble(free)
for E in (0.5, 1.5, 4.5, 9.5, 24.9):
    print(f"eigenvalues below {E:5.1f}: {count_below(T, E)}")

# %% [markdown]
"""
The built-in priors: a constant, a harmonic well and a square well. Every one has
`k - 1` sign changes in the k-th eigenfunction.
"""

# %%
for name, spec_ in preset_potentials(math.pi).items():
    V = sample_potential(spec_, grid)
    s = lowest_eigenpairs(V, 4)
    print(f"{name:12s}", np.round(s.eigenvalues, 6), [p.nodes for p in s])
