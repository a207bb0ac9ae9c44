"""First-order eigenvalue response to potential perturbations.

For a normalized Dirichlet eigenfunction ``phi_k`` of ``-d2/dx2 + V`` the
derivative of ``E_k`` in direction ``h`` is ``<phi_k**2, h>``, so ``phi_k**2``
is the gradient of ``E_k`` with respect to the potential.  The Gram matrix of
the squared eigenfunctions doubles as the (frozen-orbital) Jacobian used by the
inverse solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SampledFunction, check_same_grid, inner_product
from .errors import InvalidArgumentError
from .forward import Spectrum, lowest_eigenpairs


@dataclass(frozen=True, eq=False)
class GramMatrix:
    m: int
    entries: np.ndarray
    smallest_eigenvalue: float
    potential_hash: str


def eigenvalue_gradient(V: SampledFunction, k: int, spectrum: Spectrum | None = None) -> SampledFunction:
    if k < 1:
        raise InvalidArgumentError(f"eigenvalue index is 1-based, got {k}")
    if spectrum is None or len(spectrum) < k:
        spectrum = lowest_eigenpairs(V, k)
    return spectrum[k - 1].phi ** 2


def directional_derivative(V: SampledFunction, k: int, h: SampledFunction, spectrum=None) -> float:
    check_same_grid(V, h)
    return inner_product(eigenvalue_gradient(V, k, spectrum), h)


def finite_difference_check(V: SampledFunction, k: int, h: SampledFunction, t: float = 1e-4) -> float:
    """Relative mismatch between a central difference of ``E_k`` and the
    analytic directional derivative."""
    if not t > 0:
        raise InvalidArgumentError(f"step must be positive, got {t}")
    check_same_grid(V, h)
    exact = directional_derivative(V, k, h)
    e_plus = lowest_eigenpairs(V + t * h, k)[k - 1].E
    e_minus = lowest_eigenpairs(V - t * h, k)[k - 1].E
    fd = (e_plus - e_minus) / (2.0 * t)
    return abs(fd - exact) / (1.0 + abs(exact))


def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations (ascending)."""
    A = np.array(A, dtype=float)
    m = A.shape[0]
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if A[p, q] == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta**2 + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c
                R = np.eye(m)
                R[p, p] = R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                A = R.T @ A @ R
    return np.sort(np.diag(A))


def gram_from_modes(modes: np.ndarray, h: float) -> np.ndarray:
    sq = modes**2
    G = h * (sq @ sq.T)
    return 0.5 * (G + G.T)


def gram_matrix(V: SampledFunction, m: int, spectrum: Spectrum | None = None) -> GramMatrix:
    if m < 1:
        raise InvalidArgumentError(f"m must be >= 1, got {m}")
    if spectrum is None or len(spectrum) < m:
        spectrum = lowest_eigenpairs(V, m)
    G = gram_from_modes(spectrum.modes()[:m], V.grid.h)
    return GramMatrix(m, G, float(jacobi_eigenvalues(G)[0]), V.content_hash())
