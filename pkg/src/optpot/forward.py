"""Dirichlet eigenpairs of ``-d2/dx2 + V`` on a uniform grid.

The operator is discretized by the 3-point stencil, giving a symmetric
tridiagonal matrix with constant off-diagonal ``-1/h**2``.  Eigenvalues are
bracketed by Sturm-sequence bisection, which also certifies their index;
eigenvectors come from inverse iteration at the bracketed shift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .core import Grid, SampledFunction, inner_product
from .errors import ConsistencyError, InvalidArgumentError

BISECTION_RTOL = 1e-13
RESIDUAL_RTOL = 1e-10
MAX_BISECTION_STEPS = 200
MAX_INVERSE_ITERATIONS = 8


@dataclass(frozen=True, eq=False)
class TridiagonalOperator:
    grid: Grid
    diag: np.ndarray
    offdiag: float

    @property
    def n(self) -> int:
        return self.diag.size

    def gershgorin(self) -> tuple[float, float]:
        r = 2.0 * abs(self.offdiag)
        return float(self.diag.min() - r), float(self.diag.max() + r)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.diag)) + 2.0 * abs(self.offdiag))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.offdiag * v[:-1]
        out[:-1] += self.offdiag * v[1:]
        return out

    def to_dense(self) -> np.ndarray:
        n = self.n
        return (
            np.diag(self.diag)
            + np.diag(np.full(n - 1, self.offdiag), 1)
            + np.diag(np.full(n - 1, self.offdiag), -1)
        )


@dataclass(frozen=True, eq=False)
class EigenPair:
    k: int
    E: float
    phi: SampledFunction
    nodes: int


@dataclass(frozen=True, eq=False)
class Spectrum:
    pairs: tuple[EigenPair, ...]

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    def __iter__(self):
        return iter(self.pairs)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([p.E for p in self.pairs])

    def modes(self) -> np.ndarray:
        """Eigenfunction samples stacked as rows, shape ``(m, n)``."""
        return np.array([p.phi.values for p in self.pairs])


def assemble(V: SampledFunction) -> TridiagonalOperator:
    h = V.grid.h
    diag = 2.0 / h**2 + V.values
    diag.setflags(write=False)
    return TridiagonalOperator(V.grid, diag, -1.0 / h**2)


@numba.njit(cache=True)
def _sturm_count(diag, e2, shift, pivmin):
    count = 0
    q = diag[0] - shift
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, diag.size):
        q = diag[i] - shift - e2 / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect(diag, e2, pivmin, k, lo, hi, rtol, max_steps):
    # invariant: count(lo) < k <= count(hi)
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * (1.0 + abs(mid)) or mid <= lo or mid >= hi:
            break
        if _sturm_count(diag, e2, mid, pivmin) >= k:
            hi = mid
        else:
            lo = mid
    return lo, hi


def _pivmin(T: TridiagonalOperator) -> float:
    return np.finfo(float).tiny * max(1.0, T.offdiag**2)


def count_below(T: TridiagonalOperator, E: float) -> int:
    """Number of eigenvalues of ``T`` strictly below ``E`` (Sturm count)."""
    return int(_sturm_count(T.diag, T.offdiag**2, float(E), _pivmin(T)))


def eigenvalue_bracket(T: TridiagonalOperator, k: int, lo=None, hi=None) -> tuple[float, float]:
    """Bisection bracket ``[lo, hi]`` around the k-th (1-based) eigenvalue."""
    g_lo, g_hi = T.gershgorin()
    lo = g_lo if lo is None else lo
    hi = g_hi if hi is None else hi
    lo, hi = _bisect(
        T.diag, T.offdiag**2, _pivmin(T), k, lo, hi, BISECTION_RTOL, MAX_BISECTION_STEPS
    )
    return float(lo), float(hi)


def sign_changes(values: np.ndarray) -> int:
    # samples at roundoff level relative to the peak carry no sign information
    nz = values[np.abs(values) > 1e-13 * np.max(np.abs(values))]
    return int(np.count_nonzero(np.signbit(nz[1:]) != np.signbit(nz[:-1])))


def rayleigh_quotient(V: SampledFunction, v: np.ndarray) -> float:
    # Dirichlet form; avoids cancellation between 2/h^2 and the off-diagonals.
    h = V.grid.h
    padded = np.concatenate(([0.0], v, [0.0]))
    kinetic = np.sum(np.diff(padded) ** 2) / h**2
    return float((kinetic + np.dot(V.values * v, v)) / np.dot(v, v))


def _inverse_iteration(T, shift, lower, rng, passes=1):
    n = T.n
    ab = np.empty((3, n))
    ab[0, :] = T.offdiag
    ab[2, :] = T.offdiag
    ab[1, :] = T.diag - shift
    tol = RESIDUAL_RTOL * T.norm_inf()
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    for it in range(MAX_INVERSE_ITERATIONS):
        try:
            w = solve_banded((1, 1), ab, v, check_finite=False)
        except LinAlgError:
            ab[1, :] = T.diag - shift * (1 + 4 * np.finfo(float).eps) - np.finfo(float).tiny
            w = solve_banded((1, 1), ab, v, check_finite=False)
        for _ in range(passes):
            for u in lower:
                w -= np.dot(u, w) * u
        v = w / np.linalg.norm(w)
        lam = float(np.dot(v, T.matvec(v)))
        # one solve leaves O(shift error / gap) contamination; always take two
        if it >= 1 and np.linalg.norm(T.matvec(v) - lam * v) <= tol:
            break
    return v


def lowest_eigenpairs(V: SampledFunction, m: int) -> Spectrum:
    """First ``m`` Dirichlet eigenpairs of ``-d2/dx2 + V``.

    Eigenfunctions are normalized in the discrete L2 product, sign-fixed so
    the first non-negligible sample is positive, and must have exactly
    ``k - 1`` interior sign changes.
    """
    n = V.grid.n
    if int(m) != m or m < 1:
        raise InvalidArgumentError(f"m must be a positive integer, got {m!r}")
    if m > n:
        raise InvalidArgumentError(f"requested {m} eigenpairs from a grid with {n} points")
    T = assemble(V)
    rng = np.random.default_rng(20240917)
    pairs = []
    units = []  # unit-Euclidean eigenvectors of lower modes
    lo = None
    for k in range(1, m + 1):
        b_lo, b_hi = eigenvalue_bracket(T, k, lo=lo)
        lo = b_lo
        shift = 0.5 * (b_lo + b_hi)
        v = _inverse_iteration(T, shift, units, rng)
        nodes = sign_changes(v)
        if nodes != k - 1:
            v = _inverse_iteration(T, shift, units, rng, passes=2)
            nodes = sign_changes(v)
            if nodes != k - 1:
                raise ConsistencyError(
                    f"eigenfunction {k} has {nodes} sign changes instead of {k - 1}; "
                    f"grid with n={n} is too coarse for this potential"
                )
        units.append(v)
        big = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))
        if v[big[0]] < 0:
            v = -v
        phi = SampledFunction(V.grid, v)
        phi = phi * (1.0 / np.sqrt(inner_product(phi, phi)))
        E = rayleigh_quotient(V, v)
        pairs.append(EigenPair(k, E, phi, nodes))
    return Spectrum(tuple(pairs))


def eigenvalues(V: SampledFunction, m: int) -> np.ndarray:
    return lowest_eigenpairs(V, m).eigenvalues
