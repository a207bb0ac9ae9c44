"""Independent checks on computed optimal potentials.

* ``system_residual``: how well ``u_i = |c_i|**0.5 * phi_i`` solve the coupled
  cubic boundary-value system with the prior potential.
* ``independence_check``: smallest eigenvalue of the Gram matrix of squared
  eigenfunctions.
* ``minimality_oracle``: brute-force penalty minimization over a hat-function
  basis that knows nothing about the squared-mode structure.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .core import SampledFunction, check_same_grid, inner_product
from .derivative import gram_matrix
from .errors import ConvergenceError, InvalidArgumentError
from .forward import lowest_eigenpairs
from .inverse import InverseSolution, SolverOptions, TargetSet, solve_inverse

log = logging.getLogger(__name__)

PENALTY_SCHEDULE = (1e2, 1e4, 1e6, 1e8)
FEASIBILITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class SystemResidual:
    per_equation: np.ndarray
    max_residual: float


@dataclass(frozen=True, eq=False)
class MinimalityReport:
    solver_distance: float
    oracle_distance: float
    basis_dim: int
    gap: float
    feasible: bool
    restart_distances: tuple = ()
    best_constraint_residual: float = math.nan


def second_difference(u: np.ndarray, h: float, stencil: str = "second_order") -> np.ndarray:
    """Discrete ``u''`` at the interior nodes with ``u = 0`` at both ends.

    ``second_order`` is the 3-point stencil of the eigensolver.  ``fourth_order``
    is the 5-point stencil with odd reflection across the end points; it is
    used to measure the truncation error of second-order solutions.
    """
    if stencil == "second_order":
        p = np.concatenate(([0.0], u, [0.0]))
        return (p[:-2] - 2.0 * p[1:-1] + p[2:]) / h**2
    if stencil == "fourth_order":
        p = np.concatenate(([-u[0], 0.0], u, [0.0, -u[-1]]))
        return (-p[:-4] + 16.0 * p[1:-3] - 30.0 * p[2:-2] + 16.0 * p[3:-1] - p[4:]) / (12.0 * h**2)
    raise InvalidArgumentError(f"unknown stencil {stencil!r}")


def system_residual(u_hat, sigma, V0: SampledFunction, targets, stencil: str = "second_order") -> SystemResidual:
    """Residual of ``-u_i'' + V0 u_i - E_i u_i - (sum_j sigma_j u_j**2) u_i = 0``."""
    if not isinstance(targets, TargetSet):
        targets = TargetSet(tuple(targets))
    u_hat = list(u_hat)
    sigma = np.asarray(sigma)
    if len(u_hat) != targets.m or sigma.size != targets.m:
        raise InvalidArgumentError("need one function and one sign per target")
    if np.any(np.abs(sigma) > 1) or np.any(sigma != np.round(sigma)):
        raise InvalidArgumentError("sigma entries must be -1, 0 or +1")
    check_same_grid(V0, *u_hat)
    h = V0.grid.h
    U = np.array([u.values for u in u_hat])
    coupling = sigma @ U**2
    out = np.empty(targets.m)
    for i, (u, E) in enumerate(zip(U, targets.targets)):
        r = -second_difference(u, h, stencil) + (V0.values - E - coupling) * u
        out[i] = math.sqrt(h * np.dot(r, r))
    return SystemResidual(out, float(out.max()))


def independence_check(V: SampledFunction, m: int) -> float:
    return gram_matrix(V, m).smallest_eigenvalue


def hat_basis(grid, basis_dim: int) -> np.ndarray:
    """Hat functions on ``basis_dim`` equispaced interior nodes, rows sampled on ``grid``."""
    width = grid.L / (basis_dim + 1)
    centers = width * np.arange(1, basis_dim + 1)
    return np.maximum(0.0, 1.0 - np.abs(grid.x[None, :] - centers[:, None]) / width)


def minimality_oracle(V0: SampledFunction, targets, basis_dim: int = 32, trials: int = 5,
                      seed: int = 0, solution: InverseSolution | None = None,
                      opts: SolverOptions = SolverOptions()) -> MinimalityReport:
    """Compare the structured solution with a brute-force constrained minimizer.

    Minimizes ``||V - V0||**2 + rho * sum_k (E_k(V) - E_k*)**2`` over
    ``V = V0 + sum_i a_i B_i`` by L-BFGS with the penalty raised through
    ``PENALTY_SCHEDULE``; restarts from ``trials`` random points and from the
    projection of the structured solution.
    """
    if not isinstance(targets, TargetSet):
        targets = TargetSet(tuple(targets))
    m = targets.m
    if basis_dim < m:
        raise InvalidArgumentError(f"basis_dim={basis_dim} must be at least m={m}")
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    if solution is None:
        solution = solve_inverse(V0, targets, opts)

    grid = V0.grid
    h = grid.h
    goal = targets.as_array()
    B = hat_basis(grid, basis_dim)
    M = h * B @ B.T

    def evaluate(a, rho):
        V = SampledFunction(grid, V0.values + a @ B)
        spec = lowest_eigenpairs(V, m)
        F = spec.eigenvalues - goal
        sq = spec.modes() ** 2
        f = a @ M @ a + rho * np.dot(F, F)
        g = 2.0 * M @ a + 2.0 * rho * (h * B @ sq.T) @ F
        return f, g

    def constraint_violation(a):
        V = SampledFunction(grid, V0.values + a @ B)
        return float(np.max(np.abs(lowest_eigenpairs(V, m).eigenvalues - goal)))

    rng = np.random.default_rng(seed)
    scale = max(float(np.max(np.abs(goal - lowest_eigenpairs(V0, m).eigenvalues))), 1e-3)
    starts = [rng.normal(0.0, scale, basis_dim) for _ in range(trials)]
    d = (solution.V_hat - V0).values
    starts.append(np.linalg.solve(M, h * B @ d))

    distances = []
    best = (math.inf, math.inf)
    for a in starts:
        try:
            for rho in PENALTY_SCHEDULE:
                res = minimize(evaluate, a, args=(rho,), jac=True, method="L-BFGS-B",
                               options={"maxiter": 2000, "ftol": 1e-15, "gtol": 1e-10})
                a = res.x
            viol = constraint_violation(a)
        except (ConvergenceError, ArithmeticError, ValueError) as exc:
            log.info("oracle restart failed: %s", exc)
            distances.append(math.nan)
            continue
        dist = math.sqrt(max(float(a @ M @ a), 0.0))
        distances.append(dist if viol <= FEASIBILITY_TOL else math.nan)
        if viol <= FEASIBILITY_TOL and dist < best[0]:
            best = (dist, viol)
    finite = [x for x in distances if not math.isnan(x)]
    if len(finite) > 1 and (max(finite) - min(finite)) > 1e-3 * max(min(finite), 1e-12):
        log.warning("oracle restarts reached different local minima: %s", finite)
    feasible = math.isfinite(best[0])
    if not feasible:
        log.warning("minimality oracle found no feasible point in %d restarts", len(starts))
    return MinimalityReport(
        solver_distance=solution.distance,
        oracle_distance=best[0],
        basis_dim=basis_dim,
        gap=best[0] - solution.distance,
        feasible=feasible,
        restart_distances=tuple(distances),
        best_constraint_residual=best[1],
    )
