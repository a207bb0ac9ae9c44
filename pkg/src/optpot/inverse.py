"""Closest potential with prescribed lowest Dirichlet eigenvalues.

At an optimum the correction ``V - V0`` lies in the span of the squared
eigenfunctions of ``V`` itself, so the search is over coefficients ``c``::

    V(c) = V0 + sum_j c_j * phi_j(V(c))**2

For fixed ``c`` the potential is found by a damped self-consistent iteration;
the outer problem ``E_k(V(c)) = E_k*`` is an m-dimensional root find solved
by Newton's method with the Gram matrix of squared modes as Jacobian, wrapped
in a homotopy that moves the targets away from the spectrum of ``V0``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import SampledFunction, inner_product
from .derivative import gram_from_modes, jacobi_eigenvalues
from .errors import ConditioningError, ConsistencyError, ConvergenceError, InvalidArgumentError
from .forward import Spectrum, lowest_eigenpairs

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TargetSet:
    targets: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(v) for v in np.atleast_1d(self.targets))
        if len(t) < 1:
            raise InvalidArgumentError("at least one target eigenvalue is required")
        if not all(math.isfinite(v) for v in t):
            raise InvalidArgumentError("targets must be finite")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise InvalidArgumentError(f"targets must be strictly increasing, got {list(t)}")
        object.__setattr__(self, "targets", t)

    @property
    def m(self) -> int:
        return len(self.targets)

    def as_array(self) -> np.ndarray:
        return np.array(self.targets)


@dataclass(frozen=True)
class SolverOptions:
    scf_tol: float = 1e-11
    scf_damping: float = 0.5
    scf_max_iter: int = 500
    newton_tol: float = 1e-9
    newton_max_iter: int = 50
    homotopy_steps: int = 8
    sigma_threshold: float = 1e-8
    jacobian: str = "gram"  # or "finite_difference"

    def __post_init__(self):
        for name in ("scf_tol", "newton_tol", "sigma_threshold"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be positive")
        if not 0 < self.scf_damping <= 1:
            raise InvalidArgumentError("scf_damping must lie in (0, 1]")
        for name in ("scf_max_iter", "newton_max_iter", "homotopy_steps"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidArgumentError(f"{name} must be a positive integer")
        if self.jacobian not in ("gram", "finite_difference"):
            raise InvalidArgumentError("jacobian must be 'gram' or 'finite_difference'")


@dataclass(frozen=True, eq=False)
class SCFResult:
    """Converged self-consistent potential for fixed coefficients.

    ``V`` equals ``V0 + sum_j c_j * modes[j]**2`` exactly; ``modes`` are the
    eigenfunctions of the last iterate, which agree with those of ``V`` (held
    in ``spectrum``) to within the SCF tolerance.
    """

    V: SampledFunction
    spectrum: Spectrum
    modes: np.ndarray
    iterations: int
    residual: float

    def __iter__(self):
        yield self.V
        yield self.spectrum


@dataclass(frozen=True, eq=False)
class InverseSolution:
    V0: SampledFunction
    targets: TargetSet
    V_hat: SampledFunction
    spectrum: Spectrum
    c: np.ndarray
    sigma: np.ndarray
    u_hat: tuple[SampledFunction, ...]
    distance: float
    constraint_residuals: np.ndarray
    stationarity_residual: float
    iterations: dict = field(default_factory=dict)

    def reconstruction(self) -> SampledFunction:
        """``V0 - sum_j sigma_j * u_j**2``."""
        corr = sum((s * u.values**2 for s, u in zip(self.sigma, self.u_hat)), np.zeros(self.V0.grid.n))
        return self.V0 - corr


def _compose(V0: SampledFunction, c: np.ndarray, modes: np.ndarray) -> np.ndarray:
    return V0.values + c @ (modes**2)


def scf_fixed_point(c, V0: SampledFunction, opts: SolverOptions = SolverOptions(),
                    V_init: SampledFunction | None = None) -> SCFResult:
    """Solve ``V = V0 + sum_j c_j phi_j(V)**2`` by damped fixed-point iteration.

    Starts from ``V0`` unless a warm start ``V_init`` is supplied.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise InvalidArgumentError("coefficients must be a finite vector")
    m = c.size
    alpha = opts.scf_damping
    V = V0 if V_init is None else V_init
    res = math.inf
    for it in range(1, opts.scf_max_iter + 1):
        try:
            modes = lowest_eigenpairs(V, m).modes()
        except ConsistencyError as exc:
            raise ConvergenceError(
                f"self-consistent iteration left the resolvable regime for c={c.tolist()}: {exc}",
                {"last_residual": res, "iterations": it, "c": c.tolist()},
            ) from exc
        target = _compose(V0, c, modes)
        res = float(np.max(np.abs(target - V.values)))
        if res <= opts.scf_tol:
            V_new = SampledFunction(V0.grid, target)
            return SCFResult(V_new, lowest_eigenpairs(V_new, m), modes, it, res)
        if not math.isfinite(res) or res > 1e12:
            break
        V = SampledFunction(V0.grid, (1 - alpha) * V.values + alpha * target)
    raise ConvergenceError(
        f"self-consistent iteration did not converge for c={c.tolist()} "
        f"(last residual {res:.3e})",
        {"last_residual": res, "iterations": it, "c": c.tolist()},
    )


def reduced_residual(c, V0: SampledFunction, targets: TargetSet,
                     opts: SolverOptions = SolverOptions(), V_init=None) -> np.ndarray:
    """``E_k(V(c)) - E_k*`` for ``k = 1..m``."""
    scf = scf_fixed_point(c, V0, opts, V_init)
    return scf.spectrum.eigenvalues - targets.as_array()


def stationarity_residual(V_hat: SampledFunction, V0: SampledFunction, spectrum: Spectrum) -> float:
    """Relative part of ``V_hat - V0`` outside span{phi_j(V_hat)**2}."""
    d = V_hat - V0
    norm_d = d.norm()
    if norm_d == 0.0:
        return 0.0
    h = V0.grid.h
    sq = spectrum.modes() ** 2
    G = gram_from_modes(spectrum.modes(), h)
    ev = jacobi_eigenvalues(G)
    if ev[0] <= 1e-13 * ev[-1]:
        raise ConditioningError(
            f"Gram matrix of squared eigenfunctions is numerically singular (eigenvalues {ev})"
        )
    b = h * (sq @ d.values)
    coef = np.linalg.solve(G, b)
    rest = d.values - coef @ sq
    return math.sqrt(h * np.dot(rest, rest)) / (norm_d + 1e-30)


def _fd_jacobian(c, V0, opts, scf, step=1e-6):
    m = c.size
    J = np.empty((m, m))
    base = scf.spectrum.eigenvalues
    for j in range(m):
        cj = c.copy()
        cj[j] += step
        J[:, j] = (scf_fixed_point(cj, V0, opts, scf.V).spectrum.eigenvalues - base) / step
    return J


def _newton(c, scf, V0, goal, opts):
    """Newton on F(c) = E(V(c)) - goal from a converged SCF state.

    Returns ``(c, scf, iterations)`` or raises ConvergenceError on stagnation,
    budget exhaustion or SCF failure.
    """
    history = []
    h = V0.grid.h
    for it in range(opts.newton_max_iter + 1):
        F = scf.spectrum.eigenvalues - goal
        r = float(np.max(np.abs(F)))
        history.append(r)
        if r <= opts.newton_tol:
            return c, scf, it
        if len(history) > 5 and r > 0.9 * history[-6]:
            raise ConvergenceError("Newton stagnated", {"residual": r, "newton_iterations": it})
        if it == opts.newton_max_iter:
            break
        if opts.jacobian == "gram":
            J = gram_from_modes(scf.spectrum.modes(), h)
        else:
            J = _fd_jacobian(c, V0, opts, scf)
        c = c - np.linalg.solve(J, F)
        scf = scf_fixed_point(c, V0, opts, V_init=scf.V)
    raise ConvergenceError(
        "Newton iteration budget exhausted", {"residual": history[-1], "newton_iterations": it}
    )


def solve_inverse(V0: SampledFunction, targets, opts: SolverOptions = SolverOptions()) -> InverseSolution:
    """Closest potential to ``V0`` (in L2) whose first m eigenvalues are ``targets``."""
    if not isinstance(targets, TargetSet):
        targets = TargetSet(tuple(targets))
    m = targets.m
    if m > V0.grid.n:
        raise InvalidArgumentError(f"m={m} exceeds the number of grid points {V0.grid.n}")
    goal = targets.as_array()

    c = np.zeros(m)
    scf = scf_fixed_point(c, V0, opts)
    E0 = scf.spectrum.eigenvalues
    steps = opts.homotopy_steps
    ds_max = 1.0 / steps
    ds_min = 1.0 / (64 * steps)
    ds = ds_max
    s = 0.0
    stats = {"homotopy_steps": 0, "homotopy_rejections": 0, "newton_iterations": 0}
    if np.max(np.abs(E0 - goal)) <= opts.newton_tol:
        s = 1.0
    while s < 1.0:
        s_try = min(1.0, s + ds)
        goal_s = goal if s_try == 1.0 else (1 - s_try) * E0 + s_try * goal
        try:
            c_new, scf_new, its = _newton(c.copy(), scf, V0, goal_s, opts)
        except ConvergenceError as exc:
            stats["homotopy_rejections"] += 1
            ds *= 0.5
            log.debug("homotopy step to s=%.4f rejected (%s); ds -> %.3g", s_try, exc, ds)
            if ds < ds_min:
                raise ConvergenceError(
                    f"homotopy step fell below 1/(64*{steps}) at s={s:.4f}: {exc}",
                    {**stats, **exc.diagnostics, "s": s, "c": c.tolist(),
                     "max_constraint_residual": float(np.max(np.abs(scf.spectrum.eigenvalues - goal)))},
                ) from exc
            continue
        stats["newton_iterations"] += its
        stats["homotopy_steps"] += 1
        c, scf, s = c_new, scf_new, s_try
        ds = min(ds_max, 2 * ds)

    return _package(V0, targets, c, scf, opts, stats)


def _package(V0, targets, c, scf, opts, stats) -> InverseSolution:
    V_hat = scf.V
    sigma = np.where(np.abs(c) < opts.sigma_threshold, 0, -np.sign(c)).astype(int)
    amp = np.sqrt(np.abs(c))
    u_hat = tuple(SampledFunction(V0.grid, a * phi) for a, phi in zip(amp, scf.modes))
    resid = np.abs(scf.spectrum.eigenvalues - targets.as_array())
    stats = {**stats, "scf_iterations_final": scf.iterations, "scf_residual_final": scf.residual}
    return InverseSolution(
        V0=V0,
        targets=targets,
        V_hat=V_hat,
        spectrum=scf.spectrum,
        c=c,
        sigma=sigma,
        u_hat=u_hat,
        distance=math.sqrt(inner_product(V_hat - V0, V_hat - V0)),
        constraint_residuals=resid,
        stationarity_residual=stationarity_residual(V_hat, V0, scf.spectrum),
        iterations=stats,
    )
