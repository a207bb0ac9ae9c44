"""Config-driven command line entry point.

Usage::

    optpot --config run.yaml [--output DIR] [--quiet]

A run file is a YAML mapping, for example::

    mode: inverse          # forward | inverse | verify
    L: pi                  # "pi", "2pi", "0.5pi" or a number
    n: 2000
    potential: {kind: zero}
    targets: [2, 5]
    solver: {homotopy_steps: 8}
    output_dir: out
    seed: 0                # verify mode only
    oracle: {basis_dim: 32, trials: 5}

Exit codes: 0 success, 1 configuration error, 2 solver non-convergence.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .core import PotentialSpec, SampledFunction, make_grid, sample_potential
from .derivative import gram_matrix
from .errors import ConfigError, ConsistencyError, ConvergenceError, OptPotError
from .forward import lowest_eigenpairs
from .inverse import SolverOptions, TargetSet, solve_inverse, stationarity_residual
from .verification import minimality_oracle, system_residual

log = logging.getLogger("optpot")

MODES = ("forward", "inverse", "verify")
DEFAULT_N = 2000
_PI_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*$")


@dataclass(frozen=True)
class RunConfig:
    mode: str
    L: float
    n: int
    potential: PotentialSpec
    m: int
    targets: tuple | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    output_dir: str = "optpot_out"
    seed: int = 0
    basis_dim: int = 32
    trials: int = 5

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "L": self.L,
            "n": self.n,
            "potential": self.potential.to_dict(),
            "m": self.m,
            "targets": list(self.targets) if self.targets is not None else None,
            "solver": dataclasses.asdict(self.solver),
            "output_dir": self.output_dir,
            "seed": self.seed,
            "oracle": {"basis_dim": self.basis_dim, "trials": self.trials},
        }


def parse_number(value, name: str) -> float:
    """Float from a YAML scalar; accepts ``pi``, ``2pi``, ``0.5*pi``."""
    if isinstance(value, bool):
        raise ConfigError(f"field '{name}': expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        out = float(value)
    elif isinstance(value, str):
        m = _PI_RE.match(value)
        try:
            if m:
                out = (float(m.group(1)) if m.group(1) else 1.0) * math.pi
            else:
                out = float(value)
        except ValueError:
            out = math.nan
        if math.isnan(out):
            raise ConfigError(f"field '{name}': cannot parse {value!r} as a number")
    else:
        raise ConfigError(f"field '{name}': expected a number, got {value!r}")
    if not math.isfinite(out):
        raise ConfigError(f"field '{name}': must be finite")
    return out


def parse_int(value, name: str) -> int:
    v = parse_number(value, name)
    if v != int(v):
        raise ConfigError(f"field '{name}': expected an integer, got {value!r}")
    return int(v)


def _potential(raw, L, base_dir) -> PotentialSpec:
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("field 'potential': expected a mapping with a 'kind' entry")
    raw = dict(raw)
    kind = raw.pop("kind")
    params = {}
    for key, val in raw.items():
        if kind == "samples" and key in ("path", "column"):
            params[key] = str(val)
        else:
            params[key] = parse_number(val, f"potential.{key}")
    if kind == "samples" and "path" in params:
        p = Path(params["path"])
        if not p.is_absolute() and base_dir is not None:
            params["path"] = str(Path(base_dir) / p)
    if kind == "square_well":
        missing = {"depth", "left", "right"} - set(params)
        if missing:
            raise ConfigError(f"field 'potential': square_well needs {sorted(missing)}")
        if not 0 <= params["left"] < params["right"] <= L:
            raise ConfigError("field 'potential': square_well needs 0 <= left < right <= L")
    try:
        return PotentialSpec(kind, params)
    except OptPotError as exc:
        raise ConfigError(f"field 'potential': {exc}") from exc


def validate_config(raw: str, base_dir=None) -> RunConfig:
    """Parse and validate a YAML run description, filling defaults."""
    try:
        data = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        ctx = getattr(exc, "context_mark", None)
        if ctx is not None and getattr(exc, "context", None):
            where += f" ({exc.context} at line {ctx.line + 1})"
        raise ConfigError(f"config parse error{where}: {getattr(exc, 'problem', exc)}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping of fields")
    known = {"mode", "L", "n", "potential", "m", "targets", "solver", "output_dir", "seed", "oracle"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")

    mode = data.get("mode")
    if mode not in MODES:
        raise ConfigError(f"field 'mode': expected one of {list(MODES)}, got {mode!r}")
    if "L" not in data:
        raise ConfigError("field 'L': required")
    L = parse_number(data["L"], "L")
    if L <= 0:
        raise ConfigError("field 'L': must be positive")
    n = parse_int(data.get("n", DEFAULT_N), "n")
    if n < 3:
        raise ConfigError("field 'n': need at least 3 interior points")
    potential = _potential(data.get("potential", "zero"), L, base_dir)

    targets = data.get("targets")
    if mode == "forward":
        if targets is not None:
            raise ConfigError("field 'targets': not used in forward mode")
        if "m" not in data:
            raise ConfigError("field 'm': required in forward mode")
        m = parse_int(data["m"], "m")
    else:
        if targets is None:
            raise ConfigError(f"field 'targets': required in {mode} mode")
        if not isinstance(targets, (list, tuple)) or not targets:
            raise ConfigError("field 'targets': expected a non-empty list of numbers")
        targets = tuple(parse_number(t, f"targets[{i}]") for i, t in enumerate(targets))
        if any(b <= a for a, b in zip(targets, targets[1:])):
            raise ConfigError(f"field 'targets': targets must be strictly increasing, got {list(targets)}")
        m = parse_int(data.get("m", len(targets)), "m")
        if m != len(targets):
            raise ConfigError(f"field 'm': {m} does not match the {len(targets)} targets given")
    if m < 1:
        raise ConfigError("field 'm': must be at least 1")
    if m > n:
        raise ConfigError(f"field 'm': cannot request {m} eigenvalues from n={n} grid points; increase n")

    solver_raw = data.get("solver") or {}
    if not isinstance(solver_raw, dict):
        raise ConfigError("field 'solver': expected a mapping")
    fields = {f.name: f for f in dataclasses.fields(SolverOptions)}
    kwargs = {}
    for key, val in solver_raw.items():
        if key not in fields:
            raise ConfigError(f"field 'solver.{key}': unknown option; expected one of {sorted(fields)}")
        if key == "jacobian":
            kwargs[key] = str(val)
        elif fields[key].type == "int":
            kwargs[key] = parse_int(val, f"solver.{key}")
        else:
            kwargs[key] = parse_number(val, f"solver.{key}")
    try:
        solver = SolverOptions(**kwargs)
    except OptPotError as exc:
        raise ConfigError(f"field 'solver': {exc}") from exc

    oracle = data.get("oracle") or {}
    if not isinstance(oracle, dict) or set(oracle) - {"basis_dim", "trials"}:
        raise ConfigError("field 'oracle': expected a mapping with basis_dim and/or trials")
    basis_dim = parse_int(oracle.get("basis_dim", 32), "oracle.basis_dim")
    trials = parse_int(oracle.get("trials", 5), "oracle.trials")
    if mode == "verify" and basis_dim < m:
        raise ConfigError("field 'oracle.basis_dim': must be at least m")
    if trials < 1:
        raise ConfigError("field 'oracle.trials': must be at least 1")

    return RunConfig(
        mode=mode, L=L, n=n, potential=potential, m=m, targets=targets, solver=solver,
        output_dir=str(data.get("output_dir", "optpot_out")),
        seed=parse_int(data.get("seed", 0), "seed"), basis_dim=basis_dim, trials=trials,
    )


# --- artifacts ---------------------------------------------------------------

def _write_csv(path: Path, header, columns) -> None:
    arr = np.column_stack(columns)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in arr:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _read_csv(path: Path) -> dict:
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        data = np.array([[float(v) for v in line.split(",")] for line in fh if line.strip()])
    return {name: data[:, i] for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: Path, payload) -> None:
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def run(config: RunConfig, output_dir=None) -> dict:
    """Execute one run, write its artifacts and return the report dict.

    Solver failures propagate as ``ConvergenceError`` / ``ConsistencyError``
    after a partial report has been written.
    """
    t0 = time.perf_counter()
    out = Path(output_dir if output_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = make_grid(config.L, config.n)
    V0 = sample_potential(config.potential, grid)
    report = {"config": config.to_dict(), "status": "ok"}

    spec0 = lowest_eigenpairs(V0, config.m)
    report["eigenvalues_V0"] = spec0.eigenvalues

    if config.mode == "forward":
        _write_csv(out / "potential.csv", ["x", "v0"], [grid.x, V0.values])
        _write_eigenfunctions(out, grid, spec0)
        reloaded = _read_csv(out / "potential.csv")
        report["eigenvalues"] = lowest_eigenpairs(SampledFunction(grid, reloaded["v0"]), config.m).eigenvalues
    else:
        targets = TargetSet(config.targets)
        try:
            sol = solve_inverse(V0, targets, config.solver)
        except ConvergenceError as exc:
            report["status"] = "non-convergence"
            report["error"] = str(exc)
            report["diagnostics"] = exc.diagnostics
            report["wall_time_s"] = time.perf_counter() - t0
            write_json(out / "report.json", report)
            raise
        _write_csv(out / "potential.csv", ["x", "v0", "v_hat"], [grid.x, V0.values, sol.V_hat.values])
        _write_eigenfunctions(out, grid, sol.spectrum)
        _write_csv(out / "u_hat.csv", ["x"] + [f"u_{j + 1}" for j in range(config.m)],
                   [grid.x] + [u.values for u in sol.u_hat])
        write_json(out / "sigma.json", [int(s) for s in sol.sigma])
        report["inverse"] = {
            **recompute_from_artifacts(out, grid, targets),
            "c": sol.c,
            "iterations": sol.iterations,
        }
        if config.mode == "verify":
            report["verify"] = _verify(out, grid, V0, targets, sol, config)
    report["wall_time_s"] = time.perf_counter() - t0
    write_json(out / "report.json", report)
    return report


def _write_eigenfunctions(out, grid, spectrum):
    _write_csv(out / "eigenfunctions.csv", ["x"] + [f"phi_{p.k}" for p in spectrum],
               [grid.x] + [p.phi.values for p in spectrum])


def recompute_from_artifacts(out: Path, grid, targets: TargetSet) -> dict:
    """Inverse-mode diagnostics computed from the emitted CSV/JSON files."""
    pot = _read_csv(out / "potential.csv")
    V0 = SampledFunction(grid, pot["v0"])
    V_hat = SampledFunction(grid, pot["v_hat"])
    spec = lowest_eigenpairs(V_hat, targets.m)
    sigma = json.loads((out / "sigma.json").read_text(encoding="utf-8"))
    return {
        "eigenvalues_V_hat": spec.eigenvalues,
        "distance": (V_hat - V0).norm(),
        "sigma": sigma,
        "constraint_residuals": np.abs(spec.eigenvalues - targets.as_array()),
        "stationarity_residual": stationarity_residual(V_hat, V0, spec),
    }


def _verify(out, grid, V0, targets, sol, config) -> dict:
    uh = _read_csv(out / "u_hat.csv")
    u_hat = [SampledFunction(grid, uh[f"u_{j + 1}"]) for j in range(targets.m)]
    sigma = json.loads((out / "sigma.json").read_text(encoding="utf-8"))
    V_hat = SampledFunction(grid, _read_csv(out / "potential.csv")["v_hat"])
    res = system_residual(u_hat, sigma, V0, targets)
    res4 = system_residual(u_hat, sigma, V0, targets, stencil="fourth_order")
    oracle = minimality_oracle(V0, targets, config.basis_dim, config.trials,
                               seed=config.seed, solution=sol, opts=config.solver)
    return {
        "system_residuals": res.per_equation,
        "system_residuals_fourth_order": res4.per_equation,
        "gram_smallest_eigenvalue": gram_matrix(V_hat, targets.m).smallest_eigenvalue,
        "minimality": dataclasses.asdict(oracle),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="optpot", description=__doc__.split("\n")[0])
    ap.add_argument("--config", required=True, help="YAML run description")
    ap.add_argument("--output", help="override output_dir from the config")
    ap.add_argument("--quiet", action="store_true", help="only log errors")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")

    path = Path(args.config)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        log.error("cannot read config %s: %s", path, exc)
        return 1
    try:
        config = validate_config(raw, base_dir=path.parent)
        report = run(config, args.output)
    except ConfigError as exc:
        log.error("%s", exc)
        return 1
    except (ConvergenceError, ConsistencyError) as exc:
        log.error("solver failed: %s", exc)
        return 2
    except OptPotError as exc:  # unreadable sample file etc.
        log.error("%s", exc)
        return 1
    if not args.quiet:
        summary = {k: report[k] for k in ("eigenvalues_V0", "inverse", "verify") if k in report}
        print(json.dumps(_jsonable(summary), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
