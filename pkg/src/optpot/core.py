"""Grids, sampled functions, quadrature and potential presets.

Everything here lives on a uniform grid of ``n`` interior nodes of ``(0, L)``.
Functions are stored by their interior samples only; Dirichlet eigenfunctions
vanish at the end points, so the composite trapezoid rule reduces to
``h * sum(f * g)``.
"""
from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GridMismatchError, InputFormatError, InvalidArgumentError


@dataclass(frozen=True)
class Grid:
    """Uniform grid with ``n`` interior nodes ``x_i = i*h`` on ``(0, L)``."""

    L: float
    n: int

    def __post_init__(self):
        if not (isinstance(self.L, (int, float)) and math.isfinite(self.L) and self.L > 0):
            raise InvalidArgumentError(f"interval length must be positive, got {self.L!r}")
        if int(self.n) != self.n or self.n < 3:
            raise InvalidArgumentError(f"need at least 3 interior points, got {self.n!r}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "n", int(self.n))

    @property
    def h(self) -> float:
        return self.L / (self.n + 1)

    @property
    def x(self) -> np.ndarray:
        x = np.arange(1, self.n + 1) * self.h
        x.setflags(write=False)
        return x

    def refined(self) -> "Grid":
        """Grid with exactly half the spacing (``n -> 2n + 1``)."""
        return Grid(self.L, 2 * self.n + 1)


def make_grid(L: float, n: int) -> Grid:
    return Grid(L, n)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Real function given by its samples at the interior nodes of ``grid``.

    Supports the usual pointwise arithmetic with scalars and with other
    sampled functions on the same grid.
    """

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (self.grid.n,):
            raise InvalidArgumentError(
                f"expected {self.grid.n} samples, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("sampled function contains NaN or Inf")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, func) -> "SampledFunction":
        return cls(grid, np.broadcast_to(func(grid.x), (grid.n,)))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "SampledFunction":
        return cls(grid, np.full(grid.n, float(value)))

    def _other(self, other):
        if isinstance(other, SampledFunction):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return SampledFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SampledFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return SampledFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return SampledFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SampledFunction(self.grid, -self.values)

    def __pow__(self, p):
        return SampledFunction(self.grid, self.values**p)

    def __len__(self):
        return self.grid.n

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def norm(self) -> float:
        return math.sqrt(inner_product(self, self))

    def content_hash(self) -> str:
        h = hashlib.sha1()
        h.update(np.float64(self.grid.L).tobytes())
        h.update(self.values.tobytes())
        return h.hexdigest()


def check_same_grid(*funcs: SampledFunction) -> Grid:
    grid = funcs[0].grid
    for f in funcs[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


def inner_product(f: SampledFunction, g: SampledFunction) -> float:
    """Trapezoid approximation of the L2 product with zero boundary values."""
    grid = check_same_grid(f, g)
    return float(grid.h * np.dot(f.values, g.values))


# --- potential presets -------------------------------------------------------

_KINDS = {
    "zero": (),
    "constant": ("value",),
    "harmonic": ("a", "center"),
    "square_well": ("depth", "left", "right"),
    "samples": ("path", "column"),
}


@dataclass(frozen=True)
class PotentialSpec:
    """Description of a prior potential.

    ``params`` keys per kind::

        zero
        constant     value
        harmonic     a, center          a*(x - center)**2
        square_well  depth, left, right depth on [left, right], 0 elsewhere
        samples      path[, column]     CSV with header ``x,<column>``; column defaults to ``v``
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidArgumentError(
                f"unknown potential kind {self.kind!r}; expected one of {sorted(_KINDS)}"
            )
        unknown = set(self.params) - set(_KINDS[self.kind])
        if unknown:
            raise InvalidArgumentError(
                f"unexpected parameters {sorted(unknown)} for potential kind {self.kind!r}"
            )
        if self.kind == "samples" and "path" not in self.params:
            raise InvalidArgumentError("samples potential needs a 'path'")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, value):
        return cls("constant", {"value": float(value)})

    @classmethod
    def harmonic(cls, a, center):
        return cls("harmonic", {"a": float(a), "center": float(center)})

    @classmethod
    def square_well(cls, depth, left, right):
        return cls("square_well", {"depth": float(depth), "left": float(left), "right": float(right)})

    @classmethod
    def samples(cls, path, column="v"):
        return cls("samples", {"path": str(path), "column": column})

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.params}


def preset_potentials(L: float) -> dict[str, PotentialSpec]:
    """The built-in prior potentials used throughout the tests and demos."""
    return {
        "zero": PotentialSpec.zero(),
        "constant": PotentialSpec.constant(5.0),
        "harmonic": PotentialSpec.harmonic(4.0, L / 2),
        "square_well": PotentialSpec.square_well(-10.0, 0.25 * L, 0.75 * L),
    }


def sample_potential(spec: PotentialSpec, grid: Grid) -> SampledFunction:
    x = grid.x
    p = spec.params
    if spec.kind == "zero":
        v = np.zeros(grid.n)
    elif spec.kind == "constant":
        v = np.full(grid.n, float(p.get("value", 0.0)))
    elif spec.kind == "harmonic":
        center = float(p.get("center", grid.L / 2))
        v = float(p.get("a", 1.0)) * (x - center) ** 2
    elif spec.kind == "square_well":
        left, right = float(p["left"]), float(p["right"])
        if not (0 <= left < right <= grid.L):
            raise InvalidArgumentError(
                f"square well needs 0 <= left < right <= L, got left={left}, right={right}, L={grid.L}"
            )
        v = np.where((x >= left) & (x <= right), float(p["depth"]), 0.0)
    else:
        xs, vs = read_samples(p["path"], p.get("column", "v"))
        if xs[0] < -1e-12 * grid.L or xs[-1] > grid.L * (1 + 1e-12):
            raise InputFormatError(f"{p['path']}: sample abscissae must lie in [0, {grid.L}]")
        v = np.interp(x, xs, vs)  # clamps outside the sampled range
    return SampledFunction(grid, v)


def read_samples(path, column="v") -> tuple[np.ndarray, np.ndarray]:
    """Read a ``x,<column>`` CSV file sorted by x."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = [h.strip() for h in next(reader)]
            rows = [r for r in reader if r and any(c.strip() for c in r)]
    except (OSError, StopIteration, UnicodeDecodeError, csv.Error) as exc:
        raise InputFormatError(f"cannot read sample file {path}: {exc}") from exc
    if not header or header[0] != "x" or column not in header[1:]:
        raise InputFormatError(
            f"{path}: header must start with 'x' and contain column {column!r}, got {header}"
        )
    j = header.index(column)
    try:
        xs = np.array([float(r[0]) for r in rows])
        vs = np.array([float(r[j]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise InputFormatError(f"{path}: malformed row: {exc}") from exc
    if xs.size == 0:
        raise InputFormatError(f"{path}: no data rows")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(vs))):
        raise InputFormatError(f"{path}: non-finite values")
    if np.any(np.diff(xs) <= 0):
        raise InputFormatError(f"{path}: x column must be strictly increasing")
    return xs, vs
