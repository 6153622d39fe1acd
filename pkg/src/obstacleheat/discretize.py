"""Uniform cell-centered grids, fields, and the absorbing heat operator.

The spatial operator is the standard second-order 3/5/7-point Laplacian with
ghost-cell reflection at the box walls (insulated boundary), minus a sharp
damping term ``lam`` on the obstacle cells:

    (A u)_c = lap_h(u)_c - lam * kill_c * u_c

Cells are hit or missed by the obstacle according to their centers; no
partial-volume weighting is applied.  The operator is symmetric and negative
semidefinite on the plain cell inner product.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import backend
from .geometry import DomainSpec, GeometryError, RegionMask, offset_region


@dataclass(frozen=True)
class Grid:
    """Axis-aligned box split into equal cells; values live at cell centers."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    cells: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.cells

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (u - l) / n for l, u, n in zip(self.lower, self.upper, self.cells)
        )

    @property
    def cell_volume(self) -> float:
        return math.prod(self.spacing)

    @property
    def n_cells(self) -> int:
        return math.prod(self.cells)

    def axis_centers(self, axis: int) -> np.ndarray:
        h = self.spacing[axis]
        return self.lower[axis] + h * (np.arange(self.cells[axis]) + 0.5)

    @cached_property
    def _centers(self) -> np.ndarray:
        axes = [self.axis_centers(k) for k in range(self.dim)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def cell_centers(self) -> np.ndarray:
        """Array of cell-center coordinates, shape ``(*cells, dim)``."""
        return self._centers


def build_grid(lower, upper, cells) -> Grid:
    lower = tuple(float(v) for v in lower)
    upper = tuple(float(v) for v in upper)
    cells = tuple(int(n) for n in cells)
    if not (len(lower) == len(upper) == len(cells)):
        raise ValueError("lower, upper and cells must have equal lengths")
    if len(cells) not in (1, 2, 3):
        raise ValueError("dimension must be 1, 2 or 3")
    if any(n < 4 for n in cells):
        raise ValueError("need at least 4 cells per axis")
    if any(u <= l for l, u in zip(lower, upper)):
        raise ValueError("upper must exceed lower componentwise")
    return Grid(lower, upper, cells)


def grid_for_domain(domain: DomainSpec, cells) -> Grid:
    """Grid over the domain box; a scalar ``cells`` means that many per axis."""
    if isinstance(cells, (int, np.integer)):
        cells = (int(cells),) * domain.dim
    return build_grid(domain.omega_lower, domain.omega_upper, cells)


@dataclass
class Field:
    """Cell values at one instant.  Values must be finite float64."""

    grid: Grid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != tuple(self.grid.shape):
            raise ValueError(
                f"field shape {self.values.shape} does not match grid "
                f"{self.grid.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite values")
        self.time = float(self.time)

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.time)

    def save_binary(self, path) -> None:
        """Raw little-endian float64 dump in C (row-major) cell order: the
        last axis varies fastest."""
        self.values.astype("<f8").tofile(path)

    def save_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"i{k}" for k in range(self.grid.dim)] + ["value"])
            for idx, val in zip(np.ndindex(*self.grid.shape), self.values.flat):
                writer.writerow(list(idx) + [repr(float(val))])

    @classmethod
    def load_binary(cls, path, grid: Grid, time: float = 0.0) -> "Field":
        vals = np.fromfile(path, dtype="<f8").reshape(grid.shape)
        return cls(grid, vals, time)


@dataclass
class InitialDataSpec:
    """Nonnegative ramp profile: zero on the obstacle, rising linearly with
    distance from it over ``ramp_width``, then flat at ``amplitude``."""

    amplitude: float = 1.0
    ramp_width: float = 0.1

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ValueError("amplitude must be positive")
        if self.ramp_width <= 0:
            raise ValueError("ramp_width must be positive")


def build_initial(grid: Grid, domain: DomainSpec, spec: InitialDataSpec) -> Field:
    if spec.ramp_width >= domain.wall_gap():
        raise ValueError(
            f"ramp_width {spec.ramp_width} must be smaller than the "
            f"obstacle-to-wall gap {domain.wall_gap()}"
        )
    s = domain.obstacle.sdf(grid.cell_centers())
    vals = np.where(
        s <= 0.0, 0.0, spec.amplitude * np.minimum(s / spec.ramp_width, 1.0)
    )
    return Field(grid, vals, 0.0)


class OperatorSpec:
    """Matrix-free application of ``A = lap_h - lam * kill``."""

    def __init__(self, grid: Grid, lam: float, kill: RegionMask):
        if lam < 0:
            raise ValueError("damping coefficient must be nonnegative")
        if kill.grid != grid:
            raise GeometryError("kill mask grid does not match operator grid")
        self.grid = grid
        self.lam = float(lam)
        self.kill = kill
        self._kill_u8 = np.ascontiguousarray(kill.mask, dtype=np.uint8)
        self._inv_h2 = tuple(1.0 / h**2 for h in grid.spacing)

    def apply_shifted(self, values: np.ndarray, alpha: float, beta: float,
                      out: np.ndarray | None = None) -> np.ndarray:
        """Return ``alpha*values + beta*A(values)``."""
        if out is None:
            out = np.empty_like(values)
        return backend.apply_shifted(
            out, values, self._kill_u8, self.lam, self._inv_h2, alpha, beta
        )

    def apply(self, values: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        return self.apply_shifted(values, 0.0, 1.0, out=out)

    def diagonal(self) -> np.ndarray:
        """Diagonal of A (for Jacobi-preconditioned solves)."""
        diag = np.zeros(self.grid.shape)
        for axis, w in enumerate(self._inv_h2):
            coeff = np.full(self.grid.cells[axis], 2.0)
            coeff[0] = 1.0
            coeff[-1] = 1.0
            shape = [1] * self.grid.dim
            shape[axis] = -1
            diag -= w * coeff.reshape(shape)
        diag -= self.lam * self._kill_u8
        return diag

    def dense_matrix(self) -> np.ndarray:
        """Assemble A column by column; only for small test grids."""
        n = self.grid.n_cells
        if n > 8192:
            raise ValueError("dense assembly is limited to 8192 cells")
        mat = np.empty((n, n))
        e = np.zeros(self.grid.shape)
        flat = e.reshape(-1)
        for j in range(n):
            flat[j] = 1.0
            mat[:, j] = self.apply(e).reshape(-1)
            flat[j] = 0.0
        return mat


def assemble_operator(grid: Grid, domain: DomainSpec, lam: float) -> OperatorSpec:
    kill = offset_region(domain.obstacle, 0.0, grid, label="obstacle")
    return OperatorSpec(grid, lam, kill)


def grad_l2_sq(field: Field, mask: RegionMask) -> float:
    """Squared L2 norm of the gradient over the masked cells.

    Central differences in the interior, one-sided at the box walls (this is
    what ``numpy.gradient`` does); obstacle cells contribute through their
    neighbors' stencils but only masked cells are summed.
    """
    if mask.grid != field.grid:
        raise ValueError("mask grid does not match field grid")
    grads = np.gradient(field.values, *field.grid.spacing)
    if field.grid.dim == 1:
        grads = [grads]
    sq = np.zeros_like(field.values)
    for g in grads:
        sq += g * g
    return float(np.sum(sq[mask.mask]) * field.grid.cell_volume)
