"""Time integration of ``u_t = A u`` with the one-parameter theta scheme.

Each step solves ``(I - theta*dt*A) u_next = (I + (1-theta)*dt*A) u`` by
conjugate gradients on the matrix-free operator.  ``theta`` ranges over
[1/2, 1]: 1/2 is the trapezoid rule (second order), 1 is implicit Euler,
which is positivity- and maximum-principle-preserving for this operator.

The store keeps dense per-step scalars (global squared L2 norm, cell sum,
min/max, solver statistics) plus field snapshots: every step up to
``dense_until`` (default ``10/lam``), then every ``stride``-th step, and
always the final step.  The tracked norms peak early, so the dense window is
placed at the start and the tail is thinned.  Long 3-d runs can restrict the
stored snapshots to a region of interest; the per-step scalars always cover
the whole box.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .discretize import Field, Grid, OperatorSpec


class SolverError(RuntimeError):
    """Inner linear solve failed to reach the requested tolerance."""


def default_dt(lam: float) -> float:
    """Resolve the damping timescale but never step coarser than 1e-3."""
    if lam > 0:
        return min(1e-3, 1.0 / (4.0 * lam))
    return 1e-3


def default_horizon(lam: float, diameter: float) -> float:
    """Transient window plus a diffusion time across the box."""
    lead = 10.0 / lam if lam > 0 else 0.0
    return lead + 0.25 * diameter**2


@dataclass
class SolveConfig:
    lam: float
    theta: float = 1.0
    dt: float | None = None
    horizon: float | None = None
    cg_rel_tol: float = 1e-12
    cg_max_iter: int = 20000
    jacobi: bool = False
    snapshot_stride: int | None = None
    dense_until: float | None = None
    max_late_snapshots: int = 256

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if not 0.5 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [1/2, 1]")
        if not 0.0 < self.cg_rel_tol <= 1e-6:
            raise ValueError("cg_rel_tol must lie in (0, 1e-6]")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.horizon is not None and self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.snapshot_stride is not None and self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")

    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else default_dt(self.lam)

    def resolved_horizon(self, diameter: float) -> float:
        if self.horizon is not None:
            return self.horizon
        return default_horizon(self.lam, diameter)


def conjugate_gradient(apply_into, b: np.ndarray, x0: np.ndarray,
                       rel_tol: float, max_iter: int,
                       diag: np.ndarray | None = None):
    """Minimal (optionally Jacobi-preconditioned) CG on flat float64 arrays.

    ``apply_into(dst, src)`` must write the operator image of ``src`` into
    ``dst``.  Returns ``(x, iterations, relative_residual)``; raises
    SolverError if the tolerance is not met within ``max_iter`` iterations.
    """
    b_norm = math.sqrt(float(np.dot(b, b)))
    if b_norm == 0.0:
        return np.zeros_like(b), 0, 0.0
    x = x0.copy()
    ap = np.empty_like(b)
    apply_into(ap, x)
    r = b - ap
    res = math.sqrt(float(np.dot(r, r)))
    if res <= rel_tol * b_norm:
        return x, 0, res / b_norm
    z = r / diag if diag is not None else r.copy()
    p = z.copy()
    rz = float(np.dot(r, z))
    for k in range(1, max_iter + 1):
        apply_into(ap, p)
        alpha = rz / float(np.dot(p, ap))
        x += alpha * p
        r -= alpha * ap
        res = math.sqrt(float(np.dot(r, r)))
        if res <= rel_tol * b_norm:
            return x, k, res / b_norm
        if diag is not None:
            np.divide(r, diag, out=z)
        else:
            z = r
        rz_next = float(np.dot(r, z))
        beta = rz_next / rz
        # p <- z + beta p without a fresh allocation
        p *= beta
        p += z
        rz = rz_next
    raise SolverError(
        f"conjugate gradients stalled: residual {res / b_norm:.3e} after "
        f"{max_iter} iterations (target {rel_tol:.1e})"
    )


@dataclass
class StepStats:
    iterations: int
    rel_residual: float


def step(u: Field, op: OperatorSpec, cfg: SolveConfig,
         dt: float | None = None) -> tuple[Field, StepStats]:
    """Advance one step of the theta scheme."""
    dt = float(dt if dt is not None else cfg.resolved_dt())
    theta = cfg.theta
    vals = u.values
    if theta < 1.0:
        b = op.apply_shifted(vals, 1.0, (1.0 - theta) * dt)
    else:
        b = vals.copy()
    shift = -theta * dt
    shape = vals.shape

    def system_into(dst: np.ndarray, src: np.ndarray) -> None:
        op.apply_shifted(src.reshape(shape), 1.0, shift,
                         out=dst.reshape(shape))

    diag = None
    if cfg.jacobi:
        # the system operator is I + shift*A, so its diagonal is 1 + shift*A_ii
        diag = (1.0 + shift * op.diagonal()).reshape(-1)

    x, iters, rel = conjugate_gradient(
        system_into, b.reshape(-1), vals.reshape(-1),
        cfg.cg_rel_tol, cfg.cg_max_iter, diag=diag,
    )
    out = Field(u.grid, x.reshape(shape), u.time + dt)
    return out, StepStats(iterations=iters, rel_residual=rel)


@dataclass
class SnapshotStore:
    """Evolution record: dense per-step scalars plus sparse field history.

    When ``restriction`` is set (a boolean array over the grid), snapshots
    hold only the values at the selected cells, as flat vectors in C cell
    order; the per-step scalar series still describe the full box.
    """

    grid: Grid
    dt: float
    restriction: np.ndarray | None = None
    step_times: list[float] = dataclass_field(default_factory=list)
    l2_omega_sq: list[float] = dataclass_field(default_factory=list)
    cell_sum: list[float] = dataclass_field(default_factory=list)
    min_u: list[float] = dataclass_field(default_factory=list)
    max_u: list[float] = dataclass_field(default_factory=list)
    iterations: list[int] = dataclass_field(default_factory=list)
    residuals: list[float] = dataclass_field(default_factory=list)
    snapshot_steps: list[int] = dataclass_field(default_factory=list)
    snapshot_times: list[float] = dataclass_field(default_factory=list)
    snapshots: list[np.ndarray] = dataclass_field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.snapshot_times)

    @property
    def final_time(self) -> float:
        return self.snapshot_times[-1]

    def mass(self) -> np.ndarray:
        """Integral of u over the box at every step (cell sum x volume)."""
        return np.asarray(self.cell_sum) * self.grid.cell_volume

    def save(self, directory) -> None:
        """Binary dump per snapshot plus a CSV index.

        Each ``snap_NNNNNN.f64`` file holds raw little-endian float64 values
        in C (row-major) cell order; the index lists step, time, file and the
        recorded global squared L2 norm.  A restricted store also writes
        ``cells.csv`` giving the multi-index of every stored cell, in order.
        """
        os.makedirs(directory, exist_ok=True)
        if self.restriction is not None:
            with open(os.path.join(directory, "cells.csv"), "w",
                      newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow([f"i{d}" for d in range(self.grid.dim)])
                writer.writerows(np.argwhere(self.restriction).tolist())
        index_path = os.path.join(directory, "index.csv")
        with open(index_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "time", "file"])
            for k, t, vals in zip(
                self.snapshot_steps, self.snapshot_times, self.snapshots
            ):
                name = f"snap_{k:06d}.f64"
                np.ascontiguousarray(vals).astype("<f8").tofile(
                    os.path.join(directory, name)
                )
                writer.writerow([k, repr(t), name])


def _snapshot_step_set(n_steps: int, dt: float, dense_until: float,
                       stride: int | None, max_late: int) -> set[int]:
    n_dense = min(n_steps, int(math.floor(dense_until / dt + 1e-9)))
    late = n_steps - n_dense
    if stride is None:
        stride = max(1, int(math.ceil(late / max(1, max_late))))
    steps = set(range(0, n_dense + 1))
    steps.update(range(n_dense, n_steps + 1, stride))
    steps.add(n_steps)
    return steps


def evolve(initial: Field, op: OperatorSpec, cfg: SolveConfig,
           diameter: float | None = None,
           region: np.ndarray | None = None) -> SnapshotStore:
    """Run the scheme from ``initial`` to the horizon and record history.

    ``region`` (boolean over the grid) restricts stored snapshots to those
    cells; pass None to keep full fields.
    """
    dt = cfg.resolved_dt()
    if diameter is None:
        span = np.asarray(initial.grid.upper) - np.asarray(initial.grid.lower)
        diameter = float(np.linalg.norm(span))
    horizon = cfg.resolved_horizon(diameter)
    n_steps = max(1, int(math.ceil(horizon / dt - 1e-9)))
    dense_until = cfg.dense_until
    if dense_until is None:
        dense_until = 10.0 / cfg.lam if cfg.lam > 0 else horizon
    snap_at = _snapshot_step_set(
        n_steps, dt, dense_until, cfg.snapshot_stride, cfg.max_late_snapshots
    )

    if region is not None:
        region = np.asarray(region, dtype=bool)
        if region.shape != initial.values.shape:
            raise ValueError("snapshot restriction does not match the grid")

    store = SnapshotStore(grid=initial.grid, dt=dt, restriction=region)
    vol = initial.grid.cell_volume

    u = initial.copy()
    u.time = 0.0

    def record(k: int, fld: Field, stats: StepStats | None):
        vals = fld.values
        store.step_times.append(fld.time)
        store.l2_omega_sq.append(float(np.sum(vals * vals) * vol))
        store.cell_sum.append(float(np.sum(vals)))
        store.min_u.append(float(np.min(vals)))
        store.max_u.append(float(np.max(vals)))
        store.iterations.append(stats.iterations if stats else 0)
        store.residuals.append(stats.rel_residual if stats else 0.0)
        if k in snap_at:
            store.snapshot_steps.append(k)
            store.snapshot_times.append(fld.time)
            if region is None:
                store.snapshots.append(vals.copy())
            else:
                store.snapshots.append(vals[region].copy())

    record(0, u, None)
    for k in range(1, n_steps + 1):
        u, stats = step(u, op, cfg, dt=dt)
        u.time = k * dt  # avoid accumulated addition error
        record(k, u, stats)
    return store
