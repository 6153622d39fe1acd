"""Time-stepping tests.

The inner CG solve is checked against numpy's dense solver, single steps
against exact eigenvector amplification factors and dense linear algebra,
and full evolutions against the dense matrix exponential plus the scheme's
structural guarantees (conservation, contraction, positivity).
"""

import math

import numpy as np
import pytest

from obstacleheat.discretize import Field, OperatorSpec, build_grid
from obstacleheat.evolve import (
    SnapshotStore,
    SolveConfig,
    SolverError,
    _snapshot_step_set,
    conjugate_gradient,
    default_dt,
    default_horizon,
    evolve,
    step,
)
from obstacleheat.geometry import Ball, DomainSpec, RegionMask, offset_region

RNG = np.random.default_rng(99)


def make_operator(shape, lam, kill_mask=None) -> OperatorSpec:
    grid = build_grid((0.0,) * len(shape), (1.0,) * len(shape), shape)
    if kill_mask is None:
        kill_mask = np.zeros(shape, dtype=bool)
    return OperatorSpec(grid, lam, RegionMask(grid, kill_mask))


# ---------------------------------------------------------------------------
# the linear solver
# ---------------------------------------------------------------------------

class TestConjugateGradient:
    def _random_spd(self, n, seed=0):
        rng = np.random.default_rng(seed)
        m = rng.normal(size=(n, n))
        return m @ m.T + n * np.eye(n)

    def test_matches_dense_solve(self):
        mat = self._random_spd(40, seed=1)
        b = np.arange(40, dtype=float)

        def apply_into(dst, src):
            np.matmul(mat, src, out=dst)

        x, iters, rel = conjugate_gradient(
            apply_into, b, np.zeros(40), rel_tol=1e-12, max_iter=500
        )
        want = np.linalg.solve(mat, b)
        assert np.max(np.abs(x - want)) < 1e-10 * np.max(np.abs(want))
        assert rel <= 1e-12
        assert iters > 0

    def test_jacobi_preconditioning_agrees(self):
        mat = self._random_spd(30, seed=2)
        mat += np.diag(np.linspace(0, 100, 30))  # skew the diagonal
        b = RNG.normal(size=30)

        def apply_into(dst, src):
            np.matmul(mat, src, out=dst)

        plain, _, _ = conjugate_gradient(
            apply_into, b, np.zeros(30), 1e-12, 1000
        )
        pre, _, _ = conjugate_gradient(
            apply_into, b, np.zeros(30), 1e-12, 1000, diag=np.diag(mat).copy()
        )
        assert np.max(np.abs(plain - pre)) < 1e-9 * np.max(np.abs(plain))

    def test_warm_start_returns_immediately(self):
        mat = self._random_spd(20, seed=3)
        want = RNG.normal(size=20)
        b = mat @ want

        def apply_into(dst, src):
            np.matmul(mat, src, out=dst)

        x, iters, _ = conjugate_gradient(apply_into, b, want.copy(),
                                         1e-12, 100)
        assert iters == 0
        assert np.array_equal(x, want)

    def test_zero_rhs_short_circuits(self):
        def apply_into(dst, src):
            dst[:] = src

        x, iters, rel = conjugate_gradient(
            apply_into, np.zeros(5), np.ones(5), 1e-12, 10
        )
        assert np.array_equal(x, np.zeros(5))
        assert iters == 0 and rel == 0.0

    def test_stall_raises(self):
        mat = self._random_spd(50, seed=4)
        b = np.ones(50)

        def apply_into(dst, src):
            np.matmul(mat, src, out=dst)

        with pytest.raises(SolverError):
            conjugate_gradient(apply_into, b, np.zeros(50), 1e-12, max_iter=2)


# ---------------------------------------------------------------------------
# defaults and config
# ---------------------------------------------------------------------------

class TestDefaults:
    def test_dt_resolves_the_damping_time(self):
        assert default_dt(0.0) == 1e-3
        assert default_dt(100.0) == 1e-3
        assert default_dt(1e4) == pytest.approx(2.5e-5)

    def test_horizon_adds_transient_and_diffusion_windows(self):
        assert default_horizon(0.0, 2.0) == pytest.approx(1.0)
        assert default_horizon(100.0, 2.0) == pytest.approx(0.1 + 1.0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolveConfig(lam=-1.0)
        with pytest.raises(ValueError):
            SolveConfig(lam=1.0, theta=0.4)
        with pytest.raises(ValueError):
            SolveConfig(lam=1.0, theta=1.1)
        with pytest.raises(ValueError):
            SolveConfig(lam=1.0, cg_rel_tol=1e-3)  # too loose to trust
        with pytest.raises(ValueError):
            SolveConfig(lam=1.0, dt=0.0)
        with pytest.raises(ValueError):
            SolveConfig(lam=1.0, snapshot_stride=0)


# ---------------------------------------------------------------------------
# single steps
# ---------------------------------------------------------------------------

class TestStep:
    @pytest.mark.parametrize("theta", [0.5, 0.75, 1.0])
    def test_cosine_mode_amplification_exact(self, theta):
        grid = build_grid((0.0,), (1.0,), (16,))
        op = make_operator((16,), 0.0)
        x = grid.cell_centers()[..., 0]
        u0 = np.cos(math.pi * x)
        h = grid.spacing[0]
        mu = -4.0 / h**2 * math.sin(math.pi * h / 2.0) ** 2
        dt = 1e-3
        cfg = SolveConfig(lam=0.0, theta=theta, dt=dt)
        u1, stats = step(Field(grid, u0), op, cfg)
        gain = (1.0 + (1.0 - theta) * dt * mu) / (1.0 - theta * dt * mu)
        assert np.max(np.abs(u1.values - gain * u0)) < 1e-9
        assert u1.time == pytest.approx(dt)

    def test_matches_dense_backward_euler(self):
        shape = (8, 8)
        kill = RNG.random(shape) < 0.4
        op = make_operator(shape, lam=50.0, kill_mask=kill)
        u0 = RNG.random(shape)
        dt = 2e-3
        cfg = SolveConfig(lam=50.0, theta=1.0, dt=dt, cg_rel_tol=1e-12)
        got, _ = step(Field(op.grid, u0), op, cfg)
        mat = op.dense_matrix()
        want = np.linalg.solve(
            np.eye(64) - dt * mat, u0.reshape(-1)
        ).reshape(shape)
        assert np.max(np.abs(got.values - want)) < 1e-10

    def test_matches_dense_trapezoid(self):
        shape = (6, 7)
        op = make_operator(shape, lam=10.0,
                           kill_mask=RNG.random(shape) < 0.5)
        u0 = RNG.random(shape)
        dt = 1e-3
        cfg = SolveConfig(lam=10.0, theta=0.5, dt=dt)
        got, _ = step(Field(op.grid, u0), op, cfg)
        mat = op.dense_matrix()
        n = mat.shape[0]
        want = np.linalg.solve(
            np.eye(n) - 0.5 * dt * mat,
            (np.eye(n) + 0.5 * dt * mat) @ u0.reshape(-1),
        ).reshape(shape)
        assert np.max(np.abs(got.values - want)) < 1e-10

    def test_jacobi_path_matches_plain(self):
        shape = (10, 10)
        op = make_operator(shape, lam=1e3, kill_mask=RNG.random(shape) < 0.3)
        u0 = RNG.random(shape)
        base_cfg = SolveConfig(lam=1e3, dt=1e-4)
        a, _ = step(Field(op.grid, u0), op, base_cfg)
        b, _ = step(Field(op.grid, u0), op,
                    SolveConfig(lam=1e3, dt=1e-4, jacobi=True))
        assert np.max(np.abs(a.values - b.values)) < 1e-11

    def test_uniform_decay_with_full_kill_mask(self):
        # constant data, absorption everywhere: the Laplacian drops out and
        # each step multiplies by the scheme's scalar amplification exactly
        shape = (12, 12)
        lam, dt, theta = 30.0, 1e-3, 0.75
        op = make_operator(shape, lam, kill_mask=np.ones(shape, dtype=bool))
        cfg = SolveConfig(lam=lam, theta=theta, dt=dt)
        u = Field(op.grid, np.full(shape, 2.0))
        gain = (1.0 - (1.0 - theta) * dt * lam) / (1.0 + theta * dt * lam)
        for k in range(1, 6):
            u, _ = step(u, op, cfg)
            assert np.max(np.abs(u.values - 2.0 * gain**k)) < 1e-13


# ---------------------------------------------------------------------------
# full evolutions
# ---------------------------------------------------------------------------

class TestEvolve:
    def test_against_dense_matrix_exponential(self):
        from scipy.linalg import expm

        shape = (8, 8)
        kill = RNG.random(shape) < 0.3
        lam = 7.0
        op = make_operator(shape, lam, kill_mask=kill)
        u0 = RNG.random(shape)
        want = (expm(0.02 * op.dense_matrix()) @ u0.reshape(-1)).reshape(shape)
        errors = []
        for dt in (1e-4, 5e-5, 2.5e-5):
            cfg = SolveConfig(lam=lam, theta=0.5, dt=dt, horizon=0.02,
                              dense_until=0.02)
            store = evolve(Field(op.grid, u0), op, cfg)
            errors.append(np.max(np.abs(store.snapshots[-1] - want)))
        # trapezoid rule in time: error shrinks like dt^2 toward the true
        # semigroup of the *discrete* operator, which expm computes exactly
        assert errors[-1] < 1e-6 * np.max(np.abs(want))
        assert 3.0 < errors[0] / errors[1] < 5.0
        assert 3.0 < errors[1] / errors[2] < 5.0

    def test_mass_conserved_without_absorption(self):
        op = make_operator((32, 32), 0.0)
        u0 = RNG.random((32, 32))
        cfg = SolveConfig(lam=0.0, dt=1e-3, horizon=0.05)
        store = evolve(Field(op.grid, u0), op, cfg)
        masses = store.mass()
        assert np.max(np.abs(masses - masses[0])) < 1e-12 * abs(masses[0])

    def test_l2_norm_never_increases(self):
        op = make_operator((24, 24), 40.0,
                           kill_mask=RNG.random((24, 24)) < 0.2)
        u0 = RNG.normal(size=(24, 24))  # sign-indefinite data
        cfg = SolveConfig(lam=40.0, theta=0.5, dt=1e-3, horizon=0.05)
        store = evolve(Field(op.grid, u0), op, cfg)
        norms = np.asarray(store.l2_omega_sq)
        assert np.all(np.diff(norms) <= 1e-12 * norms[0])

    def test_implicit_euler_preserves_positivity(self):
        op = make_operator((24, 24), 200.0,
                           kill_mask=RNG.random((24, 24)) < 0.2)
        u0 = RNG.random((24, 24))  # strictly positive
        cfg = SolveConfig(lam=200.0, theta=1.0, dt=1e-3, horizon=0.05)
        store = evolve(Field(op.grid, u0), op, cfg)
        assert min(store.min_u) >= -1e-12 * float(np.max(u0))

    def test_step_times_are_exact_multiples(self):
        op = make_operator((8,), 0.0)
        cfg = SolveConfig(lam=0.0, dt=1e-3, horizon=10e-3)
        store = evolve(Field(op.grid, np.ones(8)), op, cfg)
        assert len(store.step_times) == 11
        assert store.step_times[7] == 7 * 1e-3  # bitwise, not approx
        assert store.final_time == 10 * 1e-3

    def test_restriction_stores_only_selected_cells(self):
        shape = (16, 16)
        op = make_operator(shape, 5.0, kill_mask=RNG.random(shape) < 0.3)
        region = np.zeros(shape, dtype=bool)
        region[4:9, 2:7] = True
        u0 = RNG.random(shape)
        cfg = SolveConfig(lam=5.0, dt=1e-3, horizon=5e-3, dense_until=5e-3)
        full = evolve(Field(op.grid, u0), op, cfg)
        slim = evolve(Field(op.grid, u0), op, cfg, region=region)
        assert slim.restriction is not None
        for fsnap, ssnap in zip(full.snapshots, slim.snapshots):
            assert ssnap.shape == (25,)
            assert np.array_equal(ssnap, fsnap[region])
        # the per-step scalars still describe the whole box
        assert slim.l2_omega_sq == full.l2_omega_sq
        assert slim.min_u == full.min_u

    def test_restriction_shape_checked(self):
        op = make_operator((8, 8), 1.0)
        cfg = SolveConfig(lam=1.0, dt=1e-3, horizon=2e-3)
        with pytest.raises(ValueError):
            evolve(Field(op.grid, np.ones((8, 8))), op, cfg,
                   region=np.ones((4, 4), dtype=bool))


# ---------------------------------------------------------------------------
# snapshot policy and persistence
# ---------------------------------------------------------------------------

class TestSnapshotPolicy:
    def test_zero_and_final_always_present(self):
        steps = _snapshot_step_set(1000, 1e-3, dense_until=0.01, stride=None,
                                   max_late=10)
        assert 0 in steps and 1000 in steps

    def test_dense_window(self):
        steps = _snapshot_step_set(1000, 1e-3, dense_until=0.05, stride=10**9,
                                   max_late=1)
        assert set(range(51)) <= steps
        assert 51 not in steps

    def test_stride_thins_the_tail(self):
        steps = _snapshot_step_set(100, 1e-3, dense_until=0.01, stride=20,
                                   max_late=500)
        assert steps == set(range(11)) | {10, 30, 50, 70, 90, 100}

    def test_late_snapshot_budget(self):
        steps = _snapshot_step_set(10_000, 1e-3, dense_until=0.0, stride=None,
                                   max_late=100)
        assert len(steps) <= 103

    def test_save_round_trip(self, tmp_path):
        op = make_operator((6, 5), 2.0)
        u0 = RNG.random((6, 5))
        cfg = SolveConfig(lam=2.0, dt=1e-3, horizon=4e-3, dense_until=4e-3)
        store = evolve(Field(op.grid, u0), op, cfg)
        store.save(tmp_path)
        index = (tmp_path / "index.csv").read_text().strip().splitlines()
        assert index[0] == "step,time,file"
        assert len(index) == len(store.snapshots) + 1
        first = np.fromfile(tmp_path / "snap_000000.f64", dtype="<f8")
        assert np.array_equal(first, u0.reshape(-1))

    def test_save_restricted_writes_cell_table(self, tmp_path):
        shape = (8, 8)
        op = make_operator(shape, 2.0)
        region = np.zeros(shape, dtype=bool)
        region[1, 2] = region[3, 4] = True
        cfg = SolveConfig(lam=2.0, dt=1e-3, horizon=2e-3)
        store = evolve(Field(op.grid, RNG.random(shape)), op, cfg,
                       region=region)
        store.save(tmp_path)
        cells = (tmp_path / "cells.csv").read_text().strip().splitlines()
        assert cells == ["i0,i1", "1,2", "3,4"]
