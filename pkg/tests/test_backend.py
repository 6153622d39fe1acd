"""Compiled-kernel vs numpy-fallback agreement, and backend forcing.

Both implementations evaluate the same shifted operator; on random fields
they must agree to rounding.  The environment switch is exercised in child
interpreters so each import starts clean.
"""

import subprocess
import sys

import numpy as np
import pytest

from obstacleheat import _stencil_np, backend

RNG = np.random.default_rng(2024)

HAS_CYTHON = backend.backend_name() == "cython"


def _call(impl, u, kill, lam, inv_h2, alpha, beta):
    out = np.empty_like(u)
    if u.ndim == 1:
        impl.apply_shifted_1d(out, u, kill, lam, inv_h2[0], alpha, beta)
    elif u.ndim == 2:
        impl.apply_shifted_2d(out, u, kill, lam, inv_h2[0], inv_h2[1],
                              alpha, beta)
    else:
        impl.apply_shifted_3d(out, u, kill, lam, inv_h2[0], inv_h2[1],
                              inv_h2[2], alpha, beta)
    return out


@pytest.mark.skipif(not HAS_CYTHON, reason="compiled extension not built")
class TestBackendAgreement:
    @pytest.mark.parametrize(
        "shape,inv_h2",
        [
            ((257,), (64.0,)),
            ((65, 33), (100.0, 64.0)),
            ((17, 19, 23), (100.0, 81.0, 64.0)),
        ],
    )
    def test_kernels_agree_on_random_fields(self, shape, inv_h2):
        from obstacleheat import _stencil_cy

        u = RNG.normal(size=shape)
        kill = (RNG.random(shape) < 0.3).astype(np.uint8)
        for alpha, beta, lam in [(1.0, 1e-3, 1e3), (0.0, 1.0, 0.0),
                                 (1.0, -2.5e-4, 5e4)]:
            a = _call(_stencil_np, u, kill, lam, inv_h2, alpha, beta)
            b = _call(_stencil_cy, u, kill, lam, inv_h2, alpha, beta)
            scale = np.max(np.abs(a)) or 1.0
            assert np.max(np.abs(a - b)) <= 1e-13 * scale

    def test_dispatch_returns_the_supplied_buffer(self):
        u = RNG.normal(size=(12, 12))
        kill = np.zeros((12, 12), dtype=np.uint8)
        out = np.empty_like(u)
        ret = backend.apply_shifted(out, u, kill, 0.0, (144.0, 144.0),
                                    1.0, 1e-3)
        assert ret is out


class TestEnvForcing:
    def _probe(self, env_value):
        code = (
            "from obstacleheat import backend; print(backend.backend_name())"
        )
        return subprocess.run(
            [sys.executable, "-c", code],
            env={"PATH": "/usr/bin:/bin", "OBSTACLEHEAT_BACKEND": env_value},
            capture_output=True,
            text=True,
        )

    def test_numpy_can_be_forced(self):
        proc = self._probe("numpy")
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == "numpy"

    @pytest.mark.skipif(not HAS_CYTHON, reason="compiled extension not built")
    def test_cython_can_be_forced(self):
        proc = self._probe("cython")
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout.strip() == "cython"

    def test_unknown_backend_is_rejected(self):
        proc = self._probe("fortran")
        assert proc.returncode != 0
        assert "OBSTACLEHEAT_BACKEND" in proc.stderr

    def test_solves_agree_across_backends(self, tmp_path):
        # one implicit step on a fixed field, both backends, full pipeline
        script = tmp_path / "probe.py"
        script.write_text(
            "import numpy as np\n"
            "from obstacleheat.discretize import Field, OperatorSpec, "
            "build_grid\n"
            "from obstacleheat.evolve import SolveConfig, step\n"
            "from obstacleheat.geometry import RegionMask\n"
            "grid = build_grid((0.0, 0.0), (1.0, 1.0), (32, 32))\n"
            "x = grid.cell_centers()\n"
            "u = np.cos(np.pi * x[..., 0]) * np.cos(2 * np.pi * x[..., 1])\n"
            "kill = (x[..., 0] - 0.5) ** 2 + (x[..., 1] - 0.5) ** 2 < 0.09\n"
            "op = OperatorSpec(grid, 1e3, RegionMask(grid, kill))\n"
            "out, _ = step(Field(grid, u), op, SolveConfig(lam=1e3, "
            "dt=2.5e-4))\n"
            "print(repr(float(out.values.sum())))\n"
        )
        sums = {}
        for name in ("numpy", "cython") if HAS_CYTHON else ("numpy",):
            proc = subprocess.run(
                [sys.executable, str(script)],
                env={"PATH": "/usr/bin:/bin", "OBSTACLEHEAT_BACKEND": name},
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, proc.stderr
            sums[name] = float(proc.stdout.strip())
        if HAS_CYTHON:
            assert sums["numpy"] == pytest.approx(sums["cython"], abs=1e-11)
