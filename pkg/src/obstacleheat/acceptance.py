"""The verification suite: eleven quantitative criteria, each returning one
pass/fail line.

Expensive artifacts (the 2-d strength sweep, the 3-d runs, the deep-shell
store) are computed once per ``AcceptanceLab`` and shared between criteria.
Criteria that need the dense matrix exponential import scipy lazily, so the
core package stays numpy-only.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import bounds
from .bounds import Verdict
from .config import reference_config
from .discretize import Field, InitialDataSpec, OperatorSpec, build_grid
from .evolve import SolveConfig, evolve
from .geometry import Ball, DomainSpec, RegionMask, offset_region
from .harness import (
    CaseConfig,
    SweepConfig,
    case_from_config,
    run_case,
    run_sweep,
    verify_caccioppoli_chain,
    local_slopes,
)
from .observables import region_series


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    runtime_s: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"criterion {self.number:02d} [{self.name}] {status} "
            f"({self.runtime_s:.1f}s): {self.detail}"
        )


def _timed(number: int, name: str, fn) -> CriterionResult:
    t0 = time.perf_counter()
    try:
        passed, detail = fn()
    except Exception as exc:  # a crash is a failure with its reason recorded
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number, name, passed, detail,
                           time.perf_counter() - t0)


class AcceptanceLab:
    """Shared, lazily computed runs for the verification criteria."""

    SWEEP_HORIZON = 0.25
    SWEEP_CELLS = 256
    CHAIN_LAM = 1e4
    CHAIN_SIGMA = 0.05
    CHAIN_HORIZON = 0.12
    THREE_D_HORIZON = 0.15
    THREE_D_LAMBDAS = (1e2, 1e3)

    def __init__(self):
        self._sweep2d = None
        self._zero_case = None
        self._chain = None
        self._cases_3d = {}

    # -- the reference 2-d sweep (criteria 3, 4, 6, 7) ---------------------

    def sweep_2d(self):
        if self._sweep2d is None:
            cfg = reference_config(2)
            cfg["solve"]["horizon"] = self.SWEEP_HORIZON
            cfg["grid"]["cells"] = self.SWEEP_CELLS
            sweep = SweepConfig(
                case=case_from_config(cfg),
                lambdas=[1e2, 10.0**2.5, 1e3, 10.0**3.5, 1e4],
                out_dir="out/acceptance_sweep",
            )
            self._sweep2d = run_sweep(sweep, quiet=True)
        return self._sweep2d

    def sweep_case(self, lam: float):
        for case in self.sweep_2d().cases:
            if abs(case.aux["lam"] - lam) <= 1e-9 * lam:
                return case
        raise KeyError(f"lam={lam} not in the acceptance sweep")

    # -- a zero-absorption run for conservation (criterion 2) --------------

    def zero_absorption_case(self):
        if self._zero_case is None:
            cfg = reference_config(2)
            cfg["grid"]["cells"] = 128
            cfg["solve"]["horizon"] = 0.2
            case = case_from_config(cfg, lam=0.0, label="lam0")
            self._zero_case = run_case(case)
        return self._zero_case

    # -- deep-shell store at strong absorption (criterion 5) ---------------

    def chain_setup(self):
        """One strong-absorption run on a geometry roomy enough for three
        0.05-wide shells (a = 0.18)."""
        if self._chain is None:
            domain = DomainSpec(
                omega_lower=[0.0, 0.0],
                omega_upper=[1.0, 1.0],
                obstacle=Ball(center=[0.5, 0.5], radius=0.4),
                subdomain=Ball(center=[0.5, 0.5], radius=0.22),
            )
            case = CaseConfig(
                domain=domain,
                cells=256,
                lam=self.CHAIN_LAM,
                nu=0.25,
                gamma=self.CHAIN_SIGMA * 1 / 0.18,  # one shell of width 0.05
                label="chain",
                # the fat obstacle leaves only a 0.1 wall gap, so the initial
                # ramp has to be brisker than the default
                initial=InitialDataSpec(amplitude=1.0, ramp_width=0.05),
                solve=SolveConfig(lam=self.CHAIN_LAM,
                                  horizon=self.CHAIN_HORIZON),
                keep_store=True,
            )
            result = run_case(case)
            a = result.aux["a"]
            self._chain = (result, domain, a)
        return self._chain

    # -- 3-d mean-value runs (criterion 9) ----------------------------------

    def case_3d(self, lam: float):
        if lam not in self._cases_3d:
            cfg = reference_config(3)
            cfg["solve"]["horizon"] = self.THREE_D_HORIZON
            cfg["bounds"]["gamma"] = 0.25
            cfg["bounds"]["mv_gamma"] = 0.25
            if lam >= 1e3:
                # put the dense snapshot window over the observation peak
                cfg["solve"]["dense_until"] = 0.05
            case = case_from_config(cfg, lam=lam, label=f"mv3d_lam{lam:g}")
            self._cases_3d[lam] = run_case(case)
        return self._cases_3d[lam]


# ---------------------------------------------------------------------------
# criterion 1: manufactured solution, second-order convergence
# ---------------------------------------------------------------------------

def _product_cosine_error(cells: int, n_steps: int, horizon: float) -> float:
    """Linf error of the trapezoid scheme against the separable cosine mode."""
    grid = build_grid([0.0, 0.0], [1.0, 1.0], (cells, cells))
    kill = RegionMask(grid, np.zeros(grid.shape, dtype=bool), label="nowhere")
    op = OperatorSpec(grid, 0.0, kill)
    centers = grid.cell_centers()
    u0 = np.cos(np.pi * centers[..., 0]) * np.cos(np.pi * centers[..., 1])
    cfg = SolveConfig(
        lam=0.0,
        theta=0.5,
        dt=horizon / n_steps,
        horizon=horizon,
        dense_until=1e-12,
        snapshot_stride=10**9,
    )
    store = evolve(Field(grid, u0), op, cfg)
    t_final = store.step_times[-1]
    exact = u0 * math.exp(-2.0 * math.pi**2 * t_final)
    return float(np.max(np.abs(store.snapshots[-1] - exact)))


def criterion_01(lab: AcceptanceLab) -> CriterionResult:
    def body():
        errors = [
            _product_cosine_error(cells, n, 0.1)
            for cells, n in ((64, 25), (128, 50), (256, 100))
        ]
        orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
        ok = all(1.8 <= p <= 2.2 for p in orders)
        return ok, (
            f"Linf errors={['%.3e' % e for e in errors]} "
            f"orders={['%.3f' % p for p in orders]} target 2.0+-0.2"
        )

    return _timed(1, "manufactured-solution-order", body)


# ---------------------------------------------------------------------------
# criterion 2: conservation (lam=0) and per-step L2 contraction
# ---------------------------------------------------------------------------

def criterion_02(lab: AcceptanceLab) -> CriterionResult:
    def body():
        zero = lab.zero_absorption_case()
        drift = zero.aux["mass_drift_rel"]
        runs = [zero] + list(lab.sweep_2d().cases)
        worst_inc = max(r.aux["l2_max_step_increase_rel"] for r in runs)
        ok = drift <= 1e-8 and worst_inc <= 1e-12
        return ok, (
            f"mass drift (lam=0) = {drift:.3e} (<=1e-8); worst per-step "
            f"L2 increase over {len(runs)} runs = {worst_inc:.3e} (<=1e-12)"
        )

    return _timed(2, "conservation-and-contraction", body)


# ---------------------------------------------------------------------------
# criterion 3: positivity of the implicit-Euler flow
# ---------------------------------------------------------------------------

def criterion_03(lab: AcceptanceLab) -> CriterionResult:
    def body():
        for case in lab.sweep_2d().cases:
            floor = -1e-12 * case.aux["max_g"]
            if case.aux["min_u"] < floor:
                return False, (
                    f"lam={case.aux['lam']:g}: min u = {case.aux['min_u']:.3e} "
                    f"< {floor:.3e}"
                )
        min_us = [c.aux["min_u"] for c in lab.sweep_2d().cases]
        return True, (
            f"min u over all steps/cases = {min(min_us):.3e} "
            f">= -1e-12*max g = {-1e-12 * lab.sweep_2d().cases[0].aux['max_g']:.3e}"
        )

    return _timed(3, "positivity", body)


# ---------------------------------------------------------------------------
# criterion 4: base damping ceilings on the absorber
# ---------------------------------------------------------------------------

def criterion_04(lab: AcceptanceLab) -> CriterionResult:
    def body():
        picks = (1e2, 1e3, 1e4)
        margins = []
        runtime = 0.0
        for lam in picks:
            case = lab.sweep_case(lam)
            runtime += case.runtime_s
            for name in ("absorber_sup", "absorber_spacetime"):
                rep = case.report(name)
                if rep.verdict is not Verdict.HOLDS:
                    return False, (
                        f"lam={lam:g} {name}: {rep.verdict.value} "
                        f"(ratio {rep.ratio:.3f})"
                    )
                margins.append(f"lam={lam:g}/{name.split('_')[1]}:"
                               f"{rep.ratio:.3e}")
        ok = runtime < 300.0
        return ok, (
            "both ceilings hold outright; observed/bound = "
            + " ".join(margins)
            + f"; runtime {runtime:.0f}s (<300s)"
        )

    return _timed(4, "base-damping-ceilings", body)


# ---------------------------------------------------------------------------
# criterion 5: the shell contraction chain at strong absorption
# ---------------------------------------------------------------------------

def criterion_05(lab: AcceptanceLab) -> CriterionResult:
    def body():
        result, domain, a = lab.chain_setup()
        store = result.store
        sigma = lab.CHAIN_SIGMA
        worst = 0.0
        checked = 0
        for n in (1, 2, 3):
            gamma = sigma * n / a
            reports = verify_caccioppoli_chain(
                store, domain, lab.CHAIN_LAM, gamma, n, a=a
            )
            for rep in reports:
                checked += 1
                worst = max(worst, rep.ratio)
                if rep.verdict is not Verdict.HOLDS:
                    return False, (
                        f"N={n} {rep.name}: ratio={rep.ratio:.3e} "
                        f"verdict={rep.verdict.value}"
                    )
        return True, (
            f"{checked} shell comparisons across N in {{1,2,3}} "
            f"(sigma={sigma}); worst lhs/rhs = {worst:.3e} (<=1)"
        )

    return _timed(5, "shell-chain", body)


# ---------------------------------------------------------------------------
# criterion 6: sub-exponential ceiling, empirical tier
# ---------------------------------------------------------------------------

def criterion_06(lab: AcceptanceLab) -> CriterionResult:
    def body():
        sweep = lab.sweep_2d()
        failures = []
        for case in sweep.cases:
            lam = case.aux["lam"]
            if lam < 1e3:
                continue
            rep = case.report("inner_sup_subexp")
            if rep.verdict is Verdict.FLOORED:
                continue
            if rep.verdict is not Verdict.HOLDS:
                failures.append(f"lam={lam:g}: {rep.verdict.value}")
        lam0_line = next(
            line for line in sweep.summary_lines if "lambda0" in line
        )
        floor_line = next(
            line for line in sweep.summary_lines
            if "measurement floor" in line
        )
        print("  " + lam0_line)
        print("  " + floor_line)
        if failures:
            return False, "; ".join(failures)
        return True, (
            "ceiling holds for every unfloored lam >= 1e3; "
            f"lambda0 = {sweep.lam0:.3e} (printed above with the floor note)"
        )

    return _timed(6, "subexp-ceiling-empirical-tier", body)


# ---------------------------------------------------------------------------
# criterion 7: super-algebraic decay of the observation norm
# ---------------------------------------------------------------------------

def criterion_07(lab: AcceptanceLab) -> CriterionResult:
    def body():
        sweep = lab.sweep_2d()
        lams = np.asarray([c.aux["lam"] for c in sweep.cases])
        sups = np.asarray([c.aux["sup_inner"] for c in sweep.cases])
        if np.any(sups <= 0):
            return False, "a sweep point is non-positive; cannot fit"
        slopes = local_slopes(lams, sups)
        gaps_dec = np.diff(np.log10(lams))
        mids = 0.5 * (gaps_dec[:-1] + gaps_dec[1:])
        drops = np.diff(slopes)
        steepening = bool(np.all(drops <= -0.5 * mids))
        r2_exp = sweep.fits["exp-sqrt"].r_squared
        r2_pow = sweep.fits["power"].r_squared
        ok = steepening and r2_exp >= 0.99 and (r2_exp - r2_pow) >= 0.01
        return ok, (
            f"slopes/decade={['%.2f' % s for s in slopes]} "
            f"drops={['%.2f' % d for d in drops]} "
            f"(need <= {['%.2f' % (-0.5 * m) for m in mids]}); "
            f"R2 exp-sqrt={r2_exp:.4f} (>=0.99), power={r2_pow:.4f} "
            f"(gap {r2_exp - r2_pow:.4f} >= 0.01)"
        )

    return _timed(7, "super-algebraic-decay", body)


# ---------------------------------------------------------------------------
# criterion 8: Maclaurin head/tail identity and the t=0 degeneracy
# ---------------------------------------------------------------------------

def criterion_08(lab: AcceptanceLab) -> CriterionResult:
    def body():
        worst = 0.0
        for s in (0.1, 1.0, 10.0, 30.0):
            for k in (0, 5, 50):
                total = bounds.maclaurin_poly(s, k) + bounds.maclaurin_tail(s, k)
                rel = abs(total - math.exp(s)) / math.exp(s)
                worst = max(worst, rel)
        at_zero = bounds.time_refined_bound(
            0.0, lam=1e3, sigma=0.05, n=3, grad_g_sq=1.0
        )
        exact_zero = at_zero.value == 0.0
        ok = worst <= 1e-12 and exact_zero
        return ok, (
            f"max relative defect of head+tail vs exp over 12 (s,k) pairs = "
            f"{worst:.3e} (<=1e-12); ceiling at t=0 is exactly "
            f"{at_zero.value!r}"
        )

    return _timed(8, "maclaurin-identity", body)


# ---------------------------------------------------------------------------
# criterion 9: mean-value constant stability in 3-d
# ---------------------------------------------------------------------------

def criterion_09(lab: AcceptanceLab) -> CriterionResult:
    def body():
        results = {lam: lab.case_3d(lam) for lam in lab.THREE_D_LAMBDAS}
        runtime = sum(r.runtime_s for r in results.values())
        consts, sup_sqs = {}, {}
        for lam, res in results.items():
            rep = res.report("mean_value_short")
            if rep.verdict is Verdict.FLOORED:
                return False, f"lam={lam:g}: mean-value data floored"
            consts[lam] = rep.observed
            sup_sqs[lam] = float(rep.detail["sup_sq"])
        lo, hi = lab.THREE_D_LAMBDAS
        stability = consts[hi] / consts[lo]
        decay = sup_sqs[lo] / sup_sqs[hi]
        ok = 0.5 <= stability <= 2.0 and decay >= 10.0 and runtime < 600.0
        return ok, (
            f"normalized constants {consts[lo]:.4e} vs {consts[hi]:.4e} "
            f"(ratio {stability:.3f} in [0.5,2]); sup_Q decay x{decay:.1f} "
            f"(>=10); runtime {runtime:.0f}s (<600s)"
        )

    return _timed(9, "mean-value-stability", body)


# ---------------------------------------------------------------------------
# criterion 10: dense matrix-exponential oracle at coarse resolution
# ---------------------------------------------------------------------------

def criterion_10(lab: AcceptanceLab) -> CriterionResult:
    def body():
        from scipy.linalg import expm

        cfg = reference_config(2)
        cfg["grid"]["cells"] = 16
        cfg["solve"]["theta"] = 0.5
        cfg["solve"]["dt"] = 1e-4
        cfg["solve"]["horizon"] = 0.1
        cfg["solve"]["dense_until"] = 0.1
        case = case_from_config(cfg, lam=1e3, label="oracle16")
        case.keep_store = True
        case.restrict_snapshots = False
        result = run_case(case)
        store = result.store

        grid = store.grid
        absorber = offset_region(case.domain.obstacle, 0.0, grid, "absorber")
        op = OperatorSpec(grid, case.lam, absorber)
        mat = op.dense_matrix()
        from .discretize import build_initial

        g = build_initial(grid, case.domain, case.initial)
        series = region_series(store, absorber)
        vol = grid.cell_volume
        worst = 0.0
        details = []
        for t in (0.01, 0.1):
            dense = expm(t * mat) @ g.values.reshape(-1)
            dense_val = float(
                np.sum(dense[absorber.mask.reshape(-1)] ** 2) * vol
            )
            stepped = series.at(t)
            rel = abs(stepped - dense_val) / dense_val
            worst = max(worst, rel)
            details.append(f"t={t:g}: rel diff {rel:.3e}")
        return worst <= 0.01, "; ".join(details) + " (<=1e-2)"

    return _timed(10, "dense-oracle-equivalence", body)


# ---------------------------------------------------------------------------
# criterion 11: byte-identical sweep determinism
# ---------------------------------------------------------------------------

def criterion_11(lab: AcceptanceLab) -> CriterionResult:
    def body():
        cfg = reference_config(2)
        cfg["grid"]["cells"] = 64
        cfg["solve"]["horizon"] = 0.1
        outputs = []
        for run_idx in (1, 2):
            sweep = SweepConfig(
                case=case_from_config(cfg),
                lambdas=[1e2, 1e3, 1e4],
                out_dir=f"out/acceptance_det{run_idx}",
            )
            result = run_sweep(sweep, quiet=True)
            with open(result.csv_path, "rb") as fh:
                outputs.append(fh.read())
        identical = outputs[0] == outputs[1]
        return identical, (
            f"two sweep invocations -> CSV bytes "
            f"{'identical' if identical else 'DIFFER'} "
            f"({len(outputs[0])} bytes)"
        )

    return _timed(11, "determinism", body)


CRITERIA = {
    1: criterion_01,
    2: criterion_02,
    3: criterion_03,
    4: criterion_04,
    5: criterion_05,
    6: criterion_06,
    7: criterion_07,
    8: criterion_08,
    9: criterion_09,
    10: criterion_10,
    11: criterion_11,
}


def run_all(only=None, lab: AcceptanceLab | None = None) -> int:
    """Run the requested criteria (all by default); return a shell exit code."""
    lab = lab or AcceptanceLab()
    numbers = sorted(only) if only else sorted(CRITERIA)
    results = []
    for number in numbers:
        if number not in CRITERIA:
            print(f"criterion {number:02d}: unknown")
            return 2
        res = CRITERIA[number](lab)
        results.append(res)
        print(res.line())
    failed = [r for r in results if not r.passed]
    total = time.strftime("%H:%M:%S", time.gmtime(sum(r.runtime_s for r in results)))
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed "
          f"(total runtime {total})")
    return 1 if failed else 0
