"""Closed-form decay bounds for the strongly absorbed heat flow.

Everything here is pure arithmetic on floats: the solver-facing code extracts
the observed norms and this module supplies the certified ceilings they are
compared against.

Bounds implemented, writing ``lam`` for the absorption strength, ``g`` for the
initial data (supported away from the absorbing set), ``a`` for the safety
distance between the inner observation region and the absorber's boundary,
and ``gamma`` in (0, 1) for the fraction of that distance the shell ladder
may consume:

* base damping: on the absorbing set, ``sup_t ||u||^2 <= |grad g|^2 / lam``
  and the space-time mass satisfies ``||u||^2 <= ||g||^2 / (2 lam)``;
* one shell step: shrinking the region by a gap ``sigma`` costs a factor
  ``4 / (lam sigma^2)`` for both norm families;
* iterating ``N = floor(lam^nu)`` shells across total slack ``gamma * a``
  gives ``(4 N^2 / (lam gamma^2 a^2))^N * |grad g|^2 / lam``, which for
  ``lam >= coupling_threshold(gamma, a, nu)`` is at most the sub-exponential
  ceiling ``exp(-lam^nu) * |grad g|^2 / lam``;
* in time: the same ladder sharpens to
  ``(|grad g|^2/lam) * (2/(sigma^2 lam))^N * exp(-2 lam t) * R_{N-1}(2 lam t)``
  where ``R_k`` is the exponential's Maclaurin remainder after degree ``k``.

The remainder is evaluated in log space via the identity
``exp(-s) * R_k(s) = P[Poisson(s) > k]``, switching between the complement of
the head sum and a direct tail sum so that neither overflow nor cancellation
occurs for any ``s >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from enum import Enum

_OVERFLOW_ARG = 700.0


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    FLOORED = "below-precision-floor"
    NOT_APPLICABLE = "not-applicable"


def classify(observed: float, bound: float, floor: float = 0.0) -> Verdict:
    """Compare an observed quantity against its ceiling.

    A measurement below ``floor`` (the resolution of the computation, e.g.
    1e-14 times the quantity's initial size) is reported as FLOORED rather
    than trusted either way.
    """
    if math.isnan(observed) or math.isnan(bound):
        raise ValueError("cannot classify NaN inputs")
    if floor > 0.0 and observed < floor:
        return Verdict.FLOORED
    return Verdict.HOLDS if observed <= bound else Verdict.FAILS


@dataclass
class BoundReport:
    name: str
    observed: float
    bound: float
    verdict: Verdict
    detail: dict = dataclass_field(default_factory=dict)

    @property
    def ratio(self) -> float:
        """observed / bound; 0 when both vanish, inf when only the bound does."""
        if self.bound == 0.0:
            return 0.0 if self.observed == 0.0 else math.inf
        return self.observed / self.bound

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "observed": self.observed,
            "bound": self.bound,
            "ratio": self.ratio,
            "verdict": self.verdict.value,
            "detail": self.detail,
        }

    def line(self) -> str:
        extras = " ".join(f"{k}={v}" for k, v in sorted(self.detail.items()))
        core = (
            f"{self.name}: observed={self.observed:.6e} "
            f"bound={self.bound:.6e} -> {self.verdict.value}"
        )
        return f"{core} [{extras}]" if extras else core


# ---------------------------------------------------------------------------
# base damping on the absorbing set
# ---------------------------------------------------------------------------

def base_sup_bound(lam: float, grad_g_sq: float) -> float:
    """Ceiling for sup over time of the squared norm on the absorbing set."""
    if lam <= 0:
        raise ValueError("absorption strength must be positive")
    if grad_g_sq < 0:
        raise ValueError("squared gradient norm must be nonnegative")
    return grad_g_sq / lam


def base_spacetime_bound(lam: float, g_sq: float) -> float:
    """Ceiling for the space-time squared norm on the absorbing set."""
    if lam <= 0:
        raise ValueError("absorption strength must be positive")
    if g_sq < 0:
        raise ValueError("squared norm must be nonnegative")
    return g_sq / (2.0 * lam)


# ---------------------------------------------------------------------------
# the shell ladder
# ---------------------------------------------------------------------------

def shell_factor(lam: float, sigma: float) -> float:
    """Cost of shrinking the observation region by a gap ``sigma``."""
    if lam <= 0 or sigma <= 0:
        raise ValueError("absorption strength and gap must be positive")
    return 4.0 / (lam * sigma * sigma)


def shell_count(lam: float, nu: float) -> int:
    """Number of nested shells the ladder uses: floor(lam^nu), at least 1."""
    if lam <= 0:
        raise ValueError("absorption strength must be positive")
    if not 0.0 < nu < 0.5:
        raise ValueError("shell-count exponent must lie in (0, 1/2)")
    return max(1, math.floor(lam**nu))


def coupling_threshold(gamma: float, a: float, nu: float) -> float:
    """Least absorption strength for which the ladder's product beats the
    sub-exponential ceiling: (4e / (gamma a)^2)^(1/(1-2 nu))."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    if a <= 0:
        raise ValueError("safety distance must be positive")
    if not 0.0 < nu < 0.5:
        raise ValueError("shell-count exponent must lie in (0, 1/2)")
    base = 4.0 * math.e / (gamma * gamma * a * a)
    return base ** (1.0 / (1.0 - 2.0 * nu))


@dataclass
class BoundValue:
    """A nonnegative bound carried with its natural log (may be -inf/0)."""

    value: float
    log_value: float


def _bound_from_log(log_value: float) -> BoundValue:
    if log_value == -math.inf:
        return BoundValue(0.0, -math.inf)
    if log_value > _OVERFLOW_ARG:
        return BoundValue(math.inf, log_value)
    return BoundValue(math.exp(log_value), log_value)


def iterated_shell_bound(lam: float, gamma: float, a: float, nu: float,
                         grad_g_sq: float) -> BoundValue:
    """Product of N shell factors applied to the base sup ceiling.

    With N = shell_count(lam, nu) shells of equal gap gamma*a/N this equals
    (4 N^2 / (lam gamma^2 a^2))^N * grad_g_sq / lam.
    """
    n = shell_count(lam, nu)
    sigma = gamma * a / n
    if grad_g_sq < 0:
        raise ValueError("squared gradient norm must be nonnegative")
    if grad_g_sq == 0:
        return BoundValue(0.0, -math.inf)
    log_value = (
        n * math.log(shell_factor(lam, sigma))
        + math.log(grad_g_sq)
        - math.log(lam)
    )
    return _bound_from_log(log_value)


def subexp_bound(lam: float, nu: float, grad_g_sq: float) -> BoundValue:
    """The headline ceiling exp(-lam^nu) * grad_g_sq / lam.

    Certified once lam >= coupling_threshold(gamma, a, nu); below that it is
    still a well-defined number the data may or may not respect.
    """
    if lam <= 0:
        raise ValueError("absorption strength must be positive")
    if not 0.0 < nu < 0.5:
        raise ValueError("shell-count exponent must lie in (0, 1/2)")
    if grad_g_sq < 0:
        raise ValueError("squared gradient norm must be nonnegative")
    if grad_g_sq == 0:
        return BoundValue(0.0, -math.inf)
    log_value = -(lam**nu) + math.log(grad_g_sq) - math.log(lam)
    return _bound_from_log(log_value)


def subexp_tier(lam: float, threshold: float) -> str:
    """'guaranteed' once the strength clears the threshold, else 'empirical'."""
    return "guaranteed" if lam >= threshold else "empirical"


# ---------------------------------------------------------------------------
# Maclaurin head and tail of the exponential
# ---------------------------------------------------------------------------

def maclaurin_poly(s: float, k: int) -> float:
    """Head sum_{j<=k} s^j / j! in plain float arithmetic."""
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if s < 0:
        raise ValueError("argument must be nonnegative")
    if s > _OVERFLOW_ARG:
        raise OverflowError(
            "head sum overflows double precision; work with logs instead"
        )
    total = 1.0
    term = 1.0
    for j in range(1, k + 1):
        term *= s / j
        total += term
    return total


def maclaurin_tail(s: float, k: int) -> float:
    """Remainder R_k(s) = sum_{j>k} s^j / j! by direct forward summation.

    Raises OverflowError for s > 700 where the terms leave double range; use
    ``log_maclaurin_tail`` there.
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if s < 0:
        raise ValueError("argument must be nonnegative")
    if s > _OVERFLOW_ARG:
        raise OverflowError(
            "remainder overflows double precision; use log_maclaurin_tail"
        )
    if s == 0.0:
        return 0.0
    j = k + 1
    term = s**(k + 1) / math.factorial(k + 1) if k < 150 else math.exp(
        (k + 1) * math.log(s) - math.lgamma(k + 2)
    )
    total = term
    while True:
        j += 1
        term *= s / j
        total += term
        if term <= total * 1e-18 and j > s:
            return total


def _log_poisson_pmf(j: int, s: float) -> float:
    return j * math.log(s) - s - math.lgamma(j + 1)


def log_maclaurin_tail(s: float, k: int) -> float:
    """log R_k(s), stable for all s >= 0 (returns -inf at s = 0).

    Uses exp(-s) R_k(s) = P[Poisson(s) > k].  When that tail probability is
    large, form it as 1 minus the head probability (no cancellation); when it
    is small, sum the tail's log-terms directly (the head would cancel).
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    if s < 0:
        raise ValueError("argument must be nonnegative")
    if s == 0.0:
        return -math.inf
    head = 0.0
    for j in range(0, k + 1):
        head += math.exp(_log_poisson_pmf(j, s))
    if head < 0.5:
        return s + math.log1p(-head)
    # tail < 1/2: terms decay at ratio s/(j+1) < 1 from the leading one
    lead = _log_poisson_pmf(k + 1, s)
    total = 1.0
    ratio_term = 1.0
    j = k + 1
    while True:
        j += 1
        ratio_term *= s / j
        total += ratio_term
        if ratio_term <= total * 1e-18:
            break
    return s + lead + math.log(total)


def time_refined_bound(t: float, lam: float, sigma: float, n: int,
                       grad_g_sq: float) -> BoundValue:
    """Pointwise-in-time ceiling from running the ladder with the heat
    semigroup's own decay kept explicit:

        (grad_g_sq / lam) * (2 / (sigma^2 lam))^n * exp(-2 lam t) * R_{n-1}(2 lam t)

    Exactly zero at t = 0 (the remainder vanishes there).
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    if lam <= 0 or sigma <= 0:
        raise ValueError("absorption strength and gap must be positive")
    if n < 1:
        raise ValueError("shell count must be at least 1")
    if grad_g_sq < 0:
        raise ValueError("squared gradient norm must be nonnegative")
    if t == 0.0 or grad_g_sq == 0.0:
        return BoundValue(0.0, -math.inf)
    s = 2.0 * lam * t
    log_value = (
        math.log(grad_g_sq)
        - math.log(lam)
        + n * (math.log(2.0) - 2.0 * math.log(sigma) - math.log(lam))
        - s
        + log_maclaurin_tail(s, n - 1)
    )
    return _bound_from_log(log_value)


# ---------------------------------------------------------------------------
# interior mean-value constant
# ---------------------------------------------------------------------------

@dataclass
class MeanValueReport:
    """Observed local-boundedness constant of the flow on a safe region.

    ``normalized`` is sup of u^2 over the short window times r^(dim+2)
    divided by the space-time mass over the wide window; for a caloric-type
    bound it should be O(1) uniformly in the absorption strength.
    """

    sup_sq: float
    spacetime_sq: float
    radius: float
    dim: int
    window: str
    normalized: float
    note: str = ""


def mean_value_constant(sup_sq: float, spacetime_sq: float, radius: float,
                        dim: int, window: str = "short") -> MeanValueReport:
    if sup_sq < 0 or spacetime_sq < 0:
        raise ValueError("norms must be nonnegative")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if dim < 1:
        raise ValueError("dimension must be at least 1")
    note = ""
    if dim != 3:
        note = (
            "normalization exponent dim+2 is the parabolic scaling in any "
            "dimension, but the reference constant was calibrated in 3-d"
        )
    if spacetime_sq == 0.0:
        normalized = math.inf if sup_sq > 0 else 0.0
    else:
        normalized = sup_sq * radius ** (dim + 2) / spacetime_sq
    return MeanValueReport(
        sup_sq=sup_sq,
        spacetime_sq=spacetime_sq,
        radius=radius,
        dim=dim,
        window=window,
        normalized=normalized,
        note=note,
    )
