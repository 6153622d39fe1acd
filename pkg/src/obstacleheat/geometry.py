"""Analytic shapes, signed distances, offset regions and shell families.

Every shape in the catalogue carries an exact Euclidean signed distance
function (negative inside, zero on the boundary, positive outside), so
level-set offsets ``{sdf <= rho}`` are true parallel sets.  Each shape also
stores an injectivity radius per offset direction: the largest |rho| for
which the offset boundary stays a C1 image of the original.  Offsets beyond
the stored reach are refused rather than silently degraded.

Regions are realized on a grid by sampling cell centers; a cell belongs to a
mask when its center satisfies ``sdf <= rho``.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

import numpy as np

if TYPE_CHECKING:  # Grid lives in discretize; runtime use is duck-typed
    from .discretize import Grid


class GeometryError(ValueError):
    """Raised for invalid shapes, impossible offsets, or broken containment."""


def _as_points(points: np.ndarray, dim: int) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim == 0 or p.shape[-1] != dim:
        raise GeometryError(
            f"expected points with trailing axis of length {dim}, got shape {p.shape}"
        )
    return p


class Shape(ABC):
    """A closed region with an exact signed distance function."""

    center: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.center)

    @abstractmethod
    def sdf(self, points: np.ndarray) -> np.ndarray:
        """Signed distance to the boundary, negative inside.

        Parameters
        ----------
        points : array, shape (..., dim)

        Returns
        -------
        array, shape (...)
        """

    @property
    @abstractmethod
    def reach_inward(self) -> float:
        """Largest depth to which inward offsets stay smooth."""

    @property
    @abstractmethod
    def reach_outward(self) -> float:
        """Largest distance to which outward offsets stay smooth (may be inf)."""

    @abstractmethod
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        """(lower, upper) corners of an axis-aligned box containing the shape."""

    def contains(self, points: np.ndarray) -> np.ndarray:
        return self.sdf(points) <= 0.0


@dataclass
class Ball(Shape):
    center: tuple[float, ...]
    radius: float
    reach_inward_override: float | None = None
    reach_outward_override: float | None = None

    def __post_init__(self):
        self.center = tuple(float(c) for c in self.center)
        self.radius = float(self.radius)
        if self.radius <= 0:
            raise GeometryError("ball radius must be positive")

    def sdf(self, points):
        p = _as_points(points, self.dim)
        return np.linalg.norm(p - np.asarray(self.center), axis=-1) - self.radius

    @property
    def reach_inward(self):
        if self.reach_inward_override is not None:
            return self.reach_inward_override
        return self.radius

    @property
    def reach_outward(self):
        if self.reach_outward_override is not None:
            return self.reach_outward_override
        return math.inf

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius


@dataclass
class Ellipse(Shape):
    """Axis-aligned ellipse (2d) or ellipsoid (3d) with exact distance.

    The distance is computed from the closest-point parameterization: the
    largest root t of  sum_i (e_i y_i)^2 / (t + e_i^2)^2 = 1  gives the foot
    point x_i = e_i^2 y_i / (t + e_i^2).  The root is bracketed and bisected,
    which is branch-free and robust for points near the center or the axes
    (exact zero coordinates are nudged by 1e-12 of the smallest semi-axis).
    """

    center: tuple[float, ...]
    semi_axes: tuple[float, ...]
    reach_inward_override: float | None = None
    reach_outward_override: float | None = None

    def __post_init__(self):
        self.center = tuple(float(c) for c in self.center)
        self.semi_axes = tuple(float(s) for s in self.semi_axes)
        if len(self.semi_axes) != len(self.center):
            raise GeometryError("semi_axes and center dimensions differ")
        if self.dim < 2:
            raise GeometryError("ellipse needs dimension >= 2")
        if any(s <= 0 for s in self.semi_axes):
            raise GeometryError("semi-axes must be positive")

    def sdf(self, points):
        p = _as_points(points, self.dim)
        e = np.asarray(self.semi_axes)
        y = np.abs(p - np.asarray(self.center))
        y = np.maximum(y, 1e-12 * e.min())

        ey_sq = (e * y) ** 2
        e_sq = e**2
        e_min_sq = float(e_sq.min())

        inside = np.sum((y / e) ** 2, axis=-1) <= 1.0

        # Bracket the largest root of the decreasing function
        #   F(t) = sum(ey_sq / (t + e_sq)^2) - 1   on (-e_min^2, inf).
        lo = np.full(y.shape[:-1], -e_min_sq * (1.0 - 1e-14))
        hi = np.linalg.norm(e * y, axis=-1) + float(e_sq.max())
        with np.errstate(divide="ignore", over="ignore"):
            for _ in range(108):
                mid = 0.5 * (lo + hi)
                f = np.sum(ey_sq / (mid[..., None] + e_sq) ** 2, axis=-1)
                take_lo = f >= 1.0
                lo = np.where(take_lo, mid, lo)
                hi = np.where(take_lo, hi, mid)
        t = 0.5 * (lo + hi)
        foot = e_sq * y / (t[..., None] + e_sq)
        dist = np.linalg.norm(foot - y, axis=-1)
        return np.where(inside, -dist, dist)

    @property
    def reach_inward(self):
        if self.reach_inward_override is not None:
            return self.reach_inward_override
        e = self.semi_axes
        return min(e) ** 2 / max(e)  # smallest radius of curvature

    @property
    def reach_outward(self):
        if self.reach_outward_override is not None:
            return self.reach_outward_override
        return math.inf

    def bounding_box(self):
        c = np.asarray(self.center)
        e = np.asarray(self.semi_axes)
        return c - e, c + e


@dataclass
class RoundedBox(Shape):
    """Box with filleted corners.  ``corner_radius`` must be positive so the
    boundary is C1; inward offsets shrink the fillet and stay smooth down to
    depth ``corner_radius`` exactly."""

    center: tuple[float, ...]
    half_widths: tuple[float, ...]
    corner_radius: float
    reach_inward_override: float | None = None
    reach_outward_override: float | None = None

    def __post_init__(self):
        self.center = tuple(float(c) for c in self.center)
        self.half_widths = tuple(float(w) for w in self.half_widths)
        self.corner_radius = float(self.corner_radius)
        if len(self.half_widths) != len(self.center):
            raise GeometryError("half_widths and center dimensions differ")
        if any(w <= 0 for w in self.half_widths):
            raise GeometryError("half-widths must be positive")
        if not 0 < self.corner_radius <= min(self.half_widths):
            raise GeometryError(
                "corner_radius must lie in (0, min(half_widths)]"
            )

    def sdf(self, points):
        p = _as_points(points, self.dim)
        core = np.asarray(self.half_widths) - self.corner_radius
        q = np.abs(p - np.asarray(self.center)) - core
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
        inside = np.minimum(np.max(q, axis=-1), 0.0)
        return outside + inside - self.corner_radius

    @property
    def reach_inward(self):
        if self.reach_inward_override is not None:
            return self.reach_inward_override
        return self.corner_radius

    @property
    def reach_outward(self):
        if self.reach_outward_override is not None:
            return self.reach_outward_override
        return math.inf

    def bounding_box(self):
        c = np.asarray(self.center)
        w = np.asarray(self.half_widths)
        return c - w, c + w


@dataclass
class Kidney(Shape):
    """Non-convex bent tube: all points within ``scale/2`` of a circular arc
    of radius ``scale`` spanning ``+-bend`` radians (arc in the x-y plane for
    3d).  The signed distance is closed form: distance to the arc minus the
    tube half-width.

    Inward reach equals the half-width (the arc is the medial axis); outward
    reach is ``scale * min(1, sin(bend)) - scale/2`` from the medial geometry
    of the complement (the singular set is the bisector ray behind the arc,
    plus the arc's axis in 3d).  ``bend`` is restricted so that value is
    positive.
    """

    center: tuple[float, ...]
    scale: float
    bend: float
    reach_inward_override: float | None = None
    reach_outward_override: float | None = None

    def __post_init__(self):
        self.center = tuple(float(c) for c in self.center)
        self.scale = float(self.scale)
        self.bend = float(self.bend)
        if self.dim not in (2, 3):
            raise GeometryError("kidney needs dimension 2 or 3")
        if self.scale <= 0:
            raise GeometryError("kidney scale must be positive")
        if not 0 < self.bend < math.pi:
            raise GeometryError("kidney bend must lie in (0, pi)")
        if self._outward_reach_analytic() <= 0:
            raise GeometryError(
                "kidney bend too shallow or too deep: the tube half-width "
                "exceeds the complement's medial distance "
                "(need scale*min(1, sin(bend)) > scale/2)"
            )

    @property
    def arc_radius(self) -> float:
        return self.scale

    @property
    def half_width(self) -> float:
        return 0.5 * self.scale

    def _outward_reach_analytic(self) -> float:
        return self.arc_radius * min(1.0, math.sin(self.bend)) - self.half_width

    def sdf(self, points):
        p = _as_points(points, self.dim) - np.asarray(self.center)
        x = p[..., 0]
        y = p[..., 1]
        z = p[..., 2] if self.dim == 3 else np.zeros_like(x)
        r = self.arc_radius
        rxy = np.hypot(x, y)
        in_span = np.abs(np.arctan2(y, x)) <= self.bend
        d_arc = np.hypot(rxy - r, z)
        ex = r * math.cos(self.bend)
        ey = r * math.sin(self.bend)
        d_end = np.sqrt((x - ex) ** 2 + (np.abs(y) - ey) ** 2 + z**2)
        return np.where(in_span, d_arc, d_end) - self.half_width

    @property
    def reach_inward(self):
        if self.reach_inward_override is not None:
            return self.reach_inward_override
        return self.half_width

    @property
    def reach_outward(self):
        if self.reach_outward_override is not None:
            return self.reach_outward_override
        return self._outward_reach_analytic()

    def bounding_box(self):
        c = np.asarray(self.center)
        ext = self.arc_radius + self.half_width
        lo = np.full(self.dim, -ext)
        hi = np.full(self.dim, ext)
        return c + lo, c + hi


@dataclass
class RegionMask:
    """Boolean cell mask on a grid.  ``measure`` is cell count times volume."""

    grid: "Grid"
    mask: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.mask = np.ascontiguousarray(self.mask, dtype=bool)
        if self.mask.shape != tuple(self.grid.shape):
            raise GeometryError(
                f"mask shape {self.mask.shape} does not match grid {self.grid.shape}"
            )

    @property
    def cell_count(self) -> int:
        return int(self.mask.sum())

    @property
    def measure(self) -> float:
        return self.cell_count * self.grid.cell_volume

    def complement(self, label: str = "") -> "RegionMask":
        return RegionMask(self.grid, ~self.mask, label or f"not({self.label})")

    def issubset(self, other: "RegionMask") -> bool:
        return bool(np.all(~self.mask | other.mask))

    def to_cell_list(self) -> np.ndarray:
        """Indices of member cells, shape (count, dim), row-major order."""
        return np.argwhere(self.mask)

    def save_cells(self, path) -> None:
        idx = self.to_cell_list()
        header = ",".join(f"i{k}" for k in range(idx.shape[1] if idx.size else self.grid.dim))
        np.savetxt(path, idx, fmt="%d", delimiter=",", header=header, comments="")


def offset_region(shape: Shape, rho: float, grid: "Grid", label: str = "") -> RegionMask:
    """Cells whose centers lie in the offset region ``{sdf <= rho}``.

    ``rho < 0`` shrinks, ``rho > 0`` grows.  The offset must stay strictly
    within the shape's stored reach in that direction.
    """
    rho = float(rho)
    if rho < 0 and -rho >= shape.reach_inward:
        raise GeometryError(
            f"offset exceeds injectivity radius: |{rho}| >= inward reach "
            f"{shape.reach_inward}"
        )
    if rho > 0 and rho >= shape.reach_outward:
        raise GeometryError(
            f"offset exceeds injectivity radius: {rho} >= outward reach "
            f"{shape.reach_outward}"
        )
    vals = shape.sdf(grid.cell_centers())
    return RegionMask(grid, vals <= rho, label or f"offset({rho:g})")


def _fd_gradient(shape: Shape, points: np.ndarray, step: float) -> np.ndarray:
    """Central-difference gradient of the signed distance at ``points``."""
    p = np.asarray(points, dtype=float)
    g = np.empty_like(p)
    for k in range(p.shape[-1]):
        dp = np.zeros(p.shape[-1])
        dp[k] = step
        g[..., k] = (shape.sdf(p + dp) - shape.sdf(p - dp)) / (2.0 * step)
    return g


def _project_to_boundary(shape: Shape, points: np.ndarray, step: float,
                         iterations: int = 3) -> np.ndarray:
    """Walk points onto the zero level set along the distance gradient."""
    x = np.asarray(points, dtype=float).copy()
    for _ in range(iterations):
        s = shape.sdf(x)
        g = _fd_gradient(shape, x, step)
        norm = np.linalg.norm(g, axis=-1, keepdims=True)
        norm = np.where(norm < 1e-12, 1.0, norm)
        x -= s[..., None] * g / norm
    return x


def boundary_gap(inner: Shape, outer: Shape, grid: "Grid") -> float:
    """Distance from the boundary of ``inner`` to the boundary of ``outer``.

    ``inner`` must be strictly contained in ``outer``.  Boundary points of
    ``inner`` are sampled by projecting near-boundary cell centers onto the
    zero level set, so the result carries an O(h) sampling error.
    """
    centers = grid.cell_centers()
    h = float(max(grid.spacing))
    s_in = inner.sdf(centers)
    near = np.abs(s_in) < 2.0 * h
    if not np.any(near):
        raise GeometryError("grid does not resolve the inner boundary")
    pts = centers[near].reshape(-1, grid.dim)
    bpts = _project_to_boundary(inner, pts, step=float(min(grid.spacing)) / 64.0)
    # keep points that actually landed on the boundary
    ok = np.abs(inner.sdf(bpts)) < 1e-6 * h
    if not np.any(ok):
        raise GeometryError("boundary projection failed for the inner shape")
    vals = outer.sdf(bpts[ok])
    if np.any(vals >= 0):
        raise GeometryError("shapes intersect: inner boundary reaches outside outer")
    return float(np.min(-vals))


@dataclass
class DomainSpec:
    """Box domain with an absorbing obstacle and a probe region inside it.

    ``omega`` is the box, ``obstacle`` the absorbing region strictly inside
    it, ``subdomain`` the deep probe region strictly inside the obstacle.
    """

    omega_lower: tuple[float, ...]
    omega_upper: tuple[float, ...]
    obstacle: Shape
    subdomain: Shape

    def __post_init__(self):
        self.omega_lower = tuple(float(v) for v in self.omega_lower)
        self.omega_upper = tuple(float(v) for v in self.omega_upper)
        m = len(self.omega_lower)
        if len(self.omega_upper) != m:
            raise GeometryError("omega corner dimensions differ")
        if m not in (1, 2, 3):
            raise GeometryError("dimension must be 1, 2 or 3")
        if any(u <= l for l, u in zip(self.omega_lower, self.omega_upper)):
            raise GeometryError("omega_upper must exceed omega_lower componentwise")
        if self.obstacle.dim != m or self.subdomain.dim != m:
            raise GeometryError("shape dimensions do not match the box")
        if self.wall_gap() <= 0:
            raise GeometryError("obstacle is not strictly inside the box")
        self._check_subdomain_containment()

    @property
    def dim(self) -> int:
        return len(self.omega_lower)

    def diameter(self) -> float:
        span = np.asarray(self.omega_upper) - np.asarray(self.omega_lower)
        return float(np.linalg.norm(span))

    def wall_gap(self) -> float:
        """Lower bound for the gap between the obstacle and the box walls
        (exact for shapes that fill their bounding box in each axis)."""
        lo, hi = self.obstacle.bounding_box()
        margins = np.concatenate(
            [lo - np.asarray(self.omega_lower), np.asarray(self.omega_upper) - hi]
        )
        return float(margins.min())

    def _check_subdomain_containment(self):
        lo, hi = self.subdomain.bounding_box()
        scale = float(np.max(hi - lo))
        axes = [np.linspace(l, u, 8) for l, u in zip(lo, hi)]
        lattice = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)
        bpts = _project_to_boundary(self.subdomain, lattice, step=scale / 256.0)
        ok = np.abs(self.subdomain.sdf(bpts)) < 1e-6 * scale
        if not np.any(ok):
            raise GeometryError("cannot sample the subdomain boundary")
        if np.any(self.obstacle.sdf(bpts[ok]) >= 0):
            raise GeometryError("subdomain is not strictly inside the obstacle")


def constant_a(domain: DomainSpec, grid: "Grid") -> float:
    """Shell budget: min of the subdomain-to-obstacle boundary gap and the
    subdomain's reach in both offset directions."""
    gap = boundary_gap(domain.subdomain, domain.obstacle, grid)
    return min(gap, domain.subdomain.reach_inward, domain.subdomain.reach_outward)


def shell_family(domain: DomainSpec, gamma: float, n: int, grid: "Grid",
                 a: float | None = None) -> list[RegionMask]:
    """Nested interpolation regions between the obstacle and the subdomain.

    Returns ``n + 1`` masks: the obstacle itself, then outward offsets of the
    subdomain at distances ``gamma*a*(1 - j/n)`` for j = 1..n (the last one is
    the subdomain).  Consecutive regions are separated by ``gamma*a/n`` up to
    grid error.
    """
    if not 0 < gamma < 1:
        raise GeometryError("gamma must lie in (0, 1)")
    if n < 1:
        raise GeometryError("need at least one shell")
    if a is None:
        a = constant_a(domain, grid)
    shells = [offset_region(domain.obstacle, 0.0, grid, label="U0")]
    for j in range(1, n + 1):
        rho = gamma * a * (1.0 - j / n)
        shells.append(offset_region(domain.subdomain, rho, grid, label=f"U{j}"))
    for tighter, wider in zip(shells[1:], shells[:-1]):
        if not tighter.issubset(wider):
            raise GeometryError(
                f"shell nesting violated between {wider.label} and {tighter.label}"
            )
    return shells


def estimate_reach(shape: Shape, direction: str, rho_max: float,
                   n_samples: int = 2000, seed: int = 0,
                   tol: float | None = None) -> float:
    """Sampling estimate of the injectivity radius in one offset direction.

    Boundary points are sampled by projecting random points from the bounding
    box; a trial offset ``rho`` is accepted when marching every sample a
    distance ``rho`` along its outward normal (inward for ``direction='inward'``)
    lands at signed distance ``+-rho``.  Bisection returns the largest
    accepted value.  This is a Monte-Carlo check: it can overestimate when the
    pinch region is missed by the samples.
    """
    if direction not in ("inward", "outward"):
        raise GeometryError("direction must be 'inward' or 'outward'")
    lo_box, hi_box = shape.bounding_box()
    scale = float(np.max(hi_box - lo_box))
    if tol is None:
        tol = 1e-6 * scale
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo_box - 0.1 * scale, hi_box + 0.1 * scale,
                      size=(n_samples, shape.dim))
    bpts = _project_to_boundary(shape, pts, step=scale / 1024.0, iterations=4)
    ok = np.abs(shape.sdf(bpts)) < tol
    bpts = bpts[ok]
    if len(bpts) < n_samples // 4:
        raise GeometryError("boundary sampling failed")
    normals = _fd_gradient(shape, bpts, step=scale / 4096.0)
    normals /= np.linalg.norm(normals, axis=-1, keepdims=True)
    sign = 1.0 if direction == "outward" else -1.0

    def accepted(rho: float) -> bool:
        probe = bpts + sign * rho * normals
        return bool(np.all(np.abs(shape.sdf(probe) - sign * rho) < tol + 1e-9 * rho))

    lo, hi = 0.0, float(rho_max)
    if accepted(hi):
        return hi
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if accepted(mid):
            lo = mid
        else:
            hi = mid
    return lo
