"""Geometry oracle tests.

Signed distances are checked against dense polyline oracles built from the
shapes' defining curves (never from the sdf under test), region masks against
analytic areas/volumes and scipy's Euclidean distance transform, and every
sdf against the eikonal property |grad d| = 1 away from the medial axis.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obstacleheat.discretize import build_grid
from obstacleheat.geometry import (
    Ball,
    DomainSpec,
    Ellipse,
    GeometryError,
    Kidney,
    RegionMask,
    RoundedBox,
    boundary_gap,
    constant_a,
    estimate_reach,
    offset_region,
    shell_family,
)

RNG = np.random.default_rng(20240817)


def min_dist_to_points(queries: np.ndarray, cloud: np.ndarray) -> np.ndarray:
    """Brute-force distance from each query to a point cloud."""
    diff = queries[:, None, :] - cloud[None, :, :]
    return np.min(np.linalg.norm(diff, axis=-1), axis=1)


def ellipse_boundary(center, semi_axes, n=8000) -> np.ndarray:
    t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    return np.stack(
        [center[0] + semi_axes[0] * np.cos(t),
         center[1] + semi_axes[1] * np.sin(t)],
        axis=-1,
    )


def kidney_arc(shape: Kidney, n=20000) -> np.ndarray:
    """Dense polyline of the medial arc (2-d points, padded with z=0 in 3-d)."""
    t = np.linspace(-shape.bend, shape.bend, n)
    pts = np.stack(
        [shape.arc_radius * np.cos(t), shape.arc_radius * np.sin(t)], axis=-1
    )
    if shape.dim == 3:
        pts = np.concatenate([pts, np.zeros((n, 1))], axis=-1)
    return pts + np.asarray(shape.center)


# ---------------------------------------------------------------------------
# signed distances
# ---------------------------------------------------------------------------

class TestBallSdf:
    def test_exact_values(self):
        b = Ball(center=(0.5, 0.5), radius=0.3)
        assert b.sdf(np.array([0.5, 0.5])) == pytest.approx(-0.3)
        assert b.sdf(np.array([0.8, 0.5])) == pytest.approx(0.0, abs=1e-15)
        assert b.sdf(np.array([1.0, 0.5])) == pytest.approx(0.2)

    def test_batch_shapes(self):
        b = Ball(center=(0.0, 0.0, 0.0), radius=1.0)
        pts = RNG.normal(size=(7, 5, 3))
        out = b.sdf(pts)
        assert out.shape == (7, 5)

    def test_rejects_wrong_dimension(self):
        b = Ball(center=(0.0, 0.0), radius=1.0)
        with pytest.raises(GeometryError):
            b.sdf(np.zeros((4, 3)))


class TestEllipseSdf:
    def test_against_boundary_polyline(self):
        e = Ellipse(center=(0.4, 0.6), semi_axes=(0.3, 0.18))
        cloud = ellipse_boundary(e.center, e.semi_axes)
        pts = RNG.uniform(-0.2, 1.2, size=(300, 2))
        oracle = min_dist_to_points(pts, cloud)
        keep = oracle > 0.02  # polyline resolution degrades near the curve
        got = np.abs(e.sdf(pts[keep]))
        assert np.max(np.abs(got - oracle[keep])) < 2e-4

    def test_sign_convention(self):
        e = Ellipse(center=(0.0, 0.0), semi_axes=(2.0, 1.0))
        assert e.sdf(np.array([0.0, 0.0])) < 0
        assert e.sdf(np.array([3.0, 0.0])) > 0
        # on-axis exterior distances are exact
        assert e.sdf(np.array([3.0, 0.0])) == pytest.approx(1.0, abs=1e-10)
        assert e.sdf(np.array([0.0, 2.0])) == pytest.approx(1.0, abs=1e-10)

    def test_circle_reduces_to_ball(self):
        e = Ellipse(center=(0.5, 0.5), semi_axes=(0.25, 0.25))
        b = Ball(center=(0.5, 0.5), radius=0.25)
        pts = RNG.uniform(0.0, 1.0, size=(200, 2))
        assert np.max(np.abs(e.sdf(pts) - b.sdf(pts))) < 1e-9

    def test_eikonal(self):
        e = Ellipse(center=(0.0, 0.0), semi_axes=(0.3, 0.15))
        pts = RNG.uniform(-0.6, 0.6, size=(400, 2))
        # stay away from the boundary and the medial segment on the x-axis
        keep = (np.abs(e.sdf(pts)) > 0.03) & (np.abs(pts[:, 1]) > 0.03)
        pts = pts[keep]
        h = 1e-6
        grad = np.stack(
            [
                (e.sdf(pts + [h, 0]) - e.sdf(pts - [h, 0])) / (2 * h),
                (e.sdf(pts + [0, h]) - e.sdf(pts - [0, h])) / (2 * h),
            ],
            axis=-1,
        )
        norms = np.linalg.norm(grad, axis=-1)
        assert np.max(np.abs(norms - 1.0)) < 1e-3

    def test_ellipsoid_axis_points(self):
        e = Ellipse(center=(0.0, 0.0, 0.0), semi_axes=(0.3, 0.2, 0.1))
        assert e.sdf(np.array([0.5, 0.0, 0.0])) == pytest.approx(0.2, abs=1e-10)
        assert e.sdf(np.array([0.0, 0.0, 0.3])) == pytest.approx(0.2, abs=1e-10)


class TestRoundedBoxSdf:
    def test_center_depth_is_min_half_width(self):
        rb = RoundedBox(center=(0.0, 0.0), half_widths=(0.3, 0.2),
                        corner_radius=0.05)
        assert rb.sdf(np.array([0.0, 0.0])) == pytest.approx(-0.2)

    def test_face_and_corner_distances(self):
        rb = RoundedBox(center=(0.0, 0.0), half_widths=(0.3, 0.2),
                        corner_radius=0.05)
        # outside a flat face
        assert rb.sdf(np.array([0.5, 0.0])) == pytest.approx(0.2)
        # outside the filleted corner: distance to the fillet circle center
        corner = np.array([0.25, 0.15])  # fillet center
        p = corner + 0.3 / math.sqrt(2.0)
        assert rb.sdf(p) == pytest.approx(0.3 - 0.05, abs=1e-12)

    def test_corner_radius_validation(self):
        with pytest.raises(GeometryError):
            RoundedBox(center=(0, 0), half_widths=(0.3, 0.2), corner_radius=0.0)
        with pytest.raises(GeometryError):
            RoundedBox(center=(0, 0), half_widths=(0.3, 0.2), corner_radius=0.25)


class TestKidneySdf:
    def test_against_arc_polyline_2d(self):
        k = Kidney(center=(0.5, 0.5), scale=0.22, bend=1.9)
        arc = kidney_arc(k)
        pts = RNG.uniform(0.0, 1.0, size=(300, 2))
        oracle = min_dist_to_points(pts, arc) - k.half_width
        got = k.sdf(pts)
        assert np.max(np.abs(got - oracle)) < 1e-6

    def test_against_arc_polyline_3d(self):
        k = Kidney(center=(0.5, 0.5, 0.5), scale=0.2, bend=2.0)
        arc = kidney_arc(k)
        pts = RNG.uniform(0.0, 1.0, size=(200, 3))
        oracle = min_dist_to_points(pts, arc) - k.half_width
        got = k.sdf(pts)
        assert np.max(np.abs(got - oracle)) < 1e-6

    def test_nonconvexity(self):
        # the midpoint of two deep interior points lies outside the tube
        k = Kidney(center=(0.0, 0.0), scale=0.2, bend=2.2)
        p = np.array([0.2 * math.cos(2.0), 0.2 * math.sin(2.0)])
        q = np.array([p[0], -p[1]])
        assert k.sdf(p) < -0.5 * k.half_width
        assert k.sdf(q) < -0.5 * k.half_width
        assert k.sdf(0.5 * (p + q)) > 0

    def test_bend_validation(self):
        # sin(bend) too small: the complement's medial tube collapses
        with pytest.raises(GeometryError):
            Kidney(center=(0, 0), scale=0.2, bend=0.3)
        with pytest.raises(GeometryError):
            Kidney(center=(0, 0), scale=0.2, bend=3.5)


@given(
    shift=st.floats(-0.5, 0.5),
    radius=st.floats(0.05, 0.5),
    seed=st.integers(0, 2**31 - 1),
)
@settings(max_examples=40)
def test_sdf_is_one_lipschitz(shift, radius, seed):
    """|d(p) - d(q)| <= |p - q| for every shape in the catalogue."""
    rng = np.random.default_rng(seed)
    shapes = [
        Ball(center=(shift, 0.0), radius=radius),
        Ellipse(center=(shift, 0.0), semi_axes=(radius, 0.6 * radius)),
        RoundedBox(center=(shift, 0.0), half_widths=(radius, radius),
                   corner_radius=0.5 * radius),
        Kidney(center=(shift, 0.0), scale=radius, bend=2.0),
    ]
    p, q = rng.uniform(-1.5, 1.5, size=(2, 2))
    gap = np.linalg.norm(p - q)
    for shape in shapes:
        assert abs(shape.sdf(p) - shape.sdf(q)) <= gap + 1e-9


# ---------------------------------------------------------------------------
# masks and offsets
# ---------------------------------------------------------------------------

class TestRegionMask:
    def test_measure_counts_cells(self):
        grid = build_grid((0, 0), (1, 1), (8, 8))
        mask = np.zeros((8, 8), dtype=bool)
        mask[:2, :3] = True
        region = RegionMask(grid, mask, label="patch")
        assert region.cell_count == 6
        assert region.measure == pytest.approx(6 / 64)

    def test_complement_and_subset(self):
        grid = build_grid((0, 0), (1, 1), (8, 8))
        small = RegionMask(grid, np.eye(8, dtype=bool))
        big = RegionMask(grid, np.ones((8, 8), dtype=bool))
        assert small.issubset(big)
        assert not big.issubset(small)
        assert small.complement().cell_count == 64 - 8

    def test_shape_mismatch_rejected(self):
        grid = build_grid((0, 0), (1, 1), (8, 8))
        with pytest.raises(GeometryError):
            RegionMask(grid, np.ones((4, 4), dtype=bool))

    def test_save_cells_round_trip(self, tmp_path):
        grid = build_grid((0, 0), (1, 1), (8, 8))
        mask = np.zeros((8, 8), dtype=bool)
        mask[1, 2] = mask[5, 7] = True
        path = tmp_path / "cells.csv"
        RegionMask(grid, mask).save_cells(path)
        rows = path.read_text().strip().splitlines()
        assert rows[0] == "i0,i1"
        assert rows[1:] == ["1,2", "5,7"]


class TestOffsetRegion:
    def test_ball_mask_area_converges(self):
        grid = build_grid((0, 0), (1, 1), (256, 256))
        region = offset_region(Ball(center=(0.5, 0.5), radius=0.3), 0.0, grid)
        assert region.measure == pytest.approx(math.pi * 0.09, rel=0.01)

    def test_kidney_mask_area(self):
        # tube area: annular sector 4*bend*r*w plus two half-disc caps
        k = Kidney(center=(0.5, 0.5), scale=0.2, bend=2.0)
        r, w = k.arc_radius, k.half_width
        grid = build_grid((0, 0), (1, 1), (256, 256))
        want = 4.0 * k.bend * r * w + math.pi * w * w
        region = offset_region(k, 0.0, grid)
        assert region.measure == pytest.approx(want, rel=0.01)

    def test_offsets_nest(self):
        grid = build_grid((0, 0), (1, 1), (128, 128))
        shape = Ball(center=(0.5, 0.5), radius=0.3)
        tight = offset_region(shape, -0.1, grid)
        mid = offset_region(shape, 0.0, grid)
        loose = offset_region(shape, 0.1, grid)
        assert tight.issubset(mid) and mid.issubset(loose)
        assert tight.cell_count < mid.cell_count < loose.cell_count

    def test_offset_of_ball_is_smaller_ball(self):
        grid = build_grid((0, 0), (1, 1), (128, 128))
        shrunk = offset_region(Ball(center=(0.5, 0.5), radius=0.3), -0.1, grid)
        direct = offset_region(Ball(center=(0.5, 0.5), radius=0.2), 0.0, grid)
        assert np.array_equal(shrunk.mask, direct.mask)

    def test_reach_is_enforced(self):
        grid = build_grid((0, 0), (1, 1), (32, 32))
        ball = Ball(center=(0.5, 0.5), radius=0.3)
        with pytest.raises(GeometryError):
            offset_region(ball, -0.3, grid)  # would swallow the center
        kidney = Kidney(center=(0.5, 0.5), scale=0.2, bend=2.0)
        with pytest.raises(GeometryError):
            offset_region(kidney, kidney.reach_outward, grid)

    def test_matches_distance_transform(self):
        # erosion depth measured by scipy's EDT agrees with the sdf offset
        from scipy.ndimage import distance_transform_edt

        grid = build_grid((0, 0), (1, 1), (256, 256))
        shape = Ball(center=(0.5, 0.5), radius=0.3)
        full = offset_region(shape, 0.0, grid)
        rho = 0.06
        shrunk = offset_region(shape, -rho, grid)
        depth = distance_transform_edt(full.mask, sampling=grid.spacing)
        h = max(grid.spacing)
        # every cell of the shrunk region sits at least rho (minus grid
        # slack) deep inside the full region, and no cell deeper than
        # rho + slack was left out
        assert depth[shrunk.mask].min() >= rho - 2 * h
        assert depth[~shrunk.mask].max() <= rho + 2 * h


# ---------------------------------------------------------------------------
# gaps, domains, shells
# ---------------------------------------------------------------------------

class TestBoundaryGap:
    def test_concentric_balls_exact(self):
        grid = build_grid((0, 0), (1, 1), (128, 128))
        inner = Ball(center=(0.5, 0.5), radius=0.15)
        outer = Ball(center=(0.5, 0.5), radius=0.3)
        h = max(grid.spacing)
        assert boundary_gap(inner, outer, grid) == pytest.approx(
            0.15, abs=2 * h
        )

    def test_offcenter_balls(self):
        grid = build_grid((0, 0), (1, 1), (128, 128))
        inner = Ball(center=(0.45, 0.5), radius=0.1)
        outer = Ball(center=(0.5, 0.5), radius=0.3)
        # closest approach: 0.3 - (0.05 + 0.1)
        assert boundary_gap(inner, outer, grid) == pytest.approx(
            0.15, abs=2 * max(grid.spacing)
        )

    def test_ellipse_in_ball_polyline_oracle(self):
        grid = build_grid((0, 0), (1, 1), (128, 128))
        inner = Ellipse(center=(0.5, 0.5), semi_axes=(0.15, 0.08))
        outer = Ball(center=(0.5, 0.5), radius=0.3)
        cloud = ellipse_boundary(inner.center, inner.semi_axes)
        oracle = float(
            np.min(0.3 - np.linalg.norm(cloud - np.array([0.5, 0.5]), axis=-1))
        )
        got = boundary_gap(inner, outer, grid)
        assert got == pytest.approx(oracle, abs=2 * max(grid.spacing))

    def test_intersecting_shapes_rejected(self):
        grid = build_grid((0, 0), (1, 1), (64, 64))
        inner = Ball(center=(0.5, 0.5), radius=0.35)
        outer = Ball(center=(0.5, 0.5), radius=0.3)
        with pytest.raises(GeometryError):
            boundary_gap(inner, outer, grid)


def reference_domain(dim=2) -> DomainSpec:
    c = (0.5,) * dim
    return DomainSpec(
        omega_lower=(0.0,) * dim,
        omega_upper=(1.0,) * dim,
        obstacle=Ball(center=c, radius=0.3),
        subdomain=Ball(center=c, radius=0.15),
    )


class TestDomainSpec:
    def test_wall_gap_and_diameter(self):
        dom = reference_domain()
        assert dom.wall_gap() == pytest.approx(0.2)
        assert dom.diameter() == pytest.approx(math.sqrt(2.0))

    def test_obstacle_must_clear_the_walls(self):
        with pytest.raises(GeometryError):
            DomainSpec(
                omega_lower=(0, 0),
                omega_upper=(1, 1),
                obstacle=Ball(center=(0.5, 0.5), radius=0.6),
                subdomain=Ball(center=(0.5, 0.5), radius=0.15),
            )

    def test_subdomain_must_sit_inside_obstacle(self):
        with pytest.raises(GeometryError):
            DomainSpec(
                omega_lower=(0, 0),
                omega_upper=(1, 1),
                obstacle=Ball(center=(0.5, 0.5), radius=0.3),
                subdomain=Ball(center=(0.7, 0.5), radius=0.15),
            )

    def test_constant_a_reference_geometry(self):
        dom = reference_domain()
        grid = build_grid((0, 0), (1, 1), (128, 128))
        # gap 0.15 ties with the subdomain's inward reach 0.15
        assert constant_a(dom, grid) == pytest.approx(0.15, abs=1e-3)


class TestShellFamily:
    def test_count_labels_and_nesting(self):
        dom = reference_domain()
        grid = build_grid((0, 0), (1, 1), (128, 128))
        shells = shell_family(dom, gamma=0.4, n=3, grid=grid, a=0.15)
        assert [s.label for s in shells] == ["U0", "U1", "U2", "U3"]
        for tight, wide in zip(shells[1:], shells[:-1]):
            assert tight.issubset(wide)
            assert tight.cell_count < wide.cell_count

    def test_last_shell_is_the_subdomain(self):
        dom = reference_domain()
        grid = build_grid((0, 0), (1, 1), (128, 128))
        shells = shell_family(dom, gamma=0.4, n=2, grid=grid, a=0.15)
        direct = offset_region(dom.subdomain, 0.0, grid)
        assert np.array_equal(shells[-1].mask, direct.mask)

    def test_gaps_match_request(self):
        from scipy.ndimage import distance_transform_edt

        dom = reference_domain()
        grid = build_grid((0, 0), (1, 1), (128, 128))
        gamma, n, a = 0.4, 2, 0.15
        sigma = gamma * a / n
        shells = shell_family(dom, gamma, n, grid, a=a)
        h = max(grid.spacing)
        for tight, wide in zip(shells[2:], shells[1:-1]):
            depth = distance_transform_edt(wide.mask, sampling=grid.spacing)
            assert depth[tight.mask].min() >= sigma - 2 * h

    def test_parameter_validation(self):
        dom = reference_domain()
        grid = build_grid((0, 0), (1, 1), (64, 64))
        with pytest.raises(GeometryError):
            shell_family(dom, gamma=1.0, n=2, grid=grid)
        with pytest.raises(GeometryError):
            shell_family(dom, gamma=0.4, n=0, grid=grid)


class TestEstimateReach:
    def test_ball_inward_reach_is_radius(self):
        ball = Ball(center=(0.5, 0.5), radius=0.2)
        est = estimate_reach(ball, "inward", rho_max=0.35)
        assert est == pytest.approx(0.2, rel=0.02)

    def test_ball_outward_reach_unbounded(self):
        ball = Ball(center=(0.5, 0.5), radius=0.2)
        assert estimate_reach(ball, "outward", rho_max=5.0) == 5.0

    def test_ellipse_inward_reach_near_curvature_limit(self):
        e = Ellipse(center=(0.0, 0.0), semi_axes=(0.3, 0.15))
        analytic = 0.15**2 / 0.3
        est = estimate_reach(e, "inward", rho_max=0.14, n_samples=4000)
        # the sampled estimate may overshoot slightly when no sample lands
        # exactly on the pinch; it must never be far below the true value
        assert analytic * 0.9 <= est <= analytic * 1.4

    def test_kidney_reaches(self):
        k = Kidney(center=(0.0, 0.0), scale=0.2, bend=2.0)
        est_in = estimate_reach(k, "inward", rho_max=0.15)
        assert est_in == pytest.approx(k.half_width, rel=0.05)
        est_out = estimate_reach(k, "outward", rho_max=0.2)
        assert est_out == pytest.approx(k.reach_outward, rel=0.15)

    def test_direction_validated(self):
        with pytest.raises(GeometryError):
            estimate_reach(Ball(center=(0, 0), radius=1.0), "up", 1.0)
