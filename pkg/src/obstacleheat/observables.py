"""Norms and space-time functionals extracted from an evolution record.

Region norms are cell sums scaled by the cell volume (midpoint quadrature).
Time integrals are trapezoid sums over the recorded snapshot times; window
endpoints that fall between snapshots are handled by linear interpolation of
the integrand, so short windows remain meaningful as long as they contain a
few snapshots.
"""

from __future__ import annotations

import csv
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .discretize import Field
from .evolve import SnapshotStore
from .geometry import RegionMask


def l2_sq(field: Field, region: RegionMask | None = None) -> float:
    """Squared L2 norm of the field over a region (whole box if None)."""
    vals = field.values
    if region is None:
        return float(np.sum(vals * vals) * field.grid.cell_volume)
    if region.mask.shape != vals.shape:
        raise ValueError("region mask does not match the field grid")
    sel = vals[region.mask]
    return float(np.sum(sel * sel) * field.grid.cell_volume)


def sup_abs(field: Field, region: RegionMask | None = None) -> float:
    """Max of |u| over a region's cell centers."""
    vals = field.values if region is None else field.values[region.mask]
    if vals.size == 0:
        raise ValueError("region contains no cells")
    return float(np.max(np.abs(vals)))


@dataclass
class NormSeries:
    """A scalar time series, e.g. a squared region norm along the evolution."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.times.shape != self.values.shape or self.times.ndim != 1:
            raise ValueError("times and values must be matching 1-d arrays")
        if self.times.size == 0:
            raise ValueError("series must contain at least one sample")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def sup(self) -> float:
        return float(np.max(self.values))

    @property
    def argmax_time(self) -> float:
        return float(self.times[int(np.argmax(self.values))])

    def at(self, t: float) -> float:
        """Linearly interpolated value; clamped outside the recorded range."""
        return float(np.interp(t, self.times, self.values))

    def integral(self, t0: float | None = None, t1: float | None = None) -> float:
        """Trapezoid integral over [t0, t1] with interpolated endpoints."""
        lo = float(self.times[0]) if t0 is None else float(t0)
        hi = float(self.times[-1]) if t1 is None else float(t1)
        if hi < lo:
            raise ValueError("window is reversed")
        lo = max(lo, float(self.times[0]))
        hi = min(hi, float(self.times[-1]))
        if hi <= lo:
            return 0.0
        i0 = bisect_right(self.times, lo)
        i1 = bisect_left(self.times, hi)
        ts = np.concatenate(([lo], self.times[i0:i1], [hi]))
        vs = np.concatenate(
            ([self.at(lo)], self.values[i0:i1], [self.at(hi)])
        )
        return float(np.trapezoid(vs, ts))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", self.label or "value"])
            for t, v in zip(self.times, self.values):
                writer.writerow([repr(float(t)), repr(float(v))])


def _region_selector(store: SnapshotStore, region: RegionMask) -> np.ndarray:
    """Boolean index picking the region's cells out of a stored snapshot.

    Stores restricted to a region of interest hold flat vectors; the region
    being extracted must then be contained in the restriction.
    """
    mask = region.mask
    if mask.shape != store.grid.shape:
        raise ValueError("region mask does not match the recorded grid")
    if store.restriction is None:
        return mask
    if np.any(mask & ~store.restriction):
        raise ValueError(
            "region reaches outside the cells kept by this restricted store"
        )
    return mask[store.restriction]


def region_series(store: SnapshotStore, region: RegionMask,
                  label: str = "") -> NormSeries:
    """Squared L2 norm on a region at every recorded snapshot."""
    if not store.snapshots:
        raise ValueError("evolution record holds no snapshots")
    sel_idx = _region_selector(store, region)
    vol = store.grid.cell_volume
    vals = np.empty(len(store.snapshots))
    for i, snap in enumerate(store.snapshots):
        sel = snap[sel_idx]
        vals[i] = np.sum(sel * sel) * vol
    return NormSeries(store.times, vals, label=label)


def global_series(store: SnapshotStore, label: str = "l2_omega_sq") -> NormSeries:
    """Per-step squared L2 norm over the whole box (dense in time)."""
    return NormSeries(
        np.asarray(store.step_times), np.asarray(store.l2_omega_sq), label=label
    )


def sup_over_time(store: SnapshotStore, region: RegionMask) -> float:
    """max over snapshots of the squared region norm."""
    return region_series(store, region).sup


def spacetime_l2_sq(store: SnapshotStore, region: RegionMask,
                    t0: float | None = None, t1: float | None = None) -> float:
    """Squared L2 norm over window x region, i.e. the time integral of the
    squared region norm."""
    return region_series(store, region).integral(t0, t1)


def sup_pointwise_sq(store: SnapshotStore, region: RegionMask,
                     t0: float, t1: float) -> float:
    """max of u^2 over cells of the region and snapshots inside [t0, t1]."""
    times = store.times
    i0 = int(np.searchsorted(times, t0, side="left"))
    i1 = int(np.searchsorted(times, t1, side="right"))
    if i0 >= i1:
        # no snapshot inside the window; fall back to the nearest one
        i0 = min(max(0, i0 - 1), len(times) - 1)
        i1 = i0 + 1
    sel_idx = _region_selector(store, region)
    best = 0.0
    for snap in store.snapshots[i0:i1]:
        sel = snap[sel_idx]
        if sel.size == 0:
            raise ValueError("region contains no cells")
        best = max(best, float(np.max(sel * sel)))
    return best
