"""Declarative configuration: one YAML file describes geometry, grid,
initial data, solver, and sweep; CLI flags override individual keys.

The schema is a plain nested mapping -- see ``reference_config`` for the
canonical layout and defaults.  Builders turn sub-mappings into the typed
objects the rest of the package consumes.
"""

from __future__ import annotations

import copy

import yaml

from .discretize import Grid, InitialDataSpec, grid_for_domain
from .evolve import SolveConfig
from .geometry import Ball, DomainSpec, Ellipse, Kidney, RoundedBox, Shape


class ConfigError(ValueError):
    pass


_SHAPE_KINDS = {
    "ball": Ball,
    "ellipse": Ellipse,
    "rounded_box": RoundedBox,
    "kidney": Kidney,
}

# log-spaced half-decades from 1e2 to 1e4
_DEFAULT_LAMBDAS_2D = [1e2, 10.0**2.5, 1e3, 10.0**3.5, 1e4]
_DEFAULT_LAMBDAS_3D = [1e2, 1e3]


def reference_config(dim: int = 2) -> dict:
    """Canonical setup: unit box, centered ball absorber of radius 0.3,
    observation ball of radius 0.15 (safety distance a = 0.15)."""
    if dim not in (2, 3):
        raise ConfigError("reference configuration exists for dim 2 and 3")
    center = [0.5] * dim
    return {
        "domain": {
            "lower": [0.0] * dim,
            "upper": [1.0] * dim,
            "obstacle": {"kind": "ball", "center": center, "radius": 0.3},
            "subdomain": {"kind": "ball", "center": center, "radius": 0.15},
        },
        "grid": {"cells": 256 if dim == 2 else 64},
        "initial": {"amplitude": 1.0, "ramp_width": 0.1},
        "solve": {
            "theta": 1.0,
            "dt": None,
            "horizon": None,
            "cg_rel_tol": 1e-12,
            "cg_max_iter": 20000,
            "jacobi": False,
            "dense_until": None,
            "snapshot_stride": None,
            "max_late_snapshots": 256,
        },
        "bounds": {
            "nu": 0.25,
            "gamma": 0.45,
            "mv_gamma": 0.25,
        },
        "case": {"lam": 1e3, "label": "case"},
        "sweep": {
            "lambdas": list(
                _DEFAULT_LAMBDAS_2D if dim == 2 else _DEFAULT_LAMBDAS_3D
            ),
            "out_dir": "out",
        },
    }


def deep_merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; override wins, sub-mappings merge key-wise."""
    merged = copy.deepcopy(base)
    for key, val in override.items():
        if (
            key in merged
            and isinstance(merged[key], dict)
            and isinstance(val, dict)
        ):
            merged[key] = deep_merge(merged[key], val)
        else:
            merged[key] = copy.deepcopy(val)
    return merged


def load_config(path, defaults: dict | None = None) -> dict:
    """Read a YAML config file and merge it over the reference defaults."""
    with open(path) as fh:
        loaded = yaml.safe_load(fh)
    if loaded is None:
        loaded = {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"config root must be a mapping, got {type(loaded)}")
    if defaults is None:
        dim = 2
        dom = loaded.get("domain")
        if isinstance(dom, dict) and "lower" in dom:
            dim = len(dom["lower"])
        defaults = reference_config(dim)
    return deep_merge(defaults, loaded)


def build_shape(spec: dict) -> Shape:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("shape spec needs a 'kind' key")
    kind = spec["kind"]
    if kind not in _SHAPE_KINDS:
        raise ConfigError(
            f"unknown shape kind {kind!r}; choose from {sorted(_SHAPE_KINDS)}"
        )
    kwargs = {k: v for k, v in spec.items() if k != "kind"}
    try:
        return _SHAPE_KINDS[kind](**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for shape {kind!r}: {exc}") from exc


def build_domain(spec: dict) -> DomainSpec:
    for key in ("lower", "upper", "obstacle", "subdomain"):
        if key not in spec:
            raise ConfigError(f"domain spec is missing {key!r}")
    return DomainSpec(
        omega_lower=spec["lower"],
        omega_upper=spec["upper"],
        obstacle=build_shape(spec["obstacle"]),
        subdomain=build_shape(spec["subdomain"]),
    )


def build_grid(cfg: dict, domain: DomainSpec) -> Grid:
    cells = cfg.get("grid", {}).get("cells", 256)
    return grid_for_domain(domain, cells)


def build_initial_spec(cfg: dict) -> InitialDataSpec:
    init = cfg.get("initial", {})
    return InitialDataSpec(
        amplitude=float(init.get("amplitude", 1.0)),
        ramp_width=float(init.get("ramp_width", 0.1)),
    )


def build_solve_config(cfg: dict, lam: float) -> SolveConfig:
    sv = cfg.get("solve", {})
    return SolveConfig(
        lam=lam,
        theta=float(sv.get("theta", 1.0)),
        dt=None if sv.get("dt") is None else float(sv["dt"]),
        horizon=None if sv.get("horizon") is None else float(sv["horizon"]),
        cg_rel_tol=float(sv.get("cg_rel_tol", 1e-12)),
        cg_max_iter=int(sv.get("cg_max_iter", 20000)),
        jacobi=bool(sv.get("jacobi", False)),
        snapshot_stride=(
            None if sv.get("snapshot_stride") is None
            else int(sv["snapshot_stride"])
        ),
        dense_until=(
            None if sv.get("dense_until") is None else float(sv["dense_until"])
        ),
        max_late_snapshots=int(sv.get("max_late_snapshots", 256)),
    )


def apply_overrides(cfg: dict, overrides: dict) -> dict:
    """Overlay dotted-path overrides (e.g. {'solve.theta': 0.5}) onto cfg."""
    out = copy.deepcopy(cfg)
    for path, value in overrides.items():
        if value is None:
            continue
        node = out
        parts = path.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot override through scalar at {part!r}")
        node[parts[-1]] = value
    return out
