"""Scenario registry and JSON config ingestion.

A scenario bundles an ambient model, an immersion given by DSL strings,
an optional product declaration with warping expression, sampling
controls and tolerance overrides.  Built-in scenarios cover the standard
worked examples in flat 9/11/13-space, the Sasakian model and its
invariant submanifold, plus small controls (unit circle, totally
geodesic plane, and a sheared non-product negative control).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from . import ambient as ambient_mod
from . import exprdsl
from .ambient import AmbientModel
from .immersion import Immersion
from .tolerances import Tolerances
from .warped import ProductDeclaration

__all__ = ["Scenario", "ConfigError", "BUILTIN_SCENARIOS", "load_config", "builtin"]


class ConfigError(ValueError):
    """Schema violation in a scenario config, names the offending field."""


@dataclass(frozen=True)
class Scenario:
    name: str
    ambient: AmbientModel
    immersion: Immersion
    product: Optional[ProductDeclaration]
    reference_point: Optional[Dict[str, float]]
    sample_count: int
    seed: int
    tolerances: Tolerances
    constants: Dict[str, float] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# built-in definitions (JSON-shaped dicts, same schema as config files)
# ---------------------------------------------------------------------------

_EX31 = {
    "name": "ex31",
    "ambient": {"builtin": "flat", "m": 5},
    "immersion": {
        "params": ["u", "v", "w", "r", "s", "t"],
        "constants": {"k": 1.0},
        "components": [
            "u+v", "cosh(w)", "k*r", "cos(r)", "cos(s)",
            "u-v", "sinh(w)", "s", "sin(r)", "sin(s)", "t",
        ],
        "domain": {
            "u": [-1, 1], "v": [-1, 1], "w": [-1, 1],
            "r": [-1, 1], "s": [-1, 1], "t": [-1, 1],
        },
    },
}

_EX32 = {
    "name": "ex32",
    "ambient": {"builtin": "flat", "m": 4},
    "immersion": {
        "params": ["u", "v", "r", "s", "w", "t"],
        "constants": {"theta": 0.7853981633974483},
        "components": [
            "u", "r", "s*cos(theta)", "cos(w)",
            "-v", "s", "s*sin(theta)", "-sin(w)", "t",
        ],
        "domain": {
            "u": [-1, 1], "v": [-1, 1], "r": [-1, 1],
            "s": [-1, 1], "w": [0.2, 1.4], "t": [-1, 1],
        },
    },
}

_EX61 = {
    "name": "ex61",
    "ambient": {"builtin": "flat", "m": 4},
    "immersion": {
        "params": ["u1", "v1", "u2", "v2", "w", "t"],
        "components": [
            "u1", "u2", "sin(v2)", "cos(w^2)",
            "v1", "v2", "cos(v2)", "sin(w^2)", "t",
        ],
        "domain": {
            "u1": [-1, 1], "v1": [-1, 1], "u2": [-1, 1],
            "v2": [-1, 1], "w": [0.2, 1.5], "t": [-1, 1],
        },
    },
    "product": {
        "base_T": ["u1", "v1", "t"],
        "base_theta": ["u2", "v2"],
        "fiber": ["w"],
        "xi_location": "M_T",
    },
}

_EX62 = {
    "name": "ex62",
    "ambient": {"builtin": "flat", "m": 6},
    "immersion": {
        "params": ["u", "v", "w", "r", "s", "t", "z"],
        "constants": {"k": 1.0},
        "components": [
            "u*cos(w+r)", "u*sin(w+r)", "v*cos(w-r)", "v*sin(w-r)", "k*(u+v)", "s+t",
            "v*cos(w+r)", "v*sin(w+r)", "u*cos(w-r)", "u*sin(w-r)", "-k*(u-v)", "-s+t",
            "z",
        ],
        "domain": {
            "u": [0.5, 1.5], "v": [0.5, 1.5], "w": [0.1, 1.2],
            "r": [0.1, 1.2], "s": [-1, 1], "t": [-1, 1], "z": [-1, 1],
        },
    },
    "product": {
        "base_T": ["s", "t", "z"],
        "base_theta": ["u", "v"],
        "fiber": ["w", "r"],
        "xi_location": "M_T",
        "warping": "sqrt(2*(u^2+v^2))",
    },
    "reference_point": {"u": 1.0, "v": 1.0, "w": 0.3, "r": 0.2, "s": 0.0, "t": 0.0, "z": 0.0},
}

_SAS_AMBIENT = {
    "name": "sasakian5-ambient",
    "ambient": {"builtin": "sasakian", "m": 2},
    "immersion": {
        "params": ["x1", "x2", "y1", "y2", "z"],
        "components": ["x1", "x2", "y1", "y2", "z"],
        "domain": {c: [-1, 1] for c in ["x1", "x2", "y1", "y2", "z"]},
    },
}

_SAS_INVARIANT = {
    "name": "sasakian5-invariant-submanifold",
    "ambient": {"builtin": "sasakian", "m": 2},
    "immersion": {
        "params": ["a", "b", "c"],
        "components": ["a", "0", "b", "0", "c"],
        "domain": {"a": [-1, 1], "b": [-1, 1], "c": [-1, 1]},
    },
}

_UNIT_CIRCLE = {
    "name": "unit-circle",
    "ambient": {"builtin": "flat", "m": 1},
    "immersion": {
        "params": ["w"],
        "components": ["cos(w)", "sin(w)", "0"],
        "domain": {"w": [0.0, 6.2]},
    },
}

_TG_PLANE = {
    "name": "tg-plane",
    "ambient": {"builtin": "flat", "m": 2},
    "immersion": {
        "params": ["u", "v"],
        "components": ["u", "v", "0", "0", "0"],
        "domain": {"u": [-1, 1], "v": [-1, 1]},
    },
}

# negative control: metric mixes declared base and fiber parameters
_SHEARED = {
    "name": "sheared-nonproduct",
    "ambient": {"builtin": "flat", "m": 3},
    "immersion": {
        "params": ["u", "v", "w", "t"],
        "components": ["u", "v", "w+0.5*u", "0", "0", "u*w", "t"],
        "domain": {"u": [-1, 1], "v": [-1, 1], "w": [0.2, 1.2], "t": [-1, 1]},
    },
    "product": {
        "base_T": ["u", "v", "t"],
        "base_theta": [],
        "fiber": ["w"],
        "xi_location": "M_T",
    },
}

BUILTIN_SCENARIOS: Dict[str, dict] = {
    d["name"]: d
    for d in (
        _EX31,
        _EX32,
        _EX61,
        _EX62,
        _SAS_AMBIENT,
        _SAS_INVARIANT,
        _UNIT_CIRCLE,
        _TG_PLANE,
        _SHEARED,
    )
}


# ---------------------------------------------------------------------------
# construction / validation
# ---------------------------------------------------------------------------


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {message}")


def _build_ambient(spec: dict) -> AmbientModel:
    _require(isinstance(spec, dict), "ambient", "must be an object")
    if "builtin" in spec:
        m = spec.get("m")
        _require(isinstance(m, int) and m >= 1, "ambient.m", "positive integer required")
        if spec["builtin"] == "flat":
            return ambient_mod.flat_model(m)
        if spec["builtin"] == "sasakian":
            return ambient_mod.sasakian_model(m)
        raise ConfigError(f"ambient.builtin: unknown model {spec['builtin']!r}")
    for key in ("coords", "metric", "phi", "xi", "eta"):
        _require(key in spec, f"ambient.{key}", "missing field")
    coords = tuple(spec["coords"])
    d = len(coords)
    _require(d % 2 == 1 and d >= 3, "ambient.coords", "need odd dimension >= 3")
    p = lambda s: exprdsl.parse(str(s), coords)
    grid = lambda rows, name: tuple(
        tuple(p(v) for v in row) for row in _checked_grid(rows, d, name)
    )
    vec = lambda vals, name: tuple(p(v) for v in _checked_vec(vals, d, name))
    return AmbientModel(
        m=(d - 1) // 2,
        coords=coords,
        metric=grid(spec["metric"], "ambient.metric"),
        phi=grid(spec["phi"], "ambient.phi"),
        xi=vec(spec["xi"], "ambient.xi"),
        eta=vec(spec["eta"], "ambient.eta"),
    )


def _checked_grid(rows, d, name):
    _require(len(rows) == d and all(len(r) == d for r in rows), name, f"must be {d}x{d}")
    return rows


def _checked_vec(vals, d, name):
    _require(len(vals) == d, name, f"must have {d} entries")
    return vals


def _build(spec: dict, overrides: Optional[Dict[str, float]] = None,
           sample_count: Optional[int] = None, seed: Optional[int] = None,
           tol_overrides: Optional[Dict[str, float]] = None) -> Scenario:
    _require("name" in spec, "name", "missing field")
    _require("immersion" in spec, "immersion", "missing field")
    model = _build_ambient(spec.get("ambient", {}))

    imm_spec = spec["immersion"]
    for key in ("params", "components", "domain"):
        _require(key in imm_spec, f"immersion.{key}", "missing field")
    params = [str(x) for x in imm_spec["params"]]
    constants = {str(k): float(v) for k, v in imm_spec.get("constants", {}).items()}
    if overrides:
        unknown = set(overrides) - set(constants)
        _require(not unknown, "constants", f"unknown override names {sorted(unknown)}")
        constants.update({k: float(v) for k, v in overrides.items()})
    comps = imm_spec["components"]
    _require(
        len(comps) == model.dim,
        "immersion.components",
        f"need {model.dim} components, got {len(comps)}",
    )
    try:
        parsed = tuple(exprdsl.parse(str(c), params, constants) for c in comps)
    except exprdsl.ExprError as exc:
        raise ConfigError(f"immersion.components: {exc}")
    domain = {}
    for name in params:
        _require(name in imm_spec["domain"], f"immersion.domain.{name}", "missing interval")
        lo, hi = imm_spec["domain"][name]
        _require(float(lo) <= float(hi), f"immersion.domain.{name}", "min exceeds max")
        domain[name] = (float(lo), float(hi))
    imm = Immersion(params=tuple(params), components=parsed, domain=domain, ambient=model)

    product = None
    if spec.get("product"):
        pr = spec["product"]
        warping = None
        if pr.get("warping"):
            try:
                warping = exprdsl.parse(str(pr["warping"]), params, constants)
            except exprdsl.ExprError as exc:
                raise ConfigError(f"product.warping: {exc}")
        product = ProductDeclaration(
            base_T_params=tuple(pr.get("base_T", [])),
            base_theta_params=tuple(pr.get("base_theta", [])),
            fiber_params=tuple(pr.get("fiber", [])),
            xi_location=pr.get("xi_location", "M_T"),
            warping_expr=warping,
        )
        try:
            product.validate(imm)
        except ValueError as exc:
            raise ConfigError(f"product: {exc}")

    sampling = spec.get("sampling", {})
    count = sample_count if sample_count is not None else int(sampling.get("count", 100))
    _require(count >= 1, "sampling.count", "must be >= 1")
    the_seed = seed if seed is not None else int(sampling.get("seed", 42))

    tols = Tolerances()
    merged_tols = dict(spec.get("tolerances", {}))
    if tol_overrides:
        merged_tols.update(tol_overrides)
    if merged_tols:
        try:
            tols = tols.override(merged_tols)
        except ValueError as exc:
            raise ConfigError(f"tolerances: {exc}")

    ref = spec.get("reference_point")
    if ref is not None:
        _require(
            sorted(ref) == sorted(params), "reference_point", "must cover all parameters"
        )
        ref = {k: float(v) for k, v in ref.items()}

    return Scenario(
        name=str(spec["name"]),
        ambient=model,
        immersion=imm,
        product=product,
        reference_point=ref,
        sample_count=count,
        seed=the_seed,
        tolerances=tols,
        constants=constants,
    )


def builtin(
    name: str,
    constants: Optional[Dict[str, float]] = None,
    sample_count: Optional[int] = None,
    seed: Optional[int] = None,
    tol_overrides: Optional[Dict[str, float]] = None,
) -> Scenario:
    """Instantiate a built-in scenario, optionally overriding constants."""
    if name not in BUILTIN_SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; known: {sorted(BUILTIN_SCENARIOS)}")
    return _build(
        BUILTIN_SCENARIOS[name],
        overrides=constants,
        sample_count=sample_count,
        seed=seed,
        tol_overrides=tol_overrides,
    )


def load_config(
    source: Union[str, Path],
    constants: Optional[Dict[str, float]] = None,
    sample_count: Optional[int] = None,
    seed: Optional[int] = None,
    tol_overrides: Optional[Dict[str, float]] = None,
) -> Scenario:
    """Load a scenario from a built-in name or a JSON config file."""
    text = str(source)
    if text in BUILTIN_SCENARIOS:
        return builtin(text, constants, sample_count, seed, tol_overrides)
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"no built-in scenario or config file named {text!r}")
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})")
    return _build(spec, constants, sample_count, seed, tol_overrides)
