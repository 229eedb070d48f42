"""Centralized tolerance configuration.

Every check reports (value, tolerance, verdict); the defaults here are
the normative ones and can be overridden per scenario or from the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Dict

__all__ = ["Tolerances"]


@dataclass(frozen=True)
class Tolerances:
    frame_gram: float = 1e-10
    sigma_symmetry: float = 1e-9
    sigma_normality: float = 1e-9
    gauss_split: float = 1e-9
    sff_paths: float = 1e-8
    structure_basic: float = 1e-9       # almost contact + compatibility, any model
    structure_sasakian: float = 1e-7    # full Sasakian identity battery
    eigen_cluster: float = 1e-6
    angle_constancy: float = 1e-8
    slant_identity: float = 1e-8
    block_structure: float = 1e-10
    warp_consistency: float = 1e-6
    warp_recovery: float = 1e-6
    f_constant: float = 1e-10
    bishop: float = 1e-6
    xi_ln_f: float = 1e-12
    lemma: float = 1e-6
    mixed_tg: float = 1e-6
    margin: float = 1e-8
    xi_tangency: float = 1e-8

    def override(self, values: Dict[str, float]) -> "Tolerances":
        known = {f.name for f in fields(self)}
        bad = set(values) - known
        if bad:
            raise ValueError(f"unknown tolerance keys: {sorted(bad)}")
        return replace(self, **{k: float(v) for k, v in values.items()})
