"""Scenario orchestration: ambient checks, per-sample geometry,
classification, warped-product analysis and report assembly.

Every check is recorded as (name, value, tolerance, verdict).  A verdict
is "pass"/"fail" for asserted checks and "info" for residuals that are
reported but cannot gate the run (e.g. Sasakian-hypothesis identities on
a flat ambient).  Reports are deterministic given (scenario, seed,
tolerances): sampling is seeded and aggregation runs in sample order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__, ambient as ambient_mod, skewcr as skewcr_mod, warped as warped_mod
from .immersion import (
    DegeneratePointError,
    GeometrySample,
    second_fundamental_form,
    sff_norm2,
)
from .scenarios import Scenario
from .tolerances import Tolerances

__all__ = ["Check", "VerificationReport", "run_scenario"]

# caps keeping expensive per-sample stages at desk scale
_AMBIENT_POINT_CAP = 30
_LEMMA_SAMPLE_CAP = 12
_BISHOP_SAMPLE_CAP = 8


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tol: Optional[float]
    verdict: str                      # pass | fail | info

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "tol": self.tol,
            "verdict": self.verdict,
        }


@dataclass
class VerificationReport:
    scenario: str
    seed: int
    sample_count: int
    checks: List[Check] = field(default_factory=list)
    ambient: Dict[str, float] = field(default_factory=dict)
    classification: Dict[str, object] = field(default_factory=dict)
    warped: Dict[str, object] = field(default_factory=dict)
    theorem41: Dict[str, object] = field(default_factory=dict)
    degenerate_points: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def add(self, name: str, value: float, tol: Optional[float], asserted: bool) -> None:
        if asserted:
            verdict = "pass" if value < tol else "fail"
        else:
            verdict = "info"
        self.checks.append(Check(name, float(value), tol, verdict))

    @property
    def passed(self) -> bool:
        return all(c.verdict != "fail" for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "sample_count": self.sample_count,
            "tool_version": __version__,
            "checks": [c.as_dict() for c in self.checks],
            "ambient": self.ambient,
            "classification": self.classification,
            "warped": self.warped,
            "theorem41": self.theorem41,
            "degenerate_points": self.degenerate_points,
            "notes": self.notes,
            "overall": "pass" if self.passed else "fail",
        }


# ---------------------------------------------------------------------------


def run_scenario(s: Scenario, stage: str = "verify") -> VerificationReport:
    """Run a scenario up to the given stage (ambient | classify | verify)."""
    if stage not in ("ambient", "classify", "verify"):
        raise ValueError(f"unknown stage {stage!r}")
    report = VerificationReport(scenario=s.name, seed=s.seed, sample_count=s.sample_count)

    raw_points = s.immersion.sample_points(s.sample_count, s.seed)
    points, samples = [], []
    for p in raw_points:
        try:
            if stage == "ambient":
                s.immersion.chart_point(p)
                points.append(p)
            else:
                samples.append(second_fundamental_form(s.immersion, p))
                points.append(p)
        except DegeneratePointError:
            report.degenerate_points.append(p)
    if len(report.degenerate_points) > 0.1 * len(raw_points):
        raise DegeneratePointError(
            f"{len(report.degenerate_points)} of {len(raw_points)} samples degenerate"
        )

    _ambient_stage(s, report, points)
    if stage == "ambient":
        return report

    _geometry_stage(s, report, samples)
    splits, tfs = _classification_stage(s, report, samples)
    if stage == "classify" or s.product is None:
        if s.product is None and stage == "verify":
            report.notes.append("no product declaration; warped stage skipped")
        return report

    _warped_stage(s, report, points, samples, splits, tfs)
    return report


# ---------------------------------------------------------------------------


def _ambient_stage(s: Scenario, report: VerificationReport, points: Sequence[dict]) -> None:
    tol = s.tolerances
    chart_points = [s.immersion.chart_point(p) for p in points[:_AMBIENT_POINT_CAP]]
    res = ambient_mod.check_structure(s.ambient, chart_points, seed=s.seed)
    report.ambient = res.as_dict()
    report.add("ambient.almost_contact", res.almost_contact, tol.structure_basic, True)
    report.add("ambient.compatibility", res.compatibility, tol.structure_basic, True)
    sas_ok = (
        res.sasakian < tol.structure_sasakian
        and res.normality < tol.structure_sasakian
        and res.contact_metric < tol.structure_sasakian
        and res.xi_derivative < tol.structure_sasakian
    )
    report.ambient["is_sasakian"] = bool(sas_ok)
    for key in ("contact_metric", "normality", "sasakian", "xi_derivative"):
        report.add(f"ambient.{key}", report.ambient[key], tol.structure_sasakian, False)


def _geometry_stage(
    s: Scenario, report: VerificationReport, samples: Sequence[GeometrySample]
) -> None:
    tol = s.tolerances
    gram = sym = normality = gauss = paths = 0.0
    for smp in samples:
        n, d = smp.n, smp.g_amb.shape[0]
        frame = np.vstack([smp.tangent_frame, smp.normal_frame])
        G = frame @ smp.g_amb @ frame.T
        gram = max(gram, float(np.max(np.abs(G - np.eye(d)))))
        for a in range(n):
            for b in range(a, n):
                sym = max(sym, smp.gnorm(smp.sigma[a, b] - smp.sigma[b, a]))
                for e in smp.tangent_frame:
                    normality = max(normality, abs(smp.gdot(smp.sigma[a, b], e)))
        # Gauss split: frame projections of the ambient derivative recombine it
        for a in range(n):
            for b in range(n):
                nab = smp.nabla_coords[a, b]
                recon = np.zeros_like(nab)
                for e in frame:
                    recon += smp.gdot(nab, e) * e
                gauss = max(gauss, smp.gnorm(recon - nab))
        p1, p2 = sff_norm2(smp)
        paths = max(paths, abs(p1 - p2) / (1.0 + abs(p1)))
    report.add("frames.gram_identity", gram, tol.frame_gram, True)
    report.add("sigma.symmetry", sym, tol.sigma_symmetry, True)
    report.add("sigma.normality", normality, tol.sigma_normality, True)
    report.add("sigma.gauss_split", gauss, tol.gauss_split, True)
    report.add("sigma.norm2_paths", paths, tol.sff_paths, True)


def _classification_stage(
    s: Scenario, report: VerificationReport, samples: Sequence[GeometrySample]
) -> Tuple[List[skewcr_mod.DistributionSplit], List[skewcr_mod.TFPair]]:
    tol = s.tolerances
    tfs, splits = [], []
    recon = antisym = 0.0
    for smp in samples:
        tf = skewcr_mod.tf_decompose(smp, xi_tol=tol.xi_tangency)
        tfs.append(tf)
        antisym = max(antisym, float(np.max(np.abs(tf.T + tf.T.T))))
        # phi e_b reconstructed from T and F parts
        phiE = (smp.phi @ smp.tangent_frame.T).T
        rebuilt = tf.T.T @ smp.tangent_frame + (
            tf.F.T @ smp.normal_frame if smp.normal_frame.shape[0] else 0.0
        )
        for b in range(smp.n):
            recon = max(recon, smp.gnorm(phiE[b] - rebuilt[b]))
        splits.append(skewcr_mod.classify(smp, tol_cluster=tol.eigen_cluster, tf=tf))
    report.add("tf.antisymmetry", antisym, 1e-10, True)
    report.add("tf.reconstruction", recon, 1e-10, True)

    first = splits[0]
    dims_consistent = all(sp.dims == first.dims for sp in splits)
    angles = [sp.slant_angle for sp in splits if sp.slant_angle is not None]
    spread = skewcr_mod.constancy_spread(angles)
    label = first.label
    if not dims_consistent or (angles and spread > tol.angle_constancy):
        label = "generic"
    report.classification = {
        "label": label,
        "dims": first.dims,
        "xi_tangent": first.xi_coeffs is not None,
        "slant_angle": angles[0] if angles else None,
        "slant_angle_spread": spread if angles else None,
        "blocks": [
            {"eigenvalue": b.eigenvalue, "dimension": b.dimension, "angle": b.angle}
            for b in first.blocks
        ],
    }
    if angles:
        report.add("classification.angle_constancy", spread, tol.angle_constancy, False)
        ident = {"t_squared": 0.0, "g_TT": 0.0, "g_FF": 0.0}
        for smp, sp, tf in zip(samples, splits, tfs):
            if sp.block_of_kind("slant") is None:
                continue
            res = skewcr_mod.verify_slant_identities(smp, sp, tf=tf, seed=s.seed)
            for key in ident:
                ident[key] = max(ident[key], res[key])
        for key, val in ident.items():
            report.add(f"slant.{key}", val, tol.slant_identity, True)

    try:
        ns = skewcr_mod.classify_normal(samples[0], first, tf=tfs[0])
        report.classification["normal_dims"] = list(ns.dims)
        report.add("normal.mu_invariance", ns.mu_invariance_defect, 1e-8, False)
    except ValueError as exc:
        report.classification["normal_dims"] = None
        report.notes.append(f"normal split unavailable: {exc}")
    return splits, tfs


def _warped_stage(
    s: Scenario,
    report: VerificationReport,
    points: Sequence[dict],
    samples: Sequence[GeometrySample],
    splits: Sequence[skewcr_mod.DistributionSplit],
    tfs: Sequence[skewcr_mod.TFPair],
) -> None:
    tol = s.tolerances
    decl = s.product
    imm = s.immersion
    block = warped_mod.check_block_structure(imm, decl, points)
    ws = warped_mod.extract_warping(
        imm,
        decl,
        points,
        block_residuals=block,
        block_tol=tol.block_structure,
        consistency_tol=tol.warp_consistency,
    )
    # these residuals decide the verdict; they gate nothing themselves
    report.add("warped.block_offdiagonal", block[0], tol.block_structure, False)
    report.add("warped.base_fiber_independence", block[1], 1e-6, False)
    report.add("warped.consistency", ws.warp_consistency_residual, tol.warp_consistency, False)
    verdict = "not a warped product"
    if ws.is_warped:
        verdict = "Riemannian product" if ws.f_spread < tol.f_constant else "warped product"
    report.warped = {
        "verdict": verdict,
        "block_offdiag_residual": ws.block_offdiag_residual,
        "warp_consistency_residual": ws.warp_consistency_residual,
        "f_spread": ws.f_spread,
        "f_reference": ws.f_reference,
        "f_gauge": ws.f_gauge,
    }
    if ws.warp_expr_rel_error is not None:
        report.warped["warp_expr_rel_error"] = ws.warp_expr_rel_error
        report.add(
            "warped.f_recovery", ws.warp_expr_rel_error, tol.warp_recovery, ws.is_warped
        )
    if not ws.is_warped:
        return

    # Bishop identity: Sasakian-independent, asserted on every warped metric
    bishop = 0.0
    for p, smp in list(zip(points, samples))[:_BISHOP_SAMPLE_CAP]:
        for a in decl.base_params:
            for c in decl.fiber_params:
                bishop = max(bishop, warped_mod.check_bishop(imm, decl, ws, p, a, c, sample=smp))
    report.add("warped.bishop_identity", bishop, tol.bishop, True)

    sas_ok = bool(report.ambient.get("is_sasakian"))
    xi_tangent = bool(report.classification.get("xi_tangent"))
    grad = warped_mod.grad_ln_f(imm, decl, ws, points[0], sample=samples[0])
    xi_base = decl.xi_location in ("M_T", "M_theta")
    assert_xi = (
        decl.warping_expr is not None and xi_tangent and xi_base
    )
    report.add("warped.xi_ln_f", abs(grad.xi_ln_f), tol.xi_ln_f, assert_xi)

    lemma_max: Dict[str, float] = {}
    for p, smp, sp, tf in list(zip(points, samples, splits, tfs))[:_LEMMA_SAMPLE_CAP]:
        res = warped_mod.lemma_residuals(imm, decl, sp, ws, smp, tf=tf)
        for key, val in res.items():
            lemma_max[key] = max(lemma_max.get(key, 0.0), val)
    for key, val in sorted(lemma_max.items()):
        report.add(f"lemma.{key}", val, tol.lemma, sas_ok)

    mixed = warped_mod.mixed_tg_check(samples, splits, ("anti-invariant", "slant"))
    report.add("warped.mixed_tg_dperp_dtheta", mixed, tol.mixed_tg, False)

    ref_p = s.reference_point or points[0]
    ref_smp = second_fundamental_form(imm, ref_p)
    ref_tf = skewcr_mod.tf_decompose(ref_smp, xi_tol=tol.xi_tangency)
    ref_split = skewcr_mod.classify(ref_smp, tol_cluster=tol.eigen_cluster, tf=ref_tf)
    rep = warped_mod.theorem41_report(
        imm, decl, ref_split, ws, ref_smp,
        sasakian_ambient=sas_ok,
        mixed_tg_residual=mixed,
        mixed_tol=tol.mixed_tg,
    )
    margins = []
    for p, smp, sp in zip(points, samples, splits):
        r = warped_mod.theorem41_report(
            imm, decl, sp, ws, smp,
            sasakian_ambient=sas_ok,
            mixed_tg_residual=mixed,
            mixed_tol=tol.mixed_tg,
        )
        margins.append(r.margin)
    report.theorem41 = {
        "at_point": ref_p,
        "lhs": rep.lhs,
        "lhs_path2": rep.lhs_path2,
        "rhs_statement_i": rep.rhs_statement_i,
        "rhs_statement_ii": rep.rhs_statement_ii,
        "rhs_proof_variant_i": rep.rhs_proof_variant_i,
        "margin": rep.margin,
        "min_margin_over_samples": min(margins),
        "hypothesis_flags": rep.hypothesis_flags,
        "equality_diagnostics": rep.equality_diagnostics,
    }
    if rep.f_constant_check is not None:
        # xi in the fiber forces a trivial product
        report.theorem41["f_constant_check"] = rep.f_constant_check
        report.add("theorem41.f_constant", rep.f_constant_check, tol.f_constant, sas_ok)
    else:
        hyp = sas_ok and rep.hypothesis_flags["mixed_totally_geodesic"] and rep.hypothesis_flags["order1_skewcr"]
        report.add("theorem41.margin_nonneg", -min(margins), tol.margin, bool(hyp))
    report.add("theorem41.lhs_paths", abs(rep.lhs - rep.lhs_path2), tol.sff_paths, True)
