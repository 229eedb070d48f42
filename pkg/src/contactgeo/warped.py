"""Warped-product structure detection and identity/inequality reports.

A product declaration splits the immersion parameters into an invariant
base factor, a slant base factor and an anti-invariant fiber.  The
module checks the induced metric for the block structure of a warped
metric g_B + f^2 g_F, recovers the warping function f up to gauge,
computes the Riemannian gradient components of ln f along both base
factors, and evaluates the warped-product identities and the second
fundamental form inequality as residual reports.

Identities that require a Sasakian ambient are reported with the
hypothesis flag attached; they are only asserted when the ambient
actually passes the Sasakian structure check, because the built-in
Euclidean scenarios deliberately fail it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import exprdsl, immersion as immersion_mod, skewcr as skewcr_mod
from .exprdsl import Expr
from .immersion import GeometrySample, Immersion, induced_metric, second_fundamental_form
from .skewcr import Block, DistributionSplit, TFPair

__all__ = [
    "ProductDeclaration",
    "WarpedStructure",
    "GradLnF",
    "TheoremReport",
    "check_block_structure",
    "extract_warping",
    "grad_ln_f",
    "check_bishop",
    "lemma_residuals",
    "mixed_tg_check",
    "theorem41_report",
    "special_case_rhs",
]

Point = Dict[str, float]


@dataclass(frozen=True)
class ProductDeclaration:
    """Parameter partition for M = (M_T x M_theta) x_f M_perp."""

    base_T_params: Tuple[str, ...]
    base_theta_params: Tuple[str, ...]
    fiber_params: Tuple[str, ...]
    xi_location: str = "M_T"          # one of M_T, M_theta, M_perp
    warping_expr: Optional[Expr] = None

    def validate(self, imm: Immersion) -> None:
        declared = list(self.base_T_params) + list(self.base_theta_params) + list(
            self.fiber_params
        )
        if sorted(declared) != sorted(imm.params):
            raise ValueError("product declaration must partition the immersion parameters")
        if self.xi_location not in ("M_T", "M_theta", "M_perp"):
            raise ValueError(f"bad xi_location {self.xi_location!r}")

    @property
    def base_params(self) -> Tuple[str, ...]:
        return tuple(self.base_T_params) + tuple(self.base_theta_params)


@dataclass(frozen=True)
class WarpedStructure:
    block_offdiag_residual: float
    base_dependence_residual: float
    warp_consistency_residual: float
    f_values: Tuple[float, ...]              # per sample, gauge-fixed
    f_gauge: Point                           # reference base point
    f_reference: float                       # f at the reference base point
    warp_expr_rel_error: Optional[float]     # vs declared warping expression
    is_warped: bool

    @property
    def f_spread(self) -> float:
        if not self.f_values:
            return 0.0
        return float(max(self.f_values) - min(self.f_values))


@dataclass(frozen=True)
class GradLnF:
    grad_param: np.ndarray      # d(ln f)/du_a over all immersion parameters
    norm2_T: float              # ||grad^T ln f||^2 in the induced metric
    norm2_theta: float
    xi_ln_f: float


@dataclass(frozen=True)
class TheoremReport:
    lhs: float                          # ||sigma||^2, frame contraction path
    lhs_path2: float                    # component-sum path
    rhs_statement_i: float
    rhs_statement_ii: float
    rhs_proof_variant_i: float          # csc^2 in place of cot^2 (see notes)
    margin: float                       # lhs minus the applicable rhs
    hypothesis_flags: Dict[str, object]
    equality_diagnostics: Dict[str, float]
    f_constant_check: Optional[float] = None   # spread, xi-in-fiber branch only


# ---------------------------------------------------------------------------
# metric block structure and warping recovery
# ---------------------------------------------------------------------------


def _param_indices(imm: Immersion, names: Sequence[str]) -> List[int]:
    return [imm.params.index(n) for n in names]


def check_block_structure(
    imm: Immersion,
    decl: ProductDeclaration,
    samples: Sequence[Point],
    fd_step: float = 1e-5,
    fd_samples: int = 8,
) -> Tuple[float, float]:
    """Off-block metric residual plus base-block fiber-independence residual.

    The first value is the max absolute induced-metric entry between
    different factors; the second is the max finite-difference derivative
    of a base-block entry along a fiber parameter.
    """
    decl.validate(imm)
    iT = _param_indices(imm, decl.base_T_params)
    ith = _param_indices(imm, decl.base_theta_params)
    ifib = _param_indices(imm, decl.fiber_params)
    off = 0.0
    for p in samples:
        g = induced_metric(imm, p)
        for A, B in ((iT, ith), (iT, ifib), (ith, ifib)):
            if A and B:
                off = max(off, float(np.max(np.abs(g[np.ix_(A, B)]))))

    base = iT + ith
    dep = 0.0
    for p in list(samples)[:fd_samples]:
        for c in decl.fiber_params:
            hi, lo = dict(p), dict(p)
            hi[c] += fd_step
            lo[c] -= fd_step
            gh = induced_metric(imm, hi)[np.ix_(base, base)]
            gl = induced_metric(imm, lo)[np.ix_(base, base)]
            dep = max(dep, float(np.max(np.abs(gh - gl))) / (2 * fd_step))
    return off, dep


def _fiber_block(imm: Immersion, p: Point, ifib: List[int]) -> np.ndarray:
    return induced_metric(imm, p)[np.ix_(ifib, ifib)]


def _ratio(R: np.ndarray, S: np.ndarray) -> Tuple[float, float]:
    """Scalar c with R ~= c*S, and the relative consistency defect."""
    scale = float(np.max(np.abs(S)))
    if scale == 0.0:
        raise ValueError("fiber reference block vanishes")
    mask = np.abs(S) > 1e-10 * scale
    c = float(np.mean(R[mask] / S[mask]))
    defect = float(np.max(np.abs(R - c * S))) / scale
    return c, defect


def extract_warping(
    imm: Immersion,
    decl: ProductDeclaration,
    samples: Sequence[Point],
    block_residuals: Optional[Tuple[float, float]] = None,
    block_tol: float = 1e-8,
    consistency_tol: float = 1e-6,
) -> WarpedStructure:
    """Recover f from fiber-block ratios against a reference base point.

    Gauge: at the domain-box-center base point, f equals the declared
    warping expression when present, else 1.  The fiber metric g_F may
    depend on fiber coordinates, so each sample is compared against the
    reference-base point with the *same* fiber coordinates.
    """
    decl.validate(imm)
    ifib = _param_indices(imm, decl.fiber_params)
    if block_residuals is None:
        block_residuals = check_block_structure(imm, decl, samples)
    off, dep = block_residuals

    center = {n: 0.5 * (lo + hi) for n, (lo, hi) in imm.domain.items()}
    ref_base = {n: center[n] for n in decl.base_params}

    f_ref = 1.0
    expr_vals = None
    if decl.warping_expr is not None:
        f_ref = exprdsl.evaluate(decl.warping_expr, center)
        expr_vals = [exprdsl.evaluate(decl.warping_expr, p) for p in samples]

    f_values = []
    consistency = 0.0
    for p in samples:
        q = dict(p)
        q.update(ref_base)
        R = _fiber_block(imm, p, ifib)
        S = _fiber_block(imm, q, ifib)
        c, defect = _ratio(R, S)
        consistency = max(consistency, defect)
        if c <= 0:
            consistency = max(consistency, 1.0)
            c = abs(c) + 1e-300
        f_values.append(math.sqrt(c) * f_ref)

    rel_err = None
    if expr_vals is not None:
        rel_err = max(
            abs(fv - ev) / abs(ev) for fv, ev in zip(f_values, expr_vals)
        )

    is_warped = off < max(block_tol, 1e-8) and consistency < consistency_tol
    return WarpedStructure(
        block_offdiag_residual=off,
        base_dependence_residual=dep,
        warp_consistency_residual=consistency,
        f_values=tuple(f_values),
        f_gauge=ref_base,
        f_reference=f_ref,
        warp_expr_rel_error=rel_err,
        is_warped=is_warped,
    )


# ---------------------------------------------------------------------------
# gradients of ln f
# ---------------------------------------------------------------------------


def _recovered_f(imm: Immersion, decl: ProductDeclaration, ws: WarpedStructure, p: Point) -> float:
    ifib = _param_indices(imm, decl.fiber_params)
    q = dict(p)
    q.update(ws.f_gauge)
    c, _ = _ratio(_fiber_block(imm, p, ifib), _fiber_block(imm, q, ifib))
    return math.sqrt(max(c, 1e-300)) * ws.f_reference


def _dlnf_params(
    imm: Immersion, decl: ProductDeclaration, ws: WarpedStructure, p: Point, h: float = 1e-5
) -> np.ndarray:
    """d(ln f)/du_a for all parameters (zero along the fiber)."""
    out = np.zeros(imm.n)
    if decl.warping_expr is not None:
        f = exprdsl.evaluate(decl.warping_expr, p)
        if f <= 0:
            raise ValueError("warping function must be positive")
        g = exprdsl.gradient(decl.warping_expr, p)
        # warping expressions are declared over the immersion parameters
        out = g / f
        for idx in _param_indices(imm, decl.fiber_params):
            out[idx] = 0.0
        return out
    for name in decl.base_params:
        idx = imm.params.index(name)
        hi, lo = dict(p), dict(p)
        hi[name] += h
        lo[name] -= h
        out[idx] = (
            math.log(_recovered_f(imm, decl, ws, hi))
            - math.log(_recovered_f(imm, decl, ws, lo))
        ) / (2 * h)
    return out


def grad_ln_f(
    imm: Immersion,
    decl: ProductDeclaration,
    ws: WarpedStructure,
    p: Point,
    sample: Optional[GeometrySample] = None,
) -> GradLnF:
    """Riemannian gradient components of ln f along M_T and M_theta.

    The differential is raised with the inverse induced base metric, not
    the Euclidean parameter gradient.
    """
    d = _dlnf_params(imm, decl, ws, p)
    g = induced_metric(imm, p) if sample is None else sample.g_ind
    iT = _param_indices(imm, decl.base_T_params)
    ith = _param_indices(imm, decl.base_theta_params)
    base = iT + ith
    gb = g[np.ix_(base, base)]
    db = d[base]
    vb = np.linalg.solve(gb, db)
    norm2_T = float(sum(vb[i] * db[i] for i, a in enumerate(base) if a in iT))
    norm2_th = float(sum(vb[i] * db[i] for i, a in enumerate(base) if a in ith))

    # xi in parameter coordinates (least squares against the pushforward)
    if sample is None:
        sample = second_fundamental_form(imm, p)
    coef, *_ = np.linalg.lstsq(sample.J, sample.xi, rcond=None)
    xi_ln_f = float(coef @ d)
    return GradLnF(grad_param=d, norm2_T=norm2_T, norm2_theta=norm2_th, xi_ln_f=xi_ln_f)


# ---------------------------------------------------------------------------
# Bishop product identity (Sasakian-independent)
# ---------------------------------------------------------------------------


def check_bishop(
    imm: Immersion,
    decl: ProductDeclaration,
    ws: WarpedStructure,
    p: Point,
    base_param: str,
    fiber_param: str,
    sample: Optional[GeometrySample] = None,
) -> float:
    """Residual of nabla_X Z = X(ln f) Z for coordinate fields X, Z.

    X is a base coordinate field, Z a fiber one.  This is a purely
    Riemannian warped-product identity and must hold whenever the induced
    metric has the warped form, regardless of the ambient structure.
    """
    if base_param not in decl.base_params or fiber_param not in decl.fiber_params:
        raise ValueError("check_bishop expects one base and one fiber parameter")
    if sample is None:
        sample = second_fundamental_form(imm, p)
    a = imm.params.index(base_param)
    c = imm.params.index(fiber_param)
    nab = sample.nabla_coords[a, c]   # ambient vector
    # tangential part in coordinate-field components
    tang = np.zeros_like(nab)
    for e in sample.tangent_frame:
        tang += sample.gdot(nab, e) * e
    beta, *_ = np.linalg.lstsq(sample.J, tang, rcond=None)
    d = _dlnf_params(imm, decl, ws, p)
    expected = np.zeros(imm.n)
    expected[c] = d[a]
    diff = beta - expected
    return float(np.sqrt(max(diff @ sample.g_ind @ diff, 0.0)))


# ---------------------------------------------------------------------------
# lemma residuals on the adapted frame
# ---------------------------------------------------------------------------


def _ambient(sample: GeometrySample, coef: np.ndarray) -> np.ndarray:
    return coef @ sample.tangent_frame


def _sigma_of(sample: GeometrySample, cu: np.ndarray, cv: np.ndarray) -> np.ndarray:
    return np.einsum("a,b,abC->C", cu, cv, sample.sigma)


def _normal_part(sample: GeometrySample, v: np.ndarray) -> np.ndarray:
    out = v.copy()
    for e in sample.tangent_frame:
        out -= sample.gdot(v, e) * e
    return out


def _direction_derivative_lnf(
    sample: GeometrySample, dlnf: np.ndarray, ambient_vec: np.ndarray
) -> float:
    """X(ln f) for an ambient tangent vector X, via parameter coordinates."""
    coef, *_ = np.linalg.lstsq(sample.J, ambient_vec, rcond=None)
    return float(coef @ dlnf)


def lemma_residuals(
    imm: Immersion,
    decl: ProductDeclaration,
    split: DistributionSplit,
    ws: WarpedStructure,
    sample: GeometrySample,
    tf: Optional[TFPair] = None,
) -> Dict[str, float]:
    """Max defects of the warped skew-CR identities at one sample.

    Keys: sigma_xi (sigma(U, xi) = -FU), xi_ln_f, dd_phi_dperp
    (g(sigma(D,D), phi D_perp) = 0), mixed_d_theta_perp (both vanishing
    inner products), theta_exchange (the sigma/F exchange identity on the
    slant block), invariant_transfer (g(sigma(phi X, Z), phi W) =
    X(ln f) g(Z, W)) and the two slant-fiber transfer identities.
    """
    tf = tf or skewcr_mod.tf_decompose(sample)
    g = sample.g_amb
    phi = sample.phi
    eta = sample.eta
    E = sample.tangent_frame
    dlnf = _dlnf_params(imm, decl, ws, sample.p)

    inv = split.block_of_kind("invariant")
    anti = split.block_of_kind("anti-invariant")
    slant = split.block_of_kind("slant")
    D = [row for row in inv.basis] if inv else []
    Dp = [row for row in anti.basis] if anti else []
    Dth = [row for row in slant.basis] if slant else []
    theta = slant.angle if slant else 0.0

    out: Dict[str, float] = {}

    # sigma(U, xi) = -FU, i.e. sigma(U, xi) + normal part of phi U = 0
    r = 0.0
    if tf.xi_coeffs is not None:
        for a in range(sample.n):
            cu = np.zeros(sample.n)
            cu[a] = 1.0
            val = _sigma_of(sample, cu, tf.xi_coeffs) + _normal_part(sample, phi @ E[a])
            r = max(r, sample.gnorm(val))
    out["sigma_xi"] = r

    grad = grad_ln_f(imm, decl, ws, sample.p, sample=sample)
    out["xi_ln_f"] = abs(grad.xi_ln_f)

    r = 0.0
    for cx in D:
        for cy in D:
            for cz in Dp:
                phiZ = phi @ _ambient(sample, cz)
                r = max(r, abs(float(_sigma_of(sample, cx, cy) @ g @ phiZ)))
    out["dd_phi_dperp"] = r

    r = 0.0
    for cx in D:
        for cv in Dth:
            for cz in Dp:
                phiZ = phi @ _ambient(sample, cz)
                FV = _normal_part(sample, phi @ _ambient(sample, cv))
                r = max(r, abs(float(_sigma_of(sample, cx, cv) @ g @ phiZ)))
                r = max(r, abs(float(_sigma_of(sample, cx, cz) @ g @ FV)))
    out["mixed_d_theta_perp"] = r

    r = 0.0
    for cu in Dth:
        for cv in Dth:
            for cz in Dp:
                phiZ = phi @ _ambient(sample, cz)
                FV = _normal_part(sample, phi @ _ambient(sample, cv))
                r = max(
                    r,
                    abs(
                        float(_sigma_of(sample, cu, cv) @ g @ phiZ)
                        - float(_sigma_of(sample, cu, cz) @ g @ FV)
                    ),
                )
    out["theta_exchange"] = r

    r = 0.0
    for cx in D:
        X = _ambient(sample, cx)
        Xlnf = _direction_derivative_lnf(sample, dlnf, X)
        cphiX = E @ g @ (phi @ X)     # phi X stays tangent on the invariant block
        for cz in Dp:
            for cw in Dp:
                phiW = phi @ _ambient(sample, cw)
                gZW = float(_ambient(sample, cz) @ g @ _ambient(sample, cw))
                r = max(
                    r,
                    abs(float(_sigma_of(sample, cphiX, cz) @ g @ phiW) - Xlnf * gZW),
                )
    out["invariant_transfer"] = r

    r1 = r2 = 0.0
    cos2 = math.cos(theta) ** 2
    for cv in Dth:
        V = _ambient(sample, cv)
        cTV = tf.T @ cv
        TV = _ambient(sample, cTV)
        Vlnf = _direction_derivative_lnf(sample, dlnf, V)
        TVlnf = _direction_derivative_lnf(sample, dlnf, TV)
        etaV = float(eta @ V)
        FV = _normal_part(sample, phi @ V)
        FTV = _normal_part(sample, phi @ TV)
        for cz in Dp:
            Z = _ambient(sample, cz)
            for cw in Dp:
                W = _ambient(sample, cw)
                phiW = phi @ W
                gZW = float(Z @ g @ W)
                r1 = max(
                    r1,
                    abs(
                        float(_sigma_of(sample, cz, cw) @ g @ FV)
                        - float(_sigma_of(sample, cz, cv) @ g @ phiW)
                        - (TVlnf + etaV) * gZW
                    ),
                )
                r2 = max(
                    r2,
                    abs(
                        float(_sigma_of(sample, cz, cw) @ g @ FTV)
                        - float(_sigma_of(sample, cz, cTV) @ g @ phiW)
                        + cos2 * Vlnf * gZW
                    ),
                )
    out["slant_fiber_transfer_i"] = r1
    out["slant_fiber_transfer_ii"] = r2
    return out


def mixed_tg_check(
    samples: Sequence[GeometrySample],
    splits: Sequence[DistributionSplit],
    pair: Tuple[str, str],
) -> float:
    """max ||sigma(X, Z)|| over basis vectors of the two named blocks."""
    r = 0.0
    for sample, split in zip(samples, splits):
        b1 = split.block_of_kind(pair[0])
        b2 = split.block_of_kind(pair[1])
        if b1 is None or b2 is None:
            continue
        for cu in b1.basis:
            for cv in b2.basis:
                r = max(r, sample.gnorm(_sigma_of(sample, cu, cv)))
    return r


# ---------------------------------------------------------------------------
# the main inequality report
# ---------------------------------------------------------------------------


def _span_distance(sample: GeometrySample, v: np.ndarray, span_rows: np.ndarray) -> float:
    """g-distance of v from the span of the given orthonormal rows."""
    w = v.copy()
    for q in span_rows:
        w = w - sample.gdot(q, w) * q
    return sample.gnorm(w)


def theorem41_report(
    imm: Immersion,
    decl: ProductDeclaration,
    split: DistributionSplit,
    ws: WarpedStructure,
    sample: GeometrySample,
    sasakian_ambient: bool,
    mixed_tg_residual: float,
    mixed_tol: float = 1e-6,
) -> TheoremReport:
    """Inequality sides, hypothesis flags and equality diagnostics at one point.

    When xi is declared in the fiber, the applicable statement is the
    non-existence result: f must be constant, reported through
    ``f_constant_check``.
    """
    from .immersion import sff_norm2

    lhs, lhs2 = sff_norm2(sample)
    grad = grad_ln_f(imm, decl, ws, sample.p, sample=sample)
    m2 = len(decl.fiber_params)
    theta = split.slant_angle if split.slant_angle is not None else math.pi / 2

    gT2, gth2 = grad.norm2_T, grad.norm2_theta
    cot2 = (math.cos(theta) / math.sin(theta)) ** 2
    csc2 = 1.0 / math.sin(theta) ** 2
    rhs_i = 2 * m2 * (gT2 + 1.0) + m2 * cot2 * gth2
    rhs_i_proof = 2 * m2 * (gT2 + 1.0) + m2 * csc2 * gth2
    rhs_ii = 2 * m2 * gT2 + m2 * cot2 * gth2

    f_const = None
    if decl.xi_location == "M_perp":
        f_const = ws.f_spread
        margin = lhs                      # no lower bound applies; informational
    else:
        rhs = rhs_i if decl.xi_location == "M_T" else rhs_ii
        margin = lhs - rhs

    flags = {
        "sasakian_ambient": sasakian_ambient,
        "mixed_totally_geodesic": mixed_tg_residual < mixed_tol,
        "mixed_tg_residual": mixed_tg_residual,
        "xi_location": decl.xi_location,
        "order1_skewcr": split.label == "skew CR order 1",
    }

    diag: Dict[str, float] = {
        "sigma_DD": mixed_tg_check([sample], [split], ("invariant", "invariant")),
        "sigma_DperpDtheta": mixed_tg_check(
            [sample], [split], ("anti-invariant", "slant")
        ),
        "sigma_DthetaDtheta": mixed_tg_check([sample], [split], ("slant", "slant")),
        "sigma_DDtheta": mixed_tg_check([sample], [split], ("invariant", "slant")),
    }
    ns = skewcr_mod.classify_normal(sample, split)
    inv = split.block_of_kind("invariant")
    anti = split.block_of_kind("anti-invariant")
    r_in = r_out = 0.0
    if inv is not None and anti is not None:
        for cx in inv.basis:
            for cz in anti.basis:
                r_in = max(
                    r_in,
                    _span_distance(sample, _sigma_of(sample, cx, cz), ns.phi_dperp),
                )
    if anti is not None:
        for cz in anti.basis:
            for cw in anti.basis:
                r_out = max(
                    r_out,
                    _span_distance(sample, _sigma_of(sample, cz, cw), ns.f_dtheta),
                )
    diag["sigma_DDperp_in_phiDperp"] = r_in
    diag["sigma_DperpDperp_in_FDtheta"] = r_out

    return TheoremReport(
        lhs=lhs,
        lhs_path2=lhs2,
        rhs_statement_i=rhs_i,
        rhs_statement_ii=rhs_ii,
        rhs_proof_variant_i=rhs_i_proof,
        margin=margin,
        hypothesis_flags=flags,
        equality_diagnostics=diag,
        f_constant_check=f_const,
    )


def special_case_rhs(
    m2: int, gT2: float, gtheta2: float, theta: float, case: str
) -> float:
    """Lower-bound values for the general and reduced inequalities.

    Cases: "general-i", "general-ii", "contact-cr" (no slant factor),
    "pseudo-slant" (no invariant factor).
    """
    if m2 < 1:
        raise ValueError("fiber dimension must be >= 1")
    if gT2 < 0 or gtheta2 < 0:
        raise ValueError("squared gradient norms must be nonnegative")
    if case == "contact-cr":
        return 2 * m2 * (gT2 + 1.0)
    needs_cot = case in ("pseudo-slant", "general-i", "general-ii")
    if needs_cot and not (0.0 < theta <= math.pi / 2):
        raise ValueError("slant angle must lie in (0, pi/2] for cot-based bounds")
    cot2 = (math.cos(theta) / math.sin(theta)) ** 2
    if case == "pseudo-slant":
        return m2 * cot2 * gtheta2
    if case == "general-i":
        return 2 * m2 * (gT2 + 1.0) + m2 * cot2 * gtheta2
    if case == "general-ii":
        return 2 * m2 * gT2 + m2 * cot2 * gtheta2
    raise ValueError(f"unknown case {case!r}")
