"""Tangential/normal split of phi and Q = T^2 eigenstructure.

The tangent bundle of the submanifold decomposes into eigenspaces of the
symmetric operator Q = T^2 restricted to the orthogonal complement of
the Reeb direction.  Eigenvalue -1 marks the invariant block, 0 the
anti-invariant block, and values strictly between give slant blocks with
angle arccos(sqrt(-mu)).  The normal bundle then tiles into phi(D_perp),
F(D_theta) and a phi-invariant complement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .immersion import GeometrySample

__all__ = [
    "TFPair",
    "Block",
    "DistributionSplit",
    "NormalSplit",
    "tf_decompose",
    "classify",
    "verify_slant_identities",
    "classify_normal",
    "label_from_blocks",
    "constancy_spread",
]


@dataclass(frozen=True)
class TFPair:
    """phi split on the sample frame: phi e = T e (tangent) + F e (normal)."""

    T: np.ndarray                     # (n x n), column b = tangential part of phi e_b
    F: np.ndarray                     # (codim x n), normal-frame components
    xi_coeffs: Optional[np.ndarray]   # xi in the tangent frame, None if not tangent
    xi_tangency_defect: float


@dataclass(frozen=True)
class Block:
    eigenvalue: float                 # mu in [-1, 0]
    dimension: int
    angle: float                      # arccos(sqrt(-mu)), radians
    basis: np.ndarray                 # (dim_block x n) coefficients in the tangent frame

    @property
    def kind(self) -> str:
        if self.eigenvalue < -1.0 + 1e-6:
            return "invariant"
        if self.eigenvalue > -1e-6:
            return "anti-invariant"
        return "slant"


@dataclass(frozen=True)
class DistributionSplit:
    blocks: Tuple[Block, ...]
    xi_coeffs: Optional[np.ndarray]
    label: str

    def block_of_kind(self, kind: str) -> Optional[Block]:
        for b in self.blocks:
            if b.kind == kind:
                return b
        return None

    @property
    def dims(self) -> Dict[str, int]:
        out = {"invariant": 0, "anti-invariant": 0, "slant": 0}
        for b in self.blocks:
            out[b.kind] += b.dimension
        return out

    @property
    def slant_angle(self) -> Optional[float]:
        b = self.block_of_kind("slant")
        return b.angle if b is not None else None


@dataclass(frozen=True)
class NormalSplit:
    phi_dperp: np.ndarray      # (m2 x dim) ambient orthonormal basis of phi(D_perp)
    f_dtheta: np.ndarray       # (m3 x dim) ambient orthonormal basis of F(D_theta)
    mu: np.ndarray             # (k x dim) complement basis
    mu_invariance_defect: float

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (self.phi_dperp.shape[0], self.f_dtheta.shape[0], self.mu.shape[0])


# ---------------------------------------------------------------------------


def tf_decompose(sample: GeometrySample, xi_tol: float = 1e-8) -> TFPair:
    """Split phi restricted to the tangent frame into T and F parts."""
    g = sample.g_amb
    phi = sample.phi
    E = sample.tangent_frame          # rows e_a
    N = sample.normal_frame
    phiE = (phi @ E.T)                # column b = phi e_b
    T = E @ g @ phiE                  # T[a,b] = g(phi e_b, e_a)
    F = N @ g @ phiE if N.shape[0] else np.zeros((0, E.shape[0]))
    xi = sample.xi
    coef = E @ g @ xi
    defect = sample.gnorm(xi - coef @ E)
    tangent = defect < xi_tol * max(1.0, sample.gnorm(xi))
    return TFPair(T=T, F=F, xi_coeffs=coef if tangent else None, xi_tangency_defect=defect)


def classify(
    sample: GeometrySample,
    tol_cluster: float = 1e-6,
    tf: Optional[TFPair] = None,
) -> DistributionSplit:
    """Eigenspace decomposition of Q = T^2 on the complement of xi.

    Eigenvalues are clustered within ``tol_cluster``; each cluster becomes
    a block with slant angle arccos(sqrt(-mu)).  The label follows the
    skew-CR taxonomy (invariant / anti-invariant / slant / contact CR /
    semi-slant / pseudo-slant / skew CR order 1 / generic).
    """
    tf = tf or tf_decompose(sample)
    n = tf.T.shape[0]
    Q = tf.T @ tf.T

    if tf.xi_coeffs is not None:
        # orthonormal basis of the complement of xi inside frame coordinates
        u = tf.xi_coeffs / np.linalg.norm(tf.xi_coeffs)
        B = _complement_basis(u)      # (n x (n-1)), columns orthonormal, perp to u
    else:
        B = np.eye(n)
    Qr = B.T @ Q @ B
    evals, evecs = np.linalg.eigh(0.5 * (Qr + Qr.T))

    if np.any(evals < -1.0 - 1e-7) or np.any(evals > 1e-7):
        raise ValueError(f"Q eigenvalues outside [-1, 0]: {evals}")

    blocks: List[Block] = []
    i = 0
    while i < len(evals):
        j = i
        while j + 1 < len(evals) and evals[j + 1] - evals[i] < tol_cluster:
            j += 1
        mu = float(np.mean(evals[i : j + 1]))
        mu_cl = min(0.0, max(-1.0, mu))
        basis = (B @ evecs[:, i : j + 1]).T   # rows in frame coordinates
        blocks.append(
            Block(
                eigenvalue=mu_cl,
                dimension=j - i + 1,
                angle=float(np.arccos(np.sqrt(-mu_cl))),
                basis=basis,
            )
        )
        i = j + 1
    blocks.sort(key=lambda b: b.eigenvalue)
    label = label_from_blocks(blocks, tf.xi_coeffs is not None)
    return DistributionSplit(blocks=tuple(blocks), xi_coeffs=tf.xi_coeffs, label=label)


def _complement_basis(u: np.ndarray) -> np.ndarray:
    n = len(u)
    # householder reflection mapping e_1 to u; remaining columns span u-perp
    e1 = np.zeros(n)
    e1[0] = 1.0
    w = u - e1 if u[0] >= 0 else u + e1
    if np.linalg.norm(w) < 1e-14:
        return np.eye(n)[:, 1:]
    w = w / np.linalg.norm(w)
    # H is orthogonal with H e1 = +/-u, so its trailing columns span u-perp
    H = np.eye(n) - 2.0 * np.outer(w, w)
    return H[:, 1:]


def label_from_blocks(blocks: Sequence[Block], xi_tangent: bool) -> str:
    inv = sum(b.dimension for b in blocks if b.kind == "invariant")
    anti = sum(b.dimension for b in blocks if b.kind == "anti-invariant")
    slant_blocks = [b for b in blocks if b.kind == "slant"]
    k = len(slant_blocks)
    if k == 0:
        if inv and anti:
            return "contact CR"
        if inv:
            return "invariant"
        if anti:
            return "anti-invariant"
        return "generic"
    if k == 1:
        if inv and anti:
            return "skew CR order 1"
        if inv:
            return "semi-slant"
        if anti:
            return "pseudo-slant"
        return "slant"
    return "generic"


def verify_slant_identities(
    sample: GeometrySample,
    split: DistributionSplit,
    tf: Optional[TFPair] = None,
    seed: int = 0,
    combos: int = 8,
) -> Dict[str, float]:
    """Residuals of the slant characterization on the slant block.

    Checks T^2 = -cos^2(theta) (I - eta (x) xi), g(TX,TY) and g(FX,FY)
    against cos^2/sin^2 scalings over the block basis and seeded random
    combinations of it.
    """
    tf = tf or tf_decompose(sample)
    block = split.block_of_kind("slant")
    if block is None:
        raise ValueError("split has no slant block")
    theta = block.angle
    cos2, sin2 = np.cos(theta) ** 2, np.sin(theta) ** 2

    rng = np.random.default_rng(seed)
    vecs = [row for row in block.basis]
    for _ in range(combos):
        w = rng.standard_normal(block.dimension)
        v = w @ block.basis
        vecs.append(v / np.linalg.norm(v))

    E = sample.tangent_frame
    g = sample.g_amb
    eta = sample.eta
    xi = sample.xi
    r_t2 = r_tt = r_ff = 0.0
    for cx in vecs:
        X = cx @ E                       # ambient vector
        TX = tf.T @ cx
        FX = tf.F @ cx if tf.F.shape[0] else np.zeros(0)
        T2X = tf.T @ TX
        # T^2 X vs -cos^2 (X - eta(X) xi), compared in frame coordinates
        etaX = float(eta @ X)
        ref = -cos2 * (cx - etaX * (tf.xi_coeffs if tf.xi_coeffs is not None else 0.0))
        r_t2 = max(r_t2, float(np.max(np.abs(T2X - ref))))
        for cy in vecs:
            Y = cy @ E
            TY = tf.T @ cy
            FY = tf.F @ cy if tf.F.shape[0] else np.zeros(0)
            gXY = float(X @ g @ Y)
            etaY = float(eta @ Y)
            base = gXY - etaX * etaY
            r_tt = max(r_tt, abs(float(TX @ TY) - cos2 * base))
            r_ff = max(r_ff, abs(float(FX @ FY) - sin2 * base))
    return {"t_squared": r_t2, "g_TT": r_tt, "g_FF": r_ff}


def classify_normal(
    sample: GeometrySample,
    split: DistributionSplit,
    tf: Optional[TFPair] = None,
    tol: float = 1e-8,
) -> NormalSplit:
    """Tile the normal bundle as phi(D_perp) + F(D_theta) + mu."""
    tf = tf or tf_decompose(sample)
    g = sample.g_amb
    phi = sample.phi
    E = sample.tangent_frame
    N = sample.normal_frame
    codim = N.shape[0]

    def span_rows(vectors: List[np.ndarray]) -> np.ndarray:
        if not vectors:
            return np.zeros((0, sample.g_amb.shape[0]))
        from .immersion import _mgs

        Q, _ = _mgs(np.array(vectors), g)
        return Q

    anti = split.block_of_kind("anti-invariant")
    slant = split.block_of_kind("slant")
    phi_dperp = span_rows([phi @ (c @ E) for c in anti.basis] if anti else [])
    f_dtheta_raw = []
    if slant is not None:
        for c in slant.basis:
            v = phi @ (c @ E)
            v = v - np.array([float(e @ g @ v) for e in E]) @ E   # keep normal part
            f_dtheta_raw.append(v)
    f_dtheta = span_rows(f_dtheta_raw)

    # mu: complement of the two spans inside the normal frame
    mu_rows = []
    for nr in N:
        v = nr.copy()
        for q in list(phi_dperp) + list(f_dtheta) + mu_rows:
            v = v - float(q @ g @ v) * q
        nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
        if nrm > 1e-8:
            mu_rows.append(v / nrm)
    mu = np.array(mu_rows) if mu_rows else np.zeros((0, N.shape[1]))

    d_p, d_f, d_m = phi_dperp.shape[0], f_dtheta.shape[0], mu.shape[0]
    if d_p + d_f + d_m != codim:
        raise ValueError(
            f"normal split dims ({d_p},{d_f},{d_m}) do not tile codimension {codim}"
        )

    # phi-invariance of mu: phi(mu) should stay inside mu
    defect = 0.0
    for v in mu:
        w = phi @ v
        for q in mu:
            w = w - float(q @ g @ w) * q
        defect = max(defect, float(np.sqrt(max(w @ g @ w, 0.0))))
    return NormalSplit(
        phi_dperp=phi_dperp, f_dtheta=f_dtheta, mu=mu, mu_invariance_defect=defect
    )


def constancy_spread(angles: Sequence[float]) -> float:
    """Spread of per-sample slant angles; large spread means 'generic'."""
    if not angles:
        return 0.0
    return float(np.max(angles) - np.min(angles))
