"""Extrinsic geometry of an immersion into an ambient model.

Everything is computed per parameter point: pushforward Jacobian, induced
metric, orthonormal tangent/normal frames (modified Gram-Schmidt in the
ambient metric), the second fundamental form, shape operators, mean
curvature and the squared norm of sigma via two independent paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import ambient as ambient_mod
from . import exprdsl
from .ambient import AmbientModel
from .exprdsl import Expr

__all__ = [
    "DegeneratePointError",
    "Immersion",
    "GeometrySample",
    "jacobian",
    "induced_metric",
    "orthonormal_frames",
    "second_fundamental_form",
    "shape_operator",
    "sff_norm2",
    "mean_curvature",
    "umbilicity_residual",
]

Point = Dict[str, float]

RANK_TOL = 1e-8


class DegeneratePointError(ValueError):
    """Jacobian rank below the immersion dimension at a sample point."""


@dataclass(frozen=True)
class Immersion:
    """Parametrized immersion of a box domain into an ambient model."""

    params: Tuple[str, ...]
    components: Tuple[Expr, ...]          # one per ambient coordinate
    domain: Dict[str, Tuple[float, float]]
    ambient: AmbientModel

    def __post_init__(self):
        if len(self.components) != self.ambient.dim:
            raise ValueError(
                f"immersion needs {self.ambient.dim} components, got {len(self.components)}"
            )
        if len(self.params) > self.ambient.dim:
            raise ValueError("immersion dimension exceeds ambient dimension")
        for name, (lo, hi) in self.domain.items():
            if lo > hi:
                raise ValueError(f"empty domain interval for {name!r}")

    @property
    def n(self) -> int:
        return len(self.params)

    def chart_point(self, p: Point) -> Point:
        """Ambient chart coordinates of psi(p)."""
        vals = [exprdsl.evaluate(c, p) for c in self.components]
        return dict(zip(self.ambient.coords, vals))

    def sample_points(self, count: int, seed: int) -> List[Point]:
        """Seeded uniform samples from the domain box, declaration order."""
        rng = np.random.default_rng(seed)
        draws = rng.uniform(size=(count, self.n))
        out = []
        for row in draws:
            out.append(
                {
                    name: self.domain[name][0]
                    + r * (self.domain[name][1] - self.domain[name][0])
                    for name, r in zip(self.params, row)
                }
            )
        return out


@dataclass(frozen=True)
class GeometrySample:
    """All pointwise geometric data at one parameter point."""

    p: Point
    x: Point                       # ambient chart point
    J: np.ndarray                  # (dim x n) pushforward, columns = d psi/d u_a
    g_amb: np.ndarray              # ambient metric at x
    g_ind: np.ndarray              # induced metric (n x n)
    tangent_frame: np.ndarray      # (n x dim) orthonormal rows e_a
    normal_frame: np.ndarray       # ((dim-n) x dim) orthonormal rows N_r
    tangent_coeffs: np.ndarray     # (n x n): e_a = sum_b C[a,b] J[:,b]
    sigma: np.ndarray              # (n x n x dim) sigma(e_a, e_b) ambient vectors
    sigma_coords: np.ndarray       # (n x n x dim) sigma(d_a, d_b) on coordinate fields
    nabla_coords: np.ndarray       # (n x n x dim) full ambient nabla_{d_a} d_b

    @property
    def n(self) -> int:
        return self.J.shape[1]

    @property
    def codim(self) -> int:
        return self.normal_frame.shape[0]

    def gdot(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ self.g_amb @ v)

    def gnorm(self, v: np.ndarray) -> float:
        return float(np.sqrt(max(self.gdot(v, v), 0.0)))

    # structure tensors evaluated at x, attached by second_fundamental_form
    _phi: np.ndarray = field(default=None, compare=False)
    _xi: np.ndarray = field(default=None, compare=False)
    _eta: np.ndarray = field(default=None, compare=False)

    @property
    def phi(self) -> np.ndarray:
        return self._phi

    @property
    def xi(self) -> np.ndarray:
        return self._xi

    @property
    def eta(self) -> np.ndarray:
        return self._eta


# ---------------------------------------------------------------------------
# pointwise machinery
# ---------------------------------------------------------------------------


def jacobian(imm: Immersion, p: Point) -> np.ndarray:
    """Pushforward matrix, column a = d psi / d u_a; raises if rank-deficient."""
    d, n = imm.ambient.dim, imm.n
    J = np.zeros((d, n))
    env = {name: p[name] for name in imm.params}
    for c in range(d):
        J[c, :] = _component_gradient(imm.components[c], imm.params, env)
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[-1] < RANK_TOL * max(1.0, sv[0]):
        raise DegeneratePointError(f"immersion degenerate at {p}")
    return J


def _component_gradient(e: Expr, params: Sequence[str], env: Point) -> np.ndarray:
    g = exprdsl.gradient(e, env)
    # expressions are declared over the immersion parameter list
    return g


def induced_metric(imm: Immersion, p: Point) -> np.ndarray:
    J = jacobian(imm, p)
    g = imm.ambient.metric_at(imm.chart_point(p))
    return J.T @ g @ J


def _mgs(
    vectors: np.ndarray,
    g: np.ndarray,
    track_coeffs: bool = False,
    drop_tol: float = 1e-10,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Modified Gram-Schmidt in the inner product of ``g`` over the rows.

    Re-orthogonalizes a row when any projection coefficient exceeds 0.7.
    Rows whose residual norm falls below drop_tol (relative) are dropped.
    Returns the orthonormal rows and, optionally, the coefficient matrix
    expressing each output row in terms of the kept input rows.
    """
    rows: List[np.ndarray] = []
    coeffs: List[np.ndarray] = []
    nin = vectors.shape[0]
    for i in range(nin):
        v = vectors[i].astype(float).copy()
        c = np.zeros(nin)
        c[i] = 1.0
        scale = float(np.sqrt(max(v @ g @ v, 0.0)))
        for _pass in range(2):
            redo = False
            for q, cq in zip(rows, coeffs):
                proj = float(q @ g @ v)
                v = v - proj * q
                c = c - proj * cq
                if abs(proj) > 0.7:
                    redo = True
            if not redo:
                break
        nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
        if nrm < drop_tol * max(1.0, scale):
            continue
        rows.append(v / nrm)
        coeffs.append(c / nrm)
    Qm = np.array(rows) if rows else np.zeros((0, vectors.shape[1]))
    Cm = np.array(coeffs) if rows else np.zeros((0, nin))
    return Qm, (Cm if track_coeffs else None)


def orthonormal_frames(
    imm: Immersion,
    p: Point,
    ordering: Optional[Sequence[int]] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal tangent and normal frames at psi(p).

    The tangent frame comes from modified Gram-Schmidt over the Jacobian
    columns (in ``ordering`` if given, else declaration order); the
    normal frame completes it with pivoted Gram-Schmidt over the ambient
    coordinate vectors.  Returns (tangent_frame, normal_frame, coeffs)
    with rows as ambient vectors and ``coeffs`` mapping frame rows to
    Jacobian columns in *declaration* order.
    """
    J = jacobian(imm, p)
    x = imm.chart_point(p)
    g = imm.ambient.metric_at(x)
    n, d = imm.n, imm.ambient.dim
    order = list(ordering) if ordering is not None else list(range(n))
    if sorted(order) != list(range(n)):
        raise ValueError("ordering must be a permutation of the parameter indices")
    tangent, C_perm = _mgs(J.T[order], g, track_coeffs=True)
    if tangent.shape[0] != n:
        raise DegeneratePointError(f"tangent frame collapsed at {p}")
    # undo the permutation in the coefficient matrix
    C = np.zeros((n, n))
    C[:, order] = C_perm

    # completion: pivot on the coordinate vector with the largest residual
    normals: List[np.ndarray] = []
    basis = np.eye(d)
    frame = [row for row in tangent]
    while len(frame) < d:
        best, best_norm = None, -1.0
        for b in basis:
            v = b.copy()
            for q in frame + normals:
                v = v - float(q @ g @ v) * q
            nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
            if nrm > best_norm:
                best, best_norm = v, nrm
        if best_norm < 1e-12:
            raise ValueError("could not complete ambient frame")
        v = best
        for q in frame + normals:  # re-orthogonalization pass
            v = v - float(q @ g @ v) * q
        nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
        normals.append(v / nrm)
        frame.append(normals[-1])
    normal = np.array(normals) if normals else np.zeros((0, d))
    return tangent, normal, C


def second_fundamental_form(
    imm: Immersion,
    p: Point,
    ordering: Optional[Sequence[int]] = None,
) -> GeometrySample:
    """Full geometry bundle at ``p`` with sigma on the orthonormal frame.

    For coordinate fields, the ambient derivative nabla_{d_a} d_b has
    components d2 psi^C / du_a du_b + Gamma^C_AB J^A_a J^B_b; sigma is
    its normal projection, transported to the orthonormal tangent frame
    by bilinearity.
    """
    J = jacobian(imm, p)
    x = imm.chart_point(p)
    g = imm.ambient.metric_at(x)
    g_ind = J.T @ g @ J
    tangent, normal, C = orthonormal_frames(imm, p, ordering)
    n, d = imm.n, imm.ambient.dim

    env = {name: p[name] for name in imm.params}
    hess = np.zeros((d, n, n))
    for c in range(d):
        hess[c] = exprdsl.hessian(imm.components[c], env)
    gamma = ambient_mod.christoffel(imm.ambient, x)
    nabla = hess.transpose(1, 2, 0) + np.einsum("cAB,Aa,Bb->abc", gamma, J, J)
    # nabla[a, b, :] = ambient nabla_{d_a} d_b at psi(p)

    # normal projection: subtract tangential components on the orthonormal frame
    proj = np.einsum("abC,iD,CD->abi", nabla, tangent, g)  # g(nabla_ab, e_i)
    sigma_coords = nabla - np.einsum("abi,iC->abC", proj, tangent)
    sigma_frame = np.einsum("ia,jb,abC->ijC", C, C, sigma_coords)

    return GeometrySample(
        p=dict(p),
        x=x,
        J=J,
        g_amb=g,
        g_ind=g_ind,
        tangent_frame=tangent,
        normal_frame=normal,
        tangent_coeffs=C,
        sigma=sigma_frame,
        sigma_coords=sigma_coords,
        nabla_coords=nabla,
        _phi=imm.ambient.phi_at(x),
        _xi=imm.ambient.xi_at(x),
        _eta=imm.ambient.eta_at(x),
    )


def shape_operator(sample: GeometrySample, N: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """A_N in the orthonormal tangent frame via g(sigma(e_a,e_b), N)."""
    tang = np.array([sample.gdot(N, e) for e in sample.tangent_frame])
    if np.max(np.abs(tang)) > tol * max(1.0, sample.gnorm(N)):
        raise ValueError("N is not a normal vector")
    return np.einsum("abC,CD,D->ab", sample.sigma, sample.g_amb, N)


def sff_norm2(sample: GeometrySample) -> Tuple[float, float]:
    """||sigma||^2 by frame contraction and by normal-component sums.

    Path 1 contracts sigma(e_a, e_b) with the ambient metric directly;
    path 2 sums squared components sigma^r_ab over the orthonormal normal
    frame.  Both are returned for cross-checking.
    """
    path1 = float(np.einsum("abC,CD,abD->", sample.sigma, sample.g_amb, sample.sigma))
    comps = np.einsum("abC,CD,rD->rab", sample.sigma, sample.g_amb, sample.normal_frame)
    path2 = float(np.sum(comps**2))
    return path1, path2


def mean_curvature(sample: GeometrySample) -> np.ndarray:
    """Mean curvature vector H = trace of sigma over the frame / n."""
    n = sample.n
    return np.einsum("aaC->C", sample.sigma) / n


def umbilicity_residual(sample: GeometrySample) -> float:
    """max ||sigma(e_a,e_b) - delta_ab H|| -- zero iff totally umbilical."""
    H = mean_curvature(sample)
    n = sample.n
    res = 0.0
    for a in range(n):
        for b in range(n):
            diff = sample.sigma[a, b] - (H if a == b else 0.0)
            res = max(res, sample.gnorm(diff))
    return res
