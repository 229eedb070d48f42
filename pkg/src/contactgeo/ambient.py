"""Almost contact metric ambient spaces on a single global chart.

An :class:`AmbientModel` stores the metric, the structure tensor phi, the
Reeb field xi and its dual 1-form eta as expression-valued tensors in the
chart coordinates.  Two built-in models cover everything the scenario
suite needs: the flat model (Euclidean metric, constant phi) and the
standard Sasakian structure on R^(2m+1).

Structure checks report residuals instead of asserting: the flat models
are almost contact metric but deliberately *not* Sasakian, and the
harness has to be able to say so.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import exprdsl
from .exprdsl import Expr

__all__ = [
    "AmbientModel",
    "StructureResiduals",
    "flat_model",
    "sasakian_model",
    "christoffel",
    "covariant_derivative",
    "check_structure",
]

ChartPoint = Dict[str, float]


@dataclass(frozen=True)
class AmbientModel:
    """(2m+1)-dimensional almost contact metric manifold on one chart."""

    m: int
    coords: Tuple[str, ...]
    metric: Tuple[Tuple[Expr, ...], ...]   # g_{AB}
    phi: Tuple[Tuple[Expr, ...], ...]      # phi^A_B (row = upper index)
    xi: Tuple[Expr, ...]                   # xi^A
    eta: Tuple[Expr, ...]                  # eta_A

    @property
    def dim(self) -> int:
        return 2 * self.m + 1

    # -- pointwise tensor evaluation -------------------------------------

    def metric_at(self, x: ChartPoint) -> np.ndarray:
        return np.array([[exprdsl.evaluate(e, x) for e in row] for row in self.metric])

    def phi_at(self, x: ChartPoint) -> np.ndarray:
        return np.array([[exprdsl.evaluate(e, x) for e in row] for row in self.phi])

    def xi_at(self, x: ChartPoint) -> np.ndarray:
        return np.array([exprdsl.evaluate(e, x) for e in self.xi])

    def eta_at(self, x: ChartPoint) -> np.ndarray:
        return np.array([exprdsl.evaluate(e, x) for e in self.eta])

    def metric_partials(self, x: ChartPoint) -> np.ndarray:
        """d_A g_{BC}, indexed [A, B, C]."""
        d = self.dim
        out = np.zeros((d, d, d))
        for b in range(d):
            for c in range(d):
                out[:, b, c] = exprdsl.gradient(self.metric[b][c], x)
        return out

    def phi_partials(self, x: ChartPoint) -> np.ndarray:
        """d_A phi^B_C, indexed [A, B, C]."""
        d = self.dim
        out = np.zeros((d, d, d))
        for b in range(d):
            for c in range(d):
                out[:, b, c] = exprdsl.gradient(self.phi[b][c], x)
        return out

    def eta_partials(self, x: ChartPoint) -> np.ndarray:
        """d_A eta_B, indexed [A, B]."""
        d = self.dim
        out = np.zeros((d, d))
        for b in range(d):
            out[:, b] = exprdsl.gradient(self.eta[b], x)
        return out


@dataclass(frozen=True)
class StructureResiduals:
    """Max identity defects over the sampled points/directions."""

    almost_contact: float
    compatibility: float
    contact_metric: float
    normality: float
    sasakian: float
    xi_derivative: float

    def as_dict(self) -> Dict[str, float]:
        return {
            "almost_contact": self.almost_contact,
            "compatibility": self.compatibility,
            "contact_metric": self.contact_metric,
            "normality": self.normality,
            "sasakian": self.sasakian,
            "xi_derivative": self.xi_derivative,
        }


# ---------------------------------------------------------------------------
# built-in models
# ---------------------------------------------------------------------------


def _const_grid(coords: Sequence[str], values: np.ndarray) -> Tuple[Tuple[Expr, ...], ...]:
    return tuple(
        tuple(exprdsl.parse(repr(float(v)), coords) for v in row) for row in values
    )


def _const_vec(coords: Sequence[str], values: np.ndarray) -> Tuple[Expr, ...]:
    return tuple(exprdsl.parse(repr(float(v)), coords) for v in values)


def flat_model(m: int) -> AmbientModel:
    """Euclidean R^(2m+1) with coordinates (x_1..x_m, y_1..y_m, t).

    phi(dx_i) = -dy_i, phi(dy_j) = dx_j, phi(dt) = 0, xi = dt, eta = dt.
    Almost contact metric but not Sasakian (the flat connection gives
    nabla phi = 0).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    coords = tuple(f"x{i+1}" for i in range(m)) + tuple(f"y{i+1}" for i in range(m)) + ("t",)
    d = 2 * m + 1
    g = np.eye(d)
    phi = np.zeros((d, d))
    for i in range(m):
        phi[m + i, i] = -1.0   # phi(d/dx_i) = -d/dy_i
        phi[i, m + i] = 1.0    # phi(d/dy_i) = d/dx_i
    xi = np.zeros(d)
    xi[-1] = 1.0
    eta = np.zeros(d)
    eta[-1] = 1.0
    return AmbientModel(
        m=m,
        coords=coords,
        metric=_const_grid(coords, g),
        phi=_const_grid(coords, phi),
        xi=_const_vec(coords, xi),
        eta=_const_vec(coords, eta),
    )


def sasakian_model(m: int) -> AmbientModel:
    """Standard Sasakian structure on R^(2m+1).

    eta = (dz - sum y_i dx_i)/2, xi = 2 d/dz,
    g = eta (x) eta + (sum dx_i^2 + dy_i^2)/4,
    phi(dx_i) = -dy_i, phi(dy_i) = dx_i + y_i dz, phi(dz) = 0.

    The sign conventions are pinned by check_structure: this model passes
    the Sasakian identity with residual < 1e-12 (see the test suite).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    coords = tuple(f"x{i+1}" for i in range(m)) + tuple(f"y{i+1}" for i in range(m)) + ("z",)
    d = 2 * m + 1

    def y(i):  # coordinate name helpers
        return f"y{i+1}"

    # eta components
    eta_src = ["0"] * d
    for i in range(m):
        eta_src[i] = f"-{y(i)}/2"
    eta_src[-1] = "1/2"

    # metric: eta_A eta_B + delta/4 on the x,y block
    g_src = [["0"] * d for _ in range(d)]
    for a in range(d):
        for b in range(d):
            terms = []
            if eta_src[a] != "0" and eta_src[b] != "0":
                terms.append(f"({eta_src[a]})*({eta_src[b]})")
            if a == b and a < 2 * m:
                terms.append("1/4")
            g_src[a][b] = " + ".join(terms) if terms else "0"

    phi_src = [["0"] * d for _ in range(d)]
    for i in range(m):
        phi_src[m + i][i] = "-1"       # phi(dx_i) = -dy_i
        phi_src[i][m + i] = "1"        # phi(dy_i) = dx_i + y_i dz
        phi_src[d - 1][m + i] = y(i)

    xi_src = ["0"] * d
    xi_src[-1] = "2"

    p = lambda s: exprdsl.parse(s, coords)
    return AmbientModel(
        m=m,
        coords=coords,
        metric=tuple(tuple(p(s) for s in row) for row in g_src),
        phi=tuple(tuple(p(s) for s in row) for row in phi_src),
        xi=tuple(p(s) for s in xi_src),
        eta=tuple(p(s) for s in eta_src),
    )


# ---------------------------------------------------------------------------
# Levi-Civita connection
# ---------------------------------------------------------------------------


def christoffel(model: AmbientModel, x: ChartPoint) -> np.ndarray:
    """Gamma^C_{AB} of the Levi-Civita connection, indexed [C, A, B]."""
    g = model.metric_at(x)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError:
        raise ValueError("metric singular at chart point")
    dg = model.metric_partials(x)  # [A, B, C] = d_A g_BC
    # Gamma^C_AB = 1/2 g^CD (d_A g_BD + d_B g_AD - d_D g_AB)
    sym = dg + np.einsum("bad->abd", dg) - np.einsum("dab->abd", dg)
    gamma = 0.5 * np.einsum("cd,abd->cab", ginv, sym)
    return gamma


def covariant_derivative(
    model: AmbientModel,
    X: Sequence[Expr],
    Y: Sequence[Expr],
    x: ChartPoint,
) -> np.ndarray:
    """(nabla_X Y)^C = X^A d_A Y^C + Gamma^C_AB X^A Y^B at the chart point."""
    d = model.dim
    Xv = np.array([exprdsl.evaluate(e, x) for e in X])
    Yv = np.array([exprdsl.evaluate(e, x) for e in Y])
    dY = np.zeros((d, d))  # [A, C] = d_A Y^C
    for c in range(d):
        dY[:, c] = exprdsl.gradient(Y[c], x)
    gamma = christoffel(model, x)
    return Xv @ dY + np.einsum("cab,a,b->c", gamma, Xv, Yv)


# ---------------------------------------------------------------------------
# structure checks
# ---------------------------------------------------------------------------


def _gnorm(g: np.ndarray, v: np.ndarray) -> float:
    return float(np.sqrt(max(v @ g @ v, 0.0)))


def _unit_vectors(g: np.ndarray, rng: np.random.Generator, count: int) -> List[np.ndarray]:
    """g-unit coordinate directions plus ``count`` random ones."""
    d = g.shape[0]
    out = [e / _gnorm(g, e) for e in np.eye(d)]
    for _ in range(count):
        v = rng.standard_normal(d)
        out.append(v / _gnorm(g, v))
    return out


def _nabla_const_field(
    gamma: np.ndarray, Xv: np.ndarray, Yv: np.ndarray
) -> np.ndarray:
    """nabla_X Y for coordinate-constant fields: pure Christoffel term."""
    return np.einsum("cab,a,b->c", gamma, Xv, Yv)


def check_structure(
    model: AmbientModel,
    points: Sequence[ChartPoint],
    seed: int = 0,
    directions_per_point: int = 4,
) -> StructureResiduals:
    """Max residuals of the almost contact / Sasakian identities.

    Test vectors are coordinate-constant fields, unit-normalized in the
    metric at each point so the residual magnitudes are scale-free.
    d(eta) uses the half convention d(eta)(X,Y) = (X eta(Y) - Y eta(X))/2.
    """
    if not points:
        raise ValueError("need at least one sample point")
    rng = np.random.default_rng(seed)

    r_ac = r_comp = r_cm = r_norm = r_sas = r_xi = 0.0
    for x in points:
        g = model.metric_at(x)
        phi = model.phi_at(x)
        xi = model.xi_at(x)
        eta = model.eta_at(x)
        d = model.dim
        gamma = christoffel(model, x)
        dphi = model.phi_partials(x)   # [A, B, C] = d_A phi^B_C
        deta = model.eta_partials(x)   # [A, B] = d_A eta_B

        # pointwise almost-contact identities
        m_ac = phi @ phi + np.eye(d) - np.outer(xi, eta)
        r_ac = max(
            r_ac,
            float(np.max(np.abs(m_ac))),
            abs(float(eta @ xi) - 1.0),
            float(np.max(np.abs(phi @ xi))),
            float(np.max(np.abs(eta @ phi))),
        )

        vecs = _unit_vectors(g, rng, directions_per_point)
        pairs = [(u, v) for u in vecs for v in vecs]

        deta_half = 0.5 * (deta - deta.T)  # [A, B] -> d(eta)(e_A, e_B)

        for X, Y in pairs:
            # compatibility of the metric with phi
            r_comp = max(
                r_comp,
                abs(float((phi @ X) @ g @ (phi @ Y) - X @ g @ Y + (eta @ X) * (eta @ Y))),
            )
            # fundamental 2-form vs d(eta)
            Phi_XY = float(X @ g @ (phi @ Y))
            r_cm = max(r_cm, abs(Phi_XY - float(X @ deta_half @ Y)))

            # Sasakian identity (nabla_X phi)Y = g(X,Y) xi - eta(Y) X
            # for constant fields: nabla_X(phiY) - phi nabla_X Y
            d_phiY = np.einsum("abc,a,c->b", dphi, X, Y)  # X^A d_A (phi^B_C Y^C)
            nab_phiY = d_phiY + _nabla_const_field(gamma, X, phi @ Y)
            lhs = nab_phiY - phi @ _nabla_const_field(gamma, X, Y)
            rhs = float(X @ g @ Y) * xi - float(eta @ Y) * X
            r_sas = max(r_sas, _gnorm(g, lhs - rhs))

            # Nijenhuis tensor with constant fields ([X,Y]=0):
            # [phiX, phiY] - phi[phiX, Y] - phi[X, phiY] + 2 d(eta)(X,Y) xi
            br_pXpY = np.einsum("abc,a,c->b", dphi, phi @ X, Y) - np.einsum(
                "abc,a,c->b", dphi, phi @ Y, X
            )
            br_pX_Y = -np.einsum("abc,a,c->b", dphi, Y, X)   # [phiX, Y], Y constant
            br_X_pY = np.einsum("abc,a,c->b", dphi, X, Y)    # [X, phiY]
            n_phi = (
                br_pXpY
                - phi @ br_pX_Y
                - phi @ br_X_pY
                + 2.0 * float(X @ deta_half @ Y) * xi
            )
            r_norm = max(r_norm, _gnorm(g, n_phi))

        # nabla_X xi = -phi X
        for X in vecs:
            d_xi = np.zeros(d)
            for c in range(d):
                d_xi[c] = X @ exprdsl.gradient(model.xi[c], x)
            nab_xi = d_xi + _nabla_const_field(gamma, X, xi)
            r_xi = max(r_xi, _gnorm(g, nab_xi + phi @ X))

    return StructureResiduals(
        almost_contact=r_ac,
        compatibility=r_comp,
        contact_metric=r_cm,
        normality=r_norm,
        sasakian=r_sas,
        xi_derivative=r_xi,
    )
