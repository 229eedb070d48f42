"""Extrinsic geometry: Jacobian, frames, second fundamental form."""

import numpy as np
import pytest

from contactgeo import exprdsl
from contactgeo.ambient import flat_model, sasakian_model
from contactgeo.immersion import (
    DegeneratePointError,
    Immersion,
    induced_metric,
    jacobian,
    mean_curvature,
    orthonormal_frames,
    second_fundamental_form,
    sff_norm2,
    shape_operator,
    umbilicity_residual,
)


def make_immersion(params, components, domain, model, constants=None):
    parsed = tuple(exprdsl.parse(c, params, constants or {}) for c in components)
    return Immersion(
        params=tuple(params), components=parsed, domain=domain, ambient=model
    )


@pytest.fixture
def circle():
    return make_immersion(
        ["w"], ["cos(w)", "sin(w)", "0"], {"w": (0.0, 6.2)}, flat_model(1)
    )


@pytest.fixture
def paraboloid():
    # graph z = u^2 + v^2 inside flat 5-space, flat in the remaining coords
    return make_immersion(
        ["u", "v"],
        ["u", "v", "0", "u^2+v^2", "0"],
        {"u": (-1, 1), "v": (-1, 1)},
        flat_model(2),
    )


class TestJacobianAndMetric:
    def test_circle_jacobian(self, circle):
        J = jacobian(circle, {"w": 0.5})
        expected = np.array([[-np.sin(0.5)], [np.cos(0.5)], [0.0]])
        assert np.max(np.abs(J - expected)) < 1e-14

    def test_circle_induced_metric(self, circle):
        g = induced_metric(circle, {"w": 1.1})
        assert g.shape == (1, 1)
        assert g[0, 0] == pytest.approx(1.0, abs=1e-14)

    def test_degenerate_point_raises(self):
        imm = make_immersion(
            ["u"], ["u^2", "0", "0"], {"u": (-1, 1)}, flat_model(1)
        )
        with pytest.raises(DegeneratePointError):
            second_fundamental_form(imm, {"u": 0.0})

    def test_sample_points_deterministic_and_in_domain(self, paraboloid):
        a = paraboloid.sample_points(30, 7)
        b = paraboloid.sample_points(30, 7)
        assert a == b
        for p in a:
            assert -1 <= p["u"] <= 1 and -1 <= p["v"] <= 1
        c = paraboloid.sample_points(30, 8)
        assert c != a


class TestFrames:
    def test_gram_identity(self, paraboloid):
        for p in paraboloid.sample_points(10, 0):
            tang, norm, C = orthonormal_frames(paraboloid, p)
            g = paraboloid.ambient.metric_at(paraboloid.chart_point(p))
            frame = np.vstack([tang, norm])
            G = frame @ g @ frame.T
            assert np.max(np.abs(G - np.eye(5))) < 1e-12

    def test_coefficients_reconstruct_frame(self, paraboloid):
        p = {"u": 0.4, "v": -0.3}
        tang, _, C = orthonormal_frames(paraboloid, p)
        J = jacobian(paraboloid, p)
        assert np.max(np.abs(C @ J.T - tang)) < 1e-12


class TestSecondFundamentalForm:
    def test_circle_curvature(self, circle):
        s = second_fundamental_form(circle, {"w": 2.0})
        n1, n2 = sff_norm2(s)
        assert n1 == pytest.approx(1.0, abs=1e-12)
        assert n2 == pytest.approx(1.0, abs=1e-12)
        H = mean_curvature(s)
        assert s.gnorm(H) == pytest.approx(1.0, abs=1e-12)
        # a circle is totally umbilical
        assert umbilicity_residual(s) < 1e-12

    def test_paraboloid_at_origin(self, paraboloid):
        s = second_fundamental_form(paraboloid, {"u": 0.0, "v": 0.0})
        # principal curvatures (2, 2): ||sigma||^2 = 8, |H| = 2
        n1, n2 = sff_norm2(s)
        assert n1 == pytest.approx(8.0, abs=1e-10)
        assert s.gnorm(mean_curvature(s)) == pytest.approx(2.0, abs=1e-10)

    def test_symmetry_and_normality(self, paraboloid):
        for p in paraboloid.sample_points(10, 3):
            s = second_fundamental_form(paraboloid, p)
            for a in range(s.n):
                for b in range(s.n):
                    assert s.gnorm(s.sigma[a, b] - s.sigma[b, a]) < 1e-12
                    for e in s.tangent_frame:
                        assert abs(s.gdot(s.sigma[a, b], e)) < 1e-10

    def test_shape_operator_duality(self, paraboloid):
        s = second_fundamental_form(paraboloid, {"u": 0.3, "v": 0.2})
        for N in s.normal_frame:
            A = shape_operator(s, N)
            for a in range(s.n):
                for b in range(s.n):
                    assert A[a, b] == pytest.approx(
                        s.gdot(s.sigma[a, b], N), abs=1e-11
                    )

    def test_shape_operator_rejects_tangent_vector(self, paraboloid):
        s = second_fundamental_form(paraboloid, {"u": 0.3, "v": 0.2})
        with pytest.raises(ValueError):
            shape_operator(s, s.tangent_frame[0])

    def test_totally_geodesic_plane_in_sasakian(self):
        # the invariant plane {x2 = y2 = 0} of the Sasakian model
        imm = make_immersion(
            ["a", "b", "c"],
            ["a", "0", "b", "0", "c"],
            {"a": (-1, 1), "b": (-1, 1), "c": (-1, 1)},
            sasakian_model(2),
        )
        for p in imm.sample_points(8, 2):
            s = second_fundamental_form(imm, p)
            n1, _ = sff_norm2(s)
            assert n1 < 1e-12
