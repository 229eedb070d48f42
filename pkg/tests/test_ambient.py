"""Ambient model structure identities and connection tests."""

import numpy as np
import pytest

from contactgeo import ambient
from contactgeo.ambient import check_structure, christoffel, flat_model, sasakian_model


def _grid_points(model, count, seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.0, 1.0, size=(count, model.dim))
    return [dict(zip(model.coords, row)) for row in pts]


class TestSasakianModel:
    def test_full_identity_battery(self):
        model = sasakian_model(2)
        res = check_structure(model, _grid_points(model, 25, 3))
        assert res.almost_contact < 1e-12
        assert res.compatibility < 1e-12
        assert res.contact_metric < 1e-12
        assert res.normality < 1e-10
        assert res.sasakian < 1e-10
        assert res.xi_derivative < 1e-10

    def test_xi_unit_and_eta_dual(self):
        model = sasakian_model(3)
        for x in _grid_points(model, 10, 5):
            g = model.metric_at(x)
            xi = model.xi_at(x)
            eta = model.eta_at(x)
            assert float(xi @ g @ xi) == pytest.approx(1.0, abs=1e-12)
            assert float(eta @ xi) == pytest.approx(1.0, abs=1e-12)
            # eta = g(xi, .)
            assert np.max(np.abs(g @ xi - eta)) < 1e-12

    def test_phi_squared(self):
        model = sasakian_model(2)
        for x in _grid_points(model, 10, 9):
            phi = model.phi_at(x)
            xi = model.xi_at(x)
            eta = model.eta_at(x)
            lhs = phi @ phi
            rhs = -np.eye(model.dim) + np.outer(xi, eta)
            assert np.max(np.abs(lhs - rhs)) < 1e-13


class TestFlatModel:
    @pytest.mark.parametrize("m", [1, 3, 5])
    def test_almost_contact_but_not_sasakian(self, m):
        model = flat_model(m)
        res = check_structure(model, _grid_points(model, 20, 1))
        assert res.almost_contact < 1e-14
        assert res.compatibility < 1e-14
        # dEta = 0 while g(X, phi Y) is order one: detectably non-contact
        assert res.contact_metric > 0.5
        assert res.sasakian > 0.5

    def test_flat_connection_vanishes(self):
        model = flat_model(4)
        x = {c: 0.3 for c in model.coords}
        gamma = christoffel(model, x)
        assert np.max(np.abs(gamma)) == 0.0


class TestChristoffel:
    def test_lower_symmetry(self):
        model = sasakian_model(2)
        for x in _grid_points(model, 5, 21):
            gamma = christoffel(model, x)
            assert np.max(np.abs(gamma - np.transpose(gamma, (0, 2, 1)))) < 1e-12

    def test_metric_compatibility(self):
        # d_A g_BC = Gamma^D_AB g_DC + Gamma^D_AC g_BD
        model = sasakian_model(2)
        for x in _grid_points(model, 5, 22):
            g = model.metric_at(x)
            dg = model.metric_partials(x)          # [A, B, C] = d_A g_BC
            gamma = christoffel(model, x)          # [C, A, B]
            rhs = np.einsum("dab,dc->abc", gamma, g) + np.einsum(
                "dac,bd->abc", gamma, g
            )
            assert np.max(np.abs(dg - rhs)) < 1e-12

    def test_matches_finite_differences(self):
        model = sasakian_model(2)
        x = {c: v for c, v in zip(model.coords, [0.2, -0.4, 0.5, 0.1, 0.3])}
        h = 1e-6
        g0inv = np.linalg.inv(model.metric_at(x))
        dg = np.zeros((model.dim,) * 3)
        for A, name in enumerate(model.coords):
            hi, lo = dict(x), dict(x)
            hi[name] += h
            lo[name] -= h
            dg[A] = (model.metric_at(hi) - model.metric_at(lo)) / (2 * h)
        sym = dg + np.einsum("bad->abd", dg) - np.einsum("dab->abd", dg)
        expected = 0.5 * np.einsum("cd,abd->cab", g0inv, sym)
        assert np.max(np.abs(christoffel(model, x) - expected)) < 1e-8
