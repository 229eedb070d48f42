"""Warped-product detection, warping recovery, identities, inequality."""

import dataclasses
import math

import numpy as np
import pytest

from contactgeo.immersion import induced_metric, second_fundamental_form
from contactgeo.scenarios import builtin
from contactgeo.skewcr import classify, tf_decompose
from contactgeo.warped import (
    ProductDeclaration,
    check_bishop,
    check_block_structure,
    extract_warping,
    grad_ln_f,
    lemma_residuals,
    mixed_tg_check,
    special_case_rhs,
    theorem41_report,
)


@pytest.fixture(scope="module")
def ex62():
    s = builtin("ex62", sample_count=25)
    points = s.immersion.sample_points(s.sample_count, s.seed)
    return s, points


@pytest.fixture(scope="module")
def ex62_ws(ex62):
    s, points = ex62
    return extract_warping(s.immersion, s.product, points)


class TestBlockStructure:
    def test_ex62_is_block_diagonal(self, ex62):
        s, points = ex62
        off, dep = check_block_structure(s.immersion, s.product, points)
        assert off < 1e-10
        assert dep < 1e-6

    def test_sheared_control_fails(self):
        s = builtin("sheared-nonproduct", sample_count=25)
        points = s.immersion.sample_points(s.sample_count, s.seed)
        off, _ = check_block_structure(s.immersion, s.product, points)
        assert off > 0.1
        ws = extract_warping(s.immersion, s.product, points)
        assert not ws.is_warped

    def test_validate_rejects_bad_partition(self, ex62):
        s, _ = ex62
        decl = ProductDeclaration(
            base_T_params=("s", "t"), base_theta_params=("u", "v"),
            fiber_params=("w", "r"),
        )
        with pytest.raises(ValueError):
            decl.validate(s.immersion)


class TestWarpingRecovery:
    def test_ex62_recovers_declared_f(self, ex62, ex62_ws):
        assert ex62_ws.is_warped
        assert ex62_ws.warp_expr_rel_error < 1e-10

    def test_ex61_constant_f(self):
        s = builtin("ex61", sample_count=25)
        points = s.immersion.sample_points(s.sample_count, s.seed)
        ws = extract_warping(s.immersion, s.product, points)
        assert ws.is_warped
        assert ws.f_spread < 1e-12


class TestGradLnF:
    def test_ex62_closed_form(self, ex62, ex62_ws):
        s, _ = ex62
        p = dict(s.reference_point)           # u = v = 1
        grad = grad_ln_f(s.immersion, s.product, ex62_ws, p)
        # ln f = ln sqrt(2(u^2+v^2)): no base_T dependence, theta-norm 1/8
        assert grad.norm2_T == pytest.approx(0.0, abs=1e-12)
        assert grad.norm2_theta == pytest.approx(1.0 / 8.0, abs=1e-10)
        assert abs(grad.xi_ln_f) < 1e-12

    def test_fd_recovery_matches_expression(self, ex62):
        # strip the declared expression; gradients must come out the same
        s, points = ex62
        blind = dataclasses.replace(s.product, warping_expr=None)
        ws = extract_warping(s.immersion, blind, points)
        p = dict(s.reference_point)
        grad = grad_ln_f(s.immersion, blind, ws, p)
        assert grad.norm2_theta == pytest.approx(1.0 / 8.0, abs=1e-8)


class TestBishop:
    def test_ex62_residuals(self, ex62, ex62_ws):
        s, points = ex62
        for p in points[:5]:
            for a in s.product.base_params:
                for c in s.product.fiber_params:
                    assert check_bishop(s.immersion, s.product, ex62_ws, p, a, c) < 1e-8

    def test_rejects_swapped_roles(self, ex62, ex62_ws):
        s, points = ex62
        with pytest.raises(ValueError):
            check_bishop(s.immersion, s.product, ex62_ws, points[0], "w", "u")


class TestLemmas:
    def test_keys_and_flat_ambient_values(self, ex62, ex62_ws):
        s, points = ex62
        smp = second_fundamental_form(s.immersion, points[0])
        split = classify(smp)
        res = lemma_residuals(s.immersion, s.product, split, ex62_ws, smp)
        assert set(res) == {
            "sigma_xi", "xi_ln_f", "dd_phi_dperp", "mixed_d_theta_perp",
            "theta_exchange", "invariant_transfer",
            "slant_fiber_transfer_i", "slant_fiber_transfer_ii",
        }
        assert res["xi_ln_f"] < 1e-12


class TestTheorem41:
    def test_ex62_reference_values(self, ex62, ex62_ws):
        s, _ = ex62
        p = dict(s.reference_point)
        smp = second_fundamental_form(s.immersion, p)
        split = classify(smp)
        rep = theorem41_report(
            s.immersion, s.product, split, ex62_ws, smp,
            sasakian_ambient=False, mixed_tg_residual=0.0,
        )
        assert abs(rep.lhs - rep.lhs_path2) < 1e-10
        # m2 = 2, theta = pi/3, ||grad^theta ln f||^2 = 1/8
        assert rep.rhs_statement_i == pytest.approx(4.0 + 1.0 / 12.0, abs=1e-9)
        assert rep.rhs_statement_ii == pytest.approx(1.0 / 12.0, abs=1e-9)
        assert rep.rhs_proof_variant_i == pytest.approx(4.0 + 1.0 / 3.0, abs=1e-9)
        assert rep.hypothesis_flags["sasakian_ambient"] is False
        assert rep.f_constant_check is None

    def test_xi_in_fiber_branch(self, ex62, ex62_ws):
        s, points = ex62
        decl = dataclasses.replace(s.product, xi_location="M_perp")
        smp = second_fundamental_form(s.immersion, points[0])
        rep = theorem41_report(
            s.immersion, decl, classify(smp), ex62_ws, smp,
            sasakian_ambient=False, mixed_tg_residual=0.0,
        )
        # non-existence statement: f would have to be constant, and is not
        assert rep.f_constant_check == ex62_ws.f_spread
        assert rep.f_constant_check > 1e-3

    def test_mixed_tg_check(self, ex62):
        s, points = ex62
        smps = [second_fundamental_form(s.immersion, p) for p in points[:4]]
        splits = [classify(smp) for smp in smps]
        r = mixed_tg_check(smps, splits, ("anti-invariant", "slant"))
        assert r >= 0.0


class TestSpecialCases:
    def test_reductions_bitwise(self):
        theta = 0.9
        gT2, gth2, m2 = 0.37, 0.0, 3
        assert special_case_rhs(m2, gT2, gth2, theta, "general-i") == special_case_rhs(
            m2, gT2, 0.0, theta, "contact-cr"
        )
        gth2 = 0.21
        got = special_case_rhs(m2, 0.0, gth2, theta, "general-ii")
        assert got == special_case_rhs(m2, 0.0, gth2, theta, "pseudo-slant")

    def test_values(self):
        theta = math.pi / 3
        cot2 = 1.0 / 3.0
        assert special_case_rhs(2, 0.5, 0.25, theta, "general-i") == pytest.approx(
            2 * 2 * 1.5 + 2 * cot2 * 0.25, rel=1e-15
        )

    @pytest.mark.parametrize(
        "kw",
        [
            dict(m2=0, gT2=0.0, gtheta2=0.0, theta=1.0, case="general-i"),
            dict(m2=1, gT2=-0.1, gtheta2=0.0, theta=1.0, case="general-i"),
            dict(m2=1, gT2=0.0, gtheta2=0.0, theta=0.0, case="pseudo-slant"),
            dict(m2=1, gT2=0.0, gtheta2=0.0, theta=1.0, case="bogus"),
        ],
    )
    def test_input_validation(self, kw):
        with pytest.raises(ValueError):
            special_case_rhs(**kw)
