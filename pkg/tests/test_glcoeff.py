"""Tests for the quadratic, gradient, and quartic coefficients of the
reduced free-energy expansion, the critical field ratio D_c, and the
linear critical-temperature shift."""

from __future__ import annotations

import numpy as np
import pytest

from bcsgl.glcoeff import (
    GLCoefficients,
    OutOfValidityWarning,
    compute_coefficients,
    critical_ratio_Dc,
    lambda0,
    lambda0_hessian_check,
    lambda2,
    lambda2_fd_check,
    lambda3,
    lambda3_quad_check,
    tc_shift,
)

# Frozen for the gaussian well v0 = 2, a = 1 at mu = 1, cross-checked
# against finite differences of the eigenvalue curve, a direct Hessian of
# the reduced functional, and adaptive quadrature of the quartic integrand.
LAMBDA0_REF = 0.857063461708575
LAMBDA2_REF = 0.1479633578376202
LAMBDA3_REF = 7.080204153492936
DC_REF = 11.584806863455265


def test_reference_coefficients_are_reproduced(reference_coefficients):
    c = reference_coefficients
    assert c.Lambda0 == pytest.approx(LAMBDA0_REF, rel=1e-12)
    assert c.Lambda2 == pytest.approx(LAMBDA2_REF, rel=1e-12)
    assert c.Lambda3 == pytest.approx(LAMBDA3_REF, rel=1e-12)
    assert c.Dc == pytest.approx(DC_REF, rel=1e-12)


def test_coefficients_are_positive_and_dc_is_their_exact_ratio(reference_coefficients):
    c = reference_coefficients
    assert c.Lambda0 > 0 and c.Lambda2 > 0 and c.Lambda3 > 0
    assert c.Dc == 2.0 * c.Lambda0 / c.Lambda2  # bitwise, not approximately
    assert c.Dc == critical_ratio_Dc(c.Lambda0, c.Lambda2)


def test_quadratic_coefficient_matches_eigenvalue_curve_slope(reference_solution):
    assert lambda2_fd_check(reference_solution) <= 1e-5


def test_gradient_coefficient_matches_reduced_hessian(reference_solution):
    assert lambda0_hessian_check(reference_solution) <= 1e-4


def test_quartic_coefficient_matches_adaptive_quadrature(reference_solution):
    assert lambda3_quad_check(reference_solution) <= 1e-8


def test_individual_coefficient_functions_agree_with_the_record(
    reference_solution, reference_coefficients
):
    sol, c = reference_solution, reference_coefficients
    assert lambda0(sol) == c.Lambda0
    assert lambda2(sol) == c.Lambda2
    assert lambda3(sol) == c.Lambda3


def test_coefficients_are_stable_under_grid_doubling(
    reference_potential, reference_coefficients
):
    from bcsgl.gap import critical_temperature

    fine = compute_coefficients(
        critical_temperature(reference_potential, 1.0, bracket=(0.05, 0.3), refine=2)
    )
    c = reference_coefficients
    assert fine.Lambda0 == pytest.approx(c.Lambda0, rel=1e-4)
    assert fine.Lambda2 == pytest.approx(c.Lambda2, rel=1e-4)
    assert fine.Lambda3 == pytest.approx(c.Lambda3, rel=1e-4)


def test_record_validation_rejects_inconsistent_fields(reference_coefficients):
    c = reference_coefficients
    with pytest.raises(ValueError):
        GLCoefficients(
            Lambda0=-1.0, Lambda2=c.Lambda2, Lambda3=c.Lambda3, Dc=c.Dc, Tc=c.Tc
        )
    with pytest.raises(ValueError, match="Dc"):
        GLCoefficients(
            Lambda0=c.Lambda0,
            Lambda2=c.Lambda2,
            Lambda3=c.Lambda3,
            Dc=1.000001 * c.Dc,
            Tc=c.Tc,
        )


def test_provenance_records_the_gap_solve(reference_coefficients):
    prov = reference_coefficients.provenance
    assert prov["n_p"] > 0 and prov["pmax"] > 0
    assert prov["gap"]["Tc"] == reference_coefficients.Tc


def test_run_checks_embeds_the_cross_checks(reference_solution):
    c = compute_coefficients(reference_solution, run_checks=True)
    checks = c.provenance["cross_checks"]
    assert checks["lambda2_fd_rel"] <= 1e-5
    assert checks["lambda0_hessian_rel"] <= 1e-4
    assert checks["lambda3_quad_rel"] <= 1e-8


def test_tc_shift_is_exact_at_zero_field_and_linear(reference_coefficients):
    c = reference_coefficients
    assert tc_shift(c.Tc, c.Dc, 0.0) == c.Tc
    B = np.array([0.0, 1e-3, 2e-3])
    shifted = tc_shift(c.Tc, c.Dc, B)
    assert shifted.shape == (3,)
    assert np.allclose(shifted, c.Tc * (1.0 - c.Dc * B), rtol=1e-15)
    drop1 = c.Tc - tc_shift(c.Tc, c.Dc, 1e-3)
    drop2 = c.Tc - tc_shift(c.Tc, c.Dc, 2e-3)
    assert drop2 == pytest.approx(2.0 * drop1, rel=1e-12)


def test_tc_shift_validates_and_warns_outside_linear_validity(reference_coefficients):
    c = reference_coefficients
    with pytest.raises(ValueError):
        tc_shift(c.Tc, c.Dc, -0.1)
    with pytest.warns(OutOfValidityWarning):
        out = tc_shift(c.Tc, c.Dc, 2.0 / c.Dc)
    assert out <= 0.0
