"""Coefficients of the effective quadratic-quartic (GL) theory near T_c.

Expanding the pairing functional around the normalized pair state
alpha_* at T_c produces three numbers, written here as momentum-space
quadratures over x = p^2 - mu and W(p) = 2 *  (V alpha)-hat(p), with
measure d meas = wp p^2 / (2 pi^2):

    Lambda_2 = (beta_c / 8)    int d meas W^2 sech^2(beta_c x / 2)
    Lambda_0 = (beta_c^2 / 16) int d meas W^2 [ g1(beta_c x)
                                  + (2/3) beta_c p^2 g2(beta_c x) ]
    Lambda_3 = (beta_c^2 / 16) int d meas W^4 g1(beta_c x) / x

Lambda_2 multiplies the temperature-shift term, Lambda_0 the magnetic
gradient term, Lambda_3 the quartic self-interaction; all three are
strictly positive for a nontrivial pair state.  The dimensionless ratio

    D_c = 2 Lambda_0 / Lambda_2

(the 2 being the lowest eigenvalue of the magnetic Laplacian on the
charge-2 unit cell) controls the linear critical-field slope:
T_c(B) = T_c (1 - D_c B) + o(B).

Each coefficient ships with an independent numerical route used by the
verification suite: Lambda_2 against a finite-difference temperature
derivative of the diagonal kernel, Lambda_0 against a finite-difference
Hessian of the two-point symbol (no g1/g2 involved), Lambda_3 against an
adaptive quadrature that bypasses the solver's momentum grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .gap import GapSolution
from .model import kahan_sum
from .symbols import g1, g2, g1_over_x, kt_symbol, lt_symbol, sech2_half

__all__ = [
    "OutOfValidityWarning",
    "GLCoefficients",
    "lambda0",
    "lambda2",
    "lambda3",
    "critical_ratio_Dc",
    "compute_coefficients",
    "tc_shift",
    "lambda2_fd_check",
    "lambda0_hessian_check",
    "lambda3_quad_check",
]


class OutOfValidityWarning(UserWarning):
    """A linear-response formula was evaluated outside its regime."""


def _integrand_pieces(sol: GapSolution):
    """Common measure and weight arrays on the solve's momentum grid."""
    p = sol.alpha_hat.nodes
    wp = sol.alpha_hat.weights
    x = p * p - sol.mu
    meas = wp * p**2 / (2.0 * math.pi**2)
    w2 = 4.0 * np.asarray(sol.vhat_alpha.values, dtype=float) ** 2  # W^2 = (2 Vhat-alpha)^2
    return p, x, meas, w2


def lambda2(sol: GapSolution) -> float:
    """Temperature-shift coefficient Lambda_2."""
    beta = 1.0 / sol.Tc
    _, x, meas, w2 = _integrand_pieces(sol)
    return 0.125 * beta * kahan_sum(meas * w2 * sech2_half(beta * x))


def lambda0(sol: GapSolution) -> float:
    """Gradient (magnetic-stiffness) coefficient Lambda_0."""
    beta = 1.0 / sol.Tc
    p, x, meas, w2 = _integrand_pieces(sol)
    z = beta * x
    integrand = g1(z) + (2.0 / 3.0) * beta * p**2 * g2(z)
    return (beta**2 / 16.0) * kahan_sum(meas * w2 * integrand)


def lambda3(sol: GapSolution) -> float:
    """Quartic coefficient Lambda_3.

    The integrand g1(beta x)/x is smooth through the Fermi surface; its
    removable x = 0 limit beta/12 is taken analytically.
    """
    beta = 1.0 / sol.Tc
    _, x, meas, w2 = _integrand_pieces(sol)
    return (beta**2 / 16.0) * kahan_sum(meas * w2**2 * g1_over_x(x, beta))


def critical_ratio_Dc(Lambda0: float, Lambda2: float) -> float:
    """D_c = 2 Lambda_0 / Lambda_2."""
    if Lambda2 == 0.0:
        raise ZeroDivisionError("Lambda_2 vanishes; critical ratio undefined")
    return 2.0 * Lambda0 / Lambda2


@dataclass(frozen=True)
class GLCoefficients:
    """The three GL coefficients and the critical-field ratio.

    ``Dc`` always equals ``2 * Lambda0 / Lambda2`` bitwise — construct
    through :func:`compute_coefficients` or supply exactly that value.
    """

    Lambda0: float
    Lambda2: float
    Lambda3: float
    Dc: float
    Tc: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("Lambda0", "Lambda2", "Lambda3"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if self.Dc != critical_ratio_Dc(self.Lambda0, self.Lambda2):
            raise ValueError("Dc must equal 2*Lambda0/Lambda2 exactly")

    def to_json_dict(self) -> dict:
        return {
            "Lambda0": self.Lambda0,
            "Lambda2": self.Lambda2,
            "Lambda3": self.Lambda3,
            "Dc": self.Dc,
            "Tc": self.Tc,
            "provenance": self.provenance,
        }


def compute_coefficients(sol: GapSolution, run_checks: bool = False) -> GLCoefficients:
    """All three coefficients from a solved gap problem.

    With ``run_checks`` the independent-route deviations are evaluated and
    recorded in the provenance block (they roughly double the cost).
    """
    L0 = lambda0(sol)
    L2 = lambda2(sol)
    L3 = lambda3(sol)
    gap_summary = sol.to_json_dict()
    gap_provenance = gap_summary.pop("provenance", {})
    prov = {
        "n_p": int(sol.alpha_hat.nodes.size),
        "pmax": float(sol.alpha_hat.nodes[-1]),
        "gap": gap_summary,
        "gap_provenance": gap_provenance,
    }
    if run_checks:
        prov["cross_checks"] = {
            "lambda2_fd_rel": lambda2_fd_check(sol),
            "lambda0_hessian_rel": lambda0_hessian_check(sol),
            "lambda3_quad_rel": lambda3_quad_check(sol),
        }
    return GLCoefficients(
        Lambda0=L0,
        Lambda2=L2,
        Lambda3=L3,
        Dc=critical_ratio_Dc(L0, L2),
        Tc=sol.Tc,
        provenance=prov,
    )


def tc_shift(Tc: float, Dc: float, B) -> np.ndarray | float:
    """Critical temperature in a weak field: T_c(B) = T_c (1 - D_c B).

    Linear response around B = 0; results at or below zero mean B has
    left the validity window, which is flagged but still returned.
    """
    B = np.asarray(B, dtype=float)
    if np.any(B < 0):
        raise ValueError("field strength must be nonnegative")
    out = Tc * (1.0 - Dc * B)
    if np.any(out <= 0):
        warnings.warn(
            "T_c(B) <= 0: field beyond the linear-response validity window",
            OutOfValidityWarning,
            stacklevel=2,
        )
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# independent routes (used by tests and the verification suite)
# ---------------------------------------------------------------------------


def lambda2_fd_check(sol: GapSolution, deltas=(1e-3, 1e-4)) -> float:
    """Relative deviation of Lambda_2 from its temperature-derivative route.

    Since d/dT [1/K_T(x)] = (beta^2/2) sech^2(beta x / 2), the coefficient
    equals -(1/(4 beta_c)) d/dT F(T)|_{T_c} with F(T) = int d meas W^2 /
    K_T.  F' is measured by central differences at two step sizes and
    Richardson-extrapolated (the h^2 -> 0 limit at step ratio 10).
    """
    _, x, meas, w2 = _integrand_pieces(sol)
    Tc = sol.Tc

    def F(T: float) -> float:
        return kahan_sum(meas * w2 / kt_symbol(x, T))

    slopes = []
    for d in deltas:
        slopes.append((F(Tc + d) - F(Tc - d)) / (2.0 * d))
    r = (deltas[0] / deltas[1]) ** 2
    slope = (r * slopes[1] - slopes[0]) / (r - 1.0)
    L2_fd = -(Tc / 4.0) * slope
    return abs(L2_fd - lambda2(sol)) / lambda2(sol)


def lambda0_hessian_check(sol: GapSolution, h: float = 1e-2) -> float:
    """Relative deviation of Lambda_0 from the symbol-Hessian route.

    Lambda_0 = (1/8) int d meas W^2 A(p) with A(p) the angular average
    -(1/3) tr Hess_q L_Tc(|p + q/2|, |p - q/2|) at q = 0, measured here by
    central second differences (one longitudinal, two transverse
    directions) at steps h and h/2 with Richardson extrapolation.  This
    route never touches g1/g2, so it independently certifies both them
    and the assembled integrand.
    """
    p, _, meas, w2 = _integrand_pieces(sol)
    Tc = sol.Tc

    def hess(hh: float) -> np.ndarray:
        f0 = lt_symbol(p, p, Tc, sol.mu)
        f_long = lt_symbol(p + hh / 2.0, np.abs(p - hh / 2.0), Tc, sol.mu)
        pt = np.sqrt(p * p + hh * hh / 4.0)
        f_tran = lt_symbol(pt, pt, Tc, sol.mu)
        return -(2.0 * (f_long - f0) + 4.0 * (f_tran - f0)) / (3.0 * hh * hh)

    A = (4.0 * hess(h / 2.0) - hess(h)) / 3.0
    L0_fd = 0.125 * kahan_sum(meas * w2 * A)
    return abs(L0_fd - lambda0(sol)) / lambda0(sol)


def lambda3_quad_check(sol: GapSolution) -> float:
    """Relative deviation of Lambda_3 from an adaptive-quadrature route.

    Re-evaluates (V alpha)-hat pointwise from the position-space product
    V alpha by the sine transform and integrates beta^2 p^2 W^4 g1(beta x)
    / (16 x (2 pi^2)) with an adaptive rule split at the Fermi surface —
    different grid, different transform path, same number.
    """
    beta = 1.0 / sol.Tc
    mu = sol.mu
    r = sol.v_alpha.nodes
    wr = sol.v_alpha.weights
    va = sol.v_alpha.values

    def what(q: float) -> float:
        return 8.0 * math.pi / q * float(np.sum(wr * r * np.sin(q * r) * va))

    def integrand(q: float) -> float:
        x = q * q - mu
        return q * q * what(q) ** 4 * float(g1_over_x(x, beta))

    pf = math.sqrt(mu) if mu > 0 else 1.0
    pieces = [(0.0, pf), (pf, 20.0), (20.0, 60.0)]
    total = 0.0
    for a, b in pieces:
        val, _ = quad(integrand, a, b, epsabs=1e-15, epsrel=1e-13, limit=400)
        total += val
    L3_quad = (beta**2 / 16.0) * total / (2.0 * math.pi**2)
    return abs(L3_quad - lambda3(sol)) / lambda3(sol)
