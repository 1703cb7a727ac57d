"""Critical temperature and pair state of the radial gap problem.

The linearized problem asks for the temperature T_c at which the largest
eigenvalue of the Birman-Schwinger operator

    B_T = V^(1/2) K_T^(-1) V^(1/2),        K_T = K_T(-Delta - mu),

crosses 1.  Since K_T is strictly increasing in T, eta(T) = max spec B_T
is strictly decreasing, and the crossing is a simple root found by
bisection plus a few Newton steps (the eigenvalue derivative comes from
first-order perturbation theory, so Newton costs nothing extra).

Everything is reduced to the s-wave sector: for radial V the top of the
Birman-Schwinger spectrum lives there, and the three-dimensional problem
collapses to one-dimensional integral operators.  Two representations are
used:

* momentum space, where K_T is diagonal and V enters through the kernel
  T(p, q) = integral dr V(r) sin(p r) sin(q r) — this is the production
  path, spectrally accurate because every factor is smooth;
* position space, where K_T^(-1) has the explicit kernel
  :func:`swave_kt_inverse_kernel` — kept as the independent cross-check
  representation (its |r - r'| kink limits it to ~1e-4 accuracy).

The pair state alpha_* = K_Tc^(-1) V^(1/2) phi is reconstructed on a grid
extended far beyond the range of V, because alpha_* inherits only the
slow e^(-pi T_c r / (2 sqrt(mu))) decay set by the first Matsubara pole,
not the decay of V.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigh
from scipy.sparse.linalg import eigsh

from .model import (
    InvalidGridError,
    RadialFunction,
    RadialMomentumFunction,
    TruncationWarning,
    gauss_panels,
    kahan_sum,
    radial_grid,
)
from .symbols import kt_symbol, kt_symbol_dT

__all__ = [
    "NoRootError",
    "NondegeneracyWarning",
    "MeaninglessResultWarning",
    "GapGrids",
    "GapSolution",
    "BirmanSchwingerOperator",
    "momentum_grid",
    "swave_kt_inverse_kernel",
    "bs_top_eigenpair",
    "critical_temperature",
    "gap_residual",
    "spectral_gap",
    "moment_check",
]

DENSE_EIG_CAP = 2000  # dense-eigensolver grids stay comfortably below this


class NoRootError(RuntimeError):
    """The bracket does not straddle eta = 1."""


class NondegeneracyWarning(UserWarning):
    """The spectral gap under the pair state is suspiciously small."""


class MeaninglessResultWarning(UserWarning):
    """The requested diagnostic has no content for these inputs."""


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


def momentum_grid(
    mu: float,
    T_scale: float,
    pmax: float = 20.0,
    base_width: float = 0.5,
    order: int = 16,
    refine: int = 1,
):
    """Momentum quadrature adapted to the Fermi surface.

    Uniform panels of width ``base_width/refine`` over [0, pmax], plus
    panel edges geometrically accumulating toward p = sqrt(mu) from both
    sides on scales T_scale * 2^k — that is where 1/K_T develops its
    width-T structure.  Doubling ``refine`` halves the uniform panels and
    adds one deeper zoom level, which is the knob the grid-stability
    checks turn.  Returns (p, wp).
    """
    if pmax <= 0 or base_width <= 0 or refine < 1:
        raise InvalidGridError("pmax, base_width and refine must be positive")
    edges = set(np.linspace(0.0, pmax, int(round(pmax / (base_width / refine))) + 1))
    if mu > 0:
        pf = math.sqrt(mu)
        if pf < pmax:
            edges.add(pf)
        k = -5 - int(math.log2(refine))
        while T_scale * 2.0**k <= 400.0 * T_scale:
            delta = T_scale * 2.0**k
            for s in (-1.0, 1.0):
                x = mu + s * delta
                if x > 0 and math.sqrt(x) < pmax:
                    edges.add(math.sqrt(x))
            k += 1
    edges = np.array(sorted(edges))
    # drop near-coincident edges that would create degenerate panels
    keep = np.concatenate([[True], np.diff(edges) > 1e-13 * max(1.0, pmax)])
    return gauss_panels(edges[keep], order)


@dataclass
class GapGrids:
    """The paired radial/momentum quadrature a gap solve runs on."""

    r: np.ndarray
    wr: np.ndarray
    p: np.ndarray
    wp: np.ndarray

    @classmethod
    def build(
        cls,
        rmax: float,
        mu: float,
        T_scale: float,
        *,
        # the subtracted kernel keeps a kink on its diagonal, so radial
        # panels -- not quadrature order -- are the accuracy-limiting knob
        r_panels: int = 60,
        r_order: int = 12,
        pmax: float = 20.0,
        base_width: float = 0.5,
        p_order: int = 16,
        refine: int = 1,
    ) -> "GapGrids":
        r, wr = radial_grid(rmax, n_panels=r_panels * refine, order=r_order)
        p, wp = momentum_grid(
            mu, T_scale, pmax=pmax, base_width=base_width, order=p_order, refine=refine
        )
        if p.size > DENSE_EIG_CAP or r.size > DENSE_EIG_CAP:
            raise InvalidGridError(
                f"grid exceeds the dense-eigensolver budget of {DENSE_EIG_CAP} points"
            )
        return cls(r=r, wr=wr, p=p, wp=wp)


class _GapProblem:
    """Precomputed T-independent pieces of the s-wave problem.

    Holds the sine matrix S[k, j] = sin(p_k r_j) and the potential kernel
    Tmat[k, l] = sum_j wr_j V_j S[k, j] S[l, j]; every eta(T) evaluation
    then costs one diagonal rescaling and one Lanczos run.
    """

    def __init__(self, V: RadialFunction, mu: float, grids: GapGrids):
        if np.any(V.values < 0):
            raise ValueError("potential must be nonnegative")
        self.mu = mu
        self.grids = grids
        self.Vr = np.interp(grids.r, V.nodes, V.values, left=V.values[0], right=0.0)
        self.S = np.sin(np.outer(grids.p, grids.r))
        self.Tmat = (self.S * (grids.wr * self.Vr)[None, :]) @ self.S.T
        self.x = grids.p**2 - mu
        self._trivial = not np.any(self.Vr > 0)

    def bs_matrix(self, T: float) -> np.ndarray:
        c = np.sqrt(self.grids.wp / kt_symbol(self.x, T))
        return (2.0 / math.pi) * self.Tmat * np.outer(c, c)

    def top_pair(self, T: float):
        if self._trivial:
            return 0.0, np.zeros(self.grids.p.size)
        B = self.bs_matrix(T)
        n = B.shape[0]
        if n < 50:
            w, v = eigh(B)
            return float(w[-1]), v[:, -1]
        v0 = np.full(n, 1.0 / math.sqrt(n))
        w, v = eigsh(B, k=1, which="LA", v0=v0)
        return float(w[0]), v[:, 0]

    def eta_derivative(self, T: float, phi: np.ndarray) -> float:
        """d eta / dT by first-order perturbation theory.

        With B = (2/pi) D Tmat D, D = diag c(T), c = sqrt(wp/K_T):
        eta' = 2 (2/pi) sum_k c'_k phi_k (Tmat (c phi))_k, and
        c' = -(c/2) K'_T / K_T.
        """
        K = kt_symbol(self.x, T)
        c = np.sqrt(self.grids.wp / K)
        cp = -0.5 * c * kt_symbol_dT(self.x, T) / K
        y = self.Tmat @ (c * phi)
        return float(2.0 * (2.0 / math.pi) * np.sum(cp * phi * y))


# ---------------------------------------------------------------------------
# position-space kernel of K_T^(-1) and the Birman-Schwinger matrix
# ---------------------------------------------------------------------------

_COS_HALF_KERNELS = (
    # integral_0^inf cos(a p) / (1 + p^2)^m dp for m = 1, 2, 3, as (coeff, poly)
    lambda a: (math.pi / 2.0) * np.exp(-a),
    lambda a: (math.pi / 4.0) * (1.0 + a) * np.exp(-a),
    lambda a: (3.0 * math.pi / 16.0) * (1.0 + a + a * a / 3.0) * np.exp(-a),
)


def _sine_closed_forms(r, rp):
    """integral_0^inf sin(pr) sin(pr') / (1+p^2)^m dp for m = 1, 2, 3.

    Via sin sin = (cos(p(r-r')) - cos(p(r+r')))/2 and the standard cosine
    transforms of inverse powers of (1 + p^2).
    """
    d = np.abs(r - rp)
    s = r + rp
    return tuple(0.5 * (f(d) - f(s)) for f in _COS_HALF_KERNELS)


def _d3_subtracted(p: np.ndarray, T: float, mu: float) -> np.ndarray:
    """1/K_T(p^2 - mu) minus its three-term large-p expansion in 1/(1+p^2).

    1/(p^2 - mu) = sum_k (1+mu)^k / (1+p^2)^(k+1); after three terms the
    remainder, together with the exponentially small 1/K - 1/x tail,
    decays like (1+mu)^3 / p^8, so a finite pmax suffices.
    """
    x = p * p - mu
    s = 1.0 / (1.0 + p * p)
    c1 = 1.0 + mu
    return 1.0 / kt_symbol(x, T) - s * (1.0 + s * (c1 + s * c1 * c1))


def swave_kt_inverse_kernel(
    r,
    rp,
    T: float,
    mu: float,
    pmax: float = 25.0,
    panel_width: float = 0.5,
    order: int = 16,
):
    """s-wave kernel G_T(r, r') of K_T(-Delta - mu)^(-1):

        G_T(r, r') = (2/pi) integral_0^inf p^2 j0(p r) j0(p r') / K_T dp,

    acting as (K_T^(-1) f)(r) = integral G_T(r, r') f(r') r'^2 dr'.
    Symmetric in (r, r'); approaches a delta sheet of weight 1/(2T) as
    T grows.  Evaluated by subtracting the rational large-p expansion
    (integrated in closed form) and quadrating the smooth p^-8 remainder.

    Scalar or broadcasting array arguments; r, r' must be positive.
    """
    r = np.asarray(r, dtype=float)
    rp = np.asarray(rp, dtype=float)
    if np.any(r <= 0) or np.any(rp <= 0):
        raise ValueError("kernel evaluation requires r, r' > 0")
    p, wp = gauss_panels(np.linspace(0.0, pmax, int(round(pmax / panel_width)) + 1), order)
    d3 = _d3_subtracted(p, T, mu)
    # tail of the subtracted integrand beyond pmax, relative to the result scale
    tail = (1.0 + mu) ** 3 / (7.0 * pmax**7)
    shape = np.broadcast_shapes(r.shape, rp.shape)
    rb = np.broadcast_to(r, shape).ravel()
    rpb = np.broadcast_to(rp, shape).ravel()
    Q = np.einsum(
        "k,kn->n", wp * d3, np.sin(np.outer(p, rb)) * np.sin(np.outer(p, rpb))
    )
    i1, i2, i3 = _sine_closed_forms(rb, rpb)
    c1 = 1.0 + mu
    total = Q + i1 + c1 * i2 + c1 * c1 * i3
    if tail > 1e-8 * max(float(np.max(np.abs(total))), 1e-300):
        warnings.warn(
            f"momentum tail estimate {tail:.2e} above tolerance; raise pmax",
            TruncationWarning,
            stacklevel=2,
        )
    out = (2.0 / math.pi) * total / (rb * rpb)
    out = out.reshape(shape)
    return out if out.ndim else float(out)


@dataclass
class BirmanSchwingerOperator:
    """Dense position-space discretization of V^(1/2) K_T^(-1) V^(1/2).

    Matrix entries  w_i^(1/2) r_i V_i^(1/2) G_T(r_i, r_j) V_j^(1/2) r_j
    w_j^(1/2)  on the measure r^2 dr, so its spectrum approximates the
    Birman-Schwinger spectrum directly.  Symmetric by construction and
    positive semidefinite (it is a Gram matrix of the momentum sine
    profiles under the positive weight (2/pi) p^2 / K_T).

    This representation carries the |r - r'| kink of G_T, so it serves as
    a cross-check of the momentum-space path, not as the production route.
    """

    T: float
    mu: float
    nodes: np.ndarray
    weights: np.ndarray
    potential: RadialFunction
    matrix: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        if self.nodes.size > DENSE_EIG_CAP:
            raise InvalidGridError(
                f"dense operator capped at {DENSE_EIG_CAP} nodes, got {self.nodes.size}"
            )
        V = np.interp(
            self.nodes,
            self.potential.nodes,
            self.potential.values,
            left=self.potential.values[0],
            right=0.0,
        )
        if np.any(V < 0):
            raise ValueError("potential must be nonnegative")
        G = swave_kt_inverse_kernel(
            self.nodes[:, None], self.nodes[None, :], self.T, self.mu
        )
        hv = np.sqrt(self.weights) * self.nodes * np.sqrt(V)
        self.matrix = G * np.outer(hv, hv)
        self.matrix = 0.5 * (self.matrix + self.matrix.T)  # scrub roundoff asymmetry

    @classmethod
    def build(cls, T: float, V: RadialFunction, mu: float) -> "BirmanSchwingerOperator":
        return cls(T=T, mu=mu, nodes=V.nodes, weights=V.weights, potential=V)

    def top_eigenpair(self):
        w, v = eigh(self.matrix)
        return float(w[-1]), v[:, -1]

    def min_eigenvalue(self) -> float:
        return float(eigh(self.matrix, eigvals_only=True)[0])


# ---------------------------------------------------------------------------
# eigenvalue curve and critical temperature
# ---------------------------------------------------------------------------


def bs_top_eigenpair(
    T: float,
    V: RadialFunction,
    mu: float,
    grids: GapGrids | None = None,
    _problem: _GapProblem | None = None,
):
    """Largest Birman-Schwinger eigenvalue eta(T) and its eigenvector.

    The eigenvector is returned in the weighted momentum representation
    the solver works in (unit Euclidean norm); use
    :func:`critical_temperature` for the physical pair state.  eta is
    monotone decreasing in T and monotone increasing in V.
    """
    if T <= 0:
        raise ValueError("temperature must be positive")
    prob = _problem
    if prob is None:
        if grids is None:
            grids = GapGrids.build(rmax=float(V.rmax), mu=mu, T_scale=min(T, 1.0))
        prob = _GapProblem(V, mu, grids)
    return prob.top_pair(T)


def critical_temperature(
    V: RadialFunction,
    mu: float,
    bracket: tuple[float, float] = (0.01, 1.0),
    *,
    grids: GapGrids | None = None,
    refine: int = 1,
    rmax_pair: float = 120.0,
    bisect_tol: float = 1e-10,
    newton_steps: int = 3,
) -> "GapSolution":
    """Solve eta(T_c) = 1 and assemble the full pair-state record.

    Bisection brings the bracket below ``bisect_tol``; a few Newton steps
    with the perturbation-theory derivative then polish the root to
    machine accuracy.  Raises :class:`NoRootError` (reporting eta at both
    ends) when the bracket does not straddle 1.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0 < lo < hi):
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    if grids is None:
        grids = GapGrids.build(rmax=float(V.rmax), mu=mu, T_scale=lo, refine=refine)
    prob = _GapProblem(V, mu, grids)

    eta_lo, _ = prob.top_pair(lo)
    eta_hi, _ = prob.top_pair(hi)
    if not (eta_lo > 1.0 > eta_hi):
        raise NoRootError(
            f"bracket [{lo:g}, {hi:g}] does not straddle the transition: "
            f"eta({lo:g}) = {eta_lo:.6g}, eta({hi:g}) = {eta_hi:.6g}"
        )

    n_evals = 2
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        eta_mid, _ = prob.top_pair(mid)
        n_evals += 1
        if eta_mid > 1.0:
            lo = mid
        else:
            hi = mid

    Tc = 0.5 * (lo + hi)
    for _ in range(newton_steps):
        eta, phi = prob.top_pair(Tc)
        d_eta = prob.eta_derivative(Tc, phi)
        n_evals += 1
        if d_eta == 0.0:
            break
        Tc = Tc - (eta - 1.0) / d_eta
    eta, phi = prob.top_pair(Tc)

    return _assemble_solution(
        prob,
        Tc,
        eta,
        phi,
        rmax_pair=rmax_pair,
        provenance={
            "bracket": [float(bracket[0]), float(bracket[1])],
            "eta_evaluations": n_evals,
            "n_r": int(grids.r.size),
            "n_p": int(grids.p.size),
            "rmax": float(V.rmax),
            "pmax": float(grids.p[-1]),
            "refine": int(refine),
        },
    )


def _transform_rule(p, wp, values, rmax: float):
    """Momentum rule able to carry the inverse sine transform out to rmax.

    An order-16 panel of width w integrates sin(p r) faithfully only
    while the phase advance w r / 2 stays inside the rule's degree; the
    solve panels (width ~0.5) give out near r ~ 70 and the transform's
    error floor then grows back up the far tail.  For larger grids the
    smooth momentum profile is moved onto panels of width 16/rmax
    (phase advance 8 per panel, error ~1e-15) by a cubic spline.
    """
    width = 16.0 / float(rmax)
    if width >= 0.5:
        return p, wp, values
    pmax = float(p[-1])
    pf, wf = gauss_panels(np.linspace(0.0, pmax, int(math.ceil(pmax / width)) + 1), 16)
    return pf, wf, CubicSpline(p, values)(pf)


def _extended_pair_grid(rmax_inner: float, rmax_outer: float):
    """Quadrature carrying the pair state far beyond the potential's range.

    Inner part: the usual dense rule where V lives.  Outer part: unit-ish
    panels out to rmax_outer, enough for the slowly decaying oscillatory
    tail (wavelength ~ pi/sqrt(mu), envelope e^(-pi T r / (2 sqrt(mu)))).
    """
    r_in, w_in = radial_grid(rmax_inner, n_panels=30, order=12)
    n_out = int(math.ceil(rmax_outer - rmax_inner))
    r_out, w_out = gauss_panels(np.linspace(rmax_inner, rmax_outer, n_out + 1), 8)
    return np.concatenate([r_in, r_out]), np.concatenate([w_in, w_out])


def _assemble_solution(
    prob: _GapProblem,
    Tc: float,
    eta: float,
    phi: np.ndarray,
    *,
    rmax_pair: float,
    provenance: dict,
) -> "GapSolution":
    grids = prob.grids
    p, wp = grids.p, grids.wp
    K = kt_symbol(prob.x, Tc)

    # weighted eigenvector -> momentum pair state, unit L^2(R^3) norm
    alpha_hat = phi / (np.sqrt(wp) * p * np.sqrt(K))
    norm = math.sqrt(kahan_sum(wp * p**2 * alpha_hat**2) / (2.0 * math.pi**2))
    alpha_hat = alpha_hat / norm

    # canonical sign: the pair state is positive where the potential acts
    r_sign = grids.r
    a_sign = _alpha_position(alpha_hat, p, wp, r_sign)
    if kahan_sum(grids.wr * r_sign**2 * prob.Vr * a_sign) < 0:
        alpha_hat = -alpha_hat
        a_sign = -a_sign

    # V alpha in position space and its transform, on the solve grids
    v_alpha_vals = prob.Vr * a_sign
    vhat_alpha = (2.0 / math.pi) / p * (prob.Tmat @ (wp * p * alpha_hat))
    # the same object via the direct sine transform of (V alpha); using the
    # kernel keeps it consistent with the eigen-solve to machine precision

    resid_num = kahan_sum(wp * p**2 * (K * alpha_hat - vhat_alpha) ** 2)
    resid_den = kahan_sum(wp * p**2 * vhat_alpha**2)
    gap_res = math.sqrt(resid_num / resid_den) if resid_den > 0 else math.inf

    # pair state on the extended grid, via a transform-grade momentum rule
    rmax_inner = float(provenance["rmax"])
    r_ext, w_ext = _extended_pair_grid(rmax_inner, rmax_pair)
    p_t, wp_t, ah_t = _transform_rule(p, wp, alpha_hat, rmax_pair)
    a_ext = _alpha_position(ah_t, p_t, wp_t, r_ext)

    e0, e1 = _kv_low_levels(prob, Tc)
    alpha_star = RadialFunction(r_ext, a_ext, w_ext, span=(0.0, rmax_pair))
    sol = GapSolution(
        Tc=Tc,
        mu=prob.mu,
        alpha_star=alpha_star,
        alpha_hat=RadialMomentumFunction(p, alpha_hat, wp),
        vhat_alpha=RadialMomentumFunction(p, vhat_alpha, wp),
        v_alpha=RadialFunction(grids.r, v_alpha_vals, grids.wr, span=(0.0, rmax_inner)),
        eta_residual=abs(eta - 1.0),
        gap_residual=gap_res,
        kappa=e1 - e0,
        e0=e0,
        provenance=provenance,
    )
    return sol


def _alpha_position(alpha_hat, p, wp, r):
    """Inverse transform (1/(2 pi^2 r)) integral p sin(p r) alpha_hat dp."""
    r = np.asarray(r, dtype=float)
    out = (np.sin(np.outer(r, p)) @ (wp * p * alpha_hat)) / (2.0 * math.pi**2 * r)
    return out


def _alpha_position_deriv(alpha_hat, p, wp, r, alpha_r):
    """Radial derivative through the momentum representation:

    alpha'(r) = (1/(2 pi^2 r)) integral p^2 cos(p r) alpha_hat dp - alpha/r.
    """
    r = np.asarray(r, dtype=float)
    c = (np.cos(np.outer(r, p)) @ (wp * p**2 * alpha_hat)) / (2.0 * math.pi**2 * r)
    return c - alpha_r / r


def _kv_low_levels(prob: _GapProblem, T: float):
    """Two lowest eigenvalues of K_T(p^2-mu) - V in the s-wave sector."""
    K = kt_symbol(prob.x, T)
    sw = np.sqrt(prob.grids.wp)
    A = np.diag(K) - (2.0 / math.pi) * prob.Tmat * np.outer(sw, sw)
    vals = eigh(A, eigvals_only=True, subset_by_index=[0, 1])
    return float(vals[0]), float(vals[1])


# ---------------------------------------------------------------------------
# solution record and diagnostics
# ---------------------------------------------------------------------------


@dataclass
class GapSolution:
    """Critical temperature plus the normalized pair state and certificates.

    ``alpha_star`` lives on a grid extended far beyond the potential
    (the state decays on the Matsubara scale, not the potential scale);
    ``alpha_hat`` is its momentum representation, normalized so the
    L^2(R^3) norm is exactly 1.  ``kappa`` is the spectral gap of
    K_Tc - V above its lowest eigenvalue ``e0`` (which vanishes at T_c).
    """

    Tc: float
    mu: float
    alpha_star: RadialFunction
    alpha_hat: RadialMomentumFunction
    vhat_alpha: RadialMomentumFunction
    v_alpha: RadialFunction
    eta_residual: float
    gap_residual: float
    kappa: float
    e0: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.Tc > 0 and math.isfinite(self.Tc)):
            raise ValueError(f"critical temperature must be positive, got {self.Tc}")
        if not (self.kappa > 0):
            raise ValueError(f"spectral gap must be positive, got {self.kappa}")
        norm = self.norm_momentum()
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"pair state norm {norm!r} deviates from 1")
        if self.eta_residual < 0 or not math.isfinite(self.gap_residual):
            raise ValueError("residuals must be finite and nonnegative")

    def norm_momentum(self) -> float:
        """L^2(R^3) norm of the pair state via its momentum representation."""
        f = self.alpha_hat
        return math.sqrt(
            kahan_sum(f.weights * f.nodes**2 * np.abs(f.values) ** 2)
            / (2.0 * math.pi**2)
        )

    def to_json_dict(self) -> dict:
        return {
            "Tc": self.Tc,
            "mu": self.mu,
            "eta_residual": self.eta_residual,
            "gap_residual": self.gap_residual,
            "kappa": self.kappa,
            "e0": self.e0,
            "pair_norm": self.norm_momentum(),
            "provenance": self.provenance,
        }


def gap_residual(sol: GapSolution) -> float:
    """Relative defect of the gap equation K_Tc alpha = V-hat alpha,

    measured in L^2(p^2 dp).  Raises when the potential term vanishes
    identically (the relative residual is then undefined).
    """
    p = sol.alpha_hat.nodes
    wp = sol.alpha_hat.weights
    K = kt_symbol(p * p - sol.mu, sol.Tc)
    den = kahan_sum(wp * p**2 * np.abs(sol.vhat_alpha.values) ** 2)
    if den == 0.0:
        raise ZeroDivisionError("V alpha vanishes identically; residual undefined")
    num = kahan_sum(wp * p**2 * np.abs(K * sol.alpha_hat.values - sol.vhat_alpha.values) ** 2)
    return math.sqrt(num / den)


def spectral_gap(
    V: RadialFunction,
    mu: float,
    T: float,
    grids: GapGrids | None = None,
    gap_floor: float = 1e-10,
):
    """Lowest two s-wave levels (e0, e1) of K_T(-Delta - mu) - V.

    At T = T_c the bottom level is zero (the pair state) and e1 - e0 > 0
    is the nondegeneracy margin kappa the perturbation theory rests on.
    Warns when V vanishes (the result is then just the symbol's edge) or
    when the gap closes within ``gap_floor``.
    """
    if grids is None:
        grids = GapGrids.build(rmax=float(V.rmax), mu=mu, T_scale=min(T, 1.0))
    prob = _GapProblem(V, mu, grids)
    if prob._trivial:
        warnings.warn(
            "potential vanishes identically: levels reflect only the free symbol",
            MeaninglessResultWarning,
            stacklevel=2,
        )
    e0, e1 = _kv_low_levels(prob, T)
    if e1 - e0 <= gap_floor:
        warnings.warn(
            f"spectral gap {e1 - e0:.3e} below {gap_floor:.1e}: "
            "the ground level is (near-)degenerate",
            NondegeneracyWarning,
            stacklevel=2,
        )
    return e0, e1


def moment_check(sol: GapSolution, nu_max: int = 3):
    """Weighted decay moments of the pair state,

        m_nu = integral ( |x|^(2 nu) |alpha|^2 + |x|^(2 nu) |grad alpha|^2 ) d^3x,

    for nu = 0..nu_max, each with the fraction contributed by the outer
    decade of the grid (a large fraction means the grid truncates the
    moment).  m_0 >= 1 always, since the state is normalized.
    """
    if nu_max < 0:
        raise ValueError("nu_max must be nonnegative")
    f = sol.alpha_star
    p, wp, ah = _transform_rule(
        sol.alpha_hat.nodes, sol.alpha_hat.weights, sol.alpha_hat.values, f.rmax
    )
    r, w, a = f.nodes, f.weights, f.values
    da = _alpha_position_deriv(ah, p, wp, r, a)
    density = a * a + da * da
    rows = []
    outer = r >= 0.9 * f.rmax
    for nu in range(nu_max + 1):
        integrand = w * r ** (2 * nu + 2) * density
        total = 4.0 * math.pi * kahan_sum(integrand)
        tail = 4.0 * math.pi * kahan_sum(np.where(outer, integrand, 0.0))
        frac = tail / total if total > 0 else 0.0
        if frac > 1e-6:
            warnings.warn(
                f"moment nu={nu}: outer-decade fraction {frac:.2e}; "
                "extend the pair-state grid",
                TruncationWarning,
                stacklevel=2,
            )
        rows.append({"nu": nu, "value": total, "tail_fraction": frac})
    return rows
