"""Numerical certification of the kernel identities and pipeline invariants.

Every analytic identity the pipeline rests on is checked here against an
independent numerical route, producing one :class:`CheckRecord` per
identity with the measured error, the tolerance it is held to, and the
parameters it was probed at.  The records serialize to JSON lines, and
the suite is bit-for-bit reproducible: fixed grids, fixed seeds, no
wall-clock anywhere.

Checks are grouped so cheap symbol-level identities can run without the
heavier solves:

* ``symbols`` — closed forms and representations of the scalar kernels
  (resolvent norms, Matsubara sums with their tail certificates, the
  contour representation of K_T, decay majorants);
* ``gap``     — the reference-problem gap solve and its certificates
  (eigenvalue root, pair norm, gap equation, spectral gap, operator
  symmetry/positivity, agreement of the two representations);
* ``coeffs``  — the GL coefficients against their independent routes;
* ``glmin``   — lattice-level invariants of the magnetic cell and the
  minimizer, run with synthetic coefficients so the group stands alone.

The reference problem throughout is the Gaussian potential 2 e^{-r^2} at
mu = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import symbols
from .gap import (
    BirmanSchwingerOperator,
    GapGrids,
    bs_top_eigenpair,
    critical_temperature,
)
from .glcoeff import (
    GLCoefficients,
    compute_coefficients,
    lambda0_hessian_check,
    lambda2_fd_check,
    lambda3_quad_check,
    tc_shift,
)
from .glmin import (
    MagneticCell,
    build_magnetic_laplacian,
    landau_degeneracy,
    landau_levels,
    magnetic_translation,
    minimize_gl,
    scaling_check,
    _energy_grad,
    _one_mode_init,
)
from .model import builtin_potential

__all__ = ["TOLERANCES", "CheckRecord", "VerificationReport", "run_identity_suite"]


# central tolerance table: every entry in a report cites one of these
TOLERANCES = {
    "kt_floor": 0.0,
    "cosh2_identity": 1e-8,
    "cosh2_certificate": 1.0,
    "g1_identity": 1e-8,
    "g1_certificate": 1.0,
    "contour_representation": 1e-6,
    "resolvent_weighted_l1": 1e-6,
    "g0_decay_ratio": 1e3,  # finiteness guard for the majorant constant
    "lt_diagonal": 1e-12,
    "speaker_chain": 1e-12,
    "eta_root": 1e-10,
    "pair_norm": 1e-10,
    "gap_equation": 1e-8,
    "kv_ground_level": 1e-8,
    "kv_gap_positive": 0.0,
    "eta_monotone": 0.0,
    "bs_v_monotone": 0.0,
    "bs_symmetry": 1e-13,
    "bs_positive": 1e-10,
    "bs_representation_agreement": 1e-3,
    "coeff_positive": 0.0,
    "lambda2_fd": 1e-5,
    "lambda0_hessian": 1e-4,
    "lambda3_quad": 1e-8,
    "dc_identity": 0.0,
    "tcshift_zero_field": 0.0,
    "tcshift_linear": 1e-12,
    "landau_level": 1e-2,
    "landau_degeneracy": 0.0,
    "gauge_origin": 1e-10,
    "laplacian_hermitian": 0.0,
    "plaquette_flux": 1e-12,
    "winding": 1e-10,
    "translation_commutator": 1e-12,
    "gradient_fd": 1e-6,
    "phase_invariance": 1e-12,
    "descent": 0.0,
    "threshold_zero": 1e-6,
    "threshold_negative": 0.0,
    "rescale_energy": 1e-3,
    "rescale_transport": 1e-12,
}

GROUPS = ("symbols", "gap", "coeffs", "glmin")


@dataclass(frozen=True)
class CheckRecord:
    """One verified identity: measured error against its tolerance."""

    name: str
    anchor: str
    params: dict
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.error <= self.tol

    def to_json(self) -> str:
        err = self.error if math.isfinite(self.error) else "inf"
        return json.dumps(
            {
                "name": self.name,
                "anchor": self.anchor,
                "params": self.params,
                "error": err,
                "tol": self.tol,
                "passed": self.passed,
            },
            sort_keys=True,
        )


@dataclass
class VerificationReport:
    """Ordered collection of check records plus a one-line summary."""

    entries: list[CheckRecord] = field(default_factory=list)

    @property
    def n_total(self) -> int:
        return len(self.entries)

    @property
    def n_passed(self) -> int:
        return sum(1 for e in self.entries if e.passed)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def summary(self) -> dict:
        worst = None
        for e in self.entries:
            ratio = e.error / e.tol if e.tol > 0 else (0.0 if e.passed else math.inf)
            if worst is None or ratio > worst[1]:
                worst = (e.name, ratio)
        return {
            "total": self.n_total,
            "passed": self.n_passed,
            "failed": self.n_total - self.n_passed,
            "worst": worst[0] if worst else None,
        }

    def to_jsonl(self) -> str:
        lines = [e.to_json() for e in self.entries]
        lines.append(json.dumps({"summary": self.summary()}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())


def _record(entries: list, name: str, anchor: str, params: dict, error: float) -> None:
    entries.append(
        CheckRecord(
            name=name,
            anchor=anchor,
            params=params,
            error=float(error),
            tol=TOLERANCES[name],
        )
    )


def _guarded(entries: list, name: str, anchor: str, fn) -> None:
    """Run one check; numerical blowups become failed entries, not crashes."""
    try:
        fn()
    except Exception as exc:  # noqa: BLE001 - any failure must land in the report
        entries.append(
            CheckRecord(
                name=name,
                anchor=anchor,
                params={"exception": f"{type(exc).__name__}: {exc}"},
                error=math.inf,
                tol=TOLERANCES[name],
            )
        )


# ---------------------------------------------------------------------------
# symbols group
# ---------------------------------------------------------------------------


def _check_kt_floor(entries: list) -> None:
    x = np.linspace(-50.0, 50.0, 501)
    worst = 0.0
    temps = [0.05, 0.3, 1.0, 5.0]
    for T in temps:
        K = symbols.kt_symbol(x, T)
        floor = np.maximum(2.0 * T, np.abs(x))
        worst = max(worst, float(np.max((floor - K) / K)))
    _record(
        entries,
        "kt_floor",
        "kt-pointwise-lower-bound",
        {"temperatures": temps, "x_range": [-50.0, 50.0]},
        max(0.0, worst),
    )


def _check_cosh2(entries: list) -> None:
    pairs = [
        (beta, z)
        for beta in (0.5, 1.0, 2.0, 8.0)
        for z in (-7.3, -1.0, -1e-4, 0.0, 0.37, 2.0, 5.0, 11.0)
    ][:20]
    worst_err = 0.0
    worst_ratio = 0.0
    for beta, z in pairs:
        val, cfg = symbols.matsubara_cosh2_sum(z, beta, N=1000)
        target = 0.5 * beta * symbols.sech2_half(beta * z)
        resid = abs(val - target)
        worst_err = max(worst_err, resid)
        noise = 64.0 * np.finfo(float).eps * max(abs(val), abs(target))
        worst_ratio = max(worst_ratio, resid / (cfg.tail_bound + noise))
    _record(
        entries,
        "cosh2_identity",
        "cosh2-matsubara-representation",
        {"pairs": len(pairs), "N": 1000},
        worst_err,
    )
    _record(
        entries,
        "cosh2_certificate",
        "cosh2-tail-bound",
        {"pairs": len(pairs), "N": 1000},
        worst_ratio,
    )


def _check_g1_sum(entries: list) -> None:
    pairs = [
        (beta, E)
        for beta, E in (
            (1.0, 0.0),
            (1.0, 1e-9),
            (1.0, 1e-4),
            (1.0, 0.5),
            (1.0, 3.0),
            (2.0, 0.0),
            (2.0, 1e-6),
            (2.0, 1.7),
            (0.5, 0.0),
            (0.5, 4.2),
        )
    ]
    worst_err = 0.0
    worst_ratio = 0.0
    for beta, E in pairs:
        val, cfg = symbols.matsubara_g1_sum(E, beta, N=20_000)
        target = 0.5 * beta**2 * symbols.g1_over_x(E, beta)
        resid = abs(val - target)
        worst_err = max(worst_err, resid)
        noise = 64.0 * np.finfo(float).eps * max(abs(val), abs(target))
        worst_ratio = max(worst_ratio, resid / (cfg.tail_bound + noise))
    _record(
        entries,
        "g1_identity",
        "g1-matsubara-representation",
        {"pairs": len(pairs), "N": 20000},
        worst_err,
    )
    _record(
        entries,
        "g1_certificate",
        "g1-tail-bound",
        {"pairs": len(pairs), "N": 20000},
        worst_ratio,
    )


def _check_contour(entries: list) -> None:
    xs = [-0.9, -0.5, 0.0, 0.3, 1.0, 2.7, 5.0, 9.0, 14.0, 19.0]
    worst = 0.0
    for T in (0.1, 1.0):
        for x in xs:
            via_contour = symbols.kt_contour_eval(x, T, R=50.0)
            direct = symbols.kt_symbol(x, T)
            worst = max(worst, abs(via_contour - direct) / abs(direct))
    _record(
        entries,
        "contour_representation",
        "kt-resolvent-contour",
        {"x": xs, "T": [0.1, 1.0], "R": 50.0},
        worst,
    )


def _speaker_probe_points(R: float, beta_c: float, mu: float):
    """One interior point per segment of the loudspeaker path."""
    path = symbols.speaker_path(R, beta_c, mu)
    pts = []
    for seg in path.segments:
        tm = 0.5 * (seg.t0 + seg.t1)
        pts.append(complex(seg.z(tm)))
    return pts


def _check_g0_norms(entries: list) -> None:
    mu = 1.0
    pts = _speaker_probe_points(10.0, 1.0, mu)
    worst = 0.0
    for a in (0, 1, 2, 3):
        for z in pts:
            closed = symbols.g0_weighted_l1(a, z, mu)
            quad = symbols.g0_weighted_l1_quad(a, z, mu)
            worst = max(worst, abs(closed - quad) / abs(closed))
    _record(
        entries,
        "resolvent_weighted_l1",
        "g0-weighted-norm-closed-form",
        {"a": [0, 1, 2, 3], "points": 5, "path": "speaker(10, 1, 1)"},
        worst,
    )


def _check_g0_decay(entries: list) -> None:
    mu = 1.0
    worst = 0.0
    at = None
    for a in (0, 1, 2):
        for t in (-2.0, -1.0, 0.0, 1.0, 4.0):
            for omega in (0.5, 2.0, 10.0):
                z = complex(t, omega)
                norm = symbols.g0_weighted_l1(a, z, mu)
                f = symbols.f_decay(t, omega, mu)
                ratio = norm / f ** (1.0 + a / 2.0)
                if ratio > worst:
                    worst, at = ratio, {"a": a, "t": t, "omega": omega}
    _record(
        entries,
        "g0_decay_ratio",
        "g0-decay-majorant",
        {"max_at": at},
        worst,
    )


def _check_lt_diagonal(entries: list) -> None:
    p = np.linspace(0.01, 6.0, 401)
    worst = 0.0
    for T, mu in ((0.1, 1.0), (1.0, 1.0), (0.5, -0.5)):
        lt = symbols.lt_symbol(p, p, T, mu)
        inv_k = 1.0 / symbols.kt_symbol(p * p - mu, T)
        worst = max(worst, float(np.max(np.abs(lt - inv_k))))
    _record(
        entries,
        "lt_diagonal",
        "lt-reduces-to-kt-inverse",
        {"points": 401, "cases": 3},
        worst,
    )


def _check_speaker_chain(entries: list) -> None:
    worst = 0.0
    for beta_c, mu in ((1.0, 1.0), (8.9, 0.3), (2.0, 5.0)):
        path = symbols.speaker_path(50.0, beta_c, mu)
        segs = path.segments
        pts = []
        for seg in segs:
            a = seg.z(seg.t1 if seg.reversed_ else seg.t0)
            b = seg.z(seg.t0 if seg.reversed_ else seg.t1)
            pts.append((a, b))
        for (_, b), (a2, _) in zip(pts[:-1], pts[1:]):
            worst = max(worst, abs(b - a2))
        d = math.pi / (2.0 * beta_c)
        worst = max(worst, abs(segs[1].z(0.0) - 1j * d))
        worst = max(worst, abs(segs[3].z(1.0) + 1j * d))
    _record(
        entries,
        "speaker_chain",
        "speaker-path-geometry",
        {"cases": 3},
        worst,
    )


def _run_symbols(entries: list) -> None:
    _guarded(entries, "kt_floor", "kt-pointwise-lower-bound", lambda: _check_kt_floor(entries))
    _guarded(entries, "cosh2_identity", "cosh2-matsubara-representation", lambda: _check_cosh2(entries))
    _guarded(entries, "g1_identity", "g1-matsubara-representation", lambda: _check_g1_sum(entries))
    _guarded(entries, "contour_representation", "kt-resolvent-contour", lambda: _check_contour(entries))
    _guarded(entries, "resolvent_weighted_l1", "g0-weighted-norm-closed-form", lambda: _check_g0_norms(entries))
    _guarded(entries, "g0_decay_ratio", "g0-decay-majorant", lambda: _check_g0_decay(entries))
    _guarded(entries, "lt_diagonal", "lt-reduces-to-kt-inverse", lambda: _check_lt_diagonal(entries))
    _guarded(entries, "speaker_chain", "speaker-path-geometry", lambda: _check_speaker_chain(entries))


# ---------------------------------------------------------------------------
# gap group
# ---------------------------------------------------------------------------


def _reference_problem():
    V = builtin_potential("gaussian", v0=2.0, a=1.0)
    return V, 1.0


def _run_gap(entries: list, ctx: dict) -> None:
    def solve():
        V, mu = _reference_problem()
        sol = critical_temperature(V, mu, bracket=(0.05, 0.3))
        ctx["solution"] = sol
        ctx["potential"] = V
        _record(entries, "eta_root", "bs-eigenvalue-crossing", {"Tc": sol.Tc}, sol.eta_residual)
        _record(entries, "pair_norm", "pair-state-normalization", {"Tc": sol.Tc}, abs(sol.norm_momentum() - 1.0))
        _record(entries, "gap_equation", "gap-equation-residual", {"Tc": sol.Tc}, sol.gap_residual)
        _record(entries, "kv_ground_level", "kv-ground-level-at-tc", {"e0": sol.e0}, abs(sol.e0))
        _record(
            entries,
            "kv_gap_positive",
            "kv-spectral-gap",
            {"kappa": sol.kappa, "floor": 1e-6},
            max(0.0, 1e-6 - sol.kappa),
        )

    _guarded(entries, "eta_root", "bs-eigenvalue-crossing", solve)

    def monotone():
        V, mu = _reference_problem()
        sol = ctx["solution"]
        grids = GapGrids.build(rmax=float(V.rmax), mu=mu, T_scale=0.05)
        temps = [0.6 * sol.Tc, 0.8 * sol.Tc, sol.Tc, 1.25 * sol.Tc]
        etas = [bs_top_eigenpair(T, V, mu, grids=grids)[0] for T in temps]
        worst = max(
            (etas[i + 1] - etas[i] for i in range(len(etas) - 1)), default=0.0
        )
        _record(
            entries,
            "eta_monotone",
            "bs-eigenvalue-monotone-in-T",
            {"temps": temps, "etas": etas},
            max(0.0, worst),
        )
        # doubling the potential cannot lower the top eigenvalue
        from .model import RadialFunction

        V2 = RadialFunction(V.nodes, 2.0 * V.values, V.weights, span=V.span)
        eta_1 = etas[2]
        eta_2 = bs_top_eigenpair(sol.Tc, V2, mu, grids=grids)[0]
        _record(
            entries,
            "bs_v_monotone",
            "bs-monotone-in-potential",
            {"eta_V": eta_1, "eta_2V": eta_2},
            max(0.0, eta_1 - eta_2),
        )

    _guarded(entries, "eta_monotone", "bs-eigenvalue-monotone-in-T", monotone)

    def rspace():
        V, mu = _reference_problem()
        sol = ctx["solution"]
        op = BirmanSchwingerOperator.build(sol.Tc, V, mu)
        asym = float(np.max(np.abs(op.matrix - op.matrix.T)))
        scale = float(np.max(np.abs(op.matrix)))
        _record(entries, "bs_symmetry", "bs-operator-symmetry", {"n": len(op.nodes)}, asym / scale)
        eta_r, _ = op.top_eigenpair()
        lam_min = op.min_eigenvalue()
        _record(
            entries,
            "bs_positive",
            "bs-operator-psd",
            {"min_eig": lam_min, "top_eig": eta_r},
            max(0.0, -lam_min / eta_r),
        )
        _record(
            entries,
            "bs_representation_agreement",
            "bs-position-vs-momentum",
            {"eta_position": eta_r, "eta_momentum": 1.0},
            abs(eta_r - 1.0),
        )

    _guarded(entries, "bs_symmetry", "bs-operator-symmetry", rspace)


# ---------------------------------------------------------------------------
# coeffs group
# ---------------------------------------------------------------------------


def _run_coeffs(entries: list, ctx: dict) -> None:
    def run():
        if "solution" not in ctx:
            V, mu = _reference_problem()
            ctx["solution"] = critical_temperature(V, mu, bracket=(0.05, 0.3))
        sol = ctx["solution"]
        coeffs = compute_coefficients(sol)
        ctx["coeffs"] = coeffs
        _record(
            entries,
            "coeff_positive",
            "gl-coefficients-positive",
            {"Lambda0": coeffs.Lambda0, "Lambda2": coeffs.Lambda2, "Lambda3": coeffs.Lambda3},
            max(0.0, -min(coeffs.Lambda0, coeffs.Lambda2, coeffs.Lambda3)),
        )
        _record(entries, "lambda2_fd", "lambda2-temperature-derivative", {}, lambda2_fd_check(sol))
        _record(entries, "lambda0_hessian", "lambda0-symbol-hessian", {}, lambda0_hessian_check(sol))
        _record(entries, "lambda3_quad", "lambda3-adaptive-quadrature", {}, lambda3_quad_check(sol))
        _record(
            entries,
            "dc_identity",
            "dc-ratio-definition",
            {"Dc": coeffs.Dc},
            abs(coeffs.Dc - 2.0 * coeffs.Lambda0 / coeffs.Lambda2),
        )
        tc0 = tc_shift(sol.Tc, coeffs.Dc, 0.0)
        _record(entries, "tcshift_zero_field", "tcshift-at-zero", {}, abs(tc0 - sol.Tc))
        b_lin = 1e-3 / coeffs.Dc
        drop1 = sol.Tc - tc_shift(sol.Tc, coeffs.Dc, b_lin)
        drop2 = sol.Tc - tc_shift(sol.Tc, coeffs.Dc, 2.0 * b_lin)
        _record(
            entries,
            "tcshift_linear",
            "tcshift-linearity",
            {"B": b_lin},
            abs(drop2 - 2.0 * drop1) / sol.Tc,
        )

    _guarded(entries, "coeff_positive", "gl-coefficients-positive", run)


# ---------------------------------------------------------------------------
# glmin group (synthetic coefficients: the lattice invariants hold for any)
# ---------------------------------------------------------------------------


def _synthetic_coeffs() -> GLCoefficients:
    return GLCoefficients(
        Lambda0=1.0, Lambda2=2.0, Lambda3=3.0, Dc=2.0 * 1.0 / 2.0, Tc=0.1,
        provenance={"synthetic": True},
    )


def _run_glmin(entries: list, config: dict) -> None:
    N = int(config.get("cell_n", 64))
    seed = int(config.get("seed", 20260818))

    def lattice():
        cell = MagneticCell(B=1.0, N=N)
        plaq = cell.plaquette_phases()
        target = np.exp(-1j * cell.b * cell.h**2)
        _record(
            entries,
            "plaquette_flux",
            "uniform-plaquette-flux",
            {"N": N},
            float(np.max(np.abs(plaq - target))),
        )
        _record(entries, "winding", "two-flux-quanta-winding", {"N": N}, abs(cell.winding() - 1.0))
        M = build_magnetic_laplacian(cell)
        herm = (M - M.getH()).tocoo()
        herm_err = float(np.max(np.abs(herm.data))) if herm.nnz else 0.0
        _record(entries, "laplacian_hermitian", "laplacian-hermiticity", {"N": N}, herm_err)
        scale = 4.0 / cell.h**2
        worst = 0.0
        for axis in ("x", "y"):
            Tr = magnetic_translation(cell, axis)
            comm = (Tr @ M - M @ Tr).tocoo()
            if comm.nnz:
                worst = max(worst, float(np.max(np.abs(comm.data))) / scale)
        _record(entries, "translation_commutator", "magnetic-translation-symmetry", {"N": N}, worst)

        levels = landau_levels(cell, k=4)
        _record(
            entries,
            "landau_level",
            "lowest-landau-eigenvalue",
            {"N": N, "levels": [float(v) for v in levels]},
            abs(levels[0] - 2.0),
        )
        _record(
            entries,
            "landau_degeneracy",
            "lowest-landau-degeneracy",
            {"N": N},
            abs(landau_degeneracy(levels) - 2),
        )
        lam_shifted = landau_levels(MagneticCell(B=1.0, N=N, origin=(0.31, 0.73)), k=2)[0]
        _record(
            entries,
            "gauge_origin",
            "gauge-origin-invariance",
            {"N": N, "origin": [0.31, 0.73]},
            abs(lam_shifted - levels[0]) / abs(levels[0]),
        )

    _guarded(entries, "plaquette_flux", "uniform-plaquette-flux", lattice)

    def energetics():
        coeffs = _synthetic_coeffs()
        cell = MagneticCell(B=1.0, N=N)
        M = build_magnetic_laplacian(cell)
        rng = np.random.default_rng(seed)
        psi = rng.standard_normal(cell.npoints) + 1j * rng.standard_normal(cell.npoints)
        D = 1.2 * coeffs.Dc
        e, g = _energy_grad(psi, D, coeffs, cell, M)
        # analytic gradient vs central differences along random directions
        eps = 1e-5
        worst = 0.0
        for _ in range(10):
            d = rng.standard_normal(cell.npoints) + 1j * rng.standard_normal(cell.npoints)
            d /= np.linalg.norm(d)
            ep, _ = _energy_grad(psi + eps * d, D, coeffs, cell, M)
            em, _ = _energy_grad(psi - eps * d, D, coeffs, cell, M)
            fd = (ep - em) / (2.0 * eps)
            an = 2.0 * float(np.vdot(g, d).real)
            worst = max(worst, abs(fd - an) / max(1.0, abs(an)))
        _record(entries, "gradient_fd", "energy-gradient-consistency", {"N": N, "eps": eps}, worst)

        e_rot, _ = _energy_grad(np.exp(0.7j) * psi, D, coeffs, cell, M)
        _record(
            entries,
            "phase_invariance",
            "global-phase-invariance",
            {"N": N},
            abs(e_rot - e) / max(1.0, abs(e)),
        )

    _guarded(entries, "gradient_fd", "energy-gradient-consistency", energetics)

    def minimization():
        coeffs = _synthetic_coeffs()
        cell = MagneticCell(B=1.0, N=N)
        M = build_magnetic_laplacian(cell)
        D = 1.1 * coeffs.Dc
        psi0 = _one_mode_init(coeffs, cell, D, M, seed)
        e0, _ = _energy_grad(psi0, D, coeffs, cell, M)
        res = minimize_gl(D, coeffs, cell, init=psi0, seed=seed)
        _record(
            entries,
            "descent",
            "minimizer-descends",
            {"N": N, "D": D, "E_init": e0, "E_final": res.energy},
            max(0.0, res.energy - e0),
        )
        _record(
            entries,
            "threshold_negative",
            "supercritical-energy-negative",
            {"N": N, "D_over_Dc": 1.1, "energy": res.energy},
            max(0.0, res.energy + 1e-6),
        )
        worst = 0.0
        for factor in (0.5, 0.9, 1.0):
            r = minimize_gl(factor * coeffs.Dc, coeffs, cell, seed=seed)
            worst = max(worst, abs(r.energy))
        _record(
            entries,
            "threshold_zero",
            "subcritical-energy-zero",
            {"N": N, "factors": [0.5, 0.9, 1.0]},
            worst,
        )

    _guarded(entries, "descent", "minimizer-descends", minimization)

    def rescaling():
        coeffs = _synthetic_coeffs()
        rep = scaling_check(1.5 * coeffs.Dc, coeffs, B1=1.0, B2=4.0, N=N, seed=seed)
        _record(
            entries,
            "rescale_energy",
            "field-rescaling-covariance",
            {"N": N, **{k: rep[k] for k in ("B1", "B2", "energy_B1", "energy_B2")}},
            rep["rel_deviation"],
        )
        _record(
            entries,
            "rescale_transport",
            "field-rescaling-transport",
            {"N": N},
            rep["transport_deviation"],
        )

    _guarded(entries, "rescale_energy", "field-rescaling-covariance", rescaling)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------


def run_identity_suite(config: dict | None = None) -> VerificationReport:
    """Run the selected verification groups and collect the report.

    ``config`` keys: ``groups`` (subset of {"symbols", "gap", "coeffs",
    "glmin"}; default all), ``cell_n`` (lattice size for the glmin group),
    ``seed``.  Unknown group names raise; an empty selection produces an
    empty (passing) report.  Numerical failures inside a check become
    failed entries rather than exceptions, so a report always comes back.
    """
    config = dict(config or {})
    groups = config.get("groups")
    if groups is None:
        groups = list(GROUPS)
    for g in groups:
        if g not in GROUPS:
            raise ValueError(f"unknown verification group {g!r}; known: {GROUPS}")
    entries: list[CheckRecord] = []
    ctx: dict = {}
    if "symbols" in groups:
        _run_symbols(entries)
    if "gap" in groups:
        _run_gap(entries, ctx)
    if "coeffs" in groups:
        _run_coeffs(entries, ctx)
    if "glmin" in groups:
        _run_glmin(entries, config)
    return VerificationReport(entries=entries)
