"""Minimization of the GL energy on the charge-2 magnetic unit cell.

The order parameter carries charge 2, so it sees twice the field,
b = 2B, and lives on the square cell of side L = sqrt(2 pi / B) that
b pierces with exactly two flux quanta (b L^2 = 4 pi).  Per unit cell
and unit field the energy is

    E(psi) = (1/|Q|) int [ (Lambda0/B^2) |(-i grad + 2A) psi|^2
                           - D (Lambda2/B) |psi|^2
                           + (Lambda3/B^2) |psi|^4 ],

discretized on an N x N lattice with Peierls link phases in Landau
gauge.  The quadratic form's bottom is Lambda0 lambda_0 / B^2 -
D Lambda2 / B with lambda_0 = lowest magnetic-Laplacian eigenvalue
(-> 2B as N grows), so psi = 0 stops being the minimizer exactly at
D = D_c = 2 Lambda0/Lambda2 — the statement the minimizer lets us verify
against the coefficient pipeline.

E is scale covariant: at fixed N the lattice data for field B and 4B are
related by exact powers of two in IEEE arithmetic, so minima at matched
per-cell resolution agree to rounding — a strong end-to-end consistency
check that costs nothing.

The minimizer is Barzilai-Borwein gradient descent with a nonmonotone
(windowed) acceptance test — BB steps are deliberately nonmonotone, and
forcing monotone descent stalls it near the degenerate minimum — followed
by a short small-step polish.  The zero field is always admitted as a
candidate, since E(0) = 0 is the exact minimum for D <= D_c.
"""

from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .glcoeff import GLCoefficients

__all__ = [
    "NonConvergenceWarning",
    "MagneticCell",
    "OrderParameterField",
    "GLResult",
    "build_magnetic_laplacian",
    "magnetic_translation",
    "landau_levels",
    "lowest_landau_eigenvalue",
    "landau_degeneracy",
    "gl_energy",
    "gl_gradient",
    "minimize_gl",
    "egl_curve",
    "threshold_exponent",
    "scaling_check",
]


class NonConvergenceWarning(UserWarning):
    """The iteration cap was reached with the gradient above tolerance."""


# ---------------------------------------------------------------------------
# cell, link phases, Laplacian
# ---------------------------------------------------------------------------


@dataclass
class MagneticCell:
    """N x N discretization of the charge-2 magnetic unit cell.

    Link phases implement the doubled field b = 2B in Landau gauge
    (vector potential along y, growing with x): the y-links carry
    exp(-i b h^2 i) and the x-links are trivial except at the wrap,
    which carries the accumulated flux exp(+i b h^2 N j).  Every
    plaquette — wrapped ones included — then encloses phase
    exp(-i b h^2), and the total winding is exp(-i b h^2 N^2) =
    exp(-4 pi i) = 1: two flux quanta.

    ``side`` defaults to sqrt(2 pi / B) and must be given explicitly for
    the field-free cell.  ``origin`` shifts the gauge origin (in units of
    the cell side); physical results must not depend on it.
    """

    B: float
    N: int
    side: float | None = None
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.N < 2:
            raise ValueError("cell needs at least 2 points per side")
        if self.B < 0:
            raise ValueError("field strength must be nonnegative")
        if self.side is None:
            if self.B == 0:
                raise ValueError("the field-free cell needs an explicit side")
            self.side = math.sqrt(2.0 * math.pi / self.B)
        self.h = self.side / self.N
        self.b = 2.0 * self.B
        bh2 = self.b * self.h * self.h
        i = np.arange(self.N)
        ox, oy = self.origin
        # y-links: exp(-i b h (x_i - x0)), independent of j
        self.uy = np.exp(-1j * bh2 * (i[:, None] - ox * self.N) * np.ones(self.N)[None, :])
        # x-links: trivial except the wrap column, which closes the flux
        self.ux = np.ones((self.N, self.N), dtype=complex)
        j = np.arange(self.N)
        self.ux[self.N - 1, :] = np.exp(1j * bh2 * self.N * (j - oy * self.N))

    @property
    def npoints(self) -> int:
        return self.N * self.N

    def plaquette_phases(self) -> np.ndarray:
        """Phase around every plaquette; must be exp(-i b h^2) throughout."""
        ux, uy = self.ux, self.uy
        up = np.roll(uy, -1, axis=0)  # uy at (i+1, j)
        right = np.roll(ux, -1, axis=1)  # ux at (i, j+1)
        return ux * up * np.conj(right) * np.conj(uy)

    def winding(self) -> complex:
        """Product of all plaquette phases: exp(-i b h^2 N^2) = exp(-4 pi i).

        Equals 1 (to rounding) because the cell holds an integer number
        of flux quanta; anything else means inconsistent link phases.
        """
        return complex(np.prod(self.plaquette_phases()))


def _site_index(N: int):
    def idx(i, j):
        return (i % N) * N + (j % N)

    return idx


def build_magnetic_laplacian(cell: MagneticCell) -> sp.csr_matrix:
    """Five-point gauge-covariant Laplacian (4 - hops) / h^2.

    Exactly Hermitian by construction (each directed hop is inserted
    together with its conjugate transpose).  For B = 0 all phases are 1
    and the lowest eigenvector is the constant with eigenvalue 0.
    """
    N = cell.N
    idx = _site_index(N)
    h2 = cell.h * cell.h
    rows, cols, vals = [], [], []
    for i in range(N):
        for j in range(N):
            a = idx(i, j)
            for b_, phase in (
                (idx(i + 1, j), cell.ux[i, j]),
                (idx(i, j + 1), cell.uy[i, j]),
            ):
                rows.append(a)
                cols.append(b_)
                vals.append(-phase / h2)
                rows.append(b_)
                cols.append(a)
                vals.append(-np.conj(phase) / h2)
    rows.extend(range(N * N))
    cols.extend(range(N * N))
    vals.extend([4.0 / h2] * (N * N))
    return sp.csr_matrix(
        sp.coo_matrix((vals, (rows, cols)), shape=(N * N, N * N), dtype=complex)
    )


def magnetic_translation(cell: MagneticCell, axis: str) -> sp.csr_matrix:
    """Half-cell magnetic translation commuting with the Laplacian.

    Single-site translations cannot commute with a flux-carrying cell;
    the commuting subgroup is generated by translations through one flux
    quantum of b, i.e. by N/2 sites.  Along x the operator carries the
    gauge-restoring phase exp(-i b h^2 (N/2) j) (switching branch across
    the wrap); along y, with the gauge chosen y-independent, it is the
    plain half-shift.  Requires even N.
    """
    N = cell.N
    if N % 2:
        raise ValueError("magnetic translations need an even cell size")
    m = N // 2
    idx = _site_index(N)
    bh2 = cell.b * cell.h * cell.h
    rows, cols, vals = [], [], []
    for i in range(N):
        for j in range(N):
            a = idx(i, j)
            if axis == "x":
                shift = m if i < N - m else m - N
                rows.append(a)
                cols.append(idx(i + m, j))
                vals.append(np.exp(-1j * bh2 * shift * j))
            elif axis == "y":
                rows.append(a)
                cols.append(idx(i, j + m))
                vals.append(1.0 + 0.0j)
            else:
                raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return sp.csr_matrix(
        sp.coo_matrix((vals, (rows, cols)), shape=(N * N, N * N), dtype=complex)
    )


def landau_levels(cell: MagneticCell, k: int = 6) -> np.ndarray:
    """Lowest k eigenvalues of the cell's magnetic Laplacian, ascending.

    Shift-invert Lanczos with a deterministic start vector.  For B > 0
    the bottom level is the twofold lowest Landau level at 2B + O(h^2);
    the next one sits near 6B.
    """
    M = build_magnetic_laplacian(cell)
    n = M.shape[0]
    if k >= n - 1:
        raise ValueError("k too large for this cell")
    sigma = 0.0 if cell.B > 0 else -1e-6  # keep the factorization nonsingular
    v0 = np.full(n, 1.0 / cell.N, dtype=complex)
    vals = eigsh(M, k=k, sigma=sigma, which="LM", v0=v0, return_eigenvectors=False)
    return np.sort(vals.real)


def lowest_landau_eigenvalue(cell: MagneticCell, k: int = 4) -> float:
    """Smallest magnetic-Laplacian eigenvalue on the cell."""
    return float(landau_levels(cell, k=k)[0])


def landau_degeneracy(levels: np.ndarray, rel_tol: float = 1e-6) -> int:
    """Multiplicity of the bottom level within a relative tolerance."""
    lam0 = levels[0]
    return int(np.sum(np.abs(levels - lam0) <= rel_tol * max(1.0, abs(lam0))))


# ---------------------------------------------------------------------------
# order parameter and energy
# ---------------------------------------------------------------------------


@dataclass
class OrderParameterField:
    """Complex order parameter on the cell's N x N lattice."""

    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError("field values must form a square array")

    @property
    def N(self) -> int:
        return self.values.shape[0]

    def as_vector(self) -> np.ndarray:
        return self.values.ravel()

    @classmethod
    def from_vector(cls, v: np.ndarray, N: int) -> "OrderParameterField":
        return cls(np.asarray(v, dtype=complex).reshape(N, N))

    def periodicity_defect(self, cell: MagneticCell) -> float:
        """Closure defect of the magnetic translation group on this field.

        Translating twice by half a cell must reproduce the field exactly
        (the cell carries an integer number of flux quanta); the returned
        number is the worst relative defect over both axes.
        """
        v = self.as_vector()
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            return 0.0
        worst = 0.0
        for axis in ("x", "y"):
            Tr = magnetic_translation(cell, axis)
            defect = float(np.linalg.norm(Tr @ (Tr @ v) - v)) / nv
            worst = max(worst, defect)
        return worst


def _energy_grad(psi: np.ndarray, D: float, coeffs: GLCoefficients, cell: MagneticCell, M: sp.csr_matrix):
    """Per-site energy and its Wirtinger gradient dE/d(conj psi).

    The descent direction is -g; directional derivatives along a real
    perturbation d are 2 Re <g, d>.
    """
    B = cell.B
    nn = cell.npoints
    Mp = M @ psi
    a2 = np.abs(psi) ** 2
    e = (
        (coeffs.Lambda0 / B**2) * float(np.vdot(psi, Mp).real)
        - D * (coeffs.Lambda2 / B) * float(np.sum(a2))
        + (coeffs.Lambda3 / B**2) * float(np.sum(a2 * a2))
    ) / nn
    g = (
        (coeffs.Lambda0 / B**2) * Mp
        - D * (coeffs.Lambda2 / B) * psi
        + 2.0 * (coeffs.Lambda3 / B**2) * a2 * psi
    ) / nn
    return e, g


def gl_energy(psi, D: float, coeffs: GLCoefficients, cell: MagneticCell, M: sp.csr_matrix | None = None) -> float:
    """GL energy per unit cell and unit field of a lattice field."""
    if cell.B <= 0:
        raise ValueError("the GL functional needs B > 0")
    if M is None:
        M = build_magnetic_laplacian(cell)
    v = psi.as_vector() if isinstance(psi, OrderParameterField) else np.asarray(psi, dtype=complex).ravel()
    e, _ = _energy_grad(v, D, coeffs, cell, M)
    return e


def gl_gradient(psi, D: float, coeffs: GLCoefficients, cell: MagneticCell, M: sp.csr_matrix | None = None) -> np.ndarray:
    """Wirtinger gradient of :func:`gl_energy` (flattened)."""
    if cell.B <= 0:
        raise ValueError("the GL functional needs B > 0")
    if M is None:
        M = build_magnetic_laplacian(cell)
    v = psi.as_vector() if isinstance(psi, OrderParameterField) else np.asarray(psi, dtype=complex).ravel()
    _, g = _energy_grad(v, D, coeffs, cell, M)
    return g


# ---------------------------------------------------------------------------
# minimizer
# ---------------------------------------------------------------------------


@dataclass
class GLResult:
    """Outcome of one GL minimization."""

    D: float
    energy: float
    iterations: int
    grad_norm: float
    psi: OrderParameterField
    converged: bool = True

    def __post_init__(self) -> None:
        if self.energy > 0:
            raise ValueError(
                f"minimizer returned positive energy {self.energy!r}; "
                "the zero field already achieves 0"
            )

    def to_json_dict(self) -> dict:
        return {
            "D": self.D,
            "energy": self.energy,
            "iterations": self.iterations,
            "grad_norm": self.grad_norm,
            "converged": self.converged,
        }


def _one_mode_init(coeffs: GLCoefficients, cell: MagneticCell, D: float, M: sp.csr_matrix, seed: int):
    """Lowest-Landau-level seed with its optimal amplitude, plus a whiff
    of noise so the iteration can leave the single-mode subspace."""
    n = cell.npoints
    v0 = np.full(n, 1.0 / cell.N, dtype=complex)
    lam0, u = eigsh(M, k=1, sigma=0.0, which="LM", v0=v0)
    u0 = u[:, 0]
    B = cell.B
    qq = coeffs.Lambda0 * float(lam0[0]) / B**2 - D * coeffs.Lambda2 / B
    cc = (coeffs.Lambda3 / B**2) * n * float(np.sum(np.abs(u0) ** 4))
    s2 = max(-qq / (2.0 * cc), 0.0)
    s0 = math.sqrt(s2)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return s0 * u0 * math.sqrt(n) + 1e-3 * max(s0, 1e-3) * noise


def minimize_gl(
    D: float,
    coeffs: GLCoefficients,
    cell: MagneticCell,
    init=None,
    *,
    seed: int = 20260818,
    max_iter: int = 20000,
    tol: float = 1e-9,
    window: int = 15,
    polish_steps: int = 50,
) -> GLResult:
    """Minimize the GL energy over lattice fields on the cell.

    Barzilai-Borwein steps with a windowed nonmonotone acceptance test
    (energy may rise, but never above the worst of the last ``window``
    accepted values), safeguarded by a Lipschitz step cap and halving
    backtracks.  After the gradient test  |g| <= tol * max(1, |E|)
    passes, a few small fixed polish steps tighten the tail.  The zero
    field is compared as a final candidate, so the reported energy is
    never positive.

    ``init`` may be an :class:`OrderParameterField`, a flat/2D complex
    array, or None for the default lowest-Landau-level seed.
    """
    if cell.B <= 0:
        raise ValueError("the GL functional needs B > 0")
    M = build_magnetic_laplacian(cell)
    n = cell.npoints
    if init is None:
        psi = _one_mode_init(coeffs, cell, D, M, seed)
    elif isinstance(init, OrderParameterField):
        psi = init.as_vector().copy()
    else:
        psi = np.asarray(init, dtype=complex).ravel().copy()
        if psi.size != n:
            raise ValueError(f"init has {psi.size} entries, cell wants {n}")

    # curvature cap: the quadratic part's largest eigenvalue is below
    # Lambda0/B^2 * 8/h^2 (Gershgorin), all divided by the site count
    lip = (coeffs.Lambda0 / cell.B**2 * 8.0 / cell.h**2 + D * coeffs.Lambda2 / cell.B) / n
    smax = 1.9 / lip
    s = 0.1 * smax

    e, g = _energy_grad(psi, D, coeffs, cell, M)
    hist = deque([e], maxlen=window)
    it = 0
    gn = float(np.linalg.norm(g))
    while it < max_iter and gn > tol * max(1.0, abs(e)):
        f_ref = max(hist)
        # backtracked nonmonotone step
        for _ in range(60):
            cand = psi - s * g
            ec, gc = _energy_grad(cand, D, coeffs, cell, M)
            if math.isfinite(ec) and ec <= f_ref + 1e-12 * max(1.0, abs(f_ref)):
                break
            s *= 0.5
        dp = cand - psi
        dg = gc - g
        psi = cand
        e, g = ec, gc
        hist.append(e)
        gn = float(np.linalg.norm(g))
        den = float(np.vdot(dp, dg).real)
        if den > 0 and math.isfinite(den):
            s = min(float(np.vdot(dp, dp).real) / den, smax)
        else:
            s = 0.1 * smax
        it += 1

    converged = gn <= tol * max(1.0, abs(e))
    if not converged:
        warnings.warn(
            f"GL minimization hit the iteration cap at |g| = {gn:.3e} "
            f"(tolerance {tol * max(1.0, abs(e)):.3e})",
            NonConvergenceWarning,
            stacklevel=2,
        )

    for _ in range(polish_steps):
        step = 0.05 * smax
        cand = psi - step * g
        ec, gc = _energy_grad(cand, D, coeffs, cell, M)
        if not (math.isfinite(ec) and ec <= e + 1e-12 * max(1.0, abs(e))):
            break
        psi, e, g = cand, ec, gc
    gn = float(np.linalg.norm(g))

    if e > 0.0:
        # below and at the transition the true minimizer is the normal state
        psi = np.zeros(n, dtype=complex)
        e, gn = 0.0, 0.0
        converged = True

    return GLResult(
        D=D,
        energy=e,
        iterations=it,
        grad_norm=gn,
        psi=OrderParameterField.from_vector(psi, cell.N),
        converged=converged,
    )


def egl_curve(D_values, coeffs: GLCoefficients, cell: MagneticCell, **kwargs) -> list[GLResult]:
    """Minimized energy along a sweep of D values (nonincreasing in D)."""
    return [minimize_gl(float(D), coeffs, cell, **kwargs) for D in D_values]


def threshold_exponent(results: list[GLResult], Dc: float) -> float:
    """Least-squares slope of log(-E) against log(D/Dc - 1).

    Restricted to supercritical results with strictly negative energy;
    the quadratic threshold behavior E ~ -(D - Dc)^2 gives slope 2.
    """
    xs, ys = [], []
    for res in results:
        if res.D > Dc and res.energy < 0:
            xs.append(math.log(res.D / Dc - 1.0))
            ys.append(math.log(-res.energy))
    if len(xs) < 2:
        raise ValueError("need at least two supercritical points with E < 0")
    slope = np.polyfit(np.asarray(xs), np.asarray(ys), 1)[0]
    return float(slope)


def scaling_check(
    D: float,
    coeffs: GLCoefficients,
    B1: float,
    B2: float,
    N: int,
    **kwargs,
) -> dict:
    """Field-rescaling consistency at matched per-cell resolution.

    Minimizes at B1 and B2 on N x N cells and also transports the B1
    minimizer to the B2 cell through the exact continuum rescaling
    psi -> sqrt(B2/B1) psi (the lattice coordinates rescale with the
    cell side automatically).  Both the minimized energies and the
    transported-field evaluation must agree.
    """
    cell1 = MagneticCell(B=B1, N=N)
    cell2 = MagneticCell(B=B2, N=N)
    r1 = minimize_gl(D, coeffs, cell1, **kwargs)
    r2 = minimize_gl(D, coeffs, cell2, **kwargs)
    scale = math.sqrt(B2 / B1)
    transported = OrderParameterField(scale * r1.psi.values)
    e_transport = gl_energy(transported, D, coeffs, cell2)
    denom = max(abs(r1.energy), abs(r2.energy), 1e-300)
    return {
        "B1": B1,
        "B2": B2,
        "energy_B1": r1.energy,
        "energy_B2": r2.energy,
        "rel_deviation": abs(r1.energy - r2.energy) / denom,
        "transport_deviation": abs(e_transport - r1.energy) / denom,
    }
