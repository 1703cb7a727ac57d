"""BCS gap problem, Ginzburg-Landau coefficients, and the critical-field
ratio, from a radial pair potential to the minimized GL energy on the
magnetic unit cell.

The pipeline, in dependency order:

* :mod:`bcsgl.model`   — radial functions, quadrature, Fourier transform;
* :mod:`bcsgl.symbols` — the scalar kernels K_T, L_T, g1, g2, plus their
  certified Matsubara and contour representations;
* :mod:`bcsgl.gap`     — the Birman-Schwinger solve: T_c, the pair state
  alpha_*, the spectral gap of K_{T_c} - V;
* :mod:`bcsgl.glcoeff` — the GL coefficients Lambda_0, Lambda_2, Lambda_3
  and D_c = 2 Lambda_0 / Lambda_2, with T_c(B) = T_c (1 - D_c B);
* :mod:`bcsgl.glmin`   — minimization of the GL energy on the charge-2
  magnetic unit cell;
* :mod:`bcsgl.verify`  — numerical certification of every identity the
  pipeline rests on.
"""

from .model import (
    InvalidGridError,
    PhysParams,
    RadialFunction,
    RadialMomentumFunction,
    TruncationWarning,
    builtin_potential,
    gauss_panels,
    load_radial,
    radial_fourier,
    radial_grid,
    save_radial,
    weighted_norm,
)
from .symbols import (
    ContourError,
    DivergenceError,
    MatsubaraConfig,
    SingularEvaluationError,
    g0_weighted_l1,
    g1,
    g2,
    kt_contour_eval,
    kt_symbol,
    lt_symbol,
    matsubara_cosh2_sum,
    matsubara_g1_sum,
    speaker_path,
)
from .gap import (
    BirmanSchwingerOperator,
    GapGrids,
    GapSolution,
    NoRootError,
    bs_top_eigenpair,
    critical_temperature,
    moment_check,
    spectral_gap,
    swave_kt_inverse_kernel,
)
from .glcoeff import (
    GLCoefficients,
    compute_coefficients,
    critical_ratio_Dc,
    tc_shift,
)
from .glmin import (
    GLResult,
    MagneticCell,
    OrderParameterField,
    egl_curve,
    gl_energy,
    gl_gradient,
    landau_levels,
    lowest_landau_eigenvalue,
    magnetic_translation,
    minimize_gl,
    scaling_check,
    threshold_exponent,
)
from .verify import CheckRecord, VerificationReport, run_identity_suite

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "InvalidGridError",
    "PhysParams",
    "RadialFunction",
    "RadialMomentumFunction",
    "TruncationWarning",
    "builtin_potential",
    "gauss_panels",
    "load_radial",
    "radial_fourier",
    "radial_grid",
    "save_radial",
    "weighted_norm",
    # symbols
    "ContourError",
    "DivergenceError",
    "MatsubaraConfig",
    "SingularEvaluationError",
    "g0_weighted_l1",
    "g1",
    "g2",
    "kt_contour_eval",
    "kt_symbol",
    "lt_symbol",
    "matsubara_cosh2_sum",
    "matsubara_g1_sum",
    "speaker_path",
    # gap
    "BirmanSchwingerOperator",
    "GapGrids",
    "GapSolution",
    "NoRootError",
    "bs_top_eigenpair",
    "critical_temperature",
    "moment_check",
    "spectral_gap",
    "swave_kt_inverse_kernel",
    # glcoeff
    "GLCoefficients",
    "compute_coefficients",
    "critical_ratio_Dc",
    "tc_shift",
    # glmin
    "GLResult",
    "MagneticCell",
    "OrderParameterField",
    "egl_curve",
    "gl_energy",
    "gl_gradient",
    "landau_levels",
    "lowest_landau_eigenvalue",
    "magnetic_translation",
    "minimize_gl",
    "scaling_check",
    "threshold_exponent",
    # verify
    "CheckRecord",
    "VerificationReport",
    "run_identity_suite",
]
