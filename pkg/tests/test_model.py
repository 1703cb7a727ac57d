from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bcsgl.model import (
    InvalidGridError,
    RadialFunction,
    RadialMomentumFunction,
    TruncationWarning,
    builtin_potential,
    gauss_panels,
    kahan_sum,
    load_radial,
    radial_fourier,
    radial_grid,
    save_radial,
    weighted_norm,
)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def test_gauss_panels_integrates_polynomials_exactly():
    r, w = gauss_panels(np.linspace(0.0, 2.0, 5), order=6)
    # order-6 Gauss is exact through degree 11
    for k in range(12):
        exact = 2.0 ** (k + 1) / (k + 1)
        assert abs(np.sum(w * r**k) - exact) <= 1e-13 * exact


def test_gauss_panels_rejects_bad_edges():
    with pytest.raises(InvalidGridError):
        gauss_panels([0.0], order=4)
    with pytest.raises(InvalidGridError):
        gauss_panels([0.0, 1.0, 1.0], order=4)
    with pytest.raises(InvalidGridError):
        gauss_panels([0.0, np.inf], order=4)


def test_radial_grid_covers_interval():
    r, w = radial_grid(9.0, n_panels=30, order=12)
    assert r[0] > 0.0 and r[-1] < 9.0
    assert np.all(np.diff(r) > 0)
    assert abs(np.sum(w) - 9.0) <= 1e-12 * 9.0


def test_kahan_sum_compensates_rounding():
    # running float addition of ten 0.1's loses an ulp; compensation keeps it
    assert kahan_sum([0.1] * 10) == 1.0
    assert kahan_sum([]) == 0.0
    # error stays at the compensated-summation bound on wildly scaled input
    rng = np.random.default_rng(7)
    x = rng.standard_normal(20000) * np.exp(rng.uniform(-20.0, 20.0, 20000))
    assert abs(kahan_sum(x) - math.fsum(x)) <= 4.0 * np.finfo(float).eps * np.sum(np.abs(x))


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------


def test_radial_function_validates_grid():
    r, w = radial_grid(3.0, n_panels=5, order=4)
    with pytest.raises(InvalidGridError):
        RadialFunction(r[::-1], np.ones_like(r), w)
    with pytest.raises(InvalidGridError):
        RadialFunction(r, np.ones_like(r), -w)
    with pytest.raises(InvalidGridError):
        RadialFunction(r, np.ones(3), w)
    with pytest.raises(ValueError):
        RadialFunction(r, np.full_like(r, np.nan), w)


def test_radial_function_span_invariant():
    r, w = radial_grid(3.0, n_panels=5, order=4)
    f = RadialFunction(r, np.ones_like(r), w, span=(0.0, 3.0))
    assert f.rmax == 3.0
    assert abs(f.integrate(r**2) - 9.0) <= 1e-12 * 9.0
    # a wrong span must be caught at construction
    with pytest.raises(InvalidGridError):
        RadialFunction(r, np.ones_like(r), w, span=(0.0, 4.0))


def test_momentum_function_demotes_real_complex_values():
    p, w = radial_grid(2.0, n_panels=3, order=4)
    f = RadialMomentumFunction(p, (1.0 + 0.0j) * p, w)
    assert f.values.dtype == np.float64
    g = RadialMomentumFunction(p, p + 1.0j, w)
    assert np.iscomplexobj(g.values)


def test_real_container_rejects_complex_values():
    r, w = radial_grid(2.0, n_panels=3, order=4)
    with pytest.raises(TypeError):
        RadialFunction(r, r + 1.0j, w)


# ---------------------------------------------------------------------------
# transform
# ---------------------------------------------------------------------------


def _gaussian_pair(rmax=12.0, n_panels=40):
    r, w = radial_grid(rmax, n_panels=n_panels, order=12)
    return RadialFunction(r, np.exp(-(r**2)), w, span=(0.0, rmax))


def test_gaussian_transform_matches_closed_form():
    f = _gaussian_pair()
    p = np.linspace(0.0, 6.0, 61)
    fhat = radial_fourier(f, p)
    exact = math.pi**1.5 * np.exp(-(p**2) / 4.0)
    assert np.max(np.abs(fhat.values - exact) / exact) <= 1e-12


def test_transform_zero_momentum_limit():
    f = _gaussian_pair()
    fhat = radial_fourier(f, np.array([0.0, 1.0]))
    assert abs(fhat.values[0] - math.pi**1.5) <= 1e-12 * math.pi**1.5


def test_transform_is_linear():
    r, w = radial_grid(12.0, n_panels=40, order=12)
    f = RadialFunction(r, np.exp(-(r**2)), w)
    g = RadialFunction(r, np.exp(-2.0 * r), w)
    h = RadialFunction(r, 2.0 * f.values + 3.0 * g.values, w)
    p = np.linspace(0.0, 5.0, 26)
    lhs = radial_fourier(h, p).values
    rhs = 2.0 * radial_fourier(f, p).values + 3.0 * radial_fourier(g, p).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_transform_stable_under_grid_doubling():
    p = np.linspace(0.0, 6.0, 31)
    coarse = radial_fourier(_gaussian_pair(n_panels=40), p).values
    fine = radial_fourier(_gaussian_pair(n_panels=80), p).values
    assert np.max(np.abs(coarse - fine)) <= 1e-10 * np.max(np.abs(fine))


def test_plancherel_for_gaussian():
    f = _gaussian_pair()
    # position side: ||f||^2 = 4 pi int r^2 e^(-2 r^2) dr = pi^(3/2)/(2 sqrt 2) * ... computed via norm
    norm_r = weighted_norm(f, a=0.0, kind="L2")
    p, wp = radial_grid(25.0, n_panels=50, order=12)
    fhat = radial_fourier(f, p, pweights=wp)
    norm_p = math.sqrt(kahan_sum(wp * p**2 * fhat.values**2) / (2.0 * math.pi**2))
    assert abs(norm_r - norm_p) <= 1e-10 * norm_r


def test_transform_warns_when_grid_truncates():
    r, w = radial_grid(12.0, n_panels=40, order=12)
    f = RadialFunction(r, np.ones_like(r), w)  # no decay at all
    with pytest.warns(TruncationWarning):
        radial_fourier(f, np.linspace(0.0, 2.0, 11))


def test_transform_rejects_bad_momentum_grid():
    f = _gaussian_pair()
    with pytest.raises(InvalidGridError):
        radial_fourier(f, np.array([1.0, 0.5]))
    with pytest.raises(InvalidGridError):
        radial_fourier(f, np.array([-1.0, 0.5]))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def test_weighted_norms_of_exponential():
    r, w = radial_grid(60.0, n_panels=120, order=12)
    f = RadialFunction(r, np.exp(-r), w)
    # 4 pi int r^2 e^-r = 8 pi ; 4 pi int r^4 e^-r = 96 pi
    assert abs(weighted_norm(f, a=0.0) - 8.0 * math.pi) <= 1e-10 * 8.0 * math.pi
    assert abs(weighted_norm(f, a=2.0) - 96.0 * math.pi) <= 1e-10 * 96.0 * math.pi
    # || e^-r ||_2 = sqrt(4 pi int r^2 e^-2r) = sqrt(pi)
    assert abs(weighted_norm(f, kind="L2") - math.sqrt(math.pi)) <= 1e-12


def test_weighted_norm_rejects_bad_arguments():
    r, w = radial_grid(2.0, n_panels=3, order=4)
    f = RadialFunction(r, np.ones_like(r), w)
    with pytest.raises(ValueError):
        weighted_norm(f, a=-0.5)
    with pytest.raises(ValueError):
        weighted_norm(f, kind="L7")


# ---------------------------------------------------------------------------
# potentials
# ---------------------------------------------------------------------------


def test_builtin_gaussian_defaults():
    V = builtin_potential("gaussian")
    assert V.span == (0.0, 12.0)
    assert np.all(V.values >= 0)
    mid = np.argmin(np.abs(V.nodes - 1.0))
    assert abs(V.values[mid] - 2.0 * math.exp(-V.nodes[mid] ** 2)) <= 1e-14


def test_builtin_yukawa_cut_is_bounded():
    V = builtin_potential("yukawa-cut", rc=0.2)
    assert np.all(V.values <= 2.0 / 0.2 + 1e-12)
    assert np.all(V.values >= 0)


def test_builtin_potential_rejects_unknown():
    with pytest.raises(ValueError):
        builtin_potential("square-well")
    with pytest.raises(ValueError):
        builtin_potential("gaussian", sigma=1.0)
    with pytest.raises(ValueError):
        builtin_potential("gaussian", a=-1.0)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_save_load_round_trip_real(tmp_path):
    V = builtin_potential("gaussian")
    path = tmp_path / "v.txt"
    save_radial(V, path)
    W = load_radial(path)
    assert type(W) is RadialFunction
    assert np.array_equal(W.nodes, V.nodes)
    assert np.array_equal(W.values, V.values)
    assert np.array_equal(W.weights, V.weights)
    assert W.span == V.span


def test_save_load_round_trip_complex(tmp_path):
    p, w = radial_grid(3.0, n_panels=4, order=4)
    f = RadialMomentumFunction(p, p + 0.5j * p**2, w)
    path = tmp_path / "f.txt"
    save_radial(f, path)
    g = load_radial(path)
    assert type(g) is RadialMomentumFunction
    assert np.array_equal(g.values, f.values)


def test_load_plain_two_column_file(tmp_path):
    path = tmp_path / "bare.txt"
    path.write_text("0.5 1.0\n1.0 0.5\n2.0 0.25\n")
    f = load_radial(path)
    assert type(f) is RadialFunction
    assert f.span is None
    # trapezoid fallback weights: [dx1/2, (dx1+dx2)/2, dx2/2]
    assert np.allclose(f.weights, [0.25, 0.75, 0.5])


def test_load_rejects_empty_file(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("# kind: radial\n")
    with pytest.raises(InvalidGridError):
        load_radial(path)


# ---------------------------------------------------------------------------
# properties
# ---------------------------------------------------------------------------


@given(st.floats(min_value=0.1, max_value=50.0))
def test_grid_weights_sum_to_rmax(rmax):
    _, w = radial_grid(rmax, n_panels=7, order=6)
    assert abs(np.sum(w) - rmax) <= 1e-12 * rmax


@given(
    st.floats(min_value=0.2, max_value=4.0),
    st.floats(min_value=0.1, max_value=3.0),
)
def test_gaussian_transform_closed_form_property(v0, a):
    # v0 exp(-(r/a)^2)  ->  v0 a^3 pi^(3/2) exp(-(a p)^2 / 4)
    rmax = max(12.0 * a, 6.0)
    r, w = radial_grid(rmax, n_panels=60, order=12)
    f = RadialFunction(r, v0 * np.exp(-((r / a) ** 2)), w)
    p = np.linspace(0.0, 4.0 / a, 17)
    fhat = radial_fourier(f, p).values
    exact = v0 * a**3 * math.pi**1.5 * np.exp(-((a * p) ** 2) / 4.0)
    assert np.max(np.abs(fhat - exact)) <= 1e-10 * exact[0]
