import numpy as np
import pytest

from hillproj import (
    BoundaryCondition,
    CircleContour,
    ParityError,
    RectangleContour,
    SpectralProximityError,
    a00_closed_form,
    build_operator_matrix,
    count_in_disc,
    disc_contour,
    free_projection,
    hs_norm,
    p_upper_rectangle,
    projection_diff_series,
    riesz_projection_eigen,
    riesz_projection_quadrature,
)

PP = BoundaryCondition.PER_PLUS
PM = BoundaryCondition.PER_MINUS
DIR = BoundaryCondition.DIR


def test_free_projection_ranks():
    P = free_projection(PP, 16, 4)
    assert np.trace(P.entries).real == pytest.approx(2.0)
    assert np.allclose(P.entries @ P.entries, P.entries)
    P1 = free_projection(DIR, 16, 3)
    assert np.trace(P1.entries).real == pytest.approx(1.0)
    with pytest.raises(ParityError):
        free_projection(PM, 16, 4)


def test_contour_validation():
    with pytest.raises(ValueError):
        CircleContour(center=4.0, radius=-1.0)
    with pytest.raises(ValueError):
        CircleContour(center=4.0, radius=2.0, nodes=4)
    with pytest.raises(ValueError):
        RectangleContour(re_min=5.0, re_max=1.0, im_abs=2.0)


def test_quadrature_zero_potential_matches_free(zero_spec):
    L = build_operator_matrix(zero_spec, PP, 64)
    result = riesz_projection_quadrature(L, disc_contour(4), n=4)
    assert result.hs_deviation <= 1e-12
    assert result.diagnostics["idempotency_defect"] <= 1e-7


def test_quadrature_matches_eigen(mathieu):
    L = build_operator_matrix(mathieu, PP, 64)
    quad = riesz_projection_quadrature(L, disc_contour(10), n=10)
    eig = riesz_projection_eigen(L, complex(100.0), 10.0, n=10)
    assert hs_norm(quad.matrix.entries - eig.matrix.entries) <= 1e-8


def test_quadrature_detects_contour_eigenvalue(zero_spec):
    L = build_operator_matrix(zero_spec, PP, 32)
    # circle through the free eigenvalue 4^2 = 16
    with pytest.raises(SpectralProximityError):
        riesz_projection_quadrature(L, CircleContour(center=16.0 + 12.0, radius=12.0))


def test_quadrature_node_doubling_recorded(mathieu):
    L = build_operator_matrix(mathieu, PP, 64)
    result = riesz_projection_quadrature(L, disc_contour(8), n=8)
    assert result.diagnostics["node_doubling_change"] <= 1e-8
    assert result.diagnostics["nodes"] >= 64


def test_eigen_zero_potential_exact(zero_spec):
    L = build_operator_matrix(zero_spec, PP, 32)
    result = riesz_projection_eigen(L, complex(16.0), 4.0, n=4)
    assert hs_norm(result.matrix.entries - free_projection(PP, 32, 4).entries) <= 1e-12


def test_eigen_rejects_eigenvalue_on_circle(zero_spec):
    L = build_operator_matrix(zero_spec, PP, 32)
    # eigenvalue 4 sits exactly on the circle |z - 16| = 12
    with pytest.raises(SpectralProximityError):
        riesz_projection_eigen(L, complex(16.0), 12.0)


def test_eigen_trace_counts_enclosed(mathieu):
    L = build_operator_matrix(mathieu, PP, 64)
    result = riesz_projection_eigen(L, complex(100.0), 10.0)
    trace = np.trace(result.matrix.entries)
    assert trace.real == pytest.approx(result.diagnostics["enclosed"], abs=1e-8)
    assert abs(trace.imag) <= 1e-8


def test_method_triangle_single_disc(mathieu):
    n, M = 16, 64
    L = build_operator_matrix(mathieu, PP, M)
    free = free_projection(PP, M, n).entries
    quad = riesz_projection_quadrature(L, disc_contour(n), n=n)
    eig = riesz_projection_eigen(L, complex(n * n), float(n), n=n)
    series = projection_diff_series(mathieu, PP, M, n, s_max=8, nodes=32)
    d_q = quad.matrix.entries - free
    d_e = eig.matrix.entries - free
    d_s = series.matrix.entries
    assert hs_norm(d_q - d_e) <= 1e-7
    assert hs_norm(d_q - d_s) <= 1e-7
    assert hs_norm(d_e - d_s) <= 1e-7


def test_series_zero_potential(zero_spec):
    result = projection_diff_series(zero_spec, PP, 32, 4, s_max=4)
    assert hs_norm(result.matrix.entries) <= 1e-14


def test_series_lowest_order_structure(mathieu):
    # the s=0 term integrates to a matrix supported on the +-n rows/columns
    n, M = 16, 64
    result = projection_diff_series(mathieu, PP, M, n, s_max=0, nodes=64)
    entries = result.matrix.entries
    idx = result.matrix.window.indices
    pos = {m: i for i, m in enumerate(idx)}
    mask = np.zeros_like(entries, dtype=bool)
    mask[pos[n], :] = True
    mask[pos[-n], :] = True
    mask[:, pos[n]] = True
    mask[:, pos[-n]] = True
    # corners (+-n, +-n) integrate to zero as well
    for a in (n, -n):
        for b in (n, -n):
            mask[pos[a], pos[b]] = False
    assert np.all(np.abs(entries[~mask]) <= 1e-12)
    assert np.max(np.abs(entries[mask])) > 1e-4


def test_commutation_invariant(mathieu):
    L = build_operator_matrix(mathieu, PP, 64)
    P = riesz_projection_quadrature(L, disc_contour(12), n=12).matrix.entries
    assert hs_norm(L.entries @ P - P @ L.entries) <= 1e-7


def test_a00_closed_form_values(mathieu, zero_spec):
    assert a00_closed_form(zero_spec, PM, 5, 5) == 0.0
    # hand residue evaluation: (1/16)(1/16 + 1/36)
    assert a00_closed_form(mathieu, PM, 5, 5) == pytest.approx(0.005642361111111111, abs=1e-12)
    # single-term branch away from the disc indices
    assert a00_closed_form(mathieu, PM, 5, 3) == pytest.approx(1.0 / 256.0, rel=1e-12)
    assert a00_closed_form(mathieu, PM, 5, 9) == 0.0
    with pytest.raises(ParityError):
        a00_closed_form(mathieu, PM, 4, 4)
    with pytest.raises(ParityError):
        a00_closed_form(mathieu, DIR, 4, 4)


def test_rectangle_zero_potential(zero_spec):
    L = build_operator_matrix(zero_spec, PP, 64)
    result = p_upper_rectangle(L, 5)
    # free indices with m^2 < 30: {0, +-2, +-4}
    expected = free_projection(PP, 64, 2).entries + free_projection(PP, 64, 4).entries
    expected[L.window.position(0), L.window.position(0)] += 1.0
    assert hs_norm(result.matrix.entries - expected) <= 1e-9
    assert result.diagnostics["rank"] == 5


def test_rectangle_mathieu_count(mathieu):
    L = build_operator_matrix(mathieu, PP, 64)
    result = p_upper_rectangle(L, 6)
    assert result.diagnostics["rank"] == 7
    assert result.diagnostics["idempotency_defect"] <= 1e-7


def test_rectangle_window_guard(zero_spec):
    L = build_operator_matrix(zero_spec, PP, 8)
    with pytest.raises(Exception):
        p_upper_rectangle(L, 9)  # window max index^2 = 64 below 90


def test_count_in_disc(zero_spec, mathieu):
    L0p = build_operator_matrix(zero_spec, PP, 64)
    assert count_in_disc(L0p, 6) == 2
    L0d = build_operator_matrix(zero_spec, DIR, 64)
    assert count_in_disc(L0d, 6) == 1
    Lm = build_operator_matrix(mathieu, PP, 64)
    assert count_in_disc(Lm, 10) == 2


def test_quadrature_stability_under_doubling(mathieu):
    # independently re-run at doubled starting resolution; accepted results agree
    L = build_operator_matrix(mathieu, PP, 64)
    a = riesz_projection_quadrature(L, disc_contour(10, nodes=32), n=10)
    b = riesz_projection_quadrature(L, disc_contour(10, nodes=64), n=10)
    assert hs_norm(a.matrix.entries - b.matrix.entries) <= 1e-8
