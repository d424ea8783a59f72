import math

import numpy as np
import pytest

from hillproj import (
    BoundaryCondition,
    ParityError,
    SpectralProximityError,
    WindowError,
    basis_indices,
    build_operator_matrix,
    build_v_matrix,
    build_w_matrix,
    kbar_w_kbar,
    make_example,
    r0_diag,
    rho_n,
)
from hillproj.basis import make_window, matrix_from_csv, matrix_to_csv

PP = BoundaryCondition.PER_PLUS
PM = BoundaryCondition.PER_MINUS
DIR = BoundaryCondition.DIR


def test_basis_indices_examples():
    assert basis_indices(PP, 4) == [-4, -2, 0, 2, 4]
    assert basis_indices(PM, 3) == [-3, -1, 1, 3]
    assert basis_indices(DIR, 3) == [1, 2, 3]


def test_basis_indices_increasing(any_bc):
    idx = basis_indices(any_bc, 17)
    assert idx == sorted(idx)
    with pytest.raises(WindowError):
        basis_indices(any_bc, 1)


def test_window_overflow_guard():
    with pytest.raises(WindowError):
        make_window(PP, 10_000)


def test_zero_potential_v_matrix(zero_spec, any_bc):
    V = build_v_matrix(zero_spec, any_bc, 12)
    assert np.all(V.entries == 0)


def test_mathieu_per_plus_pattern(mathieu):
    V = build_v_matrix(mathieu, PP, 4)
    idx = V.window.indices
    for i, j in np.ndindex(V.entries.shape):
        expected = 1.0 if abs(idx[i] - idx[j]) == 2 else 0.0
        assert V.entries[i, j] == pytest.approx(expected, abs=1e-15)


def test_per_matrices_are_toeplitz():
    spec = make_example("random_decay", [0.8, 10], seed=5)
    for bc in (PP, PM):
        V = build_v_matrix(spec, bc, 16)
        idx = V.window.indices
        seen = {}
        for i, j in np.ndindex(V.entries.shape):
            d = idx[i] - idx[j]
            if d in seen:
                assert V.entries[i, j] == seen[d]
            seen[d] = V.entries[i, j]


def test_dirichlet_mathieu_vs_quadrature(mathieu):
    # smooth representative v(x) = 2 cos 2x: high-resolution trapezoid of
    # (2/pi) \int v sin(jx) sin(mx) against the closed-form assembly
    V = build_v_matrix(mathieu, DIR, 8)
    xs = np.linspace(0.0, math.pi, 40001)
    v = 2.0 * np.cos(2.0 * xs)
    for j in range(1, 9):
        for m in range(1, 9):
            val = np.trapezoid(v * 2.0 * np.sin(j * xs) * np.sin(m * xs) / math.pi, xs)
            assert V.entries[j - 1, m - 1] == pytest.approx(val, abs=1e-8)


def test_dirichlet_random_spec_vs_quadrature():
    # complex coefficients exercise both kernel branches (even Kronecker
    # pairs and the odd rational kernel); the potential is a trig
    # polynomial, so direct quadrature is a valid oracle
    spec = make_example("random_decay", [1.0, 6], seed=13)
    V = build_v_matrix(spec, DIR, 6)
    xs = np.linspace(0.0, math.pi, 40001)
    from hillproj import v_hat

    v = np.zeros_like(xs, dtype=complex)
    for m in list(range(-6, 0, 2)) + [0] + list(range(2, 7, 2)):
        v += v_hat(spec, m) * np.exp(1j * m * xs)
    for j in range(1, 7):
        for mm in range(1, 7):
            val = np.trapezoid(v * 2.0 * np.sin(j * xs) * np.sin(mm * xs) / math.pi, xs)
            assert V.entries[j - 1, mm - 1] == pytest.approx(val, abs=1e-8)


def test_dirichlet_delta_comb_real_symmetric(delta_comb_small):
    V = build_v_matrix(delta_comb_small, DIR, 16)
    assert np.allclose(V.entries.imag, 0.0, atol=1e-14)
    assert np.allclose(V.entries, V.entries.T, atol=1e-14)


def test_operator_matrix_diagonal(zero_spec, mathieu):
    L = build_operator_matrix(zero_spec, PP, 2)
    assert np.allclose(L.entries, np.diag([4.0, 0.0, 4.0]))
    Lm = build_operator_matrix(mathieu, PP, 8)
    idx = np.array(Lm.window.indices)
    assert np.allclose(np.diag(Lm.entries), idx.astype(float) ** 2)


def test_full_is_free_plus_v(delta_comb_small, any_bc):
    L = build_operator_matrix(delta_comb_small, any_bc, 12)
    V = build_v_matrix(delta_comb_small, any_bc, 12)
    idx = np.array(L.window.indices, dtype=float)
    assert np.allclose(L.entries - V.entries, np.diag(idx**2))


def test_w_matrix_values(zero_spec, mathieu):
    assert np.all(build_w_matrix(zero_spec, PP, 8).entries == 0)
    W = build_w_matrix(mathieu, PP, 8)
    idx = W.window.indices
    for i, j in np.ndindex(W.entries.shape):
        expected = 1.0 if abs(idx[i] - idx[j]) == 2 else 0.0
        assert W.entries[i, j].real == pytest.approx(expected)
        assert W.entries[i, j].imag == 0.0


def test_w_dominates_v_per_lattices():
    specs = [
        make_example("random_decay", [0.8, 12], seed=9),
        make_example("delta_comb", [2.0, 10]),
        make_example("mathieu", [1.5]),
    ]
    for spec in specs:
        for bc in (PP, PM):
            V = build_v_matrix(spec, bc, 20)
            W = build_w_matrix(spec, bc, 20)
            assert np.all(W.entries.real + 1e-15 >= np.abs(V.entries))


def test_kbar_w_kbar(mathieu, zero_spec):
    mat, hs = kbar_w_kbar(zero_spec, PP, 16, 10.0 + 3.0j)
    assert hs == 0.0
    mat, hs = kbar_w_kbar(mathieu, PP, 64, 36.0 + 6.0j)
    assert np.allclose(mat.entries, mat.entries.T)
    assert hs == pytest.approx(np.linalg.norm(mat.entries, "fro"))
    # measured norm sits below the decay scale here (unit constant)
    assert hs <= rho_n(mathieu, 6)


def test_kbar_symmetric_for_random_z(mathieu):
    rng = np.random.default_rng(3)
    for _ in range(4):
        z = complex(rng.uniform(-10, 200), rng.uniform(0.5, 20))
        mat, _ = kbar_w_kbar(mathieu, PP, 32, z)
        assert np.allclose(mat.entries, mat.entries.T)


def test_kbar_rejects_near_spectrum(mathieu):
    with pytest.raises(SpectralProximityError):
        kbar_w_kbar(mathieu, PP, 16, 4.0 + 1e-12j)


def test_r0_diag_values():
    R = r0_diag(PP, 2, -1.0)
    assert np.allclose(np.diag(R.entries), [-1 / 5, -1.0, -1 / 5])
    idx = np.array(R.window.indices, dtype=float)
    product = R.entries @ np.diag(-1.0 - idx**2)
    assert np.linalg.norm(product - np.eye(3), "fro") <= 1e-14


def test_r0_norm_on_disc_per_lattices():
    # operator norm of the free resolvent equals 1/n on the disc boundary
    for bc, ns in ((PP, (4, 10)), (PM, (5, 9))):
        for n in ns:
            window = make_window(bc, 2 * n + 10)
            idx = np.array(window.indices, dtype=float)
            for theta in (0.3, 1.2, 2.8, 4.0):
                z = n * n + n * np.exp(1j * theta)
                norm = np.max(1.0 / np.abs(z - idx**2))
                assert norm == pytest.approx(1.0 / n, rel=1e-10)


def test_r0_diag_rejects_on_spectrum():
    with pytest.raises(SpectralProximityError):
        r0_diag(PP, 8, 16.0)


def test_dirichlet_window_positions():
    window = make_window(DIR, 5)
    assert window.indices == (1, 2, 3, 4, 5)
    with pytest.raises(WindowError):
        window.position(6)


def test_parity_checks(mathieu):
    from hillproj import free_projection

    with pytest.raises(ParityError):
        free_projection(PM, 16, 4)
    with pytest.raises(ParityError):
        free_projection(PP, 16, 5)


def test_matrix_csv_round_trip(tmp_path, mathieu):
    V = build_v_matrix(mathieu, PP, 6)
    path = tmp_path / "v.csv"
    matrix_to_csv(V, path)
    back = matrix_from_csv(path, V.window, V.bc)
    assert np.array_equal(back.entries, V.entries)
