import math

import numpy as np
import pytest

from hillproj import (
    BoundaryCondition,
    BudgetError,
    WindowError,
    build_operator_matrix,
    decay_report,
    elementary_checks,
    hs_norm,
    lemma_sums,
    localization_report,
    reconstruct,
    rho_bound_study,
)
from hillproj.basis import make_window

PP = BoundaryCondition.PER_PLUS
PM = BoundaryCondition.PER_MINUS
DIR = BoundaryCondition.DIR


def test_hs_norm_examples():
    assert hs_norm(np.eye(2)) == pytest.approx(math.sqrt(2.0))
    assert hs_norm(np.zeros((3, 3))) == 0.0
    e = np.zeros((4, 1))
    e[2] = 1.0
    assert hs_norm(e @ e.T) == pytest.approx(1.0)


def test_hs_norm_parseval_bookkeeping():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
    columns = sum(np.linalg.norm(A[:, j]) ** 2 for j in range(12))
    assert hs_norm(A) ** 2 == pytest.approx(columns, rel=1e-12)
    # dominates the operator norm
    assert np.linalg.norm(A, 2) <= hs_norm(A) + 1e-12


def test_operator_norm_below_hs_on_deviation(mathieu):
    from hillproj import disc_contour, free_projection, riesz_projection_quadrature

    L = build_operator_matrix(mathieu, PP, 40)
    result = riesz_projection_quadrature(L, disc_contour(10), n=10)
    dev = result.matrix.entries - free_projection(PP, 40, 10).entries
    assert np.linalg.norm(dev, 2) <= hs_norm(dev) + 1e-14


def test_decay_zero_potential(zero_spec):
    report = decay_report(zero_spec, PP, 32, [4, 6], 10, n_min=4)
    assert all(r.hs_deviation <= 1e-12 for r in report.rows)
    assert all(t <= 1e-24 for _, t in report.tail_sums)


def test_decay_mathieu_slope(mathieu):
    report = decay_report(mathieu, PP, 56, [8, 12], 20, n_min=8)
    assert -1.3 <= report.fitted_slope <= -0.7
    tails = [t for _, t in report.tail_sums]
    assert tails[0] > tails[1] > 0.0
    assert all(r.cross_check_gap <= 1e-7 for r in report.rows)


def test_decay_rows_sorted_and_traceable(mathieu):
    report = decay_report(mathieu, PP, 56, [8], 16, n_min=8, jobs=2)
    ns = [r.n for r in report.rows]
    assert ns == sorted(ns)
    assert ns == [8, 10, 12, 14, 16]


def test_decay_window_rule(mathieu):
    with pytest.raises(WindowError):
        decay_report(mathieu, PP, 32, [8], 20)


def test_localization_zero(zero_spec):
    report = localization_report(zero_spec, PP, 40, range(2, 13))
    assert report.N_loc == 2
    assert all(c == 2 for _, c in report.counts)
    rd = localization_report(zero_spec, DIR, 40, range(2, 13))
    assert rd.expected == 1
    assert all(c == 1 for _, c in rd.counts)


def test_localization_mathieu(mathieu):
    report = localization_report(mathieu, PP, 40, range(2, 13))
    assert report.N_loc is not None and report.N_loc <= 4


def test_reconstruct_zero_single_mode(zero_spec):
    window = make_window(PP, 32)
    f = np.zeros(window.dim, dtype=complex)
    f[window.position(2)] = 1.0
    report = reconstruct(zero_spec, PP, 32, f, 4, 10, trials=20, seed=1)
    assert report.error_norm <= 1e-12
    assert report.unconditional_sup == pytest.approx(1.0, abs=1e-10)


def test_reconstruct_mathieu_band_limited(mathieu):
    window = make_window(PP, 48)
    rng = np.random.default_rng(5)
    f = np.zeros(window.dim, dtype=complex)
    for pos, m in enumerate(window.indices):
        if abs(m) <= 8:
            f[pos] = complex(rng.standard_normal(), rng.standard_normal())
    report = reconstruct(mathieu, PP, 48, f, 4, 14, trials=50, seed=7)
    assert report.error_norm <= 1e-6
    assert all(s <= 2.0 * report.ordered_sup for s in report.trial_sups)


def test_reconstruct_support_guard(zero_spec):
    window = make_window(PP, 32)
    f = np.zeros(window.dim, dtype=complex)
    f[window.position(32)] = 1.0
    with pytest.raises(ValueError):
        reconstruct(zero_spec, PP, 32, f, 4, 10)


def test_elementary_checks_frozen_values():
    lhs_t0, rhs_t0, lhs_t00, rhs_t00 = elementary_checks(10, 3)
    # frozen oracles: capped partial sums computed independently
    assert lhs_t0 == pytest.approx(0.0951653356821857, rel=1e-12)
    assert rhs_t0 == pytest.approx(0.1)
    assert lhs_t00 == pytest.approx(0.041062983338043334, rel=1e-10)
    assert rhs_t00 == pytest.approx(4.0 / 9.0)
    lhs_t0_1, _, _, _ = elementary_checks(1, 1)
    assert lhs_t0_1 == pytest.approx(0.6449330668487264, rel=1e-12)


def test_elementary_checks_strict_sweep():
    for k in range(1, 51):
        lhs_t0, rhs_t0, lhs_t00, rhs_t00 = elementary_checks(k, k)
        assert lhs_t0 < rhs_t0
        assert lhs_t00 < rhs_t00


def test_lemma_zero_sequence():
    for lid in ("T1", "T2", "T3", "T9", "T33"):
        rep = lemma_sums(lid, {}, 8, 64)
        assert rep.lhs == 0.0
        assert rep.bound == 0.0


def test_lemma_t1_mathieu_frozen(mathieu):
    rep = lemma_sums("T1", mathieu, 10, 200)
    # oracle: direct two-term-per-disc summation, frozen
    assert rep.lhs == pytest.approx(0.011377697930437237, rel=1e-12)
    assert rep.bound == pytest.approx(0.05, rel=1e-12)
    assert rep.fitted_ratio == pytest.approx(rep.lhs / 0.05, rel=1e-12)


def test_lemma_brute_force_cross_check():
    # independent nested-loop evaluation on a small delta-comb envelope
    r = {m: 1.0 / (math.pi * m) for m in range(2, 9, 2)}
    N, W = 3, 20

    def lattice(n):
        return [x for x in range(-W, W + 1) if (x - n) % 2 == 0]

    def rv(k):
        return r.get(abs(k), 0.0)

    brute = {lid: 0.0 for lid in ("T1", "T2", "T3", "T9", "T33")}
    for n in range(N + 1, W + 1):
        lat = lattice(n)
        for k in lat:
            if k != n and rv(n + k):
                brute["T1"] += rv(n + k) ** 2 / (n - k) ** 2
                brute["T2"] += (n + k) ** 2 / (n * n * (n - k) ** 2) * rv(n + k) ** 2
        for p in lat:
            if p != n:
                for k in lat:
                    if k != n and rv(p + k):
                        brute["T3"] += rv(p + k) ** 2 / ((n - p) ** 2 * (n - k) ** 2)
        s_i = sum(abs(n + i) / abs(n - i) * rv(n + i) ** 2 for i in lat if i not in (n, -n))
        for p in lat:
            if p in (n, -n):
                continue
            s_k = sum(
                (k + p) ** 2 / abs(n * n - k * k) * rv(k + p) ** 2
                for k in lat
                if k not in (n, -n)
            )
            brute["T9"] += s_i * s_k / (n * n - p * p) ** 2
            brute["T33"] += n / (n * n - p * p) ** 2 * rv(2 * n) ** 2 * s_k
    for lid, expected in brute.items():
        rep = lemma_sums(lid, r, N, W)
        assert rep.lhs == pytest.approx(expected, rel=1e-12), lid


def test_lemma_monotone_in_N(delta_comb_small):
    for lid in ("T1", "T3", "T33"):
        values = [lemma_sums(lid, delta_comb_small, N, 64).lhs for N in (4, 8, 16)]
        assert all(a >= b for a, b in zip(values, values[1:]))


def test_lemma_budget_guard():
    r = {m: 1.0 / m for m in range(2, 201, 2)}
    with pytest.raises(BudgetError):
        lemma_sums("T9", r, 8, 4000)


def test_lemma_validation(mathieu):
    with pytest.raises(ValueError):
        lemma_sums("T7", mathieu, 8, 64)
    with pytest.raises(WindowError):
        lemma_sums("T1", mathieu, 64, 32)


def test_rho_study_zero(zero_spec):
    rows = rho_bound_study(zero_spec, None, [9, 16])
    assert all(r.measured_hs == 0.0 for r in rows)


def test_rho_study_mathieu(mathieu):
    rows = rho_bound_study(mathieu, None, [9, 16, 25])
    # measured norms decay and stay below the unit-constant scale
    hs = [r.measured_hs for r in rows]
    assert all(a > b for a, b in zip(hs, hs[1:]))
    assert all(r.ratio <= 1.0 for r in rows)
    assert all(r.r0_norm_dev <= 1e-10 for r in rows)


def test_rho_study_parity_dispatch(mathieu):
    rows = rho_bound_study(mathieu, None, [9, 16])
    assert [r.n for r in rows] == [9, 16]
    with pytest.raises(ValueError):
        rho_bound_study(mathieu, PP, [9])
