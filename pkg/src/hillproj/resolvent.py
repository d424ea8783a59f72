"""Resolvents of truncated operators, directly and by perturbation series.

The series writes the resolvent difference as repeated free-resolvent /
multiplication products; it converges geometrically whenever the weighted
majorant kernel has Hilbert-Schmidt norm below one at the evaluation point,
and that measured norm is the gate used here (rather than any a priori
bound, which would be needlessly conservative).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import (
    BoundaryCondition,
    MatrixLabel,
    OperatorMatrix,
    build_v_matrix,
    kbar_w_kbar,
    r0_diag,
)
from .errors import BudgetError, ContractionError, IllConditionedError
from .potential import PotentialSpec, v_hat

__all__ = [
    "SeriesResult",
    "resolvent_direct",
    "series_term",
    "resolvent_diff_series",
    "chain_sum_check",
]

CONDITION_LIMIT = 1e12
RESIDUAL_FACTOR = 1e-10
SERIES_S_GUARD = 60
CHAIN_TUPLE_BUDGET = 10_000_000


@dataclass(frozen=True)
class SeriesResult:
    value: OperatorMatrix
    terms_used: int
    last_term_hs: float
    converged: bool


def resolvent_direct(L: OperatorMatrix, z: complex) -> OperatorMatrix:
    """(z - L)^(-1) with condition and multiply-back residual guards."""
    A = z * np.eye(L.dim) - L.entries
    try:
        inv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"z={z}: z - L is singular") from exc
    cond = np.linalg.norm(A, 1) * np.linalg.norm(inv, 1)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditionedError(
            f"z={z}: solve condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}",
            condition=float(cond),
        )
    residual = np.linalg.norm(A @ inv - np.eye(L.dim), "fro")
    if residual > RESIDUAL_FACTOR * L.dim:
        raise IllConditionedError(
            f"z={z}: resolvent residual {residual:.3e} above {RESIDUAL_FACTOR:g}*dim",
            condition=float(cond),
        )
    return L.with_entries(inv, MatrixLabel.RESOLVENT)


def series_term(spec: PotentialSpec, bc: BoundaryCondition, M: int, z: complex, s: int) -> OperatorMatrix:
    """Single series term (R0 V)^(s+1) R0."""
    if s < 0 or s > SERIES_S_GUARD:
        raise ValueError(f"series order s must be in [0, {SERIES_S_GUARD}], got {s}")
    r0 = r0_diag(bc, M, z)
    v = build_v_matrix(spec, bc, M)
    t = r0.entries @ v.entries
    out = r0.entries.copy()
    for _ in range(s + 1):
        out = t @ out
    return v.with_entries(out, MatrixLabel.GENERIC)


def resolvent_diff_series(
    spec: PotentialSpec,
    bc: BoundaryCondition,
    M: int,
    z: complex,
    tol: float = 1e-10,
    s_max: int = 40,
) -> SeriesResult:
    """Partial sums of the resolvent difference series at a single point.

    Refuses to sum outside the contractive regime.  Terms are accumulated in
    ascending order with pairwise compensation so reruns are bit-stable.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    _, contraction = kbar_w_kbar(spec, bc, M, z)
    if contraction >= 1.0:
        raise ContractionError(
            f"z={z}: measured majorant HS norm {contraction:.4f} >= 1; series not contractive",
            measured=contraction,
            z=z,
        )
    r0 = r0_diag(bc, M, z)
    v = build_v_matrix(spec, bc, M)
    t = r0.entries @ v.entries
    term = t @ r0.entries
    partials = [term]
    terms_used = 1
    last_hs = float(np.linalg.norm(term, "fro"))
    while last_hs > tol and terms_used <= s_max:
        term = t @ term
        partials.append(term)
        terms_used += 1
        last_hs = float(np.linalg.norm(term, "fro"))
    total = _pairwise_sum(partials)
    return SeriesResult(
        value=v.with_entries(total, MatrixLabel.GENERIC),
        terms_used=terms_used,
        last_term_hs=last_hs,
        converged=last_hs <= tol,
    )


def _pairwise_sum(mats: list[np.ndarray]) -> np.ndarray:
    """Fixed-order pairwise accumulation; reproducible across platforms."""
    items = list(mats)
    while len(items) > 1:
        merged = []
        for i in range(0, len(items) - 1, 2):
            merged.append(items[i] + items[i + 1])
        if len(items) % 2:
            merged.append(items[-1])
        items = merged
    return items[0]


def chain_sum_check(
    spec: PotentialSpec,
    bc: BoundaryCondition,
    M: int,
    z: complex,
    m: int,
    p: int,
    t: int,
) -> tuple[float, float]:
    """Brute-force weighted index chains against the equivalent matrix entry.

    The brute force enumerates every tuple (i_1..i_t) in the window and sums
    W(m-i_1)...W(i_t-p) over the product of distances |z - index^2|; the
    second route reads the same quantity off a power of the weighted
    majorant kernel.  Both are returned (brute, matrix).
    """
    if t < 0 or t > 3:
        raise ValueError(f"chain length t must be in [0, 3], got {t}")
    from .basis import basis_indices

    n_idx = len(basis_indices(bc, M))
    if n_idx**max(t, 1) > CHAIN_TUPLE_BUDGET:
        raise BudgetError(
            f"chain enumeration would visit {float(n_idx)**t:.2e} tuples",
            estimate=n_idx**t,
            budget=CHAIN_TUPLE_BUDGET,
        )
    kbar, _ = kbar_w_kbar(spec, bc, M, z)
    window = kbar.window
    idx = window.indices
    dist = np.abs(z - np.asarray(idx, dtype=float) ** 2)

    def w(k: int) -> float:
        if k % 2 != 0:
            return 0.0
        return max(abs(v_hat(spec, k)), abs(v_hat(spec, -k)))

    def brute(i_prev: int, depth: int) -> float:
        # sums over remaining chain indices; denominators of interior
        # indices are applied at their own level
        if depth == t:
            return w(idx[i_prev] - p) / dist[window.position(p)]
        total = 0.0
        for i_next in range(n_idx):
            wk = w(idx[i_prev] - idx[i_next])
            if wk == 0.0:
                continue
            total += wk / dist[i_next] * brute(i_next, depth + 1)
        return total

    pos_m = window.position(m)
    pos_p = window.position(p)
    if t == 0:
        brute_val = w(m - p) / (dist[pos_m] * dist[pos_p])
    else:
        total = 0.0
        for i1 in range(n_idx):
            wk = w(m - idx[i1])
            if wk == 0.0:
                continue
            total += wk / dist[i1] * brute(i1, 1)
        brute_val = total / dist[pos_m]

    # matrix route: diag(1/sqrt d) (KbarWKbar)^(t+1) diag(1/sqrt d), entry (m, p)
    power = np.linalg.matrix_power(kbar.entries, t + 1)
    matrix_val = float(
        (power[pos_m, pos_p] / np.sqrt(dist[pos_m]) / np.sqrt(dist[pos_p])).real
    )
    return float(brute_val), matrix_val
