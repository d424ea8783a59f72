"""Aggregated studies: deviation decay, localization, decomposition, sums.

The studies here turn the per-disc machinery into tables: square-summability
of projection deviations, eigenvalue counts per disc, reconstruction of
vectors from spectral blocks, and exhaustive numerical evaluation of the
weighted convolution sums with their fitted bounds.  Everything is a pure
function of its inputs plus an explicit seed, so reports are reproducible
byte for byte.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .basis import (
    BoundaryCondition,
    OperatorMatrix,
    build_operator_matrix,
    kbar_w_kbar,
    make_window,
    required_window,
)
from .errors import BudgetError, HillprojError, WindowError
from .potential import PotentialSpec, r_of, rho_n, sequence_stats, tail_energy
from .projections import (
    ProjectionMethod,
    count_in_disc,
    disc_contour,
    p_upper_rectangle,
    riesz_projection_eigen,
    riesz_projection_quadrature,
)

__all__ = [
    "DecayRow",
    "DecayReport",
    "LocalizationReport",
    "LemmaReport",
    "ReconstructionReport",
    "RhoStudyRow",
    "hs_norm",
    "admissible_discs",
    "decay_report",
    "localization_report",
    "reconstruct",
    "elementary_checks",
    "lemma_sums",
    "rho_bound_study",
]

T0_TERM_CAP = 10**6
T00_INDEX_CAP = 10**4
LEMMA_WORK_BUDGET = 200_000_000
CROSS_CHECK_TOL = 1e-7

LEMMA_IDS = ("T1", "T2", "T3", "T9", "T33")


def hs_norm(A) -> float:
    """Hilbert-Schmidt (Frobenius) norm of a matrix or OperatorMatrix."""
    entries = A.entries if isinstance(A, OperatorMatrix) else np.asarray(A)
    return float(np.linalg.norm(entries, "fro"))


def admissible_discs(bc: BoundaryCondition, lo: int, hi: int) -> list[int]:
    return [n for n in range(lo, hi + 1) if bc.admits(n)]


def _pmap(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- decay of projection deviations -------------------------------------------

@dataclass(frozen=True)
class DecayRow:
    n: int
    hs_deviation: float
    method: str
    cross_check_gap: float
    idempotency_defect: float
    nodes: int


@dataclass(frozen=True)
class DecayReport:
    bc: BoundaryCondition
    potential_label: str
    rows: tuple[DecayRow, ...]
    tail_sums: tuple[tuple[int, float], ...]
    fitted_slope: float


def decay_report(
    spec: PotentialSpec,
    bc: BoundaryCondition,
    M: int,
    N_grid: Sequence[int],
    n_max: int,
    *,
    n_min: int | None = None,
    nodes: int = 32,
    jobs: int = 1,
    cross_check_tol: float = CROSS_CHECK_TOL,
) -> DecayReport:
    """Per-disc deviation norms, tail sums over the N grid, and a decay fit.

    Quadrature is the primary method; an eigendecomposition deviation is
    computed for every disc and any disagreement beyond `cross_check_tol`
    aborts the report with the offending disc index.
    """
    if M < required_window(n_max, spec):
        raise WindowError(
            f"window M={M} below the adequacy rule {required_window(n_max, spec)} for n_max={n_max}"
        )
    lo = n_min if n_min is not None else 1
    discs = admissible_discs(bc, max(1, lo), n_max)
    L = build_operator_matrix(spec, bc, M)

    def one(n: int) -> DecayRow:
        try:
            quad = riesz_projection_quadrature(L, disc_contour(n, nodes), n=n)
            eig = riesz_projection_eigen(L, complex(n * n), float(n), n=n)
        except HillprojError as exc:
            raise HillprojError(f"disc n={n}: {exc}") from exc
        gap = abs(quad.hs_deviation - eig.hs_deviation)
        if gap > cross_check_tol:
            raise HillprojError(
                f"disc n={n}: quadrature/eigen deviation mismatch {gap:.3e} exceeds {cross_check_tol:g}"
            )
        return DecayRow(
            n=n,
            hs_deviation=quad.hs_deviation,
            method=ProjectionMethod.QUADRATURE.value,
            cross_check_gap=gap,
            idempotency_defect=quad.diagnostics["idempotency_defect"],
            nodes=quad.diagnostics["nodes"],
        )

    rows = tuple(_pmap(one, discs, jobs))
    tails = tuple(
        (int(N), float(sum(r.hs_deviation**2 for r in rows if r.n > N))) for N in sorted(N_grid)
    )
    hs = np.array([r.hs_deviation for r in rows])
    ns = np.array([r.n for r in rows], dtype=float)
    if len(rows) >= 2 and hs.max() > 1e-14:
        slope = float(np.polyfit(np.log(ns), np.log(np.maximum(hs, 1e-300)), 1)[0])
    else:
        slope = float("nan")
    return DecayReport(
        bc=bc,
        potential_label=spec.label,
        rows=rows,
        tail_sums=tails,
        fitted_slope=slope,
    )


# -- localization -------------------------------------------------------------

@dataclass(frozen=True)
class LocalizationReport:
    bc: BoundaryCondition
    potential_label: str
    expected: int
    counts: tuple[tuple[int, int | None], ...]
    N_loc: int | None


def localization_report(
    spec: PotentialSpec,
    bc: BoundaryCondition,
    M: int,
    n_range: Iterable[int],
    *,
    nodes: int = 32,
    jobs: int = 1,
) -> LocalizationReport:
    """Eigenvalue counts per disc and the empirical localization threshold.

    N_loc is the smallest tested index such that every strictly larger
    tested disc carries the expected count; None when even the largest
    tested disc miscounts.
    """
    discs = sorted(n for n in n_range if bc.admits(n))
    if not discs:
        raise ValueError("empty disc range after parity filtering")
    if M < required_window(max(discs), spec):
        raise WindowError(
            f"window M={M} below the adequacy rule {required_window(max(discs), spec)} for n={max(discs)}"
        )
    L = build_operator_matrix(spec, bc, M)
    expected = bc.free_multiplicity

    def one(n: int) -> int | None:
        try:
            return count_in_disc(L, n, nodes=nodes)
        except HillprojError:
            return None

    counts = list(zip(discs, _pmap(one, discs, jobs)))
    bad = [n for n, c in counts if c != expected]
    if not bad:
        n_loc = discs[0]
    else:
        later = [n for n in discs if n > max(bad)]
        n_loc = later[0] if later else None
    return LocalizationReport(
        bc=bc,
        potential_label=spec.label,
        expected=expected,
        counts=tuple(counts),
        N_loc=n_loc,
    )


# -- spectral decomposition ----------------------------------------------------

@dataclass(frozen=True)
class ReconstructionReport:
    f_label: str
    N: int
    n_max: int
    error_norm: float
    unconditional_sup: float
    ordered_sup: float
    trials: int
    seed: int
    trial_sups: tuple[float, ...] = field(repr=False, default=())


def reconstruct(
    spec: PotentialSpec,
    bc: BoundaryCondition,
    M: int,
    f: np.ndarray,
    N: int,
    n_max: int,
    *,
    f_label: str = "f",
    trials: int = 100,
    seed: int = 42,
    nodes: int = 32,
    jobs: int = 1,
) -> ReconstructionReport:
    """Rebuild f from the rectangle block plus the per-disc blocks.

    Also probes unconditionality: the blocks are randomly signed and
    permuted `trials` times and the largest partial-sum norm is recorded.
    """
    window = make_window(bc, M)
    f = np.asarray(f, dtype=complex)
    if f.shape != (window.dim,):
        raise ValueError(f"f must have shape ({window.dim},), got {f.shape}")
    interior = np.array([abs(m) <= M / 2 for m in window.indices])
    if np.any(np.abs(f[~interior]) > 0):
        raise ValueError("f must be supported on window-interior indices |m| <= M/2")
    L = build_operator_matrix(spec, bc, M)
    head = p_upper_rectangle(L, N).matrix.entries @ f
    discs = admissible_discs(bc, N + 1, n_max)

    def one(n: int) -> np.ndarray:
        return riesz_projection_quadrature(L, disc_contour(n, nodes)).matrix.entries @ f

    blocks = [head] + _pmap(one, discs, jobs)
    total = np.zeros_like(f)
    ordered_sup = 0.0
    for b in blocks:
        total += b
        ordered_sup = max(ordered_sup, float(np.linalg.norm(total)))
    error_norm = float(np.linalg.norm(f - total))

    rng = np.random.default_rng(seed)
    sups = []
    for _ in range(trials):
        order = rng.permutation(len(blocks))
        signs = rng.choice((-1.0, 1.0), size=len(blocks))
        acc = np.zeros_like(f)
        worst = 0.0
        for j, s in zip(order, signs):
            acc += s * blocks[j]
            worst = max(worst, float(np.linalg.norm(acc)))
        sups.append(worst)
    return ReconstructionReport(
        f_label=f_label,
        N=N,
        n_max=n_max,
        error_norm=error_norm,
        unconditional_sup=float(max(sups)) if sups else float(np.linalg.norm(f)),
        ordered_sup=ordered_sup,
        trials=trials,
        seed=seed,
        trial_sups=tuple(sups),
    )


# -- elementary inequalities ---------------------------------------------------

def elementary_checks(N: int, n: int) -> tuple[float, float, float, float]:
    """Truncated sums behind the two workhorse inequalities, with bounds.

    Returns (sum_{v>N} 1/v^2, 1/N, lattice sum of 1/(n^2-p^2)^2, 4/n^2)
    and raises if either strict inequality fails.
    """
    if N < 1 or n < 1:
        raise ValueError("N and n must be >= 1")
    nu = np.arange(N + 1, T0_TERM_CAP + 1, dtype=float)
    lhs_t0 = float(np.sum(1.0 / nu**2))
    rhs_t0 = 1.0 / N
    start = -T00_INDEX_CAP + ((-T00_INDEX_CAP - n) % 2)
    ps = np.arange(start, T00_INDEX_CAP + 1, 2, dtype=float)
    ps = ps[(ps != n) & (ps != -n)]
    lhs_t00 = float(np.sum(1.0 / (n * n - ps**2) ** 2))
    rhs_t00 = 4.0 / n**2
    if not lhs_t0 < rhs_t0:
        raise HillprojError(f"elementary sum {lhs_t0} not below 1/N={rhs_t0}")
    if not lhs_t00 < rhs_t00:
        raise HillprojError(f"lattice sum {lhs_t00} not below 4/n^2={rhs_t00}")
    return lhs_t0, rhs_t0, lhs_t00, rhs_t00


# -- weighted convolution sums ---------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    lemma_id: str
    N: int
    lhs: float
    bound_components: tuple[float, float]
    bound: float
    fitted_ratio: float
    lhs_tail_bound: float


def _r_table(spec_or_r) -> dict[int, float]:
    """Normalize to {positive even m: r(m)} with the symmetric convention."""
    if isinstance(spec_or_r, PotentialSpec):
        return {m: r_of(spec_or_r, m) for m in sorted({abs(k) for k in spec_or_r.q})}
    table = {}
    for m, val in dict(spec_or_r).items():
        m = abs(int(m))
        if m == 0 or m % 2 != 0:
            raise ValueError(f"r lives on nonzero even frequencies, got {m}")
        table[m] = max(table.get(m, 0.0), float(val))
    return dict(sorted(table.items()))


def lemma_sums(lemma_id: str, spec_or_r, N: int, window: int) -> LemmaReport:
    """Exhaustive evaluation of one weighted convolution sum and its bound.

    The left side is summed exactly over the finite support (with the disc
    index capped at `window`; the discarded remainder is bounded and
    reported).  The right side is the fitted-constant-free combination of
    the l2 mass and the tail energy appropriate to the chosen sum.
    """
    if lemma_id not in LEMMA_IDS:
        raise ValueError(f"unknown lemma id {lemma_id!r}; expected one of {LEMMA_IDS}")
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    r = _r_table(spec_or_r)
    cutoff = max(r, default=0)
    if window <= N or (cutoff and window < cutoff):
        raise WindowError(f"window {window} must exceed N={N} and the support cutoff {cutoff}")
    rn2 = sum(2.0 * v**2 for v in r.values())
    tail2 = sum(2.0 * v**2 for m, v in r.items() if m >= N)
    comp = (rn2 / N, tail2)
    if lemma_id in ("T1", "T2", "T3"):
        bound = comp[0] + comp[1]
    elif lemma_id == "T9":
        bound = rn2 * (comp[0] + comp[1])
    else:  # T33
        bound = rn2 * comp[1]

    lhs, tail_bound = _LEMMA_EVALUATORS[lemma_id](r, N, window)
    ratio = lhs / bound if bound > 0 else (0.0 if lhs == 0 else float("inf"))
    return LemmaReport(
        lemma_id=lemma_id,
        N=N,
        lhs=lhs,
        bound_components=comp,
        bound=bound,
        fitted_ratio=ratio,
        lhs_tail_bound=tail_bound,
    )


def _signed_support(r: dict[int, float]) -> list[tuple[int, float]]:
    out = []
    for m, v in r.items():
        if v:
            out.append((m, v * v))
            out.append((-m, v * v))
    return out


def _lemma_t1(r, N, W):
    support = _signed_support(r)
    lhs = 0.0
    for n in range(N + 1, W + 1):
        for a, ra2 in support:
            if a != 2 * n and abs(a - n) <= W:
                lhs += ra2 / (2 * n - a) ** 2
    cutoff = max(r, default=0)
    rn2 = sum(2.0 * v**2 for v in r.values())
    tail = rn2 / (2.0 * max(2 * W - cutoff, 1))
    return lhs, tail


def _lemma_t2(r, N, W):
    support = _signed_support(r)
    lhs = 0.0
    for n in range(N + 1, W + 1):
        for a, ra2 in support:
            if a != 2 * n and abs(a - n) <= W:
                lhs += ra2 * a * a / (n * n * (2 * n - a) ** 2)
    cutoff = max(r, default=0)
    s2 = sum(2.0 * m * m * v * v for m, v in r.items())
    tail = s2 / max(W, 1) / max(2 * W - cutoff, 1) ** 2
    return lhs, tail


def _lemma_t3(r, N, W):
    support = _signed_support(r)
    _check_budget("T3", (W - N) * len(support) * W)
    lhs = 0.0
    for n in range(N + 1, W + 1):
        parity = n % 2
        start = -W + ((-W - parity) % 2)
        ps = np.arange(start, W + 1, 2, dtype=float)
        ps = ps[ps != n]
        for a, ra2 in support:
            ks = a - ps
            ok = (ks != n) & (np.abs(ks) <= W)
            p = ps[ok]
            lhs += ra2 * float(np.sum(1.0 / ((n - p) ** 2 * (n - a + p) ** 2)))
    cutoff = max(r, default=0)
    rn2 = sum(2.0 * v**2 for v in r.values())
    tail = rn2 * (math.pi**2 / 3.0) / (2.0 * max(2 * W - cutoff, 1))
    return lhs, tail


def _lattice_slice(n: int, W: int) -> np.ndarray:
    parity = n % 2
    start = -W + ((-W - parity) % 2)
    ps = np.arange(start, W + 1, 2, dtype=float)
    return ps[(ps != n) & (ps != -n)]


def _inner_k_sum(support, n: int, ps: np.ndarray, W: int) -> np.ndarray:
    """sum over k != +-n, |k| <= W of |k+p|^2 r(k+p)^2 / |n^2-k^2| per p, via k+p = b."""
    bs = np.array([b for b, _ in support], dtype=float)
    wts = np.array([rb2 * b * b for b, rb2 in support])
    ks = bs[:, None] - ps[None, :]
    ok = (ks != n) & (ks != -n) & (np.abs(ks) <= W)
    den = np.abs(n * n - ks**2)
    den[~ok] = 1.0
    return np.sum(np.where(ok, wts[:, None] / den, 0.0), axis=0)


def _lemma_t9(r, N, W):
    support = _signed_support(r)
    rn2 = sum(2.0 * v**2 for v in r.values())
    s2 = sum(2.0 * m * m * v * v for m, v in r.items())
    cutoff = max(r, default=0)
    _check_budget("T9", (W - N) * len(support) * W)
    lhs = 0.0
    tail = 0.0
    for n in range(N + 1, W + 1):
        outer = 0.0
        for a, ra2 in support:
            i = a - n
            if i in (n, -n) or abs(i) > W:
                continue
            outer += ra2 * abs(a) / abs(2 * n - a)
        if outer == 0.0:
            continue
        ps = _lattice_slice(n, W)
        inner = _inner_k_sum(support, n, ps, W)
        lhs += outer * float(np.sum(inner / (n * n - ps**2) ** 2))
        # discarded |p| > W remainder for this n
        p_tail = 2.0 / ((W + n) ** 2 * 2.0 * max(W - n - 2, 1))
        tail += outer * (s2 / max(4 * n - 4, 1)) * p_tail
    # discs beyond the window
    tail += rn2 * s2 * cutoff * 4.0 / max(W, 1) ** 3
    return lhs, tail


def _lemma_t33(r, N, W):
    support = _signed_support(r)
    s2 = sum(2.0 * m * m * v * v for m, v in r.items())
    _check_budget("T33", (W - N) * len(support) * W)
    lhs = 0.0
    tail = 0.0
    for n in range(N + 1, W + 1):
        r2n = r.get(2 * n, 0.0)
        if r2n == 0.0:
            continue
        ps = _lattice_slice(n, W)
        inner = _inner_k_sum(support, n, ps, W)
        lhs += n * r2n**2 * float(np.sum(inner / (n * n - ps**2) ** 2))
        p_tail = 2.0 / ((W + n) ** 2 * 2.0 * max(W - n - 2, 1))
        tail += n * r2n**2 * (s2 / max(4 * n - 4, 1)) * p_tail
    return lhs, tail


def _check_budget(lemma_id: str, estimate: float) -> None:
    if estimate > LEMMA_WORK_BUDGET:
        raise BudgetError(
            f"{lemma_id}: enumeration work {estimate:.2e} exceeds budget {LEMMA_WORK_BUDGET:.0e}; shrink the window",
            estimate=estimate,
            budget=LEMMA_WORK_BUDGET,
        )


_LEMMA_EVALUATORS = {
    "T1": _lemma_t1,
    "T2": _lemma_t2,
    "T3": _lemma_t3,
    "T9": _lemma_t9,
    "T33": _lemma_t33,
}


# -- contraction-parameter study -------------------------------------------------

@dataclass(frozen=True)
class RhoStudyRow:
    n: int
    measured_hs: float
    tail_component: float
    norm_component: float
    rho_hat: float
    ratio: float
    r0_norm_dev: float


def rho_bound_study(
    spec: PotentialSpec,
    bc: BoundaryCondition | None,
    n_grid: Sequence[int],
    M: int | None = None,
    *,
    samples: int = 8,
) -> list[RhoStudyRow]:
    """Measured majorant kernel norms on each disc against the decay scale.

    With bc None each disc uses the periodic lattice matching its parity.
    Also records how far the measured free-resolvent norm sits from 1/n at
    the sampled points (identically zero mass away from roundoff whenever
    the lattice spacing keeps every other index gap above the disc radius).
    """
    rows = []
    stats = sequence_stats(spec)
    for n in sorted(n_grid):
        bc_n = bc
        if bc_n is None:
            bc_n = BoundaryCondition.PER_PLUS if n % 2 == 0 else BoundaryCondition.PER_MINUS
        if not bc_n.admits(n):
            raise ValueError(f"disc index {n} incompatible with {bc_n.value}")
        M_n = M if M is not None else required_window(n, spec)
        if M_n < required_window(n, spec):
            raise WindowError(f"window M={M_n} below the adequacy rule {required_window(n, spec)} for n={n}")
        window = make_window(bc_n, M_n)
        idx2 = np.asarray(window.indices, dtype=float) ** 2
        measured = 0.0
        r0_dev = 0.0
        for j in range(samples):
            z = n * n + n * np.exp(2j * math.pi * (j + 0.5) / samples)
            _, hs = kbar_w_kbar(spec, bc_n, M_n, complex(z))
            measured = max(measured, hs)
            r0_norm = float(np.max(1.0 / np.abs(z - idx2)))
            r0_dev = max(r0_dev, abs(r0_norm - 1.0 / n))
        tail_comp = tail_energy(spec, math.sqrt(n))
        norm_comp = stats.r_norm**2 / n
        rho_hat = rho_n(spec, n)
        rows.append(
            RhoStudyRow(
                n=n,
                measured_hs=measured,
                tail_component=tail_comp,
                norm_component=norm_comp,
                rho_hat=rho_hat,
                ratio=measured / rho_hat if rho_hat > 0 else 0.0,
                r0_norm_dev=r0_dev,
            )
        )
    return rows
