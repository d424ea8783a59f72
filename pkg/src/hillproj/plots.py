"""Figure rendering for experiment reports.

Each experiment gets one or two PNGs next to its CSV output.  Rendering is
file-only (Agg backend); nothing here opens a window.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "plot_decay",
    "plot_localization",
    "plot_lemmas",
    "plot_reconstruct",
    "plot_rho_study",
    "plot_projections",
]

_DPI = 130


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_decay(report, out_dir: Path) -> list[Path]:
    ns = np.array([r.n for r in report.rows], dtype=float)
    hs = np.array([r.hs_deviation for r in report.rows])
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.loglog(ns, np.maximum(hs, 1e-300), "o-", ms=4, label="deviation")
    if np.isfinite(report.fitted_slope) and hs.max() > 0:
        ref = hs[0] * (ns / ns[0]) ** report.fitted_slope
        ax.loglog(ns, ref, "--", lw=1, label=f"slope {report.fitted_slope:.2f}")
    ax.set_xlabel("disc index n")
    ax.set_ylabel("HS deviation")
    ax.set_title(f"{report.potential_label}, {report.bc.value}")
    ax.legend(fontsize=8)
    p1 = _save(fig, out_dir / "decay.png")

    Ns = [N for N, _ in report.tail_sums]
    tails = [t for _, t in report.tail_sums]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.semilogy(Ns, np.maximum(tails, 1e-300), "s-", ms=4)
    ax.set_xlabel("tail start N")
    ax.set_ylabel("sum of squared deviations beyond N")
    ax.set_title("tail sums")
    p2 = _save(fig, out_dir / "tail_sums.png")
    return [p1, p2]


def plot_localization(report, out_dir: Path) -> list[Path]:
    ns = [n for n, _ in report.counts]
    cs = [c if c is not None else -1 for _, c in report.counts]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(ns, cs, "o", ms=5, label="count")
    ax.axhline(report.expected, color="gray", lw=1, ls="--", label=f"expected {report.expected}")
    if report.N_loc is not None:
        ax.axvline(report.N_loc, color="tab:red", lw=1, ls=":", label=f"N_loc = {report.N_loc}")
    ax.set_xlabel("disc index n")
    ax.set_ylabel("eigenvalues in disc")
    ax.set_title(f"{report.potential_label}, {report.bc.value}")
    ax.legend(fontsize=8)
    return [_save(fig, out_dir / "spectrum.png")]


def plot_lemmas(reports, out_dir: Path) -> list[Path]:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.4, 3.6))
    by_id: dict[str, list] = {}
    for rep in reports:
        by_id.setdefault(rep.lemma_id, []).append(rep)
    for lid, reps in sorted(by_id.items()):
        reps = sorted(reps, key=lambda r: r.N)
        Ns = [r.N for r in reps]
        ax1.semilogy(Ns, [max(r.lhs, 1e-300) for r in reps], "o-", ms=4, label=lid)
        ax2.plot(Ns, [r.fitted_ratio for r in reps], "s-", ms=4, label=lid)
    ax1.set_xlabel("N")
    ax1.set_ylabel("sum value")
    ax1.set_title("left sides")
    ax1.legend(fontsize=8)
    ax2.set_xlabel("N")
    ax2.set_ylabel("value / bound")
    ax2.set_title("fitted ratios")
    ax2.legend(fontsize=8)
    return [_save(fig, out_dir / "lemmas.png")]


def plot_reconstruct(report, out_dir: Path) -> list[Path]:
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    vals = np.asarray(report.trial_sups, dtype=float)
    if vals.size and vals.max() - vals.min() < 1e-12:
        pad = max(abs(float(vals.max())), 1.0) * 1e-6
        bins = np.linspace(float(vals.min()) - pad, float(vals.max()) + pad, 21)
    else:
        bins = 20
    ax.hist(vals, bins=bins, color="tab:blue", alpha=0.8)
    ax.axvline(report.ordered_sup, color="tab:green", lw=1.5, label="ordered sum")
    ax.axvline(2 * report.ordered_sup, color="tab:red", lw=1.5, ls="--", label="2x ordered")
    ax.set_xlabel("partial-sum sup norm")
    ax.set_ylabel("trials")
    ax.set_title(f"{report.f_label}: error {report.error_norm:.2e}")
    ax.legend(fontsize=8)
    return [_save(fig, out_dir / "reconstruct.png")]


def plot_rho_study(rows, out_dir: Path) -> list[Path]:
    ns = np.array([r.n for r in rows], dtype=float)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.4, 3.6))
    ax1.loglog(ns, [r.measured_hs for r in rows], "o-", ms=4, label="measured")
    ax1.loglog(ns, [r.rho_hat for r in rows], "s--", ms=4, label="decay scale")
    ax1.set_xlabel("disc index n")
    ax1.set_ylabel("HS norm")
    ax1.legend(fontsize=8)
    ax2.plot(ns, [r.ratio for r in rows], "o-", ms=4)
    ax2.set_xlabel("disc index n")
    ax2.set_ylabel("measured / scale")
    ax2.set_title("ratio")
    return [_save(fig, out_dir / "rho_study.png")]


def plot_projections(rows, out_dir: Path) -> list[Path]:
    ns = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.semilogy(ns, [max(r["hs_deviation"], 1e-300) for r in rows], "o-", ms=4)
    ax.set_xlabel("disc index n")
    ax.set_ylabel("HS deviation")
    ax.set_title("projection deviations")
    return [_save(fig, out_dir / "projections.png")]
