"""Index lattices and dense truncated operator matrices.

Three boundary conditions are supported.  The periodic pair uses exponential
bases on the even / odd integer lattices; Dirichlet uses the sine basis on
the positive integers.  All builders return dense complex matrices over a
fixed, strictly increasing index ordering so that results are reproducible
entry for entry.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParityError, SpectralProximityError, WindowError
from .potential import PotentialSpec, v_hat

__all__ = [
    "BoundaryCondition",
    "TruncationWindow",
    "MatrixLabel",
    "OperatorMatrix",
    "basis_indices",
    "make_window",
    "build_v_matrix",
    "build_operator_matrix",
    "build_w_matrix",
    "kbar_w_kbar",
    "r0_diag",
    "matrix_to_csv",
    "matrix_from_csv",
    "required_window",
]

MAX_DIM = 4096  # dense-matrix safety guard

# distance below which a spectral parameter counts as sitting on the free spectrum
FREE_SPECTRUM_MARGIN = 1e-9


class BoundaryCondition(enum.Enum):
    PER_PLUS = "per_plus"
    PER_MINUS = "per_minus"
    DIR = "dir"

    def admits(self, n: int) -> bool:
        """Whether disc index n belongs to this condition's lattice."""
        if n < 1:
            return False
        if self is BoundaryCondition.PER_PLUS:
            return n % 2 == 0
        if self is BoundaryCondition.PER_MINUS:
            return n % 2 == 1
        return True

    @property
    def free_multiplicity(self) -> int:
        """Eigenvalue count of the free operator in each localization disc."""
        return 1 if self is BoundaryCondition.DIR else 2


class MatrixLabel(enum.Enum):
    FREE = "free"
    FULL = "full"
    V = "v"
    W = "w"
    KBAR_W_KBAR = "kbar_w_kbar"
    RESOLVENT = "resolvent"
    PROJECTION = "projection"
    GENERIC = "generic"


@dataclass(frozen=True)
class TruncationWindow:
    M: int
    indices: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.indices)

    def position(self, m: int) -> int:
        """Row/column of lattice index m; raises if outside the window."""
        arr = self.indices
        lo, hi = 0, len(arr)
        while lo < hi:
            mid = (lo + hi) // 2
            if arr[mid] < m:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(arr) or arr[lo] != m:
            raise WindowError(f"index {m} not in window (M={self.M})")
        return lo


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    entries: np.ndarray
    window: TruncationWindow
    bc: BoundaryCondition
    label: MatrixLabel = MatrixLabel.GENERIC

    def __post_init__(self):
        e = self.entries
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] != self.window.dim:
            raise ValueError(f"matrix shape {e.shape} does not match window dim {self.window.dim}")

    @property
    def dim(self) -> int:
        return self.window.dim

    def with_entries(self, entries: np.ndarray, label: MatrixLabel = MatrixLabel.GENERIC) -> "OperatorMatrix":
        return OperatorMatrix(entries=entries, window=self.window, bc=self.bc, label=label)


def basis_indices(bc: BoundaryCondition, M: int) -> list[int]:
    """Strictly increasing lattice indices kept by the window."""
    if M < 2:
        raise WindowError(f"window size must be >= 2, got {M}")
    if bc is BoundaryCondition.PER_PLUS:
        return list(range(-M + (M % 2), M + 1 - (M % 2), 2))
    if bc is BoundaryCondition.PER_MINUS:
        start = -M if M % 2 == 1 else -M + 1
        return list(range(start, M + 1, 2))
    return list(range(1, M + 1))


def make_window(bc: BoundaryCondition, M: int) -> TruncationWindow:
    idx = basis_indices(bc, M)
    if len(idx) > MAX_DIM:
        raise WindowError(f"window dimension {len(idx)} exceeds guard {MAX_DIM}")
    return TruncationWindow(M=M, indices=tuple(idx))


def required_window(n_max: int, spec: PotentialSpec) -> int:
    """Smallest window honoring the adequacy rule for disc index n_max."""
    return 2 * n_max + spec.support_cutoff + 8


def _check_parity(spec: PotentialSpec, bc: BoundaryCondition) -> None:
    # Stored coefficients are always even-frequency, which is what the
    # periodic lattices couple; this guards future extensions.
    if any(m % 2 != 0 for m in spec.q):
        raise ParityError("potential carries odd-frequency coefficients; incompatible with the lattice")


def build_v_matrix(spec: PotentialSpec, bc: BoundaryCondition, M: int) -> OperatorMatrix:
    """Multiplication-by-v in the chosen basis.

    Periodic bases give a Toeplitz matrix of potential coefficients.  The
    Dirichlet entries are obtained by pairing v = v0 + Q' against products of
    sines and integrating the derivative onto the (smooth) product, which is
    legitimate for distributional v; the resulting kernel against the stored
    coefficients is in closed form below.
    """
    _check_parity(spec, bc)
    window = make_window(bc, M)
    idx = np.asarray(window.indices)
    if bc is not BoundaryCondition.DIR:
        diffs = idx[:, None] - idx[None, :]
        vals = {int(d): v_hat(spec, int(d)) for d in np.unique(diffs)}
        entries = np.vectorize(lambda d: vals[int(d)], otypes=[complex])(diffs)
        return OperatorMatrix(entries=entries, window=window, bc=bc, label=MatrixLabel.V)

    # Dirichlet: entry (j, m) = v0*delta - (j+m) s(j+m) + (j-m) s(j-m) with
    # s(k) the sine transform of Q, assembled from the stored coefficients.
    s = _sine_transform_table(spec, 2 * M)
    j = idx[:, None]
    m = idx[None, :]
    plus = j + m
    minus = j - m
    entries = (-plus * s[plus] + minus * _signed_lookup(s, minus)).astype(complex)
    entries[np.arange(len(idx)), np.arange(len(idx))] += complex(spec.v0)
    return OperatorMatrix(entries=entries, window=window, bc=bc, label=MatrixLabel.V)


def _signed_lookup(s: np.ndarray, k: np.ndarray) -> np.ndarray:
    # s is tabulated for k >= 0 and extends oddly: s(-k) = -s(k)
    return np.where(k >= 0, s[np.abs(k)], -s[np.abs(k)])


def _sine_transform_table(spec: PotentialSpec, kmax: int) -> np.ndarray:
    """s(k) = (1/pi) * integral of Q(x) sin(kx) over the period, k = 0..kmax.

    For each stored frequency l the elementary integral of exp(ilx) sin(kx)
    is -2k/(pi (l^2-k^2)) when l+k is odd and a Kronecker pair when even.
    """
    s = np.zeros(kmax + 1, dtype=complex)
    ls = np.array(spec.support, dtype=float)
    qs = np.array([spec.q[m] for m in spec.support], dtype=complex)
    for k in range(1, kmax + 1):
        if k % 2 == 0:
            # even k: only l = -k and l = +k survive
            s[k] = (spec.q.get(-k, 0.0) - spec.q.get(k, 0.0)) / 2j
        elif len(ls):
            s[k] = np.sum(qs * (-2.0 * k / (math.pi * (ls**2 - k**2))))
    return s


def build_operator_matrix(spec: PotentialSpec, bc: BoundaryCondition, M: int) -> OperatorMatrix:
    """Truncated matrix of -d^2/dx^2 + v: free diagonal plus the v matrix."""
    v = build_v_matrix(spec, bc, M)
    idx = np.asarray(v.window.indices, dtype=float)
    entries = v.entries.copy()
    entries[np.arange(len(idx)), np.arange(len(idx))] += idx**2
    return OperatorMatrix(entries=entries, window=v.window, bc=bc, label=MatrixLabel.FULL)


def _w_value(spec: PotentialSpec, k: int) -> float:
    # max(|v_hat(k)|, |v_hat(-k)|); equals |k| r(k) off zero, |v0| at zero
    return max(abs(v_hat(spec, k)), abs(v_hat(spec, -k)))


def build_w_matrix(spec: PotentialSpec, bc: BoundaryCondition, M: int) -> OperatorMatrix:
    """Nonnegative majorant of the v matrix, with entries W(j-m).

    W(k) is the symmetrized coefficient envelope |k| r(k); the k=0 entry is
    |v0| so the majorization covers the mean part as well.  The entrywise
    domination of the v matrix holds for the periodic bases; the Dirichlet
    v matrix mixes +/- frequencies and is not covered by this single-kernel
    majorant.
    """
    _check_parity(spec, bc)
    window = make_window(bc, M)
    idx = np.asarray(window.indices)
    diffs = idx[:, None] - idx[None, :]
    tab = {}
    for d in np.unique(np.abs(diffs)):
        tab[int(d)] = _w_value(spec, int(d)) if d % 2 == 0 else 0.0
    entries = np.vectorize(lambda d: tab[abs(int(d))], otypes=[float])(diffs)
    return OperatorMatrix(entries=entries.astype(complex), window=window, bc=bc, label=MatrixLabel.W)


def _free_distances(window: TruncationWindow, z: complex) -> np.ndarray:
    idx = np.asarray(window.indices, dtype=float)
    return np.abs(z - idx**2)


def _guard_off_spectrum(window: TruncationWindow, z: complex) -> np.ndarray:
    d = _free_distances(window, z)
    if d.min() < FREE_SPECTRUM_MARGIN:
        m = window.indices[int(d.argmin())]
        raise SpectralProximityError(
            f"z={z} lies within {FREE_SPECTRUM_MARGIN:g} of the free eigenvalue {m}^2",
            z=z,
            distance=float(d.min()),
        )
    return d


def kbar_w_kbar(spec: PotentialSpec, bc: BoundaryCondition, M: int, z: complex) -> tuple[OperatorMatrix, float]:
    """Weighted majorant kernel W(j-m)/(|z-j^2||z-m^2|)^(1/2) and its HS norm.

    This is the contraction certificate for the resolvent perturbation
    series: an HS norm below one at z guarantees geometric decay of the
    series terms there.
    """
    w = build_w_matrix(spec, bc, M)
    d = _guard_off_spectrum(w.window, z)
    weights = 1.0 / np.sqrt(d)
    entries = w.entries * np.outer(weights, weights)
    mat = OperatorMatrix(entries=entries, window=w.window, bc=bc, label=MatrixLabel.KBAR_W_KBAR)
    return mat, float(np.linalg.norm(entries, "fro"))


def r0_diag(bc: BoundaryCondition, M: int, z: complex) -> OperatorMatrix:
    """Free resolvent: diagonal entries 1/(z - m^2)."""
    window = make_window(bc, M)
    _guard_off_spectrum(window, z)
    idx = np.asarray(window.indices, dtype=float)
    entries = np.diag(1.0 / (z - idx**2))
    return OperatorMatrix(entries=entries, window=window, bc=bc, label=MatrixLabel.RESOLVENT)


# -- debugging export --------------------------------------------------------

def matrix_to_csv(mat: OperatorMatrix, path) -> None:
    """Row-major re,im pairs, one matrix row per CSV line."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in mat.entries:
            fh.write(",".join(f"{float(c.real)!r},{float(c.imag)!r}" for c in row) + "\n")


def matrix_from_csv(path, window: TruncationWindow, bc: BoundaryCondition) -> OperatorMatrix:
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = [float(t) for t in line.strip().split(",") if t]
            rows.append([complex(parts[i], parts[i + 1]) for i in range(0, len(parts), 2)])
    return OperatorMatrix(entries=np.array(rows, dtype=complex), window=window, bc=bc)
