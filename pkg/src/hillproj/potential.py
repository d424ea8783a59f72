"""Fourier-side model of singular periodic potentials.

A potential is held as ``v = v0 + Q'`` where only the Fourier coefficients
``q(m)`` of the antiderivative ``Q`` (nonzero even frequencies, mean zero)
and the mean value ``v0`` are stored.  Everything downstream works on these
coefficients; the potential itself is never sampled on a grid, because for
the singular class of interest it is not a function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "PotentialSpec",
    "SequenceStats",
    "make_example",
    "zero_potential",
    "v_hat",
    "r_of",
    "tail_energy",
    "rho_n",
    "sequence_stats",
    "read_potential",
    "write_potential",
]


@dataclass(frozen=True)
class PotentialSpec:
    """Finitely supported coefficient model of ``v = v0 + Q'``.

    ``q`` maps nonzero even integers m to the coefficient of ``exp(imx)`` in
    Q.  ``support_cutoff`` is the largest |m| that may carry a coefficient.
    """

    v0: complex
    q: Mapping[int, complex]
    support_cutoff: int
    label: str = "custom"

    def __post_init__(self):
        if self.support_cutoff < 1:
            raise ValueError(f"support_cutoff must be positive, got {self.support_cutoff}")
        clean = {}
        for m, c in dict(self.q).items():
            m = int(m)
            if m == 0:
                raise ValueError("q(0) must be absent: Q has mean zero")
            if m % 2 != 0:
                raise ValueError(f"coefficient frequency {m} is odd; Q lives on even frequencies")
            if abs(m) > self.support_cutoff:
                raise ValueError(f"coefficient frequency {m} exceeds support_cutoff {self.support_cutoff}")
            if c != 0:
                clean[m] = complex(c)
        object.__setattr__(self, "q", clean)

    @property
    def support(self) -> list[int]:
        """Stored frequencies, sorted ascending."""
        return sorted(self.q)


@dataclass(frozen=True)
class SequenceStats:
    """Norms of the scalar sequences derived from a potential."""

    r_norm: float
    h_minus1_norm: float
    support_cutoff: int


def zero_potential() -> PotentialSpec:
    return PotentialSpec(v0=0.0, q={}, support_cutoff=2, label="zero")


def make_example(kind: str, params: Iterable[float], seed: int | None = None) -> PotentialSpec:
    """Build one of the catalog potentials.

    kind="mathieu":      params = [a], the cosine amplitude; v = 2a*cos(2x) as
                         coefficients q(+/-2) = -/+ i*a/2, v0 = 0.
    kind="delta_comb":   params = [c] or [c, cutoff]; the periodic comb of
                         point masses of strength c, q(m) = -i*c/(pi*m) for
                         even 0 < |m| <= cutoff, v0 = c/pi.  Default cutoff 100.
    kind="random_decay": params = [alpha, cutoff]; |q(m)| ~ |m|^-alpha with
                         seeded random phases.  Requires alpha > 1/2 so the
                         derived sequence r stays square summable.
    """
    params = [float(p) for p in params]
    if kind == "mathieu":
        (a,) = params
        return PotentialSpec(
            v0=0.0,
            q={2: -0.5j * a, -2: 0.5j * a},
            support_cutoff=2,
            label=f"mathieu(a={a:g})",
        )
    if kind == "delta_comb":
        c = params[0]
        cutoff = int(params[1]) if len(params) > 1 else 100
        if cutoff <= 0:
            raise ValueError(f"cutoff must be positive, got {cutoff}")
        q = {}
        for m in range(2, cutoff + 1, 2):
            q[m] = -1j * c / (math.pi * m)
            q[-m] = 1j * c / (math.pi * m)
        return PotentialSpec(
            v0=c / math.pi,
            q=q,
            support_cutoff=max(2, cutoff),
            label=f"delta_comb(c={c:g},cutoff={cutoff})",
        )
    if kind == "random_decay":
        alpha = params[0]
        cutoff = int(params[1]) if len(params) > 1 else 16
        if alpha <= 0.5:
            raise ValueError(f"alpha must exceed 1/2 for a square-summable sequence, got {alpha}")
        if cutoff <= 0:
            raise ValueError(f"cutoff must be positive, got {cutoff}")
        rng = np.random.default_rng(42 if seed is None else seed)
        q = {}
        for m in range(2, cutoff + 1, 2):
            for sgn in (m, -m):
                phase = rng.uniform(0.0, 2.0 * math.pi)
                q[sgn] = abs(sgn) ** (-alpha) * complex(math.cos(phase), math.sin(phase))
        return PotentialSpec(
            v0=0.0,
            q=q,
            support_cutoff=max(2, cutoff),
            label=f"random_decay(alpha={alpha:g},cutoff={cutoff},seed={seed})",
        )
    raise ValueError(f"unknown example kind {kind!r}; expected mathieu, delta_comb or random_decay")


def v_hat(spec: PotentialSpec, m: int) -> complex:
    """Fourier coefficient of the potential itself: v0 at m=0, else i*m*q(m)."""
    if m % 2 != 0:
        raise ValueError(f"potential coefficients live on even frequencies, got {m}")
    if m == 0:
        return complex(spec.v0)
    return 1j * m * spec.q.get(m, 0.0)


def r_of(spec: PotentialSpec, m: int) -> float:
    """Symmetric coefficient envelope max(|q(m)|, |q(-m)|); even in m."""
    if m == 0:
        raise ValueError("r is undefined at frequency 0")
    if m % 2 != 0:
        raise ValueError(f"r is defined on nonzero even frequencies, got {m}")
    return max(abs(spec.q.get(m, 0.0)), abs(spec.q.get(-m, 0.0)))


def tail_energy(spec: PotentialSpec, a: float) -> float:
    """l2 mass of the envelope r beyond |k| >= a, as a square root."""
    if a <= 0:
        raise ValueError(f"tail threshold must be positive, got {a}")
    total = 0.0
    for m in _positive_support(spec):
        if m >= a:
            total += 2.0 * r_of(spec, m) ** 2
    return math.sqrt(total)


def rho_n(spec: PotentialSpec, n: int) -> float:
    """Series contraction parameter at disc index n, with unit constant.

    Combines the tail of r beyond sqrt(n) with the 1/n share of the full
    l2 mass; tends to 0 as n grows.
    """
    if n < 1:
        raise ValueError(f"disc index must be >= 1, got {n}")
    rn2 = sum(2.0 * r_of(spec, m) ** 2 for m in _positive_support(spec))
    return math.sqrt(tail_energy(spec, math.sqrt(n)) + rn2 / n)


def sequence_stats(spec: PotentialSpec) -> SequenceStats:
    rn2 = 0.0
    h2 = abs(spec.v0) ** 2
    for m in _positive_support(spec):
        rn2 += 2.0 * r_of(spec, m) ** 2
    for m, c in spec.q.items():
        h2 += abs(c) ** 2 / m**2
    return SequenceStats(
        r_norm=math.sqrt(rn2),
        h_minus1_norm=math.sqrt(h2),
        support_cutoff=spec.support_cutoff,
    )


def _positive_support(spec: PotentialSpec) -> list[int]:
    return sorted({abs(m) for m in spec.q})


# -- potential file format ---------------------------------------------------
#
# Text, whitespace separated, UTF-8.  First non-blank line is the header
# `v0 <re> <im>`; every following line is `m <re(q_m)> <im(q_m)>`.

def write_potential(spec: PotentialSpec, path: str | Path) -> None:
    lines = [f"v0 {spec.v0.real!r} {spec.v0.imag!r}"]
    for m in spec.support:
        c = spec.q[m]
        lines.append(f"{m} {c.real!r} {c.imag!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_potential(path: str | Path) -> PotentialSpec:
    rows = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    if not rows or rows[0][0] != "v0" or len(rows[0]) != 3:
        raise ValueError(f"{path}: expected header line 'v0 re im'")
    v0 = complex(float(rows[0][1]), float(rows[0][2]))
    q = {}
    for parts in rows[1:]:
        if len(parts) != 3:
            raise ValueError(f"{path}: expected 'm re im', got {' '.join(parts)!r}")
        m = int(parts[0])
        q[m] = complex(float(parts[1]), float(parts[2]))
    cutoff = max((abs(m) for m in q), default=2)
    return PotentialSpec(v0=v0, q=q, support_cutoff=cutoff, label=Path(path).stem)
