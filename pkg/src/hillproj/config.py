"""Key-value experiment configuration: parsing and full validation.

The format is plain text, one `key = value` per line, `#` comments allowed.
Parsing is strict: unknown keys are rejected (with a spelling suggestion)
and every violation found is reported, not just the first.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass
from pathlib import Path

from .basis import BoundaryCondition
from .errors import ConfigError
from .potential import PotentialSpec, make_example, read_potential, zero_potential
from .analysis import LEMMA_IDS

__all__ = ["ExperimentConfig", "parse_config", "load_config"]

EXPERIMENTS = ("decay", "localization", "lemmas", "reconstruct", "rho_study", "projections")

# experiments that build operator matrices and therefore obey the window rule
MATRIX_EXPERIMENTS = ("decay", "localization", "reconstruct", "projections")

_KNOWN_KEYS = {
    "experiment",
    "potential",
    "bc",
    "window",
    "n_min",
    "n_max",
    "tail_grid",
    "rho_n_grid",
    "lemma_ids",
    "lemma_N_grid",
    "lemma_window",
    "contour_nodes",
    "series_smax",
    "rect_N",
    "f_band",
    "trials",
    "seed",
    "tol",
    "export_matrices",
}

_BC_NAMES = {
    "per_plus": BoundaryCondition.PER_PLUS,
    "per_minus": BoundaryCondition.PER_MINUS,
    "dir": BoundaryCondition.DIR,
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    potential: PotentialSpec
    potential_text: str
    bc: BoundaryCondition
    window: int
    n_min: int | None
    n_max: int
    tail_grid: tuple[int, ...]
    rho_n_grid: tuple[int, ...]
    lemma_ids: tuple[str, ...]
    lemma_N_grid: tuple[int, ...]
    lemma_window: int
    contour_nodes: int
    series_smax: int
    rect_N: int
    f_band: int
    trials: int
    seed: int
    tol: float
    export_matrices: bool

    def echo(self) -> dict:
        """Normalized key/value view for report files."""
        return {
            "experiment": self.experiment,
            "potential": self.potential_text,
            "bc": self.bc.value,
            "window": self.window,
            "n_min": self.n_min,
            "n_max": self.n_max,
            "tail_grid": list(self.tail_grid),
            "rho_n_grid": list(self.rho_n_grid),
            "lemma_ids": list(self.lemma_ids),
            "lemma_N_grid": list(self.lemma_N_grid),
            "lemma_window": self.lemma_window,
            "contour_nodes": self.contour_nodes,
            "series_smax": self.series_smax,
            "rect_N": self.rect_N,
            "f_band": self.f_band,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "export_matrices": self.export_matrices,
        }


def _parse_potential(text: str, seed: int) -> PotentialSpec:
    tokens = text.split()
    kind = tokens[0]
    if kind == "zero":
        return zero_potential()
    if kind == "file":
        if len(tokens) != 2:
            raise ValueError("potential file form is: file PATH")
        return read_potential(Path(tokens[1]))
    return make_example(kind, [float(t) for t in tokens[1:]], seed=seed)


def parse_config(text: str, *, experiment: str | None = None) -> ExperimentConfig:
    """Parse and validate; raises ConfigError carrying every violation found.

    `experiment` preselects the experiment (the CLI subcommand); a config
    line may restate it but must agree.
    """
    violations: list[str] = []
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            violations.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            hint = difflib.get_close_matches(key, _KNOWN_KEYS, n=1)
            suffix = f"; did you mean {hint[0]!r}?" if hint else ""
            violations.append(f"line {lineno}: unknown key {key!r}{suffix}")
            continue
        if key in raw:
            violations.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = value

    def get_int(key: str, default: int | None, minimum: int = 1) -> int | None:
        if key not in raw:
            return default
        try:
            value = int(raw[key])
        except ValueError:
            violations.append(f"{key}: expected an integer, got {raw[key]!r}")
            return default
        if value < minimum:
            violations.append(f"{key}: must be >= {minimum}, got {value}")
        return value

    def get_int_list(key: str, default: tuple[int, ...]) -> tuple[int, ...]:
        if key not in raw:
            return default
        try:
            values = tuple(int(t) for t in raw[key].split())
        except ValueError:
            violations.append(f"{key}: expected whitespace-separated integers, got {raw[key]!r}")
            return default
        if any(v < 1 for v in values):
            violations.append(f"{key}: entries must be positive, got {values}")
        return values

    exp = raw.get("experiment", experiment)
    if exp is None:
        violations.append("experiment: missing (give it in the config or pick a subcommand)")
        exp = "decay"
    elif exp not in EXPERIMENTS:
        violations.append(f"experiment: unknown {exp!r}; expected one of {', '.join(EXPERIMENTS)}")
        exp = "decay"
    elif experiment is not None and exp != experiment:
        violations.append(f"experiment: config says {exp!r} but the subcommand selected {experiment!r}")

    seed = get_int("seed", 42, minimum=0)

    potential = None
    potential_text = raw.get("potential", "")
    if not potential_text:
        violations.append("potential: missing (e.g. 'potential = mathieu 1.0')")
    else:
        try:
            potential = _parse_potential(potential_text, seed)
        except (ValueError, OSError) as exc:
            violations.append(f"potential: {exc}")
    if potential is None:
        potential = zero_potential()

    bc_name = raw.get("bc", "per_plus")
    bc = _BC_NAMES.get(bc_name)
    if bc is None:
        hint = difflib.get_close_matches(bc_name, _BC_NAMES, n=1)
        suffix = f"; did you mean {hint[0]!r}?" if hint else ""
        violations.append(f"bc: unknown {bc_name!r}{suffix}")
        bc = BoundaryCondition.PER_PLUS

    n_max = get_int("n_max", 16)
    n_min = get_int("n_min", None)
    if n_min is not None and n_max is not None and n_min > n_max:
        violations.append(f"n_min: {n_min} exceeds n_max {n_max}")
    rule_floor = 2 * n_max + potential.support_cutoff + 8
    window = get_int("window", rule_floor, minimum=2)
    if exp in MATRIX_EXPERIMENTS and window < rule_floor:
        violations.append(
            f"window: M={window} violates the adequacy rule M >= 2*n_max + support_cutoff + 8 "
            f"= {rule_floor} (n_max={n_max}, support_cutoff={potential.support_cutoff})"
        )

    tail_grid = get_int_list("tail_grid", (8, 12, 16))
    rho_n_grid = get_int_list("rho_n_grid", (9, 16, 25, 36, 49))
    lemma_N_grid = get_int_list("lemma_N_grid", (8, 16, 32))
    lemma_window = get_int("lemma_window", 200)
    contour_nodes = get_int("contour_nodes", 32, minimum=8)
    series_smax = get_int("series_smax", 8, minimum=0)
    rect_N = get_int("rect_N", 6)
    f_band = get_int("f_band", 20)
    trials = get_int("trials", 100)

    if exp == "reconstruct":
        if rect_N >= n_max:
            violations.append(f"rect_N: {rect_N} must be below n_max {n_max}")
        if window and f_band > window / 2:
            violations.append(f"f_band: {f_band} exceeds the window interior {window}/2")

    lemma_ids = tuple(raw.get("lemma_ids", " ".join(LEMMA_IDS)).split())
    for lid in lemma_ids:
        if lid not in LEMMA_IDS:
            hint = difflib.get_close_matches(lid, LEMMA_IDS, n=1)
            suffix = f"; did you mean {hint[0]!r}?" if hint else ""
            violations.append(f"lemma_ids: unknown {lid!r}{suffix}")
    if exp == "lemmas":
        for N in lemma_N_grid:
            if N >= lemma_window:
                violations.append(f"lemma_N_grid: N={N} must be below lemma_window {lemma_window}")

    tol = 1e-10
    if "tol" in raw:
        try:
            tol = float(raw["tol"])
        except ValueError:
            violations.append(f"tol: expected a float, got {raw['tol']!r}")
        if tol <= 0:
            violations.append(f"tol: must be positive, got {tol}")

    export_matrices = False
    if "export_matrices" in raw:
        token = raw["export_matrices"].lower()
        if token in ("true", "yes", "1"):
            export_matrices = True
        elif token in ("false", "no", "0"):
            export_matrices = False
        else:
            violations.append(f"export_matrices: expected true/false, got {raw['export_matrices']!r}")

    if violations:
        raise ConfigError(violations)
    return ExperimentConfig(
        experiment=exp,
        potential=potential,
        potential_text=potential_text,
        bc=bc,
        window=window,
        n_min=n_min,
        n_max=n_max,
        tail_grid=tail_grid,
        rho_n_grid=rho_n_grid,
        lemma_ids=lemma_ids,
        lemma_N_grid=lemma_N_grid,
        lemma_window=lemma_window,
        contour_nodes=contour_nodes,
        series_smax=series_smax,
        rect_N=rect_N,
        f_band=f_band,
        trials=trials,
        seed=seed,
        tol=tol,
        export_matrices=export_matrices,
    )


def load_config(path: str | Path, *, experiment: str | None = None) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"), experiment=experiment)
