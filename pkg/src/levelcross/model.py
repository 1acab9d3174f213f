"""Scenario definitions and complex-symmetric Hamiltonian assembly.

A scenario is N resonance levels e_i(a) - i*(gamma_i/2) plus a coupling
rule. The matrix at parameter a has the complex level energies on the
diagonal (optionally shifted by a selfenergy term omega_ii) and the
pair couplings off the diagonal:

    constant                   w_ij = omega
    gaussian                   w_ij = omega * exp(-(e_i - e_j)^2)
    energy_weighted_gaussian   w_ij = omega * e_w(a) * exp(-(e_i - e_j)^2)

where w = min(i, j) is the weight level; presets list the anchor level
last so the weight falls on the crossing partner. Each off-diagonal
value is computed once and written to both entries, so H == H.T holds
bit-exactly.

Assembly is vectorized over the parameter grid: build_hamiltonian_batch
returns an (m, N, N) stack for m parameter values, and every scalar
helper routes through the same code path, so batch and pointwise
results agree bitwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .expressions import ExprAst, eval_expr, parse_expr, to_text

__all__ = [
    "ScenarioError",
    "LevelSpec",
    "CouplingSpec",
    "SweepGrid",
    "Scenario",
    "Tunable",
    "PROFILES",
    "coupling_at",
    "build_hamiltonian",
    "build_hamiltonian_batch",
    "level_energies",
    "scenario_to_dict",
    "scenario_from_dict",
    "save_scenario",
    "load_scenario",
]

PROFILES = ("constant", "gaussian", "energy_weighted_gaussian")


class ScenarioError(ValueError):
    """Invalid scenario definition (construction or file)."""


@dataclass(frozen=True)
class LevelSpec:
    energy_expr: ExprAst
    half_width: float  # gamma_i/2, in the same energy units as e_i

    def __post_init__(self):
        if not np.isfinite(self.half_width) or self.half_width < 0:
            raise ScenarioError(f"half_width must be >= 0, got {self.half_width!r}")

    def energy(self, a):
        return eval_expr(self.energy_expr, a)


def _normalize_pairs(pairs) -> frozenset:
    out = set()
    for item in pairs:
        i, j = int(item[0]), int(item[1])
        if i == j:
            raise ScenarioError(f"coupling pair ({i}, {j}) couples a level to itself")
        out.add((min(i, j), max(i, j)))
    return frozenset(out)


@dataclass(frozen=True)
class CouplingSpec:
    omega: complex
    profile: str
    active_pairs: frozenset  # unordered 0-based pairs, stored as (lo, hi)
    selfenergy: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ScenarioError(f"unknown profile {self.profile!r}; pick one of {PROFILES}")
        object.__setattr__(self, "omega", complex(self.omega))
        object.__setattr__(self, "active_pairs", _normalize_pairs(self.active_pairs))
        object.__setattr__(
            self, "selfenergy", {int(k): complex(v) for k, v in self.selfenergy.items()}
        )


@dataclass(frozen=True)
class SweepGrid:
    a_min: float
    a_max: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.a_min) and np.isfinite(self.a_max)):
            raise ScenarioError("sweep bounds must be finite")
        if not self.a_min < self.a_max:
            raise ScenarioError(f"need a_min < a_max, got [{self.a_min}, {self.a_max}]")
        if self.steps < 2:
            raise ScenarioError(f"need at least 2 sweep steps, got {self.steps}")

    def points(self) -> np.ndarray:
        return np.linspace(self.a_min, self.a_max, self.steps)


@dataclass(frozen=True)
class Scenario:
    label: str
    levels: tuple
    coupling: CouplingSpec
    sweep: SweepGrid

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ScenarioError("scenario needs at least one level")
        n = len(self.levels)
        for i, j in self.coupling.active_pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise ScenarioError(f"coupling pair ({i}, {j}) out of range for {n} levels")
        for k in self.coupling.selfenergy:
            if not 0 <= k < n:
                raise ScenarioError(f"selfenergy index {k} out of range for {n} levels")

    @property
    def n(self) -> int:
        return len(self.levels)

    def half_widths(self) -> np.ndarray:
        return np.array([lv.half_width for lv in self.levels])


@dataclass(frozen=True)
class Tunable:
    """One scalar scenario override: a level's half-width or an additive
    offset on its energy trajectory."""

    kind: str  # "gamma_half" | "energy_offset"
    level: int  # 0-based

    def __post_init__(self):
        if self.kind not in ("gamma_half", "energy_offset"):
            raise ScenarioError(f"unknown tunable kind {self.kind!r}")
        if self.level < 0:
            raise ScenarioError(f"tunable level must be >= 0, got {self.level}")


def level_energies(scenario: Scenario, a) -> np.ndarray:
    """Unperturbed e_i(a) for all levels; shape (m, N) for m parameter values."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return np.stack([lv.energy(a) for lv in scenario.levels], axis=1)


def _pair_coupling(scenario: Scenario, i: int, j: int, energies: np.ndarray):
    # energies: (m, N) precomputed level trajectories
    omega = scenario.coupling.omega
    profile = scenario.coupling.profile
    if profile == "constant":
        return np.full(energies.shape[0], omega)
    g = np.exp(-((energies[:, i] - energies[:, j]) ** 2))
    if profile == "gaussian":
        return omega * g
    return omega * (energies[:, min(i, j)] * g)


def coupling_at(scenario: Scenario, i: int, j: int, a) -> complex:
    """Off-diagonal element w_ij at parameter a (0 for inactive pairs)."""
    n = scenario.n
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise IndexError(f"coupling indices ({i}, {j}) invalid for {n} levels")
    if (min(i, j), max(i, j)) not in scenario.coupling.active_pairs:
        return 0j
    energies = level_energies(scenario, a)
    return complex(_pair_coupling(scenario, i, j, energies)[0])


def build_hamiltonian_batch(
    scenario: Scenario, a, *, tunable: Tunable | None = None, value=None
) -> np.ndarray:
    """Assemble H(a) for every a in the batch; returns (m, N, N) complex.

    With a tunable, `value` (scalar or per-point array) replaces the
    level's half-width or shifts its energy before assembly.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    n = scenario.n
    energies = level_energies(scenario, a)
    gamma = np.broadcast_to(scenario.half_widths(), (a.size, n)).copy()
    if tunable is not None:
        if value is None:
            raise ScenarioError("tunable override needs a value")
        if tunable.level >= n:
            raise ScenarioError(f"tunable level {tunable.level} out of range for {n} levels")
        if tunable.kind == "gamma_half":
            gamma[:, tunable.level] = value
        else:
            energies[:, tunable.level] = energies[:, tunable.level] + value
    h = np.zeros((a.size, n, n), dtype=complex)
    diag = energies - 1j * gamma
    for k, shift in scenario.coupling.selfenergy.items():
        diag[:, k] = diag[:, k] + shift
    h[:, np.arange(n), np.arange(n)] = diag
    for i, j in sorted(scenario.coupling.active_pairs):
        w = _pair_coupling(scenario, i, j, energies)
        h[:, i, j] = w
        h[:, j, i] = w
    return h


def build_hamiltonian(scenario: Scenario, a: float) -> np.ndarray:
    """The N x N complex-symmetric matrix at a single parameter value."""
    return build_hamiltonian_batch(scenario, [a])[0]


# ---------------------------------------------------------------------------
# Scenario file format. Level indices are 1-based in files; "all" is
# accepted for the pair list and expands at parse time, so a serialized
# scenario always carries the explicit sorted pair list.

def _complex_to_dict(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


def _complex_from_dict(obj) -> complex:
    try:
        return complex(float(obj["re"]), float(obj["im"]))
    except (TypeError, KeyError) as err:
        raise ScenarioError(f"expected {{re, im}} pair, got {obj!r}") from err


def scenario_to_dict(scenario: Scenario) -> dict:
    coupling = scenario.coupling
    return {
        "label": scenario.label,
        "levels": [
            {"e": to_text(lv.energy_expr), "gamma_half": lv.half_width}
            for lv in scenario.levels
        ],
        "coupling": {
            "omega": _complex_to_dict(coupling.omega),
            "profile": coupling.profile,
            "pairs": [[i + 1, j + 1] for i, j in sorted(coupling.active_pairs)],
            "selfenergy": {
                str(k + 1): _complex_to_dict(v) for k, v in sorted(coupling.selfenergy.items())
            },
        },
        "sweep": {
            "a_min": scenario.sweep.a_min,
            "a_max": scenario.sweep.a_max,
            "steps": scenario.sweep.steps,
        },
    }


def scenario_from_dict(obj) -> Scenario:
    try:
        levels = tuple(
            LevelSpec(parse_expr(item["e"]), float(item["gamma_half"]))
            for item in obj["levels"]
        )
        n = len(levels)
        raw = obj["coupling"]
        pairs = raw.get("pairs", "all")
        if pairs == "all":
            pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        else:
            pairs = [(int(i) - 1, int(j) - 1) for i, j in pairs]
        coupling = CouplingSpec(
            omega=_complex_from_dict(raw["omega"]),
            profile=raw["profile"],
            active_pairs=pairs,
            selfenergy={
                int(k) - 1: _complex_from_dict(v)
                for k, v in raw.get("selfenergy", {}).items()
            },
        )
        sweep = SweepGrid(
            float(obj["sweep"]["a_min"]),
            float(obj["sweep"]["a_max"]),
            int(obj["sweep"]["steps"]),
        )
        label = str(obj.get("label", ""))
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise ScenarioError(f"malformed scenario: {err}") from err
    return Scenario(label=label, levels=levels, coupling=coupling, sweep=sweep)


def save_scenario(scenario: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise ScenarioError(f"cannot read scenario {path}: {err}") from err
    return scenario_from_dict(obj)


def with_profile(scenario: Scenario, profile: str) -> Scenario:
    """The same scenario with a different coupling profile."""
    return replace(scenario, coupling=replace(scenario.coupling, profile=profile))


__all__.append("with_profile")
