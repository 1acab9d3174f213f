"""Parameter sweeps: solve the spectrum along a grid, stitch eigenpairs
into continuous branches, and classify crossing events.

Branch identity is decided by eigenvector overlap between consecutive
grid points, not by eigenvalue proximity: near a critical parameter the
eigenvalues approach each other and proximity matching would silently
relabel the states. The exception is a grid step touching a defective
point, where overlaps are ill-defined and eigenvalue proximity is the
only sensible objective.

Branches are numbered by the unperturbed levels sorted ascending in
(e_i(a_min), gamma_i/2, i); each Trajectory records which level it
started nearest to, which is what the exchange criteria compare against
the state of affairs at a_max.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .eigensolve import (
    RootConvergenceError,
    SolverError,
    Spectrum,
    solve_spectrum_batch,
)
from .model import CouplingSpec, Scenario, Tunable, build_hamiltonian_batch

__all__ = [
    "CROSSING_TOL",
    "CrossingReport",
    "SweepResult",
    "Trajectory",
    "detect_crossings",
    "match_branches",
    "run_sweep",
]

CROSSING_TOL = 1e-6      # |E_i - E_j| below this counts as an energy crossing
MATCH_TIE_TOL = 1e-12    # overlap objectives within this are tied

_PERM_CACHE: dict[int, np.ndarray] = {}


def _permutations(n: int) -> np.ndarray:
    if n not in _PERM_CACHE:
        _PERM_CACHE[n] = np.array(list(itertools.permutations(range(n))), dtype=int)
    return _PERM_CACHE[n]


def _best_assignment(score: np.ndarray, tiebreak: np.ndarray) -> np.ndarray:
    """Permutation maximizing sum score[i, pi(i)]; ties by minimal
    sum tiebreak, then first in lexicographic order."""
    n = score.shape[0]
    perms = _permutations(n)
    rows = np.arange(n)[:, None]
    totals = score[rows, perms.T].sum(axis=0)
    ties = tiebreak[rows, perms.T].sum(axis=0)
    cand = totals >= totals.max() - MATCH_TIE_TOL
    penalty = np.where(cand, ties, np.inf)
    return perms[int(np.argmin(penalty))]


def match_branches(prev: Spectrum, curr: Spectrum) -> tuple[int, ...]:
    """Permutation pi with curr[pi[i]] continuing prev[i]'s branch.

    Maximizes the summed Hermitian overlap magnitude of the eigenvector
    pairs, enumerated exactly. If either spectrum carries a defective
    pair the objective falls back to eigenvalue proximity.
    """
    vp, vc = prev.vectors, curr.vectors
    dist = np.abs(prev.values[:, None] - curr.values[None, :])
    if prev.defective.any() or curr.defective.any():
        score = -dist
    else:
        score = np.abs(np.conj(vp) @ vc.T)
    return tuple(int(k) for k in _best_assignment(score, dist))


@dataclass(frozen=True)
class Trajectory:
    """One branch of the spectrum followed across the sweep grid.

    start_level is the 0-based unperturbed level whose (e, gamma/2) the
    branch starts nearest to at a_min. cross_norms rows are ordered by
    branch id (own entry zero), not by raw spectrum position.
    """

    branch_id: int
    start_level: int
    a: np.ndarray
    energy: np.ndarray
    gamma_half: np.ndarray
    vectors: np.ndarray
    norm_a: np.ndarray
    cross_norms: np.ndarray
    defective: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.energy - 1j * self.gamma_half


@dataclass(frozen=True)
class CrossingReport:
    kind: str                      # true_energy | avoided_energy | coalescence
    a_cr: float
    pair: tuple[int, int]          # branch ids
    max_width_split: float         # max |Gamma_i/2 - Gamma_j/2| near the event
    exchange_detected: bool


@dataclass(frozen=True)
class SweepResult:
    """Branch-tracked sweep output.

    bare holds the unperturbed complex energies e_i(a) - i gamma_i/2,
    override applied, level-indexed columns; crossing classification
    compares branch endpoints against its last row.
    """

    scenario: Scenario
    a: np.ndarray
    trajectories: tuple[Trajectory, ...]
    bare: np.ndarray
    residual: np.ndarray

    def __len__(self):
        return len(self.trajectories)

    def __iter__(self):
        return iter(self.trajectories)

    def __getitem__(self, k):
        return self.trajectories[k]

    def by_start_level(self, level: int) -> Trajectory:
        for trajectory in self.trajectories:
            if trajectory.start_level == level:
                return trajectory
        raise KeyError(f"no branch starts at level {level}")


def _bare_diagonal(scenario, a, tunable, value):
    """Unperturbed complex energies eps_i(a) with any override applied,
    couplings and selfenergies off."""
    bare = replace(
        scenario,
        coupling=CouplingSpec(
            omega=0.0, profile="constant", active_pairs=(), selfenergy={}
        ),
    )
    h = build_hamiltonian_batch(bare, a, tunable=tunable, value=value)
    return np.diagonal(h, axis1=1, axis2=2)


def _solve_grid(scenario, a, tunable, value, workers):
    def solve_chunk(lo, hi):
        chunk_value = value
        if isinstance(value, np.ndarray) and value.ndim == 1:
            chunk_value = value[lo:hi]
        h = build_hamiltonian_batch(
            scenario, a[lo:hi], tunable=tunable, value=chunk_value
        )
        try:
            return solve_spectrum_batch(h)
        except RootConvergenceError as err:
            raise SolverError(
                f"eigensolver failed at grid point a={float(a[lo + err.batch_index])!r}: {err}"
            ) from err

    m = a.shape[0]
    if workers <= 1 or m < 2 * workers:
        return solve_chunk(0, m)
    bounds = np.linspace(0, m, workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(
            pool.map(lambda be: solve_chunk(be[0], be[1]), zip(bounds[:-1], bounds[1:]))
        )
    first = parts[0]
    return type(first)(
        values=np.concatenate([p.values for p in parts]),
        vectors=np.concatenate([p.vectors for p in parts]),
        defective=np.concatenate([p.defective for p in parts]),
        norm_a=np.concatenate([p.norm_a for p in parts]),
        cross_norms=np.concatenate([p.cross_norms for p in parts]),
        residual=np.concatenate([p.residual for p in parts]),
    )


def run_sweep(
    scenario: Scenario,
    *,
    tunable: Tunable | None = None,
    value=None,
    workers: int = 1,
) -> SweepResult:
    """Solve the scenario over its sweep grid and track branches.

    Grid points are solved in (optionally parallel) batch; branch
    matching is a sequential left-to-right pass. The result is
    deterministic and independent of the worker count.
    """
    a = scenario.sweep.points()
    m, n = a.shape[0], scenario.n
    batch = _solve_grid(scenario, a, tunable, value, workers)
    rows = np.arange(m)

    # step permutations, vectorized over the grid
    perms = _permutations(n)
    overlap = np.abs(
        np.einsum("mik,mjk->mij", np.conj(batch.vectors[:-1]), batch.vectors[1:])
    )
    dist = np.abs(batch.values[:-1, :, None] - batch.values[1:, None, :])
    any_def = batch.defective.any(axis=1)
    fallback = any_def[:-1] | any_def[1:]
    primary = np.where(fallback[:, None, None], -dist, overlap)
    gather_rows = np.arange(n)[:, None]
    totals = primary[:, gather_rows, perms.T].sum(axis=1)      # (m-1, P)
    ties = dist[:, gather_rows, perms.T].sum(axis=1)
    cand = totals >= totals.max(axis=1, keepdims=True) - MATCH_TIE_TOL
    penalty = np.where(cand, ties, np.inf)
    step_perm = perms[np.argmin(penalty, axis=1)]              # (m-1, n)

    # initial branch labels: levels sorted by (e(a_min), gamma/2, index)
    bare = _bare_diagonal(scenario, a, tunable, value)
    eps0 = bare[0]
    half_widths = -eps0.imag
    level_order = np.lexsort((np.arange(n), half_widths, eps0.real))
    component = np.abs(batch.vectors[0])                       # (spectrum, level)
    proximity = np.abs(batch.values[0][:, None] - eps0[None, :])
    assign = _best_assignment(component.T, proximity.T)        # level -> spectrum idx

    idx = np.empty((m, n), dtype=int)
    idx[0] = assign[level_order]
    for t in range(1, m):
        idx[t] = step_perm[t - 1][idx[t - 1]]

    trajectories = []
    for b in range(n):
        seq = idx[:, b]
        values = batch.values[rows, seq]
        cross = batch.cross_norms[rows[:, None], seq[:, None], idx]
        trajectories.append(
            Trajectory(
                branch_id=b,
                start_level=int(level_order[b]),
                a=a,
                energy=values.real.copy(),
                gamma_half=(-values.imag).copy(),
                vectors=batch.vectors[rows, seq].copy(),
                norm_a=batch.norm_a[rows, seq].copy(),
                cross_norms=cross.copy(),
                defective=batch.defective[rows, seq].copy(),
            )
        )
    return SweepResult(
        scenario=scenario,
        a=a,
        trajectories=tuple(trajectories),
        bare=bare,
        residual=batch.residual.copy(),
    )


# ---------------------------------------------------------------------------
# crossing classification


def _runs(mask: np.ndarray):
    """Maximal runs of True as (start, stop) index pairs, stop inclusive."""
    out = []
    k = 0
    m = mask.shape[0]
    while k < m:
        if mask[k]:
            start = k
            while k + 1 < m and mask[k + 1]:
                k += 1
            out.append((start, k))
        k += 1
    return out


def _end_levels(result: SweepResult) -> np.ndarray:
    """Branch -> nearest unperturbed level assignment at a_max."""
    eps_end = result.bare[-1]
    ends = np.array(
        [t.energy[-1] - 1j * t.gamma_half[-1] for t in result.trajectories]
    )
    cost = np.abs(ends[:, None] - eps_end[None, :])
    return _best_assignment(-cost, cost)


def detect_crossings(result: SweepResult, tol: float = CROSSING_TOL):
    """Classify crossing events between every branch pair.

    true_energy: the energies agree within tol over a sub-interval while
    the widths bifurcate; a_cr marks the largest width split.
    avoided_energy: |E_i - E_j| has a strict three-point local minimum
    above tol, keeps its sign through the surrounding valley, and the
    width curves intersect inside the valley; a_cr marks the minimum.
    coalescence: both branches defective (at/near an exceptional point);
    a_cr marks the smallest eigenvalue gap.
    """
    a = result.a
    trajectories = result.trajectories
    n = len(trajectories)
    start_levels = np.array([t.start_level for t in trajectories])
    end_levels = _end_levels(result)
    events = []

    for i in range(n):
        for j in range(i + 1, n):
            ti, tj = trajectories[i], trajectories[j]
            de = ti.energy - tj.energy
            dg = ti.gamma_half - tj.gamma_half
            gap = np.hypot(de, dg)
            both_def = ti.defective & tj.defective
            exchanged = bool(
                end_levels[i] == start_levels[j]
                and end_levels[j] == start_levels[i]
                and end_levels[i] != start_levels[i]
            )

            for start, stop in _runs(both_def):
                k = start + int(np.argmin(gap[start : stop + 1]))
                if not _mutually_closest(trajectories, i, j, k):
                    continue
                events.append(
                    CrossingReport(
                        kind="coalescence",
                        a_cr=float(a[k]),
                        pair=(i, j),
                        max_width_split=float(np.abs(dg[start : stop + 1]).max()),
                        exchange_detected=exchanged,
                    )
                )

            abs_de = np.abs(de)
            for start, stop in _runs((abs_de < tol) & ~both_def):
                k = start + int(np.argmax(np.abs(dg[start : stop + 1])))
                events.append(
                    CrossingReport(
                        kind="true_energy",
                        a_cr=float(a[k]),
                        pair=(i, j),
                        max_width_split=float(np.abs(dg[start : stop + 1]).max()),
                        exchange_detected=exchanged,
                    )
                )

            for k in range(1, a.shape[0] - 1):
                if not (abs_de[k] < abs_de[k - 1] and abs_de[k] < abs_de[k + 1]):
                    continue
                if abs_de[k] <= tol:
                    continue
                lo = k
                while lo > 0 and abs_de[lo - 1] >= abs_de[lo]:
                    lo -= 1
                hi = k
                while hi < a.shape[0] - 1 and abs_de[hi + 1] >= abs_de[hi]:
                    hi += 1
                dew = de[lo : hi + 1]
                if not ((dew > 0).all() or (dew < 0).all()):
                    continue  # energy difference changes sign: not avoided
                dgw = dg[lo : hi + 1]
                if not (dgw[:-1] * dgw[1:] <= 0).any():
                    continue  # width curves never intersect in the valley
                events.append(
                    CrossingReport(
                        kind="avoided_energy",
                        a_cr=float(a[k]),
                        pair=(i, j),
                        max_width_split=float(np.abs(dgw).max()),
                        exchange_detected=exchanged,
                    )
                )

    events.sort(key=lambda e: (e.a_cr, e.pair))
    return events


def _mutually_closest(trajectories, i, j, k) -> bool:
    values = np.array(
        [t.energy[k] - 1j * t.gamma_half[k] for t in trajectories]
    )
    dist = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(dist, np.inf)
    return int(np.argmin(dist[i])) == j and int(np.argmin(dist[j])) == i
