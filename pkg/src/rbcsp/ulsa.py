"""ULSA: unweighted stochastic local search for random binary CSPs.

Each iteration picks a violated constraint uniformly at random, prefers its
older-timestamped endpoint, and reassigns one endpoint to a conflict-
minimizing value, always a *different* value, even when that worsens the
total.  When the preferred endpoint cannot change without increasing
conflicts and the other endpoint was not the variable changed last iteration,
the candidate set expands to both endpoints ("neighborhood expansion").  No
weights or penalties are maintained; occasional forced worsening moves are
what gets the search out of local optima.

The per-iteration work is one or two stacked-table gathers from the core
search state plus O(1) bookkeeping, so runs at benchmark scale stream through
millions of iterations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import Assignment, CspInstance, SearchState, conflict_count
from .target import TargetSpec, check_target, subset_conflicts

_MASK = 1 << 30  # bigger than any conflict count; hides the current value


@dataclass
class StepStats:
    """Counters over applied iterations.

    expansions: iterations whose candidate set grew to both endpoints.
    worsening: iterations whose applied change strictly increased conflicts.
    """

    iterations: int = 0
    expansions: int = 0
    worsening: int = 0

    @property
    def expansion_rate(self) -> float:
        return self.expansions / self.iterations if self.iterations else 0.0

    @property
    def worsening_rate(self) -> float:
        return self.worsening / self.iterations if self.iterations else 0.0

    def merge(self, other: "StepStats") -> None:
        self.iterations += other.iterations
        self.expansions += other.expansions
        self.worsening += other.worsening


@dataclass(frozen=True)
class UlsaConfig:
    """Run configuration.

    max_iterations: total step budget across restarts; 0 means unbounded.
    target: optional partial-solution spec checked whenever the current
        conflict count is at or below its cap.
    restart_interval: reinitialize from scratch every this many iterations.
    stats_enabled: include step counters in the run record.
    """

    max_iterations: int = 0
    target: Optional[TargetSpec] = None
    restart_interval: Optional[int] = None
    stats_enabled: bool = True

    def __post_init__(self) -> None:
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations must be >= 0, got {self.max_iterations}")
        if self.restart_interval is not None and self.restart_interval <= 0:
            raise ValueError(f"restart_interval must be positive, "
                             f"got {self.restart_interval}")


@dataclass
class RunRecord:
    """Outcome of a single run.

    On success, `assignment` holds the final full assignment and, for target
    runs, `subset` the sorted conflict-free variable subset.  When best-state
    tracking is on, `best_assignment`/`best_violated` snapshot the lowest-
    conflict state seen.
    """

    seed: int
    iterations: int
    wall_time: float
    success: bool
    best_conflicts: int
    stats: Optional[StepStats] = None
    assignment: Optional[list[int]] = None
    subset: Optional[list[int]] = None
    restarts: int = 0
    best_assignment: Optional[list[int]] = field(default=None, repr=False)
    best_violated: Optional[list[int]] = field(default=None, repr=False)


def init_state(instance: CspInstance, rng: np.random.Generator) -> SearchState:
    """Greedy randomized initialization.

    Variables are visited in a uniformly random permutation; each is set to a
    value minimizing conflicts against the already-initialized variables
    only, ties broken uniformly at random.  Timestamps start at 0 with the
    iteration counter, so nothing counts as "changed" yet.
    """
    tb = instance._tables
    d = instance.d
    values = np.zeros(instance.n, dtype=np.int64)
    initialized = np.zeros(instance.n, dtype=bool)
    for v in rng.permutation(instance.n).tolist():
        entries = tb.adj[v]
        counts = np.zeros(d, dtype=np.int32)
        table = tb.rows[v]
        for slot, (_, other, _) in enumerate(entries):
            if initialized[other]:
                counts += table[slot * d + int(values[other])]
        best = counts.min()
        cands = np.flatnonzero(counts == best)
        values[v] = int(cands[int(rng.random() * len(cands))])
        initialized[v] = True
    return SearchState(instance, Assignment(values, initialized))


def can_change_without_increase(state: SearchState, var: int) -> bool:
    """True iff some other value of var keeps the total conflict count level
    or lowers it."""
    counts, cur, _ = state._counts_cols(var)
    counts[int(state.x[var])] = _MASK
    return bool(counts.min() <= cur)


def step(state: SearchState, rng: np.random.Generator,
         stats: Optional[StepStats] = None) -> None:
    """Apply one search iteration to `state`. Requires at least one conflict."""
    if len(state.violated) == 0:
        raise ValueError("step requires at least one violated constraint")
    if state.instance.d < 2:
        raise ValueError("domain size 1 leaves no alternative value to move to")
    _step(state, rng.random, stats)


def _step(state: SearchState, draw: Callable[[], float],
          stats: Optional[StepStats]) -> None:
    tb = state._tb
    ids = state.violated.ids
    cid = ids[int(draw() * len(ids))]
    a, b = tb.con_a[cid], tb.con_b[cid]
    t = state.t
    if t[a] < t[b]:
        i, j = a, b
    elif t[b] < t[a]:
        i, j = b, a
    else:
        i, j = (a, b) if draw() < 0.5 else (b, a)

    counts_i, cur_i, cols_i = state._counts_cols(i)
    ci = counts_i.tolist()
    ci[state._xl[i]] = _MASK
    min_i = min(ci)

    expanded = min_i > cur_i and t[j] != state.n_iter
    if not expanded:
        cands = [u for u, c in enumerate(ci) if c == min_i]
        var = i
        value = cands[int(draw() * len(cands))]
        cols = cols_i
        applied_delta = min_i - cur_i
    else:
        counts_j, cur_j, cols_j = state._counts_cols(j)
        cj = counts_j.tolist()
        cj[state._xl[j]] = _MASK
        min_j = min(cj)
        delta_i = min_i - cur_i
        delta_j = min_j - cur_j
        applied_delta = delta_i if delta_i < delta_j else delta_j
        cands_i = ([u for u, c in enumerate(ci) if c == min_i]
                   if delta_i == applied_delta else [])
        cands_j = ([u for u, c in enumerate(cj) if c == min_j]
                   if delta_j == applied_delta else [])
        ni = len(cands_i)
        r = int(draw() * (ni + len(cands_j)))
        if r < ni:
            var, value, cols = i, cands_i[r], cols_i
        else:
            var, value, cols = j, cands_j[r - ni], cols_j

    state._apply_with_cols(var, value, cols)
    if stats is not None:
        stats.iterations += 1
        if expanded:
            stats.expansions += 1
        if applied_delta > 0:
            stats.worsening += 1


def run(instance: CspInstance, config: UlsaConfig, seed: int,
        track_best: bool = False) -> RunRecord:
    """Run to a full solution, a met target, or budget exhaustion.

    The run owns a fresh PCG64 stream seeded with `seed`; identical
    (instance, config, seed) reproduce the identical trajectory.  A
    configured target is checked at every state whose conflict count is at
    or below its cap, which keeps the check off the hot path.  Budget
    exhaustion is a non-success outcome, not an error.
    """
    target = config.target
    if target is not None:
        target.removal_budget(instance.n)  # validates size <= n
    if instance.d < 2 and instance.num_constraints:
        # every constraint must disallow (0,0), so a conflict can never be fixed
        raise ValueError("domain size 1 leaves no alternative value to move to")
    rng = np.random.Generator(np.random.PCG64(seed))
    start = time.perf_counter()
    stats = StepStats()
    state = init_state(instance, rng)

    # block-buffered uniforms; same value sequence as repeated rng.random()
    buf = rng.random(4096).tolist()
    pos = 0

    def draw() -> float:
        nonlocal buf, pos
        if pos == 4096:
            buf = rng.random(4096).tolist()
            pos = 0
        value = buf[pos]
        pos += 1
        return value

    budget = config.max_iterations
    interval = config.restart_interval
    iters = 0
    since_restart = 0
    restarts = 0
    best = state.num_conflicts
    best_assignment = state.values_tuple() if track_best else None
    best_violated = sorted(state.violated.ids) if track_best else None
    success = False
    subset: Optional[list[int]] = None

    cap = target.conflict_cap if target is not None else -1
    viol_ids = state.violated.ids
    while True:
        conflicts = len(viol_ids)
        if conflicts < best:
            best = conflicts
            if track_best:
                best_assignment = state.values_tuple()
                best_violated = sorted(viol_ids)
        if conflicts == 0:
            success = True
            break
        if conflicts <= cap:
            found = check_target(state, target)
            if found is not None:
                success = True
                subset = found
                break
        if budget and iters >= budget:
            break
        if interval is not None and since_restart >= interval:
            state = init_state(instance, rng)
            viol_ids = state.violated.ids
            since_restart = 0
            restarts += 1
            continue
        _step(state, draw, stats)
        iters += 1
        since_restart += 1

    wall = time.perf_counter() - start
    assignment: Optional[list[int]] = None
    if success:
        assignment = [int(v) for v in state.x]
        if subset is None:
            if conflict_count(instance, state.as_assignment()) != 0:
                raise AssertionError("success witness fails the full recount")
        elif subset_conflicts(instance, assignment, subset) != 0:
            raise AssertionError("target witness fails the subset recount")
    return RunRecord(
        seed=seed,
        iterations=iters,
        wall_time=wall,
        success=success,
        best_conflicts=best,
        stats=stats if config.stats_enabled else None,
        assignment=assignment,
        subset=subset,
        restarts=restarts,
        best_assignment=list(best_assignment) if best_assignment is not None else None,
        best_violated=best_violated,
    )
