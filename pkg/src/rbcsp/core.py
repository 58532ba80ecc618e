"""Binary CSP instances and search state with incremental conflict accounting.

An instance is a set of variables with a shared domain size plus an ordered
list of binary constraints, each given by its two endpoint variables and the
set of value pairs it disallows.  Duplicate constraints over the same variable
pair are kept and counted separately.

The search state keeps the violated-constraint set exactly up to date across
single-variable changes.  Per variable, the disallowed relations of all
incident constraints are stacked into one contiguous uint8 table so that the
conflict deltas for every candidate value come out of a single row gather and
column sum instead of a per-value rescan.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np


class CspFormatError(ValueError):
    """Malformed native CSP text."""


@dataclass(frozen=True)
class Constraint:
    """A binary constraint: the value pairs `disallowed` for (var_a, var_b).

    Pairs are oriented: (value_a, value_b) refers to var_a's and var_b's
    values in that order.  Pairs are normalized to a sorted tuple so equal
    constraints compare and hash equal.
    """

    var_a: int
    var_b: int
    disallowed: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.var_a == self.var_b:
            raise ValueError(f"constraint endpoints must differ, got {self.var_a}")
        pairs = tuple(sorted((int(a), int(b)) for a, b in self.disallowed))
        if not pairs:
            raise ValueError("constraint must disallow at least one value pair")
        if len(set(pairs)) != len(pairs):
            raise ValueError("disallowed value pairs must be distinct")
        object.__setattr__(self, "disallowed", pairs)

    @cached_property
    def pair_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.disallowed)

    def violates(self, value_a: int, value_b: int) -> bool:
        return (value_a, value_b) in self.pair_set

    def matrix(self, d: int) -> np.ndarray:
        """uint8 (d, d) table, entry [value_a, value_b] == 1 iff disallowed."""
        m = np.zeros((d, d), dtype=np.uint8)
        pa = np.fromiter((p[0] for p in self.disallowed), dtype=np.int64)
        pb = np.fromiter((p[1] for p in self.disallowed), dtype=np.int64)
        m[pa, pb] = 1
        return m


@dataclass(frozen=True)
class CspInstance:
    """n variables over the common domain {0..d-1} plus binary constraints.

    Immutable after construction and safe to share across concurrent runs.
    The constraint list is ordered; duplicates are legal and each occurrence
    counts separately toward conflict totals.
    """

    n: int
    d: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.n < 1:
            raise ValueError(f"need at least one variable, got n={self.n}")
        if self.d < 1:
            raise ValueError(f"need a nonempty domain, got d={self.d}")
        for c in self.constraints:
            if not (0 <= c.var_a < self.n and 0 <= c.var_b < self.n):
                raise ValueError(
                    f"constraint ({c.var_a},{c.var_b}) references a variable "
                    f"outside [0,{self.n})"
                )
            for va, vb in c.disallowed:
                if not (0 <= va < self.d and 0 <= vb < self.d):
                    raise ValueError(
                        f"disallowed pair ({va},{vb}) outside domain [0,{self.d})²"
                    )

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @cached_property
    def _tables(self) -> "_Tables":
        return _Tables(self)

    def __getstate__(self):
        # drop the cached runtime tables; they are rebuilt on demand
        return {"n": self.n, "d": self.d, "constraints": self.constraints}

    def __setstate__(self, state):
        for key, value in state.items():
            object.__setattr__(self, key, value)


class Assignment:
    """Variable values plus per-variable initialized flags.

    The flags only matter while an assignment is being built up one variable
    at a time; constraints never conflict through an uninitialized endpoint.
    """

    __slots__ = ("values", "initialized")

    def __init__(self, values: np.ndarray, initialized: np.ndarray):
        self.values = values
        self.initialized = initialized

    @classmethod
    def empty(cls, n: int) -> "Assignment":
        return cls(np.zeros(n, dtype=np.int64), np.zeros(n, dtype=bool))

    @classmethod
    def from_values(cls, values: Sequence[int]) -> "Assignment":
        arr = np.asarray(list(values), dtype=np.int64)
        return cls(arr, np.ones(len(arr), dtype=bool))

    def __len__(self) -> int:
        return len(self.values)

    def set(self, var: int, value: int) -> None:
        self.values[var] = value
        self.initialized[var] = True

    @property
    def is_complete(self) -> bool:
        return bool(self.initialized.all())

    def copy(self) -> "Assignment":
        return Assignment(self.values.copy(), self.initialized.copy())

    def as_list(self) -> list[int]:
        return [int(v) for v in self.values]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return bool(
            np.array_equal(self.values, other.values)
            and np.array_equal(self.initialized, other.initialized)
        )


def conflict_count(instance: CspInstance, assignment: Assignment) -> int:
    """Number of violated constraints, duplicates counted separately.

    Constraints with an uninitialized endpoint never conflict.  Raises
    ValueError if an initialized value lies outside [0, d).
    """
    vals = assignment.values
    init = assignment.initialized
    if len(vals) != instance.n:
        raise ValueError(f"assignment length {len(vals)} != n={instance.n}")
    live = vals[init]
    if live.size and (live.min() < 0 or live.max() >= instance.d):
        raise ValueError(f"assignment value outside domain [0,{instance.d})")
    total = 0
    for c in instance.constraints:
        if init[c.var_a] and init[c.var_b]:
            if (int(vals[c.var_a]), int(vals[c.var_b])) in c.pair_set:
                total += 1
    return total


class ViolatedIndex:
    """Set of constraint ids with O(1) add/discard/membership and O(1) pick.

    Backed by a dense list plus a position map (swap-remove on discard), so a
    uniform random member is just `ids[int(u * len)]`.
    """

    __slots__ = ("ids", "pos")

    def __init__(self, num_constraints: int):
        self.ids: list[int] = []
        self.pos: list[int] = [-1] * num_constraints

    def add(self, cid: int) -> None:
        if self.pos[cid] < 0:
            self.pos[cid] = len(self.ids)
            self.ids.append(cid)

    def discard(self, cid: int) -> None:
        p = self.pos[cid]
        if p < 0:
            return
        last = self.ids[-1]
        self.ids[p] = last
        self.pos[last] = p
        self.ids.pop()
        self.pos[cid] = -1

    def pick(self, u: float) -> int:
        """Uniform member for u drawn from [0, 1)."""
        return self.ids[int(u * len(self.ids))]

    def __contains__(self, cid: int) -> bool:
        return self.pos[cid] >= 0

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ids)

    def as_set(self) -> set[int]:
        return set(self.ids)


class _Tables:
    """Static per-instance lookup structures shared by all search states.

    rows[v] packs the incident constraints of v into one uint8 array of shape
    (k_v * d, d): row (slot*d + w) holds, for each candidate value u of v, the
    violation flag when the other endpoint of that slot's constraint holds w.
    """

    __slots__ = (
        "n", "d", "con_a", "con_b", "pair_sets", "adj",
        "inc_ids", "other_idx", "rows", "base",
    )

    def __init__(self, instance: CspInstance):
        n, d = instance.n, instance.d
        self.n = n
        self.d = d
        self.con_a = [c.var_a for c in instance.constraints]
        self.con_b = [c.var_b for c in instance.constraints]
        self.pair_sets = [c.pair_set for c in instance.constraints]
        # (cid, other_var, var_is_a) per incidence
        self.adj: list[list[tuple[int, int, bool]]] = [[] for _ in range(n)]
        for cid, c in enumerate(instance.constraints):
            self.adj[c.var_a].append((cid, c.var_b, True))
            self.adj[c.var_b].append((cid, c.var_a, False))

        self.inc_ids: list[list[int]] = []
        self.other_idx: list[np.ndarray] = []
        self.rows: list[np.ndarray] = []
        self.base: list[np.ndarray] = []
        mats = [c.matrix(d) for c in instance.constraints]
        for v in range(n):
            entries = self.adj[v]
            self.inc_ids.append([cid for cid, _, _ in entries])
            self.other_idx.append(
                np.fromiter((o for _, o, _ in entries), dtype=np.int64,
                            count=len(entries))
            )
            if entries:
                # oriented so axis meanings are [other value w, own value u]
                blocks = [mats[cid].T if is_a else mats[cid]
                          for cid, _, is_a in entries]
                stacked = np.ascontiguousarray(np.stack(blocks))
                self.rows.append(stacked.reshape(len(entries) * d, d))
            else:
                self.rows.append(np.zeros((0, d), dtype=np.uint8))
            self.base.append(np.arange(len(entries), dtype=np.int64) * d)


class SearchState:
    """Mutable single-threaded search state over a fixed instance.

    Tracks the current assignment, per-variable change timestamps, the
    iteration counter, and the exact set of violated constraint ids.
    """

    __slots__ = ("instance", "x", "t", "n_iter", "violated", "_tb", "_xl")

    def __init__(self, instance: CspInstance, assignment: Assignment):
        if not assignment.is_complete:
            raise ValueError("search state requires a fully initialized assignment")
        vals = np.asarray(assignment.values, dtype=np.int64)
        if vals.min() < 0 or vals.max() >= instance.d:
            raise ValueError(f"assignment value outside domain [0,{instance.d})")
        self.instance = instance
        self._tb = instance._tables
        self.x = vals.copy()
        self._xl = self.x.tolist()  # plain-int mirror for scalar reads
        self.t = [0] * instance.n
        self.n_iter = 0
        self.violated = ViolatedIndex(instance.num_constraints)
        tb = self._tb
        xl = self._xl
        for cid in range(instance.num_constraints):
            if (xl[tb.con_a[cid]], xl[tb.con_b[cid]]) in tb.pair_sets[cid]:
                self.violated.add(cid)

    # -- queries ------------------------------------------------------------

    @property
    def num_conflicts(self) -> int:
        return len(self.violated)

    def violated_ids(self) -> list[int]:
        return list(self.violated.ids)

    def as_assignment(self) -> Assignment:
        return Assignment.from_values(self.x)

    def values_tuple(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.x)

    def delta_conflicts(self, var: int, value: int) -> int:
        """Total-conflict change if x[var] were set to `value` (0 for a no-op).

        One pass over the constraints incident to var.
        """
        self._check_var_value(var, value)
        old = self._xl[var]
        if value == old:
            return 0
        delta = 0
        x = self._xl
        for cid, other, is_a in self._tb.adj[var]:
            w = x[other]
            s = self._tb.pair_sets[cid]
            if is_a:
                delta += ((value, w) in s) - ((old, w) in s)
            else:
                delta += ((w, value) in s) - ((w, old) in s)
        return delta

    def evaluate_all_values(self, var: int) -> np.ndarray:
        """Conflict deltas for every candidate value of var, as one vector.

        Entry u equals delta_conflicts(var, u); the entry at the current value
        is 0.  Computed by a single gather over the incident-constraint table,
        never by per-value rescans.
        """
        if not (0 <= var < self.instance.n):
            raise ValueError(f"variable {var} outside [0,{self.instance.n})")
        counts, cur, _ = self._counts_cols(var)
        return counts - cur

    def _counts_cols(self, var: int):
        """(counts, current, cols) for var.

        counts[u] = violated incident constraints if x[var] were u;
        cols[slot, u] = that slot's violation flag under value u.
        """
        tb = self._tb
        oi = tb.other_idx[var]
        if oi.size == 0:
            counts = np.zeros(tb.d, dtype=np.int32)
            return counts, 0, np.zeros((0, tb.d), dtype=np.uint8)
        rows = tb.base[var] + self.x.take(oi)
        cols = tb.rows[var].take(rows, axis=0)
        counts = np.add.reduce(cols, axis=0, dtype=np.int32)
        return counts, int(counts[self._xl[var]]), cols

    # -- mutation -----------------------------------------------------------

    def apply_change(self, var: int, value: int) -> None:
        """Set x[var] to a new value, bumping the clock and the timestamp.

        The violated set is updated incrementally and stays exactly equal to
        a from-scratch recount.  `value` must differ from the current value.
        """
        self._check_var_value(var, value)
        old = self._xl[var]
        if value == old:
            raise ValueError(
                f"variable {var} must change to a value different from {old}"
            )
        x = self._xl
        violated = self.violated
        for cid, other, is_a in self._tb.adj[var]:
            w = x[other]
            s = self._tb.pair_sets[cid]
            if is_a:
                was = (old, w) in s
                now = (value, w) in s
            else:
                was = (w, old) in s
                now = (w, value) in s
            if was != now:
                if now:
                    violated.add(cid)
                else:
                    violated.discard(cid)
        self._commit(var, value)

    def _apply_with_cols(self, var: int, value: int, cols: np.ndarray) -> None:
        """Hot-path variant of apply_change reusing the evaluation gather."""
        old = self._xl[var]
        new_col = cols[:, value]
        changed = (new_col != cols[:, old]).nonzero()[0]
        if changed.size:
            ids = self._tb.inc_ids[var]
            violated = self.violated
            for li in changed.tolist():
                if new_col[li]:
                    violated.add(ids[li])
                else:
                    violated.discard(ids[li])
        self._commit(var, value)

    def _commit(self, var: int, value: int) -> None:
        self.x[var] = value
        self._xl[var] = value
        self.n_iter += 1
        self.t[var] = self.n_iter

    def _check_var_value(self, var: int, value: int) -> None:
        if not (0 <= var < self.instance.n):
            raise ValueError(f"variable {var} outside [0,{self.instance.n})")
        if not (0 <= value < self.instance.d):
            raise ValueError(f"value {value} outside domain [0,{self.instance.d})")


# -- native text format -----------------------------------------------------
#
#   p bcsp <n> <d> <m>
#   k <var_a> <var_b> <npairs>     followed by npairs lines
#   f <value_a> <value_b>
#   s <v_1> ... <v_n>              optional recorded solution
#   c ...                          comments anywhere
#
# All indices 0-based, whitespace-separated.


def dumps_csp(
    instance: CspInstance,
    solution: Optional[Assignment] = None,
    comments: Iterable[str] = (),
) -> str:
    lines = [f"c {text}" for text in comments]
    lines.append(f"p bcsp {instance.n} {instance.d} {instance.num_constraints}")
    for c in instance.constraints:
        lines.append(f"k {c.var_a} {c.var_b} {len(c.disallowed)}")
        for va, vb in c.disallowed:
            lines.append(f"f {va} {vb}")
    if solution is not None:
        if not solution.is_complete or len(solution) != instance.n:
            raise ValueError("recorded solution must assign every variable")
        lines.append("s " + " ".join(str(int(v)) for v in solution.values))
    return "\n".join(lines) + "\n"


def loads_csp(text: str) -> tuple[CspInstance, Optional[Assignment]]:
    """Parse the native CSP text format.

    Returns the instance plus the recorded solution if an `s` line is present.
    Raises CspFormatError with a line number on malformed input.
    """
    header: Optional[tuple[int, int, int]] = None
    constraints: list[Constraint] = []
    solution: Optional[list[int]] = None
    pending: Optional[tuple[int, int, int, list[tuple[int, int]]]] = None

    def fail(lineno: int, msg: str) -> CspFormatError:
        return CspFormatError(f"line {lineno}: {msg}")

    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split()
        if not fields or fields[0] == "c":
            continue
        tag = fields[0]
        if tag == "p":
            if header is not None:
                raise fail(lineno, "duplicate header")
            if len(fields) != 5 or fields[1] != "bcsp":
                raise fail(lineno, f"expected 'p bcsp <n> <d> <m>', got {raw!r}")
            try:
                n, d, m = (int(f) for f in fields[2:])
            except ValueError:
                raise fail(lineno, f"non-integer header field in {raw!r}") from None
            header = (n, d, m)
            continue
        if header is None:
            raise fail(lineno, f"'{tag}' line before 'p bcsp' header")
        if tag == "k":
            if pending is not None:
                # a finished block clears `pending`, so reaching here means short
                raise fail(lineno, f"constraint expected {pending[2]} 'f' lines, "
                                   f"got {len(pending[3])}")
            if len(fields) != 4:
                raise fail(lineno, f"expected 'k <var_a> <var_b> <npairs>', got {raw!r}")
            try:
                a, b, npairs = (int(f) for f in fields[1:])
            except ValueError:
                raise fail(lineno, f"non-integer field in {raw!r}") from None
            if npairs < 1:
                raise fail(lineno, "constraint must disallow at least one pair")
            pending = (a, b, npairs, [])
        elif tag == "f":
            if pending is None:
                raise fail(lineno, "'f' line outside a constraint block")
            if len(fields) != 3:
                raise fail(lineno, f"expected 'f <value_a> <value_b>', got {raw!r}")
            try:
                va, vb = int(fields[1]), int(fields[2])
            except ValueError:
                raise fail(lineno, f"non-integer field in {raw!r}") from None
            pending[3].append((va, vb))
            if len(pending[3]) == pending[2]:
                constraints.append(_finish_constraint(pending, lineno, fail))
                pending = None
        elif tag == "s":
            if solution is not None:
                raise fail(lineno, "duplicate 's' line")
            try:
                solution = [int(f) for f in fields[1:]]
            except ValueError:
                raise fail(lineno, f"non-integer field in {raw!r}") from None
            if len(solution) != header[0]:
                raise fail(lineno, f"'s' line has {len(solution)} values, "
                                   f"expected {header[0]}")
        else:
            raise fail(lineno, f"unknown line tag {tag!r}")

    if header is None:
        raise CspFormatError("missing 'p bcsp' header")
    if pending is not None:
        raise CspFormatError(
            f"constraint expected {pending[2]} 'f' lines, got {len(pending[3])}"
        )
    n, d, m = header
    if len(constraints) != m:
        raise CspFormatError(f"header declares {m} constraints, found {len(constraints)}")
    try:
        instance = CspInstance(n, d, tuple(constraints))
    except ValueError as exc:
        raise CspFormatError(str(exc)) from None
    asg: Optional[Assignment] = None
    if solution is not None:
        if any(not (0 <= v < d) for v in solution):
            raise CspFormatError(f"'s' value outside domain [0,{d})")
        asg = Assignment.from_values(solution)
    return instance, asg


def _finish_constraint(pending, lineno, fail) -> Constraint:
    a, b, npairs, pairs = pending
    if len(pairs) != npairs:
        raise fail(lineno, f"constraint expected {npairs} 'f' lines, got {len(pairs)}")
    try:
        return Constraint(a, b, tuple(pairs))
    except ValueError as exc:
        raise fail(lineno, str(exc)) from None
