"""Model RB random binary CSP generation, including forced-satisfiable instances.

Model RB draws r·n·ln(n) variable pairs with replacement and, independently
per constraint, disallows a fraction p of the d² value pairs (drawn without
replacement).  With domain size d = n^0.8, r = 0.8/(ln 4 − ln 3) and p = 0.25
the instances sit at the satisfiability phase transition, which is where the
frbX-Y benchmark family lives (X variables, domain size Y).

All randomness flows through numpy's PCG64 so that (params, seed) pins the
generated instance byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Assignment, Constraint, CspInstance

PHASE_ALPHA = 0.8
PHASE_R = 0.8 / (math.log(4) - math.log(3))
PHASE_P = 0.25


def _round_half_away(x: float) -> int:
    """Nearest integer, halves away from zero (positive inputs only here)."""
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class ModelRbParams:
    """Generator parameters (n, alpha, r, p) with the derived integer counts.

    d = round(n^alpha), m_constraints = round(r·n·ln n), and
    forbidden_per_constraint = round(p·d²), rounding half away from zero.
    """

    n: int
    alpha: float = PHASE_ALPHA
    r: float = PHASE_R
    p: float = PHASE_P

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"need 0 < p < 1, got {self.p}")
        if self.r <= 0.0:
            raise ValueError(f"need r > 0, got {self.r}")
        if self.d < 2:
            raise ValueError(f"derived domain size {self.d} < 2 (n={self.n}, "
                             f"alpha={self.alpha})")
        if self.forbidden_per_constraint < 1:
            raise ValueError("derived forbidden-pair count is zero; raise p")
        if self.forbidden_per_constraint >= self.d * self.d:
            raise ValueError("every value pair would be disallowed; lower p")
        if self.m_constraints < 1:
            raise ValueError("derived constraint count is zero; raise r")

    @property
    def d(self) -> int:
        return _round_half_away(self.n ** self.alpha)

    @property
    def m_constraints(self) -> int:
        return _round_half_away(self.r * self.n * math.log(self.n))

    @property
    def forbidden_per_constraint(self) -> int:
        return _round_half_away(self.p * self.d * self.d)

    @classmethod
    def from_counts(cls, n: int, d: int, m_constraints: int,
                    forbidden_per_constraint: int) -> "ModelRbParams":
        """Back out (alpha, r, p) from explicit integer counts."""
        if n < 2 or d < 2:
            raise ValueError(f"need n >= 2 and d >= 2, got n={n}, d={d}")
        params = cls(
            n=n,
            alpha=math.log(d) / math.log(n),
            r=m_constraints / (n * math.log(n)),
            p=forbidden_per_constraint / (d * d),
        )
        got = (params.d, params.m_constraints, params.forbidden_per_constraint)
        if got != (d, m_constraints, forbidden_per_constraint):
            raise ValueError(f"counts {got} do not round-trip "
                             f"({d}, {m_constraints}, {forbidden_per_constraint})")
        return params


def phase_transition_params(n: int) -> ModelRbParams:
    """Parameters putting an n-variable instance at the phase transition."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return ModelRbParams(n=n, alpha=PHASE_ALPHA, r=PHASE_R, p=PHASE_P)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _draw_pair(rng: np.random.Generator, n: int) -> tuple[int, int]:
    """One unordered distinct variable pair, uniform over all n(n-1)/2."""
    a = int(rng.integers(n))
    b = int(rng.integers(n - 1))
    if b >= a:
        b += 1
    return (a, b) if a < b else (b, a)


def _draw_disallowed(rng: np.random.Generator, d: int, q: int) -> np.ndarray:
    """q distinct value-pair codes out of d², without replacement."""
    return rng.permutation(d * d)[:q]


def generate(params: ModelRbParams, seed: int) -> CspInstance:
    """Sample a Model RB instance. Deterministic in (params, seed)."""
    rng = _rng(seed)
    d, q = params.d, params.forbidden_per_constraint
    constraints = []
    for _ in range(params.m_constraints):
        a, b = _draw_pair(rng, params.n)
        codes = _draw_disallowed(rng, d, q)
        constraints.append(Constraint(a, b, tuple(zip(
            (codes // d).tolist(), (codes % d).tolist()))))
    return CspInstance(params.n, d, tuple(constraints))


def generate_forced(params: ModelRbParams, seed: int) -> tuple[CspInstance, Assignment]:
    """Sample a forced-satisfiable instance plus its hidden solution.

    A uniform hidden assignment is drawn first; any constraint whose
    disallowed set hits the hidden solution's value pair is rejected and its
    disallowed set fully redrawn (keeping the variable pair), so the hidden
    assignment ends up conflict-free by construction.
    """
    rng = _rng(seed)
    d, q = params.d, params.forbidden_per_constraint
    hidden = rng.integers(0, d, size=params.n)
    constraints = []
    for _ in range(params.m_constraints):
        a, b = _draw_pair(rng, params.n)
        hidden_code = int(hidden[a]) * d + int(hidden[b])
        while True:
            codes = _draw_disallowed(rng, d, q)
            if not (codes == hidden_code).any():
                break
        constraints.append(Constraint(a, b, tuple(zip(
            (codes // d).tolist(), (codes % d).tolist()))))
    instance = CspInstance(params.n, d, tuple(constraints))
    return instance, Assignment.from_values(hidden.tolist())
