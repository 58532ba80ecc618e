"""Generator tests: derived counts, determinism, distribution, forcing."""

from __future__ import annotations

import math
from collections import Counter

import pytest
from scipy import stats

from rbcsp.core import conflict_count
from rbcsp.modelrb import (
    PHASE_R,
    ModelRbParams,
    generate,
    generate_forced,
    phase_transition_params,
)

from conftest import enumerate_satisfiable


class TestParams:
    def test_phase_domain_sizes_match_benchmark_names(self):
        # frbX-Y names: X variables, domain size Y
        for n, d in [(30, 15), (40, 19), (45, 21), (50, 23), (53, 24),
                     (56, 25), (59, 26), (100, 40)]:
            assert phase_transition_params(n).d == d

    def test_phase_density_constant(self):
        # 0.8 / (ln 4 - ln 3), evaluated independently
        expected = 0.8 / math.log(4 / 3)
        assert abs(PHASE_R - expected) < 1e-12
        assert abs(PHASE_R - 2.780848) < 1e-6

    def test_derived_counts_n40(self):
        params = phase_transition_params(40)
        assert params.m_constraints == round(PHASE_R * 40 * math.log(40)) == 410
        assert params.forbidden_per_constraint == round(0.25 * 19 * 19) == 90

    def test_derived_counts_n100(self):
        params = phase_transition_params(100)
        assert params.d == 40
        assert params.m_constraints == 1281
        assert params.forbidden_per_constraint == 400

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            phase_transition_params(1)
        with pytest.raises(ValueError):
            ModelRbParams(n=10, p=0.0)
        with pytest.raises(ValueError):
            ModelRbParams(n=10, p=1.0)
        with pytest.raises(ValueError):
            ModelRbParams(n=10, r=-1.0)
        with pytest.raises(ValueError):
            ModelRbParams(n=10, alpha=0.01)  # d would be 1

    def test_from_counts_round_trips(self):
        params = ModelRbParams.from_counts(10, 3, 25, 2)
        assert params.n == 10
        assert (params.d, params.m_constraints, params.forbidden_per_constraint) == (
            3, 25, 2)

    def test_from_counts_rejects_impossible(self):
        with pytest.raises(ValueError):
            ModelRbParams.from_counts(10, 3, 25, 9)  # p == 1


class TestGenerate:
    def test_counts_forced_by_definition(self):
        params = phase_transition_params(10)
        inst = generate(params, seed=42)
        assert inst.n == 10 and inst.d == params.d
        assert inst.num_constraints == params.m_constraints
        for c in inst.constraints:
            assert len(c.disallowed) == params.forbidden_per_constraint
            assert len(set(c.disallowed)) == len(c.disallowed)
            assert c.var_a < c.var_b

    def test_deterministic_per_seed(self):
        params = phase_transition_params(12)
        assert generate(params, seed=7) == generate(params, seed=7)
        assert generate(params, seed=7) != generate(params, seed=8)

    def test_variable_pairs_uniform_chi_square(self):
        # 10^4 constraints at n=10: 45 unordered pairs
        params = ModelRbParams.from_counts(10, 3, 10_000, 2)
        inst = generate(params, seed=123)
        freq = Counter((c.var_a, c.var_b) for c in inst.constraints)
        assert set(freq) <= {(a, b) for a in range(10) for b in range(a + 1, 10)}
        observed = [freq.get((a, b), 0) for a in range(10) for b in range(a + 1, 10)]
        result = stats.chisquare(observed)
        assert result.pvalue > 0.001


class TestGenerateForced:
    def test_hidden_solution_is_conflict_free(self):
        params = phase_transition_params(15)
        for seed in range(5):
            inst, hidden = generate_forced(params, seed=seed)
            assert conflict_count(inst, hidden) == 0

    def test_structure_identical_to_unforced(self):
        params = phase_transition_params(12)
        forced, _ = generate_forced(params, seed=3)
        plain = generate(params, seed=3)
        assert forced.num_constraints == plain.num_constraints
        for c in forced.constraints:
            assert len(c.disallowed) == params.forbidden_per_constraint

    def test_small_instances_satisfiable_by_enumeration(self):
        # n=6 at alpha giving d=4, modest density
        params = ModelRbParams.from_counts(6, 4, 8, 4)
        for seed in range(10):
            inst, hidden = generate_forced(params, seed=seed)
            assert conflict_count(inst, hidden) == 0
            assert enumerate_satisfiable(inst)

    def test_deterministic_per_seed(self):
        params = phase_transition_params(12)
        inst_a, hid_a = generate_forced(params, seed=11)
        inst_b, hid_b = generate_forced(params, seed=11)
        assert inst_a == inst_b and hid_a.as_list() == hid_b.as_list()
