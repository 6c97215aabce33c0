#!/usr/bin/env python3
"""
Tests for states, the epistemic relation and the explicit-state checker
"""

import sys
from pathlib import Path

import pytest
from hypothesis import given, settings

sys.path.insert(0, str(Path(__file__).parent.parent))

from belief_semantics import (
    ContextLabeller, State, UniversalContext, VocabularyProfile, check_direct, enumerate_context,
    epistemic_related, expand_state, sat0,
)
from checker_errors import EnumerationCapExceeded, FormulaError
from logic_core import (
    BOTTOM, TOP, And, AtLeast, AtMost, Atom, Expand, ExplicitBelief, Implies, Not, Only, Or,
)
from tests.strategies import instances

p, q = Atom("p"), Atom("q")


@pytest.fixture
def small_context():
    """Γ_1 = {p}, Γ_2 = {}, atoms {p}: four states"""
    return UniversalContext(VocabularyProfile({1: [p], 2: []}), ("p",), (1, 2))


@pytest.mark.unit
class TestState:
    """Test State"""

    def test_bases_frozen(self):
        state = State({1: {p}}, {"p"})
        assert state.base(1) == frozenset({p})
        assert state.base(2) == frozenset()
        with pytest.raises(TypeError):
            state.bases[1] = frozenset()

    def test_hash_and_equality(self):
        assert State({1: [p, q]}, ["q"]) == State({1: {q, p}}, {"q"})
        assert len({State({1: [p]}), State({1: {p}})}) == 1

    def test_expand_state(self):
        state = State({1: set(), 2: {q}})
        expanded = expand_state(state, 1, Or(p, q))
        assert expanded.base(1) == {Or(p, q)}
        assert expanded.base(2) == {q}
        assert state.base(1) == frozenset()

    def test_expand_rejects_modal_info(self):
        with pytest.raises(FormulaError):
            expand_state(State({1: set()}), 1, AtLeast(1, p))


@pytest.mark.unit
class TestSat0:
    """Test sat0"""

    def test_atoms_and_constants(self):
        state = State({1: set()}, {"p"})
        assert sat0(state, p)
        assert not sat0(state, q)
        assert sat0(state, TOP)
        assert not sat0(state, BOTTOM)

    def test_connectives(self):
        state = State({1: set()}, {"p"})
        assert sat0(state, Implies(q, p))
        assert not sat0(state, And(p, q))
        assert sat0(state, Not(And(p, q)))

    def test_explicit_belief_is_membership(self):
        state = State({1: {Or(p, q)}}, set())
        assert sat0(state, ExplicitBelief(1, Or(p, q)))
        assert not sat0(state, ExplicitBelief(1, Or(q, p)))
        assert not sat0(state, ExplicitBelief(2, Or(p, q)))

    def test_rejects_modal_formula(self):
        with pytest.raises(FormulaError):
            sat0(State({1: set()}), AtLeast(1, p))


@pytest.mark.unit
class TestEpistemicRelation:
    """Test epistemic_related"""

    def test_empty_base_relates_everything(self):
        assert epistemic_related(State({1: set()}), State({1: {p}}, {"q"}), 1)

    def test_base_constrains(self):
        source = State({1: {p}})
        assert epistemic_related(source, State({1: set()}, {"p"}), 1)
        assert not epistemic_related(source, State({1: set()}), 1)

    def test_relation_per_agent(self):
        source = State({1: {p}, 2: set()})
        assert epistemic_related(source, State({}), 2)


@pytest.mark.unit
class TestUniversalContext:
    """Test the context and its enumeration"""

    def test_four_states(self, small_context):
        states = list(enumerate_context(small_context))
        assert len(states) == 4
        assert len(set(states)) == 4
        assert all(state.base(2) == frozenset() for state in states)

    def test_bit_layout(self, small_context):
        assert small_context.bit_width == 2
        assert small_context.variables == [("atom", "p"), ("belief", 1, p)]
        assert small_context.state_at(0b10) == State({1: set(), 2: set()}, {"p"})
        assert small_context.state_at(0b01) == State({1: {p}, 2: set()}, set())

    def test_related_count(self, small_context):
        """Two context states satisfy p"""
        state = State({1: {p}, 2: set()})
        related = [other for other in enumerate_context(small_context) if epistemic_related(state, other, 1)]
        assert len(related) == 2
        labeller = ContextLabeller(small_context)
        assert labeller.count(labeller.related_mask(state.base(1))) == 2
        assert all("p" in state.valuation for state in related)

    def test_cap_exceeded(self, small_context):
        with pytest.raises(EnumerationCapExceeded) as exc:
            list(enumerate_context(small_context, cap=1))
        assert exc.value.bits == 2
        assert exc.value.cap == 1

    def test_labeller_cap(self, small_context):
        with pytest.raises(EnumerationCapExceeded):
            ContextLabeller(small_context, cap=1)

    def test_extension_bits(self, small_context):
        labeller = ContextLabeller(small_context)
        mask = labeller.ext(p)
        states = [small_context.state_at(i) for i in range(4) if (mask >> i) & 1]
        assert all("p" in state.valuation for state in states)
        assert labeller.count(mask) == 2


@pytest.mark.unit
class TestCheckDirect:
    """Test check_direct on hand-computed cases"""

    def test_knows_own_base(self, small_context):
        state = State({1: {p}, 2: set()})
        assert check_direct(state, small_context, AtLeast(1, p))
        assert not check_direct(state, small_context, AtLeast(1, Not(p)))

    def test_empty_base_knows_only_validities(self, small_context):
        state = State({1: set(), 2: set()}, {"p"})
        assert check_direct(state, small_context, AtLeast(1, Or(p, Not(p))))
        assert not check_direct(state, small_context, AtLeast(1, p))

    def test_window(self, small_context):
        """Every state outside agent 1's alternatives falsifies p"""
        state = State({1: {p}, 2: set()})
        assert check_direct(state, small_context, AtMost(1, Not(p)))
        assert check_direct(state, small_context, Only(1, p))

    def test_only_fails_for_weaker_base(self, small_context):
        state = State({1: set(), 2: set()})
        assert not check_direct(state, small_context, Only(1, p))
        assert check_direct(state, small_context, Only(1, TOP))

    def test_expansion_changes_beliefs(self, small_context):
        state = State({1: set(), 2: set()})
        assert check_direct(state, small_context, Expand(1, p, AtLeast(1, p)))
        assert check_direct(state, small_context, Expand(1, p, ExplicitBelief(1, p)))

    def test_expansion_outside_context(self, small_context):
        """Agent 2 learns p although Γ_2 is empty"""
        state = State({1: set(), 2: set()})
        assert check_direct(state, small_context, Expand(2, p, And(AtLeast(2, p), ExplicitBelief(2, p))))


@pytest.mark.property_based
class TestCheckerProperties:
    """Algebraic properties of the explicit-state checker"""

    @given(instances())
    @settings(max_examples=200)
    def test_only_is_its_definition(self, instance):
        ctx = instance.context()
        state = instance.initial_state
        for agent in instance.agents:
            body = instance.query
            expected = check_direct(state, ctx, And(AtLeast(agent, body), AtMost(agent, Not(body))))
            assert check_direct(state, ctx, Only(agent, body)) == expected

    @given(instances(dynamic=True))
    @settings(max_examples=200)
    def test_extension_matches_pointwise_truth(self, instance):
        """The bitset extension agrees with evaluation state by state"""
        ctx = instance.context()
        labeller = ContextLabeller(ctx)
        mask = labeller.ext(instance.query)
        for index in range(1 << ctx.bit_width):
            assert bool((mask >> index) & 1) == labeller.holds(ctx.state_at(index), instance.query)

    @given(instances(dynamic=True))
    @settings(max_examples=150)
    def test_expansion_is_state_update(self, instance):
        ctx = instance.context()
        state = instance.initial_state
        for agent in instance.agents:
            for alpha in instance.vocab[agent]:
                assert check_direct(state, ctx, Expand(agent, alpha, instance.query)) == \
                    check_direct(expand_state(state, agent, alpha), ctx, instance.query)
