#!/usr/bin/env python3
"""
Tests for the leveled QBF translation and QDIMACS export
"""

import json
import sys
from pathlib import Path

import pytest
from hypothesis import given, settings

sys.path.insert(0, str(Path(__file__).parent.parent))

from bdd_engine import TRUE, BddStore, build
from belief_semantics import State, check_direct
from checker_errors import InstanceError, TranslationError
from formula_parser import parse_formula, parse_instance
from logic_core import AtLeast, AtMost, Atom, Expand, Only, expand_only, prune_to_vocabulary
from qbf_translation import (
    Q_FALSE, Q_TRUE, LeveledVar, QForAll, QImplies, QNot, QVar, describe_state, export_qdimacs,
    level_vars, validity_sentence, q_forall, q_not, q_or, qbf_variables, qdimacs_variable_map,
    relation_formula, translate,
)
from symbolic_checker import check_enumerate
from tests.conftest import make_document
from tests.strategies import instances

p = Atom("p")


def _solve_qdimacs(text):
    """Brute-force truth of a small QDIMACS file"""
    prefix, clauses, declared = [], [], 0
    for line in text.splitlines():
        if line.startswith("c") or not line.strip():
            continue
        fields = line.split()
        if fields[0] == "p":
            declared = int(fields[2])
        elif fields[0] in ("a", "e"):
            prefix.extend((fields[0], int(v)) for v in fields[1:-1])
        else:
            clauses.append([int(v) for v in fields[:-1]])
    bound = {v for _, v in prefix}
    prefix = [("e", v) for v in range(1, declared + 1) if v not in bound] + prefix

    def status(values):
        satisfied = True
        for clause in clauses:
            assigned = [values[abs(lit)] == (lit > 0) for lit in clause if abs(lit) in values]
            if any(assigned):
                continue
            if len(assigned) == len(clause):
                return False
            satisfied = False
        return True if satisfied else None

    def solve(index, values):
        settled = status(values)
        if settled is not None:
            return settled
        kind, var = prefix[index]
        outcomes = (solve(index + 1, {**values, var: value}) for value in (False, True))
        return any(outcomes) if kind == "e" else all(outcomes)

    return solve(0, {})


@pytest.mark.unit
class TestLeveledVariables:
    """Test LeveledVar and level_vars"""

    def test_names(self):
        assert LeveledVar.prop("p", 2).name == "x[p]@2"
        assert LeveledVar.belief(1, parse_formula("p | q"), 0).name == "x[B 1 p | q]@0"

    def test_level_vars(self, one_agent_instance):
        assert level_vars(one_agent_instance, 3) == (
            LeveledVar.prop("p", 3), LeveledVar.belief(1, p, 3))

    def test_shifted(self):
        assert LeveledVar.prop("p", 0).shifted(2) == LeveledVar.prop("p", 2)


@pytest.mark.unit
class TestTranslate:
    """Test translate"""

    def test_knowledge_structure(self, one_agent_instance):
        """tr_0(K 1 p) = ∀X_1 ((x_{△1p,0} → x_{p,1}) → x_{p,1})"""
        p1 = QVar(LeveledVar.prop("p", 1))
        relation = QImplies(QVar(LeveledVar.belief(1, p, 0)), p1)
        expected = QForAll(level_vars(one_agent_instance, 1), QImplies(relation, p1))
        assert translate(AtLeast(1, p), 0, one_agent_instance) is expected

    def test_window_structure(self, one_agent_instance):
        p1 = QVar(LeveledVar.prop("p", 1))
        relation = QImplies(QVar(LeveledVar.belief(1, p, 0)), p1)
        expected = QForAll(level_vars(one_agent_instance, 1), QImplies(QNot(relation), p1))
        assert translate(AtMost(1, p), 0, one_agent_instance) is expected

    def test_unpinned_atom(self, one_agent_instance):
        assert translate(p, 4, one_agent_instance) is QVar(LeveledVar.prop("p", 4))

    def test_out_of_vocabulary_belief_is_false(self, two_agent_instance):
        assert translate(parse_formula("B 2 (q & q)"), 0, two_agent_instance) is Q_FALSE

    def test_pinned_level_zero(self, one_agent_instance):
        state = one_agent_instance.initial_state
        assert translate(p, 0, one_agent_instance, pinned=state) is Q_TRUE
        assert translate(parse_formula("B 1 p"), 0, one_agent_instance, pinned=state) is Q_TRUE

    def test_rejects_only_and_expand(self, one_agent_instance):
        with pytest.raises(TranslationError):
            translate(Only(1, p), 0, one_agent_instance)
        with pytest.raises(TranslationError):
            translate(Expand(1, p, p), 0, one_agent_instance)

    def test_level_locality_and_shift(self, two_agent_instance):
        phi = parse_formula("K 1 (W 2 q -> B 1 B 2 q)")
        at_zero = qbf_variables(translate(phi, 0, two_agent_instance))
        at_two = qbf_variables(translate(phi, 2, two_agent_instance))
        assert all(var.level >= 2 for var in at_two)
        assert at_two == {var.shifted(2) for var in at_zero}


@pytest.mark.unit
class TestRelationAndDescription:
    """Test relation_formula and describe_state"""

    def test_empty_vocabulary_relation(self):
        inst = parse_instance(json.dumps(make_document(gamma={"1": []}, base={"1": []}, query="p")))
        assert relation_formula(1, 0, inst) is Q_TRUE

    def test_relation(self, one_agent_instance):
        expected = QImplies(QVar(LeveledVar.belief(1, p, 2)), QVar(LeveledVar.prop("p", 3)))
        assert relation_formula(1, 2, one_agent_instance) is expected

    def test_describe_state_minterm(self, committee3):
        """desc_S is satisfied by exactly one assignment of X_0"""
        variables = level_vars(committee3, 0)
        store = BddStore(variables)
        desc = build(describe_state(committee3.initial_state, committee3), store)
        assert store.sat_count(desc) == 1
        assert store.support(desc) == list(variables)

    def test_describe_state_outside_vocabulary(self, one_agent_instance):
        with pytest.raises(InstanceError) as exc:
            describe_state(State({1: {Atom("q")}}), one_agent_instance)
        assert exc.value.kind == "base-outside-vocabulary"

    @pytest.mark.parametrize("query", ["K 1 p", "W 1 ~p", "O 1 p", "~K 1 ~p", "K 1 (p & B 1 p)"])
    def test_sentence_matches_direct_check(self, one_agent_instance, query):
        inst = one_agent_instance.with_query(parse_formula(query))
        expanded = parse_formula(query.replace("O 1 p", "K 1 p & W 1 ~p"))
        variables = [v for k in range(3) for v in level_vars(inst, k)]
        root = build(validity_sentence(inst.initial_state, expanded, inst), BddStore(variables))
        assert (root == TRUE) == check_direct(inst.initial_state, inst.context(), inst.query)


@pytest.mark.unit
class TestQdimacs:
    """Test export_qdimacs"""

    def test_true_sentence(self):
        assert export_qdimacs(Q_TRUE) == "p cnf 0 0\n"

    def test_false_sentence(self):
        assert export_qdimacs(Q_FALSE) == "p cnf 1 2\ne 1 0\n1 0\n-1 0\n"

    def test_excluded_middle(self):
        x = LeveledVar.prop("x", 0)
        text = export_qdimacs(q_forall([x], q_or(QVar(x), q_not(QVar(x)))))
        assert text.splitlines() == [
            "c map 1 x[x]@0",
            "p cnf 2 2",
            "a 1 0",
            "e 2 0",
            "-2 1 -1 0",
            "2 0",
        ]
        assert _solve_qdimacs(text)

    def test_copies_are_renamed_apart(self, one_agent_instance):
        sentence = validity_sentence(one_agent_instance.initial_state,
                                         parse_formula("K 1 p & W 1 ~p"), one_agent_instance)
        mapping = qdimacs_variable_map(export_qdimacs(sentence))
        assert "x[p]@1" in mapping.values()
        assert "x[p]@1#2" in mapping.values()
        assert len(set(mapping.values())) == len(mapping)

    def test_header_precedes_prefix(self, one_agent_instance):
        sentence = validity_sentence(one_agent_instance.initial_state, AtLeast(1, p), one_agent_instance)
        lines = export_qdimacs(sentence).splitlines()
        header = next(i for i, line in enumerate(lines) if line.startswith("p cnf"))
        assert all(line.startswith("c map") for line in lines[:header])
        assert lines[header + 1][0] in "ae"

    @pytest.mark.parametrize("query", ["K 1 p", "K 1 ~p", "O 1 p", "W 1 p", "~K 1 (p -> W 1 p)"])
    def test_truth_preserved(self, one_agent_instance, query):
        inst = one_agent_instance.with_query(parse_formula(query))
        expanded = parse_formula(query.replace("O 1 p", "K 1 p & W 1 ~p"))
        text = export_qdimacs(validity_sentence(inst.initial_state, expanded, inst))
        assert _solve_qdimacs(text) == check_direct(inst.initial_state, inst.context(), inst.query)

    @pytest.mark.property_based
    @given(instances(max_agents=2, max_atoms=2, max_gamma=2))
    @settings(max_examples=40)
    def test_random_sentences_match_enumeration(self, instance):
        query = prune_to_vocabulary(expand_only(instance.query), instance.vocab)
        text = export_qdimacs(validity_sentence(instance.initial_state, query, instance))
        assert _solve_qdimacs(text) == check_enumerate(instance).verdict
