"""
Leveled translation of L into quantified Boolean formulas

Level k holds one propositional copy of the instance vocabulary, X_k: a
variable x_{p,k} per relevant atom and x_{△_i α,k} per α ∈ Γ_i. The modal
operators of agent i quantify the next level under the relation formula
R_{i,k}, which says that the level-(k+1) state satisfies agent i's level-k
base. (S0, S_Γ) ⊨ φ0 iff ∃X_0 (desc_{S0}(X_0) ∧ tr_0(φ0)) is true.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from checker_errors import InstanceError, TranslationError
from formula_parser import ProblemInstance, print_formula
from belief_semantics import State
from logic_core import (
    And, AtLeast, AtMost, Atom, Bottom, Expand, ExplicitBelief, Formula, HashConsed, Iff,
    Implies, Not, Only, Or, Top, Xor,
)

logger = logging.getLogger(__name__)

PROP = "prop"
BELIEF = "belief"


@dataclass(frozen=True)
class LeveledVar:
    """x_{p,k} (kind prop) or x_{△_i α,k} (kind belief)"""
    kind: str
    level: int
    atom: Optional[str] = None
    agent: Optional[int] = None
    formula: Optional[Formula] = None

    @classmethod
    def prop(cls, atom: str, level: int) -> "LeveledVar":
        return cls(PROP, level, atom=atom)

    @classmethod
    def belief(cls, agent: int, formula: Formula, level: int) -> "LeveledVar":
        return cls(BELIEF, level, agent=agent, formula=formula)

    @property
    def name(self) -> str:
        if self.kind == PROP:
            return f"x[{self.atom}]@{self.level}"
        return f"x[B {self.agent} {print_formula(self.formula)}]@{self.level}"

    def shifted(self, delta: int) -> "LeveledVar":
        return LeveledVar(self.kind, self.level + delta, self.atom, self.agent, self.formula)


class QbfFormula(metaclass=HashConsed):
    """Base of QBF nodes; interned like formula nodes"""
    __match_args__: Tuple[str, ...] = ()

    def children(self) -> Tuple["QbfFormula", ...]:
        return tuple(getattr(self, name) for name in self.__match_args__
                     if isinstance(getattr(self, name), QbfFormula))


@dataclass(frozen=True, eq=False)
class QConst(QbfFormula):
    value: bool


@dataclass(frozen=True, eq=False)
class QVar(QbfFormula):
    var: LeveledVar


@dataclass(frozen=True, eq=False)
class QNot(QbfFormula):
    body: QbfFormula


@dataclass(frozen=True, eq=False)
class QAnd(QbfFormula):
    left: QbfFormula
    right: QbfFormula


@dataclass(frozen=True, eq=False)
class QOr(QbfFormula):
    left: QbfFormula
    right: QbfFormula


@dataclass(frozen=True, eq=False)
class QImplies(QbfFormula):
    left: QbfFormula
    right: QbfFormula


@dataclass(frozen=True, eq=False)
class QForAll(QbfFormula):
    block: Tuple[LeveledVar, ...]
    body: QbfFormula


@dataclass(frozen=True, eq=False)
class QExists(QbfFormula):
    block: Tuple[LeveledVar, ...]
    body: QbfFormula


Q_TRUE = QConst(True)
Q_FALSE = QConst(False)


def q_not(a: QbfFormula) -> QbfFormula:
    if isinstance(a, QConst):
        return QConst(not a.value)
    return QNot(a)


def q_and(a: QbfFormula, b: QbfFormula) -> QbfFormula:
    if isinstance(a, QConst):
        return b if a.value else Q_FALSE
    if isinstance(b, QConst):
        return a if b.value else Q_FALSE
    return QAnd(a, b)


def q_or(a: QbfFormula, b: QbfFormula) -> QbfFormula:
    if isinstance(a, QConst):
        return Q_TRUE if a.value else b
    if isinstance(b, QConst):
        return Q_TRUE if b.value else a
    return QOr(a, b)


def q_implies(a: QbfFormula, b: QbfFormula) -> QbfFormula:
    if isinstance(a, QConst):
        return b if a.value else Q_TRUE
    if isinstance(b, QConst):
        return Q_TRUE if b.value else q_not(a)
    return QImplies(a, b)


def q_conj(items: Sequence[QbfFormula]) -> QbfFormula:
    """Balanced conjunction; empty is true"""
    items = list(items)
    if not items:
        return Q_TRUE
    if len(items) == 1:
        return items[0]
    mid = (len(items) + 1) // 2
    return q_and(q_conj(items[:mid]), q_conj(items[mid:]))


def q_forall(block: Sequence[LeveledVar], body: QbfFormula) -> QbfFormula:
    if not block or isinstance(body, QConst):
        return body
    return QForAll(tuple(block), body)


def q_exists(block: Sequence[LeveledVar], body: QbfFormula) -> QbfFormula:
    if not block or isinstance(body, QConst):
        return body
    return QExists(tuple(block), body)


def level_vars(inst: ProblemInstance, k: int) -> Tuple[LeveledVar, ...]:
    """X_k: prop variables in atom order, then belief variables in agent and Γ_i order"""
    props = [LeveledVar.prop(name, k) for name in inst.relevant_atoms()]
    beliefs = [LeveledVar.belief(agent, alpha, k)
               for agent in inst.agents for alpha in inst.vocab.get(agent, ())]
    return tuple(props + beliefs)


def qbf_variables(psi: QbfFormula) -> set:
    """Every LeveledVar occurring in psi, bound or free"""
    found = set()
    seen = set()
    stack = [psi]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, QVar):
            found.add(node.var)
        elif isinstance(node, (QForAll, QExists)):
            found.update(node.block)
        stack.extend(node.children())
    return found


class _Translator:
    """tr_k with a memo over (formula, level)

    With a pinned state, level 0 is S0 itself: atoms and explicit beliefs at
    level 0 are constants and R_{i,0} ranges over B_i(S0), which may lie
    outside Γ_i after an expansion. This is tr_0 cofactored by desc_{S0}.
    """

    def __init__(self, inst: ProblemInstance, pinned: Optional[State] = None):
        self.inst = inst
        self.pinned = pinned
        self._memo: Dict[Tuple[Formula, int], QbfFormula] = {}
        self._levels: Dict[int, Tuple[LeveledVar, ...]] = {}
        self._relations: Dict[Tuple[int, int], QbfFormula] = {}

    def level(self, k: int) -> Tuple[LeveledVar, ...]:
        block = self._levels.get(k)
        if block is None:
            block = self._levels[k] = level_vars(self.inst, k)
        return block

    def relation(self, agent: int, k: int) -> QbfFormula:
        key = (agent, k)
        cached = self._relations.get(key)
        if cached is not None:
            return cached
        if self.pinned is not None and k == 0:
            held = self.pinned.base(agent)
            vocab = self.inst.vocab.get(agent, ())
            base = [alpha for alpha in vocab if alpha in held]
            base += sorted(held - set(vocab), key=print_formula)
            result = q_conj([self.tr(alpha, 1) for alpha in base])
        else:
            result = q_conj([
                q_implies(QVar(LeveledVar.belief(agent, alpha, k)), self.tr(alpha, k + 1))
                for alpha in self.inst.vocab.get(agent, ())
            ])
        self._relations[key] = result
        return result

    def tr(self, phi: Formula, k: int) -> QbfFormula:
        key = (phi, k)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        pinned = self.pinned if k == 0 else None
        if isinstance(phi, Atom):
            result = QConst(phi.name in pinned.valuation) if pinned else QVar(LeveledVar.prop(phi.name, k))
        elif isinstance(phi, Top):
            result = Q_TRUE
        elif isinstance(phi, Bottom):
            result = Q_FALSE
        elif isinstance(phi, Not):
            result = q_not(self.tr(phi.body, k))
        elif isinstance(phi, And):
            result = q_and(self.tr(phi.left, k), self.tr(phi.right, k))
        elif isinstance(phi, Or):
            result = q_or(self.tr(phi.left, k), self.tr(phi.right, k))
        elif isinstance(phi, Implies):
            result = q_implies(self.tr(phi.left, k), self.tr(phi.right, k))
        elif isinstance(phi, (Iff, Xor)):
            left, right = self.tr(phi.left, k), self.tr(phi.right, k)
            result = q_and(q_implies(left, right), q_implies(right, left))
            if isinstance(phi, Xor):
                result = q_not(result)
        elif isinstance(phi, ExplicitBelief):
            if pinned:
                result = QConst(phi.body in pinned.base(phi.agent))
            elif self.inst.vocab.contains(phi.agent, phi.body):
                result = QVar(LeveledVar.belief(phi.agent, phi.body, k))
            else:
                result = Q_FALSE
        elif isinstance(phi, (AtLeast, AtMost)):
            relation = self.relation(phi.agent, k)
            if isinstance(phi, AtMost):
                relation = q_not(relation)
            result = q_forall(self.level(k + 1), q_implies(relation, self.tr(phi.body, k + 1)))
        elif isinstance(phi, (Only, Expand)):
            raise TranslationError(
                f"{type(phi).__name__} must be eliminated before translation: {print_formula(phi)}")
        else:
            raise TranslationError(f"unknown formula node {type(phi).__name__}")
        self._memo[key] = result
        return result


def translate(phi: Formula, k: int, inst: ProblemInstance, pinned: Optional[State] = None) -> QbfFormula:
    """tr_k(φ) over the instance vocabulary

    φ must already be pruned, Expand-free and Only-expanded.

    Raises:
        TranslationError: an Only or Expand node is reached
    """
    return _Translator(inst, pinned).tr(phi, k)


def relation_formula(agent: int, k: int, inst: ProblemInstance) -> QbfFormula:
    """R_{i,k} = ⋀_{α∈Γ_i} (x_{△_i α,k} → tr_{k+1}(α)); true for empty Γ_i"""
    return _Translator(inst).relation(agent, k)


def describe_state(state: State, inst: ProblemInstance) -> QbfFormula:
    """desc_{S}(X_0): the full minterm of S over X_0

    Raises:
        InstanceError: a base element lies outside Γ_i
    """
    for agent in inst.agents:
        outside = state.base(agent) - inst.vocab.members(agent)
        if outside:
            raise InstanceError("base-outside-vocabulary",
                                f"B_{agent} holds {print_formula(next(iter(outside)))}, not in Γ_{agent}")
    literals: List[QbfFormula] = []
    for var in level_vars(inst, 0):
        if var.kind == PROP:
            truth = var.atom in state.valuation
        else:
            truth = var.formula in state.base(var.agent)
        literals.append(QVar(var) if truth else QNot(QVar(var)))
    return q_conj(literals)


def validity_sentence(state: State, phi0: Formula, inst: ProblemInstance) -> QbfFormula:
    """∃X_0 (desc_S(X_0) ∧ tr_0(φ0)), true iff (S, S_Γ) ⊨ φ0"""
    body = q_and(describe_state(state, inst), translate(phi0, 0, inst))
    sentence = q_exists(level_vars(inst, 0), body)
    logger.debug("built closed sentence for %s", type(phi0).__name__)
    return sentence


class _QdimacsEncoder:
    """Negation normal form, renaming apart, prenexing and Plaisted-Greenbaum clauses

    Every quantifier occurrence binds fresh variable ids, so blocks can be
    hoisted in order of quantifier depth. Definitional variables go in a
    final existential block.
    """

    def __init__(self):
        self.count = 0
        self.names: List[Tuple[int, str]] = []
        self.copies: Dict[LeveledVar, int] = {}
        self.blocks: List[Tuple[int, str, List[int]]] = []
        self.free: List[int] = []
        self.free_ids: Dict[LeveledVar, int] = {}
        self.definitions: List[int] = []
        self.clauses: List[List[int]] = []
        self._memo: Dict[Tuple[QbfFormula, bool, int], Union[int, bool]] = {}
        self._quantifier_free: Dict[QbfFormula, bool] = {}
        self._envs: List[Mapping[LeveledVar, int]] = []

    def _fresh(self) -> int:
        self.count += 1
        return self.count

    def _bind(self, var: LeveledVar) -> int:
        ident = self._fresh()
        copy = self.copies.get(var, 0) + 1
        self.copies[var] = copy
        self.names.append((ident, var.name if copy == 1 else f"{var.name}#{copy}"))
        return ident

    def _is_quantifier_free(self, node: QbfFormula) -> bool:
        cached = self._quantifier_free.get(node)
        if cached is None:
            cached = not isinstance(node, (QForAll, QExists)) and all(
                self._is_quantifier_free(child) for child in node.children())
            self._quantifier_free[node] = cached
        return cached

    def _define(self, junction: str, literals: List[Union[int, bool]]) -> Union[int, bool]:
        if junction == "and":
            if any(lit is False for lit in literals):
                return False
            literals = [lit for lit in literals if lit is not True]
            if not literals:
                return True
        else:
            if any(lit is True for lit in literals):
                return True
            literals = [lit for lit in literals if lit is not False]
            if not literals:
                return False
        if len(literals) == 1:
            return literals[0]
        gate = self._fresh()
        self.definitions.append(gate)
        if junction == "and":
            self.clauses.extend([-gate, lit] for lit in literals)
        else:
            self.clauses.append([-gate] + literals)
        return gate

    def encode(self, node: QbfFormula, positive: bool, env: Mapping[LeveledVar, int],
               env_id: int, depth: int) -> Union[int, bool]:
        memoizable = self._is_quantifier_free(node)
        key = (node, positive, env_id)
        if memoizable and key in self._memo:
            return self._memo[key]
        if isinstance(node, QConst):
            result: Union[int, bool] = node.value == positive
        elif isinstance(node, QVar):
            ident = env.get(node.var)
            if ident is None:
                ident = self.free_ids.get(node.var)
                if ident is None:
                    ident = self.free_ids[node.var] = self._bind(node.var)
                    self.free.append(ident)
            result = ident if positive else -ident
        elif isinstance(node, QNot):
            result = self.encode(node.body, not positive, env, env_id, depth)
        elif isinstance(node, (QAnd, QOr)):
            junction = "and" if isinstance(node, QAnd) == positive else "or"
            result = self._define(junction, [self.encode(node.left, positive, env, env_id, depth),
                                             self.encode(node.right, positive, env, env_id, depth)])
        elif isinstance(node, QImplies):
            junction = "or" if positive else "and"
            result = self._define(junction, [self.encode(node.left, not positive, env, env_id, depth),
                                             self.encode(node.right, positive, env, env_id, depth)])
        else:
            universal = isinstance(node, QForAll) == positive
            inner = dict(env)
            ids = []
            for var in node.block:
                inner[var] = self._bind(var)
                ids.append(inner[var])
            self.blocks.append((depth, "a" if universal else "e", ids))
            self._envs.append(inner)
            result = self.encode(node.body, positive, inner, len(self._envs), depth + 1)
        if memoizable:
            self._memo[key] = result
        return result

    def prefix(self) -> List[Tuple[str, List[int]]]:
        merged: List[Tuple[str, List[int]]] = []
        ordered = [("e", self.free)] + [(kind, ids) for _, kind, ids in
                                        sorted(self.blocks, key=lambda block: block[0])]
        ordered.append(("e", self.definitions))
        for kind, ids in ordered:
            if not ids:
                continue
            if merged and merged[-1][0] == kind:
                merged[-1][1].extend(ids)
            else:
                merged.append((kind, list(ids)))
        return merged


def export_qdimacs(psi: QbfFormula) -> str:
    """QDIMACS text whose truth equals the truth of the closed sentence psi"""
    encoder = _QdimacsEncoder()
    root = encoder.encode(psi, True, {}, 0, 0)
    if root is False:
        sink = encoder._fresh()
        encoder.definitions.append(sink)
        encoder.clauses.extend([[sink], [-sink]])
    elif root is not True:
        encoder.clauses.append([root])

    lines = [f"c map {ident} {name}" for ident, name in encoder.names]
    lines.append(f"p cnf {encoder.count} {len(encoder.clauses)}")
    for kind, ids in encoder.prefix():
        lines.append(f"{kind} {' '.join(str(i) for i in ids)} 0")
    lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in encoder.clauses)
    logger.debug("qdimacs: %d vars, %d clauses", encoder.count, len(encoder.clauses))
    return "\n".join(lines) + "\n"


def qdimacs_variable_map(text: str) -> Dict[int, str]:
    """Read back the 'c map' header of an exported file"""
    mapping: Dict[int, str] = {}
    for line in text.splitlines():
        if line.startswith("c map "):
            _, _, ident, name = line.split(" ", 3)
            mapping[int(ident)] = name
    return mapping
