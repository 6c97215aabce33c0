"""
Formula languages L0 ⊂ L ⊂ L+ for multi-agent only believing
One hash-consed AST plus the structural utilities the checkers share:
subformulas, modal depth, atom extraction, normalization, Only expansion,
vocabulary pruning and relevant-atom accounting
"""

import logging
import sys
import weakref
from dataclasses import dataclass
from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

logger = logging.getLogger(__name__)

# Committee formulas nest a few hundred levels deep at n=10
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

AgentId = int
Vocabulary = Mapping[AgentId, Iterable["Formula"]]

_NODE_TABLE: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()


class HashConsed(type):
    """Metaclass interning every node: structurally equal formulas are the same object"""

    def __call__(cls, *args, **kwargs):
        if kwargs:
            names = cls.__match_args__
            args = args + tuple(kwargs.pop(name) for name in names[len(args):] if name in kwargs)
            if kwargs:
                raise TypeError(f"{cls.__name__}() got unexpected arguments {sorted(kwargs)}")
        key = (cls, args)
        node = _NODE_TABLE.get(key)
        if node is None:
            node = _NODE_TABLE.setdefault(key, super().__call__(*args))
        return node


class Formula(metaclass=HashConsed):
    """Base of all formula nodes; equality is identity because nodes are interned"""

    __match_args__: Tuple[str, ...] = ()

    def children(self) -> Tuple["Formula", ...]:
        return tuple(getattr(self, name) for name in self.__match_args__
                     if isinstance(getattr(self, name), Formula))

    def __reduce__(self):
        return (type(self), tuple(getattr(self, name) for name in self.__match_args__))

    def __str__(self) -> str:
        from formula_parser import print_formula
        return print_formula(self)


@dataclass(frozen=True, eq=False)
class Atom(Formula):
    name: str


@dataclass(frozen=True, eq=False)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Bottom(Formula):
    pass


@dataclass(frozen=True, eq=False)
class Not(Formula):
    body: Formula


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Xor(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class ExplicitBelief(Formula):
    """△_i α: α is literally a member of agent i's belief base"""
    agent: AgentId
    body: Formula


@dataclass(frozen=True, eq=False)
class AtLeast(Formula):
    """□_i φ: φ holds at every context state satisfying all of B_i"""
    agent: AgentId
    body: Formula


@dataclass(frozen=True, eq=False)
class AtMost(Formula):
    """⊡_i φ: φ holds at every context state that is not an i-alternative"""
    agent: AgentId
    body: Formula


@dataclass(frozen=True, eq=False)
class Only(Formula):
    """◯_i φ, definitionally □_i φ ∧ ⊡_i ¬φ"""
    agent: AgentId
    body: Formula


@dataclass(frozen=True, eq=False)
class Expand(Formula):
    """[+_i α] φ: φ holds after agent i privately adds α to its base"""
    agent: AgentId
    info: Formula
    body: Formula


TOP = Top()
BOTTOM = Bottom()

BINARY_TYPES = (And, Or, Implies, Iff, Xor)
MODAL_TYPES = (AtLeast, AtMost, Only)


def conj(items: Iterable[Formula]) -> Formula:
    """Left-folded conjunction; the empty conjunction is Top"""
    result: Optional[Formula] = None
    for item in items:
        result = item if result is None else And(result, item)
    return TOP if result is None else result


def disj(items: Iterable[Formula]) -> Formula:
    """Left-folded disjunction; the empty disjunction is Bottom"""
    result: Optional[Formula] = None
    for item in items:
        result = item if result is None else Or(result, item)
    return BOTTOM if result is None else result


def _balanced(items: Sequence[Formula], node: type, empty: Formula) -> Formula:
    if not items:
        return empty
    if len(items) == 1:
        return items[0]
    mid = (len(items) + 1) // 2
    return node(_balanced(items[:mid], node, empty), _balanced(items[mid:], node, empty))


def balanced_conj(items: Iterable[Formula]) -> Formula:
    """Conjunction folded as a balanced tree (three items fold like conj)"""
    return _balanced(list(items), And, TOP)


def balanced_disj(items: Iterable[Formula]) -> Formula:
    return _balanced(list(items), Or, BOTTOM)


def possible(agent: AgentId, body: Formula) -> Formula:
    """◇_i φ, the dual of □_i"""
    return Not(AtLeast(agent, Not(body)))


def co_window(agent: AgentId, body: Formula) -> Formula:
    """The dual of ⊡_i"""
    return Not(AtMost(agent, Not(body)))


def is_l0(phi: Formula) -> bool:
    """True when phi contains no AtLeast, AtMost, Only or Expand node"""
    stack = [phi]
    seen: Set[int] = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, MODAL_TYPES) or isinstance(node, Expand):
            return False
        stack.extend(node.children())
    return True


def is_dynamic_free(phi: Formula) -> bool:
    return not any(isinstance(f, Expand) for f in subformulas(phi))


def subformulas(phi: Formula) -> Set[Formula]:
    """All syntactic subformulas of phi, phi included; derived connectives stay as written"""
    result: Set[Formula] = set()
    stack = [phi]
    while stack:
        node = stack.pop()
        if node in result:
            continue
        result.add(node)
        stack.extend(node.children())
    return result


def atoms_of(phi: Formula) -> Set[str]:
    return {f.name for f in subformulas(phi) if isinstance(f, Atom)}


def modal_depth(phi: Formula) -> int:
    """Nesting depth of AtLeast/AtMost/Only

    ExplicitBelief adds nothing: its body is a base element, never re-entered
    by the translation. Expand adds nothing either, which is exactly the
    depth of its reduction-rewritten form.
    """
    memo: Dict[Formula, int] = {}

    def visit(node: Formula) -> int:
        cached = memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, MODAL_TYPES):
            depth = 1 + visit(node.body)
        elif isinstance(node, ExplicitBelief):
            depth = 0
        elif isinstance(node, Expand):
            depth = visit(node.body)
        else:
            depth = max((visit(child) for child in node.children()), default=0)
        memo[node] = depth
        return depth

    return visit(phi)


def _rebuild(node: Formula, children: List[Formula]) -> Formula:
    """Same node type over new children (children in field order)"""
    if isinstance(node, Not):
        return Not(children[0])
    if isinstance(node, BINARY_TYPES):
        return type(node)(children[0], children[1])
    if isinstance(node, (ExplicitBelief,) + MODAL_TYPES):
        return type(node)(node.agent, children[0])
    if isinstance(node, Expand):
        return Expand(node.agent, children[0], children[1])
    return node


def expand_only(phi: Formula) -> Formula:
    """Replace every Only(i, φ) by AtLeast(i, φ) ∧ AtMost(i, ¬φ); idempotent"""
    memo: Dict[Formula, Formula] = {}

    def visit(node: Formula) -> Formula:
        cached = memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, ExplicitBelief):
            result = node
        elif isinstance(node, Only):
            body = visit(node.body)
            result = And(AtLeast(node.agent, body), AtMost(node.agent, Not(body)))
        else:
            result = _rebuild(node, [visit(child) for child in node.children()])
        memo[node] = result
        return result

    return visit(phi)


def normalize(phi: Formula) -> Formula:
    """Rewrite derived connectives into Not/And over Top

    Bottom becomes Not(Top). Explicit-belief bodies and expansion infos are
    base elements and keep their exact syntax.
    """
    memo: Dict[Formula, Formula] = {}

    def visit(node: Formula) -> Formula:
        cached = memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, (Atom, Top, ExplicitBelief)):
            result = node
        elif isinstance(node, Bottom):
            result = Not(TOP)
        elif isinstance(node, Not):
            result = Not(visit(node.body))
        elif isinstance(node, And):
            result = And(visit(node.left), visit(node.right))
        elif isinstance(node, Or):
            result = Not(And(Not(visit(node.left)), Not(visit(node.right))))
        elif isinstance(node, Implies):
            result = Not(And(visit(node.left), Not(visit(node.right))))
        elif isinstance(node, (Iff, Xor)):
            left, right = visit(node.left), visit(node.right)
            both = And(Not(And(left, Not(right))), Not(And(right, Not(left))))
            result = both if isinstance(node, Iff) else Not(both)
        elif isinstance(node, Expand):
            result = Expand(node.agent, node.info, visit(node.body))
        else:
            result = type(node)(node.agent, visit(node.body))
        memo[node] = result
        return result

    return visit(phi)


def prune_to_vocabulary(phi: Formula, gamma: Vocabulary,
                        extra: Optional[Mapping[AgentId, Iterable[Formula]]] = None) -> Formula:
    """Replace each △_i α with α ∉ Γ_i by ⊥

    Over the universal context such explicit beliefs are false everywhere.
    Surviving bodies and expansion infos are base elements and keep their
    exact syntax; nested beliefs inside them are the translation's concern.
    At the evaluation point itself a base may also hold formulas added by an
    enclosing expansion (and `extra`, for actual states outside the context);
    those stay. Modal operators move evaluation back into the context.
    """
    members: Dict[AgentId, FrozenSet[Formula]] = {i: frozenset(v) for i, v in gamma.items()}
    top_scope = frozenset((i, a) for i, formulas in (extra or {}).items() for a in formulas)
    memo: Dict[Tuple[Formula, FrozenSet], Formula] = {}

    def visit(node: Formula, scope: FrozenSet) -> Formula:
        key = (node, scope)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, ExplicitBelief):
            kept = node.body in members.get(node.agent, ()) or (node.agent, node.body) in scope
            result = node if kept else BOTTOM
        elif isinstance(node, MODAL_TYPES):
            result = type(node)(node.agent, visit(node.body, frozenset()))
        elif isinstance(node, Expand):
            result = Expand(node.agent, node.info, visit(node.body, scope | {(node.agent, node.info)}))
        else:
            result = _rebuild(node, [visit(child, scope) for child in node.children()])
        memo[key] = result
        return result

    return visit(phi, top_scope)


def _union_vocabulary(gamma: Vocabulary) -> List[Formula]:
    seen: Set[Formula] = set()
    ordered: List[Formula] = []
    for agent in gamma:
        for alpha in gamma[agent]:
            if alpha not in seen:
                seen.add(alpha)
                ordered.append(alpha)
    return ordered


def relevant_formulas(gamma: Vocabulary, phi0: Formula,
                      agents: Optional[Iterable[AgentId]] = None) -> Set[Formula]:
    """The relevant-atom set whose size is ratoms

    Union, without duplicates, of: every formula of every Γ_i; every atom of
    Γ and φ0; every modal-free subformula of φ0 (derived connectives and Only
    kept as written); and △_i α for every agent i and every α in ∪_j Γ_j.
    """
    agent_ids = list(agents) if agents is not None else list(gamma)
    union = _union_vocabulary(gamma)
    relevant: Set[Formula] = set(union)
    for alpha in union:
        relevant.update(Atom(name) for name in atoms_of(alpha))
    relevant.update(Atom(name) for name in atoms_of(phi0))
    relevant.update(f for f in subformulas(phi0) if is_l0(f))
    relevant.update(ExplicitBelief(i, alpha) for i in agent_ids for alpha in union)
    return relevant


def ratoms(gamma: Vocabulary, phi0: Formula, agents: Optional[Iterable[AgentId]] = None) -> int:
    """Number of relevant atoms of the instance (Γ, φ0)"""
    count = len(relevant_formulas(gamma, phi0, agents))
    logger.debug("ratoms = %d", count)
    return count


def state_count_exponent(gamma: Vocabulary, phi0: Formula, atoms: Sequence[str],
                         agents: Sequence[AgentId]) -> int:
    """Base-2 exponent of 2^|Atm| × (2^ratoms)^|Agt|"""
    return len(atoms) + len(agents) * ratoms(gamma, phi0, agents)


def agents_of(phi: Formula) -> AbstractSet[AgentId]:
    return {f.agent for f in subformulas(phi) if hasattr(f, "agent")}
