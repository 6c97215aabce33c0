"""
Belief-base semantics: states, the computed epistemic relation, the
universal context S_Γ, and the explicit-state model checker

The checker decides (S, S_Γ) ⊨ φ by the recursive algorithm over the
enumerated context. Sets of context states are Python ints used as bitsets,
so each modal operator is decided once for every state instead of
re-enumerating the context per call.
"""

import logging
from collections.abc import Mapping as MappingABC
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Tuple

from checker_errors import EnumerationCapExceeded, FormulaError
from logic_core import (
    And, AtLeast, AtMost, Atom, Bottom, Expand, ExplicitBelief, Formula, Iff, Implies,
    Not, Only, Or, Top, Xor, is_l0,
)

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 24  # bits: Σ|Γ_i| + |atoms|


@dataclass(frozen=True)
class State:
    """A state ((B_i)_i, V): one belief base per agent plus a valuation"""
    bases: Mapping[int, FrozenSet[Formula]]
    valuation: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        frozen = {agent: frozenset(base) for agent, base in self.bases.items()}
        object.__setattr__(self, "bases", MappingProxyType(frozen))
        object.__setattr__(self, "valuation", frozenset(self.valuation))

    def __hash__(self):
        return hash((frozenset(self.bases.items()), self.valuation))

    def base(self, agent: int) -> FrozenSet[Formula]:
        return self.bases.get(agent, frozenset())


class VocabularyProfile(MappingABC):
    """Γ: a finite vocabulary of candidate explicit beliefs per agent, kept in insertion order"""

    def __init__(self, vocab: Mapping[int, Iterable[Formula]]):
        self._vocab: Dict[int, Tuple[Formula, ...]] = {
            agent: tuple(dict.fromkeys(formulas)) for agent, formulas in vocab.items()
        }
        self._members = {agent: frozenset(formulas) for agent, formulas in self._vocab.items()}

    def __getitem__(self, agent: int) -> Tuple[Formula, ...]:
        return self._vocab[agent]

    def __iter__(self) -> Iterator[int]:
        return iter(self._vocab)

    def __len__(self) -> int:
        return len(self._vocab)

    def __repr__(self) -> str:
        return f"VocabularyProfile({ {a: len(v) for a, v in self._vocab.items()} })"

    def members(self, agent: int) -> FrozenSet[Formula]:
        return self._members.get(agent, frozenset())

    def contains(self, agent: int, alpha: Formula) -> bool:
        return alpha in self._members.get(agent, ())

    @property
    def bit_width(self) -> int:
        return sum(len(formulas) for formulas in self._vocab.values())


def _require_l0(alpha: Formula) -> None:
    if not is_l0(alpha):
        raise FormulaError(f"expected a modal-free (L0) formula, got {alpha}")


def _sat0(state: State, alpha: Formula) -> bool:
    if isinstance(alpha, Atom):
        return alpha.name in state.valuation
    if isinstance(alpha, Top):
        return True
    if isinstance(alpha, Bottom):
        return False
    if isinstance(alpha, Not):
        return not _sat0(state, alpha.body)
    if isinstance(alpha, And):
        return _sat0(state, alpha.left) and _sat0(state, alpha.right)
    if isinstance(alpha, Or):
        return _sat0(state, alpha.left) or _sat0(state, alpha.right)
    if isinstance(alpha, Implies):
        return (not _sat0(state, alpha.left)) or _sat0(state, alpha.right)
    if isinstance(alpha, Iff):
        return _sat0(state, alpha.left) == _sat0(state, alpha.right)
    if isinstance(alpha, Xor):
        return _sat0(state, alpha.left) != _sat0(state, alpha.right)
    if isinstance(alpha, ExplicitBelief):
        return alpha.body in state.base(alpha.agent)
    raise FormulaError(f"not an L0 formula: {type(alpha).__name__}")


def sat0(state: State, alpha: Formula) -> bool:
    """S ⊨ α for modal-free α; explicit belief is syntactic membership in B_i"""
    _require_l0(alpha)
    return _sat0(state, alpha)


def epistemic_related(state: State, other: State, agent: int) -> bool:
    """S ≀_i S': S' satisfies every formula in B_i(S)"""
    return all(_sat0(other, alpha) for alpha in state.base(agent))


def expand_state(state: State, agent: int, alpha: Formula) -> State:
    """S^{+_i α}: B_i becomes B_i ∪ {α}, everything else unchanged"""
    _require_l0(alpha)
    bases = dict(state.bases)
    bases[agent] = state.base(agent) | {alpha}
    return State(bases, state.valuation)


@dataclass(frozen=True)
class UniversalContext:
    """S_Γ: every state whose bases are drawn from Γ, valuations over the relevant atoms

    Bit layout of a state index, most significant first: one bit per atom,
    then one bit per (agent, α ∈ Γ_i) in agent and vocabulary order.
    """
    profile: VocabularyProfile
    atoms: Tuple[str, ...]
    agents: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        agents = tuple(self.agents) or tuple(self.profile)
        object.__setattr__(self, "agents", agents)

    @property
    def variables(self) -> List[Tuple]:
        layout: List[Tuple] = [("atom", name) for name in self.atoms]
        for agent in self.agents:
            layout.extend(("belief", agent, alpha) for alpha in self.profile.get(agent, ()))
        return layout

    @property
    def bit_width(self) -> int:
        return len(self.atoms) + sum(len(self.profile.get(a, ())) for a in self.agents)

    def state_at(self, index: int) -> State:
        width = self.bit_width
        valuation = set()
        bases: Dict[int, set] = {agent: set() for agent in self.agents}
        for position, variable in enumerate(self.variables):
            if (index >> (width - 1 - position)) & 1:
                if variable[0] == "atom":
                    valuation.add(variable[1])
                else:
                    bases[variable[1]].add(variable[2])
        return State(bases, frozenset(valuation))


def _check_cap(ctx: UniversalContext, cap: int) -> None:
    if ctx.bit_width > cap:
        raise EnumerationCapExceeded(ctx.bit_width, cap)


def enumerate_context(ctx: UniversalContext, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[State]:
    """Yield every state of S_Γ exactly once, in lexicographic bit order"""
    _check_cap(ctx, cap)
    for index in range(1 << ctx.bit_width):
        yield ctx.state_at(index)


def _bit_mask(width: int, bit: int) -> int:
    """Bitset over all 2^width state indexes of those having `bit` set"""
    half = 1 << bit
    period = half << 1
    block = ((1 << half) - 1) << half
    return block * (((1 << (1 << width)) - 1) // ((1 << period) - 1))


class ContextLabeller:
    """Extensions of formulas over an enumerated context, plus pointwise truth

    ext(φ) is the bitset of context states satisfying φ. holds(S, φ) decides φ
    at an arbitrary state S, which may lie outside the context after an
    expansion; modal operators at S quantify over ext of their body.
    """

    def __init__(self, ctx: UniversalContext, cap: int = DEFAULT_ENUMERATION_CAP):
        _check_cap(ctx, cap)
        self.ctx = ctx
        self.width = ctx.bit_width
        self.full = (1 << (1 << self.width)) - 1
        self._masks: Dict[Tuple, int] = {}
        self._bits: Dict[Tuple, int] = {}
        for position, variable in enumerate(ctx.variables):
            bit = self.width - 1 - position
            key = variable if variable[0] == "atom" else (variable[1], variable[2])
            self._bits[key] = bit
            self._masks[key] = _bit_mask(self.width, bit)
        self._ext: Dict[Formula, int] = {}
        self._rel: Dict[FrozenSet[Formula], int] = {}
        self._groups: Dict[int, List[Tuple[FrozenSet[Formula], int]]] = {}
        logger.debug("labeller over %d states (%d bits)", 1 << self.width, self.width)

    def related_mask(self, base: FrozenSet[Formula]) -> int:
        """Context states satisfying every formula of `base`"""
        cached = self._rel.get(base)
        if cached is None:
            cached = self.full
            for alpha in base:
                cached &= self.ext(alpha)
            self._rel[base] = cached
        return cached

    def _base_groups(self, agent: int) -> List[Tuple[FrozenSet[Formula], int]]:
        """Partition of the context by agent's base B_i ⊆ Γ_i"""
        groups = self._groups.get(agent)
        if groups is None:
            groups = [(frozenset(), self.full)]
            for alpha in self.ctx.profile.get(agent, ()):
                mask = self._masks[(agent, alpha)]
                split = []
                for base, states in groups:
                    with_alpha = states & mask
                    if states ^ with_alpha:
                        split.append((base, states ^ with_alpha))
                    if with_alpha:
                        split.append((base | {alpha}, with_alpha))
                groups = split
            self._groups[agent] = groups
        return groups

    def _modal_ext(self, agent: int, body: Formula, window: bool) -> int:
        bad = self.full ^ self.ext(body)
        result = 0
        for base, states in self._base_groups(agent):
            scope = self.related_mask(base)
            if window:
                scope = self.full ^ scope
            if not scope & bad:
                result |= states
        return result

    def ext(self, phi: Formula) -> int:
        cached = self._ext.get(phi)
        if cached is not None:
            return cached
        full = self.full
        if isinstance(phi, Atom):
            result = self._masks.get(("atom", phi.name), 0)
        elif isinstance(phi, Top):
            result = full
        elif isinstance(phi, Bottom):
            result = 0
        elif isinstance(phi, Not):
            result = full ^ self.ext(phi.body)
        elif isinstance(phi, And):
            result = self.ext(phi.left) & self.ext(phi.right)
        elif isinstance(phi, Or):
            result = self.ext(phi.left) | self.ext(phi.right)
        elif isinstance(phi, Implies):
            result = (full ^ self.ext(phi.left)) | self.ext(phi.right)
        elif isinstance(phi, Iff):
            result = full ^ (self.ext(phi.left) ^ self.ext(phi.right))
        elif isinstance(phi, Xor):
            result = self.ext(phi.left) ^ self.ext(phi.right)
        elif isinstance(phi, ExplicitBelief):
            result = self._masks.get((phi.agent, phi.body), 0)
        elif isinstance(phi, AtLeast):
            result = self._modal_ext(phi.agent, phi.body, window=False)
        elif isinstance(phi, AtMost):
            result = self._modal_ext(phi.agent, phi.body, window=True)
        elif isinstance(phi, Only):
            result = (self._modal_ext(phi.agent, phi.body, window=False)
                      & self._modal_ext(phi.agent, Not(phi.body), window=True))
        elif isinstance(phi, Expand):
            result = self._expand_ext(phi)
        else:
            raise FormulaError(f"unknown formula node {type(phi).__name__}")
        self._ext[phi] = result
        return result

    def _expand_ext(self, phi: Expand) -> int:
        _require_l0(phi.info)
        key = (phi.agent, phi.info)
        if key in self._bits:
            # the expanded state stays in the context: shift the body's states down
            bit, mask = self._bits[key], self._masks[key]
            hit = self.ext(phi.body) & mask
            return hit | (hit >> (1 << bit))
        result = 0
        for index in range(1 << self.width):
            state = expand_state(self.ctx.state_at(index), phi.agent, phi.info)
            if self.holds(state, phi.body):
                result |= 1 << index
        return result

    def holds(self, state: State, phi: Formula) -> bool:
        """(S, S_Γ) ⊨ φ for an arbitrary state S"""
        if isinstance(phi, (Atom, Top, Bottom, ExplicitBelief)):
            return _sat0(state, phi)
        if isinstance(phi, Not):
            return not self.holds(state, phi.body)
        if isinstance(phi, And):
            return self.holds(state, phi.left) and self.holds(state, phi.right)
        if isinstance(phi, Or):
            return self.holds(state, phi.left) or self.holds(state, phi.right)
        if isinstance(phi, Implies):
            return (not self.holds(state, phi.left)) or self.holds(state, phi.right)
        if isinstance(phi, Iff):
            return self.holds(state, phi.left) == self.holds(state, phi.right)
        if isinstance(phi, Xor):
            return self.holds(state, phi.left) != self.holds(state, phi.right)
        if isinstance(phi, (AtLeast, AtMost)):
            scope = self.related_mask(state.base(phi.agent))
            if isinstance(phi, AtMost):
                scope = self.full ^ scope
            return not scope & (self.full ^ self.ext(phi.body))
        if isinstance(phi, Only):
            return (self.holds(state, AtLeast(phi.agent, phi.body))
                    and self.holds(state, AtMost(phi.agent, Not(phi.body))))
        if isinstance(phi, Expand):
            return self.holds(expand_state(state, phi.agent, phi.info), phi.body)
        raise FormulaError(f"unknown formula node {type(phi).__name__}")

    def count(self, mask: int) -> int:
        return bin(mask).count("1")


def check_direct(state: State, ctx: UniversalContext, phi: Formula,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> bool:
    """(S, S_Γ) ⊨ φ by explicit enumeration of the context

    AtLeast quantifies over related context states, AtMost over unrelated
    ones, Expand recurses on the expanded state and Only is its definition.
    """
    labeller = ContextLabeller(ctx, cap)
    verdict = labeller.holds(state, phi)
    logger.debug("check_direct over %d bits -> %s", ctx.bit_width, verdict)
    return verdict
