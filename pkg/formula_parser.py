"""
Concrete syntax for formulas and problem instances

Formula text (precedence from tightest: ~ and the prefix modalities, &, |, ^,
->, <->; -> associates to the right, the others to the left):

    K 1 (p & q)          at-least belief      W 1 p      at-most belief
    B 2 vote(1,c2)       explicit belief      O 2 ~p     only believing
    [+2 p] K 2 p         private expansion

Instance files are JSON documents with keys agents, atoms, gamma, base,
valuation and query; gamma and base map agent ids (as strings) to lists of
formula strings.
"""

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Mapping, Sequence, Tuple

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from belief_semantics import State, UniversalContext, VocabularyProfile
from checker_errors import FormulaError, FormulaSyntaxError, InstanceError
from logic_core import (
    BOTTOM, TOP, And, AtLeast, AtMost, Atom, Bottom, Expand, ExplicitBelief, Formula, Iff,
    Implies, Not, Only, Or, Top, Xor, agents_of, atoms_of, is_l0,
)
from validation_utils import validate_instance_document

logger = logging.getLogger(__name__)

FORMULA_GRAMMAR = r"""
?start: iff

?iff: imp
    | iff "<->" imp                 -> iff

?imp: xor
    | xor "->" imp                  -> implies

?xor: disj
    | xor "^" disj                  -> xor

?disj: conj
    | disj "|" conj                 -> disj

?conj: unary
    | conj "&" unary                -> conj

?unary: primary
    | "~" unary                     -> neg
    | "B" INT unary                 -> explicit
    | "K" INT unary                 -> at_least
    | "W" INT unary                 -> at_most
    | "O" INT unary                 -> only
    | "[" "+" INT iff "]" unary     -> expand

?primary: "true"                    -> top
    | "false"                       -> bottom
    | atom
    | "(" iff ")"

atom: IDENT ("(" arg ("," arg)* ")")?
?arg: IDENT | INT

IDENT: /[A-Za-z_][A-Za-z0-9_]*/
INT: /[0-9]+/

%import common.WS
%ignore WS
"""


def _agent(token) -> int:
    agent = int(token)
    if agent < 1:
        raise FormulaError(f"agent ids are positive integers, got {token}")
    return agent


def _l0(phi: Formula, where: str) -> Formula:
    if not is_l0(phi):
        raise FormulaError(f"{where} must be modal-free, got {print_formula(phi)}")
    return phi


@v_args(inline=True)
class _FormulaBuilder(Transformer):
    """Builds logic_core nodes while the LALR parser reduces"""

    def top(self):
        return TOP

    def bottom(self):
        return BOTTOM

    def atom(self, name, *args):
        if args:
            return Atom(f"{name}({','.join(str(a) for a in args)})")
        return Atom(str(name))

    def neg(self, body):
        return Not(body)

    def conj(self, left, right):
        return And(left, right)

    def disj(self, left, right):
        return Or(left, right)

    def xor(self, left, right):
        return Xor(left, right)

    def implies(self, left, right):
        return Implies(left, right)

    def iff(self, left, right):
        return Iff(left, right)

    def explicit(self, agent, body):
        return ExplicitBelief(_agent(agent), _l0(body, "explicit belief body"))

    def at_least(self, agent, body):
        return AtLeast(_agent(agent), body)

    def at_most(self, agent, body):
        return AtMost(_agent(agent), body)

    def only(self, agent, body):
        return Only(_agent(agent), body)

    def expand(self, agent, info, body):
        return Expand(_agent(agent), _l0(info, "expansion formula"), body)


@lru_cache(maxsize=1)
def _parser() -> Lark:
    return Lark(FORMULA_GRAMMAR, parser="lalr", transformer=_FormulaBuilder(), maybe_placeholders=False)


def parse_formula(text: str) -> Formula:
    """Parse formula text into a hash-consed AST

    Raises:
        FormulaSyntaxError: text does not follow the grammar
        FormulaError: agent id 0, or a modal operator inside B or an expansion
    """
    if not isinstance(text, str):
        raise FormulaSyntaxError(f"formula must be a string, got {type(text).__name__}")
    try:
        return _parser().parse(text)
    except VisitError as e:
        if isinstance(e.orig_exc, FormulaError):
            raise e.orig_exc from None
        raise
    except UnexpectedEOF as e:
        raise FormulaSyntaxError("unexpected end of formula", None, None, e.expected) from None
    except UnexpectedToken as e:
        raise FormulaSyntaxError(f"unexpected token {e.token!r}", e.line, e.column, e.expected) from None
    except UnexpectedCharacters as e:
        raise FormulaSyntaxError(f"unexpected character {text[e.pos_in_stream]!r}", e.line, e.column,
                                 e.allowed or ()) from None
    except UnexpectedInput as e:
        raise FormulaSyntaxError(str(e), getattr(e, "line", None), getattr(e, "column", None)) from None


# Printer precedence levels; higher binds tighter
_IFF, _IMP, _XOR, _OR, _AND, _UNARY, _ATOMIC = range(7)
_BINARY = {Iff: (_IFF, "<->"), Implies: (_IMP, "->"), Xor: (_XOR, "^"), Or: (_OR, "|"), And: (_AND, "&")}
_MODAL_KEYWORDS = {ExplicitBelief: "B", AtLeast: "K", AtMost: "W", Only: "O"}


def _level(phi: Formula) -> int:
    entry = _BINARY.get(type(phi))
    if entry is not None:
        return entry[0]
    if isinstance(phi, (Atom, Top, Bottom)):
        return _ATOMIC
    return _UNARY


def _wrap(phi: Formula, parenthesize: bool, memo: Dict[Formula, str]) -> str:
    text = _render(phi, memo)
    return f"({text})" if parenthesize else text


def _render(phi: Formula, memo: Dict[Formula, str]) -> str:
    cached = memo.get(phi)
    if cached is not None:
        return cached
    if isinstance(phi, Atom):
        text = phi.name
    elif isinstance(phi, Top):
        text = "true"
    elif isinstance(phi, Bottom):
        text = "false"
    elif isinstance(phi, Not):
        text = "~" + _wrap(phi.body, _level(phi.body) < _UNARY, memo)
    elif type(phi) in _MODAL_KEYWORDS:
        body = _wrap(phi.body, _level(phi.body) < _UNARY, memo)
        text = f"{_MODAL_KEYWORDS[type(phi)]} {phi.agent} {body}"
    elif isinstance(phi, Expand):
        body = _wrap(phi.body, _level(phi.body) < _UNARY, memo)
        text = f"[+{phi.agent} {_render(phi.info, memo)}] {body}"
    else:
        level, symbol = _BINARY[type(phi)]
        left_level, right_level = _level(phi.left), _level(phi.right)
        if isinstance(phi, Implies):
            left = _wrap(phi.left, left_level <= level, memo)
            right = _wrap(phi.right, right_level < level, memo)
        else:
            left = _wrap(phi.left, left_level < level, memo)
            right = _wrap(phi.right, right_level <= level, memo)
        text = f"{left} {symbol} {right}"
    memo[phi] = text
    return text


def print_formula(phi: Formula) -> str:
    """Grammar-conformant text; parse_formula(print_formula(φ)) is φ"""
    return _render(phi, {})


@dataclass(frozen=True)
class ProblemInstance:
    """A model-checking problem: Γ, the actual state S0 ∈ S_Γ and the query φ0"""
    agents: Tuple[int, ...]
    atoms: Tuple[str, ...]
    vocab: VocabularyProfile
    initial_state: State
    query: Formula

    def relevant_atoms(self) -> Tuple[str, ...]:
        """Declared atoms that occur in Γ or the query, in declaration order"""
        used = set(atoms_of(self.query))
        for formulas in self.vocab.values():
            for alpha in formulas:
                used |= atoms_of(alpha)
        return tuple(name for name in self.atoms if name in used)

    def context(self) -> UniversalContext:
        return UniversalContext(self.vocab, self.relevant_atoms(), self.agents)

    def with_query(self, query: Formula) -> "ProblemInstance":
        return ProblemInstance(self.agents, self.atoms, self.vocab, self.initial_state, query)


def _check_formula(phi: Formula, agents: Sequence[int], atoms: set, where: str) -> None:
    unknown_agents = sorted(agents_of(phi) - set(agents))
    if unknown_agents:
        raise InstanceError("unknown-agent", f"{where} mentions agent {unknown_agents[0]}")
    unknown_atoms = sorted(atoms_of(phi) - atoms)
    if unknown_atoms:
        raise InstanceError("unknown-atom", f"{where} mentions undeclared atom {unknown_atoms[0]}")


def _parse_agent_map(field: str, raw: Mapping[str, List[str]], agents: Sequence[int],
                     atoms: set) -> Dict[int, List[Formula]]:
    parsed: Dict[int, List[Formula]] = {agent: [] for agent in agents}
    for key, texts in raw.items():
        agent = int(key)
        if agent not in agents:
            raise InstanceError("unknown-agent", f"{field} has entries for agent {agent}")
        for text in texts:
            alpha = parse_formula(text)
            if not is_l0(alpha):
                raise InstanceError("schema", f"{field}[{agent}] element {text!r} is not modal-free")
            _check_formula(alpha, agents, atoms, f"{field}[{agent}]")
            parsed[agent].append(alpha)
    return parsed


def instance_from_document(data: Any) -> ProblemInstance:
    """Validate a decoded instance document and build the ProblemInstance

    Raises:
        InstanceError: schema violation, unknown agent or atom, or B_i ⊄ Γ_i
        FormulaSyntaxError: a formula string does not parse
    """
    ok, error = validate_instance_document(data)
    if not ok:
        raise InstanceError("schema", error)

    agents = tuple(range(1, data["agents"] + 1))
    atoms = tuple(data["atoms"])
    atom_set = set(atoms)

    gamma = _parse_agent_map("gamma", data["gamma"], agents, atom_set)
    bases = _parse_agent_map("base", data["base"], agents, atom_set)
    for agent, base in bases.items():
        outside = [alpha for alpha in base if alpha not in set(gamma[agent])]
        if outside:
            raise InstanceError("base-outside-vocabulary",
                                f"B_{agent} holds {print_formula(outside[0])}, which is not in Γ_{agent}")

    valuation = frozenset(data["valuation"])
    if not valuation <= atom_set:
        raise InstanceError("unknown-atom", f"valuation mentions {sorted(valuation - atom_set)[0]}")

    query = parse_formula(data["query"])
    _check_formula(query, agents, atom_set, "query")

    instance = ProblemInstance(agents, atoms, VocabularyProfile(gamma), State(bases, valuation), query)
    logger.debug("parsed instance: %d agents, %d atoms, |Γ| = %d",
                 len(agents), len(atoms), instance.vocab.bit_width)
    return instance


def parse_instance(document: str) -> ProblemInstance:
    """Parse and fully validate an instance document"""
    try:
        data = json.loads(document)
    except (json.JSONDecodeError, TypeError) as e:
        raise InstanceError("schema", f"not a JSON document: {e}") from None
    return instance_from_document(data)


def instance_document(instance: ProblemInstance) -> Dict[str, Any]:
    """The JSON-ready document for an instance; parse_instance reads it back unchanged"""
    state = instance.initial_state
    return {
        "agents": len(instance.agents),
        "atoms": list(instance.atoms),
        "gamma": {str(agent): [print_formula(alpha) for alpha in instance.vocab.get(agent, ())]
                  for agent in instance.agents},
        "base": {str(agent): [print_formula(alpha) for alpha in instance.vocab.get(agent, ())
                              if alpha in state.base(agent)]
                 for agent in instance.agents},
        "valuation": [name for name in instance.atoms if name in state.valuation],
        "query": print_formula(instance.query),
    }


def dump_instance(instance: ProblemInstance) -> str:
    return json.dumps(instance_document(instance), indent=2, ensure_ascii=False) + "\n"
