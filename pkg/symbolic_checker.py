"""
End-to-end checking: dynamic reduction, the symbolic BDD pipeline, and
engine dispatch

The symbolic route is reduce dynamics → expand Only → prune against Γ →
translate with level 0 pinned to S0 → build the BDD with eager quantifier
elimination. The closed sentence collapses to a terminal, which is the
verdict.
"""

import logging
import time
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

from belief_semantics import DEFAULT_ENUMERATION_CAP, State, check_direct, expand_state
from bdd_engine import FALSE, TRUE, BddStore, build
from checker_errors import (
    BddError, EnumerationCapExceeded, InstanceError, ModelCheckError, ResourceLimitExceeded,
)
from formula_parser import ProblemInstance
from logic_core import (
    TOP, And, AtLeast, AtMost, Atom, Bottom, Expand, ExplicitBelief, Formula, Implies, Not,
    Only, Top, expand_only, is_dynamic_free, modal_depth, prune_to_vocabulary, ratoms,
)
from qbf_translation import level_vars, validity_sentence, translate

logger = logging.getLogger(__name__)

ENGINES = ("auto", "bdd", "enumerate")


@dataclass(frozen=True)
class ResourceLimits:
    """Per-check budget; exhausting it yields the KO verdict"""
    timeout: float = 600.0
    node_limit: Optional[int] = 50_000_000


@dataclass
class CheckStats:
    engine: str
    ratoms: int
    state_exponent: int
    peak_nodes: int = 0
    wall_ms: float = 0.0
    context_bits: int = 0

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class CheckResult:
    """verdict is True, False, or None for KO (resource budget exhausted)"""
    verdict: Optional[bool]
    stats: CheckStats
    reason: Optional[str] = None

    @property
    def label(self) -> str:
        if self.verdict is None:
            return "KO"
        return "TRUE" if self.verdict else "FALSE"


def _push_expansion(agent: int, info: Formula, phi: Formula, memo: Dict) -> Formula:
    """[+_agent info] phi for an Expand-free, Only-free phi"""
    key = (agent, info, phi)
    cached = memo.get(key)
    if cached is not None:
        return cached
    if isinstance(phi, (Atom, Top, Bottom)):
        result = phi
    elif isinstance(phi, ExplicitBelief):
        result = TOP if (phi.agent, phi.body) == (agent, info) else phi
    elif isinstance(phi, AtLeast):
        result = phi if phi.agent != agent else AtLeast(agent, Implies(info, phi.body))
    elif isinstance(phi, AtMost):
        if phi.agent != agent:
            result = phi
        else:
            result = And(AtLeast(agent, Implies(Not(info), phi.body)), phi)
    elif isinstance(phi, (Only, Expand)):
        raise ModelCheckError(f"{type(phi).__name__} reached the expansion rewrite")
    else:
        result = type(phi)(*(_push_expansion(agent, info, child, memo) for child in phi.children()))
    memo[key] = result
    return result


def reduce_dynamics(phi: Formula) -> Formula:
    """Expand-free equivalent of phi, rewriting innermost expansions first

    Only is expanded beforehand so each expansion meets K, W, B and the
    Boolean connectives. The ⊡ rule duplicates its body, so the result can
    grow exponentially in the number of nested expansions.
    """
    memo: Dict = {}
    reduced: Dict[Formula, Formula] = {}

    def visit(node: Formula) -> Formula:
        cached = reduced.get(node)
        if cached is not None:
            return cached
        if isinstance(node, Expand):
            result = _push_expansion(node.agent, node.info, visit(node.body), memo)
        elif isinstance(node, (AtLeast, AtMost, Only)):
            result = type(node)(node.agent, visit(node.body))
        elif isinstance(node, ExplicitBelief) or not node.children():
            result = node
        elif isinstance(node, Not):
            result = Not(visit(node.body))
        else:
            result = type(node)(visit(node.left), visit(node.right))
        reduced[node] = result
        return result

    return visit(expand_only(phi))


def _size_stats(inst: ProblemInstance, engine: str) -> CheckStats:
    count = ratoms(inst.vocab, inst.query, inst.agents)
    return CheckStats(engine=engine, ratoms=count,
                      state_exponent=len(inst.atoms) + len(inst.agents) * count,
                      context_bits=inst.context().bit_width)


def _decide_symbolic(inst: ProblemInstance, state: State, query: Formula, limits: ResourceLimits,
                     stats: CheckStats) -> bool:
    reduced = reduce_dynamics(query)
    pruned = prune_to_vocabulary(reduced, inst.vocab, extra=state.bases)
    work = ProblemInstance(inst.agents, inst.atoms, inst.vocab, state, pruned)
    logger.debug("pruned query against %d belief bits", inst.vocab.bit_width)

    sentence = translate(pruned, 0, work, pinned=state)
    depth = modal_depth(pruned)
    order = [var for k in range(depth + 1) for var in level_vars(work, k)]
    store = BddStore(order, node_limit=limits.node_limit, deadline=time.monotonic() + limits.timeout)
    try:
        root = build(sentence, store)
    finally:
        stats.peak_nodes = store.peak_nodes
    if root not in (FALSE, TRUE):
        raise BddError("pinned sentence did not reduce to a terminal")
    logger.debug("bdd store peaked at %d nodes over %d variables", store.peak_nodes, len(order))
    return root == TRUE


def _finish(result: CheckResult, started: float) -> CheckResult:
    result.stats.wall_ms = round((time.perf_counter() - started) * 1000.0, 3)
    logger.info("verdict %s (%s engine, %.1f ms)", result.label, result.stats.engine, result.stats.wall_ms)
    return result


def check_symbolic(inst: ProblemInstance, limits: Optional[ResourceLimits] = None) -> CheckResult:
    """Decide (S0, S_Γ) ⊨ φ0 through the QBF translation and BDDs

    Resource exhaustion is not an error here: it yields the KO verdict.
    """
    limits = limits or ResourceLimits()
    started = time.perf_counter()
    stats = _size_stats(inst, "bdd")
    try:
        verdict = _decide_symbolic(inst, inst.initial_state, inst.query, limits, stats)
        result = CheckResult(verdict, stats)
    except ResourceLimitExceeded as e:
        logger.warning("check gave up: %s", e)
        result = CheckResult(None, stats, reason=e.reason)
    return _finish(result, started)


def check_sentence(inst: ProblemInstance, limits: Optional[ResourceLimits] = None) -> bool:
    """Evaluate ∃X_0 (desc_{S0} ∧ tr_0(φ0)) with an unpinned translation

    Slower than check_symbolic; kept as the literal reading of the
    translation. φ0 must be Expand-free and S0 must lie in S_Γ.
    """
    limits = limits or ResourceLimits()
    work = inst.with_query(prune_to_vocabulary(expand_only(inst.query), inst.vocab))
    query = work.query
    sentence = validity_sentence(work.initial_state, query, work)
    order = [var for k in range(modal_depth(query) + 1) for var in level_vars(work, k)]
    store = BddStore(order, node_limit=limits.node_limit, deadline=time.monotonic() + limits.timeout)
    root = build(sentence, store)
    if root not in (FALSE, TRUE):
        raise BddError("closed sentence did not reduce to a terminal")
    return root == TRUE


def state_assignment(inst: ProblemInstance, state: State) -> Dict:
    """The X_0 assignment induced by desc_S"""
    for agent in inst.agents:
        if not state.base(agent) <= inst.vocab.members(agent):
            raise InstanceError("base-outside-vocabulary", f"B_{agent} is not a subset of Γ_{agent}")
    assignment = {}
    for var in level_vars(inst, 0):
        if var.kind == "prop":
            assignment[var] = var.atom in state.valuation
        else:
            assignment[var] = var.formula in state.base(var.agent)
    return assignment


def check_enumerate(inst: ProblemInstance, cap: int = DEFAULT_ENUMERATION_CAP) -> CheckResult:
    """Decide the instance with the explicit-state checker"""
    started = time.perf_counter()
    stats = _size_stats(inst, "enumerate")
    verdict = check_direct(inst.initial_state, inst.context(), inst.query, cap)
    return _finish(CheckResult(verdict, stats), started)


def check_dynamic_direct(inst: ProblemInstance, cap: int = DEFAULT_ENUMERATION_CAP,
                         limits: Optional[ResourceLimits] = None) -> bool:
    """Decide an L+ query by executing expansions on states

    Within the enumeration cap the explicit checker runs on the whole query.
    Beyond it, an outermost chain of expansions is applied to S0 and the
    static residue goes to the symbolic pipeline.

    Raises:
        EnumerationCapExceeded: context too large and expansions are nested inside the query
        ResourceLimitExceeded: the symbolic residue ran out of budget
    """
    ctx = inst.context()
    if ctx.bit_width <= cap:
        return check_direct(inst.initial_state, ctx, inst.query, cap)

    state, residue = inst.initial_state, inst.query
    while isinstance(residue, Expand):
        state = expand_state(state, residue.agent, residue.info)
        residue = residue.body
    if not is_dynamic_free(residue):
        raise EnumerationCapExceeded(ctx.bit_width, cap)
    logger.debug("executed outermost expansions; residue goes to the bdd engine")
    stats = _size_stats(inst, "bdd")
    return _decide_symbolic(inst, state, residue, limits or ResourceLimits(), stats)


def check_instance(inst: ProblemInstance, engine: str = "auto", limits: Optional[ResourceLimits] = None,
                   cap: int = DEFAULT_ENUMERATION_CAP) -> CheckResult:
    """Dispatch to an engine; auto enumerates under the cap and uses BDDs above it"""
    if engine not in ENGINES:
        raise ModelCheckError(f"unknown engine {engine!r}; choose one of {', '.join(ENGINES)}")
    if engine == "auto":
        engine = "enumerate" if inst.context().bit_width <= cap else "bdd"
    if engine == "enumerate":
        return check_enumerate(inst, cap)
    return check_symbolic(inst, limits)
