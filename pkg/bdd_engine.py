"""
Reduced ordered binary decision diagrams over leveled variables

A BddStore owns a unique table and its memo caches. Node-refs are ints:
0 is the false terminal, 1 the true terminal, anything else indexes the
store's node arrays. Variables are ordered level by level, which keeps each
quantified block X_k contiguous.
"""

import logging
import sys
import time
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from checker_errors import BddError, ResourceLimitExceeded
from qbf_translation import (
    LeveledVar, QAnd, QbfFormula, QConst, QExists, QForAll, QImplies, QNot, QOr, QVar,
)

logger = logging.getLogger(__name__)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

FALSE = 0
TRUE = 1
OPERATORS = ("and", "or", "implies", "xor")
_COMMUTATIVE = {"and", "or", "xor"}
_DEADLINE_STRIDE = 4096


class BddStore:
    """Unique table, node arrays and per-store caches for one variable order

    Attributes:
        order: The VarOrder, a tuple of LeveledVar
        stats: Counters in the style {'nodes': ..., 'apply_hits': ...}
    """

    def __init__(self, order: Sequence[LeveledVar], node_limit: Optional[int] = None,
                 deadline: Optional[float] = None):
        self.order: Tuple[LeveledVar, ...] = tuple(order)
        self.position: Dict[LeveledVar, int] = {var: i for i, var in enumerate(self.order)}
        if len(self.position) != len(self.order):
            raise BddError("variable order lists a variable twice")
        terminal_level = len(self.order)
        self._var: List[int] = [terminal_level, terminal_level]
        self._low: List[int] = [FALSE, TRUE]
        self._high: List[int] = [FALSE, TRUE]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self._apply_cache: Dict[Tuple[str, int, int], int] = {}
        self._not_cache: Dict[int, int] = {}
        self._quant_cache: Dict[Tuple[str, FrozenSet[int], int], int] = {}
        self._relprod_cache: Dict[Tuple[FrozenSet[int], int, int], int] = {}
        self.node_limit = node_limit
        self.deadline = deadline
        self.stats: Dict[str, int] = {
            "nodes": 2,
            "apply_hits": 0,
            "apply_misses": 0,
            "quantify_hits": 0,
        }

    def __len__(self) -> int:
        return len(self._var)

    @property
    def peak_nodes(self) -> int:
        # nodes are never collected, so the store size is the peak
        return len(self._var)

    def _check_ref(self, a: int) -> None:
        if not isinstance(a, int) or not 0 <= a < len(self._var):
            raise BddError(f"node-ref {a!r} does not belong to this store")

    def _check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceLimitExceeded("timeout", f"time budget exhausted at {len(self._var)} BDD nodes")

    def mk(self, var: int, low: int, high: int) -> int:
        """The unique node (var, low, high); low == high collapses"""
        if low == high:
            return low
        key = (var, low, high)
        node = self._unique.get(key)
        if node is not None:
            return node
        node = len(self._var)
        if self.node_limit is not None and node >= self.node_limit:
            raise ResourceLimitExceeded("nodes", f"BDD node limit {self.node_limit} reached")
        if node % _DEADLINE_STRIDE == 0:
            self._check_deadline()
        self._var.append(var)
        self._low.append(low)
        self._high.append(high)
        self._unique[key] = node
        self.stats["nodes"] = node + 1
        return node

    def var(self, v: LeveledVar) -> int:
        position = self.position.get(v)
        if position is None:
            raise BddError(f"unknown variable {v.name}")
        return self.mk(position, FALSE, TRUE)

    def top_var(self, a: int) -> int:
        return self._var[a]

    def low(self, a: int) -> int:
        return self._low[a]

    def high(self, a: int) -> int:
        return self._high[a]

    def not_(self, a: int) -> int:
        if a <= TRUE:
            return TRUE - a
        cached = self._not_cache.get(a)
        if cached is None:
            cached = self.mk(self._var[a], self.not_(self._low[a]), self.not_(self._high[a]))
            self._not_cache[a] = cached
        return cached

    def _terminal_case(self, op: str, a: int, b: int) -> Optional[int]:
        if op == "and":
            if a == FALSE or b == FALSE:
                return FALSE
            if a == TRUE or a == b:
                return b
            if b == TRUE:
                return a
        elif op == "or":
            if a == TRUE or b == TRUE:
                return TRUE
            if a == FALSE or a == b:
                return b
            if b == FALSE:
                return a
        elif op == "xor":
            if a == b:
                return FALSE
            if a == FALSE:
                return b
            if b == FALSE:
                return a
            if a == TRUE:
                return self.not_(b)
            if b == TRUE:
                return self.not_(a)
        else:
            if a == FALSE or b == TRUE or a == b:
                return TRUE
            if a == TRUE:
                return b
            if b == FALSE:
                return self.not_(a)
        return None

    def apply(self, op: str, a: int, b: int) -> int:
        """Canonical node of `a op b`"""
        if op not in OPERATORS:
            raise BddError(f"unknown operator {op!r}")
        self._check_ref(a)
        self._check_ref(b)
        return self._apply(op, a, b)

    def _apply(self, op: str, a: int, b: int) -> int:
        terminal = self._terminal_case(op, a, b)
        if terminal is not None:
            return terminal
        if op in _COMMUTATIVE and a > b:
            a, b = b, a
        key = (op, a, b)
        cached = self._apply_cache.get(key)
        if cached is not None:
            self.stats["apply_hits"] += 1
            return cached
        self.stats["apply_misses"] += 1
        va, vb = self._var[a], self._var[b]
        top = min(va, vb)
        a0, a1 = (self._low[a], self._high[a]) if va == top else (a, a)
        b0, b1 = (self._low[b], self._high[b]) if vb == top else (b, b)
        result = self.mk(top, self._apply(op, a0, b0), self._apply(op, a1, b1))
        self._apply_cache[key] = result
        return result

    def _positions(self, variables: Iterable[LeveledVar]) -> FrozenSet[int]:
        positions = []
        for v in variables:
            position = self.position.get(v)
            if position is None:
                raise BddError(f"unknown variable {v.name}")
            positions.append(position)
        return frozenset(positions)

    def quantify(self, kind: str, variables: Iterable[LeveledVar], a: int) -> int:
        """∀ (kind 'forall') or ∃ (kind 'exists') over a block of variables"""
        if kind not in ("forall", "exists"):
            raise BddError(f"unknown quantifier {kind!r}")
        self._check_ref(a)
        positions = self._positions(variables)
        if not positions:
            return a
        key = (kind, positions, a)
        cached = self._quant_cache.get(key)
        if cached is not None:
            self.stats["quantify_hits"] += 1
            return cached
        op = "and" if kind == "forall" else "or"
        result = self._quantify(op, positions, max(positions), a, {})
        self._quant_cache[key] = result
        return result

    def _quantify(self, op: str, positions: FrozenSet[int], last: int, a: int, memo: Dict[int, int]) -> int:
        if a <= TRUE or self._var[a] > last:
            return a
        cached = memo.get(a)
        if cached is not None:
            return cached
        var = self._var[a]
        low = self._quantify(op, positions, last, self._low[a], memo)
        if var in positions:
            absorbing = FALSE if op == "and" else TRUE
            if low == absorbing:
                result = low
            else:
                result = self._apply(op, low, self._quantify(op, positions, last, self._high[a], memo))
        else:
            result = self.mk(var, low, self._quantify(op, positions, last, self._high[a], memo))
        memo[a] = result
        return result

    def and_exists(self, variables: Iterable[LeveledVar], a: int, b: int) -> int:
        """∃V (a ∧ b) without building the conjunction first"""
        self._check_ref(a)
        self._check_ref(b)
        positions = self._positions(variables)
        if not positions:
            return self._apply("and", a, b)
        return self._and_exists(positions, max(positions), a, b)

    def _and_exists(self, positions: FrozenSet[int], last: int, a: int, b: int) -> int:
        if a == FALSE or b == FALSE:
            return FALSE
        if a == TRUE and b == TRUE:
            return TRUE
        if a == TRUE or a == b:
            return self.quantify("exists", (self.order[p] for p in positions), b)
        if b == TRUE:
            return self.quantify("exists", (self.order[p] for p in positions), a)
        if a > b:
            a, b = b, a
        va, vb = self._var[a], self._var[b]
        top = min(va, vb)
        if top > last:
            return self._apply("and", a, b)
        key = (positions, a, b)
        cached = self._relprod_cache.get(key)
        if cached is not None:
            return cached
        a0, a1 = (self._low[a], self._high[a]) if va == top else (a, a)
        b0, b1 = (self._low[b], self._high[b]) if vb == top else (b, b)
        low = self._and_exists(positions, last, a0, b0)
        if top in positions:
            result = TRUE if low == TRUE else self._apply("or", low, self._and_exists(positions, last, a1, b1))
        else:
            result = self.mk(top, low, self._and_exists(positions, last, a1, b1))
        self._relprod_cache[key] = result
        return result

    def restrict(self, a: int, assignment: Mapping[LeveledVar, bool]) -> int:
        """Cofactor of a by a partial assignment"""
        self._check_ref(a)
        values = {self.position[v]: bool(value) for v, value in assignment.items() if v in self.position}
        memo: Dict[int, int] = {}

        def walk(node: int) -> int:
            if node <= TRUE:
                return node
            cached = memo.get(node)
            if cached is not None:
                return cached
            var = self._var[node]
            if var in values:
                result = walk(self._high[node] if values[var] else self._low[node])
            else:
                result = self.mk(var, walk(self._low[node]), walk(self._high[node]))
            memo[node] = result
            return result

        return walk(a)

    def evaluate(self, a: int, assignment: Mapping[LeveledVar, bool]) -> bool:
        """Follow the path selected by the assignment to a terminal"""
        self._check_ref(a)
        node = a
        while node > TRUE:
            var = self.order[self._var[node]]
            if var not in assignment:
                raise BddError(f"assignment misses {var.name}")
            node = self._high[node] if assignment[var] else self._low[node]
        return node == TRUE

    def sat_count(self, a: int, nvars: Optional[int] = None) -> int:
        """Number of satisfying assignments over the first nvars variables of the order"""
        self._check_ref(a)
        width = len(self.order) if nvars is None else nvars
        memo: Dict[int, int] = {}

        def count(node: int) -> int:
            # assignments to the variables from this node's level downwards
            if node <= TRUE:
                return node
            cached = memo.get(node)
            if cached is None:
                var = self._var[node]
                low, high = self._low[node], self._high[node]
                cached = (count(low) << (self._level(low, width) - var - 1)) + \
                         (count(high) << (self._level(high, width) - var - 1))
                memo[node] = cached
            return cached

        return count(a) << self._level(a, width)

    def _level(self, node: int, width: int) -> int:
        return width if node <= TRUE else self._var[node]

    def support(self, a: int) -> List[LeveledVar]:
        seen = set()
        positions = set()
        stack = [a]
        while stack:
            node = stack.pop()
            if node <= TRUE or node in seen:
                continue
            seen.add(node)
            positions.add(self._var[node])
            stack.extend((self._low[node], self._high[node]))
        return [self.order[p] for p in sorted(positions)]

    def audit(self) -> List[str]:
        """Reduction and ordering violations in the store (empty when canonical)"""
        problems = []
        seen: Dict[Tuple[int, int, int], int] = {}
        for node in range(2, len(self._var)):
            var, low, high = self._var[node], self._low[node], self._high[node]
            if low == high:
                problems.append(f"node {node} is redundant (low == high)")
            if self._var[low] <= var or self._var[high] <= var:
                problems.append(f"node {node} breaks the variable order")
            triple = (var, low, high)
            if triple in seen:
                problems.append(f"nodes {seen[triple]} and {node} share the triple {triple}")
            seen[triple] = node
            if self._unique.get(triple) != node:
                problems.append(f"node {node} is missing from the unique table")
        return problems

    def clear_caches(self) -> None:
        self._apply_cache.clear()
        self._not_cache.clear()
        self._quant_cache.clear()
        self._relprod_cache.clear()

    def to_dot(self, a: int) -> str:
        """Graphviz text of the diagram rooted at a"""
        self._check_ref(a)
        lines = ["digraph bdd {", '  0 [shape=box, label="0"];', '  1 [shape=box, label="1"];']
        seen = set()
        stack = [a]
        while stack:
            node = stack.pop()
            if node <= TRUE or node in seen:
                continue
            seen.add(node)
            label = self.order[self._var[node]].name.replace('"', '\\"')
            lines.append(f'  {node} [label="{label}"];')
            lines.append(f"  {node} -> {self._low[node]} [style=dashed];")
            lines.append(f"  {node} -> {self._high[node]};")
            stack.extend((self._low[node], self._high[node]))
        lines.append("}")
        return "\n".join(lines) + "\n"


def build(psi: QbfFormula, store: BddStore) -> int:
    """Bottom-up BDD of a QBF; quantifier blocks are eliminated as soon as their body is built"""
    memo: Dict[QbfFormula, int] = {}

    def visit(node: QbfFormula) -> int:
        cached = memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, QConst):
            result = TRUE if node.value else FALSE
        elif isinstance(node, QVar):
            result = store.var(node.var)
        elif isinstance(node, QNot):
            result = store.not_(visit(node.body))
        elif isinstance(node, QAnd):
            left = visit(node.left)
            result = FALSE if left == FALSE else store._apply("and", left, visit(node.right))
        elif isinstance(node, QOr):
            left = visit(node.left)
            result = TRUE if left == TRUE else store._apply("or", left, visit(node.right))
        elif isinstance(node, QImplies):
            left = visit(node.left)
            result = TRUE if left == FALSE else store._apply("implies", left, visit(node.right))
        elif isinstance(node, QForAll) and isinstance(node.body, QImplies):
            # ∀X (a → b) = ¬∃X (a ∧ ¬b)
            guard = visit(node.body.left)
            if guard == FALSE:
                result = TRUE
            else:
                result = store.not_(store.and_exists(node.block, guard, store.not_(visit(node.body.right))))
        elif isinstance(node, QExists) and isinstance(node.body, QAnd):
            left = visit(node.body.left)
            result = FALSE if left == FALSE else store.and_exists(node.block, left, visit(node.body.right))
        elif isinstance(node, (QForAll, QExists)):
            kind = "forall" if isinstance(node, QForAll) else "exists"
            result = store.quantify(kind, node.block, visit(node.body))
        else:
            raise BddError(f"unknown QBF node {type(node).__name__}")
        memo[node] = result
        store._check_deadline()
        return result

    return visit(psi)
