"""
Selection-committee scenario generators

n committee members vote secretly for one of m candidates c1..cm. Nobody may
vote for a co-author (f(i) = {c_i} in the benchmark family), and a candidate
is admitted to the interview when somebody voted for them. The first variant
gives every member the rules, their own vote and the admission outcome; the
second additionally lets member 1 explicitly believe what member 2 believes.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

from belief_semantics import State, VocabularyProfile
from formula_parser import ProblemInstance, dump_instance
from logic_core import (
    AtLeast, Atom, ExplicitBelief, Expand, Formula, Implies, Not, Only, Xor,
    balanced_conj, balanced_disj, conj,
)

logger = logging.getLogger(__name__)

VARIANTS = ("first", "second")
QUERY_NAMES = ("psi1", "psi2", "phi0", "example2", "chi0", "dynamic")

# Published size columns: n -> ratoms
PUBLISHED_RATOMS = {
    "first": {3: 100, 4: 164, 5: 244, 6: 340, 7: 452, 8: 580, 9: 724, 10: 884},
    "second": {3: 133, 4: 210, 5: 305, 6: 418, 7: 549, 8: 698, 9: 865, 10: 1050},
}


@dataclass(frozen=True)
class CommitteeConfig:
    """n agents, m candidates and the co-author function f (agent -> candidate indices)"""
    n: int
    m: Optional[int] = None
    coauthors: Optional[Mapping[int, FrozenSet[int]]] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"a committee needs at least one member, got n={self.n}")
        if self.m is None:
            object.__setattr__(self, "m", self.n)
        if self.coauthors is None:
            object.__setattr__(self, "coauthors", {i: frozenset({i}) for i in range(1, self.n + 1)
                                                   if i <= self.m})

    @property
    def agents(self) -> Tuple[int, ...]:
        return tuple(range(1, self.n + 1))

    @property
    def candidates(self) -> Tuple[int, ...]:
        return tuple(range(1, self.m + 1))

    def voted_for(self, agent: int) -> int:
        """Actual vote: c_{i+1}, and c_{n-1} for the last member"""
        return agent + 1 if agent < self.n else self.n - 1


def vote_name(agent: int, candidate: int) -> str:
    return f"vote({agent},c{candidate})"


def vote(agent: int, candidate: int) -> Formula:
    return Atom(vote_name(agent, candidate))


def adm(cfg: CommitteeConfig, candidate: int) -> Formula:
    """Candidate admitted to the interview: somebody voted for them"""
    return balanced_disj(vote(i, candidate) for i in cfg.agents)


def rules(cfg: CommitteeConfig) -> Tuple[Formula, Formula, Formula]:
    """(α1, α2, α3): everyone votes, at most once, never for a co-author"""
    alpha1 = balanced_conj(balanced_disj(vote(i, c) for c in cfg.candidates) for i in cfg.agents)
    alpha2 = balanced_conj(
        Implies(vote(i, c), Not(vote(i, other)))
        for i in cfg.agents for c in cfg.candidates for other in cfg.candidates if other != c
    )
    alpha3 = balanced_conj(
        Not(vote(i, c)) for i in cfg.agents for c in sorted(cfg.coauthors.get(i, ()))
    )
    return alpha1, alpha2, alpha3


def _require_benchmark(cfg: CommitteeConfig, variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose one of {', '.join(VARIANTS)}")
    if cfg.m != cfg.n or cfg.n < 3:
        raise ValueError(f"the committee scenario needs m = n > 2, got n={cfg.n}, m={cfg.m}")


def _shared_beliefs(cfg: CommitteeConfig) -> List[Formula]:
    admissions = [Not(adm(cfg, 1))] + [adm(cfg, c) for c in cfg.candidates[1:]]
    return admissions + list(rules(cfg))


def bases(cfg: CommitteeConfig, variant: str = "first") -> Dict[int, List[Formula]]:
    """Each member's base, in a fixed order (own vote, admissions, rules)"""
    _require_benchmark(cfg, variant)
    shared = _shared_beliefs(cfg)
    result = {i: [vote(i, cfg.voted_for(i))] + shared for i in cfg.agents}
    if variant == "second":
        result[1] = result[1] + [ExplicitBelief(2, beta) for beta in shared]
    return result


def initial_state(cfg: CommitteeConfig, variant: str = "first") -> State:
    valuation = frozenset(vote_name(i, cfg.voted_for(i)) for i in cfg.agents)
    return State(bases(cfg, variant), valuation)


def vocabulary(cfg: CommitteeConfig, variant: str = "first") -> VocabularyProfile:
    """Γ_i = B_i ∪ {¬α : α ∈ B_i}"""
    return VocabularyProfile({
        agent: base + [Not(alpha) for alpha in base] for agent, base in bases(cfg, variant).items()
    })


def _vote_literals(cfg: CommitteeConfig, agent: int) -> List[Formula]:
    voted = cfg.voted_for(agent)
    return [vote(agent, voted)] + [Not(vote(agent, c)) for c in cfg.candidates if c != voted]


def _exclusive_choice(cfg: CommitteeConfig) -> Formula:
    """Agent 1's vote among c2..cn as a left-folded chain of exclusive ors

    Exactly one for n = 3. For larger committees the chain is a parity: it
    holds when an odd number of these votes hold, and only under α2 does it
    mean exactly one.
    """
    chain: Optional[Formula] = None
    for c in cfg.candidates[1:]:
        chain = vote(1, c) if chain is None else Xor(chain, vote(1, c))
    return chain


def dynamic_query(cfg: CommitteeConfig) -> Formula:
    """Members 2..n privately learn member 1's vote, then everyone only believes ψ1"""
    chi0 = conj(Only(i, psi1(cfg)) for i in cfg.agents)
    body = chi0
    for agent in reversed(cfg.agents[1:]):
        body = Expand(agent, vote(1, cfg.voted_for(1)), body)
    return body


def psi1(cfg: CommitteeConfig) -> Formula:
    """The complete vote of every member"""
    return conj(literal for i in cfg.agents for literal in _vote_literals(cfg, i))


def psi2(cfg: CommitteeConfig) -> Formula:
    """What members 2..n know: member 1 did not vote c1 but an odd number of c2..cn, plus the rest"""
    literals = [Not(vote(1, 1)), _exclusive_choice(cfg)]
    literals += [literal for i in cfg.agents[1:] for literal in _vote_literals(cfg, i)]
    return conj(literals)


def queries(cfg: CommitteeConfig, variant: str = "first") -> Dict[str, Formula]:
    _require_benchmark(cfg, variant)
    first, second = psi1(cfg), psi2(cfg)
    return {
        "psi1": first,
        "psi2": second,
        "phi0": conj([Only(1, first)] + [Only(i, second) for i in cfg.agents[1:]]),
        "example2": conj([Only(2, second), AtLeast(1, AtLeast(2, second)),
                          Not(AtLeast(1, Only(2, second)))]),
        "chi0": conj(Only(i, first) for i in cfg.agents),
        "dynamic": dynamic_query(cfg),
    }


def default_query(variant: str) -> str:
    return "phi0" if variant == "first" else "example2"


def committee_instance(n: int, variant: str = "first", query: Optional[str] = None) -> ProblemInstance:
    """The scenario with m = n and f(i) = {c_i} as a ProblemInstance"""
    cfg = CommitteeConfig(n)
    name = query or default_query(variant)
    available = queries(cfg, variant)
    if name not in available:
        raise ValueError(f"unknown query {name!r}; choose one of {', '.join(QUERY_NAMES)}")
    atoms = tuple(vote_name(i, c) for i in cfg.agents for c in cfg.candidates)
    instance = ProblemInstance(cfg.agents, atoms, vocabulary(cfg, variant), initial_state(cfg, variant),
                               available[name])
    logger.debug("committee n=%d variant=%s query=%s", n, variant, name)
    return instance


def write_instance(path: Union[str, Path], instance: ProblemInstance) -> Path:
    target = Path(path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(dump_instance(instance), encoding="utf-8")
    return target


def published_sizes(variant: str) -> Dict[int, Tuple[int, int]]:
    """n -> (ratoms, state exponent) as published"""
    return {n: (count, n * n + n * count) for n, count in PUBLISHED_RATOMS[variant].items()}


def expected_verdict(n: int) -> bool:
    """Only believing holds for three members and fails for every larger committee"""
    return n == 3
