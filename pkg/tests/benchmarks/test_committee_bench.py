"""
Benchmark parsing and symbolic checking on the three-member committee
"""
import pytest

from bdd_engine import FALSE, TRUE, BddStore, build
from committee_examples import committee_instance
from formula_parser import parse_formula, print_formula
from logic_core import modal_depth
from qbf_translation import level_vars, translate
from symbolic_checker import check_symbolic, reduce_dynamics


@pytest.mark.benchmark
class TestCommitteeBench:
    """Benchmark the pipeline stages on committee instances"""

    def test_parse_query(self, benchmark, committee3):
        text = print_formula(committee3.query)
        result = benchmark(parse_formula, text)
        assert result is committee3.query

    def test_reduce_dynamic_query(self, benchmark):
        inst = committee_instance(3, "first", "dynamic")
        reduced = benchmark(reduce_dynamics, inst.query)
        assert reduced is not inst.query

    def test_build_simple_query(self, benchmark, one_agent_instance):
        psi = translate(one_agent_instance.query, 0, one_agent_instance)
        order = [v for k in range(modal_depth(one_agent_instance.query) + 1)
                 for v in level_vars(one_agent_instance, k)]

        def run():
            return build(psi, BddStore(order))

        root = benchmark(run)
        # K 1 p at level 0 depends on whether p is in B_1
        assert root not in (FALSE, TRUE)

    def test_check_committee(self, benchmark, committee3):
        result = benchmark.pedantic(check_symbolic, args=(committee3,), rounds=1, iterations=1)
        assert result.verdict is True
        # Target: well under the default timeout
        assert result.stats.wall_ms < 600_000
