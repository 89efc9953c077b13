import os

import numpy as np
import pytest

from cadre.bn import (
    BifSyntaxError,
    CyclicStructure,
    DuplicateDeclaration,
    NonNormalizedRow,
    UndeclaredVariable,
    parse_bif,
    sample_bn,
    serialize_bif,
)

from conftest import MODELS_DIR
from oracles import variable_elimination_marginal

MINIMAL = """
network tiny { }
variable A {
  type discrete [ 2 ] { yes, no };
}
probability ( A ) {
  table 0.3, 0.7;
}
"""

PAIR = """
network pair { }
variable P { type discrete [ 2 ] { a, b }; }
variable C { type discrete [ 2 ] { u, v }; }
probability ( P ) { table 0.6, 0.4; }
probability ( C | P ) {
  ( a ) 1.0, 0.0;
  ( b ) 0.0, 1.0;
}
"""


def _child():
    with open(os.path.join(MODELS_DIR, "child.bif")) as fh:
        return parse_bif(fh.read())


class TestParsing:
    def test_minimal_single_variable_document(self):
        bn = parse_bif(MINIMAL)
        assert bn.node_count == 1
        assert bn.dag.edges == frozenset()
        assert np.allclose(bn.cpts[0], [[0.3, 0.7]])

    def test_conditional_rows_keyed_by_parent_states(self):
        bn = parse_bif(PAIR)
        assert bn.dag.edges == frozenset({(0, 1)})
        assert np.allclose(bn.cpts[1], [[1, 0], [0, 1]])

    def test_comments_and_quoted_strings_accepted(self):
        text = MINIMAL.replace("network tiny {",
                               'network "tiny" { // line comment\n /* block */')
        assert parse_bif(text).name in ("tiny", '"tiny"')

    def test_syntax_error_reports_position(self):
        with pytest.raises(BifSyntaxError) as err:
            parse_bif("network x { }\nvariable A {\n  type discrete [ 2 ];")
        assert err.value.line >= 2

    def test_undeclared_variable_rejected(self):
        with pytest.raises(UndeclaredVariable):
            parse_bif("network x { }\nprobability ( Z ) { table 1.0; }")

    def test_non_normalized_row_rejected(self):
        with pytest.raises(NonNormalizedRow):
            parse_bif(MINIMAL.replace("0.3, 0.7", "0.3, 0.6"))

    def test_duplicate_variable_rejected(self):
        dup = MINIMAL + "\nvariable A { type discrete [ 2 ] { yes, no }; }\n"
        with pytest.raises(DuplicateDeclaration):
            parse_bif(dup)

    def test_cyclic_structure_rejected(self):
        text = """
        network c { }
        variable A { type discrete [ 2 ] { x, y }; }
        variable B { type discrete [ 2 ] { x, y }; }
        probability ( A | B ) { ( x ) 0.5, 0.5; ( y ) 0.5, 0.5; }
        probability ( B | A ) { ( x ) 0.5, 0.5; ( y ) 0.5, 0.5; }
        """
        with pytest.raises(CyclicStructure):
            parse_bif(text)

    def test_round_trip_preserves_structure_and_tables(self):
        bn = _child()
        back = parse_bif(serialize_bif(bn))
        assert back.dag.node_labels == bn.dag.node_labels
        assert back.dag.edges == bn.dag.edges
        assert back.categories == bn.categories
        for a, b in zip(back.cpts, bn.cpts):
            assert np.array_equal(a, b)


class TestModelFiles:
    def test_child_dimensions(self):
        bn = _child()
        assert bn.node_count == 20
        assert len(bn.dag.edges) == 25

    def test_hepar2_dimensions(self):
        with open(os.path.join(MODELS_DIR, "hepar2.bif")) as fh:
            bn = parse_bif(fh.read())
        assert bn.node_count == 70
        assert len(bn.dag.edges) == 123


class TestSampling:
    def test_root_frequency_matches_table(self):
        bn = parse_bif(MINIMAL)
        data = sample_bn(bn, 100_000, seed=3)
        assert np.mean(data.values[:, 0] == 0) == pytest.approx(0.3, abs=0.01)

    def test_one_hot_tables_make_child_a_function_of_parent(self):
        bn = parse_bif(PAIR)
        data = sample_bn(bn, 2000, seed=1)
        assert np.array_equal(data.values[:, 0], data.values[:, 1])

    def test_sampled_shape_and_code_ranges(self):
        bn = _child()
        data = sample_bn(bn, 1000, seed=2)
        assert data.values.shape == (1000, 20)
        for i in range(20):
            col = data.values[:, i]
            assert col.min() >= 0 and col.max() < len(bn.categories[i])

    def test_marginals_match_variable_elimination(self):
        bn = _child()
        data = sample_bn(bn, 50_000, seed=4)
        for i in range(bn.node_count):
            exact = variable_elimination_marginal(bn, i)
            emp = np.bincount(data.values[:, i], minlength=exact.size) / data.n
            assert 0.5 * np.abs(emp - exact).sum() <= 0.015

    def test_deterministic_given_seed(self):
        bn = _child()
        a = sample_bn(bn, 100, seed=5)
        b = sample_bn(bn, 100, seed=5)
        assert np.array_equal(a.values, b.values)
