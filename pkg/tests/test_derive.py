from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
import vna.derive as derive_mod
from gen import fd_pairs, to_algebra
from vna.algmodel import (
    Algebra,
    ArakiWoods,
    Classification,
    FreeGroupFactor,
    MatrixBlock,
    Param,
    ProjRef,
    TypeIInfinite,
)
from vna.classify import free_product_classify
from vna.derive import (
    derive_free_product,
    expand_atom,
    replay,
    rule_abelian_abelian,
    rule_matrix_vs_mixed,
)
from vna.errors import InvalidValue, NoMatchingRule, OracleMismatch
from vna.numlat import group_generate
from vna.serialize import dumps, trace_from_json, trace_to_json


def A(*blocks):
    return Algebra(tuple(MatrixBlock(tuple(F(w) for w in b)) for b in blocks))


def masses(c):
    return sorted(r.weights for r in c.residuals)


class TestAbelianRule:
    def test_two_heavy_pairs(self):
        c = rule_abelian_abelian(A(["9/10"], ["1/10"]), A(["1/2"], ["1/2"]))
        assert c.diffuse == FreeGroupFactor(Param.UNKNOWN, F(1, 5))
        assert masses(c) == [(F(2, 5),), (F(2, 5),)]
        dmass, atoms = oracle.abelian_free_product([F(9, 10), F(1, 10)], [F(1, 2), F(1, 2)])
        assert c.diffuse_mass == dmass and [r.weights[0] for r in c.residuals] == atoms

    def test_boundary_atoms_omitted(self):
        c = rule_abelian_abelian(A(["1/2"], ["1/2"]), A(["1/2"], ["1/2"]))
        assert c == Classification(FreeGroupFactor(Param.UNKNOWN, 1))

    def test_single_heavy_pair(self):
        c = rule_abelian_abelian(A(["4/5"], ["1/5"]), A(["4/5"], ["1/5"]))
        assert c.diffuse.mass == F(2, 5) and masses(c) == [(F(3, 5),)]

    def test_rejects_non_abelian(self):
        with pytest.raises(InvalidValue):
            rule_abelian_abelian(A(["1/2", "1/2"]), A(["1/2"], ["1/2"]))


class TestMatrixRule:
    def test_atom_and_araki_woods(self):
        mixed = Algebra((MatrixBlock((F(9, 10),)), ArakiWoods(group_generate([F(1, 2)]), F(1, 10))))
        c, cite = rule_matrix_vs_mixed(MatrixBlock((F(3, 5), F(2, 5))), mixed)
        assert c.diffuse == ArakiWoods(group_generate([F(3, 2), F(1, 2)]), F(5, 12))
        assert masses(c) == [(F(7, 20), F(7, 30))]
        assert cite == "matrix*[atoms+diffuse]"

    def test_gamma_above_one(self):
        mixed = Algebra((MatrixBlock((F(1, 2),)), FreeGroupFactor(F(2), F(1, 2))))
        c, _ = rule_matrix_vs_mixed(MatrixBlock((F(3, 5), F(2, 5))), mixed)
        assert c == Classification(ArakiWoods(group_generate([F(3, 2)]), 1))

    def test_matrix_matrix(self):
        c, cite = rule_matrix_vs_mixed(MatrixBlock((F(3, 5), F(2, 5))), A(["1/2", "1/2"]))
        assert c == Classification(ArakiWoods(group_generate([F(3, 2)]), 1))
        assert cite == "matrix*matrix"

    def test_b_of_h(self):
        c, cite = rule_matrix_vs_mixed(TypeIInfinite((), F(1, 2), F(1, 2)), Algebra((FreeGroupFactor(F(1), 1),)))
        assert c == Classification(ArakiWoods(group_generate([2]), 1))
        assert cite.startswith("B(H)*")

    def test_no_matching_rule(self):
        with pytest.raises(NoMatchingRule):
            rule_matrix_vs_mixed(MatrixBlock((F(1, 2), F(1, 2))), A(["1/2", "1/2"]))


class TestExpandAtom:
    def test_identity_replacement(self):
        current = rule_abelian_abelian(A(["4/5"], ["1/5"]), A(["3/5"], ["2/5"]))
        ref = ProjRef("a", 1)
        after, step = expand_atom(current, ref, MatrixBlock((F(1, 5),)))
        assert after == current and step.rule == "identity"

    def test_mass_mismatch(self):
        current = rule_abelian_abelian(A(["4/5"], ["1/5"]), A(["3/5"], ["2/5"]))
        with pytest.raises(InvalidValue):
            expand_atom(current, ProjRef("a", 1), MatrixBlock((F(1, 10), F(1, 5))), F(1, 5))

    def test_untouched_residuals_survive(self):
        a, b = A(["4/5"], ["1/5"]), A(["3/5"], ["2/5"])
        current = rule_abelian_abelian(a, b)
        ref = ProjRef("b", 1)
        after, _ = expand_atom(current, ref, MatrixBlock((F(1, 5), F(1, 5))))
        kept = [r for r in current.residuals if not r.provenance.touches(ref)]
        assert all(r in after.residuals for r in kept)
        assert after.total_mass == 1


class TestDeriveFreeProduct:
    def test_two_by_two_trace(self):
        a, b = A(["3/5", "2/5"]), A(["4/5"], ["1/5"])
        c, trace = derive_free_product(a, b)
        assert c == free_product_classify(a, b)
        assert len(trace.steps) == 3
        assert c.diffuse.mass == F(5, 6) and masses(c) == [(F(1, 10), F(1, 15))]

    def test_multi_block(self):
        a = A(["1/20", "1/20"], ["9/10"])
        b = A(["3/10", "1/5"], ["1/2"])
        c, trace = derive_free_product(a, b)
        assert c.diffuse == ArakiWoods(group_generate([F(3, 2)]), F(31, 60))
        assert masses(c) == [(F(1, 20), F(1, 30)), (F(2, 5),)]
        assert trace.steps[0].rule == "abelian_abelian"

    def test_scalar_side(self):
        b = A(["1/3", "1/6"], ["1/2"])
        c, trace = derive_free_product(A(["1"]), b)
        assert len(trace.steps) == 1 and trace.steps[0].rule == "scalar"
        assert c == free_product_classify(A(["1"]), b)

    def test_infinite_summands(self):
        a = Algebra((MatrixBlock((F(3, 5), F(2, 5))),))
        b = Algebra((MatrixBlock((F(9, 10),)), ArakiWoods(group_generate([F(1, 2)]), F(1, 10))))
        c, _ = derive_free_product(a, b)
        assert c == free_product_classify(a, b)
        a = Algebra((TypeIInfinite((), F(1, 3), F(1, 3)), MatrixBlock((F(1, 2),))))
        b = A(["3/4"], ["1/4"])
        c, _ = derive_free_product(a, b)
        assert c == free_product_classify(a, b)

    def test_mismatch_is_surfaced(self, monkeypatch):
        wrong = Classification(ArakiWoods(group_generate([7]), 1))
        monkeypatch.setattr(derive_mod, "free_product_classify", lambda a, b: wrong)
        with pytest.raises(OracleMismatch) as exc:
            derive_free_product(A(["3/5", "2/5"]), A(["4/5"], ["1/5"]))
        assert exc.value.trace is not None and exc.value.exit_code == 4

    def test_bad_order(self):
        with pytest.raises(InvalidValue):
            derive_free_product(A(["1/2"], ["1/2"]), A(["3/5", "2/5"]), order=[ProjRef("a", 0)])


@settings(max_examples=200, deadline=None)
@given(fd_pairs(), st.integers(0, 10**6))
def test_order_independence_and_oracle(pair, seed):
    a, b = (to_algebra(w) for w in pair)
    c0, _ = derive_free_product(a, b)
    c1, _ = derive_free_product(a, b, seed=seed)
    assert c0 == c1 == free_product_classify(a, b)


@settings(max_examples=100, deadline=None)
@given(fd_pairs())
def test_steps_conserve_mass_and_only_touch_expanded_atom(pair):
    a, b = (to_algebra(w) for w in pair)
    _, trace = derive_free_product(a, b)
    prev = None
    for ref, step in zip((None, *trace.order), trace.steps):
        assert step.result.total_mass == 1 or len(trace.steps) == 1
        if prev is not None:
            for r in prev.residuals:
                if not r.provenance.touches(ref):
                    assert r in step.result.residuals
        prev = step.result


@settings(max_examples=50, deadline=None)
@given(fd_pairs())
def test_serialized_traces_replay(pair):
    a, b = (to_algebra(w) for w in pair)
    _, trace = derive_free_product(a, b)
    text = dumps(trace_to_json(trace))
    loaded = trace_from_json(__import__("json").loads(text))
    assert replay(loaded).final == trace.final
    assert dumps(trace_to_json(loaded)) == text
