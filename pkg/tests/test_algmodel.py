from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import fd_weights, to_algebra
from vna.algmodel import (
    Algebra,
    ArakiWoods,
    Classification,
    FreeGroupFactor,
    HyperfiniteTensor,
    MatrixBlock,
    Param,
    ProjRef,
    Provenance,
    ResidualBlock,
    Selector,
    Tensor,
    TypeIInfinite,
    as_algebra,
    compose_selectors,
    compress,
    ensure_valid,
    is_tracial,
    normalized,
    point_spectrum,
    rescale,
    tensor_simplify,
    validate,
)
from vna.errors import EmptySelection, InvalidAlgebra
from vna.numlat import TRIVIAL, group_generate

M2 = MatrixBlock((F(3, 5), F(2, 5)))


def alg(*summands):
    return Algebra(summands)


class TestValidate:
    def test_ok(self):
        assert validate(alg(M2)) == []

    def test_zero_weight(self):
        (v,) = validate(alg(MatrixBlock((F(0), F(1)))))
        assert "non-faithful weight" in v.message
        assert v.path == "summands[0].weights[0]"

    def test_trivial_araki_woods(self):
        (v,) = validate(alg(ArakiWoods(TRIVIAL, 1)))
        assert "nontrivial group" in v.message

    def test_ensure_valid_raises(self):
        with pytest.raises(InvalidAlgebra) as exc:
            ensure_valid(alg(MatrixBlock((F(-1, 2),))))
        assert exc.value.exit_code == 2

    def test_empty_algebra(self):
        assert validate(Algebra(())) != []

    def test_hyperfinite_must_be_diffuse(self):
        finite = HyperfiniteTensor((((F(1, 3), F(2, 3)), 4),), 1)
        assert any("not diffuse" in v.message for v in validate(alg(finite)))
        diffuse = HyperfiniteTensor((((F(1, 3), F(2, 3)), Param.INFINITE),), 1)
        assert validate(alg(diffuse)) == []

    def test_hyperfinite_profile_must_be_state(self):
        bad = HyperfiniteTensor((((F(1, 3), F(1, 3)), Param.INFINITE),), 1)
        assert any("sum to 1" in v.message for v in validate(alg(bad)))

    def test_typei_ratio_range(self):
        assert validate(alg(TypeIInfinite((), F(3, 2), F(1, 2)))) != []

    def test_tensor_profile_mass(self):
        t = Tensor(MatrixBlock((F(1, 3), F(1, 3))), ArakiWoods(group_generate([2]), 1), 1)
        assert any("mass 1" in v.message for v in validate(alg(t)))

    def test_free_group_parameter(self):
        assert validate(alg(FreeGroupFactor(F(1, 2), 1))) != []
        assert validate(alg(FreeGroupFactor(Param.UNKNOWN, 1))) == []

    def test_typei_mass(self):
        b = TypeIInfinite((F(1, 4),), F(1, 2), F(3, 8))
        assert b.mass == F(1)
        assert b.weights(4) == [F(1, 4), F(3, 8), F(3, 16), F(3, 32)]


class TestRescale:
    def test_examples(self):
        a = alg(M2)
        assert rescale(a, 1) == a
        assert rescale(a, 5) == alg(MatrixBlock((F(3), F(2))))
        assert rescale(rescale(a, F(7, 3)), F(3, 7)) == a

    @given(fd_weights(), st.fractions(min_value=F(1, 100), max_value=100).filter(lambda c: c > 0))
    def test_mass_scales(self, ws, c):
        a = to_algebra(ws)
        assert rescale(a, c).mass == a.mass * c
        assert point_spectrum(rescale(a, c)) == point_spectrum(a)

    def test_normalized(self):
        assert normalized(alg(MatrixBlock((F(3), F(2))))) == alg(M2)


class TestSpectrum:
    def test_examples(self):
        assert point_spectrum(alg(M2)) == group_generate([F(3, 2)])
        uniform = alg(MatrixBlock((F(1, 4), F(1, 4))), MatrixBlock((F(1, 2),)), FreeGroupFactor(F(2), 1))
        assert point_spectrum(uniform).trivial
        assert point_spectrum(alg(TypeIInfinite((), F(1, 2), F(1, 2)))) == group_generate([F(1, 2)])

    def test_typei_head(self):
        b = TypeIInfinite((F(1, 5),), F(1, 2), F(2, 5))
        assert point_spectrum(alg(b)) == group_generate([F(1, 2)])
        b = TypeIInfinite((F(1, 3),), F(1, 2), F(1, 3))
        assert point_spectrum(alg(b)) == group_generate([F(1, 2)])
        b = TypeIInfinite((F(3, 10),), F(1, 2), F(7, 20))
        assert point_spectrum(alg(b)) == group_generate([F(1, 2), F(6, 7)])

    def test_hyperfinite_and_tensor(self):
        h = HyperfiniteTensor((((F(1, 3), F(2, 3)), Param.INFINITE), ((F(1, 4), F(3, 4)), 2)), 1)
        assert point_spectrum(alg(h)) == group_generate([2, 3])
        t = Tensor(MatrixBlock((F(1, 3), F(2, 3))), ArakiWoods(group_generate([5]), 1), 1)
        assert point_spectrum(alg(t)) == group_generate([2, 5])


class TestTracial:
    def test_examples(self):
        assert is_tracial(alg(MatrixBlock((F(3, 5),)), MatrixBlock((F(2, 5),))))
        assert not is_tracial(alg(M2))
        assert not is_tracial(alg(MatrixBlock((F(1, 2),)), TypeIInfinite((), F(1, 2), F(1, 4))))

    @given(fd_weights())
    def test_matches_spectrum(self, ws):
        a = to_algebra(ws)
        assert is_tracial(a) == point_spectrum(a).trivial


G12 = group_generate([F(1, 2)])


def _sample_classification():
    prov = Provenance(ProjRef("b", 0, "q"), ProjRef("a", 0, "e"), (0, 1))
    return Classification(ArakiWoods(G12, F(5, 6)), (ResidualBlock((F(1, 10), F(1, 15)), prov),))


class TestCompress:
    def test_full_selector_is_identity(self):
        c = _sample_classification()
        assert compress(c, Selector()) == c

    def test_diffuse_sub_mass(self):
        c = compress(_sample_classification(), Selector(F(1, 3), {}))
        assert c == Classification(ArakiWoods(G12, F(1, 3)))

    def test_one_diagonal(self):
        c = compress(_sample_classification(), Selector(None, {0: [0]}))
        assert c.diffuse == ArakiWoods(G12, F(5, 6))
        assert [r.weights for r in c.residuals] == [(F(1, 10),)]

    def test_empty(self):
        with pytest.raises(EmptySelection):
            compress(_sample_classification(), Selector(F(0), {}))

    def test_free_group_sub_mass_is_unknown(self):
        c = Classification(FreeGroupFactor(F(3), 1))
        assert compress(c, Selector(F(1, 2))).diffuse == FreeGroupFactor(Param.UNKNOWN, F(1, 2))

    def test_renormalize(self):
        c = compress(_sample_classification(), Selector(F(1, 3), {0: [1]}, renormalize=True))
        assert c.total_mass == 1

    @given(
        st.fractions(min_value=0, max_value=F(5, 6)),
        st.fractions(min_value=0, max_value=1),
        st.sets(st.integers(0, 1)),
        st.sets(st.integers(0, 1)),
    )
    def test_composition(self, m1, frac, d1, d2):
        c = _sample_classification()
        first = Selector(m1, {0: sorted(d1)})
        m2 = m1 * frac
        second = Selector(m2, {0: list(range(len(d1)))[: len(d2)]})
        try:
            twice = compress(compress(c, first), second)
        except EmptySelection:
            return
        assert compress(c, compose_selectors(c, first, second)) == twice


class TestTensorSimplify:
    def test_araki_woods_absorbs(self):
        g = group_generate([2])
        t = Tensor(MatrixBlock((F(1, 3), F(2, 3))), ArakiWoods(g, 1), F(1, 2))
        assert tensor_simplify(t) == ArakiWoods(g, F(1, 2))

    def test_amplification(self):
        t = Tensor(MatrixBlock((F(1, 2), F(1, 2))), FreeGroupFactor(F(3, 2), 1), 1)
        assert tensor_simplify(t) == FreeGroupFactor(F(3), 1)

    def test_unknown_stays_unknown(self):
        t = Tensor(MatrixBlock((F(1, 2), F(1, 2))), FreeGroupFactor(Param.UNKNOWN, 1), 1)
        assert tensor_simplify(t) == FreeGroupFactor(Param.UNKNOWN, 1)

    def test_not_member_unchanged(self):
        t = Tensor(MatrixBlock((F(1, 3), F(2, 3))), ArakiWoods(group_generate([5]), 1), 1)
        assert tensor_simplify(t) == t

    @given(st.integers(1, 5), st.fractions(min_value=1, max_value=20), st.fractions(min_value=F(1, 10), max_value=10))
    def test_idempotent_and_mass_preserving(self, n, t, m):
        if m <= 0:
            return
        s = Tensor(MatrixBlock((F(1, n),) * n), FreeGroupFactor(t, 1), m)
        once = tensor_simplify(s)
        assert tensor_simplify(once) == once
        assert once.mass == m


def test_as_algebra_re_enters_classification():
    a = as_algebra(_sample_classification())
    assert a.summands[0] == ArakiWoods(G12, F(5, 6))
    assert a.summands[1].weights == (F(1, 10), F(1, 15))
    assert a.mass == 1
