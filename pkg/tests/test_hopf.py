from fractions import Fraction

import pytest
from hypothesis import given, settings

from qbundle.hopf import (
    Grading,
    LaurentElement,
    NoSolution,
    TensorElement,
    UngradedLetter,
    coaction,
    coaction_by_substitution,
    express_in_base,
    homogeneous_parts,
    iota,
    is_coinvariant,
)
from qbundle.ncpoly import NCPoly
from qbundle.rewrite import basis_upto, load_presentation

from strategies import polys

S3 = load_presentation("s3")
S2 = load_presentation("sphere")
G = Grading(S3)
u = LaurentElement.power


def test_laurent_structure():
    assert str(u(1).coproduct()) == "u (x) u"
    assert u(3).antipode() == u(-3)
    assert (u(1).scale(2) - u(-1)).counit() == 1
    assert str(u(2) + u(-1).scale(Fraction(-1, 2))) == "-(1/2) u* + u^2"


@pytest.mark.parametrize("n", range(-10, 11))
def test_hopf_axioms(n):
    # m (S (x) id) Delta = 1 eps and (eps (x) id) Delta = id on u^n
    h = u(n)
    (a, b), c = next(iter(h.coproduct().terms.items()))
    assert u(a).antipode() * u(b) == LaurentElement({0: h.counit()})
    assert u(b).scale(u(a).counit() * c) == h


def test_grading_table():
    assert G.table == (1, -1, -1, 1)
    assert Grading(S2).table == (0, 0, 0)


def test_ungraded_presentation():
    P = load_presentation("disc")
    bare = type(P)(P.name, P.alphabet, P.relations, P.params, grading={"x": 1})
    with pytest.raises(UngradedLetter):
        Grading(bare)
    with pytest.raises(UngradedLetter):
        Grading(type(P)(P.name, P.alphabet, P.relations, P.params))


def test_coaction_examples():
    assert str(coaction(S3.poly("a"), S3)) == "a (x) u"
    assert str(coaction(S3.poly("b a"), S3)) == "a b (x) 1"
    assert str(coaction(S3.poly("a^2 b*"), S3)) == "a^2 b* (x) u^3"
    assert coaction(S3.poly("b a"), S3) == TensorElement.parse(S3, None, "b a (x) 1")


@pytest.mark.parametrize("text, expected", [("b b*", True), ("a", False), ("a a* b b*", True), ("a b", True), ("a^2 b*", False)])
def test_coinvariance(text, expected):
    assert is_coinvariant(S3.poly(text), S3) is expected


@pytest.mark.parametrize(
    "text, preimage",
    [("b b*", "f_0"), ("b a", "f_1"), ("a a*", "1 - f_0 + f_1 f_1*"), ("a* b*", "f_1*")],
)
def test_express_in_base(text, preimage):
    g = express_in_base(S3.poly(text), S3, S2)
    assert g == S2.poly(preimage)
    assert iota(g, S3) == S3.nf(text)


def test_express_in_base_rejects_non_coinvariant():
    with pytest.raises(ValueError):
        express_in_base(S3.poly("a"), S3, S2)


def test_express_in_base_reports_missing_preimage():
    # a a* needs f_1 f_1*, which lies above degree 1
    with pytest.raises(NoSolution):
        express_in_base(S3.poly("a a*"), S3, S2, d=1)


def test_tensor_text_round_trip():
    t = TensorElement.parse(S3, S3, "a* (x) a + 1/4 b (x) b* - 1/4 a a* b (x) b*")
    assert TensorElement.parse(S3, S3, str(t)) == t


@settings(max_examples=200)
@given(polys(S3.alphabet, 4, 4))
def test_coaction_by_grading_matches_substitution(f):
    assert coaction(f, S3) == coaction_by_substitution(f, S3)


@settings(max_examples=200)
@given(polys(S3.alphabet, 3, 3), polys(S3.alphabet, 3, 3))
def test_coaction_is_multiplicative(f, g):
    assert coaction(S3.nf(f * g), S3) == coaction(f, S3) * coaction(g, S3)


@pytest.mark.parametrize("w", basis_upto(S3.system(8), 4))
def test_coassociativity_and_counit(w):
    def delta(word):
        return coaction(NCPoly.monomial(S3.alphabet, word), S3).terms

    (key, n), c = next(iter(delta(w).items()))
    assert (key, c) == (w, 1)
    # (Delta_R (x) id) Delta_R = (id (x) Delta) Delta_R, and (id (x) eps) Delta_R = id
    lhs = {(k2, m, n) for (k2, m) in delta(key)}
    rhs = {(key, n, n)}
    assert lhs == rhs


def test_homogeneous_parts():
    parts = homogeneous_parts(S3.poly("a + b + a b + 1"), G)
    assert {n: str(f) for n, f in parts.items()} == {-1: "b", 0: "1 + a b", 1: "a"}
