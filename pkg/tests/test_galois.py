from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings

from qbundle.galois import (
    MINIMAL_ANSATZ,
    StrongConnection,
    balance,
    canonical_map,
    solve_lift,
    verify_galois,
)
from qbundle.hopf import Grading, NoSolution, TensorElement, iota
from qbundle.rewrite import load_presentation

from strategies import coinvariant_polys, polys

S3 = load_presentation("s3")
S2 = load_presentation("sphere")
L = StrongConnection(S3)
G = Grading(S3)


def tensor(text):
    return TensorElement.parse(S3, S3, text)


def hopf(text):
    return TensorElement.parse(S3, None, text)


def test_l_zero():
    assert L(0) == tensor("1 (x) 1")


def test_l_plus_one():
    assert L(1) == tensor("a* (x) a + q b (1 - a a*) (x) b*")
    assert str(L(1)) == "a* (x) a + 1/4 b (x) b* - 1/4 a a* b (x) b*"


def test_l_minus_one():
    assert L(-1) == tensor("b* (x) b + p a (1 - b b*) (x) a*")


def test_lift_needs_all_three_terms():
    with pytest.raises(NoSolution):
        solve_lift(S3, 1, MINIMAL_ANSATZ[1][:2])


def test_lift_uniqueness_is_checked():
    with pytest.raises(ValueError):
        solve_lift(S3, 1, MINIMAL_ANSATZ[1] + [("a a* b", "b*")])


@pytest.mark.parametrize("n", range(-5, 6))
def test_contraction_and_homogeneity(n):
    assert L.contraction(n) == S3.one()
    assert L.homogeneous(n)
    assert len(L.legs(n)) == 2 ** abs(n)


def test_canonical_map_examples():
    assert canonical_map(tensor("1 (x) 1")) == hopf("1 (x) 1")
    assert canonical_map(tensor("1 (x) a")) == hopf("a (x) u")
    assert canonical_map(L(1)) == hopf("1 (x) u")
    assert canonical_map(L(-1)) == hopf("1 (x) u*")


@pytest.mark.parametrize("N", [0, 1, 3])
def test_verify_galois(N):
    rep = verify_galois(N, L)
    assert rep.status
    assert rep.details["identities"] == 2 * N + 1


@settings(max_examples=100)
@given(polys(S3.alphabet, 2, 2), coinvariant_polys(S3, G, 2, 2), polys(S3.alphabet, 2, 2))
def test_canonical_map_is_balanced(p, b, q):
    left = TensorElement.pure(S3, S3, S3.nf(p * b), S3.nf(q))
    right = TensorElement.pure(S3, S3, S3.nf(p), S3.nf(b * q))
    assert canonical_map(left) == canonical_map(right)


@settings(max_examples=100)
@given(polys(S3.alphabet, 3, 3), polys(S3.alphabet, 3, 3))
def test_balance_is_idempotent_and_preserves_can(p, q):
    t = TensorElement.pure(S3, S3, S3.nf(p), S3.nf(q))
    bt = balance(t)
    assert balance(bt) == bt
    assert canonical_map(bt) == canonical_map(t)


def test_balance_moves_coinvariant_suffix():
    assert balance(tensor("a b (x) a")) == tensor("1 (x) a^2 b")
    assert balance(tensor("a (x) b")) == tensor("a (x) b")


def test_projector_one():
    E = L.projector(1)
    expected = [["a a*", "q a b (1 - a a*)"], ["a* b*", "q (1 - a a*)"]]
    assert E.entries == [[S3.nf(t) for t in row] for row in expected]


def test_projector_zero():
    assert L.projector(0).to_dict() == {"n": 0, "size": 1, "entries": [["1"]]}


@pytest.mark.parametrize("n", range(-3, 4))
def test_projectors_are_idempotent(n):
    E = L.projector(n)
    assert E.size == 2 ** abs(n)
    assert E.is_idempotent()
    assert E.entries_coinvariant()


@pytest.mark.parametrize("n", [-2, -1, 1, 2])
def test_projector_entries_lie_in_base(n):
    E = L.projector(n)
    for row_g, row in zip(E.in_base(S2), E.entries):
        for g, e in zip(row_g, row):
            assert iota(g, S3) == e


def test_projector_one_in_base():
    g = L.projector(1).in_base(S2)
    assert g[0][0] == S2.poly("1 - f_0 + f_1 f_1*")
    assert g[1][0] == S2.poly("f_1*")


def test_non_projector_is_rejected():
    E = L.projector(1)
    E.entries[0][0] = S3.poly("a")
    assert not E.is_idempotent()
    assert not E.entries_coinvariant()


def test_concurrent_initialisation():
    fresh = StrongConnection(S3)
    with ThreadPoolExecutor(4) as ex:
        results = list(ex.map(fresh.legs, [4, -4, 4, 3, -4]))
    assert results[0] == L.legs(4) and results[1] == L.legs(-4)
