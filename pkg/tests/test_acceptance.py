"""Acceptance gate. Each test is one criterion and records a PASS/FAIL line
that is printed in the pytest terminal summary (and by ``python -m`` on this
file)."""

import random
import time
from contextlib import contextmanager

import pytest

from conftest import GATE
from qbundle.bundle import check_completeness, check_trivialization, hopf_bundle
from qbundle.galois import StrongConnection, verify_galois
from qbundle.hopf import iota
from qbundle.ncpoly import NCPoly
from qbundle.oper import FAMILIES, NORM_TOL, build_rep, chern_pairing, relation_residual
from qbundle.rewrite import BUILTIN, RewriteRule, load_presentation, unresolved_pairs


@contextmanager
def criterion(n, title):
    info = {"detail": ""}
    start = time.perf_counter()
    try:
        yield info
    except BaseException:
        GATE[n] = ("FAIL", title, info["detail"] or "see traceback")
        raise
    GATE[n] = ("PASS", title, f"{info['detail']}; {time.perf_counter() - start:.1f}s".lstrip("; "))


@pytest.fixture(scope="module")
def bundle():
    return hopf_bundle()


@pytest.fixture(scope="module")
def lift(bundle):
    return StrongConnection(bundle.total)


def test_1_rank_of_image_matches_basis(bundle):
    with criterion(1, "rank_of_image(d) = |basis_words(s3, <=d)| for d = 1..6") as info:
        start = time.perf_counter()
        bundle.total.system(8)
        ranks = [bundle.rank_of_image(d) for d in range(1, 7)]
        sizes = [bundle.basis_count(d) for d in range(1, 7)]
        info["detail"] = f"ranks {ranks}"
        assert ranks == sizes
        assert time.perf_counter() - start < 120


def test_2_local_triviality(bundle):
    with criterion(2, "chi_p, chi_q satisfy (a), (b), kill all relations; {ker chi_i} complete at d=3") as info:
        reports = [check_trivialization(bundle, i) for i in (0, 1)]
        comp = check_completeness(bundle.total_covering(), 3)
        info["detail"] = f"{reports[0].details['relations']} relations, {comp.details['compatible_dimension']} compatible tuples"
        for rep in reports:
            assert rep.status, rep.witness
        assert comp.status, comp.witness


def test_3_galois_witnesses(lift):
    with criterion(3, "can(l(u^n)) = 1 (x) u^n for |n| <= 3; m(l(u^n)) = 1 for |n| <= 5") as info:
        rep = verify_galois(3, lift)
        assert rep.status, rep.witness
        one = lift.P.one()
        assert all(lift.contraction(n) == one for n in range(-5, 6))
        info["detail"] = "7 Galois identities, 11 contractions"


def test_4_projectors(lift):
    with criterion(4, "E(n)^2 = E(n), entries coinvariant for |n| <= 3; E(1) through f_0, f_1") as info:
        P = lift.P
        for n in range(-3, 4):
            E = lift.projector(n)
            assert E.is_idempotent(), n
            assert E.entries_coinvariant(), n
        S2 = load_presentation("sphere", P.params)
        E1 = lift.projector(1)
        g = E1.in_base(S2)
        for i in range(2):
            for j in range(2):
                assert iota(g[i][j], P) == E1.entries[i][j]
        info["detail"] = f"E(1)_11 = {g[0][0]}"


def test_5_winding_pairing(lift):
    with criterion(5, "|pairing(E(n)) - n| <= 1e-8, n = 1, 2, 3, N=128, M=64") as info:
        start = time.perf_counter()
        values = []
        for n in (1, 2, 3):
            rep = chern_pairing(lift.projector(n), 128, 64)
            values.append(rep.value.real)
            assert abs(rep.value - n) <= 1e-8, rep.to_dict()
        # winding -1 pairs to -1
        assert abs(chern_pairing(lift.projector(-1), 128, 64).value + 1) <= 1e-8
        info["detail"] = ", ".join(f"{v:.12f}" for v in values)
        assert time.perf_counter() - start < 60


def test_6_representation_residuals():
    with criterion(6, "residual <= 1e-12 at N=64, M=58 and generator norms <= 1 + 1e-12") as info:
        worst, top = 0.0, 0.0
        for fam in FAMILIES:
            rho = build_rep(fam, 64, lam=0.7, mu=-1.2, alpha=0.4, beta=2.2, theta=1.1)
            worst = max(worst, relation_residual(rho, 58))
            top = max(top, *rho.norms().values())
        info["detail"] = f"{len(FAMILIES)} families, max residual {worst:.1e}, max norm {top:.15f}"
        assert worst <= 1e-12
        assert top <= 1 + NORM_TOL


def _random_poly(rng, alphabet):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        w = tuple(rng.randrange(len(alphabet)) for _ in range(rng.randint(0, 4)))
        terms[w] = terms.get(w, 0) + rng.randint(-5, 5)
    return NCPoly(alphabet, terms)


def test_7_rewriting_properties():
    with criterion(7, "decreasing rules, critical pairs resolve up to 8, nf(f*) = nf(nf(f)*) on 1000 samples") as info:
        rules = 0
        for name in BUILTIN:
            R = load_presentation(name).system(8)
            for rule in R.rules:
                RewriteRule(rule.lhs, rule.rhs)
                rules += 1
            assert not unresolved_pairs(R, 8), name
        s3 = load_presentation("s3")
        rng = random.Random(20240501)
        samples = [_random_poly(rng, s3.alphabet) for _ in range(1000)]
        for f in samples:
            assert s3.nf(f.star()) == s3.nf(s3.nf(f).star()), f
        info["detail"] = f"{rules} rules over {len(BUILTIN)} presentations, {len(samples)} samples"


def test_8_excluded():
    GATE[8] = (
        "EXCLUDED",
        "K-theory groups, graph C*-algebra and Podles homeomorphism",
        "operator-algebraic statements, evidenced by criteria 1-7",
    )
    pytest.skip("C*-algebraic statements are outside the scope of a finite computation")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-rs"]))
