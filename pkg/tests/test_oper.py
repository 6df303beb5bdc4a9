import math

import numpy as np
import pytest
from hypothesis import given, settings

from qbundle.galois import StrongConnection
from qbundle.hopf import Grading
from qbundle.oper import (
    FAMILIES,
    NORM_TOL,
    UnknownFamily,
    WindowTooLarge,
    build_rep,
    chern_pairing,
    evaluate,
    relation_residual,
    shift,
    trace_functional,
)
from qbundle.rewrite import load_presentation

from strategies import coinvariant_polys

S3 = load_presentation("s3")
S2 = load_presentation("sphere")
P, Q = float(S3.params.p), float(S3.params.q)
L = StrongConnection(S3)


def recurrence_weights(r, n):
    """Positive solution of w_k^2 - r w_{k-1}^2 = 1 - r with w_{-1} = 0."""
    out, prev = [], 0.0
    for _ in range(n):
        prev = r * prev + (1 - r)
        out.append(math.sqrt(prev))
    return np.array(out)


@pytest.mark.parametrize("r", [P, Q, 0.9])
def test_shift_weights_solve_the_recurrence(r):
    S = shift(r, 40)
    assert np.allclose(np.diagonal(S, -1).real, recurrence_weights(r, 39), atol=1e-14)


def test_disc_shift_relation_on_basis():
    S = shift(Q, 32)
    lhs = S.conj().T @ S - Q * S @ S.conj().T
    assert np.allclose(np.diagonal(lhs)[:31], 1 - Q, atol=1e-15)


def test_disc_point_relation():
    rho = build_rep("disc-point", 4, theta=0.0)
    assert np.allclose(rho.matrices["x"], np.eye(4))
    assert relation_residual(rho, 2) == 0.0


def test_onedim_is_exact():
    rho = build_rep("s3-onedim", 8, alpha=0.3, beta=1.9)
    assert relation_residual(rho, 4) < 1e-15
    assert np.allclose(evaluate(S3.poly("(1 - a a*)(1 - b b*)"), rho), 0)


def test_evaluate_examples():
    rho = build_rep("s3-shift-b", 16)
    assert np.array_equal(evaluate(S3.one(), rho), np.eye(16))
    bb = evaluate(S3.poly("b b*"), rho)
    k = np.arange(15)
    assert np.allclose(np.diagonal(bb)[:15], 1 - P**k, atol=1e-15)
    sphere = build_rep("sphere-shift-a", 16, mu=0.7)
    assert np.allclose(evaluate(S2.poly("f_0"), sphere), np.eye(16))


def test_evaluate_is_linear():
    rho = build_rep("s3-shift-a", 12, mu=0.4)
    f, g = S3.poly("a b* - 2 a*"), S3.poly("b a + 1/3")
    assert np.allclose(evaluate(f + g.scale(3), rho), evaluate(f, rho) + 3 * evaluate(g, rho))


def test_evaluate_rejects_foreign_polynomial():
    with pytest.raises(ValueError):
        evaluate(S2.poly("f_0"), build_rep("s3-shift-b", 8))


def test_unknown_family():
    with pytest.raises(UnknownFamily):
        build_rep("s3-shift-c", 8)


@pytest.mark.parametrize("family", FAMILIES)
def test_relations_hold_inside_window(family):
    rho = build_rep(family, 64, lam=0.5, mu=2.5, alpha=1.0, beta=-1.0, theta=0.3)
    assert relation_residual(rho, 58) <= 1e-12
    assert all(v <= 1 + NORM_TOL for v in rho.norms().values())


def test_wider_window_for_s3():
    assert relation_residual(build_rep("s3-shift-b", 64), 60) <= 1e-12


def test_window_too_large():
    with pytest.raises(WindowTooLarge):
        relation_residual(build_rep("sphere-shift-b", 64), 60)


def test_truncation_edge_breaks_relations():
    rho = build_rep("disc-shift", 16)
    assert relation_residual(rho, 14) <= 1e-12
    edge = evaluate(rho.presentation.relations[0], rho)
    assert abs(edge[15, 15]) > 0.1


def test_naive_weights_are_detected():
    rho = build_rep("disc-shift", 32, offset=0)
    # naive S e_k = sqrt(1 - q^k) e_{k+1} kills e_0, so x* x e_0 = 0 instead of (1 - q) e_0
    assert relation_residual(rho, 28) == pytest.approx(1 - Q)
    assert relation_residual(build_rep("s3-shift-b", 32, offset=0), 28) > 0.1


def test_trace_examples():
    assert trace_functional(S3.one())[0] == 0
    v, bound = trace_functional(S3.poly("b b*"))
    assert abs(v - (-1 / (1 - P))) <= 1e-10 + bound
    v, bound = trace_functional(S3.poly("a a*"))
    assert abs(v - 1 / (1 - Q)) <= 1e-10 + bound
    assert trace_functional(S3.poly("b a"))[0] == 0


def test_trace_rejects_non_coinvariant():
    with pytest.raises(ValueError):
        trace_functional(S3.poly("a"))


def test_tail_bound_is_valid():
    f = L.projector(2).trace()
    coarse, bound = trace_functional(f, 128, 20)
    fine, _ = trace_functional(f, 128, 64)
    assert 0 < abs(coarse - fine) <= bound


def test_pairing_zero():
    rep = chern_pairing(L.projector(0))
    assert rep.value == 0 and rep.nearest_int == 0


def test_pairing_one():
    rep = chern_pairing(L.projector(1), 128, 64)
    assert abs(rep.value - 1) <= 1e-10
    assert rep.converged()


def test_pairing_two_at_two_windows():
    a = chern_pairing(L.projector(2), 128, 48)
    b = chern_pairing(L.projector(2), 128, 64)
    assert abs(b.value - 2) <= 1e-8
    assert abs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-12


def test_pairing_converges_in_N():
    small = chern_pairing(L.projector(1), 64, 58)
    big = chern_pairing(L.projector(1), 128, 64)
    assert abs(small.value - big.value) <= small.tail_bound + 1e-12


@pytest.mark.parametrize("k", range(8))
def test_pairing_is_phase_independent(k):
    base = chern_pairing(L.projector(1))
    t = 2 * math.pi * k / 8
    rep = chern_pairing(L.projector(1), lam=t, mu=-t)
    assert abs(rep.value - base.value) <= 1e-10


def test_pairing_report_json():
    d = chern_pairing(L.projector(-1)).to_dict()
    assert d["nearest_int"] == -1 and d["winding"] == -1
    assert set(d) == {"winding", "N", "M", "value_re", "value_im", "tail_bound", "nearest_int", "distance"}


G = Grading(S3)


@settings(max_examples=60)
@given(coinvariant_polys(S3, G, 4, 3), coinvariant_polys(S3, G, 4, 3))
def test_trace_property(f, g):
    fg, _ = trace_functional(S3.nf(f * g))
    gf, _ = trace_functional(S3.nf(g * f))
    assert abs(fg - gf) <= 1e-10
