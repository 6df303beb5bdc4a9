"""Truncated Hilbert-space representations, the trace on the sphere and the
winding-number pairing.

Weighted shifts act on span{e_0, ..., e_{N-1}} by S_r e_k = sqrt(1 - r^(k+1)) e_{k+1}
and S_r e_{N-1} = 0. A word of shift length L applied to e_k with k < N - L
never touches the truncation edge, so relation residuals and traces are read
off a window of indices k < M with M <= N - L.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .galois import ProjectorMatrix
from .hopf import IOTA, is_coinvariant
from .ncpoly import AlgebraParams, NCPoly, Word
from .rewrite import Presentation, load_presentation

__all__ = [
    "FAMILIES",
    "NORM_TOL",
    "PairingReport",
    "TruncatedRep",
    "UnknownFamily",
    "WindowTooLarge",
    "build_rep",
    "check_rep",
    "chern_pairing",
    "evaluate",
    "relation_residual",
    "shift",
    "tail_bound",
    "trace_functional",
]

NORM_TOL = 1e-12


class UnknownFamily(KeyError):
    pass


class WindowTooLarge(ValueError):
    pass


def shift(r: float, N: int, offset: int = 1) -> np.ndarray:
    """Truncated weighted shift with weights sqrt(1 - r^(k+offset)).

    ``offset=1`` is the representation; ``offset=0`` gives the naive weights
    used as a negative control.
    """
    S = np.zeros((N, N), dtype=complex)
    k = np.arange(N - 1)
    S[k + 1, k] = np.sqrt(1.0 - r ** (k + offset))
    return S


@dataclass
class TruncatedRep:
    name: str
    presentation: Presentation
    N: int
    matrices: dict[str, np.ndarray]
    decay: float
    params: dict = field(default_factory=dict)
    # shift length of each letter; sphere letters are words of length 2 in a, b
    lengths: dict[str, int] = field(default_factory=dict)

    def length(self, w: Word) -> int:
        letters = self.presentation.alphabet.letters
        return sum(self.lengths.get(letters[i], 1) for i in w)

    def poly_length(self, f: NCPoly) -> int:
        return max((self.length(w) for w in f.words()), default=0)

    def norms(self) -> dict[str, float]:
        return {k: float(np.linalg.norm(m, 2)) for k, m in self.matrices.items()}


def _unit(angle: float) -> complex:
    return complex(math.cos(angle), math.sin(angle))


def _s3_matrices(family: str, N: int, p: float, q: float, phases: Mapping[str, float], offset: int):
    I = np.eye(N, dtype=complex)
    if family == "onedim":
        A = _unit(phases.get("alpha", 0.0)) * I
        B = _unit(phases.get("beta", 0.0)) * I
        decay = 0.0
    elif family == "shift-b":
        A = _unit(phases.get("lam", 0.0)) * I
        B = shift(p, N, offset)
        decay = p
    elif family == "shift-a":
        A = shift(q, N, offset)
        B = _unit(phases.get("mu", 0.0)) * I
        decay = q
    else:
        raise UnknownFamily(family)
    return {"a": A, "a*": A.conj().T, "b": B, "b*": B.conj().T}, decay


FAMILIES = (
    "s3-onedim",
    "s3-shift-b",
    "s3-shift-a",
    "disc-shift",
    "disc-point",
    "sphere-onedim",
    "sphere-shift-b",
    "sphere-shift-a",
)


def build_rep(
    family: str,
    N: int = 64,
    params: AlgebraParams | None = None,
    offset: int = 1,
    **phases: float,
) -> TruncatedRep:
    """Build a representation family on C^N.

    Phases are angles in radians: ``alpha``, ``beta`` for s3-onedim, ``lam`` for
    the b-shift family, ``mu`` for the a-shift family, ``theta`` for disc-point.
    """
    if family not in FAMILIES:
        raise UnknownFamily(family)
    if N < 2:
        raise ValueError("N must be at least 2")
    params = params or AlgebraParams()
    p, q = float(params.p), float(params.q)
    kind, _, sub = family.partition("-")
    if kind == "disc":
        P = load_presentation("disc", params)
        if sub == "shift":
            X, decay = shift(q, N, offset), q
        else:
            X, decay = _unit(phases.get("theta", 0.0)) * np.eye(N, dtype=complex), 0.0
        mats = {"x": X, "x*": X.conj().T}
        return TruncatedRep(family, P, N, mats, decay, dict(phases))
    m, decay = _s3_matrices(sub, N, p, q, phases, offset)
    if kind == "s3":
        return TruncatedRep(family, load_presentation("s3", params), N, m, decay, dict(phases))
    # sphere representations factor through iota
    P = load_presentation("sphere", params)
    mats = {}
    for name, text in IOTA.items():
        (x, y) = text.split()
        mats[name] = m[x] @ m[y]
    return TruncatedRep(family, P, N, mats, decay, dict(phases), {k: 2 for k in mats})


def evaluate(f: NCPoly, rho: TruncatedRep, _cache: dict | None = None) -> np.ndarray:
    """rho(f), with products memoised by word prefix."""
    if f.alphabet != rho.presentation.alphabet:
        raise ValueError(f"polynomial is not over the alphabet of {rho.name}")
    letters = f.alphabet.letters
    cache = {(): np.eye(rho.N, dtype=complex)} if _cache is None else _cache
    out = np.zeros((rho.N, rho.N), dtype=complex)
    for w, c in f.items():
        if w not in cache:
            for k in range(1, len(w) + 1):
                if w[:k] not in cache:
                    cache[w[:k]] = cache[w[: k - 1]] @ rho.matrices[letters[w[k - 1]]]
        out += float(c) * cache[w]
    return out


def _window(rho: TruncatedRep, f: NCPoly, M: int) -> None:
    L = rho.poly_length(f)
    if M > rho.N - L:
        raise WindowTooLarge(f"window {M} exceeds N - length = {rho.N - L} for {rho.name}")


def relation_residual(rho: TruncatedRep, M: int, relations: list[NCPoly] | None = None) -> float:
    """max over relations of max |<e_j, rho(rel) e_k>| over j, k < M."""
    relations = rho.presentation.relations if relations is None else relations
    cache: dict = {(): np.eye(rho.N, dtype=complex)}
    worst = 0.0
    for rel in relations:
        _window(rho, rel, M)
        val = evaluate(rel, rho, cache)[:M, :M]
        worst = max(worst, float(np.abs(val).max()))
    return worst


def check_rep(rho: TruncatedRep, M: int, tol: float = 1e-12) -> dict:
    res = relation_residual(rho, M)
    norms = rho.norms()
    ok = res <= tol and all(v <= 1 + NORM_TOL for v in norms.values())
    return {
        "family": rho.name,
        "N": rho.N,
        "M": M,
        "residual": res,
        "tolerance": tol,
        "norms": norms,
        "status": "pass" if ok else "fail",
    }


# trace and pairing ------------------------------------------------------------


def tail_bound(f: NCPoly, r: float, M: int) -> float:
    """Bound on the discarded tail sum_{k >= M} of the trace density of f.

    On e_k with k >= L a coinvariant word of length L returns to e_k after at
    most L weights sqrt(1 - r^m), m >= k + 1 - L, in each representation, and
    |1 - sqrt(1 - x)| <= x. Hence each diagonal entry differs from its common
    limit by at most L r^(k+1-L).
    """
    C = sum(abs(float(c)) * 2 * len(w) * r ** (1 - len(w)) for w, c in f.items() if w)
    return C * r**M / (1 - r)


def _trace_reps(N: int, params: AlgebraParams, lam: float, mu: float):
    # orientation: rho_1 is the b-shift family, rho_2 the a-shift family
    return (
        build_rep("s3-shift-b", N, params, lam=lam),
        build_rep("s3-shift-a", N, params, mu=mu),
    )


def trace_functional(
    f: NCPoly,
    N: int = 128,
    M: int = 64,
    params: AlgebraParams | None = None,
    lam: float = 0.0,
    mu: float = 0.0,
    presentation: Presentation | None = None,
) -> tuple[complex, float]:
    """tau(f) = sum_{k<M} <e_k, (rho_1(f) - rho_2(f)) e_k> and its tail bound."""
    P = presentation or load_presentation("s3", params)
    params = P.params
    if not is_coinvariant(f, P):
        raise ValueError("trace is defined on coinvariant elements only")
    f = P.nf(f)
    r1, r2 = _trace_reps(N, params, lam, mu)
    _window(r1, f, M)
    if M < r1.poly_length(f):
        raise WindowTooLarge(f"window {M} is shorter than the longest word of f")
    d = np.diagonal(evaluate(f, r1))[:M] - np.diagonal(evaluate(f, r2))[:M]
    value = complex(d.sum())
    r = max(float(params.p), float(params.q))
    return value, tail_bound(f, r, M)


@dataclass
class PairingReport:
    n: int
    N: int
    M: int
    value: complex
    tail_bound: float

    @property
    def nearest_int(self) -> int:
        return round(self.value.real)

    @property
    def distance(self) -> float:
        return abs(self.value - self.nearest_int)

    def converged(self, tol: float = 1e-10) -> bool:
        return self.distance <= self.tail_bound + tol

    def to_dict(self) -> dict:
        return {
            "winding": self.n,
            "N": self.N,
            "M": self.M,
            "value_re": self.value.real,
            "value_im": self.value.imag,
            "tail_bound": self.tail_bound,
            "nearest_int": self.nearest_int,
            "distance": self.distance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def chern_pairing(
    E: ProjectorMatrix,
    N: int = 128,
    M: int = 64,
    lam: float = 0.0,
    mu: float = 0.0,
) -> PairingReport:
    """<tau, [E]> = tau(sum_i E_ii)."""
    value, bound = trace_functional(E.trace(), N, M, lam=lam, mu=mu, presentation=E.P)
    return PairingReport(E.n, N, M, value, bound)

