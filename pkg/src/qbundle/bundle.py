"""Coverings, transition functions, gluing and local trivializations.

All ideal-theoretic statements are decided on degree filtrations by exact rank
computations; kernels are never materialised.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Sequence

from .hopf import Grading, LaurentElement, TensorElement, iota
from .linalg import Echelon, kernel, rank
from .ncpoly import AlgebraParams, NCPoly, Word
from .rewrite import Presentation, _cap_for, basis_upto, load_presentation

__all__ = [
    "AlgebraMap",
    "CheckReport",
    "Covering",
    "GluedAlgebra",
    "GluedElement",
    "HopfBundle",
    "TensorMap",
    "TransitionData",
    "check_cocycle",
    "check_completeness",
    "check_covering",
    "check_trivialization",
    "hopf_bundle",
]


@dataclass
class CheckReport:
    check: str
    instance: str
    degree: int | None
    status: bool
    witness: str | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "check": self.check,
            "instance": self.instance,
            "degree": self.degree,
            "status": "pass" if self.status else "fail",
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __bool__(self):
        return self.status


# maps ------------------------------------------------------------------------


class AlgebraMap:
    """Algebra homomorphism between presentations, given on letters."""

    def __init__(self, source: Presentation, target: Presentation, images: Mapping[str, NCPoly | str]):
        self.source = source
        self.target = target
        self.images = {
            k: (target.poly(v) if isinstance(v, str) else v) for k, v in images.items()
        }
        missing = set(source.alphabet.letters) - set(self.images)
        if missing:
            raise ValueError(f"no image for {sorted(missing)}")
        self._memo: dict[Word, dict] = {}

    def __call__(self, f: NCPoly) -> NCPoly:
        out: dict = {}
        for w, c in f.items():
            for k, v in self.word(w).items():
                out[k] = out.get(k, 0) + c * v
        return NCPoly(self.target.alphabet, out)

    def word(self, w: Word) -> dict:
        hit = self._memo.get(w)
        if hit is None:
            hit = dict(self.target.substitute(NCPoly.monomial(self.source.alphabet, w), self.images).items())
            self._memo[w] = hit
        return hit

    # chart interface: coordinates are target normal words
    def filtration(self, d: int) -> list[Word]:
        return basis_upto(self.target.system(_cap_for(d)), d)


class TensorMap:
    """Algebra homomorphism P -> B (x) O(U(1)), given on letters."""

    def __init__(self, source: Presentation, target: Presentation, images: Mapping[str, TensorElement]):
        self.source = source
        self.target = target
        self.images = dict(images)
        self._memo: dict[Word, TensorElement] = {(): TensorElement(target, None, {((), 0): 1})}

    def tensor_word(self, w: Word) -> TensorElement:
        hit = self._memo.get(w)
        if hit is None:
            prev = self.tensor_word(w[:-1])
            hit = prev * self.images[self.source.alphabet.letters[w[-1]]]
            self._memo[w] = hit
        return hit

    def __call__(self, f: NCPoly) -> TensorElement:
        out = TensorElement(self.target, None)
        for w, c in f.items():
            out = out + self.tensor_word(w).scale(c)
        return out

    def word(self, w: Word) -> dict:
        return self.tensor_word(w).terms

    def filtration(self, d: int) -> list[tuple[Word, int]]:
        words = basis_upto(self.target.system(_cap_for(d)), d)
        return [(w, n) for w in words for n in range(-(d - len(w)), d - len(w) + 1)]


# coverings -------------------------------------------------------------------


@dataclass
class Covering:
    """Family of quotient maps of a base algebra with pairwise overlap maps.

    ``overlaps[(i, j)]`` sends a chart-i coordinate key to a vector of the
    double quotient B_ij; a tuple (b_i) is compatible when
    ``overlaps[(i, j)](b_i) == overlaps[(j, i)](b_j)`` for all i < j.
    """

    name: str
    base: Presentation
    charts: list
    overlaps: dict[tuple[int, int], Callable[[Hashable], Mapping]] = field(default_factory=dict)
    base_words: Callable[[int], list[Word]] | None = None
    # preimages of degree-d tuples are searched up to degree preimage_factor * d
    preimage_factor: int = 1

    def words(self, d: int) -> list[Word]:
        if self.base_words is not None:
            return self.base_words(d)
        return basis_upto(self.base.system(_cap_for(d)), d)

    def image_vector(self, w: Word) -> dict:
        v: dict = {}
        for i, chart in enumerate(self.charts):
            for k, c in chart.word(w).items():
                v[(i, k)] = c
        return v


def check_covering(C: Covering, d: int) -> CheckReport:
    """Zero intersection of the kernels on the degree <= d filtration."""
    words = C.words(d)
    vecs = [C.image_vector(w) for w in words]
    deps = kernel(vecs)
    rk = len(words) - len(deps)
    witness = None
    if deps:
        witness = str(NCPoly(C.base.alphabet, {words[i]: c for i, c in deps[0].items()}))
    return CheckReport(
        "covering", C.name, d, not deps, witness, {"dimension": len(words), "rank": rk}
    )


def compatible_tuples(C: Covering, d: int) -> list[dict]:
    """Basis of compatible tuples inside the direct sum of chart filtrations F_d."""
    unknowns = [(i, k) for i, chart in enumerate(C.charts) for k in chart.filtration(d)]
    n = len(C.charts)
    cols = []
    for i, k in unknowns:
        col: dict = {}
        for j in range(n):
            if j == i:
                continue
            pair = (min(i, j), max(i, j))
            sign = 1 if i < j else -1
            for t, c in C.overlaps[(i, j)](k).items():
                key = (pair, t)
                s = col.get(key, 0) + sign * c
                if s:
                    col[key] = s
                else:
                    col.pop(key, None)
        cols.append(col)
    return [{unknowns[i]: c for i, c in rel.items()} for rel in kernel(cols)]


def check_completeness(C: Covering, d: int, preimage_degree: int | None = None) -> CheckReport:
    """Every compatible tuple of degree <= d lifts to the base (filtration ranks)."""
    pre = C.preimage_factor * d if preimage_degree is None else preimage_degree
    ech = Echelon()
    words = C.words(pre)
    for w in words:
        ech.add(C.image_vector(w))
    compat = compatible_tuples(C, d) if len(C.charts) > 1 else [
        {(0, k): Fraction(1)} for k in C.charts[0].filtration(d)
    ]
    missing = [t for t in compat if not ech.contains(t)]
    witness = None
    if missing:
        witness = ", ".join(f"{c}*{k}" for k, c in list(missing[0].items())[:6])
    return CheckReport(
        "completeness",
        C.name,
        d,
        not missing,
        witness,
        {"compatible_dimension": len(compat), "image_rank": ech.rank, "preimage_degree": pre},
    )


# transition functions -----------------------------------------------------------


@dataclass
class TransitionData:
    """tau_ij : O(U(1)) -> Z(B_ij), determined by the images of u and u*.

    ``spaces[(i, j)]`` is B_ij (B_i when i == j); ``restrict[((i, j), k)]`` is
    the quotient map B_ij -> B_ijk given as an AlgebraMap.
    """

    labels: tuple
    spaces: dict[tuple, Presentation]
    images: dict[tuple, tuple[NCPoly, NCPoly]]
    restrict: dict[tuple, AlgebraMap] = field(default_factory=dict)

    def tau(self, i, j, n: int) -> NCPoly:
        B = self.spaces[(i, j)]
        up, down = self.images[(i, j)]
        g = up if n >= 0 else down
        out = B.one()
        R = B.system(_cap_for(abs(n) * max(1, g.degree())))
        for _ in range(abs(n)):
            out = R.multiply(out, g)
        return out

    def tau_element(self, i, j, h: LaurentElement) -> NCPoly:
        B = self.spaces[(i, j)]
        out = NCPoly.zero(B.alphabet)
        for n, c in h.coeffs.items():
            out = out + self.tau(i, j, n).scale(c)
        return out


def check_cocycle(T: TransitionData, N: int = 4) -> CheckReport:
    failures: list[str] = []
    for i in T.labels:
        for j in T.labels:
            B = T.spaces[(i, j)]
            for n in range(-N, N + 1):
                t = T.tau(i, j, n)
                if i == j and t != B.one():
                    failures.append(f"tau_{i}{i}(u^{n}) = {t} != 1")
                if T.tau(j, i, -n) != t:
                    failures.append(f"tau_{j}{i}(S(u^{n})) != tau_{i}{j}(u^{n})")
                for name in B.alphabet.letters:
                    g = B.letter(name)
                    if B.nf(g * t - t * g):
                        failures.append(f"tau_{i}{j}(u^{n}) does not commute with {name}")
            up, down = T.images[(i, j)]
            if B.nf(up * down) != B.one() or B.nf(down * up) != B.one():
                failures.append(f"tau_{i}{j}(u) tau_{i}{j}(u*) != 1")
    triples = 0
    for i in T.labels:
        for j in T.labels:
            for k in T.labels:
                if len({i, j, k}) < 3:
                    continue
                triples += 1
                r_ij = T.restrict[((i, j), k)]
                r_ik = T.restrict[((i, k), j)]
                r_kj = T.restrict[((k, j), i)]
                Bijk = r_ij.target
                for n in range(-N, N + 1):
                    lhs = r_ij(T.tau(i, j, n))
                    rhs = Bijk.nf(r_ik(T.tau(i, k, n)) * r_kj(T.tau(k, j, n)))
                    if lhs != rhs:
                        failures.append(f"cocycle fails on ({i},{j},{k}) at u^{n}")
    return CheckReport(
        "cocycle",
        "transition",
        N,
        not failures,
        failures[0] if failures else None,
        {"triples": triples},
    )


# gluing ------------------------------------------------------------------------


@dataclass(frozen=True)
class GluedElement:
    algebra: "GluedAlgebra"
    parts: tuple

    def __add__(self, other):
        return GluedElement(self.algebra, tuple(a + b for a, b in zip(self.parts, other.parts)))

    def __sub__(self, other):
        return GluedElement(self.algebra, tuple(a - b for a, b in zip(self.parts, other.parts)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GluedElement(self.algebra, tuple(a.scale(other) for a in self.parts))
        return GluedElement(self.algebra, tuple(a * b for a, b in zip(self.parts, other.parts)))

    def scale(self, c):
        return self * Fraction(c)

    def star(self):
        return GluedElement(self.algebra, tuple(a.star() for a in self.parts))

    def __eq__(self, other):
        return isinstance(other, GluedElement) and self.parts == other.parts

    def __hash__(self):
        return id(self)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.parts)

    def __str__(self):
        return "(" + ", ".join(str(a) for a in self.parts) + ")"


class GluedAlgebra:
    """P = {(f_i) in (+)_i B_i (x) H : (pi^i_j (x) id) f_i = phi_ij (pi^j_i (x) id) f_j}.

    ``restrict[(i, j)]`` is the AlgebraMap B_i -> B_ij and
    phi_ij(b (x) u^n) = b tau_ji(u^n) (x) u^n.
    """

    def __init__(self, labels: Sequence, charts: Sequence[Presentation], restrict: Mapping, T: TransitionData, base_maps: Mapping | None = None):
        self.labels = tuple(labels)
        self.charts = list(charts)
        self.restrict = dict(restrict)
        self.T = T
        self.base_maps = dict(base_maps or {})

    def element(self, parts: Sequence[TensorElement]) -> GluedElement:
        return GluedElement(self, tuple(parts))

    def overlap_value(self, i: int, j: int, key) -> dict:
        """phi_ij-side value of the chart-i basis tensor ``key`` on the overlap B_ij.

        For i < j this is (pi^i_j (x) id); for i > j the value is further twisted
        by tau_ij, i.e. phi_ji o (pi^i_j (x) id), so compatibility reads
        overlap_value(i, j, f_i) == overlap_value(j, i, f_j).
        """
        li, lj = self.labels[i], self.labels[j]
        w, n = key
        r = self.restrict[(i, j)]
        B = r.target
        img = NCPoly._raw(B.alphabet, r.word(w))
        if i > j:
            img = B.nf(img * self.T.tau(li, lj, n))
        return {(v, n): c for v, c in img.items()}

    def overlap_map(self, i: int, j: int) -> Callable[[Hashable], dict]:
        return lambda key: self.overlap_value(i, j, key)

    def is_compatible(self, f: GluedElement) -> bool:
        n = len(self.charts)
        for i in range(n):
            for j in range(i + 1, n):
                if _apply(self.overlap_map(i, j), f.parts[i].terms) != _apply(
                    self.overlap_map(j, i), f.parts[j].terms
                ):
                    return False
        return True

    def coaction(self, f: GluedElement) -> tuple[dict, ...]:
        """Componentwise (id (x) Delta): keys (left word, n, n)."""
        return tuple({(w, n, n): c for (w, n), c in part.terms.items()} for part in f.parts)

    def iota(self, b: NCPoly) -> GluedElement:
        parts = []
        for i, B in enumerate(self.charts):
            img = self.base_maps[i](b)
            parts.append(TensorElement.pure(B, None, img, 0))
        return self.element(parts)


def _apply(fn, terms: Mapping) -> dict:
    out: dict = {}
    for k, c in terms.items():
        for t, v in fn(k).items():
            s = out.get(t, 0) + c * v
            if s:
                out[t] = s
            else:
                out.pop(t, None)
    return out


# the quantum Hopf bundle ------------------------------------------------------------


@dataclass
class HopfBundle:
    """All presentations and structure maps of O(S^2_pq) c O(S^3_pq)."""

    params: AlgebraParams
    total: Presentation
    base: Presentation
    disc_p: Presentation
    disc_q: Presentation
    circle: Presentation
    pi: list[AlgebraMap]
    phi: list[AlgebraMap]
    chi: list[TensorMap]
    transition: TransitionData
    glued: GluedAlgebra
    labels: tuple = ("p", "q")

    @property
    def relations(self) -> list[NCPoly]:
        return self.total.relations

    def base_covering(self) -> Covering:
        overlaps = {
            (0, 1): lambda w: self.phi[0].word(w),
            (1, 0): lambda w: self.phi[1].word(w),
        }
        return Covering("sphere:{ker pr1, ker pr2}", self.base, list(self.pi), overlaps)

    def total_covering(self) -> Covering:
        g = self.glued
        overlaps = {(0, 1): g.overlap_map(0, 1), (1, 0): g.overlap_map(1, 0)}
        # chi_p(a^i a*^j b^k b*^l) = x^k x*^l (x) u^(i-j-k+l): a degree-d tensor
        # has a preimage of degree <= 2d
        return Covering(
            "s3:{ker chi_p, ker chi_q}", self.total, list(self.chi), overlaps, preimage_factor=2
        )

    def pair_embedding(self, f: NCPoly) -> GluedElement:
        return self.glued.element([chi(f) for chi in self.chi])

    def rank_of_image(self, d: int) -> int:
        words = basis_upto(self.total.system(_cap_for(d)), d)
        C = self.total_covering()
        return rank(C.image_vector(w) for w in words)

    def basis_count(self, d: int) -> int:
        return len(basis_upto(self.total.system(_cap_for(d)), d))

    def iota(self, b: NCPoly) -> NCPoly:
        return iota(b, self.total)


def hopf_bundle(params: AlgebraParams | None = None) -> HopfBundle:
    params = params or AlgebraParams()
    S3 = load_presentation("s3", params)
    S2 = load_presentation("sphere", params)
    Dp = load_presentation("disc_p", params)
    Dq = load_presentation("disc_q", params)
    S1 = load_presentation("circle", params)

    # pi_i forced by chi_i o iota = pi_i (x) 1
    pi_p = AlgebraMap(S2, Dp, {"f_0": "x x*", "f_1": "x", "f_1*": "x*"})
    pi_q = AlgebraMap(S2, Dq, {"f_0": "1", "f_1": "y", "f_1*": "y*"})
    phi_p = AlgebraMap(Dp, S1, {"x": "u", "x*": "u*"})
    phi_q = AlgebraMap(Dq, S1, {"y": "u", "y*": "u*"})

    T = TransitionData(
        labels=("p", "q"),
        spaces={("p", "p"): Dp, ("q", "q"): Dq, ("p", "q"): S1, ("q", "p"): S1},
        images={
            ("p", "p"): (Dp.one(), Dp.one()),
            ("q", "q"): (Dq.one(), Dq.one()),
            ("p", "q"): (S1.poly("u"), S1.poly("u*")),
            ("q", "p"): (S1.poly("u*"), S1.poly("u")),
        },
    )

    def t(B, left, n):
        return TensorElement.pure(B, None, B.nf(B.poly(left)), n)

    chi_p = TensorMap(S3, Dp, {"a": t(Dp, "1", 1), "a*": t(Dp, "1", -1), "b": t(Dp, "x", -1), "b*": t(Dp, "x*", 1)})
    chi_q = TensorMap(S3, Dq, {"a": t(Dq, "y", 1), "a*": t(Dq, "y*", -1), "b": t(Dq, "1", -1), "b*": t(Dq, "1", 1)})

    glued = GluedAlgebra(
        ("p", "q"), [Dp, Dq], {(0, 1): phi_p, (1, 0): phi_q}, T, base_maps={0: pi_p, 1: pi_q}
    )
    return HopfBundle(params, S3, S2, Dp, Dq, S1, [pi_p, pi_q], [phi_p, phi_q], [chi_p, chi_q], T, glued)


def check_trivialization(bundle: HopfBundle, i: int) -> CheckReport:
    """Conditions (a), (b), the homomorphism property and surjectivity for chi_i."""
    chi = bundle.chi[i]
    B = chi.target
    P = bundle.total
    failures: list[str] = []
    # (a) chi o iota = pi (x) 1
    for name in bundle.base.alphabet.letters:
        f = bundle.base.letter(name)
        lhs = chi(bundle.iota(f))
        rhs = TensorElement.pure(B, None, bundle.pi[i](f), 0)
        if lhs != rhs:
            failures.append(f"(a) on {name}: {lhs} != {rhs}")
    # (b) right colinearity
    grading = Grading(P)
    for name in P.alphabet.letters:
        w = (P.alphabet.index[name],)
        deg = grading.degree(w)
        lhs = {(v, n, deg): c for (v, n), c in chi.word(w).items()}
        rhs = {(v, n, n): c for (v, n), c in chi.word(w).items()}
        if lhs != rhs:
            failures.append(f"(b) on {name}")
    # homomorphism: every defining relation maps to zero
    for rel in P.relations:
        img = chi(rel)
        if not img.is_zero():
            failures.append(f"relation {rel} maps to {img}")
    # surjectivity: generators of B (x) H lie in the image of degree <= 2
    ech = Echelon()
    for w in basis_upto(P.system(), 2):
        ech.add(chi.word(w))
    gens = [((), 1), ((), -1)] + [((k,), 0) for k in range(len(B.alphabet))]
    for g in gens:
        if not ech.contains({g: 1}):
            failures.append(f"generator {g} not in the image")
    return CheckReport(
        "trivialization",
        f"chi_{bundle.labels[i]}",
        None,
        not failures,
        failures[0] if failures else None,
        {"relations": len(P.relations), "failures": len(failures)},
    )
