"""Canonical map, strong connection and line-bundle projectors for O(S^2_pq) c O(S^3_pq)."""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from fractions import Fraction

from .bundle import CheckReport
from .hopf import Grading, NoSolution, TensorElement, express_in_base
from .linalg import kernel, solve
from .ncpoly import NCPoly
from .rewrite import Presentation, _cap_for, load_presentation

__all__ = [
    "MINIMAL_ANSATZ",
    "ProjectorMatrix",
    "StrongConnection",
    "balance",
    "canonical_map",
    "multiply_legs",
    "solve_lift",
    "verify_galois",
]

# (left leg, right leg) candidates for l(u^{+1}) and l(u^{-1})
MINIMAL_ANSATZ = {
    1: [("a*", "a"), ("b", "b*"), ("b a a*", "b*")],
    -1: [("b*", "b"), ("a", "a*"), ("a b b*", "a*")],
}

Legs = list[tuple[NCPoly, NCPoly]]


def _R(P: Presentation, degree: int):
    return P.system(_cap_for(degree))


def solve_lift(P: Presentation, n: int, ansatz=None) -> Legs:
    """Coefficients of l(u^n) over an ansatz by solving m(l) = 1 exactly.

    Raises NoSolution if the ansatz admits no solution and ValueError if the
    solution is not unique.
    """
    ansatz = ansatz or MINIMAL_ANSATZ[n]
    pairs = [(P.nf(P.poly(x)), P.nf(P.poly(y))) for x, y in ansatz]
    R = _R(P, max(x.degree() + y.degree() for x, y in pairs))
    cols = [dict(R.multiply(x, y).items()) for x, y in pairs]
    sol = solve(cols, {(): Fraction(1)})
    if sol is None:
        raise NoSolution(f"m(l(u^{n})) = 1 has no solution over the ansatz")
    if kernel(cols):
        raise ValueError("solution over the ansatz is not unique")
    # group by right leg, keeping first-appearance order
    groups: dict[NCPoly, NCPoly] = {}
    for i, (x, y) in enumerate(pairs):
        c = sol.get(i, 0)
        if c:
            groups[y] = groups.get(y, NCPoly.zero(P.alphabet)) + x.scale(c)
    return [(x, y) for y, x in groups.items() if x]


def multiply_legs(P: Presentation, legs: Legs) -> NCPoly:
    """m(sum x_i (x) y_i) = sum x_i y_i in normal form."""
    if not legs:
        return NCPoly.zero(P.alphabet)
    R = _R(P, max(x.degree() + y.degree() for x, y in legs))
    out = NCPoly.zero(P.alphabet)
    for x, y in legs:
        out = out + R.multiply(x, y)
    return out


class StrongConnection:
    """l(u^n) for all n, memoised.

    l(u^{+-1}) come from :func:`solve_lift`; for |n| > 1 the sandwich
    recursion l(u^{n+s}) = sum_{i,j} x1_i x_j (x) y_j y1_i with (x1, y1) the
    legs of l(u^s), s = sign(n), keeps m(l) = 1 and the leg gradings.
    """

    def __init__(self, P: Presentation | None = None):
        self.P = P or load_presentation("s3")
        self._lock = threading.RLock()
        one = self.P.one()
        self._table: dict[int, Legs] = {0: [(one, one)]}

    def legs(self, n: int) -> Legs:
        hit = self._table.get(n)
        if hit is not None:
            return hit
        with self._lock:
            if n in self._table:
                return self._table[n]
            s = 1 if n > 0 else -1
            if abs(n) == 1:
                legs = solve_lift(self.P, n)
            else:
                inner = self.legs(n - s)
                outer = self.legs(s)
                dl = max(x.degree() for x, _ in outer) + max(x.degree() for x, _ in inner)
                dr = max(y.degree() for _, y in outer) + max(y.degree() for _, y in inner)
                R = _R(self.P, max(dl, dr))
                legs = [
                    (R.multiply(xo, xi), R.multiply(yi, yo)) for xo, yo in outer for xi, yi in inner
                ]
            self._table[n] = legs
            return legs

    def __call__(self, n: int) -> TensorElement:
        """l(u^n) as a tensor in P (x) P."""
        out = TensorElement(self.P, self.P)
        for x, y in self.legs(n):
            out = out + TensorElement.pure(self.P, self.P, x, y)
        return out

    def contraction(self, n: int) -> NCPoly:
        return multiply_legs(self.P, self.legs(n))

    def homogeneous(self, n: int) -> bool:
        g = Grading(self.P)
        return all(
            all(g.degree(w) == -n for w in x.words()) and all(g.degree(w) == n for w in y.words())
            for x, y in self.legs(n)
        )

    def projector(self, n: int) -> "ProjectorMatrix":
        legs = self.legs(n)
        deg = max(x.degree() for x, _ in legs) + max(y.degree() for _, y in legs)
        R = _R(self.P, deg)
        entries = [[R.multiply(yi, xj) for xj, _ in legs] for _, yi in legs]
        return ProjectorMatrix(self.P, n, entries)


def canonical_map(t: TensorElement) -> TensorElement:
    """can(x (x) y) = x y_(0) (x) y_(1), with y_(1) = u^deg for homogeneous y."""
    P = t.left
    g = Grading(P)
    R = _R(P, t.leg_degrees()[0] + t.leg_degrees()[1])
    out: dict = {}
    for (a, b), c in t.terms.items():
        n = g.degree(b)
        for w, v in R._reducer.mul_word(a, b).items():
            k = (w, n)
            out[k] = out.get(k, 0) + c * v
    return TensorElement(P, None, out)


def balance(t: TensorElement) -> TensorElement:
    """Normal form in P (x)_B P: the longest coinvariant suffix of each left
    word moves onto the right leg."""
    P = t.left
    g = Grading(P)
    R = _R(P, t.leg_degrees()[0] + t.leg_degrees()[1])
    out: dict = {}
    for (a, b), c in t.terms.items():
        cut = len(a)
        acc = 0
        for k in range(len(a) - 1, -1, -1):
            acc += g.table[a[k]]
            if acc == 0:
                cut = k
        head, tail = a[:cut], a[cut:]
        for w, v in R._reducer.mul_word(tail, b).items():
            key = (head, w)
            out[key] = out.get(key, 0) + c * v
    return TensorElement(P, t.right, out)


@dataclass
class ProjectorMatrix:
    P: Presentation
    n: int
    entries: list[list[NCPoly]]

    @property
    def size(self) -> int:
        return len(self.entries)

    def square(self) -> list[list[NCPoly]]:
        E = self.entries
        k = self.size
        deg = 2 * max(e.degree() for row in E for e in row)
        R = _R(self.P, deg)
        out = []
        for i in range(k):
            row = []
            for j in range(k):
                s = NCPoly.zero(self.P.alphabet)
                for m in range(k):
                    s = s + R.multiply(E[i][m], E[m][j])
                row.append(s)
            out.append(row)
        return out

    def is_idempotent(self) -> bool:
        return self.square() == self.entries

    def entries_coinvariant(self) -> bool:
        g = Grading(self.P)
        return all(g.degree(w) == 0 for row in self.entries for e in row for w in e.words())

    def trace(self) -> NCPoly:
        out = NCPoly.zero(self.P.alphabet)
        for i in range(self.size):
            out = out + self.entries[i][i]
        return out

    def in_base(self, base: Presentation, d: int = 6) -> list[list[NCPoly]]:
        return [[express_in_base(e, self.P, base, d) for e in row] for row in self.entries]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "size": self.size,
            "entries": [[str(e) for e in row] for row in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def verify_galois(N: int, l: StrongConnection | None = None) -> CheckReport:
    """can(l(u^n)) = 1 (x) u^n for |n| <= N."""
    l = l or StrongConnection()
    P = l.P
    results = {}
    for n in range(-N, N + 1):
        got = canonical_map(l(n))
        want = TensorElement(P, None, {((), n): 1})
        results[n] = got == want
    bad = [n for n, ok in results.items() if not ok]
    return CheckReport(
        "galois",
        "s3",
        N,
        not bad,
        f"can(l(u^{bad[0]})) != 1 (x) u^{bad[0]}" if bad else None,
        {"identities": len(results)},
    )
