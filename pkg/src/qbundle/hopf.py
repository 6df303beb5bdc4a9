"""O(U(1)), tensor elements, and the right coaction given by the winding grading."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping

from .linalg import solve
from .ncpoly import NCPoly, Word, as_scalar, format_scalar
from .rewrite import Presentation, _cap_for, basis_upto

__all__ = [
    "IOTA",
    "Grading",
    "LaurentElement",
    "NoSolution",
    "TensorElement",
    "UngradedLetter",
    "coaction",
    "coaction_by_substitution",
    "express_in_base",
    "homogeneous_parts",
    "iota",
    "is_coinvariant",
]

# bundle projection O(S^2_pq) -> O(S^3_pq)
IOTA = {"f_0": "b b*", "f_1": "b a", "f_1*": "a* b*"}


class UngradedLetter(KeyError):
    pass


class NoSolution(ValueError):
    pass


def _format_power(n: int, letter: str = "u") -> str:
    if n == 0:
        return "1"
    name = letter if n > 0 else f"{letter}*"
    return name if abs(n) == 1 else f"{name}^{abs(n)}"


class LaurentElement:
    """sum_n c_n u^n in O(U(1)); u* is stored as u^-1."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        self.coeffs = {int(n): as_scalar(c) for n, c in (coeffs or {}).items() if as_scalar(c)}

    @classmethod
    def power(cls, n: int, c=1) -> "LaurentElement":
        return cls({n: c})

    def __add__(self, other: "LaurentElement") -> "LaurentElement":
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, 0) + c
        return LaurentElement(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "LaurentElement":
        c = as_scalar(c)
        return LaurentElement({n: c * v for n, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out: dict[int, Fraction] = {}
        for n, c in self.coeffs.items():
            for m, d in other.coeffs.items():
                out[n + m] = out.get(n + m, 0) + c * d
        return LaurentElement(out)

    def __eq__(self, other):
        return isinstance(other, LaurentElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def star(self) -> "LaurentElement":
        return LaurentElement({-n: c for n, c in self.coeffs.items()})

    def coproduct(self) -> "TensorElement":
        return TensorElement(None, None, {(n, n): c for n, c in self.coeffs.items()})

    def counit(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def antipode(self) -> "LaurentElement":
        return LaurentElement({-n: c for n, c in self.coeffs.items()})

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, n in enumerate(sorted(self.coeffs)):
            c = self.coeffs[n]
            a = abs(c)
            body = _format_power(n)
            if a != 1 or n == 0:
                coef = format_scalar(a) if a.denominator == 1 else f"({format_scalar(a)})"
                body = coef if n == 0 else f"{coef} {body}"
            sign = "-" if c < 0 else ("" if k == 0 else "+")
            parts.append(f"{sign} {body}".strip() if k else f"{sign}{body}")
        return " ".join(parts)

    __repr__ = __str__


class Grading:
    """Winding degree of each letter; additive on words."""

    def __init__(self, presentation: Presentation):
        if presentation.grading is None:
            raise UngradedLetter(f"{presentation.name} has no grading")
        self.presentation = presentation
        letters = presentation.alphabet.letters
        try:
            self.table = tuple(presentation.grading[name] for name in letters)
        except KeyError as exc:
            raise UngradedLetter(f"letter {exc} has no winding degree") from None
        star = presentation.alphabet.star_index
        for i, j in enumerate(star):
            if self.table[j] != -self.table[i]:
                raise ValueError(f"deg({letters[j]}) != -deg({letters[i]})")

    def degree(self, w: Word) -> int:
        t = self.table
        return sum(t[i] for i in w)


def homogeneous_parts(f: NCPoly, grading: Grading) -> dict[int, NCPoly]:
    parts: dict[int, dict] = {}
    for w, c in f.items():
        parts.setdefault(grading.degree(w), {})[w] = c
    return {n: NCPoly._raw(f.alphabet, t) for n, t in sorted(parts.items())}


class TensorElement:
    """Finite sum of left (x) right.

    ``left`` / ``right`` are presentations whose legs are kept in normal form,
    or None for a Laurent leg of O(U(1)) keyed by its exponent. Terms map
    ``(left_key, right_key)`` to a coefficient.
    """

    __slots__ = ("left", "right", "terms")

    def __init__(self, left: Presentation | None, right: Presentation | None, terms: Mapping | Iterable = ()):
        self.left = left
        self.right = right
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for k, c in items:
            c = as_scalar(c)
            s = clean.get(k, 0) + c
            if s:
                clean[k] = s
            else:
                clean.pop(k, None)
        self.terms = clean

    # constructors
    @classmethod
    def pure(cls, left, right, x, y) -> "TensorElement":
        """x (x) y for x, y NCPoly (normal-formed) or LaurentElement / int exponent."""
        xs = _leg_terms(left, x)
        ys = _leg_terms(right, y)
        return cls(left, right, {(a, b): c * d for a, c in xs.items() for b, d in ys.items()})

    def _same(self, other: "TensorElement"):
        if self.left is not other.left or self.right is not other.right:
            raise ValueError("tensor elements over different algebras")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return TensorElement(self.left, self.right, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "TensorElement":
        c = as_scalar(c)
        return TensorElement(self.left, self.right, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._same(other)
        deg = self.leg_degrees()
        odeg = other.leg_degrees()
        ml = _leg_mul(self.left, deg[0] + odeg[0])
        mr = _leg_mul(self.right, deg[1] + odeg[1])
        out: dict = {}
        for (a, b), c in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                for x, cx in ml(a, a2).items():
                    for y, cy in mr(b, b2).items():
                        k = (x, y)
                        out[k] = out.get(k, 0) + c * c2 * cx * cy
        return TensorElement(self.left, self.right, out)

    def star(self) -> "TensorElement":
        out = TensorElement(self.left, self.right)
        for (a, b), c in self.terms.items():
            out = out + TensorElement.pure(
                self.left, self.right, _leg_star(self.left, a), _leg_star(self.right, b)
            ).scale(c)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, TensorElement)
            and self.left is other.left
            and self.right is other.right
            and self.terms == other.terms
        )

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def leg_degrees(self) -> tuple[int, int]:
        dl = max((_leg_len(a) for a, _ in self.terms), default=0)
        dr = max((_leg_len(b) for _, b in self.terms), default=0)
        return dl, dr

    def degree(self) -> int:
        """max over summands of left degree + |right degree|."""
        return max((_leg_len(a) + _leg_len(b) for a, b in self.terms), default=-1)

    def by_right(self) -> dict[Hashable, NCPoly | Fraction]:
        """Collect left legs by right key."""
        groups: dict = {}
        for (a, b), c in self.terms.items():
            groups.setdefault(b, {})[a] = c
        if self.left is None:
            return {b: LaurentElement(g) for b, g in groups.items()}
        return {b: NCPoly._raw(self.left.alphabet, g) for b, g in groups.items()}

    def map_left(self, fn: Callable[[Hashable], Mapping], left: Presentation | None) -> "TensorElement":
        out: dict = {}
        for (a, b), c in self.terms.items():
            for x, cx in fn(a).items():
                out[(x, b)] = out.get((x, b), 0) + c * cx
        return TensorElement(left, self.right, out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        items = sorted(self.terms.items(), key=lambda kv: (_sort_key(kv[0][1]), _sort_key(kv[0][0])))
        for k, ((a, b), c) in enumerate(items):
            neg = c < 0
            m = -c if neg else c
            coef = "" if m == 1 else f"{format_scalar(m)} "
            body = f"{coef}{_leg_str(self.left, a)} (x) {_leg_str(self.right, b)}"
            if k == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    __repr__ = __str__

    @classmethod
    def parse(cls, left: Presentation, right: Presentation | None, text: str) -> "TensorElement":
        """Parse ``c p (x) h + ...``; legs are products of atoms, c a rational."""
        out = cls(left, right)
        for sign, chunk in _split_summands(text):
            if " (x) " not in f" {chunk} ":
                raise ValueError(f"summand without (x): {chunk!r}")
            lt, rt = re.split(r"\s\(x\)\s", f" {chunk} ", maxsplit=1)
            x = left.nf(left.poly(lt.strip()))
            if right is None:
                y = _parse_laurent(rt.strip())
            else:
                y = right.nf(right.poly(rt.strip()))
            out = out + cls.pure(left, right, x, y).scale(sign)
        return out


def _split_summands(text: str):
    """Split at top-level + / - that separate tensor summands."""
    depth = 0
    buf = ""
    sign = 1
    out = []
    s = text.strip()
    i = 0
    if s.startswith("-"):
        sign, s = -1, s[1:]
    elif s.startswith("+"):
        s = s[1:]
    while i < len(s):
        ch = s[i]
        if ch == "(":
            # the tensor sign token "(x)" does not change depth
            if s.startswith("(x)", i) and (i == 0 or s[i - 1] == " ") and s[i + 3 : i + 4] in ("", " "):
                buf += "(x)"
                i += 3
                continue
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and buf.strip() and "(x)" in buf and i > 0 and s[i - 1] == " ":
            out.append((sign, buf.strip()))
            sign = 1 if ch == "+" else -1
            buf = ""
        else:
            buf += ch
        i += 1
    if buf.strip():
        out.append((sign, buf.strip()))
    return out


def _parse_laurent(text: str) -> LaurentElement:
    H = _hopf_presentation()
    f = H.nf(H.poly(text))
    return _laurent_from_poly(f)


_HOPF = None


def _hopf_presentation() -> Presentation:
    global _HOPF
    if _HOPF is None:
        from .rewrite import load_presentation

        _HOPF = load_presentation("hopf_u1")
    return _HOPF


def _laurent_from_poly(f: NCPoly) -> LaurentElement:
    u = f.alphabet.index["u"]
    out: dict[int, Fraction] = {}
    for w, c in f.items():
        n = sum(1 if i == u else -1 for i in w)
        out[n] = out.get(n, 0) + c
    return LaurentElement(out)


def _sort_key(k):
    if isinstance(k, tuple):
        return (0, len(k), k)
    return (1, abs(k), k)


def _leg_len(k) -> int:
    return len(k) if isinstance(k, tuple) else abs(k)


def _leg_terms(space: Presentation | None, x) -> dict:
    if space is None:
        if isinstance(x, int):
            return {x: Fraction(1)}
        if isinstance(x, LaurentElement):
            return dict(x.coeffs)
        raise TypeError("Laurent leg expected")
    if isinstance(x, NCPoly):
        return dict(x.items())
    raise TypeError("NCPoly leg expected")


def _leg_mul(space: Presentation | None, degree: int):
    if space is None:
        return lambda n, m: {n + m: Fraction(1)}
    R = space.system(_cap_for(degree))
    return lambda a, b: R._reducer.mul_word(a, b)


def _leg_star(space: Presentation | None, k):
    if space is None:
        return -k
    f = NCPoly.monomial(space.alphabet, space.alphabet.star_word(k))
    return space.nf(f)


def _leg_str(space: Presentation | None, k) -> str:
    if space is None:
        return _format_power(k)
    return space.alphabet.format_word(k)


# coaction ------------------------------------------------------------------


def coaction(f: NCPoly, presentation: Presentation, grading: Grading | None = None) -> TensorElement:
    """Delta_R(f) = sum_n f_n (x) u^n with f_n the winding-n part of nf(f)."""
    grading = grading or Grading(presentation)
    g = presentation.nf(f)
    return TensorElement(presentation, None, {(w, grading.degree(w)): c for w, c in g.items()})


def coaction_by_substitution(f: NCPoly, presentation: Presentation) -> TensorElement:
    """Delta_R as the algebra map determined on generators: letter -> letter (x) u^deg."""
    grading = Grading(presentation)
    A = presentation.alphabet
    one = TensorElement(presentation, None, {((), 0): 1})
    images = [
        TensorElement(presentation, None, {((i,), grading.table[i]): 1}) for i in range(len(A))
    ]
    out = TensorElement(presentation, None)
    for w, c in f.items():
        t = one
        for i in w:
            t = t * images[i]
        out = out + t.scale(c)
    return out


def is_coinvariant(f: NCPoly, presentation: Presentation) -> bool:
    grading = Grading(presentation)
    return all(grading.degree(w) == 0 for w in presentation.nf(f).words())


def iota(g: NCPoly, total: Presentation) -> NCPoly:
    """Image of a sphere polynomial in O(S^3_pq), in normal form."""
    images = {name: total.poly(text) for name, text in IOTA.items()}
    return total.substitute(g, images)


def express_in_base(
    f: NCPoly, total: Presentation, base: Presentation, d: int = 6
) -> NCPoly:
    """Find g over f_0, f_1, f_1* with nf(iota(g)) = nf(f), by exact linear solve."""
    if not is_coinvariant(f, total):
        raise ValueError("element is not coinvariant")
    target = total.nf(f)
    words = basis_upto(base.system(_cap_for(d)), d)
    cols = [dict(iota(NCPoly.monomial(base.alphabet, w), total).items()) for w in words]
    sol = solve(cols, dict(target.items()))
    if sol is None:
        raise NoSolution(f"no preimage of degree <= {d}")
    return NCPoly(base.alphabet, {words[i]: c for i, c in sol.items()})
