"""Polynomial rewriting modulo two-sided ideals, with degree-capped completion.

Rules ``lhs -> rhs`` are oriented by the degree-lexicographic order on words.
Completion resolves overlap ambiguities (Bergman's diamond lemma) in order of
increasing overlap degree, so after ``complete(R, D)`` every ambiguity of
degree <= D resolves and normal forms of polynomials of degree <= D are unique.
"""

from __future__ import annotations

import heapq
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping

from .ncpoly import AlgebraParams, Alphabet, NCPoly, Word, as_scalar, word_key

__all__ = [
    "BUILTIN",
    "DEFAULT_DEGREE",
    "CompletionError",
    "DegreeOverflow",
    "MonomialOrder",
    "NotCompleted",
    "Presentation",
    "RewriteRule",
    "RewriteSystem",
    "basis_words",
    "complete",
    "basis_upto",
    "critical_pairs",
    "is_confluent",
    "load_document",
    "load_presentation",
    "normal_form",
    "presentation_from_document",
    "unresolved_pairs",
]

DEFAULT_DEGREE = 8
BUILTIN = ("disc", "disc_p", "disc_q", "circle", "sphere", "sphere_printed", "s3", "hopf_u1")

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class DegreeOverflow(ValueError):
    pass


class CompletionError(RuntimeError):
    pass


class NotCompleted(ValueError):
    pass


class MonomialOrder:
    """Degree first, then lexicographic on the alphabet's declared letter order."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet

    key = staticmethod(word_key)

    def lt(self, u: Word, v: Word) -> bool:
        return word_key(u) < word_key(v)

    def leading(self, f: NCPoly) -> Word:
        return f.leading_word()


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: NCPoly

    def __post_init__(self):
        k = word_key(self.lhs)
        for w in self.rhs.words():
            if word_key(w) >= k:
                raise CompletionError(
                    f"rule {self.format()} is not decreasing: {self.rhs.alphabet.format_word(w)}"
                )

    def format(self) -> str:
        return f"{self.rhs.alphabet.format_word(self.lhs)} -> {self.rhs}"

    def relation(self) -> NCPoly:
        return NCPoly.monomial(self.rhs.alphabet, self.lhs) - self.rhs


class _Reducer:
    """Normal forms by appending one letter at a time to an irreducible word.

    If ``v`` is irreducible, any rule occurrence in ``v + (l,)`` is a suffix, so
    only suffix lookups are needed.
    """

    def __init__(self, rules: Mapping[Word, Mapping[Word, Fraction]]):
        self.rules = rules
        self.lengths = sorted({len(l) for l in rules})
        self.memo: dict[tuple[Word, int], dict[Word, Fraction]] = {}

    def reset(self):
        self.lengths = sorted({len(l) for l in self.rules})
        self.memo.clear()

    def append(self, v: Word, letter: int) -> dict[Word, Fraction]:
        key = (v, letter)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        w = v + (letter,)
        out = None
        for L in self.lengths:
            if L > len(w):
                break
            rhs = self.rules.get(w[-L:])
            if rhs is not None:
                prefix = w[:-L]
                out = {}
                for rw, c in rhs.items():
                    _acc(out, c, self.mul_word(prefix, rw))
                break
        if out is None:
            out = {w: Fraction(1)}
        self.memo[key] = out
        return out

    def mul_word(self, v: Word, word: Word) -> dict[Word, Fraction]:
        cur: dict[Word, Fraction] = {v: Fraction(1)}
        for letter in word:
            nxt: dict[Word, Fraction] = {}
            for u, c in cur.items():
                _acc(nxt, c, self.append(u, letter))
            cur = nxt
        return cur

    def reduce_terms(self, terms: Mapping[Word, Fraction]) -> dict[Word, Fraction]:
        out: dict[Word, Fraction] = {}
        for w, c in terms.items():
            _acc(out, c, self.mul_word((), w))
        return out

    def is_irreducible(self, w: Word) -> bool:
        rules = self.rules
        for L in self.lengths:
            for i in range(len(w) - L + 1):
                if w[i : i + L] in rules:
                    return False
        return True


def _acc(out: dict, c: Fraction, terms: Mapping[Word, Fraction]) -> None:
    for w, v in terms.items():
        s = out.get(w, 0) + c * v
        if s:
            out[w] = s
        else:
            out.pop(w, None)


class RewriteSystem:
    """Immutable rule set over an alphabet; normal forms are memoised."""

    def __init__(
        self,
        alphabet: Alphabet,
        rules: Iterable[RewriteRule],
        completed: bool = False,
        degree_cap: int = DEFAULT_DEGREE,
    ):
        self.alphabet = alphabet
        self.order = MonomialOrder(alphabet)
        self.rules: tuple[RewriteRule, ...] = tuple(sorted(rules, key=lambda r: word_key(r.lhs)))
        self.completed = completed
        self.degree_cap = degree_cap
        table = {}
        for r in self.rules:
            if r.rhs.alphabet != alphabet:
                raise ValueError("rule over a different alphabet")
            if r.lhs in table:
                raise ValueError(f"duplicate left-hand side {alphabet.format_word(r.lhs)}")
            table[r.lhs] = dict(r.rhs.items())
        self._reducer = _Reducer(table)

    def __eq__(self, other):
        return (
            isinstance(other, RewriteSystem)
            and self.alphabet == other.alphabet
            and self.rules == other.rules
            and self.completed == other.completed
            and self.degree_cap == other.degree_cap
        )

    def __repr__(self):
        status = "completed" if self.completed else "raw"
        return f"<RewriteSystem {len(self.rules)} rules, {status}, D={self.degree_cap}>"

    def lhs_set(self) -> set[Word]:
        return set(self._reducer.rules)

    def normal_form(self, f: NCPoly, check_degree: bool = True) -> NCPoly:
        if f.alphabet != self.alphabet:
            raise ValueError("polynomial over a different alphabet")
        if check_degree and f.degree() > self.degree_cap:
            raise DegreeOverflow(f"degree {f.degree()} exceeds cap {self.degree_cap}")
        return NCPoly._raw(self.alphabet, self._reducer.reduce_terms(f.terms))

    def nf_word(self, w: Word) -> NCPoly:
        return NCPoly._raw(self.alphabet, self._reducer.mul_word((), tuple(w)))

    def multiply(self, f: NCPoly, g: NCPoly) -> NCPoly:
        """Normal form of f*g for f in normal form (no degree check)."""
        out: dict[Word, Fraction] = {}
        red = self._reducer
        for w1, c1 in f.items():
            for w2, c2 in g.items():
                _acc(out, c1 * c2, red.mul_word(w1, w2))
        return NCPoly._raw(self.alphabet, out)

    def is_irreducible(self, w: Word) -> bool:
        return self._reducer.is_irreducible(tuple(w))

    def format(self) -> list[str]:
        return [r.format() for r in self.rules]


def normal_form(f: NCPoly, R: RewriteSystem) -> NCPoly:
    return R.normal_form(f)


def _overlaps(s: Word, t: Word, cap: int):
    """Proper overlaps: nonempty suffix of s equal to a prefix of t."""
    for k in range(1, min(len(s), len(t))):
        if s[-k:] == t[:k] and len(s) + len(t) - k <= cap:
            yield k


def _inclusions(s: Word, t: Word):
    """Positions where t occurs inside s (t != s)."""
    if len(t) >= len(s) and t != s:
        return
    for i in range(len(s) - len(t) + 1):
        if s[i : i + len(t)] == t and t != s:
            yield i


@dataclass(frozen=True)
class CriticalPair:
    word: Word
    difference: NCPoly
    rules: tuple[Word, Word]
    kind: str = "overlap"


def critical_pairs(R: RewriteSystem, degree: int | None = None) -> list[CriticalPair]:
    """All ambiguities of R up to ``degree`` with the difference of their two reductions."""
    D = R.degree_cap if degree is None else degree
    A = R.alphabet
    table = {r.lhs: r.rhs for r in R.rules}
    out = []
    for s, rs in table.items():
        for t, rt in table.items():
            for k in _overlaps(s, t, D):
                word = s + t[k:]
                left = rs * NCPoly.monomial(A, t[k:])
                right = NCPoly.monomial(A, s[:-k]) * rt
                out.append(CriticalPair(word, left - right, (s, t)))
            for i in _inclusions(s, t):
                if len(s) <= D:
                    other = NCPoly.monomial(A, s[:i]) * rt * NCPoly.monomial(A, s[i + len(t) :])
                    out.append(CriticalPair(s, rs - other, (s, t), "inclusion"))
    out.sort(key=lambda cp: (word_key(cp.word), cp.rules))
    return out


def unresolved_pairs(R: RewriteSystem, degree: int | None = None) -> list[CriticalPair]:
    """Critical pairs whose difference does not reduce to zero."""
    return [
        cp for cp in critical_pairs(R, degree) if R.normal_form(cp.difference, check_degree=False)
    ]


def is_confluent(R: RewriteSystem, degree: int | None = None) -> bool:
    return not unresolved_pairs(R, degree)


def complete(R: RewriteSystem | Iterable[NCPoly], D: int = DEFAULT_DEGREE, alphabet: Alphabet | None = None) -> RewriteSystem:
    """Degree-capped completion.

    Accepts a system or a list of relations. Ambiguities are processed in order
    of increasing overlap word, ties broken lexicographically on the pair of
    left-hand sides, so the result is deterministic.
    """
    if isinstance(R, RewriteSystem):
        alphabet = R.alphabet
        relations = [r.relation() for r in R.rules]
    else:
        relations = list(R)
        if alphabet is None:
            if not relations:
                raise ValueError("alphabet required for an empty relation list")
            alphabet = relations[0].alphabet
    return _Completion(alphabet, D).run(relations)


class _Completion:
    def __init__(self, alphabet: Alphabet, D: int):
        self.A = alphabet
        self.D = D
        self.rules: dict[Word, dict[Word, Fraction]] = {}
        self.red = _Reducer(self.rules)
        self.heap: list = []
        self.pending: list[dict[Word, Fraction]] = []

    def run(self, relations: list[NCPoly]) -> RewriteSystem:
        self.pending = [dict(r.items()) for r in relations]
        self._drain()
        while self.heap:
            _, _, s, t, k = heapq.heappop(self.heap)
            if s not in self.rules or t not in self.rules:
                continue
            diff: dict[Word, Fraction] = {}
            rs, rt = self.rules[s], self.rules[t]
            for w, c in rs.items():
                _acc(diff, c, {w + t[k:]: Fraction(1)})
            for w, c in rt.items():
                _acc(diff, -c, {s[:-k] + w: Fraction(1)})
            self.pending.append(diff)
            self._drain()
        rules = []
        for lhs in self.rules:
            rhs = self.red.reduce_terms(self.rules[lhs])
            rules.append(RewriteRule(lhs, NCPoly._raw(self.A, rhs)))
        return RewriteSystem(self.A, rules, completed=True, degree_cap=self.D)

    def _drain(self):
        while self.pending:
            poly = self.red.reduce_terms(self.pending.pop(0))
            if poly:
                self._insert(poly)

    def _insert(self, poly: dict[Word, Fraction]):
        lw = max(poly, key=word_key)
        if not lw:
            raise CompletionError("ideal contains a nonzero constant; the algebra is trivial")
        c = poly[lw]
        rhs = {w: -v / c for w, v in poly.items() if w != lw}
        # rules whose lhs contains lw become inclusion ambiguities: retire and re-queue
        for old in [l for l in self.rules if len(l) > len(lw) and _contains(l, lw)]:
            rel = {w: -v for w, v in self.rules.pop(old).items()}
            rel[old] = Fraction(1)
            self.pending.append(rel)
        self.rules[lw] = rhs
        self.red.reset()
        for other in list(self.rules):
            for s, t in ((lw, other), (other, lw)) if other != lw else ((lw, lw),):
                for k in _overlaps(s, t, self.D):
                    word = s + t[k:]
                    heapq.heappush(self.heap, (word_key(word), (word_key(s), word_key(t)), s, t, k))


def _contains(s: Word, t: Word) -> bool:
    n = len(t)
    return any(s[i : i + n] == t for i in range(len(s) - n + 1))


def basis_words(R: RewriteSystem, d: int) -> list[Word]:
    """Irreducible words of degree exactly d, ascending in the monomial order."""
    if not R.completed:
        raise NotCompleted("basis enumeration needs a completed system")
    if d > R.degree_cap:
        raise DegreeOverflow(f"degree {d} exceeds cap {R.degree_cap}")
    layer: list[Word] = [()]
    n = len(R.alphabet)
    lhs = R._reducer.rules
    lengths = R._reducer.lengths
    for _ in range(d):
        nxt = []
        for v in layer:
            for letter in range(n):
                w = v + (letter,)
                if not any(L <= len(w) and w[-L:] in lhs for L in lengths):
                    nxt.append(w)
        layer = nxt
    return sorted(layer)


def basis_upto(R: RewriteSystem, d: int) -> list[Word]:
    out = []
    for k in range(d + 1):
        out.extend(basis_words(R, k))
    return out


# presentations ---------------------------------------------------------------


@dataclass
class Presentation:
    """A named finitely presented *-algebra with rational parameters."""

    name: str
    alphabet: Alphabet
    relations: list[NCPoly]
    params: AlgebraParams = field(default_factory=AlgebraParams)
    grading: dict[str, int] | None = None
    document: dict | None = None
    _systems: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        # *-ideals: close the generating set under the involution
        closed: list[NCPoly] = []
        for rel in self.relations:
            for r in (rel, rel.star()):
                if r and r not in closed and -r not in closed:
                    closed.append(r)
        self.relations = closed

    def raw_system(self) -> RewriteSystem:
        rules = []
        seen = set()
        for rel in self.relations:
            lw = rel.leading_word()
            if lw in seen:
                continue
            seen.add(lw)
            c = rel.coefficient(lw)
            rhs = (NCPoly.monomial(self.alphabet, lw) - rel.scale(1 / c))
            rules.append(RewriteRule(lw, rhs))
        return RewriteSystem(self.alphabet, rules, completed=False, degree_cap=DEFAULT_DEGREE)

    def system(self, D: int = DEFAULT_DEGREE) -> RewriteSystem:
        """Completed system at cap D (cached; any cached larger cap is reused)."""
        for cap in sorted(self._systems):
            if cap >= D:
                return self._systems[cap]
        R = complete(self.relations, D, alphabet=self.alphabet)
        self._systems[D] = R
        return R

    def poly(self, text: str) -> NCPoly:
        return NCPoly.parse(self.alphabet, text, self.params.as_dict())

    def letter(self, name: str) -> NCPoly:
        return NCPoly.letter(self.alphabet, name)

    def one(self) -> NCPoly:
        return NCPoly.constant(self.alphabet, 1)

    def nf(self, f: NCPoly | str, D: int | None = None) -> NCPoly:
        if isinstance(f, str):
            f = self.poly(f)
        D = _cap_for(f.degree()) if D is None else D
        return self.system(D).normal_form(f)

    def substitute(self, f: NCPoly, images: Mapping[str, NCPoly], D: int | None = None) -> NCPoly:
        """Apply the algebra map sending each letter of ``f`` to ``images[letter]``, in normal form."""
        letters = f.alphabet.letters
        prod: dict[Word, NCPoly] = {(): self.one()}
        out = NCPoly.zero(self.alphabet)
        if not f:
            return out
        grow = max([1] + [images[letters[i]].degree() for w in f.words() for i in w])
        R = self.system(D or _cap_for(f.degree() * grow))
        for w, c in f.items():
            if w not in prod:
                for k in range(1, len(w) + 1):
                    if w[:k] not in prod:
                        prod[w[:k]] = R.multiply(prod[w[: k - 1]], images[letters[w[k - 1]]])
            out = out + prod[w].scale(c)
        return out

    def degree_of(self, w: Word) -> int:
        if self.grading is None:
            raise ValueError(f"{self.name} carries no grading")
        g = self.grading
        letters = self.alphabet.letters
        return sum(g[letters[i]] for i in w)


def _cap_for(degree: int) -> int:
    """Completion cap used for a computation of the given degree (multiples of 8)."""
    return max(DEFAULT_DEGREE, -(-degree // DEFAULT_DEGREE) * DEFAULT_DEGREE)


def presentation_from_document(doc: Mapping, params: AlgebraParams | None = None) -> Presentation:
    letters = list(doc["letters"])
    order = list(doc.get("order", letters))
    if sorted(order) != sorted(letters):
        raise ValueError("order must list exactly the declared letters")
    star: dict[str, str] = {}
    for a, b in doc.get("star_pairs", []):
        star[a], star[b] = b, a
    alphabet = Alphabet(order, star)
    if params is None:
        raw = doc.get("params", {})
        params = AlgebraParams(**{k: as_scalar(v) for k, v in raw.items()})
    pd = params.as_dict()
    relations = []
    for rule in doc["rules"]:
        lhs = NCPoly.parse(alphabet, rule["lhs"], pd)
        rhs = NCPoly.parse(alphabet, rule["rhs"], pd)
        rel = lhs - rhs
        if len(lhs) == 1 and rel:
            (w,) = lhs.words()
            if rel.leading_word() != w:
                raise CompletionError(f"rule {rule['lhs']} -> {rule['rhs']} is not decreasing")
        relations.append(rel)
    grading = doc.get("grading")
    return Presentation(
        name=doc.get("name", "custom"),
        alphabet=alphabet,
        relations=relations,
        params=params,
        grading=dict(grading) if grading is not None else None,
        document=dict(doc),
    )


def load_document(name: str) -> dict:
    if name not in BUILTIN:
        raise KeyError(f"unknown presentation {name!r}; built-ins: {', '.join(BUILTIN)}")
    text = resources.files("qbundle.presentations").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def load_presentation(name_or_path: str, params: AlgebraParams | None = None) -> Presentation:
    """Load a built-in presentation by name or a JSON document from a path."""
    if name_or_path in BUILTIN:
        doc = load_document(name_or_path)
    else:
        with open(name_or_path) as fh:
            doc = json.load(fh)
    return presentation_from_document(doc, params)
