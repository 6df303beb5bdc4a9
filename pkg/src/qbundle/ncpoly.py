"""Free *-algebras over a finite involutive alphabet with exact rational coefficients.

A word is a tuple of letter indices. Letter indices follow the declared letter
order, so comparing ``(len(w), w)`` is exactly the degree-lexicographic order
used by the rewriting engine.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Word = tuple[int, ...]
Scalar = Fraction

__all__ = [
    "Alphabet",
    "AlgebraParams",
    "AlphabetMismatch",
    "NCPoly",
    "ParseError",
    "Scalar",
    "Word",
    "as_scalar",
    "format_scalar",
    "word_key",
]


class AlphabetMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def as_scalar(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.replace(" ", ""))
    return Fraction(value)


def format_scalar(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def word_key(w: Word) -> tuple[int, Word]:
    """Sort key realising degree-first, then lexicographic comparison."""
    return (len(w), w)


@dataclass(frozen=True)
class AlgebraParams:
    p: Fraction = Fraction(1, 2)
    q: Fraction = Fraction(1, 4)

    def __post_init__(self):
        object.__setattr__(self, "p", as_scalar(self.p))
        object.__setattr__(self, "q", as_scalar(self.q))
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"parameter {name}={v} outside (0, 1)")

    def as_dict(self) -> dict[str, Fraction]:
        return {"p": self.p, "q": self.q}


class Alphabet:
    """Ordered, involutive set of letters.

    ``letters`` lists names in the monomial order; ``star`` maps each name to
    its adjoint (a self-adjoint letter maps to itself).
    """

    def __init__(self, letters: Sequence[str], star: Mapping[str, str]):
        self.letters: tuple[str, ...] = tuple(letters)
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("duplicate letters")
        self.index = {name: i for i, name in enumerate(self.letters)}
        try:
            self.star_index = tuple(self.index[star[name]] for name in self.letters)
        except KeyError as exc:
            raise ValueError(f"letter without adjoint: {exc}") from None
        for i, j in enumerate(self.star_index):
            if self.star_index[j] != i:
                raise ValueError(f"star is not an involution on {self.letters[i]!r}")
        self._key = (self.letters, self.star_index)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        return f"Alphabet({list(self.letters)})"

    def is_starred(self, i: int) -> bool:
        return self.letters[i].endswith("*")

    def star_word(self, w: Word) -> Word:
        s = self.star_index
        return tuple(s[i] for i in reversed(w))

    def word(self, *names: str) -> Word:
        return tuple(self.index[n] for n in names)

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        out = []
        i = 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.letters[w[i]]
            out.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return " ".join(out)


class NCPoly:
    """Element of the free algebra: a finite map Word -> Fraction.

    Instances are treated as immutable; zero coefficients are never stored.
    """

    __slots__ = ("alphabet", "_terms", "_hash")

    def __init__(self, alphabet: Alphabet, terms: Mapping[Word, Fraction] | Iterable = ()):
        self.alphabet = alphabet
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Word, Fraction] = {}
        for w, c in items:
            c = as_scalar(c)
            if c:
                w = tuple(w)
                c = clean.get(w, 0) + c
                if c:
                    clean[w] = c
                else:
                    del clean[w]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, alphabet: Alphabet, terms: dict) -> "NCPoly":
        # trusted constructor: terms already canonical
        obj = cls.__new__(cls)
        obj.alphabet = alphabet
        obj._terms = terms
        obj._hash = None
        return obj

    # construction helpers
    @classmethod
    def zero(cls, alphabet: Alphabet) -> "NCPoly":
        return cls._raw(alphabet, {})

    @classmethod
    def constant(cls, alphabet: Alphabet, c=1) -> "NCPoly":
        return cls(alphabet, {(): c})

    @classmethod
    def monomial(cls, alphabet: Alphabet, w: Word, c=1) -> "NCPoly":
        return cls(alphabet, {tuple(w): c})

    @classmethod
    def letter(cls, alphabet: Alphabet, name: str) -> "NCPoly":
        return cls._raw(alphabet, {(alphabet.index[name],): Fraction(1)})

    # mapping-like access
    @property
    def terms(self) -> Mapping[Word, Fraction]:
        return self._terms

    def items(self):
        return self._terms.items()

    def words(self) -> Iterator[Word]:
        return iter(self._terms)

    def coefficient(self, w: Word) -> Fraction:
        return self._terms.get(tuple(w), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=-1)

    def leading_word(self) -> Word:
        if not self._terms:
            raise ValueError("zero polynomial has no leading word")
        return max(self._terms, key=word_key)

    def sorted_terms(self) -> list[tuple[Word, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: word_key(t[0]))

    # arithmetic
    def _check(self, other: "NCPoly"):
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch(f"{self.alphabet!r} vs {other.alphabet!r}")

    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return NCPoly.constant(self.alphabet, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for w, c in other._terms.items():
            v = out.get(w, 0) + c
            if v:
                out[w] = v
            else:
                out.pop(w, None)
        return NCPoly._raw(self.alphabet, out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly._raw(self.alphabet, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "NCPoly":
        c = as_scalar(c)
        if not c:
            return NCPoly.zero(self.alphabet)
        return NCPoly._raw(self.alphabet, {w: c * v for w, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Word, Fraction] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                v = out.get(w, 0) + c1 * c2
                if v:
                    out[w] = v
                else:
                    out.pop(w, None)
        return NCPoly._raw(self.alphabet, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power in a free algebra")
        out = NCPoly.constant(self.alphabet)
        for _ in range(k):
            out = out * self
        return out

    def star(self) -> "NCPoly":
        # rational coefficients are self-conjugate
        sw = self.alphabet.star_word
        return NCPoly._raw(self.alphabet, {sw(w): c for w, c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = NCPoly.constant(self.alphabet, other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        return self.alphabet == other.alphabet and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.alphabet, frozenset(self._terms.items())))
        return self._hash

    # text format
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k, (w, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            ws = self.alphabet.format_word(w) if w else ""
            if not w:
                body = format_scalar(a) if a.denominator == 1 else f"({format_scalar(a)})"
            elif a == 1:
                body = ws
            elif a.denominator == 1:
                body = f"{a.numerator} {ws}"
            else:
                body = f"({format_scalar(a)}) {ws}"
            if k == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def __repr__(self):
        return f"NCPoly({str(self)!r})"

    @classmethod
    def parse(cls, alphabet: Alphabet, text: str, params: Mapping[str, object] | None = None) -> "NCPoly":
        return _Parser(alphabet, text, params or {}).parse()


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*\*?)|(?P<op>[-+()^]))"
)


class _Parser:
    """Recursive-descent parser.

    expr   := [+|-] term ((+|-) term)*
    term   := factor factor*          (juxtaposition)
    factor := atom [^ INT]
    atom   := NUMBER | LETTER | PARAM | ( expr )
    """

    def __init__(self, alphabet: Alphabet, text: str, params: Mapping[str, object]):
        self.alphabet = alphabet
        self.text = text
        self.params = {k: as_scalar(v) for k, v in params.items()}
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                rest = stripped[pos:]
                raise ParseError("unexpected character", text, pos + len(rest) - len(rest.lstrip()))
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> NCPoly:
        if not self.tokens:
            raise ParseError("empty expression", self.text, 0)
        out = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(f"unexpected token {val!r}", self.text, pos)
        return out

    def expr(self) -> NCPoly:
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        out = self.term().scale(sign)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                out = out + t if val == "+" else out - t
            else:
                return out

    def _starts_factor(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("num", "ident") or (kind == "op" and val == "(")

    def term(self) -> NCPoly:
        if not self._starts_factor():
            kind, val, pos = self.peek()
            raise ParseError("expected a factor" if kind else "unexpected end", self.text, pos)
        out = self.factor()
        while self._starts_factor():
            out = out * self.factor()
        return out

    def factor(self) -> NCPoly:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num" or "/" in val:
                raise ParseError("expected a non-negative integer exponent", self.text, pos)
            base = base ** int(val)
        return base

    def atom(self) -> NCPoly:
        kind, val, pos = self.take()
        if kind == "num":
            return NCPoly.constant(self.alphabet, Fraction(val))
        if kind == "ident":
            if val in self.alphabet.index:
                return NCPoly.letter(self.alphabet, val)
            if val in self.params:
                return NCPoly.constant(self.alphabet, self.params[val])
            raise ParseError(f"unknown symbol {val!r}", self.text, pos)
        if kind == "op" and val == "(":
            inner = self.expr()
            kind, val, pos = self.take()
            if val != ")":
                raise ParseError("expected ')'", self.text, pos)
            return inner
        raise ParseError(f"unexpected token {val!r}" if kind else "unexpected end", self.text, pos)
