"""Exact sparse linear algebra over the rationals.

Vectors are dicts mapping hashable coordinate keys to Fractions. The
:class:`Echelon` accumulator keeps an incremental row-echelon form and records,
for every stored row, how it was combined from the inserted vectors; that is
enough for rank, membership, solving and kernel witnesses.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping

Vector = dict

__all__ = ["Echelon", "rank", "solve", "kernel", "axpy"]


def axpy(y: dict, a: Fraction, x: Mapping) -> None:
    """In place ``y += a*x``, dropping cancelled entries."""
    for k, v in x.items():
        s = y.get(k, 0) + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class Echelon:
    def __init__(self, track: bool = False):
        self.track = track
        self.pivots: dict[Hashable, tuple[dict, dict]] = {}
        self.count = 0
        self.dependencies: list[dict] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Mapping) -> tuple[dict, dict]:
        """Residual of ``vec`` modulo the span and the combination subtracted."""
        v = dict(vec)
        combo: dict = {}
        for k, (row, rc) in self.pivots.items():
            c = v.get(k)
            if c:
                axpy(v, -c, row)
                if self.track:
                    axpy(combo, -c, rc)
        return v, combo

    def add(self, vec: Mapping, tag: Hashable | None = None) -> bool:
        """Insert a vector; return True iff it was independent of the span."""
        if tag is None:
            tag = self.count
        self.count += 1
        v, combo = self.reduce(vec)
        if self.track:
            combo[tag] = combo.get(tag, 0) + 1
        if not v:
            if self.track:
                self.dependencies.append(combo)
            return False
        k = next(iter(v))
        inv = 1 / Fraction(v[k])
        row = {kk: vv * inv for kk, vv in v.items()}
        rc = {kk: vv * inv for kk, vv in combo.items()} if self.track else {}
        self.pivots[k] = (row, rc)
        return True

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)[0]


def rank(vectors: Iterable[Mapping]) -> int:
    ech = Echelon()
    for v in vectors:
        ech.add(v)
    return ech.rank


def solve(columns: list[Mapping], target: Mapping) -> dict[int, Fraction] | None:
    """Find ``c`` with ``sum c[i] * columns[i] == target``, or None."""
    ech = Echelon(track=True)
    for i, col in enumerate(columns):
        ech.add(col, tag=i)
    residual, combo = ech.reduce(target)
    if residual:
        return None
    # reduce subtracted combo from target: target + combo-image = 0 => target = -combo
    return {i: -c for i, c in combo.items() if c}


def kernel(columns: list[Mapping]) -> list[dict[int, Fraction]]:
    """Basis of linear relations among ``columns`` (as index -> coefficient maps)."""
    ech = Echelon(track=True)
    for i, col in enumerate(columns):
        ech.add(col, tag=i)
    return [{i: c for i, c in dep.items() if c} for dep in ech.dependencies]
