"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from qbundle.ncpoly import NCPoly

coeffs = st.builds(
    Fraction, st.integers(-6, 6).filter(bool), st.sampled_from([1, 1, 2, 3, 4])
)


def words(alphabet, max_len=4):
    return st.lists(st.integers(0, len(alphabet) - 1), max_size=max_len).map(tuple)


def polys(alphabet, max_len=4, max_terms=4):
    return st.dictionaries(words(alphabet, max_len), coeffs, max_size=max_terms).map(
        lambda d: NCPoly(alphabet, d)
    )


def coinvariant_polys(P, grading, max_len=4, max_terms=3):
    """Random polynomials of winding degree 0."""
    ws = words(P.alphabet, max_len).filter(lambda w: grading.degree(w) == 0)
    return st.dictionaries(ws, coeffs, min_size=1, max_size=max_terms).map(
        lambda d: NCPoly(P.alphabet, d)
    )
