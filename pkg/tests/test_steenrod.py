"""Steenrod words: admissibility, excess, relation rewriting, parsing.

Expected values are either forced by the definitions (identities, degree
arithmetic) or verified by the action oracle in this file / the acceptance
suite: a rewriting of a composite operation must act identically to the
original composite on polynomial algebras, which pins every coefficient.
"""

import itertools

import pytest

from pnoether import steenrod as st
from pnoether.errors import DSLSyntaxError, InputError
from pnoether.graded import FreeCommPresentation, GeneratorSpec, expand


# ---------------------------------------------------------------------------
# shape, degree, admissibility, excess


def test_word_degree_p2():
    assert st.word_degree(2, ()) == 0
    assert st.word_degree(2, (4, 2, 1)) == 7


def test_word_degree_odd():
    # odd word shape: (e0, s1, e1, ...); P^s shifts by 2s(p-1), beta by 1
    assert st.word_degree(3, (0,)) == 0
    assert st.word_degree(3, (1,)) == 1
    assert st.word_degree(3, (0, 1, 0)) == 4
    assert st.word_degree(3, (1, 2, 1)) == 10
    assert st.word_degree(5, (0, 1, 0)) == 8


def test_admissible_p2():
    assert st.is_admissible(2, ())
    assert st.is_admissible(2, (4, 2, 1))
    assert st.is_admissible(2, (2, 1))
    assert not st.is_admissible(2, (1, 1))
    assert not st.is_admissible(2, (2, 2))
    assert not st.is_admissible(2, (3, 2))


def test_admissible_odd():
    # P^s P^t admissible iff s >= p t (+ epsilon)
    assert st.is_admissible(3, (0, 3, 0, 1, 0))
    assert not st.is_admissible(3, (0, 2, 0, 1, 0))
    assert st.is_admissible(3, (0, 4, 1, 1, 0))
    assert not st.is_admissible(3, (0, 3, 1, 1, 0))


def test_excess_p2():
    # excess of (i1,...,ik) = i1 - (i2+...+ik)
    assert st.excess(2, (1,)) == 1
    assert st.excess(2, (4, 2, 1)) == 1
    assert st.excess(2, (2, 1)) == 1
    assert st.excess(2, (5, 2)) == 3


def test_excess_odd():
    # excess = 2*s1 + e0 - (degree of the remaining word)
    assert st.excess(3, (0, 1, 0)) == 2          # P^1
    assert st.excess(3, (1, 1, 0)) == 3          # beta P^1
    assert st.excess(3, (0, 3, 0, 1, 0)) == 2    # P^3 P^1: 6 - 4
    assert st.excess(3, (0, 3, 1, 1, 0)) == 1    # P^3 beta P^1: 6 - 5


def test_identity_word():
    assert st.identity_word(2) == ()
    assert st.identity_word(3) == (0,)


def test_admissible_words_counts_against_recursive_oracle():
    """Independent recursive enumeration of admissible words by degree."""
    def words_p2(max_deg):
        # all admissible (i1 >= 2 i2 >= ...) with total <= max_deg
        out = [()]
        def grow(prefix, total):
            low = 2 * prefix[-1] if prefix else 1
            # prepend on the left: i >= 2 * first existing entry
            for i in range(low, max_deg - total + 1):
                w = (i,) + prefix if prefix else (i,)
                out.append(w)
                grow(w, total + i)
        # build by leftward growth from each singleton
        for i1 in range(1, max_deg + 1):
            out.append((i1,))
            left = [(i1,)]
            while left:
                w = left.pop()
                for i in range(2 * w[0], max_deg - sum(w) + 1):
                    nxt = (i,) + w
                    out.append(nxt)
                    left.append(nxt)
        return {w for w in out if sum(w) <= max_deg}

    got = set(st.admissible_words(2, 12))
    expected = words_p2(12)
    assert got == expected
    for w in got:
        assert st.is_admissible(2, w)


def test_admissible_words_odd_all_admissible_and_complete():
    words = st.admissible_words(3, 14)
    assert st.identity_word(3) in words
    for w in words:
        assert st.is_admissible(3, w)
        assert st.word_degree(3, w) <= 14
    # brute-force: every admissible word of degree <= 14 must be present
    degrees = {st.word_degree(3, w) for w in words}
    assert (0, 1, 0) in words            # P1, degree 4
    assert (1, 1, 0) in words            # beta P1, degree 5
    assert (0, 2, 0, 1, 0) not in words  # inadmissible P2 P1
    assert (0, 3, 0, 1, 0) not in words  # admissible P3 P1 but degree 16 > 14
    assert 1 in degrees                  # beta


# ---------------------------------------------------------------------------
# Adem rewriting, pinned by the action oracle below


def _act_letters(alg, letters, x):
    out = x
    for letter in reversed(letters):
        out = alg.act(letter, out)
    return out


def _act_sum(alg, s, x):
    total = alg.zero()
    for word, coeff in s.terms.items():
        letters = st.word_to_letters(s.p, word)
        total = total + _act_letters(alg, letters, x).scale(coeff)
    return total


@pytest.fixture(scope="module")
def poly2():
    pres = FreeCommPresentation(
        2, [GeneratorSpec("t1", 1), GeneratorSpec("t2", 1)], {})
    return expand(pres, 10)


@pytest.fixture(scope="module")
def poly3():
    pres = FreeCommPresentation(
        3, [GeneratorSpec("y", 2), GeneratorSpec("z", 2)], {})
    return expand(pres, 16)


def test_adem_classical_values_p2(poly2):
    cases = {
        (("Sq", 1), ("Sq", 1)): {},
        (("Sq", 2), ("Sq", 2)): {(3, 1): 1},
        (("Sq", 1), ("Sq", 2)): {(3,): 1},
        (("Sq", 2), ("Sq", 3)): {(5,): 1, (4, 1): 1},
        (("Sq", 3), ("Sq", 2)): {},
        (("Sq", 1), ("Sq", 3)): {},
        (("Sq", 2), ("Sq", 4)): {(6,): 1, (5, 1): 1},
    }
    for letters, expected in cases.items():
        s = st.adem_reduce(2, list(letters))
        assert s.terms == expected, letters
        # action oracle: the rewriting acts like the raw composite
        for d in range(0, poly2.bound - st.word_degree(2, tuple(
                i for _, i in letters)) + 1):
            for i in range(poly2.dim(d)):
                x = poly2.element(d, i)
                assert _act_letters(poly2, list(letters), x) == \
                    _act_sum(poly2, s, x)


def test_adem_exhaustive_inadmissible_pairs_p2(poly2):
    for b in range(1, 8):
        for a in range(1, 2 * b):
            s = st.adem_reduce(2, [("Sq", a), ("Sq", b)])
            for w in s.terms:
                assert st.is_admissible(2, w)
            for d in range(0, poly2.bound - a - b + 1):
                for i in range(poly2.dim(d)):
                    x = poly2.element(d, i)
                    assert _act_letters(poly2, [("Sq", a), ("Sq", b)], x) \
                        == _act_sum(poly2, s, x), (a, b, d, i)


def test_adem_exhaustive_small_products_p3(poly3):
    """All length-2 composites of {beta, P1, P2} at p=3 act like their
    admissible rewriting on F3[y2, z2] — coefficients and signs included."""
    singles = [("B",), ("P", 1), ("P", 2)]
    for l1, l2 in itertools.product(singles, repeat=2):
        letters = [l1, l2]
        shift = sum(1 if l[0] == "B" else 2 * l[1] * 2 for l in letters)
        s = st.adem_reduce(3, letters)
        for w in s.terms:
            assert st.is_admissible(3, w)
        for d in range(0, poly3.bound - shift + 1):
            for i in range(poly3.dim(d)):
                x = poly3.element(d, i)
                assert _act_letters(poly3, letters, x) == \
                    _act_sum(poly3, s, x), (letters, d, i)


def test_adem_reduce_rejects_bad_letters():
    with pytest.raises(InputError):
        st.adem_reduce(2, [("P", 1)])
    with pytest.raises(InputError):
        st.adem_reduce(3, [("Sq", 2)])


def test_beta_squared_is_zero():
    assert st.adem_reduce(3, [("B",), ("B",)]).is_zero()


def test_p1_p1_at_p3():
    # P^1 P^1 = 2 P^2 at p = 3: pinned by the action oracle above; freeze it
    s = st.adem_reduce(3, [("P", 1), ("P", 1)])
    assert s.terms == {(0, 2, 0): 2}


# ---------------------------------------------------------------------------
# parsing and formatting: round trip


def test_parse_word_expr_p2():
    assert st.parse_word_expr(2, "Sq[2]Sq[2]") == [("Sq", 2), ("Sq", 2)]
    assert st.parse_word_expr(2, "Sq[4,2,1]") == \
        [("Sq", 4), ("Sq", 2), ("Sq", 1)]
    assert st.parse_word_expr(2, "1") == []


def test_parse_word_expr_odd():
    assert st.parse_word_expr(3, "bP[1;2,1]") == [("B",), ("P", 2), ("B",)]
    assert st.parse_word_expr(3, "bP[0;1,0]") == [("P", 1)]
    assert st.parse_word_expr(3, "bP[0;2,0]bP[0;1,0]") == \
        [("P", 2), ("P", 1)]


def test_parse_errors_have_offsets():
    with pytest.raises(DSLSyntaxError) as err:
        st.parse_word_expr(2, "Sq[2]xx")
    assert err.value.exit_code == 2
    with pytest.raises(DSLSyntaxError):
        st.parse_word_expr(2, "bP[0;1,0]")
    with pytest.raises(DSLSyntaxError):
        st.parse_word_expr(3, "Sq[2]")
    with pytest.raises(DSLSyntaxError):
        st.parse_word_expr(3, "bP[2;1,0]")


def test_word_format_round_trip():
    for w in st.admissible_words(2, 10):
        if w == ():
            continue
        text = st.format_word(2, w)
        letters = st.parse_word_expr(2, text)
        assert st.letters_to_word(2, letters) == w
    for w in st.admissible_words(3, 14):
        if w == (0,):
            continue
        text = st.format_word(3, w)
        letters = st.parse_word_expr(3, text)
        assert st.letters_to_word(3, letters) == w


def test_format_word_examples():
    assert st.format_word(2, (3, 1)) == "Sq[3,1]"
    assert st.format_word(2, ()) == "1"
    assert st.format_word(3, (1, 2, 0)) == "bP[1;2,0]"
    assert st.format_word_compact(2, (4, 2)) == "Sq4Sq2"
    assert st.format_word_compact(3, (1, 1, 0)) == "bP1"


def test_binom_mod_lucas_against_direct():
    from math import comb
    for p in (2, 3, 5):
        for n in range(0, 40):
            for k in range(0, n + 1):
                assert st.binom_mod(n, k, p) == comb(n, k) % p, (p, n, k)


def test_check_prime():
    with pytest.raises(InputError):
        st.check_prime(4)
    with pytest.raises(InputError):
        st.check_prime(1)
    assert st.check_prime(13) == 13
