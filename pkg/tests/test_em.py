"""Eilenberg-MacLane cohomology presentations.

The p = 2 generator enumerations are cross-checked against an in-test oracle
that builds admissible square-words directly and filters by the classical
excess rule, sharing no code with the library's atom/resolution machinery.
Odd-prime expectations are the classical hand computations for small spaces.
"""

import pytest

from pnoether import (
    CyclicClass,
    EMProduct,
    EMSpec,
    InputError,
    IntegerClass,
    PadicClass,
    PruferClass,
    em_generators,
    em_product_presentation,
    expand,
    fiber_layout,
    parse_space,
    poincare,
)
from pnoether.graded import FreeCommPresentation, GeneratorSpec


# ---------------------------------------------------------------------------
# oracle: admissible square-words, built by prepending letters


def p2_admissible(limit):
    """Every admissible word over the squares with total degree <= limit."""
    out = [()]

    def grow(word):
        out.append(word)
        for a in range(2 * word[0], limit - sum(word) + 1):
            grow((a,) + word)

    for s in range(1, limit + 1):
        grow((s,))
    return out


def em_degrees_oracle_p2(n, r, bound):
    """Generator degrees of K(A, n) at p = 2 from the excess filter alone.

    r = 0 marks integral-type coefficients (no trailing Sq1 words), r >= 1
    the cyclic order exponent; r >= 2 adds a second family on the companion
    class one degree up, again without trailing Sq1.
    """

    def family(m, drop_trailing_sq1):
        degs = []
        for w in p2_admissible(max(bound - m, 0)):
            if w and 2 * w[0] - sum(w) >= m:
                continue  # excess at or above the class degree: p-th powers
            if drop_trailing_sq1 and w and w[-1] == 1:
                continue
            degs.append(m + sum(w))
        return degs

    if r == 0:
        degs = family(n, True)
    elif r == 1:
        degs = family(n, False)
    else:
        degs = family(n, True) + family(n + 1, True)
    return sorted(d for d in degs if d <= bound)


@pytest.mark.parametrize("coeff,r,n,bound", [
    (IntegerClass(), 0, 2, 16),
    (IntegerClass(), 0, 3, 20),
    (IntegerClass(), 0, 4, 14),
    (CyclicClass(1), 1, 1, 10),
    (CyclicClass(1), 1, 2, 12),
    (CyclicClass(1), 1, 3, 12),
    (CyclicClass(2), 2, 2, 12),
    (CyclicClass(3), 3, 1, 10),
])
def test_generator_degrees_match_oracle_p2(coeff, r, n, bound):
    pres = em_generators(EMSpec(coeff, n), 2, bound)
    assert sorted(g.degree for g in pres.generators) == \
        em_degrees_oracle_p2(n, r, bound)


def test_classical_small_spaces_p2():
    # the projective-space classics
    assert [(g.name, g.degree) for g in
            em_generators(EMSpec(CyclicClass(1), 1), 2, 10).generators] == \
        [("i1", 1)]
    assert [(g.name, g.degree) for g in
            em_generators(EMSpec(IntegerClass(), 2), 2, 16).generators] == \
        [("i2", 2)]
    # one degree up the words fan out
    gens = em_generators(EMSpec(CyclicClass(1), 2), 2, 12).generators
    assert [(g.name, g.degree) for g in gens] == \
        [("i2", 2), ("Sq1i2", 3), ("Sq2Sq1i2", 5), ("Sq4Sq2Sq1i2", 9)]
    gens3 = em_generators(EMSpec(IntegerClass(), 3), 2, 20).generators
    assert [(g.name, g.degree) for g in gens3] == \
        [("i3", 3), ("Sq2i3", 5), ("Sq4Sq2i3", 9), ("Sq8Sq4Sq2i3", 17)]
    assert all(g.kind == "polynomial" for g in gens3)


def test_classical_k_z_3_odd_p():
    gens = em_generators(EMSpec(IntegerClass(), 3), 3, 20).generators
    assert [(g.name, g.degree, g.kind) for g in gens] == [
        ("i3", 3, "exterior"),
        ("P1i3", 7, "exterior"),
        ("bP1i3", 8, "polynomial"),
        ("P3P1i3", 19, "exterior"),
        ("bP3P1i3", 20, "polynomial"),
    ]


def test_prufer_coefficients_shift_the_degree():
    # K(Zpinf, 2) carries the cohomology of K(Z, 3)
    shifted = em_generators(EMSpec(PruferClass(), 2), 2, 20)
    integral = em_generators(EMSpec(IntegerClass(), 3), 2, 20)
    assert [(g.name, g.degree) for g in shifted.generators] == \
        [(g.name, g.degree) for g in integral.generators]


def test_padic_coefficients_match_integral():
    for n, bound in ((2, 12), (3, 18)):
        a = em_generators(EMSpec(PadicClass(), n), 2, bound)
        b = em_generators(EMSpec(IntegerClass(), n), 2, bound)
        assert [(g.name, g.degree) for g in a.generators] == \
            [(g.name, g.degree) for g in b.generators]


def test_action_table_is_complete_and_classical():
    pres = em_generators(EMSpec(IntegerClass(), 3), 2, 12)
    alg = expand(pres, 12, require_action=True)
    i3 = alg.generator_element("i3")
    sq2i3 = alg.generator_element("Sq2i3")
    assert alg.act(("Sq", 1), i3).is_zero     # integral class: Sq1 dies
    assert alg.act(("Sq", 2), i3) == sq2i3
    assert alg.act(("Sq", 1), sq2i3) == i3 * i3   # Sq1Sq2 = Sq3 = top square
    assert alg.act(("Sq", 3), sq2i3).is_zero      # Sq3Sq2 = 0
    assert alg.act(("Sq", 4), sq2i3) == alg.generator_element("Sq4Sq2i3")
    assert alg.act(("Sq", 5), sq2i3) == sq2i3 * sq2i3


def test_first_bockstein_depends_on_coefficient_order():
    small = em_generators(EMSpec(CyclicClass(1), 2), 2, 8)
    big = em_generators(EMSpec(CyclicClass(2), 2), 2, 8)
    assert [(g.name, g.degree) for g in small.generators] == \
        [(g.name, g.degree) for g in big.generators]
    alg_small = expand(small, 8, require_action=True)
    alg_big = expand(big, 8, require_action=True)
    assert alg_small.act(("Sq", 1), alg_small.generator_element("i2")) == \
        alg_small.generator_element("Sq1i2")
    assert alg_big.act(("Sq", 1), alg_big.generator_element("i2")).is_zero
    # the order-p^2 fundamental class still records its companion as metadata
    i2_spec = next(g for g in big.generators if g.name == "i2")
    assert i2_spec.bockstein_link == (2, "Sq1i2")
    assert next(g for g in small.generators
                if g.name == "i2").bockstein_link is None


def test_higher_bockstein_link_odd_p():
    pres = em_generators(EMSpec(CyclicClass(2), 2), 3, 8)
    i2 = next(g for g in pres.generators if g.name == "i2")
    assert i2.bockstein_link == (2, "bi2")
    companion = next(g for g in pres.generators if g.name == "bi2")
    assert companion.degree == 3 and companion.kind == "exterior"
    alg = expand(pres, 8)
    assert alg.act(("B",), alg.generator_element("i2")).is_zero


def test_series_of_em_presentation():
    pres = em_generators(EMSpec(CyclicClass(1), 2), 2, 12)
    got = poincare(pres, 12)
    oracle = poincare(FreeCommPresentation(
        2, [GeneratorSpec(f"g{d}", d) for d in (2, 3, 5, 9)]), 12)
    assert got == oracle


# ---------------------------------------------------------------------------
# products of factors


def test_product_prefixes_and_dims():
    product = parse_space("K(Z/2,1) * K(Z,2)", 2)
    assert isinstance(product, EMProduct)
    pres = em_product_presentation(product, 2, 8)
    assert [(g.name, g.degree) for g in pres.generators] == \
        [("f1_i1", 1), ("f2_i2", 2)]
    # a single factor keeps bare names
    single = em_product_presentation(EMProduct((EMSpec(CyclicClass(1), 1),)),
                                     2, 8)
    assert [g.name for g in single.generators] == ["i1"]
    # dims multiply: F2[a1] x F2[b2]
    left = expand(em_generators(EMSpec(CyclicClass(1), 1), 2, 8), 8)
    right = expand(em_generators(EMSpec(IntegerClass(), 2), 2, 8), 8)
    joint = expand(pres, 8)
    convolution = [sum(left.dim(i) * right.dim(d - i) for i in range(d + 1))
                   for d in range(9)]
    assert joint.dims() == convolution


def test_product_action_stays_within_factor():
    pres = em_product_presentation(
        parse_space("K(Z/2,2) x K(Z/2,2)", 2), 2, 8)
    alg = expand(pres, 8, require_action=True)
    a = alg.act(("Sq", 1), alg.generator_element("f1_i2"))
    assert a == alg.generator_element("f1_Sq1i2")


def test_fiber_layout_metadata():
    layout = fiber_layout(parse_space("K(Z/4,2)", 2), 2, 9)
    assert len(layout.factors) == 1
    factor = layout.factors[0]
    assert factor.bottom_name == "i2"
    assert factor.bottom_degree == 2
    assert factor.prefix == ""
    assert not factor.single_atom  # fundamental class plus its companion
    names = [row[0] for row in factor.gens]
    assert "i2" in names and "Sq1i2" in names
    bottom_rows = [row for row in factor.gens if row[5]]
    assert {row[0] for row in bottom_rows} == {"i2"}
    simple = fiber_layout(EMSpec(CyclicClass(1), 2), 2, 9)
    assert simple.factors[0].single_atom
    assert simple.presentation.generators  # passthrough to a presentation


# ---------------------------------------------------------------------------
# parsing


def test_parse_space_forms():
    assert parse_space("K(Z,3)", 2) == EMSpec(IntegerClass(), 3)
    assert parse_space("K(Z/8,1)", 2) == EMSpec(CyclicClass(3), 1)
    assert parse_space("K(Z/2^3,1)", 2) == EMSpec(CyclicClass(3), 1)
    assert parse_space("K(Z/9,2)", 3) == EMSpec(CyclicClass(2), 2)
    assert parse_space("K(Zpinf,2)", 5) == EMSpec(PruferClass(), 2)
    assert parse_space("K(Z/pinf,2)", 5) == EMSpec(PruferClass(), 2)
    for text in ("Zp", "Z_p", "Z^p"):
        assert parse_space(f"K({text},4)", 3) == EMSpec(PadicClass(), 4)
    prod = parse_space("K(Z/2,1) x K(Z,2) * K(Z/4,3)", 2)
    assert [spec.n for spec in prod.factors] == [1, 2, 3]
    # cyclic orders render symbolically in the prime
    assert str(prod) == "K(Z/p,1) x K(Z,2) x K(Z/p^2,3)"


def test_parse_space_rejects():
    with pytest.raises(InputError):
        parse_space("K(Z,0)", 2)          # degree must be >= 1
    with pytest.raises(InputError):
        parse_space("K(Z/6,2)", 2)        # 6 is not a power of 2
    with pytest.raises(InputError):
        parse_space("K(Z/3,1)", 2)        # wrong prime entirely
    with pytest.raises(InputError):
        parse_space("K(Q,2)", 2)
    with pytest.raises(InputError):
        parse_space("nothing here", 2)
    with pytest.raises(InputError):
        parse_space("K(Z,3) leftovers", 2)
    with pytest.raises(InputError):
        EMProduct(())


def test_bound_below_fundamental_degree():
    with pytest.raises(InputError):
        em_generators(EMSpec(IntegerClass(), 3), 2, 2)
    # bound exactly at the fundamental degree: just the bottom class
    pres = em_generators(EMSpec(IntegerClass(), 3), 2, 3)
    assert [(g.name, g.degree) for g in pres.generators] == [("i3", 3)]
