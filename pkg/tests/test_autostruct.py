"""Automatic structures: the validator, normal forms, and the helpers.

Most tests here lean on the bicyclic structure because every judgment about
it is independently decidable through its pair-of-counters model.
"""
import pytest

from autsem.autostruct import (
    AutomaticStructure,
    StructureError,
    find_word,
    finite_structure,
    make_structure,
    multiplier_for_word,
    normal_form,
    prefix_automatic_check,
    prefix_language,
    strip_length_one,
    uniquify,
    validate,
    word_equal,
)
from autsem.catalog import (
    BUILTIN_STRUCTURES,
    bicyclic_structure,
    builtin_structure,
    z2_structure,
)
from autsem.fsa import Alphabet, Fsa
from autsem.padrel import PaddedAlphabet, PairRelation, diagonal
from autsem.semigroups import (
    FiniteModel,
    GenMap,
    cyclic_group,
    monogenic_nilpotent,
    z2_monoid,
)
from oracles import words_upto


@pytest.fixture(scope="module")
def bic():
    return bicyclic_structure()


# ---------------------------------------------------------------------------
# the validator

@pytest.mark.parametrize("name", sorted(BUILTIN_STRUCTURES))
def test_builtin_validates(name):
    s = builtin_structure(name)
    rep = validate(s, 6)
    assert rep.ok, rep.violations[:5]
    assert rep.words > 0


def test_validate_reports_counts(bic):
    rep = validate(bic, 4)
    assert rep.ok
    assert rep.words == len(bic.language.enumerate_words(4))
    assert rep.elements >= rep.words  # ball of generator products


def test_validate_catches_missing_pair(bic):
    pa = bic.pairs
    bad = dict(bic.multipliers)
    bad["b"] = bad["b"].difference(
        PairRelation.from_pairs(pa, [("b c", "b")]))
    rep = validate(AutomaticStructure(
        bic.genmap, bic.language, bad, bic.equality, bic.gen_reps), 4)
    assert not rep.ok
    assert any("missing" in v for v in rep.violations)


def test_validate_catches_extra_pair(bic):
    pa = bic.pairs
    extra = dict(bic.multipliers)
    extra["b"] = extra["b"].union(PairRelation.from_pairs(pa, [("c", "c")]))
    rep = validate(AutomaticStructure(
        bic.genmap, bic.language, extra, bic.equality, bic.gen_reps), 4)
    assert not rep.ok
    assert any("wrongly accepted" in v for v in rep.violations)


def test_validate_catches_nondiagonal_equality(bic):
    rep = validate(AutomaticStructure(
        bic.genmap, bic.language, bic.multipliers,
        bic.equality.union(PairRelation.from_pairs(bic.pairs, [("b", "c")])),
        bic.gen_reps), 3)
    assert not rep.ok


# ---------------------------------------------------------------------------
# normal forms and word comparison

def test_normal_form_examples(bic):
    assert normal_form(bic, "b b c c") == bic.word("b c")
    assert normal_form(bic, "c c b") == bic.word("c c b")
    assert normal_form(bic, "b c b c b c") == bic.word("b c")


def test_word_equal_examples(bic):
    assert word_equal(bic, "b c", "b b c c")
    assert not word_equal(bic, "b c", "c b")
    assert word_equal(bic, "c b b c", "c b")


def test_word_equal_matches_model(bic):
    words = [w for w in words_upto(2, 4) if w]
    g = bic.genmap
    for w1 in words:
        for w2 in words:
            assert word_equal(bic, w1, w2) == (g.evaluate(w1) == g.evaluate(w2))


# ---------------------------------------------------------------------------
# multipliers for longer words

def test_multiplier_for_word(bic):
    g = bic.genmap
    mfw = multiplier_for_word(bic, "b c")
    words = bic.language.enumerate_words(5)
    for w in words:
        img = g.model.mul(g.evaluate(w), (0, 0))
        for w2 in words:
            assert mfw.accepts_pair(w, w2) == (g.evaluate(w2) == img)

    mfw2 = multiplier_for_word(bic, "c c")
    assert mfw2.accepts_pair("b c", "c c")
    assert mfw2.accepts_pair("b", "c")


# ---------------------------------------------------------------------------
# uniquify

def one_letter_z2():
    alpha = Alphabet(("a",))
    z2 = z2_monoid()
    gm = GenMap.of(alpha, FiniteModel(z2), {"a": z2.names.index("1")})
    return alpha, gm, PaddedAlphabet(alpha)


def test_uniquify_culls_duplicates():
    alpha, gm, pa = one_letter_z2()
    L = Fsa.from_words(alpha, ["a", "a a", "a a a"])
    eq = PairRelation.from_pairs(pa, [
        ("a", "a"), ("a a", "a a"), ("a a a", "a a a"),
        ("a", "a a a"), ("a a a", "a")])
    mul_a = PairRelation.from_pairs(pa, [
        ("a", "a a"), ("a a", "a"), ("a a", "a a a"), ("a a a", "a a")])
    messy = make_structure(gm, L, {"a": mul_a}, equality=eq, unique=False)
    tidy = uniquify(messy)
    assert tidy.unique
    assert sorted(tidy.language.enumerate_words(5)) == [(0,), (0, 0)]
    assert validate(tidy, 5).ok


def test_uniquify_refuses_lossy_cull():
    # the shortlex winner for one class sits outside the language, so culling
    # would silently drop an element
    alpha, gm, pa = one_letter_z2()
    weird = make_structure(
        gm,
        Fsa.from_words(alpha, ["a a a"]),
        {"a": PairRelation.from_pairs(pa, [("a a a", "a a a")])},
        equality=PairRelation.from_pairs(
            pa, [("a a a", "a a a"), ("a", "a a a")]),
        unique=False)
    with pytest.raises(StructureError):
        uniquify(weird)


# ---------------------------------------------------------------------------
# strip_length_one

def test_strip_length_one_z2():
    stripped = strip_length_one(z2_structure())
    assert all(len(w) >= 2 for w in stripped.language.enumerate_words(4))
    assert validate(stripped, 5).ok
    assert stripped.gen_reps["a"] == (0, 0, 0)
    assert strip_length_one(stripped) is stripped  # nothing left to strip


def test_strip_length_one_needs_product_reps():
    nil = monogenic_nilpotent(3)
    nil_s = finite_structure(FiniteModel(nil), {"a": 0})
    with pytest.raises(StructureError):
        strip_length_one(nil_s)  # the generator is not a product


def test_strip_length_one_cyclic3():
    st3 = strip_length_one(finite_structure(FiniteModel(cyclic_group(3)), {"g": 1}))
    assert validate(st3, 6).ok
    assert all(len(w) >= 2 for w in st3.language.enumerate_words(6))


# ---------------------------------------------------------------------------
# rep search and finite structures

def test_find_word():
    intz = builtin_structure("int_z")
    assert find_word(intz.genmap, 3, 5) == (1, 1, 1)
    assert find_word(intz.genmap, -2, 5) == (2, 2)
    assert find_word(intz.genmap, 7, 4) is None
    assert find_word(intz.genmap, 0, 3) == (0,)  # shortlex least wins


def test_finite_structure_c4():
    c4 = finite_structure(FiniteModel(cyclic_group(4)), {"g": 1})
    assert validate(c4, 6).ok
    assert len(c4.language.enumerate_words(6)) == 4


def test_make_structure_searches_reps(bic):
    auto = make_structure(bic.genmap, bic.language, dict(bic.multipliers),
                          equality=bic.equality)
    assert auto.gen_reps["b"] == bic.word("b")
    assert auto.gen_reps["c"] == bic.word("c")


def test_make_structure_fails_without_rep(bic):
    with pytest.raises(StructureError):
        make_structure(bic.genmap,
                       bic.language.difference(Fsa.word(bic.alphabet, "b")),
                       dict(bic.multipliers), equality=bic.equality)


# ---------------------------------------------------------------------------
# prefix machinery

def test_prefix_language_window(bic):
    got = set(prefix_language(bic.language).enumerate_words(3))
    want = set()
    for w in bic.language.enumerate_words(6):
        for i in range(1, min(3, len(w)) + 1):
            want.add(w[:i])
    assert got == want


def test_prefix_check_accepts_diagonal(bic):
    cand = diagonal(bic.pairs, bic.language)
    assert prefix_automatic_check(bic, cand, 5).ok


def test_prefix_check_catches_dropped_pair(bic):
    cand = diagonal(bic.pairs,
                    bic.language.difference(Fsa.word(bic.alphabet, "b c")))
    assert not prefix_automatic_check(bic, cand, 5).ok


def test_prefix_check_proper_prefixes():
    alpha = Alphabet(("a",))
    zm = z2_monoid()
    gm = GenMap.of(alpha, FiniteModel(zm), {"a": zm.names.index("1")})
    L = Fsa.from_words(alpha, ["a a", "a a a"])
    pa = PaddedAlphabet(alpha)
    s = AutomaticStructure(
        gm, L,
        {"a": PairRelation.from_pairs(pa, [("a a", "a a a"), ("a a a", "a a")])},
        PairRelation.from_pairs(pa, [("a a", "a a"), ("a a a", "a a a")]),
        {"a": "a a a"})
    good = PairRelation.from_pairs(
        pa, [("a a", "a a"), ("a a a", "a a a"), ("a a a", "a")])
    assert prefix_automatic_check(s, good, 5).ok
    bad = good.union(PairRelation.from_pairs(pa, [("a a", "a")]))
    assert not prefix_automatic_check(s, bad, 5).ok
