"""Padded pair words and regular relations over them."""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autsem.fsa import Alphabet, Fsa
from autsem.padrel import (
    BoundViolation,
    PaddedAlphabet,
    PaddingError,
    PairRelation,
    apply,
    bounded_difference,
    compose,
    convolve,
    deconvolve,
    diagonal,
    padded_product,
    preimage_wordmap,
    project,
    shortlex_less,
    times,
    transpose,
    well_padded,
)
from oracles import words_upto

AB = Alphabet(("a", "b"))
PA = PaddedAlphabet(AB)

base_words = st.lists(st.integers(0, 1), max_size=5).map(tuple)
finite_rel = st.lists(st.tuples(base_words, base_words), min_size=1, max_size=6)


# ---------------------------------------------------------------------------
# the pair alphabet itself

def test_pair_alphabet_names():
    assert PA.pad == 2
    assert set(PA.alphabet.names) == {
        "a|a", "a|b", "a|$", "b|a", "b|b", "b|$", "$|a", "$|b"}
    assert PA.alphabet.names[PA.pair(0, 1)] == "a|b"
    assert PA.sides(PA.pair(2, 0)) == (2, 0)
    assert PA.diag(1) == PA.pair(1, 1)
    with pytest.raises(ValueError, match=r"\(\$,\$\)"):
        PA.pair(2, 2)
    with pytest.raises(ValueError, match="out of range"):
        PA.pair(3, 0)


def test_pad_name_reserved():
    with pytest.raises(ValueError, match="padding name"):
        PaddedAlphabet(Alphabet(("a", "$")))


def test_nested_pair_alphabet_separator_widens():
    # pairs of pair letters must stay parseable, so the separator grows
    nested = PaddedAlphabet(PA.alphabet)
    assert "||" in nested.alphabet.names[0]
    assert len(set(nested.alphabet.names)) == len(nested.alphabet.names)


# ---------------------------------------------------------------------------
# convolution

def test_convolve_explicit():
    w = convolve(PA, "a", "bb")
    assert [PA.alphabet.names[i] for i in w] == ["a|b", "$|b"]
    assert deconvolve(PA, w) == ((0,), (1, 1))
    assert convolve(PA, "", "") == ()


@given(base_words, base_words)
def test_convolve_round_trip(w1, w2):
    packed = PA.convolve(w1, w2)
    assert len(packed) == max(len(w1), len(w2))
    assert PA.is_well_padded(packed)
    assert PA.deconvolve(packed) == (w1, w2)


def test_deconvolve_rejects_interior_padding():
    bad = (PA.pair(2, 0), PA.pair(0, 1))  # left side resumes after $
    with pytest.raises(PaddingError, match="left side resumes"):
        PA.deconvolve(bad)
    assert not PA.is_well_padded(bad)
    bad2 = (PA.pair(0, 2), PA.pair(2, 1))
    with pytest.raises(PaddingError, match="right side resumes"):
        PA.deconvolve(bad2)


def test_well_padded_automaton_matches_predicate():
    wp = well_padded(PA)
    for w in words_upto(len(PA.alphabet), 3):
        assert wp.accepts(w) == PA.is_well_padded(w)


# ---------------------------------------------------------------------------
# relations

def test_from_pairs_membership():
    r = PairRelation.from_pairs(PA, [("a", "bb"), ((), (0,))])
    assert r.accepts_pair("a", "bb")
    assert r.accepts_pair((), (0,))
    assert not r.accepts_pair("a", "b")
    assert set(r.enumerate_pairs(3)) == {((0,), (1, 1)), ((), (0,))}
    assert PairRelation.empty(PA).is_empty()


def test_relation_alphabet_must_be_padded():
    plain = Fsa.universe(AB)
    with pytest.raises(ValueError):
        PairRelation(PA, plain)


def test_diagonal_and_times():
    lang = Fsa.from_words(AB, ["a", "ab"])
    d = diagonal(PA, lang)
    assert d.accepts_pair("a", "a") and d.accepts_pair("ab", "ab")
    assert not d.accepts_pair("a", "ab")
    assert not d.accepts_pair("b", "b")  # not in the language

    other = Fsa.from_words(AB, ["", "b"])
    t = times(PA, lang, other)
    pairs = set(t.enumerate_pairs(4))
    assert pairs == {((0,), ()), ((0,), (1,)), ((0, 1), ()), ((0, 1), (1,))}


def test_boolean_ops_on_relations():
    r = PairRelation.from_pairs(PA, [("a", "b"), ("b", "a")])
    s = PairRelation.from_pairs(PA, [("a", "b")])
    assert r.union(s).accepts_pair("b", "a")
    assert r.intersect(s).accepts_pair("a", "b")
    assert not r.intersect(s).accepts_pair("b", "a")
    assert not r.difference(s).accepts_pair("a", "b")
    assert r.minimized().fsa.equivalent(r.fsa)


def test_project_and_transpose():
    r = PairRelation.from_pairs(PA, [("a", "bb"), ("ab", "")])
    assert set(project(r, 0).enumerate_words(3)) == {(0,), (0, 1)}
    assert set(project(r, 1).enumerate_words(3)) == {(1, 1), ()}
    tr = transpose(r)
    assert tr.accepts_pair("bb", "a") and tr.accepts_pair("", "ab")
    assert not tr.accepts_pair("a", "bb")


def test_shortlex_less_matches_key():
    sl = shortlex_less(PA)
    small = words_upto(2, 3)
    for u in small:
        for v in small:
            assert sl.accepts_pair(u, v) == ((len(u), u) < (len(v), v)), (u, v)


def test_apply_is_the_image_language():
    r = PairRelation.from_pairs(PA, [("a", "bb"), ("a", ""), ("b", "a")])
    assert set(apply(r, "a").enumerate_words(3)) == {(1, 1), ()}
    assert set(apply(r, "b").enumerate_words(3)) == {(0,)}
    assert apply(r, "ab").is_empty()


# ---------------------------------------------------------------------------
# length-difference bounds

def test_bounded_difference_values():
    assert bounded_difference(diagonal(PA, Fsa.universe(AB)), 5) == 0
    spread = PairRelation.from_pairs(PA, [("a", "abb"), ("b", "b")])
    assert bounded_difference(spread, 5) == 2
    assert bounded_difference(spread, 1) is None
    unbounded = times(PA, Fsa.universe(AB), Fsa.epsilon(AB))
    assert bounded_difference(unbounded, 8) is None


# ---------------------------------------------------------------------------
# products of relations

@given(finite_rel, finite_rel)
@settings(max_examples=40, deadline=None)
def test_padded_product_definitional(mp, np):
    m = PairRelation.from_pairs(PA, mp)
    n = PairRelation.from_pairs(PA, np)
    c = bounded_difference(m, 16)
    assert c is not None  # finite relations are always bounded
    prod = padded_product(m, n, c)
    want = {(u1 + u2, v1 + v2) for u1, v1 in mp for u2, v2 in np}
    assert set(prod.enumerate_pairs(12)) == want


def test_padded_product_checks_the_bound():
    wide = PairRelation.from_pairs(PA, [("", "bbbb")])
    tail = PairRelation.from_pairs(PA, [("a", "a")])
    with pytest.raises(BoundViolation):
        padded_product(wide, tail, 2)
    # verify=False trusts the caller; with a big enough bound it still works
    ok = padded_product(wide, tail, 4, verify=False)
    assert ok.accepts_pair("a", "bbbba")


@given(finite_rel, finite_rel)
@settings(max_examples=40, deadline=None)
def test_compose_definitional(mp, np):
    m = PairRelation.from_pairs(PA, mp)
    n = PairRelation.from_pairs(PA, np)
    comp = compose(m, n, 16)
    want = {(u, w) for u, v in mp for v2, w in np if v == v2}
    assert set(comp.enumerate_pairs(12)) == want


def test_preimage_wordmap_pulls_back():
    # m relates (u, u b) over {a,b}; substitute x -> ab, y -> b
    m = PairRelation.from_pairs(
        PA, [("a", "ab"), ("ab", "abb"), ("b", "bb"), ("abab", "ababb")])
    xy = Alphabet(("x", "y"))
    new_pa = PaddedAlphabet(xy)
    images = {0: AB.word("ab"), 1: AB.word("b")}
    pulled = preimage_wordmap(m, new_pa, images.get, 4)
    got = set(pulled.enumerate_pairs(6))
    # check against brute substitution over short words
    def subst(w):
        out = ()
        for letter in w:
            out += images[letter]
        return out
    want = set()
    for u in words_upto(2, 3):
        for v in words_upto(2, 3):
            if m.accepts_pair(subst(u), subst(v)) and max(len(u), len(v)) <= 6:
                want.add((u, v))
    assert got == want
