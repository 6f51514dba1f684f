"""Automaton kernel: parsing, membership, algebra, serialization."""
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autsem.fsa import (
    Alphabet,
    AlphabetMismatch,
    EnumerationCap,
    Fsa,
    combine,
    enum_cap_from_env,
)
from oracles import concat_sets, plus_set, star_set, words_upto

AB = Alphabet(("a", "b"))
ABC = Alphabet(("a", "b", "c"))


# ---------------------------------------------------------------------------
# strategies

def fsas(alphabet, max_states=4):
    n_states = st.integers(1, max_states)

    def build(n):
        letter = st.one_of(st.none(), st.integers(0, len(alphabet) - 1))
        state = st.integers(0, n - 1)
        return st.builds(
            Fsa,
            st.just(alphabet),
            st.just(n),
            st.frozensets(state, min_size=1, max_size=n),
            st.frozensets(state, max_size=n),
            st.frozensets(st.tuples(state, letter, state), max_size=12),
        )

    return n_states.flatmap(build)


any_fsa = st.sampled_from([AB, ABC]).flatmap(fsas)


# ---------------------------------------------------------------------------
# alphabets and word parsing

def test_alphabet_word_forms():
    assert AB.word("a b a") == (0, 1, 0)
    assert AB.word("aba") == (0, 1, 0)  # bare form, all names single chars
    assert AB.word("") == ()
    assert AB.word(["b", "a"]) == (1, 0)
    assert AB.format((0, 1, 0)) == "aba"

    wide = Alphabet(("up", "dn"))
    assert wide.word("up dn") == (0, 1)
    assert wide.format((0, 1)) == "up dn"
    with pytest.raises(ValueError, match="unknown letter"):
        wide.word("updn")


def test_alphabet_rejects_bad_names():
    with pytest.raises(ValueError):
        Alphabet(())
    with pytest.raises(ValueError, match="duplicate"):
        Alphabet(("a", "a"))
    with pytest.raises(ValueError, match="bad letter"):
        Alphabet(("a", "x y"))
    with pytest.raises(ValueError, match="bad letter"):
        Alphabet(("a", ""))


def test_alphabet_index_and_contains():
    assert ABC.index("c") == 2
    assert "c" in ABC and "z" not in ABC
    with pytest.raises(ValueError, match="unknown letter"):
        ABC.index("z")


# ---------------------------------------------------------------------------
# constructors and membership

def test_basic_constructors():
    assert Fsa.empty(AB).is_empty()
    assert not Fsa.epsilon(AB).is_empty()
    assert Fsa.epsilon(AB).accepts(())
    assert not Fsa.epsilon(AB).accepts("a")
    w = Fsa.word(AB, "a b b")
    assert w.accepts("abb") and not w.accepts("ab")
    assert Fsa.letters(AB).enumerate_words(1) == [(0,), (1,)]
    assert Fsa.letters(AB, [1]).enumerate_words(2) == [(1,)]
    u = Fsa.universe(AB)
    assert u.accepts("") and u.accepts("abba")
    nu = Fsa.nonempty_universe(AB)
    assert not nu.accepts("") and nu.accepts("b")


def test_from_words_dedup_and_membership():
    f = Fsa.from_words(AB, ["a", "ab", "ab", (1,)])
    assert sorted(f.enumerate_words(5)) == [(0,), (0, 1), (1,)]
    assert f.accepts("ab") and not f.accepts("ba")


@given(any_fsa)
@settings(max_examples=80)
def test_accepts_agrees_with_enumeration(x):
    got = set(x.enumerate_words(4))
    for w in words_upto(len(x.alphabet), 4):
        assert x.accepts(w) == (w in got)


def test_enumeration_is_shortlex():
    f = Fsa.from_words(AB, ["b", "a", "ba", "aa", "aab"])
    assert f.enumerate_words(3) == [(0,), (1,), (0, 0), (1, 0), (0, 0, 1)]


def test_shortlex_least():
    assert Fsa.empty(AB).shortlex_least() is None
    assert Fsa.universe(AB).shortlex_least() == ()
    assert Fsa.from_words(AB, ["ba", "ab", "b"]).shortlex_least() == (1,)


# ---------------------------------------------------------------------------
# normal forms of the machine itself

@given(any_fsa)
@settings(max_examples=80)
def test_determinize_minimize_complete_preserve_language(x):
    for y in (x.determinize(), x.minimize(), x.complete()):
        assert y.equivalent(x)
    m = x.minimize()
    # a minimal machine is a complete DFA and a fixed point of minimize
    assert len(m.initial) == 1
    assert all(lab is not None for _s, lab, _d in m.transitions)
    assert len(m.transitions) == m.n_states * len(x.alphabet)
    assert m.minimize().n_states == m.n_states


def test_minimize_classic_size():
    # words ending in abb: the minimal complete machine has 4 states
    f = Fsa.universe(AB).concat(Fsa.word(AB, "a b b"))
    assert f.minimize().n_states == 4


# ---------------------------------------------------------------------------
# boolean and rational algebra

@given(st.sampled_from([AB, ABC]).flatmap(lambda al: st.tuples(fsas(al), fsas(al))))
@settings(max_examples=60)
def test_boolean_identities(pair):
    x, y = pair
    assert x.union(y).equivalent(y.union(x))
    assert x.intersect(y).complement().equivalent(x.complement().union(y.complement()))
    assert x.difference(y).equivalent(x.intersect(y.complement()))
    assert x.union(x.complement()).equivalent(Fsa.universe(x.alphabet))


@given(any_fsa)
@settings(max_examples=60)
def test_rational_identities(x):
    eps = Fsa.epsilon(x.alphabet)
    assert x.concat(eps).equivalent(x)
    assert eps.concat(x).equivalent(x)
    assert x.star().star().equivalent(x.star())
    assert x.plus().union(eps).equivalent(x.star())


@given(st.tuples(fsas(AB), fsas(AB)))
@settings(max_examples=40)
def test_concat_against_set_oracle(pair):
    x, y = pair
    xs, ys = set(x.enumerate_words(6)), set(y.enumerate_words(6))
    assert set(x.concat(y).enumerate_words(6)) == concat_sets(xs, ys, 6)


@given(fsas(AB))
@settings(max_examples=40)
def test_star_plus_against_set_oracle(x):
    xs = set(x.enumerate_words(6))
    assert set(x.star().enumerate_words(6)) == star_set(xs, 6)
    assert set(x.plus().enumerate_words(6)) == plus_set(xs, 6)


def test_operator_sugar():
    a, b = Fsa.word(AB, "a"), Fsa.word(AB, "b")
    assert (a | b).accepts("b")
    assert (a + b).accepts("ab")
    assert ((a | b) - a).equivalent(b)
    assert (a & b).is_empty()


def test_combine_dispatch():
    a, b = Fsa.word(AB, "a"), Fsa.word(AB, "b")
    assert combine("union", a, b).equivalent(a.union(b))
    assert combine("star", a).equivalent(a.star())
    with pytest.raises(ValueError, match="one operand"):
        combine("star", a, b)
    with pytest.raises(ValueError, match="two operands"):
        combine("concat", a)
    with pytest.raises(ValueError, match="unknown operation"):
        combine("xor", a, b)


def test_mixed_alphabets_rejected():
    with pytest.raises(AlphabetMismatch):
        Fsa.word(AB, "a").union(Fsa.word(ABC, "a"))
    with pytest.raises(AlphabetMismatch):
        Fsa.universe(AB).equivalent(Fsa.universe(ABC))


# ---------------------------------------------------------------------------
# relabelings

def test_rename_permutation():
    f = Fsa.from_words(AB, ["ab", "a"])
    ba = Alphabet(("b", "a"))
    g = f.rename(ba, {0: 1, 1: 0})
    assert set(g.enumerate_words(3)) == {(1, 0), (1,)}
    assert ba.format((1, 0)) == "ab"  # same spelling, new indices
    with pytest.raises(ValueError, match="equal-size"):
        f.rename(ABC)


def test_map_letters_homomorphism():
    f = Fsa.from_words(AB, ["ab", "b"])
    xy = Alphabet(("x", "y"))
    # a -> xx, b -> y
    g = f.map_letters(xy, lambda i: (0, 0) if i == 0 else (1,))
    assert set(g.enumerate_words(4)) == {(0, 0, 1), (1,)}
    # erasing a letter entirely drops the words that used it
    h = f.map_letters(xy, lambda i: None if i == 0 else (1,))
    assert set(h.enumerate_words(4)) == {(1,)}
    # empty image contracts to an epsilon move
    k = f.map_letters(xy, lambda i: () if i == 0 else (1,))
    assert set(k.enumerate_words(4)) == {(1,)}


# ---------------------------------------------------------------------------
# enumeration caps

def test_enumeration_cap_raises():
    with pytest.raises(EnumerationCap):
        Fsa.universe(AB).enumerate_words(20, cap=100)


def test_enum_cap_env(monkeypatch):
    monkeypatch.delenv("AUTSEM_ENUM_CAP", raising=False)
    assert enum_cap_from_env() == 10**6
    monkeypatch.setenv("AUTSEM_ENUM_CAP", "40")
    assert enum_cap_from_env() == 40
    with pytest.raises(EnumerationCap):
        Fsa.universe(AB).enumerate_words(12)
    monkeypatch.setenv("AUTSEM_ENUM_CAP", "zero")
    with pytest.raises(ValueError, match="must be an integer"):
        enum_cap_from_env()
    monkeypatch.setenv("AUTSEM_ENUM_CAP", "-3")
    with pytest.raises(ValueError, match="must be positive"):
        enum_cap_from_env()


# ---------------------------------------------------------------------------
# serialization

@given(any_fsa)
@settings(max_examples=40)
def test_json_round_trip(x):
    again = Fsa.from_json(x.to_json())
    assert again.alphabet.names == x.alphabet.names
    assert again.equivalent(x)


def test_json_shape_and_epsilon_spelling():
    eps_move = Fsa(AB, 2, frozenset([0]), frozenset([1]),
                   frozenset([(0, None, 1), (1, 0, 1)]))
    data = eps_move.to_json()
    assert data["alphabet"] == ["a", "b"]
    assert data["states"] == 2
    assert any(t[1] == "" for t in data["transitions"])  # epsilon spelled ""
    assert Fsa.from_json(json.loads(json.dumps(data))).equivalent(eps_move)


def test_from_json_rejects_garbage():
    with pytest.raises(ValueError):
        Fsa.from_json({"alphabet": ["a"]})
    with pytest.raises(ValueError):
        Fsa.from_json({"alphabet": ["a"], "states": 1, "initial": [0],
                       "finals": [], "transitions": [[0, "z", 0]]})


def test_save_load(tmp_path):
    f = Fsa.from_words(ABC, ["abc", "c"])
    p = str(tmp_path / "lang.json")
    f.save(p)
    assert Fsa.load(p).equivalent(f)


def test_to_dot_marks_finals():
    dot = Fsa.word(AB, "a").to_dot()
    assert dot.startswith("digraph")
    assert "doublecircle" in dot
    assert '"a"' in dot
