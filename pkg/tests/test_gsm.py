"""Sequential machines and the two transport maps they induce.

The reference point throughout is oracles.gsm_runs, which walks machine
edges directly: every claim about eta or zeta reduces to a statement about
the set of successful runs.
"""
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from autsem.fsa import Alphabet, Fsa
from autsem.gsm import Gsm, VarianceViolation, bounded_output_variance, eta, zeta
from autsem.padrel import PaddedAlphabet, PairRelation
from oracles import gsm_runs

IN = Alphabet(("a", "b"))
OUT = Alphabet(("x", "y"))


def machine(edges, n=2, initial=0, terminals=(1,)):
    return Gsm(n, IN, OUT, frozenset(edges), initial, frozenset(terminals))


@st.composite
def machines(draw, max_states=3):
    n = draw(st.integers(1, max_states))
    word = st.lists(st.integers(0, 1), min_size=1, max_size=2).map(tuple)
    edges = draw(st.frozensets(
        st.tuples(st.integers(0, n - 1), st.integers(0, 1),
                  st.integers(0, n - 1), word),
        max_size=8))
    terminals = draw(st.frozensets(st.integers(0, n - 1), max_size=n))
    return Gsm(n, IN, OUT, edges, 0, terminals)


# ---------------------------------------------------------------------------
# construction

def test_validation():
    with pytest.raises(ValueError, match="initial"):
        machine([], initial=5)
    with pytest.raises(ValueError, match="terminal"):
        machine([], terminals=(7,))
    with pytest.raises(ValueError, match="nonempty"):
        machine([(0, 0, 1, ())])
    with pytest.raises(ValueError, match="input letter"):
        machine([(0, 9, 1, (0,))])
    with pytest.raises(ValueError, match="output letter"):
        machine([(0, 0, 1, (9,))])


def test_max_output_len():
    g = machine([(0, 0, 1, (0,)), (0, 1, 1, (0, 1, 1))])
    assert g.max_output_len == 3
    assert machine([]).max_output_len == 1  # harmless floor for empty machines


# ---------------------------------------------------------------------------
# eta

def test_eta_doubles_letters():
    # a -> xx, b -> yy on a single looping state
    g = Gsm(1, IN, OUT, frozenset([(0, 0, 0, (0, 0)), (0, 1, 0, (1, 1))]),
            0, frozenset([0]))
    lang = eta(g, Fsa.universe(IN))
    # zero-edge runs never count, so the empty word is absent
    assert set(lang.enumerate_words(4)) == {(0, 0), (1, 1), (0, 0, 0, 0),
                                            (0, 0, 1, 1), (1, 1, 0, 0),
                                            (1, 1, 1, 1)}
    only_a = eta(g, Fsa.word(IN, "a"))
    assert set(only_a.enumerate_words(6)) == {(0, 0)}


def test_eta_empty_cases():
    g = machine([(0, 0, 1, (0,))])
    assert eta(g, Fsa.empty(IN)).is_empty()
    # no terminal reachable
    dead = Gsm(2, IN, OUT, frozenset([(0, 0, 0, (0,))]), 0, frozenset([1]))
    assert eta(dead, Fsa.universe(IN)).is_empty()


@given(machines(), st.lists(st.lists(st.integers(0, 1), max_size=4).map(tuple),
                            max_size=5))
@settings(max_examples=60, deadline=None)
def test_eta_matches_run_enumeration(g, words):
    x = Fsa.from_words(IN, words) if words else Fsa.universe(IN)
    got = set(eta(g, x).enumerate_words(5))
    want = {out for inp, out in gsm_runs(g, 5)
            if x.accepts(inp) and len(out) <= 5}
    assert got == want


# ---------------------------------------------------------------------------
# output variance

def test_variance_values():
    balanced = Gsm(1, IN, OUT, frozenset([(0, 0, 0, (0, 0)), (0, 1, 0, (1, 1))]),
                   0, frozenset([0]))
    assert bounded_output_variance(balanced, 3) == 0
    oneshot = machine([(0, 0, 1, (0,)), (0, 1, 1, (0, 1))])
    assert bounded_output_variance(oneshot, 3) == 1
    skewing = Gsm(1, IN, OUT, frozenset([(0, 0, 0, (0,)), (0, 1, 0, (1, 1))]),
                  0, frozenset([0]))
    assert bounded_output_variance(skewing, 6) is None
    # dead edges do not contribute: the skew sits on a path to nowhere
    pruned = Gsm(3, IN, OUT,
                 frozenset([(0, 0, 1, (0,)), (0, 1, 2, (0, 0, 0)),
                            (2, 0, 2, (0, 0))]),
                 0, frozenset([1]))
    assert bounded_output_variance(pruned, 8) == 0


# ---------------------------------------------------------------------------
# zeta

def test_zeta_rejects_alphabet_and_variance_problems():
    g = machine([(0, 0, 1, (0,))])
    wrong = PairRelation.from_pairs(PaddedAlphabet(OUT), [("x", "x")])
    with pytest.raises(ValueError, match="machine input"):
        zeta(g, wrong, 2)
    skewing = Gsm(1, IN, OUT, frozenset([(0, 0, 0, (0,)), (0, 1, 0, (1, 1))]),
                  0, frozenset([0]))
    rel = PairRelation.from_pairs(PaddedAlphabet(IN), [("a", "a")])
    with pytest.raises(VarianceViolation):
        zeta(skewing, rel, 1)


@given(machines(),
       st.lists(st.tuples(st.lists(st.integers(0, 1), max_size=3).map(tuple),
                          st.lists(st.integers(0, 1), max_size=3).map(tuple)),
                min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_zeta_matches_run_enumeration(g, pairs):
    c = bounded_output_variance(g, 4)
    assume(c is not None)
    m = PairRelation.from_pairs(PaddedAlphabet(IN), pairs)
    z = zeta(g, m, c)
    runs = gsm_runs(g, 3)
    by_input: dict[tuple, set] = {}
    for inp, out in runs:
        by_input.setdefault(inp, set()).add(out)
    want = {(ou, ov)
            for u, v in pairs
            for ou in by_input.get(u, ())
            for ov in by_input.get(v, ())}
    # outputs of length-3 inputs fit in 2*3 packed letters, so this is exact
    assert set(z.enumerate_pairs(6)) == want


# ---------------------------------------------------------------------------
# serialization

def test_json_round_trip(tmp_path):
    g = machine([(0, 0, 1, (0, 1)), (1, 1, 1, (1,))])
    data = g.to_json()
    assert data["edges"] == [[0, "a", 1, "xy"], [1, "b", 1, "y"]]
    again = Gsm.from_json(data)
    assert again == g
    p = str(tmp_path / "m.json")
    g.save(p)
    assert Gsm.load(p) == g


def test_from_json_rejects_garbage():
    with pytest.raises(ValueError, match="malformed gsm"):
        Gsm.from_json({"input_alphabet": ["a"]})
