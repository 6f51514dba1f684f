"""End-to-end acceptance checks, one per headline behavior, each timed.

Every test here carries a wall-clock budget asserted at the end, so a
regression that merely slows a construction down fails the suite just like
a wrong answer would.  Randomized tests draw from seeded generators; the
case lists are deterministic across runs.
"""
import random
import time

from autsem.autostruct import (
    StructureError,
    finite_structure,
    multiplier_for_word,
    strip_length_one,
    validate,
    word_equal,
)
from autsem.catalog import builtin_structure
from autsem.constructions import (
    block_size_for,
    bruck_reilly_const_one,
    bruck_reilly_fgt,
    bruck_reilly_finite,
    bruck_reilly_identity,
    complement_from_finite,
    derive_rees_decomposition,
    direct_product_finite_infinite,
    direct_product_monoids,
    free_product_monoids,
    free_product_monoids_restrict,
    free_product_restrict,
    free_product_semigroups,
    rees_index_down,
    rees_index_up,
    rees_matrix_build,
    rees_matrix_converse,
    rename_letters,
    wreath_action_words,
    wreath_finite_T,
)
from autsem.fsa import Alphabet, Fsa
from autsem.gsm import Gsm, bounded_output_variance, eta, zeta
from autsem.padrel import (
    PaddedAlphabet,
    PairRelation,
    bounded_difference,
    padded_product,
    well_padded,
)
from autsem.semigroups import (
    FiniteModel,
    FiniteSemigroup,
    GenMap,
    IntModel,
    adjoin_identity,
    cyclic_group,
    finitereg_automaton,
    null_semigroup,
    right_identity_decomposition,
    trivial_semigroup,
    z2_monoid,
)

import pytest

from oracles import (
    concat_within,
    gsm_runs,
    plus_within,
    star_within,
    words_upto,
)


def spent(t0: float, budget: float) -> None:
    dt = time.perf_counter() - t0
    assert dt < budget, f"took {dt:.1f}s against a {budget:.0f}s budget"


def z2_letters():
    return finite_structure(FiniteModel(z2_monoid()), {"e": 0, "a": 1})


# ----------------------------------------------------------------------


def test_01_convolution_round_trip():
    # every pair of words over two letters, through the shared-track
    # encoding and back, then every well-padded word the other way
    t0 = time.perf_counter()
    al = Alphabet(("a", "b"))
    pa = PaddedAlphabet(al)
    words = words_upto(2, 6)
    assert len(words) ** 2 >= 4096
    for u in words:
        for v in words:
            assert pa.deconvolve(pa.convolve(u, v)) == (u, v)
    for w in well_padded(pa).enumerate_words(6):
        assert pa.convolve(*pa.deconvolve(w)) == w
    spent(t0, 5)


def test_02_regular_operations_match_set_arithmetic():
    # 200 random operator trees, built in lockstep with truncated word
    # sets; truncation at one shared bound is exact for every operation
    t0 = time.perf_counter()
    rng = random.Random(20260816)
    bound = 8
    alphas = {k: Alphabet(tuple("abc"[:k])) for k in (1, 2, 3)}
    full = {k: set(words_upto(k, bound)) for k in (1, 2, 3)}

    def leaf(k):
        al = alphas[k]
        kind = rng.randrange(4)
        if kind == 0:
            return Fsa.empty(al), set()
        if kind == 1:
            return Fsa.epsilon(al), {()}
        if kind == 2:
            w = tuple(rng.randrange(k) for _ in range(rng.randint(1, 2)))
            return Fsa.word(al, w), {w}
        ws = {tuple(rng.randrange(k) for _ in range(rng.randint(0, 3)))
              for _ in range(rng.randint(1, 3))}
        return Fsa.from_words(al, ws), set(ws)

    def expr(k, depth):
        if depth == 0:
            return leaf(k)
        op = rng.choice(("union", "intersect", "difference", "concat",
                         "star", "plus", "complement"))
        x, xs = expr(k, depth - 1)
        if op == "star":
            return x.star(), star_within(xs, full[k])
        if op == "plus":
            return x.plus(), plus_within(xs, full[k])
        if op == "complement":
            return x.complement(), full[k] - xs
        y, ys = expr(k, rng.randint(0, depth - 1))
        if op == "union":
            return x | y, xs | ys
        if op == "intersect":
            return x & y, xs & ys
        if op == "difference":
            return x - y, xs - ys
        return x + y, concat_within(xs, ys, full[k])

    for i in range(200):
        k = rng.randint(1, 3)
        f, want = expr(k, rng.randint(1, 4))
        assert set(f.enumerate_words(bound)) == want, f"tree {i}"
    spent(t0, 30)


def test_03_padded_product_is_definitional():
    # componentwise concatenation of a bounded-difference relation with an
    # arbitrary finite one, against the set it is supposed to encode
    t0 = time.perf_counter()
    rng = random.Random(33)
    al = Alphabet(("a", "b"))
    pa = PaddedAlphabet(al)

    def rword():
        return tuple(rng.randrange(2) for _ in range(rng.randint(0, 3)))

    for i in range(50):
        # lengths stay under 3, so the left spread is at most 3 for free
        mp = {(rword(), rword()) for _ in range(rng.randint(1, 5))}
        np = {(rword(), rword()) for _ in range(rng.randint(1, 5))}
        m = PairRelation.from_pairs(pa, mp)
        n = PairRelation.from_pairs(pa, np)
        c = bounded_difference(m, 3)
        assert c is not None
        prod = padded_product(m, n, c)
        want = {pa.convolve(u1 + u2, v1 + v2)
                for u1, v1 in mp for u2, v2 in np}
        assert set(prod.fsa.enumerate_words(6)) == want, f"round {i}"
    spent(t0, 30)


def test_04_bruck_reilly_over_trivial_monoid():
    t0 = time.perf_counter()
    bic = bruck_reilly_finite(trivial_semigroup(), [0])
    rep = validate(bic, 7)
    assert rep.ok and not rep.violations
    assert word_equal(bic, "b c", "t:e")
    assert not word_equal(bic, "c b", "t:e")
    spent(t0, 10)


def test_05_bruck_reilly_recipes_agree():
    # the table-driven recipe and the structure-driven recipes build the
    # same monoids; compare them letter by letter over the language ball
    t0 = time.perf_counter()
    zm = z2_monoid()
    z1 = z2_letters()
    paired = (
        (bruck_reilly_finite(zm, [0, 1]), bruck_reilly_identity(z1)),
        (bruck_reilly_finite(zm, [0, 0]), bruck_reilly_const_one(z1)),
    )
    trans = {"t:0": "e", "t:1": "a", "b": "b", "c": "c"}
    for fin, oth in paired:
        assert validate(fin, 6).ok
        assert validate(oth, 6).ok
        src, dst = fin.alphabet, oth.alphabet
        for w in fin.language.enumerate_words(6):
            tw = tuple(dst.index(trans[src.names[i]]) for i in w)
            assert oth.genmap.evaluate(tw) == fin.genmap.evaluate(w)
        ball_f = {fin.genmap.evaluate(w)
                  for w in fin.language.enumerate_words(6)}
        ball_o = {oth.genmap.evaluate(w)
                  for w in oth.language.enumerate_words(6)}
        assert ball_f == ball_o
    spent(t0, 30)


def test_06_bruck_reilly_finite_image_endomorphism():
    # over the free monogenic monoid, sending the generator to the identity
    # collapses every power, so the twisted map has a one-element image
    t0 = time.perf_counter()
    fmm = builtin_structure("free_monogenic_monoid")
    brfgt = bruck_reilly_fgt(fmm, lambda x: 0)
    rep = validate(brfgt, 6)
    assert rep.ok, rep.violations[:3]
    assert word_equal(brfgt, "b c", "e")
    assert not word_equal(brfgt, "c b", "e")

    # the two helpers the recipe leans on, called directly
    twisted = GenMap(fmm.alphabet, fmm.model,
                     tuple(0 for _ in fmm.genmap.images))
    fa = finitereg_automaton(twisted, 0)
    assert fa.accepts(fmm.alphabet.word("e"))
    assert fa.accepts(fmm.alphabet.word("x x"))
    assert finitereg_automaton(twisted, 1).is_empty()
    m = multiplier_for_word(fmm, "x x")
    assert m.accepts_pair("e", "x x")
    assert m.accepts_pair("x", "x x x")
    assert not m.accepts_pair("x", "x")
    spent(t0, 30)


def test_07_free_products():
    t0 = time.perf_counter()
    fm1 = builtin_structure("free_monogenic")
    fm2 = rename_letters(fm1, {"a": "x"})
    p = free_product_semigroups(fm1, fm2)
    assert validate(p, 6).ok
    r1 = free_product_restrict(p, 1)
    assert validate(r1, 6).ok
    assert r1.language.equivalent(fm1.language)

    z1 = z2_letters()
    pm = free_product_monoids(z1, rename_letters(z1, {"a": "x"}), "e")
    assert validate(pm, 6).ok
    assert word_equal(pm, "e a a", "e")
    q1 = free_product_monoids_restrict(pm, 1)
    assert q1.language.equivalent(z1.language)
    spent(t0, 30)


def test_08_direct_products():
    t0 = time.perf_counter()
    z1 = z2_letters()
    dp = direct_product_monoids(
        z1, rename_letters(z1, {"e": "E", "a": "A"}), "e", "E")
    assert validate(dp, 6).ok

    dfi = direct_product_finite_infinite(
        cyclic_group(2), builtin_structure("free_monogenic"))
    rep = validate(dfi, 6)
    assert rep.ok, rep.violations[:3]

    # a null semigroup fails the square-surjectivity hypothesis
    with pytest.raises(StructureError):
        direct_product_finite_infinite(
            null_semigroup(3), builtin_structure("free_monogenic"))
    spent(t0, 20)


def test_09_rees_matrix_round_trip():
    t0 = time.perf_counter()
    u = z2_monoid()
    u1 = adjoin_identity(u)
    v = finite_structure(FiniteModel(u1), {"u0": 0, "u1": 1})
    p = [[0, 0], [0, 0]]
    dec = derive_rees_decomposition(v, u, p)
    s1 = rees_matrix_build(v, dec, 2, 2, p, complement=[2], u=u)
    rep = validate(s1, 6)
    assert rep.ok, rep.violations[:3]

    back = rees_matrix_converse(s1)
    assert validate(back, 6).ok
    names = {back.model.name(back.genmap.evaluate(w))
             for w in back.language.enumerate_words(4)}
    assert names == {"0", "1", "1'"}
    spent(t0, 30)


def test_10_rees_index_up_down_round_trip():
    # a^5 = a^3: the ideal {a^3, a^4} is a group, the complement {a, a^2}
    # has index two
    t0 = time.perf_counter()

    def red(n):
        while n > 4:
            n -= 2
        return n

    table = tuple(tuple(red(i + j + 2) - 1 for j in range(4))
                  for i in range(4))
    S = FiniteSemigroup(("a1", "a2", "a3", "a4"), table)
    t = finite_structure(FiniteModel(S), {"x": 2})
    up = rees_index_up(t, complement_from_finite(S, [2, 3]))
    assert validate(up, 6).ok
    assert word_equal(up, "a1 a1", "a2")
    assert word_equal(up, "a2 a2", "x x")

    member = lambda w: up.genmap.evaluate(w)[0] == "base"
    assert block_size_for(up, member, 4) == 2
    down = rees_index_down(up, member, 2)
    assert validate(down, 6).ok

    # expanding the block letters recovers exactly the ideal's language
    def expand(bi):
        name = down.alphabet.names[bi]
        return tuple(up.alphabet.names.index(part)
                     for part in name.split(":", 1)[1].split("."))

    flat = down.language.map_letters(up.alphabet, expand)
    lifted = t.language.rename(
        up.alphabet,
        {i: up.alphabet.names.index(n)
         for i, n in enumerate(t.alphabet.names)})
    assert flat.equivalent(lifted)
    spent(t0, 20)


def test_11_wreath_product_finite_top():
    # pairs of integers twisted by the two-element monoid acting on the
    # coordinates; the bulk of the budget is the letter relations
    t0 = time.perf_counter()
    zz = builtin_structure("int_z")
    sq = direct_product_monoids(
        zz, rename_letters(zz, {"o": "O", "p": "P", "m": "M"}), "o", "O")
    sPow = strip_length_one(sq)
    top = z2_monoid()
    dec = right_identity_decomposition(top)
    assert dec is not None
    qi = wreath_action_words(sPow, top, dec, flatten=tuple, unflatten=tuple)
    wr = wreath_finite_T(sPow, top, dec, qi, bottom=IntModel(),
                         flatten=tuple)
    rep = validate(wr, 5)
    assert rep.ok, rep.violations[:3]

    vals = [wr.genmap.evaluate(w) for w in wr.language.enumerate_words(4)]
    assert len(vals) > 5
    assert {v[1] for v in vals} == {0, 1}
    spent(t0, 60)


def test_12_gsm_image_lemmas():
    # language images and relation images through random sequential
    # machines, against a plain walk over every run
    t0 = time.perf_counter()
    rng = random.Random(1206)
    inp = Alphabet(("a", "b"))
    outp = Alphabet(("x", "y"))
    pa = PaddedAlphabet(inp)
    checked = zeta_checked = 0
    while checked < 25:
        n = rng.randint(1, 4)
        edges = frozenset(
            (rng.randrange(n), rng.randrange(2), rng.randrange(n),
             tuple(rng.randrange(2) for _ in range(rng.randint(1, 2))))
            for _ in range(rng.randint(1, 7)))
        terms = (frozenset(s for s in range(n) if rng.random() < 0.5)
                 or frozenset([rng.randrange(n)]))
        g = Gsm(n_states=n, input_alphabet=inp, output_alphabet=outp,
                edges=edges, initial=rng.randrange(n), terminals=terms)
        runs = gsm_runs(g, 6)

        # outputs are never shorter than inputs, so the cut at 6 is exact
        if rng.random() < 0.5:
            x = Fsa.universe(inp)
            member = lambda w: True
        else:
            ws = {tuple(rng.randrange(2) for _ in range(rng.randint(0, 4)))
                  for _ in range(rng.randint(1, 4))}
            x = Fsa.from_words(inp, ws)
            member = lambda w, ws=ws: w in ws
        want = {o for i, o in runs if member(i) and len(o) <= 6}
        assert set(eta(g, x).enumerate_words(6)) == want
        checked += 1

        c = bounded_output_variance(g, 4)
        if c is None:
            continue
        mp = {(tuple(rng.randrange(2) for _ in range(rng.randint(0, 3))),
               tuple(rng.randrange(2) for _ in range(rng.randint(0, 3))))
              for _ in range(rng.randint(1, 4))}
        m = PairRelation.from_pairs(pa, mp)
        outs: dict = {}
        for i, o in runs:
            outs.setdefault(i, set()).add(o)
        want_pairs = {(o1, o2) for i1, i2 in mp
                      for o1 in outs.get(i1, ())
                      for o2 in outs.get(i2, ())}
        assert set(zeta(g, m, c).enumerate_pairs(6)) == want_pairs
        zeta_checked += 1
    assert zeta_checked >= 10
    spent(t0, 20)
