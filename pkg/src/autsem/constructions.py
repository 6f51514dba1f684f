"""Builders that assemble automatic structures for derived semigroups.

Each operation consumes validated structures (plus whatever finite side data
the target semigroup needs) and emits a new AutomaticStructure wired to an
element model that multiplies honestly, so every output can be replayed with
validate() exactly like a hand-built structure.

Multiplier relations are synthesized by explicit case analysis on boundary
letters rather than generic relation algebra; the automata stay small and the
case splits double as documentation of why each relation is exact.  New
generator alphabets use deterministic "kind:index:index" name mangling so
serialized bundles reproduce byte for byte.
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from types import MappingProxyType

from .autostruct import (
    AutomaticStructure,
    StructureError,
    find_word,
    make_structure,
    multiplier_for_word,
    normal_form,
    prefix_automatic_check,
)
from .fsa import Alphabet, Fsa, Word
from .gsm import Gsm, eta, zeta
from .padrel import (
    PaddedAlphabet,
    PairRelation,
    apply,
    bounded_difference,
    conv_pair_shared,
    diagonal,
    embed_relation,
    padded_product,
    preimage_wordmap,
    project,
    times,
    tracked_pairs,
)
from .semigroups import (
    BruckReillyModel,
    DirectProductModel,
    ElementModel,
    FiniteModel,
    FiniteSemigroup,
    FreeProductModel,
    GenMap,
    ReesMatrixModel,
    WreathModel,
    adjoin_identity,
    check_theta_table,
    finitereg_automaton,
    ideal_generated,
    image_closure,
    square_surjective,
    theta_orbit,
)

REP_SEARCH = 12  # default breadth for representative hunts inside builders


# ----------------------------------------------------------------------
# small shared machinery


def _merge_alphabets(*parts: Alphabet) -> Alphabet:
    names = tuple(n for p in parts for n in p.names)
    if len(set(names)) != len(names):
        raise StructureError(
            "generator names collide; rename_letters one input first")
    return Alphabet(names)


def _lift_lang(lang: Fsa, big: Alphabet) -> Fsa:
    lut = {i: big.names.index(n) for i, n in enumerate(lang.alphabet.names)}
    return lang.rename(big, lut)


def _lift_word(w: Word, small: Alphabet, big: Alphabet) -> Word:
    return tuple(big.names.index(small.names[a]) for a in w)


def _ends_with(al: Alphabet, idxs: Iterable[int]) -> Fsa:
    return Fsa.universe(al).concat(Fsa.letters(al, idxs))


def _cat(pa: PaddedAlphabet, *pieces: Fsa) -> PairRelation:
    acc = pieces[0]
    for p in pieces[1:]:
        acc = acc.concat(p)
    return PairRelation(pa, acc.minimize())


def _pair_word(pa: PaddedAlphabet, *steps: tuple[str, str]) -> Fsa:
    def idx(n: str) -> int:
        return pa.pad if n == "$" else pa.base.names.index(n)

    w = tuple(pa.pair(idx(l), idx(r)) for l, r in steps)
    return Fsa.word(pa.alphabet, w)


def _diag_set(pa: PaddedAlphabet, idxs: Iterable[int]) -> Fsa:
    return Fsa.letters(pa.alphabet, [pa.diag(a) for a in idxs])


def _union_rels(pa: PaddedAlphabet, rels: Sequence[PairRelation]) -> PairRelation:
    if not rels:
        return PairRelation.empty(pa)
    acc = rels[0]
    for r in rels[1:]:
        acc = acc.union(r)
    return acc.minimized()


def _letter_preimage(m: Fsa, big: Alphabet, proj: Callable[[int], int]) -> Fsa:
    """Words over big whose letterwise projection m accepts."""
    by_label: dict[int, list[tuple[int, int]]] = {}
    eps: set[tuple[int, int | None, int]] = set()
    for s, lab, d in m.transitions:
        if lab is None:
            eps.add((s, None, d))
        else:
            by_label.setdefault(lab, []).append((s, d))
    trans = set(eps)
    for x in range(len(big)):
        for s, d in by_label.get(proj(x), ()):
            trans.add((s, x, d))
    return Fsa(big, m.n_states, m.initial, m.finals, frozenset(trans))


def _pair_preimage(rel: PairRelation, big_pa: PaddedAlphabet,
                   proj: Callable[[int], int]) -> PairRelation:
    """Pull a relation back through a letterwise projection of the base."""
    pa = rel.pairs

    def pmap(idx: int) -> int:
        l, r = big_pa.sides(idx)
        pl = pa.pad if l == big_pa.pad else proj(l)
        pr = pa.pad if r == big_pa.pad else proj(r)
        return pa.pair(pl, pr)

    return PairRelation(big_pa, _letter_preimage(rel.fsa, big_pa.alphabet, pmap))


def _shrink_lang(lang: Fsa, small: Alphabet) -> Fsa:
    lut = {lang.alphabet.names.index(n): i for i, n in enumerate(small.names)}
    return lang.map_letters(
        small, lambda a: (lut[a],) if a in lut else None).minimize()


def _shrink_word(w: Word, old: Alphabet, small: Alphabet) -> Word:
    return tuple(small.names.index(old.names[a]) for a in w)


def _shrink_relation(rel: PairRelation, small_pa: PaddedAlphabet) -> PairRelation:
    """Drop every arc mentioning a letter outside the smaller base."""
    pa = rel.pairs
    lut = {pa.base.names.index(n): i
           for i, n in enumerate(small_pa.base.names)}
    lut[pa.pad] = small_pa.pad

    def im(idx: int) -> Word | None:
        l, r = pa.sides(idx)
        if l not in lut or r not in lut:
            return None
        return (small_pa.pair(lut[l], lut[r]),)

    return PairRelation(
        small_pa, rel.fsa.map_letters(small_pa.alphabet, im).minimize())


def rename_letters(s: AutomaticStructure,
                   mapping: Mapping[str, str]) -> AutomaticStructure:
    """The same structure with some generator names swapped out.

    Useful before any product of two structures that share letter names.
    """
    old = s.alphabet
    al = Alphabet(tuple(mapping.get(n, n) for n in old.names))
    pa = PaddedAlphabet(al)
    ren = lambda n: mapping.get(n, n)
    return AutomaticStructure(
        genmap=GenMap(al, s.genmap.model, s.genmap.images),
        language=s.language.rename(al),
        multipliers={ren(n): embed_relation(r, pa, ren)
                     for n, r in s.multipliers.items()},
        equality=embed_relation(s.equality, pa, ren),
        gen_reps={ren(n): w for n, w in s.gen_reps.items()},
        unique=s.unique,
        note=s.note,
    )


def _require_unique(*structures: AutomaticStructure) -> None:
    for s in structures:
        if not s.unique:
            raise StructureError(
                "this construction needs unique representatives; "
                "run uniquify first")


def _check_identity_letter(m: AutomaticStructure, e: str) -> int:
    """The letter must name the identity, be its sole representative, and
    stay out of every other representative.  Returns its index."""
    if e not in m.alphabet.names:
        raise StructureError(f"no letter named {e!r}")
    ei = m.alphabet.names.index(e)
    if m.genmap.image(ei) != m.genmap.model.identity:
        raise StructureError(f"{e!r} must name the identity")
    if not m.language.accepts((ei,)):
        raise StructureError(f"the word {e!r} must be a representative")
    others = m.language.difference(Fsa.word(m.alphabet, (ei,)))
    mentions = Fsa.universe(m.alphabet).concat(
        Fsa.letters(m.alphabet, [ei])).concat(Fsa.universe(m.alphabet))
    if not (others & mentions).is_empty():
        raise StructureError(
            f"representatives other than {e!r} may not mention it")
    return ei


# ----------------------------------------------------------------------
# free products


def _syllable_tags(p: AutomaticStructure) -> dict[str, int] | None:
    """Per-letter factor tags read off a free-product genmap, else None."""
    model = p.genmap.model
    if not isinstance(model, FreeProductModel):
        return None
    tags: dict[str, int] = {}
    for name, img in zip(p.alphabet.names, p.genmap.images):
        if img == ():
            tags[name] = -1  # the shared identity letter
        elif (isinstance(img, tuple) and len(img) == 1
              and isinstance(img[0], tuple) and len(img[0]) == 2):
            tags[name] = img[0][0]
        else:
            raise StructureError(f"letter {name!r} carries no factor tag")
    return tags


def free_product_semigroups(s1: AutomaticStructure,
                            s2: AutomaticStructure) -> AutomaticStructure:
    """Structure for the free product of two semigroups.

    Representatives are alternating blocks, one language word per block.
    Right multiplication by a generator either extends the final block of
    the same factor (that factor's own letter relation does the work) or
    opens a fresh block holding the generator's representative.
    """
    _require_unique(s1, s2)
    a = _merge_alphabets(s1.alphabet, s2.alphabet)
    pa = PaddedAlphabet(a)
    model = FreeProductModel((s1.genmap.model, s2.genmap.model))
    n1 = len(s1.alphabet)
    images = tuple(model.embed(0, e) for e in s1.genmap.images) + \
        tuple(model.embed(1, e) for e in s2.genmap.images)
    genmap = GenMap(a, model, images)

    l1 = _lift_lang(s1.language, a)
    l2 = _lift_lang(s2.language, a)
    eps = Fsa.epsilon(a)
    lang = ((l1 | eps).concat(l2.concat(l1).star()).concat(l2 | eps)
            .difference(eps).minimize())

    side_idxs = (range(n1), range(n1, len(a)))
    ends = tuple(lang & _ends_with(a, idxs) for idxs in side_idxs)

    mults: dict[str, PairRelation] = {}
    reps: dict[str, Word] = {}
    for fi, src in ((0, s1), (1, s2)):
        other_end = ends[1 - fi]
        prefix = eps | other_end
        for name in src.alphabet.names:
            k = embed_relation(src.multipliers[name], pa)
            rep = _lift_word(src.gen_reps[name], src.alphabet, a)
            extend = _cat(pa, diagonal(pa, prefix).fsa, k.fsa)
            append = _cat(pa, diagonal(pa, other_end).fsa,
                          times(pa, eps, Fsa.word(a, rep)).fsa)
            mults[name] = extend.union(append).minimized()
            reps[name] = rep

    return make_structure(genmap, lang, mults, gen_reps=reps)


def free_product_restrict(p: AutomaticStructure,
                          factor: int) -> AutomaticStructure:
    """Recover one factor of a free product of semigroups.

    Keeps that factor's letters, the language words spelled entirely with
    them, and the matching slices of every relation.  Already-restricted
    structures pass through unchanged.
    """
    if factor not in (1, 2):
        raise ValueError("factor must be 1 or 2")
    tags = _syllable_tags(p)
    if tags is None:
        return p
    fi = factor - 1
    names = [n for n in p.alphabet.names if tags[n] == fi]
    if not names:
        raise StructureError("that factor has no letters to restrict to")
    small = Alphabet(tuple(names))
    spa = PaddedAlphabet(small)
    keep = Fsa.letters(p.alphabet,
                       [p.alphabet.names.index(n) for n in names]).plus()
    lang = _shrink_lang(p.language & keep, small)
    if lang.is_empty():
        raise StructureError("the restriction has an empty language")
    model = p.genmap.model.factors[fi]
    images = tuple(p.genmap.image(p.alphabet.names.index(n))[0][1]
                   for n in names)
    return make_structure(
        GenMap(small, model, images),
        lang,
        {n: _shrink_relation(p.multipliers[n], spa) for n in names},
        gen_reps={n: _shrink_word(p.gen_reps[n], p.alphabet, small)
                  for n in names},
    )


def free_product_monoids(m1: AutomaticStructure, m2: AutomaticStructure,
                         e: str) -> AutomaticStructure:
    """Structure for the free product of two monoids sharing the letter e.

    Both inputs must spell their identity as the single letter e and keep e
    out of every other representative.  The identity keeps the word e; every
    other element is an alternating sequence of non-identity blocks.
    Besides extending or opening blocks as in the semigroup case, a
    generator can now cancel the final block outright, so each letter
    relation carries block-erasing branches (rewriting to e when nothing
    remains).
    """
    _require_unique(m1, m2)
    for m in (m1, m2):
        _check_identity_letter(m, e)

    n1 = [n for n in m1.alphabet.names if n != e]
    n2 = [n for n in m2.alphabet.names if n != e]
    if set(n1) & set(n2):
        raise StructureError(
            "generator names collide; rename_letters one input first")
    a = Alphabet((e, *n1, *n2))
    pa = PaddedAlphabet(a)
    model = FreeProductModel((m1.genmap.model, m2.genmap.model), monoid=True)

    def img(src: AutomaticStructure, fi: int, name: str):
        return model.embed(fi, src.genmap.image(src.alphabet.names.index(name)))

    images = ((),) + tuple(img(m1, 0, n) for n in n1) + \
        tuple(img(m2, 1, n) for n in n2)
    genmap = GenMap(a, model, images)

    def bar_lang(src: AutomaticStructure) -> Fsa:
        ei = src.alphabet.names.index(e)
        return _lift_lang(
            src.language.difference(Fsa.word(src.alphabet, (ei,))), a)

    b1, b2 = bar_lang(m1), bar_lang(m2)
    eps = Fsa.epsilon(a)
    ew = Fsa.word(a, (0,))
    blocks = ((b1 | eps).concat(b2.concat(b1).star()).concat(b2 | eps)
              .difference(eps))
    lang = (ew | blocks).minimize()

    side_names = (n1, n2)
    sources = (m1, m2)
    mults: dict[str, PairRelation] = {e: diagonal(pa, lang)}
    reps: dict[str, Word | str] = {e: e}
    for fi in (0, 1):
        src = sources[fi]
        ei = src.alphabet.names.index(e)
        spa = src.pairs
        sbar = src.language.difference(Fsa.word(src.alphabet, (ei,)))
        # words whose last block belongs to the other factor
        ends2 = lang & _ends_with(a, [a.names.index(n)
                                      for n in side_names[1 - fi]])
        for name in side_names[fi]:
            el = src.genmap.image(src.alphabet.names.index(name))
            u_hat = _lift_word(src.gen_reps[name], src.alphabet, a)
            if el == src.genmap.model.identity:
                mults[name] = diagonal(pa, lang)
                reps[name] = e
                continue
            k = src.multipliers[name]
            inner = k.intersect(times(spa, sbar, sbar))
            cancel = _lift_lang(project(
                k.intersect(times(spa, sbar, Fsa.word(src.alphabet, (ei,)))),
                0), a)
            u_word = Fsa.word(a, u_hat)
            pieces = [
                times(pa, ew, u_word),
                _cat(pa, diagonal(pa, eps | ends2).fsa,
                     embed_relation(inner, pa).fsa),
                _cat(pa, diagonal(pa, ends2).fsa,
                     times(pa, cancel, eps).fsa),
                times(pa, cancel, ew),
                _cat(pa, diagonal(pa, ends2).fsa, times(pa, eps, u_word).fsa),
            ]
            mults[name] = _union_rels(pa, pieces)
            reps[name] = u_hat
    return make_structure(genmap, lang, mults, gen_reps=reps)


def free_product_monoids_restrict(p: AutomaticStructure,
                                  factor: int) -> AutomaticStructure:
    """Recover one factor of a free product of monoids.

    A representative lies in the factor exactly when it is the identity
    letter alone or that letter followed by a single block of the factor's
    letters, which is a syntactic test on the language.
    """
    if factor not in (1, 2):
        raise ValueError("factor must be 1 or 2")
    tags = _syllable_tags(p)
    if tags is None:
        return p
    if not getattr(p.genmap.model, "monoid", False):
        raise StructureError("expected a free product of monoids")
    e_names = [n for n, t in tags.items() if t == -1]
    if len(e_names) != 1:
        raise StructureError("expected exactly one shared identity letter")
    e = e_names[0]
    fi = factor - 1
    names = [n for n in p.alphabet.names if tags[n] == fi]
    if not names:
        raise StructureError("that factor has no letters to restrict to")
    small = Alphabet((e, *names))
    spa = PaddedAlphabet(small)
    al = p.alphabet
    block = Fsa.word(al, (al.names.index(e),)) | Fsa.letters(
        al, [al.names.index(n) for n in names]).plus()
    lang = _shrink_lang(p.language & block, small)
    model = p.genmap.model.factors[fi]
    images = (model.identity,) + tuple(
        p.genmap.image(al.names.index(n))[0][1] for n in names)
    keep = [e, *names]
    return make_structure(
        GenMap(small, model, images),
        lang,
        {n: _shrink_relation(p.multipliers[n], spa) for n in keep},
        gen_reps={n: _shrink_word(p.gen_reps[n], al, small) for n in keep},
    )


# ----------------------------------------------------------------------
# direct products


def _interleave(alpha: Word, beta: Word, e1: int, e2: int) -> Word:
    n = max(len(alpha), len(beta))
    out: list[int] = []
    for i in range(n):
        out.append(alpha[i] if i < len(alpha) else e1)
        out.append(beta[i] if i < len(beta) else e2)
    return tuple(out)


def direct_product_monoids(m1: AutomaticStructure, m2: AutomaticStructure,
                           e1: str, e2: str) -> AutomaticStructure:
    """Structure for the direct product of two monoids.

    A representative strictly alternates one letter from each side, the
    shorter coordinate padded with its identity letter, so words always have
    even length.  Each letter relation is the corresponding factor relation
    run against a shared second coordinate, then spelled back out through
    the two-letters-per-step transducer.
    """
    _require_unique(m1, m2)
    i1 = _check_identity_letter(m1, e1)
    i2 = _check_identity_letter(m2, e2)
    a = _merge_alphabets(m1.alphabet, m2.alphabet)
    pa = PaddedAlphabet(a)
    e1i, e2i = a.names.index(e1), a.names.index(e2)
    model = DirectProductModel(m1.genmap.model, m2.genmap.model)
    id1 = m1.genmap.model.identity
    id2 = m2.genmap.model.identity
    images = tuple((el, id2) for el in m1.genmap.images) + \
        tuple((id1, el) for el in m2.genmap.images)
    genmap = GenMap(a, model, images)

    l1 = _lift_lang(m1.language, a)
    l2 = _lift_lang(m2.language, a)
    conv = times(pa, l1, l2)

    # one packed pair letter becomes two plain letters, identities fill pads
    def spell(idx: int) -> Word:
        l, r = pa.sides(idx)
        return (e1i if l == pa.pad else l, e2i if r == pa.pad else r)

    lang = conv.fsa.map_letters(a, spell).minimize()

    sigma = Gsm(
        n_states=1,
        input_alphabet=pa.alphabet,
        output_alphabet=a,
        edges=frozenset((0, x, 0, spell(x))
                        for x in range(len(pa.alphabet))),
        initial=0,
        terminals=frozenset([0]),
    )

    mults: dict[str, PairRelation] = {}
    reps: dict[str, Word] = {}
    for fi, src, shared, mylang in ((0, m1, "right", l2), (1, m2, "left", l1)):
        for name in src.alphabet.names:
            k = embed_relation(src.multipliers[name], pa)
            mults[name] = zeta(sigma, conv_pair_shared(k, mylang, shared), 0)
            rep = _lift_word(src.gen_reps[name], src.alphabet, a)
            if fi == 0:
                reps[name] = _interleave(rep, (e2i,), e1i, e2i)
            else:
                reps[name] = _interleave((e1i,), rep, e1i, e2i)
    return make_structure(genmap, lang, mults, gen_reps=reps)


def direct_product_finite_infinite(s: FiniteSemigroup,
                                   t: AutomaticStructure) -> AutomaticStructure:
    """Structure for (finite S) x T when every element of S is a product.

    Letters are pairs; the second coordinates must spell a representative of
    T while the first coordinates run free, their product tracked letter by
    letter.  Representatives are not unique (many first-coordinate spellings
    share a product), so the equality relation genuinely works here.
    """
    if not square_surjective(s):
        raise StructureError(
            "every element of the finite factor must be a product of two")
    b = t.alphabet
    names = tuple(f"{s.names[u]}:{bn}" for u in range(s.size) for bn in b.names)
    x = Alphabet(names)
    pa = PaddedAlphabet(x)
    nb = len(b)

    def u_of(idx: int) -> int:
        return idx // nb

    def b_of(idx: int) -> int:
        return idx % nb

    model = DirectProductModel(FiniteModel(s), t.genmap.model)
    images = tuple((u_of(i), t.genmap.image(b_of(i))) for i in range(len(x)))
    genmap = GenMap(x, model, images)

    lang = _letter_preimage(t.language.dfa, x, b_of).minimize()
    free = Fsa.nonempty_universe(x)

    def tracked(accept: Callable) -> PairRelation:
        return tracked_pairs(
            pa, free, free,
            elem_of=u_of,
            mul=lambda p, q: s.table[p][q],
            accept=accept)

    mults: dict[str, PairRelation] = {}
    reps: dict[str, Word] = {}
    for u in range(s.size):
        for bi, bn in enumerate(b.names):
            name = names[u * nb + bi]
            lifted = _pair_preimage(t.multipliers[bn], pa, b_of)
            mults[name] = lifted.intersect(tracked(
                lambda p, q, uu=u: p is not None and q is not None
                and s.table[p][uu] == q)).minimized()
            beta = t.gen_reps[bn]
            reps[name] = _pair_rep(s, u, beta, nb)
    equality = _pair_preimage(t.equality, pa, b_of).intersect(
        tracked(lambda p, q: p is not None and p == q)).minimized()
    return make_structure(genmap, lang, mults,
                          equality=equality, unique=False, gen_reps=reps)


def _pair_rep(s: FiniteSemigroup, u: int, beta: Word, nb: int) -> Word:
    """Spell (u, value of beta) as pair letters: factor u across len(beta)."""
    m = len(beta)
    if m == 1:
        return (u * nb + beta[0],)
    for seq in itertools.product(range(s.size), repeat=m):
        acc = seq[0]
        for q in seq[1:]:
            acc = s.table[acc][q]
        if acc == u:
            return tuple(p * nb + bl for p, bl in zip(seq, beta))
    raise StructureError(
        f"element {s.names[u]!r} admits no factorization of length {m}")


def direct_product_pairing(s: AutomaticStructure, t: AutomaticStructure,
                           max_len: int = 5) -> AutomaticStructure:
    """Structure for S x T when equal-length representatives always pair up.

    Both coordinates are constrained: the first letters must spell a word of
    S's language, the second a word of T's.  That only covers every element
    when each (element, element) pair admits representatives of one common
    length, which is checked outright on the enumerated universe first.
    """
    by_len_s = _lengths_by_element(s, max_len)
    by_len_t = _lengths_by_element(t, max_len)
    for (es, ls), (et, lt) in itertools.product(by_len_s.items(),
                                                by_len_t.items()):
        if not ls & lt:
            raise StructureError(
                "no equal-length representatives for "
                f"({s.model.name(es)}, {t.model.name(et)}) within {max_len}")

    a, b = s.alphabet, t.alphabet
    nb = len(b)
    x = Alphabet(tuple(f"{an}:{bn}" for an in a.names for bn in b.names))
    pa = PaddedAlphabet(x)

    def a_of(idx: int) -> int:
        return idx // nb

    def b_of(idx: int) -> int:
        return idx % nb

    model = DirectProductModel(s.genmap.model, t.genmap.model)
    images = tuple((s.genmap.image(a_of(i)), t.genmap.image(b_of(i)))
                   for i in range(len(x)))
    genmap = GenMap(x, model, images)
    lang = (_letter_preimage(s.language.dfa, x, a_of)
            & _letter_preimage(t.language.dfa, x, b_of)).minimize()

    words_s = _words_by_element(s, max_len)
    words_t = _words_by_element(t, max_len)
    mults: dict[str, PairRelation] = {}
    reps: dict[str, Word] = {}
    for i, name in enumerate(x.names):
        ai, bi = a_of(i), b_of(i)
        mults[name] = (_pair_preimage(s.multipliers[a.names[ai]], pa, a_of)
                       .intersect(_pair_preimage(
                           t.multipliers[b.names[bi]], pa, b_of))
                       .minimized())
        ws = words_s.get(s.genmap.image(ai))
        wt = words_t.get(t.genmap.image(bi))
        if ws is None or wt is None:
            raise StructureError(
                f"no representative for a coordinate of {name!r} "
                f"within {max_len}")
        reps[name] = _common_length_rep(ws, wt, nb)
    equality = (_pair_preimage(s.equality, pa, a_of)
                .intersect(_pair_preimage(t.equality, pa, b_of)).minimized())
    unique = s.unique and t.unique
    return make_structure(genmap, lang, mults, equality=equality,
                          unique=unique, gen_reps=reps)


def _lengths_by_element(s: AutomaticStructure, max_len: int) -> dict:
    out: dict = {}
    for w in s.language.enumerate_words(max_len):
        out.setdefault(s.genmap.evaluate(w), set()).add(len(w))
    return out


def _words_by_element(s: AutomaticStructure, max_len: int) -> dict:
    out: dict = {}
    for w in s.language.enumerate_words(max_len):
        out.setdefault(s.genmap.evaluate(w), []).append(w)
    return out


def _common_length_rep(ws: list[Word], wt: list[Word], nb: int) -> Word:
    for a in ws:
        for bw in wt:
            if len(a) == len(bw):
                return tuple(x * nb + y for x, y in zip(a, bw))
    raise StructureError("generators lack equal-length representatives")


# ----------------------------------------------------------------------
# Bruck-Reilly extensions


def _br_alphabet(inner: Sequence[str]) -> Alphabet:
    if "b" in inner or "c" in inner:
        raise StructureError(
            'the base structure may not use letters "b" or "c"; '
            "rename_letters first")
    return Alphabet(("b", "c", *inner))


def bruck_reilly_finite(t: FiniteSemigroup,
                        theta: Sequence[int]) -> AutomaticStructure:
    """Structure for the Bruck-Reilly extension of a finite monoid.

    Representatives read c^m, one letter naming the inner element, then b^n.
    The letter relations are finite unions over the inner elements; the
    relation for an inner letter splits along the eventually periodic orbit
    of that element under the endomorphism.
    """
    if t.identity is None:
        raise StructureError("the base must be a monoid")
    tab = check_theta_table(t, theta)
    a = _br_alphabet(tuple(f"t:{n}" for n in t.names))
    pa = PaddedAlphabet(a)
    model = BruckReillyModel(FiniteModel(t), lambda x: tab[x])
    images = ((0, t.identity, 1), (1, t.identity, 0)) + tuple(
        (0, i, 0) for i in range(t.size))
    genmap = GenMap(a, model, images)

    def tl(i: int) -> int:
        return 2 + i

    cc = _diag_set(pa, [1]).star()
    bb = _diag_set(pa, [0])
    inner_diag = _diag_set(pa, range(2, len(a)))
    lang = (Fsa.letters(a, [1]).star()
            .concat(Fsa.letters(a, range(2, len(a))))
            .concat(Fsa.letters(a, [0]).star()).minimize())

    mults: dict[str, PairRelation] = {}
    mults["b"] = _cat(pa, cc, inner_diag, bb.star(),
                      _pair_word(pa, ("$", "b")))
    drop_b = _cat(pa, cc, inner_diag, bb.star(), _pair_word(pa, ("b", "$")))
    swap = [_cat(pa, cc,
                 Fsa.word(pa.alphabet, (pa.pair(tl(i), 1),)),
                 _pair_word(pa, ("$", f"t:{t.names[tab[i]]}")))
            for i in range(t.size)]
    mults["c"] = _union_rels(pa, swap + [drop_b])

    for i in range(t.size):
        j, k = theta_orbit(i, tab)
        pieces: list[PairRelation] = []
        for n in range(j):
            pieces.append(_cat(pa, cc, _exact_swaps(pa, t, tab, tl, i, n),
                               _bb_power(pa, n)))
        cycle = _bb_power(pa, k + 1 - j).star()
        for n in range(j, k + 1):
            pieces.append(_cat(pa, cc, _exact_swaps(pa, t, tab, tl, i, n),
                               _bb_power(pa, n).concat(cycle)))
        mults[f"t:{t.names[i]}"] = _union_rels(pa, pieces)

    one = t.identity
    reps: dict[str, Word] = {"b": (tl(one), 0), "c": (1, tl(one))}
    for i in range(t.size):
        reps[f"t:{t.names[i]}"] = (tl(i),)
    return make_structure(genmap, lang, mults, gen_reps=reps)


def _bb_power(pa: PaddedAlphabet, n: int) -> Fsa:
    return Fsa.word(pa.alphabet, (pa.diag(0),) * n)


def _product_tight(rel: PairRelation, tail: PairRelation,
                   cap: int) -> PairRelation:
    # padded_product's buffer states grow with the bound, so measure the
    # relation's real length spread instead of passing the cap through.
    d = bounded_difference(rel, cap)
    if d is None:
        raise StructureError(
            f"relation exceeds length-difference bound {cap}")
    return padded_product(rel, tail, d, verify=False)


def _exact_swaps(pa: PaddedAlphabet, t: FiniteSemigroup, tab: Sequence[int],
                 tl: Callable[[int], int], i: int, n: int) -> Fsa:
    """Single pair letters (s, s * theta^n(i)) over the inner letters."""
    x = i
    for _ in range(n):
        x = tab[x]
    return Fsa.letters(
        pa.alphabet,
        [pa.pair(tl(s), tl(t.table[s][x])) for s in range(t.size)])


def _identity_rep(t: AutomaticStructure, rep_len: int) -> Word:
    ident = t.genmap.model.identity
    if ident is None:
        raise StructureError("the base must be a monoid")
    g = find_word(t.genmap, ident, rep_len)
    if g is None:
        raise StructureError(
            "no representative of the identity within the search bound")
    return normal_form(t, g)


def _br_skeleton(t: AutomaticStructure):
    """Alphabet, padded pairs, lifted language and relations shared by the
    Bruck-Reilly builders over an automatic base."""
    _require_unique(t)
    a = _br_alphabet(t.alphabet.names)
    pa = PaddedAlphabet(a)
    k = _lift_lang(t.language, a)
    lifted = {n: embed_relation(t.multipliers[n], pa)
              for n in t.alphabet.names}
    return a, pa, k, lifted


def bruck_reilly_const_one(t: AutomaticStructure,
                           rep_len: int = REP_SEARCH) -> AutomaticStructure:
    """Bruck-Reilly extension where the endomorphism collapses to the identity.

    Words read c^i, a base representative, then b^j.  Multiplying by c with
    no b's present rewrites the whole base word to the identity
    representative, which is the only place a genuinely padded product shows
    up; everything else is plain splicing.
    """
    w_one = _identity_rep(t, rep_len)
    a, pa, k, lifted = _br_skeleton(t)
    ident = t.genmap.model.identity
    model = BruckReillyModel(t.genmap.model, lambda _x: ident)
    images = ((0, ident, 1), (1, ident, 0)) + tuple(
        (0, e, 0) for e in t.genmap.images)
    genmap = GenMap(a, model, images)
    w1 = _lift_word(w_one, t.alphabet, a)

    cs = Fsa.letters(a, [1]).star()
    bs = Fsa.letters(a, [0]).star()
    lang = cs.concat(k).concat(bs).minimize()

    cc = _diag_set(pa, [1]).star()
    bb = _diag_set(pa, [0]).star()
    dk = diagonal(pa, k).fsa

    mults: dict[str, PairRelation] = {}
    mults["b"] = _cat(pa, cc, dk, bb, _pair_word(pa, ("$", "b")))
    drop_b = _cat(pa, cc, dk, bb, _pair_word(pa, ("b", "$")))
    reset = padded_product(
        PairRelation(pa, cc.concat(_pair_word(pa, ("$", "c")))),
        times(pa, k, Fsa.word(a, w1)), 1)
    mults["c"] = drop_b.union(reset).minimized()
    for n in t.alphabet.names:
        absorbed = _cat(pa, cc, dk, _diag_set(pa, [0]).plus())
        acts = _cat(pa, cc, lifted[n].fsa)
        mults[n] = absorbed.union(acts).minimized()

    reps: dict[str, Word] = {"b": w1 + (0,), "c": (1,) + w1}
    for n in t.alphabet.names:
        reps[n] = _lift_word(t.gen_reps[n], t.alphabet, a)
    return make_structure(genmap, lang, mults, gen_reps=reps)


def bruck_reilly_identity(t: AutomaticStructure,
                          rep_len: int = REP_SEARCH) -> AutomaticStructure:
    """Bruck-Reilly extension by the identity endomorphism.

    The base word commutes past the index letters, so representatives read
    c^i b^j then the base word, and all three index moves are padded
    products against a diagonal copy of the base language.
    """
    w_one = _identity_rep(t, rep_len)
    a, pa, k, lifted = _br_skeleton(t)
    model = BruckReillyModel(t.genmap.model, lambda x: x)
    images = ((0, t.genmap.model.identity, 1),
              (1, t.genmap.model.identity, 0)) + tuple(
        (0, e, 0) for e in t.genmap.images)
    genmap = GenMap(a, model, images)
    w1 = _lift_word(w_one, t.alphabet, a)

    lang = (Fsa.letters(a, [1]).star().concat(Fsa.letters(a, [0]).star())
            .concat(k).minimize())

    cc = _diag_set(pa, [1]).star()
    bb = _diag_set(pa, [0]).star()
    dk = diagonal(pa, k)

    def with_k(head: Fsa) -> PairRelation:
        return padded_product(PairRelation(pa, head), dk, 1)

    mults: dict[str, PairRelation] = {}
    mults["b"] = with_k(cc.concat(bb).concat(_pair_word(pa, ("$", "b"))))
    mults["c"] = (with_k(cc.concat(bb).concat(_pair_word(pa, ("b", "$"))))
                  .union(with_k(cc.concat(_pair_word(pa, ("$", "c")))))
                  .minimized())
    for n in t.alphabet.names:
        mults[n] = _cat(pa, cc, bb, lifted[n].fsa)

    reps: dict[str, Word] = {"b": (0,) + w1, "c": (1,) + w1}
    for n in t.alphabet.names:
        reps[n] = _lift_word(t.gen_reps[n], t.alphabet, a)
    return make_structure(genmap, lang, mults, gen_reps=reps)


def bruck_reilly_fgt(t: AutomaticStructure, theta: Callable,
                     *, w_reps: Mapping | None = None,
                     rep_len: int = REP_SEARCH, diff_cap: int = 64,
                     closure_cap: int = 10_000) -> AutomaticStructure:
    """Bruck-Reilly extension by an endomorphism with finite image.

    The finite image makes two things regular: which base words map to each
    image element (a finite-state fact about the twisted generator map), and
    how far multiplication by any image element can stretch a representative
    (certified while composing the letter relations).  Both are exercised
    per image element below.
    """
    _require_unique(t)
    ident = t.genmap.model.identity
    if ident is None:
        raise StructureError("the base must be a monoid")
    if theta(ident) != ident:
        raise StructureError("the map must fix the identity")
    twisted = GenMap(t.alphabet, t.genmap.model,
                     tuple(theta(e) for e in t.genmap.images))
    for x, y in itertools.product(t.genmap.images, repeat=2):
        if theta(t.genmap.model.mul(x, y)) != \
                t.genmap.model.mul(theta(x), theta(y)):
            raise StructureError("the map is not an endomorphism")
    try:
        image_elems, _ = image_closure(twisted, closure_cap)
    except ValueError:
        raise StructureError(
            "the twisted generator map has no small finite image") from None
    image_elems = list(dict.fromkeys(image_elems + [theta(ident)]))

    w_one = _identity_rep(t, rep_len)
    a, pa, k, lifted = _br_skeleton(t)
    model = BruckReillyModel(t.genmap.model, theta)
    images = ((0, ident, 1), (1, ident, 0)) + tuple(
        (0, e, 0) for e in t.genmap.images)
    genmap = GenMap(a, model, images)

    cs = Fsa.letters(a, [1]).star()
    bs = Fsa.letters(a, [0]).star()
    lang = cs.concat(k).concat(bs).minimize()

    cc = _diag_set(pa, [1]).star()
    bb = _diag_set(pa, [0]).star()
    dk = diagonal(pa, k).fsa

    def rep_of(elem) -> Word:
        if w_reps is not None and elem in w_reps:
            w = w_reps[elem]
            return t.alphabet.word(w) if isinstance(w, str) else tuple(w)
        g = find_word(t.genmap, elem, rep_len)
        if g is None:
            raise StructureError(
                f"no representative found for {t.model.name(elem)}")
        return normal_form(t, g)

    def k_for(elem) -> PairRelation:
        return embed_relation(
            multiplier_for_word(t, rep_of(elem), cap=diff_cap), pa)

    mults: dict[str, PairRelation] = {}
    mults["b"] = _cat(pa, cc, dk, bb, _pair_word(pa, ("$", "b")))
    drop_b = _cat(pa, cc, dk, _diag_set(pa, [0]).star(),
                  _pair_word(pa, ("b", "$")))
    resets: list[PairRelation] = []
    head = PairRelation(pa, cc.concat(_pair_word(pa, ("$", "c"))))
    for elem in image_elems:
        sources = _lift_lang(
            finitereg_automaton(twisted, elem, closure_cap), a) & k
        if sources.is_empty():
            continue
        target = _lift_word(rep_of(elem), t.alphabet, a)
        resets.append(padded_product(
            head, times(pa, sources, Fsa.word(a, target)), 1))
    mults["c"] = _union_rels(pa, [drop_b] + resets)

    for name in t.alphabet.names:
        el = t.genmap.image(t.alphabet.names.index(name))
        j, kk = theta_orbit(el, theta)
        pieces: list[PairRelation] = []
        x = el
        for n in range(j):
            rel = lifted[name] if n == 0 else k_for(x)
            pieces.append(PairRelation(
                pa, cc.concat(_product_tight(
                    rel, PairRelation(pa, _bb_power(pa, n)),
                    diff_cap).fsa)))
            x = theta(x)
        cycle = _bb_power(pa, kk + 1 - j).star()
        for n in range(j, kk + 1):
            rel = lifted[name] if n == 0 else k_for(x)
            tail = PairRelation(pa, _bb_power(pa, n).concat(cycle))
            pieces.append(PairRelation(
                pa, cc.concat(_product_tight(rel, tail, diff_cap).fsa)))
            x = theta(x)
        mults[name] = _union_rels(pa, pieces)

    w1 = _lift_word(w_one, t.alphabet, a)
    reps: dict[str, Word] = {"b": w1 + (0,), "c": (1,) + w1}
    for n in t.alphabet.names:
        reps[n] = _lift_word(t.gen_reps[n], t.alphabet, a)
    return make_structure(genmap, lang, mults, gen_reps=reps)


# ----------------------------------------------------------------------
# Rees matrix semigroups


@dataclass(frozen=True)
class ReesDecomposition:
    """Per-generator factorizations through a sandwich matrix entry.

    entries maps each generator name of the inner structure to
    (s, row, col, s2): the generator's element equals s * p[row][col] * s2
    with s and s2 drawn from the coefficient monoid.
    """

    entries: Mapping[str, tuple[int, int, int, int]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries",
                           MappingProxyType(dict(self.entries)))

    def check(self, v: AutomaticStructure, u1: FiniteSemigroup,
              p: Sequence[Sequence[int]]) -> None:
        for name in v.alphabet.names:
            if name not in self.entries:
                raise StructureError(f"no factorization for {name!r}")
            s, row, col, s2 = self.entries[name]
            got = u1.table[u1.table[s][p[row][col]]][s2]
            want = v.genmap.image(v.alphabet.names.index(name))
            if got != want:
                raise StructureError(
                    f"factorization of {name!r} multiplies out to "
                    f"{u1.names[got]!r}, not {u1.names[want]!r}")


def derive_rees_decomposition(v: AutomaticStructure, u: FiniteSemigroup,
                              p: Sequence[Sequence[int]]) -> ReesDecomposition:
    """Search the (finite) coefficient monoid for valid factorizations."""
    u1 = _adjoined(u)
    n_j, n_i = len(p), len(p[0])
    entries: dict[str, tuple[int, int, int, int]] = {}
    for name in v.alphabet.names:
        want = v.genmap.image(v.alphabet.names.index(name))
        found = next(
            ((s, row, col, s2)
             for s in range(u1.size) for row in range(n_j)
             for col in range(n_i) for s2 in range(u1.size)
             if u1.table[u1.table[s][p[row][col]]][s2] == want), None)
        if found is None:
            raise StructureError(f"{name!r} does not factor through the matrix")
        entries[name] = found
    return ReesDecomposition(entries)


def _adjoined(u: FiniteSemigroup) -> FiniteSemigroup:
    return adjoin_identity(u)


def rees_matrix_build(v: AutomaticStructure, dec: ReesDecomposition | None,
                      n_i: int, n_j: int, p: Sequence[Sequence[int]],
                      complement: Sequence[int], *, u: FiniteSemigroup,
                      rep_len: int = REP_SEARCH,
                      diff_cap: int = 64) -> AutomaticStructure:
    """Structure for a Rees matrix semigroup over the coefficient monoid.

    v must be a structure for the ideal generated by the matrix entries,
    its generator images factored through matrix entries by dec (derived by
    search when dec is None).  complement lists the coefficient elements
    outside that ideal; each becomes a standalone one-letter representative.

    A representative of (row, s, col) spells s's factorization: an opening
    letter carrying the row, chain letters carrying consecutive generator
    pairs, and a closing letter carrying the column.  The middle rides on
    v's letter relations, transported through the spelling transducer.
    """
    _require_unique(v)
    u1 = _adjoined(u)
    if len(p) != n_j or any(len(row) != n_i for row in p):
        raise StructureError("matrix shape disagrees with the index counts")
    model = ReesMatrixModel(u, p)
    if dec is None:
        dec = derive_rees_decomposition(v, u, p)
    dec.check(v, u1, p)
    ideal = ideal_generated(u1, {p[r][l] for r in range(n_j)
                                 for l in range(n_i)})
    comp = list(complement)
    if set(comp) & ideal or set(comp) | ideal != set(range(u1.size)):
        raise StructureError(
            "the complement must list exactly the elements outside "
            "the ideal of the matrix entries")
    for name in v.alphabet.names:
        if v.genmap.image(v.alphabet.names.index(name)) not in ideal:
            raise StructureError(f"{name!r} lies outside the matrix ideal")

    gnames = v.alphabet.names
    s_of = {n: dec.entries[n][0] for n in gnames}
    rho = {n: dec.entries[n][1] for n in gnames}
    lam = {n: dec.entries[n][2] for n in gnames}
    s2_of = {n: dec.entries[n][3] for n in gnames}

    c_name = lambda l, h: f"c:{l}:{h}"
    d_name = lambda h, h2: f"d:{h}:{h2}"
    e_name = lambda h, r: f"e:{h}:{r}"
    f_name = lambda l, xx, r: f"f:{l}:{u1.names[xx]}:{r}"
    names: list[str] = []
    images: list[tuple[int, int, int]] = []
    for l in range(n_i):
        for h in gnames:
            names.append(c_name(l, h))
            images.append((l, s_of[h], rho[h]))
    for h in gnames:
        for h2 in gnames:
            names.append(d_name(h, h2))
            images.append((lam[h], u1.table[s2_of[h]][s_of[h2]], rho[h2]))
    for h in gnames:
        for r in range(n_j):
            names.append(e_name(h, r))
            images.append((lam[h], s2_of[h], r))
    for l in range(n_i):
        for xx in comp:
            for r in range(n_j):
                names.append(f_name(l, xx, r))
                images.append((l, xx, r))
    a = Alphabet(tuple(names))
    pa = PaddedAlphabet(a)
    genmap = GenMap(a, model, tuple(images))
    aidx = {n: i for i, n in enumerate(a.names)}

    # spell a middle word: opening letter, chain letters, closing letter
    n_states = 2 + len(gnames)
    mid = {h: 2 + i for i, h in enumerate(gnames)}
    edges: set = set()
    for hi, h in enumerate(gnames):
        for l in range(n_i):
            edges.add((0, hi, mid[h], (aidx[c_name(l, h)],)))
            for r in range(n_j):
                edges.add((0, hi, 1,
                           (aidx[c_name(l, h)], aidx[e_name(h, r)])))
        for h2i, h2 in enumerate(gnames):
            edges.add((mid[h], h2i, mid[h2], (aidx[d_name(h, h2)],)))
            for r in range(n_j):
                edges.add((mid[h], h2i, 1,
                           (aidx[d_name(h, h2)], aidx[e_name(h2, r)])))
    speller = Gsm(n_states=n_states, input_alphabet=v.alphabet,
                  output_alphabet=a, edges=frozenset(edges), initial=0,
                  terminals=frozenset([1]))

    l1 = eta(speller, v.language).minimize()
    d_letters = [aidx[f_name(l, xx, r)]
                 for l in range(n_i) for xx in comp for r in range(n_j)]
    lang = (l1 | Fsa.letters(a, d_letters)).minimize()

    vset = ideal
    rep_cache: dict[int, Word] = {}

    def inner_rep(z: int) -> Word:
        if z not in rep_cache:
            g = find_word(v.genmap, z, rep_len)
            if g is None:
                raise StructureError(
                    f"no inner representative for {u1.names[z]!r}")
            rep_cache[z] = normal_form(v, g)
        return rep_cache[z]

    def spell_word(gamma: Word, l: int, r: int) -> Word:
        out = [aidx[c_name(l, gnames[gamma[0]])]]
        for x, y in zip(gamma, gamma[1:]):
            out.append(aidx[d_name(gnames[x], gnames[y])])
        out.append(aidx[e_name(gnames[gamma[-1]], r)])
        return tuple(out)

    def rep_word(l: int, z: int, r: int) -> Word:
        if z in vset:
            return spell_word(inner_rep(z), l, r)
        return (aidx[f_name(l, z, r)],)

    first_sync = Fsa.letters(pa.alphabet, [
        pa.pair(aidx[c_name(l, h)], aidx[c_name(l, h2)])
        for l in range(n_i) for h in gnames for h2 in gnames
    ]).concat(Fsa.universe(pa.alphabet))
    ends_e = [
        _ends_with(a, [aidx[e_name(h, r)] for h in gnames])
        for r in range(n_j)
    ]

    mults: dict[str, PairRelation] = {}
    reps: dict[str, Word] = {}
    for gi, gname in enumerate(a.names):
        l2, y, r2 = images[gi]
        pieces: list[PairRelation] = []
        for r in range(n_j):
            z = u1.table[p[r][l2]][y]
            km = multiplier_for_word(v, inner_rep(z), cap=diff_cap)
            pieces.append(
                zeta(speller, km, 1)
                .intersect(PairRelation(pa, first_sync))
                .intersect(times(pa, ends_e[r], ends_e[r2])))
        finite_pairs = []
        for l in range(n_i):
            for xx in comp:
                for r in range(n_j):
                    z = u1.table[u1.table[xx][p[r][l2]]][y]
                    finite_pairs.append(
                        ((aidx[f_name(l, xx, r)],), rep_word(l, z, r2)))
        if finite_pairs:
            pieces.append(PairRelation.from_pairs(pa, finite_pairs))
        mults[gname] = _union_rels(pa, pieces)
        reps[gname] = rep_word(l2, y, r2)
    return make_structure(genmap, lang, mults, gen_reps=reps)


def _rees_model_of(s: AutomaticStructure) -> ReesMatrixModel:
    model = s.genmap.model
    if not isinstance(model, ReesMatrixModel):
        raise StructureError(
            "expected a structure whose generators carry index triples")
    return model


def _converse_skeleton(s: AutomaticStructure, p_position: tuple[int, int]):
    """Shared setup: outer-index language slice, spelling machine, image."""
    _require_unique(s)
    model = _rees_model_of(s)
    j0, i0 = p_position
    if not (0 <= j0 < model.n_j and 0 <= i0 < model.n_i):
        raise StructureError("matrix position out of range")
    al = s.alphabet
    triples = [s.genmap.image(i) for i in range(len(al))]
    first = [i for i, tr in enumerate(triples) if tr[0] == i0]
    last = [i for i, tr in enumerate(triples) if tr[2] == j0]
    l11 = (s.language
           & Fsa.letters(al, first).concat(Fsa.universe(al))
           & _ends_with(al, last)).minimize()

    b_name = lambda n: f"b:{n}"
    c_name = lambda j, i: f"c:{j}:{i}"
    names = tuple(b_name(n) for n in al.names) + tuple(
        c_name(j, i) for j in range(model.n_j) for i in range(model.n_i))
    b = Alphabet(names)
    bidx = {n: i for i, n in enumerate(names)}

    edges: set = set()
    for li, tr in enumerate(triples):
        edges.add((0, li, 1 + tr[2], (bidx[b_name(al.names[li])],)))
        for j in range(model.n_j):
            edges.add((1 + j, li, 1 + tr[2],
                       (bidx[c_name(j, tr[0])], bidx[b_name(al.names[li])])))
    speller = Gsm(n_states=1 + model.n_j, input_alphabet=al,
                  output_alphabet=b, edges=frozenset(edges), initial=0,
                  terminals=frozenset(range(1, 1 + model.n_j)))
    k = eta(speller, l11).minimize()

    values = tuple(tr[1] for tr in triples) + tuple(
        model.p[j][i] for j in range(model.n_j) for i in range(model.n_i))
    return model, j0, i0, l11, b, speller, k, values


def _converse_reps(s: AutomaticStructure, speller: Gsm, values, j0: int,
                   i0: int, rep_len: int) -> dict[str, Word]:
    reps: dict[str, Word] = {}
    for name, z in zip(speller.output_alphabet.names, values):
        g = find_word(s.genmap, (i0, z, j0), rep_len)
        if g is None:
            raise StructureError(
                f"no representative reaches the element behind {name!r}")
        run = eta(speller, Fsa.word(s.alphabet, normal_form(s, g)))
        w = run.shortlex_least()
        if w is None:
            raise StructureError(f"spelling failed for {name!r}")
        reps[name] = w
    return reps


def rees_matrix_converse(s1: AutomaticStructure,
                         p_position: tuple[int, int] = (0, 0), *,
                         rep_len: int = REP_SEARCH,
                         diff_cap: int = 64) -> AutomaticStructure:
    """Recover the coefficient monoid from a Rees matrix structure.

    Fixing one row and one column slices out the words whose middles walk
    the whole monoid (checked against the chosen matrix entry first); the
    spelling machine interleaves matrix-entry letters so the middle product
    reads off letter by letter.  Letter relations come from transporting a
    single multiplication inside the input structure.
    """
    model, j0, i0, l11, b, speller, k, values = _converse_skeleton(
        s1, p_position)
    u1 = model.u1
    pz = model.p[j0][i0]
    reach = {u1.table[pz][x] for x in range(u1.size)}
    if reach != set(range(model.u.size)):
        raise StructureError(
            "the chosen matrix entry does not reach the whole "
            "coefficient semigroup")

    genmap = GenMap(b, FiniteModel(u1), values)
    adjoined_one = u1.size - 1
    mults: dict[str, PairRelation] = {}
    for name, z in zip(b.names, values):
        if z == adjoined_one:
            mults[name] = diagonal(PaddedAlphabet(b), k)
            continue
        found = next(((l2, y) for l2 in range(model.n_i)
                      for y in range(u1.size)
                      if u1.table[model.p[j0][l2]][y] == z), None)
        if found is None:
            raise StructureError(
                f"{name!r} cannot be reached through the fixed row")
        l2, y = found
        g = find_word(s1.genmap, (l2, y, j0), rep_len)
        if g is None:
            raise StructureError(f"no multiplier word behind {name!r}")
        m = multiplier_for_word(s1, g, cap=diff_cap).intersect(
            times(s1.pairs, l11, l11))
        mults[name] = zeta(speller, m, 0)
    reps = _converse_reps(s1, speller, values, j0, i0, rep_len)
    return make_structure(genmap, k, mults, gen_reps=reps)


def rees_matrix_converse_prefix(
        s: AutomaticStructure, candidate: PairRelation,
        p_position: tuple[int, int] = (0, 0), *,
        check_len: int = 4, rep_len: int = REP_SEARCH) -> AutomaticStructure:
    """Coefficient recovery without an adjoined identity.

    Needs the language-to-prefix equality relation (checked on a window) so
    that middles can be tracked through genuine prefixes; the letter
    relations are then tabulated against the finite coefficient semigroup
    directly.
    """
    report = prefix_automatic_check(s, candidate, check_len)
    if not report.ok:
        raise StructureError(
            "the prefix relation candidate fails its window check: "
            + "; ".join(report.violations[:3]))
    model, j0, i0, l11, b, speller, k, values = _converse_skeleton(
        s, p_position)
    triples = [s.genmap.image(i) for i in range(len(s.alphabet))]
    if len(set(triples)) != len(triples):
        raise StructureError("generators must carry distinct triples")
    u = model.u
    if model.adjoin:
        raise StructureError(
            "expected a structure over the plain coefficient semigroup")
    pz = model.p[j0][i0]
    if {u.table[pz][x] for x in range(u.size)} != set(range(u.size)):
        raise StructureError(
            "the chosen matrix entry does not reach the whole "
            "coefficient semigroup")

    genmap = GenMap(b, FiniteModel(u), values)
    pa = PaddedAlphabet(b)
    free = Fsa.nonempty_universe(b)
    val_of = dict(enumerate(values))
    mults: dict[str, PairRelation] = {}
    for name, z in zip(b.names, values):
        mults[name] = tracked_pairs(
            pa, k, k,
            elem_of=val_of.__getitem__,
            mul=lambda x, y: u.table[x][y],
            accept=lambda v1, v2, zz=z: v1 is not None and v2 is not None
            and u.table[v1][zz] == v2).minimized()
    reps = _converse_reps(s, speller, values, j0, i0, rep_len)
    return make_structure(genmap, k, mults, gen_reps=reps)


# ----------------------------------------------------------------------
# finite Rees index


Entry = tuple[str, object]  # ("base", element) or ("new", index)


@dataclass(frozen=True)
class ComplementData:
    """Finitely many new elements glued onto a semigroup.

    names label the new elements.  cc tabulates products of two new
    elements; ct and tc tabulate products of a new element with each base
    element (per new element, keyed by base element).  Entries are tagged
    ("base", element) or ("new", index).
    """

    names: tuple[str, ...]
    cc: tuple[tuple[Entry, ...], ...]
    ct: tuple[Mapping, ...]
    tc: tuple[Mapping, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "cc",
                           tuple(tuple(row) for row in self.cc))
        object.__setattr__(self, "ct",
                           tuple(MappingProxyType(dict(m)) for m in self.ct))
        object.__setattr__(self, "tc",
                           tuple(MappingProxyType(dict(m)) for m in self.tc))
        n = len(self.names)
        if len(self.cc) != n or any(len(row) != n for row in self.cc):
            raise ValueError("cc must be square over the new elements")
        if len(self.ct) != n or len(self.tc) != n:
            raise ValueError("need one product row per new element")
        for entry in itertools.chain(
                (e for row in self.cc for e in row),
                (e for m in self.ct for e in m.values()),
                (e for m in self.tc for e in m.values())):
            if not (isinstance(entry, tuple) and len(entry) == 2
                    and entry[0] in ("base", "new")):
                raise ValueError(f"malformed product entry {entry!r}")
            if entry[0] == "new" and not 0 <= entry[1] < n:
                raise ValueError(f"entry {entry!r} names no new element")


EMPTY_COMPLEMENT = ComplementData((), (), (), ())


def complement_from_finite(sg: FiniteSemigroup,
                           sub: Iterable[int]) -> ComplementData:
    """Complement tables for a subsemigroup of a finite semigroup."""
    inside = frozenset(sub)
    outside = [x for x in sg.elements() if x not in inside]
    pos = {x: i for i, x in enumerate(outside)}

    def entry(x: int) -> Entry:
        return ("base", x) if x in inside else ("new", pos[x])

    cc = tuple(tuple(entry(sg.table[x][y]) for y in outside) for x in outside)
    ct = tuple({t: entry(sg.table[x][t]) for t in inside} for x in outside)
    tc = tuple({t: entry(sg.table[t][x]) for t in inside} for x in outside)
    return ComplementData(tuple(sg.names[x] for x in outside), cc, ct, tc)


def adjoined_identity_complement(t: AutomaticStructure, name: str = "one",
                                 cap: int = 100_000) -> ComplementData:
    """One new element acting as a two-sided identity on everything."""
    elems, _ = image_closure(t.genmap, cap)
    row = {e: ("base", e) for e in elems}
    return ComplementData((name,), ((("new", 0),),), (row,), (dict(row),))


class ExtendedModel(ElementModel):
    """A base model with finitely many new elements glued on.

    Elements are ("base", x) or ("new", i); products follow the base model
    or the complement tables.  A product the tables leave out is an error,
    which is exactly the "products must land in the semigroup" closure
    condition.
    """

    def __init__(self, base: ElementModel, comp: ComplementData):
        self.base = base
        self.comp = comp

    def mul(self, x, y):
        (kx, vx), (ky, vy) = x, y
        if kx == "base" and ky == "base":
            return ("base", self.base.mul(vx, vy))
        try:
            if kx == "new" and ky == "new":
                return self.comp.cc[vx][vy]
            if kx == "new":
                return self.comp.ct[vx][vy]
            return self.comp.tc[vy][vx]
        except KeyError:
            raise StructureError(
                "a product fell outside the tabulated elements; "
                "the complement tables must cover the whole base") from None

    def name(self, x) -> str:
        kind, v = x
        return self.base.name(v) if kind == "base" else self.comp.names[v]


def rees_index_up(t: AutomaticStructure, comp: ComplementData, *,
                  rep_len: int = REP_SEARCH,
                  cap: int = 100_000) -> AutomaticStructure:
    """Extend a structure by finitely many new elements.

    Each new element becomes its own one-letter representative; products
    against them are finite table lookups, answered with the representative
    language of whatever element comes out.  The base must generate
    finitely many elements, since its multiplication rows against the new
    letters are tabulated one element at a time.
    """
    if not comp.names:
        return t
    if set(comp.names) & set(t.alphabet.names):
        raise StructureError("new element names collide with the alphabet")
    try:
        elems, _ = image_closure(t.genmap, cap)
    except ValueError:
        raise StructureError(
            "the base generates too many elements to tabulate against"
        ) from None
    for row in itertools.chain(comp.ct, comp.tc):
        missing = [e for e in elems if e not in row]
        if missing:
            raise StructureError(
                f"complement rows missing base elements, e.g. "
                f"{t.model.name(missing[0])}")

    a = Alphabet(t.alphabet.names + comp.names)
    pa = PaddedAlphabet(a)
    base_n = len(t.alphabet)
    model = ExtendedModel(t.genmap.model, comp)
    images = tuple(("base", e) for e in t.genmap.images) + tuple(
        ("new", i) for i in range(len(comp.names)))
    genmap = GenMap(a, model, images)

    c_letters = Fsa.letters(a, range(base_n, len(a)))
    lang = (_lift_lang(t.language, a) | c_letters).minimize()

    reps_cache: dict = {}

    def reps_lang(elem) -> Fsa:
        # every representative of a base element, as a language over a
        if elem not in reps_cache:
            g = find_word(t.genmap, elem, rep_len)
            if g is None:
                raise StructureError(
                    f"no representative for {t.model.name(elem)}")
            nf = normal_form(t, g)
            reps_cache[elem] = _lift_lang(apply(t.equality, nf), a)
        return reps_cache[elem]

    def entry_lang(entry: Entry) -> Fsa:
        kind, v = entry
        if kind == "new":
            return Fsa.word(a, (base_n + v,))
        return reps_lang(v)

    mults: dict[str, PairRelation] = {}
    for name in t.alphabet.names:
        ahat = t.genmap.image(t.alphabet.names.index(name))
        pieces = [embed_relation(t.multipliers[name], pa)]
        for ci in range(len(comp.names)):
            target = comp.ct[ci][ahat] if ahat in comp.ct[ci] else None
            if target is None:
                raise StructureError("complement rows missing base elements")
            pieces.append(times(pa, Fsa.word(a, (base_n + ci,)),
                                entry_lang(target)))
        mults[name] = _union_rels(pa, pieces)
    for ci, cname in enumerate(comp.names):
        pieces = []
        for cj in range(len(comp.names)):
            pieces.append(times(pa, Fsa.word(a, (base_n + cj,)),
                                entry_lang(comp.cc[cj][ci])))
        for elem in elems:
            pieces.append(times(pa, reps_lang(elem),
                                entry_lang(comp.tc[ci][elem])))
        mults[cname] = _union_rels(pa, pieces)

    equality = embed_relation(t.equality, pa).union(
        diagonal(pa, c_letters)).minimized()
    reps: dict[str, Word] = {
        n: _lift_word(t.gen_reps[n], t.alphabet, a)
        for n in t.alphabet.names}
    for ci, cname in enumerate(comp.names):
        reps[cname] = (base_n + ci,)
    return make_structure(genmap, lang, mults, equality=equality,
                          unique=t.unique, gen_reps=reps)


def _factor_language(lang: Fsa) -> Fsa:
    """Nonempty factors (sub-words) of accepted words."""
    acc = lang._reachable()
    live = lang._live()
    raw = Fsa(lang.alphabet, lang.n_states, frozenset(acc), frozenset(live),
              lang.transitions)
    return (raw & Fsa.nonempty_universe(lang.alphabet)).minimize()


def block_size_for(s: AutomaticStructure, member_t: Callable[[Word], bool],
                   k_max: int) -> int | None:
    """Smallest k <= k_max whose length window of factors sits inside T."""
    factors = _factor_language(s.language)
    for k in range(1, k_max + 1):
        window = [w for w in factors.enumerate_words(2 * k - 1)
                  if len(w) >= k]
        if all(member_t(w) for w in window):
            return k
    return None


def rees_index_down(s: AutomaticStructure, member_t: Callable[[Word], bool],
                    k: int, *, u_lang: Fsa | None = None,
                    synth_len: int = 8, rep_len: int = REP_SEARCH,
                    diff_cap: int = 64) -> AutomaticStructure:
    """Restrict a structure to a subsemigroup of finite complement.

    member_t decides membership of a word's element in the subsemigroup.
    k is the block size: every factor of the language with length in
    [k, 2k) must sit inside the subsemigroup (verified by enumeration).
    Representatives are re-blocked into letters spelling k-or-longer
    chunks, short members kept as single letters; the letter relations are
    the input's, pulled back through the block expansion.
    """
    if k < 1:
        raise StructureError("the block size must be at least 1")
    _require_unique(s)
    al = s.alphabet
    factors = _factor_language(s.language)
    blocks = [w for w in factors.enumerate_words(2 * k - 1) if len(w) >= k]
    bad = [w for w in blocks if not member_t(w)]
    if bad:
        raise StructureError(
            f"block size {k} fails: factor {al.format(bad[0])!r} "
            "lies outside the subsemigroup")

    if u_lang is None:
        over = s.language & Fsa.universe(al).concat(
            Fsa.letters(al)).concat(_power_lang(al, synth_len))
        if not over.is_empty():
            raise StructureError(
                "cannot synthesize the member language from a bounded "
                "sample; pass u_lang")
        u_lang = Fsa.from_words(
            al, [w for w in s.language.enumerate_words(synth_len)
                 if member_t(w)])
    elif not u_lang.difference(s.language).is_empty():
        raise StructureError("u_lang must sit inside the language")

    shorts = [w for w in s.language.enumerate_words(k - 1) if member_t(w)] \
        if k > 1 else []
    names = tuple(f"b:{'.'.join(al.names[x] for x in w)}" for w in blocks) + \
        tuple(f"c:{'.'.join(al.names[x] for x in w)}" for w in shorts)
    expansion: list[Word] = blocks + shorts
    b = Alphabet(names)
    pa = PaddedAlphabet(b)
    by_word = {w: i for i, w in enumerate(expansion)}

    genmap = GenMap(b, s.genmap.model,
                    tuple(s.genmap.evaluate(w) for w in expansion))

    # membership automaton: blocks walk the member language's table
    du = u_lang.dfa
    table = {(st, x): d for st, x, d in du.transitions}

    def walk(q: int, w: Word) -> int | None:
        for x in w:
            q = table.get((q, x))
            if q is None:
                return None
        return q

    q0 = next(iter(du.initial))
    trans: set = set()
    for bi, w in enumerate(expansion):
        for q in range(du.n_states):
            r = walk(q, w)
            if r is not None:
                trans.add((q, bi, r))
    pre = Fsa(b, du.n_states, frozenset([q0]), du.finals, frozenset(trans))

    # shape: single short letter, or full blocks then one closing block
    full = [by_word[w] for w in blocks if len(w) == k]
    last = [by_word[w] for w in blocks]
    short = [by_word[w] for w in shorts]
    shape_trans = {(0, x, 2) for x in short} | \
        {(q, x, 1) for x in full for q in (0, 1)} | \
        {(q, x, 2) for x in last for q in (0, 1)}
    shape = Fsa(b, 3, frozenset([0]), frozenset([2]), frozenset(shape_trans))
    kk = (pre & shape).minimize()

    def phi(w: Word) -> Word:
        if len(w) < k:
            return (by_word[w],)
        n_b = len(w) // k
        cuts = [w[i * k:(i + 1) * k] for i in range(n_b - 1)]
        cuts.append(w[(n_b - 1) * k:])
        return tuple(by_word[c] for c in cuts)

    within = times(s.pairs, u_lang, u_lang)
    both = times(pa, kk, kk)
    mults: dict[str, PairRelation] = {}
    reps: dict[str, Word] = {}
    for bi, name in enumerate(b.names):
        w = expansion[bi]
        m = multiplier_for_word(s, w, cap=diff_cap).intersect(within)
        mults[name] = preimage_wordmap(
            m, pa, lambda x: expansion[x], 4 * k + 4).intersect(both)
        reps[name] = phi(normal_form(s, w))
    return make_structure(genmap, kk, mults, gen_reps=reps)


def _power_lang(al: Alphabet, n: int) -> Fsa:
    acc = Fsa.epsilon(al)
    one = Fsa.letters(al)
    for _ in range(n):
        acc = acc.concat(one)
    return acc


# ----------------------------------------------------------------------
# wreath products


def wreath_action_words(sPow: AutomaticStructure, top: FiniteSemigroup,
                        dec: Mapping[int, tuple[int, int]], *,
                        flatten: Callable = tuple,
                        unflatten: Callable = tuple,
                        search_len: int = REP_SEARCH) -> dict:
    """Representatives of each generator's coordinate twists.

    For generator f and point i, the twist reindexes f's coordinate tuple
    by right multiplication with the point's residual factor; the returned
    mapping holds a language word for every (generator name, point) pair.
    """
    out: dict[tuple[str, int], Word] = {}
    for fi, name in enumerate(sPow.alphabet.names):
        fv = flatten(sPow.genmap.image(fi))
        for i in range(top.size):
            q = dec[i][1]
            target = unflatten(tuple(fv[top.table[x][q]]
                                     for x in range(top.size)))
            g = find_word(sPow.genmap, target, search_len)
            if g is None:
                raise StructureError(
                    f"no word represents the twist of {name!r} at point {i}")
            out[(name, i)] = normal_form(sPow, g)
    return out


def wreath_finite_T(sPow: AutomaticStructure, top: FiniteSemigroup,
                    dec: Mapping[int, tuple[int, int]] | None,
                    qi_action: Mapping[tuple[str, int], Word | str], *,
                    bottom: ElementModel,
                    flatten: Callable = tuple) -> AutomaticStructure:
    """Structure for the wreath product of S by a finite top semigroup.

    sPow must be a structure for the tuple power of S with no one-letter
    representatives; dec decomposes every top element as a right identity
    times a residual; qi_action holds words for the coordinate twists (see
    wreath_action_words).  A representative tags a tuple-power word with
    the point it carries: every letter wears the point's right identity
    except the last, which wears the residual.

    This assumes the diagonal S-tuple action has no finite generating set;
    nothing here can check that, so it is recorded as a caller assertion.
    """
    if top.size < 2:
        raise StructureError("the top semigroup must have at least 2 elements")
    if dec is None:
        raise StructureError(
            "every top element needs a right-identity decomposition")
    for i in range(top.size):
        e, q = dec[i]
        if any(top.table[x][e] != x for x in range(top.size)):
            raise StructureError(f"{top.names[e]!r} is not a right identity")
        if top.table[e][q] != i:
            raise StructureError(
                f"decomposition of {top.names[i]!r} does not multiply out")
    _require_unique(sPow)
    f = sPow.alphabet
    if not (sPow.language & Fsa.letters(f)).is_empty():
        raise StructureError(
            "one-letter representatives remain; run strip_length_one first")

    m = top.size
    names = tuple(f"e:{fn}:{i}" for fn in f.names for i in range(m)) + \
        tuple(f"q:{fn}:{i}" for fn in f.names for i in range(m))
    a = Alphabet(names)
    pa = PaddedAlphabet(a)
    off = len(f) * m

    def e_idx(fi: int, i: int) -> int:
        return fi * m + i

    def q_idx(fi: int, i: int) -> int:
        return off + fi * m + i

    model = WreathModel(bottom, top)
    images = tuple((flatten(sPow.genmap.image(fi)), dec[i][0])
                   for fi in range(len(f)) for i in range(m)) + tuple(
        (flatten(sPow.genmap.image(fi)), dec[i][1])
        for fi in range(len(f)) for i in range(m))
    genmap = GenMap(a, model, images)

    edges: set = set()
    for fi in range(len(f)):
        for i in range(m):
            edges.add((0, fi, 1 + i, (e_idx(fi, i),)))
            edges.add((1 + i, fi, 1 + i, (e_idx(fi, i),)))
            edges.add((1 + i, fi, m + 1, (q_idx(fi, i),)))
    tagger = Gsm(n_states=m + 2, input_alphabet=f, output_alphabet=a,
                 edges=frozenset(edges), initial=0,
                 terminals=frozenset([m + 1]))
    lang = eta(tagger, sPow.language).minimize()

    ends_q = [
        _ends_with(a, [q_idx(fi, i) for fi in range(len(f))])
        for i in range(m)
    ]
    piece_cache: dict[Word, PairRelation] = {}

    def piece(fname: str, i: int) -> PairRelation:
        # twist words repeat across letters and points, so key on the word
        if (fname, i) not in qi_action:
            raise StructureError(
                f"qi_action lacks an entry for ({fname!r}, {i})")
        w = qi_action[(fname, i)]
        w = f.word(w) if isinstance(w, str) else tuple(w)
        if w not in piece_cache:
            piece_cache[w] = zeta(tagger, multiplier_for_word(sPow, w), 0)
        return piece_cache[w]

    mults: dict[str, PairRelation] = {}
    reps: dict[str, Word] = {}
    for fi, fn in enumerate(f.names):
        base_rep = sPow.gen_reps[fn]
        for r in range(m):
            for kind, target in (("e", lambda i, r=r: i),
                                 ("q", lambda i, r=r: top.table[i][dec[r][1]])):
                name = f"{kind}:{fn}:{r}"
                mults[name] = _union_rels(pa, [
                    piece(fn, i).intersect(
                        times(pa, ends_q[i], ends_q[target(i)]))
                    for i in range(m)
                ])
                point = dec[r][0] if kind == "e" else dec[r][1]
                reps[name] = tuple(e_idx(x, point) for x in base_rep[:-1]) \
                    + (q_idx(base_rep[-1], point),)
    return make_structure(
        genmap, lang, mults, gen_reps=reps,
        note="assumes the diagonal tuple action is not finitely generated")
