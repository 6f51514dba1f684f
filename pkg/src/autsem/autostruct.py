"""Automatic structures as concrete, checkable data.

A structure couples a regular language of representative words with one
padded word relation per generator letter and one for equality.  The letter
relations answer "which representatives name the product of this word's
element with that generator"; folding them gives normal forms and word
comparison without ever touching the semigroup itself.

The semigroup is still around, as an element model plus a generator map, but
only as an oracle: validation replays the relations against honest
multiplication on a bounded window of words and reports every disagreement.
Nothing here trusts the relations it is handed.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Hashable, Iterable, Mapping

from .fsa import Alphabet, EnumerationCap, Fsa, Word
from .padrel import (
    PaddedAlphabet,
    PairRelation,
    apply,
    bounded_difference,
    compose,
    diagonal,
    project,
    shortlex_less,
    times,
    well_padded,
)
from .semigroups import ElementModel, GenMap

DEFAULT_REP_SEARCH = 8


class StructureError(ValueError):
    """The data at hand does not form (or no longer forms) a usable structure."""


def _as_mapping(m: Mapping) -> Mapping:
    return m if isinstance(m, MappingProxyType) else MappingProxyType(dict(m))


@dataclass(frozen=True)
class AutomaticStructure:
    """A representative language with its letter and equality relations.

    multipliers and gen_reps are keyed by letter name.  unique promises one
    representative per element, in which case equality is just the diagonal
    of the language.  note is free-form provenance for bundles and reports.
    """

    genmap: GenMap
    language: Fsa
    multipliers: Mapping[str, PairRelation]
    equality: PairRelation
    gen_reps: Mapping[str, Word]
    unique: bool = True
    note: str = ""

    def __post_init__(self) -> None:
        names = self.genmap.alphabet.names
        if self.language.alphabet.names != names:
            raise StructureError("language alphabet does not match the generator map")
        if self.language.accepts(()):
            raise StructureError("representative language accepts the empty word")
        mult = _as_mapping(self.multipliers)
        object.__setattr__(self, "multipliers", mult)
        if set(mult) != set(names):
            raise StructureError("need exactly one multiplier per letter")
        for name, rel in mult.items():
            if rel.pairs.base.names != names:
                raise StructureError(f"multiplier for {name!r} is over the wrong base")
        if self.equality.pairs.base.names != names:
            raise StructureError("equality relation is over the wrong base")
        reps = {
            k: self.genmap.alphabet.word(v) if isinstance(v, str) else tuple(v)
            for k, v in dict(self.gen_reps).items()
        }
        object.__setattr__(self, "gen_reps", _as_mapping(reps))
        if set(reps) != set(names):
            raise StructureError("need a representative word per letter")
        for name, w in reps.items():
            if not self.language.accepts(w):
                raise StructureError(f"representative for {name!r} is not in the language")
            letter = names.index(name)
            if self.genmap.evaluate(w) != self.genmap.image(letter):
                raise StructureError(f"representative for {name!r} names the wrong element")

    @property
    def alphabet(self) -> Alphabet:
        return self.genmap.alphabet

    @property
    def model(self) -> ElementModel:
        return self.genmap.model

    @property
    def pairs(self) -> PaddedAlphabet:
        return self.equality.pairs

    def multiplier(self, letter: int | str) -> PairRelation:
        if isinstance(letter, int):
            letter = self.alphabet.names[letter]
        return self.multipliers[letter]

    def word(self, w: Word | str) -> Word:
        return self.alphabet.word(w) if isinstance(w, str) else tuple(w)

    def format(self, w: Word) -> str:
        return self.alphabet.format(w)


def make_structure(
    genmap: GenMap,
    language: Fsa,
    multipliers: Mapping[str, PairRelation],
    *,
    equality: PairRelation | None = None,
    unique: bool = True,
    gen_reps: Mapping[str, Word | str] | None = None,
    rep_search_len: int = DEFAULT_REP_SEARCH,
    note: str = "",
) -> AutomaticStructure:
    """Assemble a structure, filling in the derivable parts.

    A missing equality relation is taken to be the diagonal, which is only
    sound for unique representatives.  Missing generator representatives are
    found by evaluating language words up to rep_search_len.
    """
    if equality is None:
        if not unique:
            raise StructureError("equality must be supplied when representatives repeat")
        equality = diagonal(PaddedAlphabet(genmap.alphabet), language)
    reps: dict[str, Word] = {}
    if gen_reps:
        for k, v in gen_reps.items():
            reps[k] = genmap.alphabet.word(v) if isinstance(v, str) else tuple(v)
    missing = [n for n in genmap.alphabet.names if n not in reps]
    if missing:
        wanted = {genmap.image(genmap.alphabet.names.index(n)): n for n in missing}
        for w in language.enumerate_words(rep_search_len):
            n = wanted.pop(genmap.evaluate(w), None)
            if n is not None:
                reps[n] = w
            if not wanted:
                break
        if wanted:
            lost = ", ".join(sorted(wanted.values()))
            raise StructureError(
                f"no representative found within length {rep_search_len} for: {lost}"
            )
    return AutomaticStructure(genmap, language, multipliers, equality, reps, unique, note)


# ----------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]
    words: int
    elements: int

    def __bool__(self) -> bool:
        return self.ok


def _semantic_window(s: AutomaticStructure, max_len: int, cap: int | None):
    words = s.language.enumerate_words(max_len, cap)
    return words, [s.genmap.evaluate(w) for w in words]


def validate(
    s: AutomaticStructure,
    max_len: int,
    *,
    rep_search_len: int | None = None,
    cap: int | None = None,
    max_violations: int = 1000,
) -> ValidationReport:
    """Replay the structure against its own model on a bounded window.

    Checks, in order: relation shape (well-padded, diagonal equality when
    unique), the equality and letter relations against honest multiplication
    over all pairs of language words up to max_len, acceptance of junk pairs,
    and a surjectivity spot check: every element expressible as a product of
    at most max_len generators must have a representative no longer than
    rep_search_len (default 2 * max_len + 2).

    The result is sound but bounded: a passing report is evidence, not proof.
    """
    if rep_search_len is None:
        rep_search_len = 2 * max_len + 2
    bad: list[str] = []

    def flag(msg: str) -> None:
        if len(bad) < max_violations:
            bad.append(msg)

    pa = s.pairs
    wp = well_padded(pa)
    for name in (*s.alphabet.names, None):
        rel = s.equality if name is None else s.multipliers[name]
        label = "equality" if name is None else f"multiplier {name!r}"
        if not rel.fsa.difference(wp).is_empty():
            flag(f"{label} accepts ill-padded words")
    if s.unique and not s.equality.fsa.equivalent(diagonal(pa, s.language).fsa):
        flag("unique structure whose equality relation is not the diagonal")

    words, values = _semantic_window(s, max_len, cap)
    fmt = s.alphabet.format

    if s.unique:
        seen: dict[Hashable, Word] = {}
        for w, v in zip(words, values):
            if v in seen:
                flag(
                    f"two representatives for {s.model.name(v)}: "
                    f"{fmt(seen[v])!r} and {fmt(w)!r}"
                )
            else:
                seen[v] = w

    for i, (w1, v1) in enumerate(zip(words, values)):
        for w2, v2 in zip(words, values):
            expect = v1 == v2
            got = s.equality.accepts_pair(w1, w2)
            if expect != got:
                verb = "missing" if expect else "wrongly accepted"
                flag(f"equality {verb} on ({fmt(w1)!r}, {fmt(w2)!r})")
    for w1, w2 in s.equality.enumerate_pairs(max_len, cap):
        if not (s.language.accepts(w1) and s.language.accepts(w2)):
            flag(f"equality accepts pair outside the language: ({fmt(w1)!r}, {fmt(w2)!r})")

    for letter, name in enumerate(s.alphabet.names):
        rel = s.multipliers[name]
        img = s.genmap.image(letter)
        mul = s.model.mul
        for w1, v1 in zip(words, values):
            prod = mul(v1, img)
            for w2, v2 in zip(words, values):
                expect = prod == v2
                got = rel.accepts_pair(w1, w2)
                if expect != got:
                    verb = "missing" if expect else "wrongly accepted"
                    flag(f"multiplier {name!r} {verb} on ({fmt(w1)!r}, {fmt(w2)!r})")
        for w1, w2 in rel.enumerate_pairs(max_len, cap):
            if not (s.language.accepts(w1) and s.language.accepts(w2)):
                flag(
                    f"multiplier {name!r} accepts pair outside the language: "
                    f"({fmt(w1)!r}, {fmt(w2)!r})"
                )

    # surjectivity spot check over the ball of generator products
    reps: dict[Hashable, Word] = {}
    for w in s.language.enumerate_words(rep_search_len, cap):
        reps.setdefault(s.genmap.evaluate(w), w)
    images = [s.genmap.image(a) for a in range(len(s.alphabet))]
    ball: set[Hashable] = set(images)
    frontier = list(images)
    for _ in range(max_len - 1):
        nxt = []
        for e in frontier:
            for g in images:
                p = s.model.mul(e, g)
                if p not in ball:
                    ball.add(p)
                    nxt.append(p)
        frontier = nxt
        if not frontier:
            break
    for e in sorted(ball, key=s.model.name):
        if e not in reps:
            flag(
                f"element {s.model.name(e)} has no representative "
                f"within length {rep_search_len}"
            )

    return ValidationReport(not bad, tuple(bad), len(words), len(ball))


def prefix_automatic_check(
    s: AutomaticStructure,
    candidate: PairRelation,
    max_len: int,
    *,
    cap: int | None = None,
    max_violations: int = 1000,
) -> ValidationReport:
    """Desk-check a candidate for the language-by-prefix equality relation.

    The candidate should relate a language word to every nonempty prefix of a
    language word naming the same element.  Agreement is tested on all such
    pairs up to max_len, plus the converse sweep over what the candidate
    itself accepts.
    """
    if candidate.pairs.base.names != s.alphabet.names:
        raise StructureError("candidate relation is over the wrong base")
    bad: list[str] = []

    def flag(msg: str) -> None:
        if len(bad) < max_violations:
            bad.append(msg)

    lang = s.language
    pref = prefix_language(lang)
    words, values = _semantic_window(s, max_len, cap)
    pwords = pref.enumerate_words(max_len, cap)
    pvalues = [s.genmap.evaluate(w) for w in pwords]
    fmt = s.alphabet.format

    for w1, v1 in zip(words, values):
        for w2, v2 in zip(pwords, pvalues):
            expect = v1 == v2
            got = candidate.accepts_pair(w1, w2)
            if expect != got:
                verb = "missing" if expect else "wrongly accepted"
                flag(f"prefix relation {verb} on ({fmt(w1)!r}, {fmt(w2)!r})")
    for w1, w2 in candidate.enumerate_pairs(max_len, cap):
        if not lang.accepts(w1):
            flag(f"prefix relation's left word outside the language: {fmt(w1)!r}")
        elif not pref.accepts(w2):
            flag(f"prefix relation's right word is not a prefix: {fmt(w2)!r}")

    return ValidationReport(not bad, tuple(bad), len(words) + len(pwords), 0)


def prefix_language(lang: Fsa) -> Fsa:
    """Nonempty prefixes of accepted words."""
    live = lang._live()
    raw = Fsa(lang.alphabet, lang.n_states, lang.initial, live, lang.transitions)
    return (raw & Fsa.nonempty_universe(lang.alphabet)).minimize()


# ----------------------------------------------------------------------
# normal forms


def normal_form(s: AutomaticStructure, w: Word | str) -> Word:
    """Representative of the element the word names, by folding multipliers.

    Starts from the first letter's representative and applies one letter
    relation per remaining letter, taking the shortlex-least image each time.
    """
    w = s.word(w)
    if not w:
        raise StructureError("no normal form for the empty word")
    names = s.alphabet.names
    cur = s.gen_reps[names[w[0]]]
    for a in w[1:]:
        image = apply(s.multipliers[names[a]], cur)
        nxt = image.shortlex_least()
        if nxt is None:
            raise StructureError(
                f"multiplier {names[a]!r} has no image for {s.format(cur)!r}"
            )
        cur = nxt
    return cur


def word_equal(s: AutomaticStructure, w1: Word | str, w2: Word | str) -> bool:
    """Do the two words name the same element?"""
    n1, n2 = normal_form(s, w1), normal_form(s, w2)
    return n1 == n2 or s.equality.accepts_pair(n1, n2)


def multiplier_for_word(
    s: AutomaticStructure, w: Word | str, *, cap: int = 64
) -> PairRelation:
    """Letter relations composed along the word.

    Each intermediate relation must have bounded length difference (checked
    up to cap); an unbounded step would leave later answers uncertifiable,
    so it is an error.
    """
    w = s.word(w)
    if not w:
        raise StructureError("no multiplier for the empty word")
    names = s.alphabet.names
    rel = s.multipliers[names[w[0]]]
    for a in w[1:]:
        d = bounded_difference(rel, cap)
        if d is None:
            raise StructureError(
                f"length difference exceeded {cap} while composing {s.format(w)!r}"
            )
        rel = compose(rel, s.multipliers[names[a]], d, verify=False)
    if bounded_difference(rel, cap) is None:
        raise StructureError(
            f"length difference exceeded {cap} while composing {s.format(w)!r}"
        )
    return rel


# ----------------------------------------------------------------------
# language surgery


def uniquify(s: AutomaticStructure) -> AutomaticStructure:
    """Keep only the shortlex-least representative of each element.

    A word survives when no equality-related word precedes it.  The letter
    relations are restricted to the surviving words; the image of the
    language is checked unchanged before anything is returned.
    """
    if s.unique:
        return s
    pa = s.pairs
    shadowed = project(s.equality.intersect(shortlex_less(pa)), 1)
    lang = s.language.difference(shadowed).minimize()
    keep = times(pa, lang, lang)
    covered = project(s.equality.intersect(times(pa, s.language, lang)), 0)
    if not covered.equivalent(s.language):
        raise StructureError("culling representatives lost elements")
    mult = {n: rel.intersect(keep) for n, rel in s.multipliers.items()}
    reps = {}
    for name, w in s.gen_reps.items():
        if lang.accepts(w):
            reps[name] = w
        else:
            better = (apply(s.equality, w) & lang).shortlex_least()
            if better is None:
                raise StructureError(f"lost the representative for {name!r}")
            reps[name] = better
    return AutomaticStructure(
        s.genmap, lang, mult, diagonal(pa, lang), reps, True, s.note
    )


def strip_length_one(
    s: AutomaticStructure, search_len: int = DEFAULT_REP_SEARCH
) -> AutomaticStructure:
    """Rewrite the language so no element is represented by a single letter.

    Each one-letter representative is replaced by a shortlex-least
    concatenation of two language words naming the same element, found within
    search_len.  Failure to find one means the semigroup's elements are not
    all products, and is an error.  Only unique-representative structures are
    handled; the letter relations are patched pair by pair.
    """
    if not s.unique:
        raise StructureError("strip representatives after uniquify, not before")
    ones = [w for w in s.language.enumerate_words(1) if len(w) == 1]
    if not ones:
        return s
    pa = s.pairs
    pool = s.language.enumerate_words(search_len)
    vals = [s.genmap.evaluate(w) for w in pool]
    swap: dict[Word, Word] = {}
    for w in ones:
        target = s.genmap.evaluate(w)
        best: Word | None = None
        for u, vu in zip(pool, vals):
            for v, vv in zip(pool, vals):
                if s.model.mul(vu, vv) == target:
                    c = u + v
                    if best is None or (len(c), c) < (len(best), best):
                        best = c
        if best is None:
            raise StructureError(
                f"{s.format(w)!r} admits no two-factor spelling within {search_len}; "
                "its element is not a product"
            )
        swap[w] = best

    ones_fsa = Fsa.from_words(s.alphabet, ones)
    core = s.language.difference(ones_fsa).minimize()
    lang = core.union(Fsa.from_words(s.alphabet, swap.values())).minimize()
    keep = times(pa, core, core)

    def patched(rel: PairRelation) -> PairRelation:
        out = rel.intersect(keep)
        for w, w2 in swap.items():
            row = project(rel.intersect(times(pa, core, Fsa.word(s.alphabet, w))), 0)
            out = out.union(times(pa, row, Fsa.word(s.alphabet, w2)))
            col = project(rel.intersect(times(pa, Fsa.word(s.alphabet, w), core)), 1)
            out = out.union(times(pa, Fsa.word(s.alphabet, w2), col))
            for u, u2 in swap.items():
                if rel.accepts_pair(w, u):
                    out = out.union(PairRelation.from_pairs(pa, [(w2, u2)]))
        return out.minimized()

    mult = {n: patched(rel) for n, rel in s.multipliers.items()}
    reps = {n: swap.get(w, w) for n, w in s.gen_reps.items()}
    return AutomaticStructure(
        s.genmap, lang, mult, diagonal(pa, lang), reps, True, s.note
    )


# ----------------------------------------------------------------------
# builders and searches


def find_word(g: GenMap, target: Hashable, max_len: int, *, cap: int = 200_000) -> Word | None:
    """Shortlex-least word evaluating to target, or None within max_len.

    Breadth-first over products, pruning any element already reached by an
    earlier word; sound because congruent prefixes stay congruent.
    """
    n = len(g.alphabet)
    seen: dict[Hashable, Word] = {}
    frontier: list[tuple[Hashable, Word]] = []
    for a in range(n):
        e = g.image(a)
        if e not in seen:
            seen[e] = (a,)
            frontier.append((e, (a,)))
    for _ in range(max_len - 1):
        if target in seen:
            break
        nxt: list[tuple[Hashable, Word]] = []
        for e, w in frontier:
            for a in range(n):
                p = g.model.mul(e, g.image(a))
                if p not in seen:
                    seen[p] = w + (a,)
                    nxt.append((p, w + (a,)))
                    if len(seen) > cap:
                        raise EnumerationCap(f"element search passed {cap} states")
        frontier = nxt
        if not frontier:
            break
    return seen.get(target)


def finite_structure(
    model: ElementModel,
    gens: Mapping[str, Hashable],
    *,
    max_size: int = 100_000,
    note: str = "",
) -> AutomaticStructure:
    """Shortlex-normal-form structure for a finitely generated finite semigroup.

    Every element reachable from the generators gets its least word as the
    representative; the letter relations are tabulated outright.  Generation
    must close within max_size elements.
    """
    alphabet = Alphabet(tuple(gens))
    genmap = GenMap.of(alphabet, model, gens)
    n = len(alphabet)
    reps: dict[Hashable, Word] = {}
    frontier: list[tuple[Hashable, Word]] = []
    for a in range(n):
        e = genmap.image(a)
        if e not in reps:
            reps[e] = (a,)
            frontier.append((e, (a,)))
    while frontier:
        nxt: list[tuple[Hashable, Word]] = []
        for e, w in frontier:
            for a in range(n):
                p = model.mul(e, genmap.image(a))
                if p not in reps:
                    reps[p] = w + (a,)
                    nxt.append((p, w + (a,)))
                    if len(reps) > max_size:
                        raise EnumerationCap(f"generation passed {max_size} elements")
        frontier = nxt

    lang = Fsa.from_words(alphabet, reps.values())
    pa = PaddedAlphabet(alphabet)
    mult = {
        alphabet.names[a]: PairRelation.from_pairs(
            pa, [(w, reps[model.mul(e, genmap.image(a))]) for e, w in reps.items()]
        )
        for a in range(n)
    }
    gen_reps = {alphabet.names[a]: reps[genmap.image(a)] for a in range(n)}
    return AutomaticStructure(
        genmap, lang, mult, diagonal(pa, lang), gen_reps, True, note
    )
