"""Built-in structures and the models that back them.

Small, hand-checked examples: the one-element and two-element monoids, the
free monogenic semigroup and monoid, the integers, and the bicyclic monoid.
They double as regression anchors for the construction code and as named
oracles on the command line.
"""
from __future__ import annotations

from functools import reduce
from typing import Callable

from .autostruct import AutomaticStructure, finite_structure
from .fsa import Alphabet, Fsa, Word
from .padrel import PaddedAlphabet, PairRelation, diagonal
from .semigroups import (
    BicyclicModel,
    ElementModel,
    FiniteModel,
    FreeMonogenicModel,
    GenMap,
    IntModel,
    trivial_semigroup,
    z2_monoid,
)


def _rel(pa: PaddedAlphabet, *pieces: Fsa) -> PairRelation:
    return PairRelation(pa, reduce(lambda x, y: x.concat(y), pieces).minimize())


def _pair_word(pa: PaddedAlphabet, *steps: tuple[str, str]) -> Fsa:
    pad = "$"
    base = pa.base

    def code(name: str) -> int:
        return pa.pad if name == pad else base.names.index(name)

    return Fsa.word(pa.alphabet, tuple(pa.pair(code(l), code(r)) for l, r in steps))


def trivial_structure() -> AutomaticStructure:
    return finite_structure(FiniteModel(trivial_semigroup()), {"t": 0})


def z2_structure() -> AutomaticStructure:
    sg = z2_monoid()
    return finite_structure(FiniteModel(sg), {"a": sg.names.index("1")})


def free_monogenic_structure() -> AutomaticStructure:
    alphabet = Alphabet(("a",))
    model = FreeMonogenicModel()
    genmap = GenMap.of(alphabet, model, {"a": 1})
    lang = Fsa.nonempty_universe(alphabet)
    pa = PaddedAlphabet(alphabet)
    succ = _rel(pa, diagonal(pa, lang).fsa, _pair_word(pa, ("$", "a")))
    return AutomaticStructure(
        genmap, lang, {"a": succ}, diagonal(pa, lang), {"a": (0,)}
    )


def free_monogenic_monoid_structure() -> AutomaticStructure:
    alphabet = Alphabet(("e", "x"))
    model = FreeMonogenicModel(monoid=True)
    genmap = GenMap.of(alphabet, model, {"e": 0, "x": 1})
    xs = Fsa.word(alphabet, "x").plus()
    lang = Fsa.word(alphabet, "e").union(xs).minimize()
    pa = PaddedAlphabet(alphabet)
    succ = PairRelation.from_pairs(pa, [("e", "x")]).union(
        _rel(pa, diagonal(pa, xs).fsa, _pair_word(pa, ("$", "x")))
    )
    eq = diagonal(pa, lang)
    return AutomaticStructure(
        genmap, lang, {"x": succ, "e": eq}, eq, {"e": "e", "x": "x"}
    )


def int_structure() -> AutomaticStructure:
    """The integers with a zero letter and one letter in each direction."""
    alphabet = Alphabet(("o", "p", "m"))
    model = IntModel()
    genmap = GenMap.of(alphabet, model, {"o": 0, "p": 1, "m": -1})
    ps = Fsa.word(alphabet, "p").plus()
    ms = Fsa.word(alphabet, "m").plus()
    lang = Fsa.word(alphabet, "o").union(ps).union(ms).minimize()
    pa = PaddedAlphabet(alphabet)
    up = (
        PairRelation.from_pairs(pa, [("o", "p"), ("m", "o")])
        .union(_rel(pa, diagonal(pa, ps).fsa, _pair_word(pa, ("$", "p"))))
        .union(_rel(pa, diagonal(pa, ms).fsa, _pair_word(pa, ("m", "$"))))
    )
    down = (
        PairRelation.from_pairs(pa, [("o", "m"), ("p", "o")])
        .union(_rel(pa, diagonal(pa, ms).fsa, _pair_word(pa, ("$", "m"))))
        .union(_rel(pa, diagonal(pa, ps).fsa, _pair_word(pa, ("p", "$"))))
    )
    eq = diagonal(pa, lang)
    return AutomaticStructure(
        genmap, lang, {"o": eq, "p": up, "m": down}, eq,
        {"o": "o", "p": "p", "m": "m"},
    )


def bicyclic_structure() -> AutomaticStructure:
    """The bicyclic monoid on the two shift generators.

    Representatives are the descending-then-ascending powers, with one extra
    word for the identity since the empty word is out of bounds.
    """
    alphabet = Alphabet(("b", "c"))
    model = BicyclicModel()
    genmap = GenMap.of(alphabet, model, {"b": (0, 1), "c": (1, 0)})
    cs = Fsa.word(alphabet, "c").star()
    bs = Fsa.word(alphabet, "b").star()
    powers = cs.concat(bs) & Fsa.nonempty_universe(alphabet)  # c^m b^n, m+n >= 1
    lang = powers.union(Fsa.word(alphabet, "b c")).minimize()
    pa = PaddedAlphabet(alphabet)
    mul_b = _rel(pa, diagonal(pa, powers).fsa, _pair_word(pa, ("$", "b"))).union(
        PairRelation.from_pairs(pa, [("b c", "b")])
    )
    mul_c = (
        _rel(pa, diagonal(pa, Fsa.word(alphabet, "c").plus()).fsa, _pair_word(pa, ("$", "c")))
        .union(_rel(pa, diagonal(pa, powers).fsa, _pair_word(pa, ("b", "$"))))
        .union(PairRelation.from_pairs(pa, [("b c", "c"), ("b", "b c")]))
    )
    return AutomaticStructure(
        genmap, lang, {"b": mul_b, "c": mul_c}, diagonal(pa, lang),
        {"b": "b", "c": "c"},
    )


BUILTIN_MODELS: dict[str, Callable[[], ElementModel]] = {
    "trivial": lambda: FiniteModel(trivial_semigroup()),
    "z2": lambda: FiniteModel(z2_monoid()),
    "bicyclic": BicyclicModel,
    "free_monogenic": FreeMonogenicModel,
    "free_monogenic_monoid": lambda: FreeMonogenicModel(monoid=True),
    "int_z": IntModel,
}

BUILTIN_STRUCTURES: dict[str, Callable[[], AutomaticStructure]] = {
    "trivial": trivial_structure,
    "z2": z2_structure,
    "bicyclic": bicyclic_structure,
    "free_monogenic": free_monogenic_structure,
    "free_monogenic_monoid": free_monogenic_monoid_structure,
    "int_z": int_structure,
}


def builtin_model(name: str) -> ElementModel:
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}") from None


def builtin_structure(name: str) -> AutomaticStructure:
    try:
        return BUILTIN_STRUCTURES[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}") from None
