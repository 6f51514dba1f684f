"""Automatic structures for semigroups.

The package splits into an automaton kernel (fsa), machinery for relations on
padded pairs of words (padrel), generalized sequential machines (gsm), finite
and symbolic semigroup models (semigroups), the automatic-structure object
itself with its checks (autostruct, catalog), and closure constructions that
build new structures from old (constructions).  serialize and cli wrap the
whole thing for disk and the command line.
"""

from .autostruct import (
    AutomaticStructure,
    StructureError,
    ValidationReport,
    finite_structure,
    make_structure,
    multiplier_for_word,
    normal_form,
    prefix_automatic_check,
    strip_length_one,
    validate,
    word_equal,
)
from .catalog import builtin_model, builtin_structure
from .fsa import Alphabet, AlphabetMismatch, EnumerationCap, Fsa, Word, combine
from .gsm import Gsm, eta, zeta
from .padrel import (
    BoundViolation,
    PaddedAlphabet,
    PaddingError,
    PairRelation,
    bounded_difference,
    convolve,
    deconvolve,
    diagonal,
    padded_product,
)
from .semigroups import ElementModel, FiniteSemigroup, GenMap
from .serialize import BundleError, load_structure, save_structure

__all__ = [
    "Alphabet",
    "AlphabetMismatch",
    "AutomaticStructure",
    "BoundViolation",
    "BundleError",
    "ElementModel",
    "EnumerationCap",
    "FiniteSemigroup",
    "Fsa",
    "GenMap",
    "Gsm",
    "PaddedAlphabet",
    "PaddingError",
    "PairRelation",
    "StructureError",
    "ValidationReport",
    "Word",
    "bounded_difference",
    "builtin_model",
    "builtin_structure",
    "combine",
    "convolve",
    "deconvolve",
    "diagonal",
    "eta",
    "finite_structure",
    "load_structure",
    "make_structure",
    "multiplier_for_word",
    "normal_form",
    "padded_product",
    "prefix_automatic_check",
    "save_structure",
    "strip_length_one",
    "validate",
    "word_equal",
    "zeta",
]
