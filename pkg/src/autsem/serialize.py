"""Structure bundles on disk.

A bundle is a directory: ``structure.json`` holds the alphabet, generator
images, uniqueness flag, representative words, and the element-model
binding, plus file references for the language and each relation; the
referenced automata sit next to it as plain automaton JSON.

Elements are encoded structurally (ints and strings as themselves, tuples
as arrays), so any model whose parameters are finite tables round-trips.
Models built around an arbitrary callable cannot be written down; saving
one raises unless the callable can be tabulated against a finite base.
"""
from __future__ import annotations

import json
import os
from typing import Mapping

from .autostruct import AutomaticStructure
from .constructions import ComplementData, ExtendedModel
from .fsa import Alphabet, Fsa, Word
from .padrel import PaddedAlphabet, PairRelation
from .semigroups import (
    BicyclicModel,
    BruckReillyModel,
    DirectProductModel,
    ElementModel,
    FiniteModel,
    FiniteSemigroup,
    FreeMonogenicModel,
    FreeProductModel,
    GenMap,
    IntModel,
    ReesMatrixModel,
    WreathModel,
)

BUNDLE_FILE = "structure.json"


class BundleError(ValueError):
    """A bundle directory is missing pieces or does not parse."""


# ----------------------------------------------------------------------
# elements

def encode_element(e):
    if isinstance(e, bool):
        raise BundleError(f"cannot encode element {e!r}")
    if isinstance(e, (int, str)):
        return e
    if isinstance(e, tuple):
        return [encode_element(x) for x in e]
    raise BundleError(f"cannot encode element {e!r}")


def decode_element(v):
    if isinstance(v, (int, str)):
        return v
    if isinstance(v, list):
        return tuple(decode_element(x) for x in v)
    raise BundleError(f"cannot decode element {v!r}")


# ----------------------------------------------------------------------
# models

def _theta_table(m: BruckReillyModel) -> list[int]:
    base = m.base
    if not isinstance(base, FiniteModel):
        raise BundleError(
            "only endomorphisms of a finite base can be written as a table")
    return [m.theta(x) for x in range(base.sg.size)]


def _encode_kv(mapping: Mapping) -> list:
    return [[encode_element(k), encode_element(v)] for k, v in mapping.items()]


def _decode_kv(items) -> dict:
    return {decode_element(k): decode_element(v) for k, v in items}


def encode_model(m: ElementModel) -> dict:
    if isinstance(m, FiniteModel):
        return {"kind": "finite", "semigroup": m.sg.to_json()}
    if isinstance(m, FreeMonogenicModel):
        return {"kind": "free_monogenic", "monoid": m.monoid}
    if isinstance(m, IntModel):
        return {"kind": "int"}
    if isinstance(m, BicyclicModel):
        return {"kind": "bicyclic"}
    if isinstance(m, BruckReillyModel):
        return {"kind": "bruck_reilly", "base": encode_model(m.base),
                "theta": {"map": _theta_table(m)}}
    if isinstance(m, FreeProductModel):
        return {"kind": "free_product", "monoid": m.monoid,
                "factors": [encode_model(f) for f in m.factors]}
    if isinstance(m, DirectProductModel):
        return {"kind": "direct_product", "left": encode_model(m.left),
                "right": encode_model(m.right)}
    if isinstance(m, ReesMatrixModel):
        return {"kind": "rees_matrix", "u": m.u.to_json(),
                "p": [list(row) for row in m.p], "adjoin": m.adjoin}
    if isinstance(m, WreathModel):
        return {"kind": "wreath", "bottom": encode_model(m.bottom),
                "top": m.top.to_json()}
    if isinstance(m, ExtendedModel):
        comp = m.comp
        return {
            "kind": "extended",
            "base": encode_model(m.base),
            "names": list(comp.names),
            "cc": [[encode_element(e) for e in row] for row in comp.cc],
            "ct": [_encode_kv(row) for row in comp.ct],
            "tc": [_encode_kv(row) for row in comp.tc],
        }
    raise BundleError(f"no encoding for model {type(m).__name__}")


def decode_model(data: Mapping) -> ElementModel:
    try:
        kind = data["kind"]
    except (TypeError, KeyError):
        raise BundleError("model descriptor needs a kind") from None
    if kind == "finite":
        return FiniteModel(FiniteSemigroup.from_json(data["semigroup"]))
    if kind == "free_monogenic":
        return FreeMonogenicModel(monoid=bool(data.get("monoid", False)))
    if kind == "int":
        return IntModel()
    if kind == "bicyclic":
        return BicyclicModel()
    if kind == "bruck_reilly":
        table = tuple(data["theta"]["map"])
        return BruckReillyModel(decode_model(data["base"]), table.__getitem__)
    if kind == "free_product":
        return FreeProductModel(
            [decode_model(f) for f in data["factors"]],
            monoid=bool(data.get("monoid", False)))
    if kind == "direct_product":
        return DirectProductModel(decode_model(data["left"]),
                                  decode_model(data["right"]))
    if kind == "rees_matrix":
        return ReesMatrixModel(FiniteSemigroup.from_json(data["u"]),
                               tuple(tuple(r) for r in data["p"]),
                               adjoin=bool(data.get("adjoin", True)))
    if kind == "wreath":
        return WreathModel(decode_model(data["bottom"]),
                           FiniteSemigroup.from_json(data["top"]))
    if kind == "extended":
        comp = ComplementData(
            tuple(data["names"]),
            tuple(tuple(decode_element(e) for e in row) for row in data["cc"]),
            tuple(_decode_kv(row) for row in data["ct"]),
            tuple(_decode_kv(row) for row in data["tc"]),
        )
        return ExtendedModel(decode_model(data["base"]), comp)
    raise BundleError(f"unknown model kind {kind!r}")


# ----------------------------------------------------------------------
# bundles

def _relation_files(names) -> dict[str, str]:
    # letter names carry ':' and '.' freely, so files are numbered instead
    return {n: f"mult_{i:02d}.json" for i, n in enumerate(names)}


def save_structure(s: AutomaticStructure, path: str) -> None:
    """Write a structure bundle directory (created if needed)."""
    os.makedirs(path, exist_ok=True)
    names = s.alphabet.names
    files = _relation_files(names)
    s.language.save(os.path.join(path, "language.json"))
    s.equality.fsa.save(os.path.join(path, "equality.json"))
    for n in names:
        s.multipliers[n].fsa.save(os.path.join(path, files[n]))
    doc = {
        "alphabet": list(names),
        "psi": {n: encode_element(s.genmap.image(i))
                for i, n in enumerate(names)},
        "L": "language.json",
        "multipliers": files,
        "equality": "equality.json",
        "unique": s.unique,
        "gen_reps": {n: s.alphabet.format(s.gen_reps[n]) for n in names},
        "model": encode_model(s.genmap.model),
    }
    if s.note:
        doc["note"] = s.note
    with open(os.path.join(path, BUNDLE_FILE), "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_structure(path: str) -> AutomaticStructure:
    """Read a bundle directory back; everything is revalidated shapewise."""
    try:
        with open(os.path.join(path, BUNDLE_FILE)) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise BundleError(f"cannot read bundle: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BundleError(f"bundle does not parse: {exc}") from exc
    try:
        alphabet = Alphabet(tuple(doc["alphabet"]))
        model = decode_model(doc["model"])
        images = tuple(decode_element(doc["psi"][n]) for n in alphabet.names)
        lang = Fsa.load(os.path.join(path, doc["L"]))
        pa = PaddedAlphabet(alphabet)
        mults = {
            n: PairRelation(pa, Fsa.load(os.path.join(path, doc["multipliers"][n])))
            for n in alphabet.names
        }
        equality = PairRelation(pa, Fsa.load(os.path.join(path, doc["equality"])))
        reps: dict[str, Word] = {
            n: alphabet.word(doc["gen_reps"][n]) for n in alphabet.names
        }
        unique = bool(doc["unique"])
        note = doc.get("note", "")
    except (KeyError, TypeError, ValueError, OSError) as exc:
        raise BundleError(f"malformed bundle: {exc}") from exc
    genmap = GenMap(alphabet, model, images)
    return AutomaticStructure(genmap, lang, mults, equality, reps,
                              unique=unique, note=note)
