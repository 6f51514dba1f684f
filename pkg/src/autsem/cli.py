"""Command-line surface.

Subcommands build structure bundles from JSON descriptors, validate them
against their element models, answer word queries, and export automata as
DOT.  Exit codes are a contract: 0 for success or a true answer, 1 for a
semantic failure or a false answer, 2 for usage and parse errors.

Words on the command line are whitespace-separated letter names, since
construction alphabets routinely mangle names past one character.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable, Mapping

from .autostruct import (
    AutomaticStructure,
    StructureError,
    normal_form,
    validate,
    word_equal,
)
from .catalog import BUILTIN_STRUCTURES, builtin_structure
from .constructions import (
    bruck_reilly_const_one,
    bruck_reilly_finite,
    bruck_reilly_identity,
    direct_product_monoids,
    free_product_monoids,
    free_product_semigroups,
    rename_letters,
)
from .fsa import EnumerationCap, Fsa
from .semigroups import FiniteSemigroup, trivial_semigroup, z2_monoid
from .serialize import BundleError, load_structure, save_structure

MAX_REPORTED = 20

BUILTIN_SEMIGROUPS: dict[str, Callable[[], FiniteSemigroup]] = {
    "trivial": trivial_semigroup,
    "z2": z2_monoid,
}


class UsageError(Exception):
    """Bad descriptor, unknown name, or unparseable input: exit code 2."""


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"{path} does not parse: line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc


def _structure_ref(v) -> AutomaticStructure:
    if not isinstance(v, str):
        raise UsageError(f"expected a structure name or path, got {v!r}")
    if v in BUILTIN_STRUCTURES:
        return builtin_structure(v)
    try:
        return load_structure(v)
    except BundleError as exc:
        raise UsageError(f"{v!r} is neither a builtin nor a bundle: {exc}") from exc


def _semigroup_ref(v) -> FiniteSemigroup:
    if isinstance(v, Mapping):
        try:
            return FiniteSemigroup.from_json(v)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"bad inline multiplication table: {exc}") from exc
    if not isinstance(v, str):
        raise UsageError(f"expected a semigroup name or path, got {v!r}")
    if v in BUILTIN_SEMIGROUPS:
        return BUILTIN_SEMIGROUPS[v]()
    data = _load_json(v)
    try:
        return FiniteSemigroup.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{v} is not a multiplication table: {exc}") from exc


def _theta_ref(v, size: int) -> list[int]:
    if v is None:
        return list(range(size))
    table = v.get("map") if isinstance(v, Mapping) else v
    if not (isinstance(table, list) and all(isinstance(x, int) for x in table)):
        raise UsageError(f"theta must be a list of element indices, got {v!r}")
    return table


def _inputs(desc: Mapping, n: int) -> list[AutomaticStructure]:
    refs = desc.get("inputs", [])
    if len(refs) != n:
        raise UsageError(f"op {desc.get('op')!r} needs {n} inputs, got {len(refs)}")
    return [_structure_ref(r) for r in refs]


def _param(desc: Mapping, key: str):
    if key not in desc:
        raise UsageError(f"op {desc.get('op')!r} needs a {key!r} entry")
    return desc[key]


def _op_builtin(desc):
    name = _param(desc, "name")
    if name not in BUILTIN_STRUCTURES:
        raise UsageError(f"unknown builtin {name!r}")
    return builtin_structure(name)


def _op_br_finite(desc):
    t = _semigroup_ref(_param(desc, "T"))
    return bruck_reilly_finite(t, _theta_ref(desc.get("theta"), t.size))


def _op_br_const_one(desc):
    return bruck_reilly_const_one(_structure_ref(_param(desc, "T")))


def _op_br_identity(desc):
    return bruck_reilly_identity(_structure_ref(_param(desc, "T")))


def _op_fp_semigroups(desc):
    s1, s2 = _inputs(desc, 2)
    return free_product_semigroups(s1, s2)


def _op_fp_monoids(desc):
    m1, m2 = _inputs(desc, 2)
    return free_product_monoids(m1, m2, _param(desc, "e"))


def _op_dp_monoids(desc):
    m1, m2 = _inputs(desc, 2)
    return direct_product_monoids(m1, m2, _param(desc, "e1"), _param(desc, "e2"))


def _op_rename(desc):
    (s,) = _inputs(desc, 1)
    mapping = _param(desc, "mapping")
    if not isinstance(mapping, Mapping):
        raise UsageError("mapping must be an object of old->new letter names")
    return rename_letters(s, dict(mapping))


OPS: dict[str, Callable] = {
    "builtin": _op_builtin,
    "bruck_reilly_finite": _op_br_finite,
    "bruck_reilly_const_one": _op_br_const_one,
    "bruck_reilly_identity": _op_br_identity,
    "free_product_semigroups": _op_fp_semigroups,
    "free_product_monoids": _op_fp_monoids,
    "direct_product_monoids": _op_dp_monoids,
    "rename_letters": _op_rename,
}


def _merge_descriptor(raw) -> dict:
    if not isinstance(raw, Mapping):
        raise UsageError("descriptor must be a JSON object")
    desc = {k: v for k, v in raw.items() if k != "params"}
    params = raw.get("params", {})
    if not isinstance(params, Mapping):
        raise UsageError("params must be a JSON object")
    desc.update(params)
    return desc


def cmd_build(args) -> int:
    desc = _merge_descriptor(_load_json(args.descriptor))
    op = desc.get("op")
    if op not in OPS:
        raise UsageError(f"unknown op {op!r}; known: {', '.join(sorted(OPS))}")
    try:
        s = OPS[op](desc)
    except UsageError:
        raise
    except (StructureError, ValueError) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 1
    save_structure(s, args.out)
    names = ", ".join(s.alphabet.names)
    print(f"alphabet: {len(s.alphabet)} letters ({names})")
    print(f"language states: {s.language.dfa.n_states}")
    total = sum(s.multipliers[n].fsa.dfa.n_states for n in s.alphabet.names)
    print(f"relation states: equality {s.equality.fsa.dfa.n_states}, "
          f"multipliers {total}")
    print(f"bundle written to {args.out}")
    return 0


def cmd_verify(args) -> int:
    if args.max_len < 0:
        raise UsageError("--max-len must be nonnegative")
    try:
        s = load_structure(args.bundle)
    except BundleError as exc:
        raise UsageError(str(exc)) from exc
    report = validate(s, args.max_len)
    if args.report is not None:
        from .report import write_report

        for p in write_report(s, report, args.report, args.max_len):
            print(f"wrote {p}")
    if report.ok:
        print(f"ok: {report.words} words to length {args.max_len}, "
              f"{report.elements} elements, zero violations")
        return 0
    shown = report.violations[:MAX_REPORTED]
    print(f"FAILED: {len(report.violations)} violations "
          f"(showing {len(shown)})")
    for v in shown:
        print(f"  {v}")
    return 1


def _bundle_word(s: AutomaticStructure, text: str):
    try:
        return s.alphabet.word(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_eq(args) -> int:
    s = _load_bundle(args.bundle)
    w1 = _bundle_word(s, args.w1)
    w2 = _bundle_word(s, args.w2)
    try:
        same = word_equal(s, w1, w2)
    except StructureError as exc:
        print(f"cannot decide: {exc}", file=sys.stderr)
        return 1
    print("true" if same else "false")
    return 0 if same else 1


def cmd_nf(args) -> int:
    s = _load_bundle(args.bundle)
    w = _bundle_word(s, args.w)
    try:
        nf = normal_form(s, w)
    except StructureError as exc:
        print(f"no normal form: {exc}", file=sys.stderr)
        return 1
    print(s.format(nf))
    return 0


def cmd_enum(args) -> int:
    if args.n < 0:
        raise UsageError("length bound must be nonnegative")
    s = _load_bundle(args.bundle)
    try:
        words = s.language.enumerate_words(args.n)
    except EnumerationCap as exc:
        print(f"enumeration capped: {exc}", file=sys.stderr)
        return 1
    for w in words:
        print(s.format(w))
    return 0


def cmd_dot(args) -> int:
    data = _load_json(args.automaton)
    try:
        f = Fsa.from_json(data)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    name = os.path.splitext(os.path.basename(args.automaton))[0]
    sys.stdout.write(f.to_dot(name))
    return 0


def _load_bundle(path: str) -> AutomaticStructure:
    try:
        return load_structure(path)
    except BundleError as exc:
        raise UsageError(str(exc)) from exc


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="autsem",
        description="Build, verify, and query automatic structures "
                    "for semigroups.")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="run a construction descriptor")
    b.add_argument("descriptor", help="path to a JSON descriptor")
    b.add_argument("-o", "--out", required=True, help="bundle directory")
    b.set_defaults(run=cmd_build)

    v = sub.add_parser("verify", help="validate a bundle against its model")
    v.add_argument("bundle")
    v.add_argument("--max-len", type=int, required=True,
                   help="check all representative words up to this length")
    v.add_argument("--report", metavar="DIR",
                   help="also write violations.tsv and summary.png here")
    v.set_defaults(run=cmd_verify)

    e = sub.add_parser("eq", help="do two words name the same element?")
    e.add_argument("bundle")
    e.add_argument("w1")
    e.add_argument("w2")
    e.set_defaults(run=cmd_eq)

    n = sub.add_parser("nf", help="print the representative of a word")
    n.add_argument("bundle")
    n.add_argument("w")
    n.set_defaults(run=cmd_nf)

    en = sub.add_parser("enum", help="list representative words by length")
    en.add_argument("bundle")
    en.add_argument("n", type=int)
    en.set_defaults(run=cmd_enum)

    d = sub.add_parser("dot", help="print an automaton JSON file as DOT")
    d.add_argument("automaton")
    d.set_defaults(run=cmd_dot)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
