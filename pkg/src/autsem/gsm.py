"""Generalized sequential machines.

A machine reads letters and emits a nonempty output word per edge; a run is
successful when it takes at least one edge and ends in a terminal state.  Two
derived maps matter here: eta sends an input language to the language of all
outputs along successful runs, and zeta sends a relation on input words to
the relation between the corresponding output words.  Both preserve
regularity, and both are realized below by product constructions that carry
the not-yet-emitted tail of the last output as explicit state.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .fsa import Alphabet, Fsa, Word
from .padrel import PaddedAlphabet, PairRelation

Edge = tuple[int, int, int, Word]  # (src, input letter, dst, output word)


class VarianceViolation(ValueError):
    """The machine's output-length spread exceeds what a construction allows."""


@dataclass(frozen=True)
class Gsm:
    n_states: int
    input_alphabet: Alphabet
    output_alphabet: Alphabet
    edges: frozenset[Edge]
    initial: int
    terminals: frozenset[int]

    def __post_init__(self) -> None:
        if not (0 <= self.initial < self.n_states):
            raise ValueError("initial state out of range")
        for t in self.terminals:
            if not (0 <= t < self.n_states):
                raise ValueError(f"terminal {t} out of range")
        for src, a, dst, out in self.edges:
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise ValueError(f"edge ({src},{a},{dst}) out of range")
            if not (0 <= a < len(self.input_alphabet)):
                raise ValueError(f"input letter {a} out of range")
            if not out:
                raise ValueError("edge outputs must be nonempty")
            for b in out:
                if not (0 <= b < len(self.output_alphabet)):
                    raise ValueError(f"output letter {b} out of range")

    @cached_property
    def _by_state(self) -> dict[int, list[Edge]]:
        out: dict[int, list[Edge]] = {}
        for e in self.edges:
            out.setdefault(e[0], []).append(e)
        return out

    @cached_property
    def _live(self) -> frozenset[int]:
        """States from which some terminal is reachable (in zero or more edges)."""
        rev: dict[int, set[int]] = {}
        for src, _a, dst, _o in self.edges:
            rev.setdefault(dst, set()).add(src)
        seen = set(self.terminals)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for p in rev.get(s, ()):
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return frozenset(seen)

    @cached_property
    def max_output_len(self) -> int:
        return max((len(o) for _s, _a, _d, o in self.edges), default=1)

    def to_json(self) -> dict:
        return {
            "input_alphabet": list(self.input_alphabet.names),
            "output_alphabet": list(self.output_alphabet.names),
            "states": self.n_states,
            "initial": self.initial,
            "terminals": sorted(self.terminals),
            "edges": sorted(
                [s, self.input_alphabet.names[a], d, self.output_alphabet.format(o)]
                for s, a, d, o in self.edges
            ),
        }

    @staticmethod
    def from_json(data: dict) -> "Gsm":
        try:
            ia = Alphabet(tuple(data["input_alphabet"]))
            oa = Alphabet(tuple(data["output_alphabet"]))
            edges = frozenset(
                (int(s), ia.index(a), int(d), oa.word(o))
                for s, a, d, o in data["edges"]
            )
            return Gsm(
                int(data["states"]), ia, oa, edges,
                int(data["initial"]), frozenset(int(t) for t in data["terminals"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed gsm JSON: {exc}") from exc

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")

    @staticmethod
    def load(path: str) -> "Gsm":
        with open(path) as fh:
            return Gsm.from_json(json.load(fh))


def eta(g: Gsm, x: Fsa) -> Fsa:
    """Language of outputs of successful runs whose input lies in x.

    Runs of zero edges never count, so the empty input contributes nothing.
    """
    if x.alphabet.names != g.input_alphabet.names:
        raise ValueError("input language alphabet does not match the machine")
    dx = x.dfa
    tx = {(s, a): t for s, a, t in dx.transitions}

    # state: (machine state, input-dfa state, pending output tail, started)
    start = (g.initial, next(iter(dx.initial)), (), False)
    index: dict[tuple, int] = {start: 0}
    queue = deque([start])
    trans: set[tuple[int, int | None, int]] = set()
    finals: set[int] = set()

    def sid(state):
        i = index.get(state)
        if i is None:
            i = len(index)
            index[state] = i
            queue.append(state)
        return i

    while queue:
        state = queue.popleft()
        i = index[state]
        q, xs, pend, started = state
        if started and not pend and q in g.terminals and xs in dx.finals:
            finals.add(i)
        if pend:
            trans.add((i, pend[0], sid((q, xs, pend[1:], started))))
            continue
        for _s, a, dst, out in g._by_state.get(q, ()):
            x2 = tx.get((xs, a))
            if x2 is None:
                continue
            trans.add((i, out[0], sid((dst, x2, out[1:], True))))
    raw = Fsa(g.output_alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return raw.minimize()


def bounded_output_variance(g: Gsm, cap: int) -> int | None:
    """Spread of output lengths across equal-input-length run pairs, capped.

    Considers every pair of paths from the start state whose states can still
    reach a terminal, advancing both by one edge at a time.  Returns the
    largest output-length gap seen, or None when it exceeds cap.
    """
    live = g._live
    if g.initial not in live:
        return 0
    start = (g.initial, g.initial, 0)
    seen = {start}
    stack = [start]
    best = 0
    while stack:
        s1, s2, d = stack.pop()
        if abs(d) > cap:
            return None
        best = max(best, abs(d))
        for e1 in g._by_state.get(s1, ()):
            for e2 in g._by_state.get(s2, ()):
                if e1[2] not in live or e2[2] not in live:
                    continue
                d2 = d + len(e1[3]) - len(e2[3])
                d2 = max(-(cap + 1), min(cap + 1, d2))
                nxt = (e1[2], e2[2], d2)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return best


def zeta(g: Gsm, m: PairRelation, c: int) -> PairRelation:
    """Transport a relation on input words to the relation on output words.

    Relates (w, z) exactly when some (u, v) in m has a successful run on u
    emitting w and one on v emitting z.  Both runs are simulated in input
    lockstep while m reads the packed (u, v); unemitted output tails wait in
    per-side buffers whose size the variance bound c controls, which is why
    c is verified against the machine before anything is built.
    """
    if m.pairs.base.names != g.input_alphabet.names:
        raise ValueError("relation base does not match the machine input")
    var = bounded_output_variance(g, c)
    if var is None:
        raise VarianceViolation(f"output-length spread exceeds {c}")
    out_pa = PaddedAlphabet(g.output_alphabet)
    in_pa = m.pairs
    pad_in = in_pa.pad
    dm = m.fsa.dfa
    tm = {(s, a): t for s, a, t in dm.transitions}
    DONE = -1
    pend_cap = c + g.max_output_len

    # state: (m state, run1 state or DONE, run2 state or DONE,
    #         pending output of run1, of run2, started1, started2)
    start = (next(iter(dm.initial)), g.initial, g.initial, (), (), False, False)
    index: dict[tuple, int] = {start: 0}
    queue = deque([start])
    trans: set[tuple[int, int | None, int]] = set()
    finals: set[int] = set()

    def sid(state):
        i = index.get(state)
        if i is None:
            i = len(index)
            index[state] = i
            queue.append(state)
        return i

    while queue:
        state = queue.popleft()
        i = index[state]
        qm, r1, r2, p1, p2, st1, st2 = state
        if (r1 == DONE and r2 == DONE and not p1 and not p2
                and qm in dm.finals):
            finals.add(i)

        # declare an input word finished (runs must be nonempty and terminal)
        if r1 != DONE and st1 and r1 in g.terminals:
            trans.add((i, None, sid((qm, DONE, r2, p1, p2, st1, st2))))
        if r2 != DONE and st2 and r2 in g.terminals:
            trans.add((i, None, sid((qm, r1, DONE, p1, p2, st1, st2))))

        # lazy production: fire edges only when an emitted side has run dry
        if not p1 or not p2:
            if r1 != DONE and r2 != DONE:
                for _s, a1, d1, o1 in g._by_state.get(r1, ()):
                    for e2 in g._by_state.get(r2, ()):
                        q2 = tm.get((qm, in_pa.pair(a1, e2[1])))
                        if q2 is None:
                            continue
                        n1, n2 = p1 + o1, p2 + e2[3]
                        if len(n1) <= pend_cap and len(n2) <= pend_cap:
                            trans.add((i, None, sid((q2, d1, e2[2], n1, n2, True, True))))
            elif r1 != DONE:
                for _s, a1, d1, o1 in g._by_state.get(r1, ()):
                    q2 = tm.get((qm, in_pa.pair(a1, pad_in)))
                    if q2 is None:
                        continue
                    n1 = p1 + o1
                    if len(n1) <= pend_cap:
                        trans.add((i, None, sid((q2, d1, r2, n1, p2, True, st2))))
            elif r2 != DONE:
                for _s, a2, d2, o2 in g._by_state.get(r2, ()):
                    q2 = tm.get((qm, in_pa.pair(pad_in, a2)))
                    if q2 is None:
                        continue
                    n2 = p2 + o2
                    if len(n2) <= pend_cap:
                        trans.add((i, None, sid((q2, r1, d2, p1, n2, st1, True))))

        # consume one packed output letter
        pad_out = out_pa.pad
        for b1 in list(range(len(g.output_alphabet))) + [pad_out]:
            if b1 == pad_out:
                if p1 or r1 != DONE:
                    continue
            elif not p1 or p1[0] != b1:
                continue
            for b2 in list(range(len(g.output_alphabet))) + [pad_out]:
                if b1 == pad_out and b2 == pad_out:
                    continue
                if b2 == pad_out:
                    if p2 or r2 != DONE:
                        continue
                elif not p2 or p2[0] != b2:
                    continue
                n1 = p1[1:] if b1 != pad_out else p1
                n2 = p2[1:] if b2 != pad_out else p2
                trans.add((i, out_pa.pair(b1, b2), sid((qm, r1, r2, n1, n2, st1, st2))))
    raw = Fsa(out_pa.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return PairRelation(out_pa, raw.minimize())
