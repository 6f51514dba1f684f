"""Finite-automaton kernel over named alphabets.

Automata here are nondeterministic with optional epsilon moves.  Every value
is immutable: operations return fresh automata, so instances can be shared
freely (including across threads) and cached derived forms never go stale.

Words are tuples of letter indices into an :class:`Alphabet`.  The alphabet
owns the names; automata only ever see indices.  Parsing and formatting of
human-readable words ("a b c", or "abc" when every letter is a single
character) live on the alphabet.

A determinized twin of each automaton is computed lazily and cached, so
membership tests after the first are a plain table walk.
"""
from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Word = tuple[int, ...]

DEFAULT_ENUM_CAP = 10**6
ENUM_CAP_ENV = "AUTSEM_ENUM_CAP"


class AlphabetMismatch(ValueError):
    """Raised when two automata over different alphabets are combined."""


class EnumerationCap(RuntimeError):
    """Raised when an enumeration would exceed its configured cap."""


def enum_cap_from_env(default: int = DEFAULT_ENUM_CAP) -> int:
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None:
        return default
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ValueError(f"{ENUM_CAP_ENV} must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise ValueError(f"{ENUM_CAP_ENV} must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class Alphabet:
    """An ordered sequence of distinct, printable letter names."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.names, tuple):
            object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise ValueError("alphabet must have at least one letter")
        seen = set()
        for nm in self.names:
            if not nm or not nm.isprintable() or any(ch.isspace() for ch in nm):
                raise ValueError(f"bad letter name {nm!r}")
            if nm in seen:
                raise ValueError(f"duplicate letter name {nm!r}")
            seen.add(nm)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {nm: i for i, nm in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown letter {name!r} (alphabet: {', '.join(self.names)})") from None

    def word(self, text: str | Sequence[str]) -> Word:
        """Parse a word.

        Accepts whitespace-separated letter names, a sequence of names, or,
        when every alphabet letter is a single character, a bare string of
        characters ("abc").  The empty string is the empty word.
        """
        if not isinstance(text, str):
            return tuple(self.index(nm) for nm in text)
        tokens = text.split()
        if not tokens:
            return ()
        if all(t in self._index for t in tokens):
            return tuple(self._index[t] for t in tokens)
        if len(tokens) == 1 and all(ch in self._index for ch in tokens[0]):
            return tuple(self._index[ch] for ch in tokens[0])
        bad = [t for t in tokens if t not in self._index]
        raise ValueError(f"unknown letters {bad} (alphabet: {', '.join(self.names)})")

    def format(self, w: Word) -> str:
        if all(len(nm) == 1 for nm in self.names):
            return "".join(self.names[i] for i in w)
        return " ".join(self.names[i] for i in w)


def _check_same(a: Alphabet, b: Alphabet) -> None:
    if a.names != b.names:
        raise AlphabetMismatch(f"alphabet mismatch: {a.names} vs {b.names}")


Transition = tuple[int, int | None, int]  # (src, letter index or None for epsilon, dst)


@dataclass(frozen=True)
class Fsa:
    """Nondeterministic finite automaton, possibly with epsilon moves.

    States are 0..n_states-1.  A transition label of None is an epsilon move.
    """

    alphabet: Alphabet
    n_states: int
    initial: frozenset[int]
    finals: frozenset[int]
    transitions: frozenset[Transition]

    def __post_init__(self) -> None:
        for s in self.initial | self.finals:
            if not (0 <= s < self.n_states):
                raise ValueError(f"state {s} out of range")
        nletters = len(self.alphabet)
        for src, lab, dst in self.transitions:
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise ValueError(f"transition ({src},{lab},{dst}) out of range")
            if lab is not None and not (0 <= lab < nletters):
                raise ValueError(f"transition label {lab} out of range")

    # ------------------------------------------------------------------
    # structure maps

    @cached_property
    def _arcs(self) -> dict[int, dict[int, set[int]]]:
        out: dict[int, dict[int, set[int]]] = {}
        for src, lab, dst in self.transitions:
            if lab is not None:
                out.setdefault(src, {}).setdefault(lab, set()).add(dst)
        return out

    @cached_property
    def _eps(self) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {}
        for src, lab, dst in self.transitions:
            if lab is None:
                out.setdefault(src, set()).add(dst)
        return out

    def _closure(self, states: Iterable[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(seen)
        eps = self._eps
        while stack:
            s = stack.pop()
            for t in eps.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    @cached_property
    def _is_dfa(self) -> bool:
        if self._eps or len(self.initial) != 1:
            return False
        seen: set[tuple[int, int]] = set()
        for src, lab, _dst in self.transitions:
            key = (src, lab)  # type: ignore[assignment]
            if key in seen:
                return False
            seen.add(key)
        return True

    @cached_property
    def dfa(self) -> "Fsa":
        """A deterministic (not necessarily complete) twin, cached."""
        return self if self._is_dfa else self.determinize()

    @cached_property
    def _dfa_table(self) -> tuple[int, dict[tuple[int, int], int], frozenset[int]]:
        d = self.dfa
        table = {(src, lab): dst for src, lab, dst in d.transitions if lab is not None}
        return (next(iter(d.initial)), table, d.finals)

    # ------------------------------------------------------------------
    # membership and emptiness

    def accepts(self, w: Word | str) -> bool:
        if isinstance(w, str):
            w = self.alphabet.word(w)
        q0, table, finals = self._dfa_table
        q = q0
        for a in w:
            nxt = table.get((q, a))
            if nxt is None:
                return False
            q = nxt
        return q in finals

    def is_empty(self) -> bool:
        return self._reachable().isdisjoint(self.finals)

    def _reachable(self) -> frozenset[int]:
        seen = set(self.initial)
        stack = list(seen)
        arcs = self._arcs
        eps = self._eps
        while stack:
            s = stack.pop()
            nbrs = list(eps.get(s, ()))
            for targets in arcs.get(s, {}).values():
                nbrs.extend(targets)
            for t in nbrs:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def _live(self) -> frozenset[int]:
        """States from which some final state is reachable."""
        rev: dict[int, set[int]] = {}
        for src, _lab, dst in self.transitions:
            rev.setdefault(dst, set()).add(src)
        seen = set(self.finals)
        stack = list(seen)
        while stack:
            s = stack.pop()
            for t in rev.get(s, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    # ------------------------------------------------------------------
    # determinization, minimization, equivalence

    def determinize(self) -> "Fsa":
        start = self._closure(self.initial)
        index: dict[frozenset[int], int] = {start: 0}
        order: list[frozenset[int]] = [start]
        trans: set[Transition] = set()
        finals: set[int] = set()
        arcs = self._arcs
        queue = deque([start])
        while queue:
            subset = queue.popleft()
            sid = index[subset]
            if subset & self.finals:
                finals.add(sid)
            by_letter: dict[int, set[int]] = {}
            for s in subset:
                for lab, targets in arcs.get(s, {}).items():
                    by_letter.setdefault(lab, set()).update(targets)
            for lab, targets in by_letter.items():
                nxt = self._closure(targets)
                tid = index.get(nxt)
                if tid is None:
                    tid = len(order)
                    index[nxt] = tid
                    order.append(nxt)
                    queue.append(nxt)
                trans.add((sid, lab, tid))
        return Fsa(self.alphabet, len(order), frozenset([0]), frozenset(finals), frozenset(trans))

    def complete(self) -> "Fsa":
        """Deterministic completion: every (state, letter) has an arc (sink added if needed)."""
        d = self.dfa
        table = {(src, lab): dst for src, lab, dst in d.transitions}
        nletters = len(self.alphabet)
        need_sink = any((q, a) not in table for q in range(d.n_states) for a in range(nletters))
        if not need_sink:
            return d
        sink = d.n_states
        trans = set(d.transitions)
        for q in range(d.n_states + 1):
            for a in range(nletters):
                if (q, a) not in table:
                    trans.add((q, a, sink))
        return Fsa(self.alphabet, d.n_states + 1, d.initial, d.finals, frozenset(trans))

    def minimize(self) -> "Fsa":
        """Minimal complete DFA for the same language (Hopcroft refinement)."""
        d = self.complete()
        # restrict to reachable states first
        reach = sorted(d._reachable())
        remap = {s: i for i, s in enumerate(reach)}
        n = len(reach)
        nletters = len(self.alphabet)
        table = [[0] * nletters for _ in range(n)]
        for src, lab, dst in d.transitions:
            if src in remap and dst in remap and lab is not None:
                table[remap[src]][lab] = remap[dst]
        finals = {remap[s] for s in d.finals if s in remap}
        init = remap[next(iter(d.initial))]

        # Hopcroft
        preimg: list[dict[int, set[int]]] = [dict() for _ in range(nletters)]
        for q in range(n):
            for a in range(nletters):
                preimg[a].setdefault(table[q][a], set()).add(q)
        fin = frozenset(finals)
        nonfin = frozenset(range(n)) - fin
        partition: list[set[int]] = [set(b) for b in (fin, nonfin) if b]
        of_state = {}
        for bi, block in enumerate(partition):
            for q in block:
                of_state[q] = bi
        work: deque[tuple[int, int]] = deque()
        for bi in range(len(partition)):
            for a in range(nletters):
                work.append((bi, a))
        while work:
            bi, a = work.popleft()
            splitter = partition[bi]
            pre: set[int] = set()
            for q in splitter:
                pre |= preimg[a].get(q, set())
            touched: dict[int, set[int]] = {}
            for q in pre:
                touched.setdefault(of_state[q], set()).add(q)
            for ci, inter in touched.items():
                block = partition[ci]
                if len(inter) == len(block):
                    continue
                rest = block - inter
                # keep the smaller piece as the new block
                if len(inter) <= len(rest):
                    new, old = inter, rest
                else:
                    new, old = rest, inter
                partition[ci] = old
                ni = len(partition)
                partition.append(new)
                for q in new:
                    of_state[q] = ni
                for b in range(nletters):
                    work.append((ni, b))
        ninit = of_state[init]
        ntrans = set()
        nfinals = set()
        for bi, block in enumerate(partition):
            q = next(iter(block))
            if q in finals:
                nfinals.add(bi)
            for a in range(nletters):
                ntrans.add((bi, a, of_state[table[q][a]]))
        return Fsa(self.alphabet, len(partition), frozenset([ninit]), frozenset(nfinals), frozenset(ntrans))

    def equivalent(self, other: "Fsa") -> bool:
        _check_same(self.alphabet, other.alphabet)
        return (self - other).is_empty() and (other - self).is_empty()

    # ------------------------------------------------------------------
    # boolean and rational operations

    def _shifted(self, k: int) -> set[Transition]:
        return {(s + k, lab, d + k) for s, lab, d in self.transitions}

    def union(self, other: "Fsa") -> "Fsa":
        _check_same(self.alphabet, other.alphabet)
        k = self.n_states
        trans = set(self.transitions) | other._shifted(k)
        return Fsa(
            self.alphabet,
            k + other.n_states,
            self.initial | frozenset(s + k for s in other.initial),
            self.finals | frozenset(s + k for s in other.finals),
            frozenset(trans),
        )

    def concat(self, other: "Fsa") -> "Fsa":
        _check_same(self.alphabet, other.alphabet)
        k = self.n_states
        trans = set(self.transitions) | other._shifted(k)
        for f in self.finals:
            for i in other.initial:
                trans.add((f, None, i + k))
        return Fsa(
            self.alphabet,
            k + other.n_states,
            self.initial,
            frozenset(s + k for s in other.finals),
            frozenset(trans),
        )

    def star(self) -> "Fsa":
        hub = self.n_states
        trans = set(self.transitions)
        for i in self.initial:
            trans.add((hub, None, i))
        for f in self.finals:
            trans.add((f, None, hub))
        return Fsa(self.alphabet, hub + 1, frozenset([hub]), frozenset([hub]), frozenset(trans))

    def plus(self) -> "Fsa":
        trans = set(self.transitions)
        for f in self.finals:
            for i in self.initial:
                trans.add((f, None, i))
        return Fsa(self.alphabet, self.n_states, self.initial, self.finals, frozenset(trans))

    def complement(self) -> "Fsa":
        d = self.complete()
        return Fsa(d.alphabet, d.n_states, d.initial, frozenset(range(d.n_states)) - d.finals, d.transitions)

    def intersect(self, other: "Fsa") -> "Fsa":
        _check_same(self.alphabet, other.alphabet)
        d1, d2 = self.dfa, other.dfa
        t1 = {(s, a): t for s, a, t in d1.transitions}
        t2 = {(s, a): t for s, a, t in d2.transitions}
        start = (next(iter(d1.initial)), next(iter(d2.initial)))
        index = {start: 0}
        queue = deque([start])
        trans: set[Transition] = set()
        finals: set[int] = set()
        while queue:
            pair = queue.popleft()
            sid = index[pair]
            q1, q2 = pair
            if q1 in d1.finals and q2 in d2.finals:
                finals.add(sid)
            for a in range(len(self.alphabet)):
                n1 = t1.get((q1, a))
                n2 = t2.get((q2, a))
                if n1 is None or n2 is None:
                    continue
                nxt = (n1, n2)
                tid = index.get(nxt)
                if tid is None:
                    tid = len(index)
                    index[nxt] = tid
                    queue.append(nxt)
                trans.add((sid, a, tid))
        return Fsa(self.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))

    def difference(self, other: "Fsa") -> "Fsa":
        """Words of self not accepted by other."""
        _check_same(self.alphabet, other.alphabet)
        d1, d2 = self.dfa, other.dfa
        t1 = {(s, a): t for s, a, t in d1.transitions}
        t2 = {(s, a): t for s, a, t in d2.transitions}
        SINK = -1
        start = (next(iter(d1.initial)), next(iter(d2.initial)))
        index = {start: 0}
        queue = deque([start])
        trans: set[Transition] = set()
        finals: set[int] = set()
        while queue:
            pair = queue.popleft()
            sid = index[pair]
            q1, q2 = pair
            if q1 in d1.finals and (q2 == SINK or q2 not in d2.finals):
                finals.add(sid)
            for a in range(len(self.alphabet)):
                n1 = t1.get((q1, a))
                if n1 is None:
                    continue
                n2 = SINK if q2 == SINK else t2.get((q2, a), SINK)
                nxt = (n1, n2)
                tid = index.get(nxt)
                if tid is None:
                    tid = len(index)
                    index[nxt] = tid
                    queue.append(nxt)
                trans.add((sid, a, tid))
        return Fsa(self.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))

    __or__ = union
    __and__ = intersect
    __add__ = concat
    __sub__ = difference

    # ------------------------------------------------------------------
    # relabelings

    def rename(self, alphabet: Alphabet, mapping: Mapping[int, int] | None = None) -> "Fsa":
        """Same structure over a new alphabet; mapping sends old letter indices to new."""
        if mapping is None:
            if len(alphabet) != len(self.alphabet):
                raise ValueError("rename without mapping needs an equal-size alphabet")
            mapping = {i: i for i in range(len(alphabet))}
        trans = frozenset(
            (s, None if lab is None else mapping[lab], d) for s, lab, d in self.transitions
        )
        return Fsa(alphabet, self.n_states, self.initial, self.finals, trans)

    def map_letters(self, alphabet: Alphabet, images: Callable[[int], Word | None]) -> "Fsa":
        """Homomorphic image: each letter becomes a (possibly empty) word over `alphabet`.

        An image of None deletes every arc on that letter.
        """
        trans: set[Transition] = set()
        n = self.n_states
        extra = 0
        for src, lab, dst in self.transitions:
            if lab is None:
                trans.add((src, None, dst))
                continue
            img = images(lab)
            if img is None:
                continue
            if len(img) == 0:
                trans.add((src, None, dst))
            elif len(img) == 1:
                trans.add((src, img[0], dst))
            else:
                prev = src
                for a in img[:-1]:
                    mid = n + extra
                    extra += 1
                    trans.add((prev, a, mid))
                    prev = mid
                trans.add((prev, img[-1], dst))
        return Fsa(alphabet, n + extra, self.initial, self.finals, frozenset(trans))

    # ------------------------------------------------------------------
    # enumeration

    def enumerate_words(self, max_len: int, cap: int | None = None) -> list[Word]:
        """All accepted words of length <= max_len in shortlex order.

        Raises EnumerationCap if more than `cap` words would be produced
        (default 10**6, or the AUTSEM_ENUM_CAP environment override).
        """
        if cap is None:
            cap = enum_cap_from_env()
        d = self.dfa
        table: dict[int, list[tuple[int, int]]] = {}
        for src, lab, dst in d.transitions:
            table.setdefault(src, []).append((lab, dst))
        for lst in table.values():
            lst.sort()
        # min distance to a final state, for exact pruning
        rev: dict[int, set[int]] = {}
        for src, _lab, dst in d.transitions:
            rev.setdefault(dst, set()).add(src)
        INF = max_len + 1
        dist = {q: INF for q in range(d.n_states)}
        queue = deque()
        for f in d.finals:
            dist[f] = 0
            queue.append(f)
        while queue:
            s = queue.popleft()
            for p in rev.get(s, ()):
                if dist[p] > dist[s] + 1:
                    dist[p] = dist[s] + 1
                    queue.append(p)
        out: list[Word] = []
        q0 = next(iter(d.initial))
        if dist.get(q0, INF) > max_len:
            return out
        level: list[tuple[Word, int]] = [((), q0)]
        for length in range(max_len + 1):
            for w, q in level:
                if q in d.finals:
                    out.append(w)
                    if len(out) > cap:
                        raise EnumerationCap(f"enumeration exceeds cap {cap}")
            if length == max_len:
                break
            nxt: list[tuple[Word, int]] = []
            remaining = max_len - length - 1
            for w, q in level:
                for lab, dst in table.get(q, ()):
                    if dist.get(dst, INF) <= remaining:
                        nxt.append((w + (lab,), dst))
            level = nxt
            if not level:
                break
        return out

    def shortlex_least(self) -> Word | None:
        """The shortlex-least accepted word, or None when the language is empty."""
        d = self.dfa
        if d.is_empty():
            return None
        table: dict[int, list[tuple[int, int]]] = {}
        for src, lab, dst in d.transitions:
            table.setdefault(src, []).append((lab, dst))
        for lst in table.values():
            lst.sort()
        q0 = next(iter(d.initial))
        level: dict[int, Word] = {q0: ()}
        for _ in range(d.n_states + 1):
            hits = [w for q, w in level.items() if q in d.finals]
            if hits:
                return min(hits)
            nxt: dict[int, Word] = {}
            for q, w in level.items():
                for lab, dst in table.get(q, ()):
                    cand = w + (lab,)
                    if dst not in nxt or cand < nxt[dst]:
                        nxt[dst] = cand
            level = nxt
            if not level:
                break
        return None  # every state of the determinized form is reachable, so we never get here

    # ------------------------------------------------------------------
    # constructors

    @staticmethod
    def empty(alphabet: Alphabet) -> "Fsa":
        return Fsa(alphabet, 1, frozenset([0]), frozenset(), frozenset())

    @staticmethod
    def epsilon(alphabet: Alphabet) -> "Fsa":
        return Fsa(alphabet, 1, frozenset([0]), frozenset([0]), frozenset())

    @staticmethod
    def word(alphabet: Alphabet, w: Word | str) -> "Fsa":
        if isinstance(w, str):
            w = alphabet.word(w)
        n = len(w) + 1
        trans = frozenset((i, a, i + 1) for i, a in enumerate(w))
        return Fsa(alphabet, n, frozenset([0]), frozenset([n - 1]), trans)

    @staticmethod
    def letters(alphabet: Alphabet, idxs: Iterable[int] | None = None) -> "Fsa":
        if idxs is None:
            idxs = range(len(alphabet))
        trans = frozenset((0, a, 1) for a in idxs)
        return Fsa(alphabet, 2, frozenset([0]), frozenset([1]), trans)

    @staticmethod
    def from_words(alphabet: Alphabet, words: Iterable[Word | str]) -> "Fsa":
        """Finite language given explicitly (prefix-tree construction)."""
        root = 0
        nodes: list[dict[int, int]] = [{}]
        finals: set[int] = set()
        for w in words:
            if isinstance(w, str):
                w = alphabet.word(w)
            cur = root
            for a in w:
                nxt = nodes[cur].get(a)
                if nxt is None:
                    nxt = len(nodes)
                    nodes.append({})
                    nodes[cur][a] = nxt
                cur = nxt
            finals.add(cur)
        trans = frozenset((s, a, d) for s, kids in enumerate(nodes) for a, d in kids.items())
        return Fsa(alphabet, len(nodes), frozenset([root]), frozenset(finals), trans)

    @staticmethod
    def universe(alphabet: Alphabet) -> "Fsa":
        trans = frozenset((0, a, 0) for a in range(len(alphabet)))
        return Fsa(alphabet, 1, frozenset([0]), frozenset([0]), trans)

    @staticmethod
    def nonempty_universe(alphabet: Alphabet) -> "Fsa":
        return Fsa.letters(alphabet).plus()

    # ------------------------------------------------------------------
    # serialization

    def to_json(self) -> dict:
        return {
            "alphabet": list(self.alphabet.names),
            "states": self.n_states,
            "initial": sorted(self.initial),
            "finals": sorted(self.finals),
            "transitions": sorted(
                [s, "" if lab is None else self.alphabet.names[lab], d]
                for s, lab, d in self.transitions
            ),
        }

    @staticmethod
    def from_json(data: dict) -> "Fsa":
        try:
            ab = Alphabet(tuple(data["alphabet"]))
            n = int(data["states"])
            initial = frozenset(int(s) for s in data["initial"])
            finals = frozenset(int(s) for s in data["finals"])
            trans = set()
            for item in data["transitions"]:
                src, name, dst = item
                lab = None if name == "" else ab.index(name)
                trans.add((int(src), lab, int(dst)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed automaton JSON: {exc}") from exc
        return Fsa(ab, n, initial, finals, frozenset(trans))

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")

    @staticmethod
    def load(path: str) -> "Fsa":
        with open(path) as fh:
            return Fsa.from_json(json.load(fh))

    # ------------------------------------------------------------------
    # graphviz

    def to_dot(self, name: str = "fsa") -> str:
        def q(s: str) -> str:
            return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

        lines = [f"digraph {q(name)} {{", "  rankdir=LR;", '  node [shape=circle];']
        for f in sorted(self.finals):
            lines.append(f"  {f} [shape=doublecircle];")
        for i, s in enumerate(sorted(self.initial)):
            lines.append(f"  __start{i} [shape=none, label=\"\"];")
            lines.append(f"  __start{i} -> {s};")
        grouped: dict[tuple[int, int], list[str]] = {}
        for src, lab, dst in sorted(self.transitions, key=lambda t: (t[0], t[2], -1 if t[1] is None else t[1])):
            label = "ε" if lab is None else self.alphabet.names[lab]
            grouped.setdefault((src, dst), []).append(label)
        for (src, dst), labels in sorted(grouped.items()):
            lines.append(f"  {src} -> {dst} [label={q(', '.join(labels))}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def combine(op: str, x: Fsa, y: Fsa | None = None) -> Fsa:
    """Dispatch form of the boolean/rational algebra.

    op is one of union, intersect, concat, star, plus, complement, difference.
    """
    unary = {"star": Fsa.star, "plus": Fsa.plus, "complement": Fsa.complement}
    binary = {"union": Fsa.union, "intersect": Fsa.intersect, "concat": Fsa.concat, "difference": Fsa.difference}
    if op in unary:
        if y is not None:
            raise ValueError(f"{op} takes one operand")
        return unary[op](x)
    if op in binary:
        if y is None:
            raise ValueError(f"{op} takes two operands")
        return binary[op](x, y)
    raise ValueError(f"unknown operation {op!r}")
