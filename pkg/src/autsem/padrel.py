"""Relations on padded pairs of words.

A pair of words over a common base alphabet is packed into a single word over
a pair alphabet by writing the two words in parallel and padding the shorter
one on the right with the marker $.  A regular language of such packed words
is a word relation we can compute with: intersect, compose, concatenate
pairwise, apply to a word, and so on.

The packed form is only meaningful when the padding is well formed: $ never
occurs on both sides of one letter, and once a side is padded it stays padded.
Operations in this module both assume and preserve that shape.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Hashable, Iterable

from .fsa import Alphabet, Fsa, Word

PAD_NAME = "$"


class PaddingError(ValueError):
    """A packed word violates the padding discipline."""


class BoundViolation(ValueError):
    """A relation exceeds the length-difference bound a construction relies on."""


@dataclass(frozen=True)
class PaddedAlphabet:
    """The alphabet of side pairs over a base: (x,y), (x,$), ($,y)."""

    base: Alphabet

    def __post_init__(self) -> None:
        if PAD_NAME in self.base.names:
            raise ValueError(f"base alphabet must not contain the padding name {PAD_NAME!r}")

    @property
    def pad(self) -> int:
        """The side code used for $; one past the last base letter."""
        return len(self.base)

    @cached_property
    def alphabet(self) -> Alphabet:
        n = len(self.base)
        ext = self.base.names + (PAD_NAME,)
        # Separator must out-run any pipe run inside a component name, or
        # nested pair alphabets (pairs of pair letters) collide: ("$|a","$")
        # and ("$","a|$") would both print as "$|a|$".
        longest = 0
        for nm in ext:
            run = 0
            for ch in nm:
                run = run + 1 if ch == "|" else 0
                longest = max(longest, run)
        sep = "|" * (longest + 1)
        names = [
            f"{ext[l]}{sep}{ext[r]}"
            for l in range(n + 1)
            for r in range(n + 1)
            if not (l == n and r == n)
        ]
        return Alphabet(tuple(names))

    # ($,$) would be the last row-major cell, so plain l*(n+1)+r indexes
    # every kept pair without adjustment.
    def pair(self, left: int, right: int) -> int:
        n = len(self.base)
        if left == n and right == n:
            raise ValueError("($,$) is not a letter")
        if not (0 <= left <= n and 0 <= right <= n):
            raise ValueError(f"side code out of range: ({left},{right})")
        return left * (n + 1) + right

    def sides(self, idx: int) -> tuple[int, int]:
        return divmod(idx, len(self.base) + 1)

    def left(self, idx: int) -> int:
        return idx // (len(self.base) + 1)

    def right(self, idx: int) -> int:
        return idx % (len(self.base) + 1)

    def diag(self, letter: int) -> int:
        return self.pair(letter, letter)

    def convolve(self, w1: Word | str, w2: Word | str) -> Word:
        """Pack two base words into one pair word, padding the shorter."""
        if isinstance(w1, str):
            w1 = self.base.word(w1)
        if isinstance(w2, str):
            w2 = self.base.word(w2)
        n = len(self.base)
        out = []
        for i in range(max(len(w1), len(w2))):
            l = w1[i] if i < len(w1) else n
            r = w2[i] if i < len(w2) else n
            out.append(self.pair(l, r))
        return tuple(out)

    def deconvolve(self, w: Word) -> tuple[Word, Word]:
        """Unpack a pair word; raises PaddingError unless well padded."""
        n = len(self.base)
        w1: list[int] = []
        w2: list[int] = []
        left_done = right_done = False
        for idx in w:
            l, r = self.sides(idx)
            if l == n:
                left_done = True
            elif left_done:
                raise PaddingError("left side resumes after padding")
            else:
                w1.append(l)
            if r == n:
                right_done = True
            elif right_done:
                raise PaddingError("right side resumes after padding")
            else:
                w2.append(r)
        return tuple(w1), tuple(w2)

    def is_well_padded(self, w: Word) -> bool:
        try:
            self.deconvolve(w)
        except PaddingError:
            return False
        return True


@dataclass(frozen=True)
class PairRelation:
    """A regular set of well-padded pair words, read as a relation on words."""

    pairs: PaddedAlphabet
    fsa: Fsa

    def __post_init__(self) -> None:
        if self.fsa.alphabet.names != self.pairs.alphabet.names:
            raise ValueError("automaton alphabet does not match the pair alphabet")

    def accepts_pair(self, w1: Word | str, w2: Word | str) -> bool:
        return self.fsa.accepts(self.pairs.convolve(w1, w2))

    def enumerate_pairs(self, max_len: int, cap: int | None = None) -> list[tuple[Word, Word]]:
        return [self.pairs.deconvolve(w) for w in self.fsa.enumerate_words(max_len, cap)]

    def is_empty(self) -> bool:
        return self.fsa.is_empty()

    def union(self, other: "PairRelation") -> "PairRelation":
        return PairRelation(self.pairs, self.fsa | other.fsa)

    def intersect(self, other: "PairRelation") -> "PairRelation":
        return PairRelation(self.pairs, self.fsa & other.fsa)

    def difference(self, other: "PairRelation") -> "PairRelation":
        return PairRelation(self.pairs, self.fsa - other.fsa)

    __or__ = union
    __and__ = intersect
    __sub__ = difference

    def minimized(self) -> "PairRelation":
        return PairRelation(self.pairs, self.fsa.minimize())

    @staticmethod
    def from_pairs(pa: PaddedAlphabet, items: Iterable[tuple[Word | str, Word | str]]) -> "PairRelation":
        words = [pa.convolve(u, v) for u, v in items]
        return PairRelation(pa, Fsa.from_words(pa.alphabet, words))

    @staticmethod
    def empty(pa: PaddedAlphabet) -> "PairRelation":
        return PairRelation(pa, Fsa.empty(pa.alphabet))


def convolve(pa: PaddedAlphabet, w1: Word | str, w2: Word | str) -> Word:
    return pa.convolve(w1, w2)


def deconvolve(pa: PaddedAlphabet, w: Word) -> tuple[Word, Word]:
    return pa.deconvolve(w)


def well_padded(pa: PaddedAlphabet) -> Fsa:
    """All well-padded pair words (both tracks live, then one padded to the end)."""
    n = len(pa.base)
    BOTH, LPAD, RPAD = 0, 1, 2
    trans: set[tuple[int, int | None, int]] = set()
    for l in range(n):
        for r in range(n):
            trans.add((BOTH, pa.pair(l, r), BOTH))
    for r in range(n):
        trans.add((BOTH, pa.pair(n, r), LPAD))
        trans.add((LPAD, pa.pair(n, r), LPAD))
    for l in range(n):
        trans.add((BOTH, pa.pair(l, n), RPAD))
        trans.add((RPAD, pa.pair(l, n), RPAD))
    return Fsa(pa.alphabet, 3, frozenset([BOTH]), frozenset([BOTH, LPAD, RPAD]), frozenset(trans))


def diagonal(pa: PaddedAlphabet, lang: Fsa) -> PairRelation:
    """{(w, w) : w in lang}."""
    if lang.alphabet.names != pa.base.names:
        raise ValueError("language alphabet does not match the pair base")
    return PairRelation(pa, lang.map_letters(pa.alphabet, lambda a: (pa.diag(a),)))


def times(pa: PaddedAlphabet, lang1: Fsa, lang2: Fsa) -> PairRelation:
    """Cartesian product {(u, v) : u in lang1, v in lang2}."""
    d1, d2 = lang1.dfa, lang2.dfa
    t1 = {(s, a): t for s, a, t in d1.transitions}
    t2 = {(s, a): t for s, a, t in d2.transitions}
    n = len(pa.base)
    BOTH, LDONE, RDONE = 0, 1, 2
    start = (next(iter(d1.initial)), next(iter(d2.initial)), BOTH)
    index = {start: 0}
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
        q1, q2, phase = state
        if q1 in d1.finals and q2 in d2.finals:
            finals.add(i)
        if phase == BOTH:
            for a in range(n):
                m1 = t1.get((q1, a))
                if m1 is None:
                    continue
                for b in range(n):
                    m2 = t2.get((q2, b))
                    if m2 is not None:
                        trans.add((i, pa.pair(a, b), sid((m1, m2, BOTH))))
                if q2 in d2.finals:
                    trans.add((i, pa.pair(a, n), sid((m1, q2, RDONE))))
            if q1 in d1.finals:
                for b in range(n):
                    m2 = t2.get((q2, b))
                    if m2 is not None:
                        trans.add((i, pa.pair(n, b), sid((q1, m2, LDONE))))
        elif phase == LDONE:
            for b in range(n):
                m2 = t2.get((q2, b))
                if m2 is not None:
                    trans.add((i, pa.pair(n, b), sid((q1, m2, LDONE))))
        else:
            for a in range(n):
                m1 = t1.get((q1, a))
                if m1 is not None:
                    trans.add((i, pa.pair(a, n), sid((m1, q2, RDONE))))
    fsa = Fsa(pa.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return PairRelation(pa, fsa.minimize())


def project(rel: PairRelation, side: int) -> Fsa:
    """Language of left (side 0) or right (side 1) components."""
    if side not in (0, 1):
        raise ValueError("side must be 0 or 1")
    pa = rel.pairs
    pick = pa.left if side == 0 else pa.right

    def im(idx: int) -> Word:
        c = pick(idx)
        return () if c == pa.pad else (c,)

    return rel.fsa.map_letters(pa.base, im)


def shortlex_less(pa: PaddedAlphabet) -> PairRelation:
    """{(u, v) : u precedes v in shortlex order} on well-padded input."""
    n = len(pa.base)
    SAME, LT, GT, SHORT = 0, 1, 2, 3
    trans: set[tuple[int, int | None, int]] = set()
    for a in range(n):
        for b in range(n):
            dst = SAME if a == b else (LT if a < b else GT)
            trans.add((SAME, pa.pair(a, b), dst))
            trans.add((LT, pa.pair(a, b), LT))
            trans.add((GT, pa.pair(a, b), GT))
    for b in range(n):
        for src in (SAME, LT, GT, SHORT):
            trans.add((src, pa.pair(n, b), SHORT))
    # (a,$) from anywhere means the left word is longer: never shortlex-less
    fsa = Fsa(pa.alphabet, 4, frozenset([SAME]), frozenset([LT, SHORT]), frozenset(trans))
    return PairRelation(pa, fsa)


def bounded_difference(rel: PairRelation, cap: int) -> int | None:
    """Largest length difference over all pairs, or None when it exceeds cap.

    Counts padded positions along accepting paths, clamped at cap+1, so the
    answer is exact whenever it is at most cap.
    """
    pa = rel.pairs
    m = rel.fsa
    live = m._live()
    arcs = m._arcs
    eps = m._eps
    pad = pa.pad
    best = 0
    start = [(q, 0) for q in m.initial if q in live]
    seen = set(start)
    stack = list(start)
    while stack:
        q, c = stack.pop()
        if c > cap:
            return None
        if q in m.finals and c > best:
            best = c
        nxt: list[tuple[int, int]] = []
        for t in eps.get(q, ()):
            nxt.append((t, c))
        for lab, targets in arcs.get(q, {}).items():
            l, r = pa.sides(lab)
            c2 = c + 1 if (l == pad or r == pad) else c
            for t in targets:
                nxt.append((t, min(c2, cap + 1)))
        for item in nxt:
            if item[0] in live and item not in seen:
                seen.add(item)
                stack.append(item)
    return best


def padded_product(m: PairRelation, n: PairRelation, c: int, verify: bool = True) -> PairRelation:
    """Pairwise concatenation {(u1 u2, v1 v2) : (u1,v1) in m, (u2,v2) in n}.

    Packed words interleave the junction, so the construction buffers up to c
    letters of whichever track of m runs long.  Requires every pair of m to
    have length difference at most c; with verify on this is checked first.
    """
    if m.pairs.base.names != n.pairs.base.names:
        raise ValueError("relations over different bases")
    if c < 0:
        raise ValueError("negative buffer bound")
    if verify:
        d = bounded_difference(m, c)
        if d is None:
            raise BoundViolation(f"left relation exceeds length-difference bound {c}")
    pa = m.pairs
    nbase = len(pa.base)
    pad = pa.pad
    dm = m.fsa.dfa
    dn = n.fsa.dfa
    tm = {(s, a): t for s, a, t in dm.transitions}
    tn = {(s, a): t for s, a, t in dn.transitions}
    n0 = next(iter(dn.initial))

    # states: ("m", q) synced on m
    #         ("lag", q, side, buf) m consuming its longer track, junction letters buffered
    #         ("n", r, side, buf) n running, buffer draining
    start = ("m", next(iter(dm.initial)))
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
        kind = state[0]
        if kind == "m":
            _, q = state
            for a in range(nbase):
                for b in range(nbase):
                    q2 = tm.get((q, pa.pair(a, b)))
                    if q2 is not None:
                        trans.add((i, pa.pair(a, b), sid(("m", q2))))
            trans.add((i, None, sid(("lag", q, "R", ()))))
            trans.add((i, None, sid(("lag", q, "L", ()))))
            if q in dm.finals:
                trans.add((i, None, sid(("n", n0, "R", ()))))
        elif kind == "lag":
            _, q, side, buf = state
            if side == "R":
                # m still reading (x,$); incoming right letters belong to n
                for x in range(nbase):
                    q2 = tm.get((q, pa.pair(x, pad)))
                    if q2 is None:
                        continue
                    for y in range(nbase):
                        if len(buf) < c:
                            trans.add((i, pa.pair(x, y), sid(("lag", q2, "R", buf + (y,)))))
                    trans.add((i, pa.pair(x, pad), sid(("lag", q2, "R", buf))))
            else:
                for y in range(nbase):
                    q2 = tm.get((q, pa.pair(pad, y)))
                    if q2 is None:
                        continue
                    for x in range(nbase):
                        if len(buf) < c:
                            trans.add((i, pa.pair(x, y), sid(("lag", q2, "L", buf + (x,)))))
                    trans.add((i, pa.pair(pad, y), sid(("lag", q2, "L", buf))))
            if q in dm.finals:
                trans.add((i, None, sid(("n", n0, side, buf))))
        else:
            _, r, side, buf = state
            if r in dn.finals and not buf:
                finals.add(i)
            if side == "R":
                for x in list(range(nbase)) + [pad]:
                    for y in list(range(nbase)) + [pad]:
                        if x == pad and y == pad:
                            continue
                        bot = buf[0] if buf else y
                        if x == pad and bot == pad:
                            continue
                        r2 = tn.get((r, pa.pair(x, bot)))
                        if r2 is None:
                            continue
                        if buf:
                            nb = buf[1:] + ((y,) if y != pad else ())
                        else:
                            nb = ()
                        trans.add((i, pa.pair(x, y), sid(("n", r2, "R", nb))))
                if buf:
                    r2 = tn.get((r, pa.pair(pad, buf[0])))
                    if r2 is not None:
                        trans.add((i, None, sid(("n", r2, "R", buf[1:]))))
            else:
                for x in list(range(nbase)) + [pad]:
                    for y in list(range(nbase)) + [pad]:
                        if x == pad and y == pad:
                            continue
                        top = buf[0] if buf else x
                        if top == pad and y == pad:
                            continue
                        r2 = tn.get((r, pa.pair(top, y)))
                        if r2 is None:
                            continue
                        if buf:
                            nb = buf[1:] + ((x,) if x != pad else ())
                        else:
                            nb = ()
                        trans.add((i, pa.pair(x, y), sid(("n", r2, "L", nb))))
                if buf:
                    r2 = tn.get((r, pa.pair(buf[0], pad)))
                    if r2 is not None:
                        trans.add((i, None, sid(("n", r2, "L", buf[1:]))))
    raw = Fsa(pa.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return PairRelation(pa, (raw & well_padded(pa)).minimize())


def compose(m: PairRelation, n: PairRelation, c: int, verify: bool = True) -> PairRelation:
    """Relational composition {(u, w) : exists v, (u,v) in m and (v,w) in n}.

    The middle word is guessed letter by letter while both operands run in
    lockstep, so no buffer is needed; c is only checked (when verify is on)
    as the promised length-difference bound on m.
    """
    if m.pairs.base.names != n.pairs.base.names:
        raise ValueError("relations over different bases")
    if verify:
        d = bounded_difference(m, c)
        if d is None:
            raise BoundViolation(f"left relation exceeds length-difference bound {c}")
    pa = m.pairs
    nbase = len(pa.base)
    pad = pa.pad
    dm = m.fsa.dfa
    dn = n.fsa.dfa
    tm = {(s, a): t for s, a, t in dm.transitions}
    tn = {(s, a): t for s, a, t in dn.transitions}

    start = (next(iter(dm.initial)), next(iter(dn.initial)), False)
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
        qm, qn, vdone = state
        if qm in dm.finals and qn in dn.finals:
            finals.add(i)
        if not vdone:
            trans.add((i, None, sid((qm, qn, True))))
            for x in list(range(nbase)) + [pad]:
                for y in list(range(nbase)) + [pad]:
                    if x == pad and y == pad:
                        continue
                    for g in range(nbase):
                        q2 = tm.get((qm, pa.pair(x, g)))
                        r2 = tn.get((qn, pa.pair(g, y)))
                        if q2 is not None and r2 is not None:
                            trans.add((i, pa.pair(x, y), sid((q2, r2, False))))
            # middle word outliving both outer words
            for g in range(nbase):
                q2 = tm.get((qm, pa.pair(pad, g)))
                r2 = tn.get((qn, pa.pair(g, pad)))
                if q2 is not None and r2 is not None:
                    trans.add((i, None, sid((q2, r2, False))))
        else:
            for x in range(nbase):
                q2 = tm.get((qm, pa.pair(x, pad)))
                if q2 is None:
                    continue
                trans.add((i, pa.pair(x, pad), sid((q2, qn, True))))
                for y in range(nbase):
                    r2 = tn.get((qn, pa.pair(pad, y)))
                    if r2 is not None:
                        trans.add((i, pa.pair(x, y), sid((q2, r2, True))))
            for y in range(nbase):
                r2 = tn.get((qn, pa.pair(pad, y)))
                if r2 is not None:
                    trans.add((i, pa.pair(pad, y), sid((qm, r2, True))))
    raw = Fsa(pa.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return PairRelation(pa, (raw & well_padded(pa)).minimize())


def apply(m: PairRelation, w: Word | str) -> Fsa:
    """The image {v : (w, v) in m} as a language over the base alphabet."""
    pa = m.pairs
    if isinstance(w, str):
        w = pa.base.word(w)
    pad = pa.pad
    dm = m.fsa.dfa
    tm = {(s, a): t for s, a, t in dm.transitions}
    start = (0, next(iter(dm.initial)))
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
        pos, q = state
        if pos == len(w) and q in dm.finals:
            finals.add(i)
        top = w[pos] if pos < len(w) else pad
        npos = min(pos + 1, len(w))
        for y in range(len(pa.base)):
            q2 = tm.get((q, pa.pair(top, y)))
            if q2 is not None:
                trans.add((i, y, sid((npos, q2))))
        if pos < len(w):
            q2 = tm.get((q, pa.pair(top, pad)))
            if q2 is not None:
                trans.add((i, None, sid((npos, q2))))
    raw = Fsa(pa.base, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return raw.minimize()


def preimage_wordmap(
    m: PairRelation,
    new_pa: PaddedAlphabet,
    images: Callable[[int], Word | None],
    c: int,
) -> PairRelation:
    """Pull m back through a letter-to-word substitution.

    Result relates (x, y) over new_pa.base exactly when the substituted words
    are related by m.  Image words may be empty; an image of None excludes the
    letter entirely.  The two substituted tracks advance at different rates;
    c bounds how far one may run ahead mid-word (pairs needing more are lost,
    so pick c at least the worst skew any related pair can reach).
    """
    pa = m.pairs
    pad = pa.pad
    dm = m.fsa.dfa
    tm = {(s, a): t for s, a, t in dm.transitions}

    imgs: dict[int, Word | None] = {a: images(a) for a in range(len(new_pa.base))}

    start = (next(iter(dm.initial)), (), ())
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

    def feed(q: int, lbuf: tuple, rbuf: tuple):
        k = min(len(lbuf), len(rbuf))
        for j in range(k):
            q = tm.get((q, pa.pair(lbuf[j], rbuf[j])))
            if q is None:
                return None
        return q, lbuf[k:], rbuf[k:]

    while queue:
        state = queue.popleft()
        i = index[state]
        q, lbuf, rbuf = state
        if q in dm.finals and not lbuf and not rbuf:
            finals.add(i)
        npad = new_pa.pad
        for a in list(range(len(new_pa.base))) + [npad]:
            ia = () if a == npad else imgs[a]
            if ia is None:
                continue
            for b in list(range(len(new_pa.base))) + [npad]:
                if a == npad and b == npad:
                    continue
                ib = () if b == npad else imgs[b]
                if ib is None:
                    continue
                fed = feed(q, lbuf + tuple(ia), rbuf + tuple(ib))
                if fed is None:
                    continue
                q2, l2, r2 = fed
                if len(l2) > c or len(r2) > c:
                    continue
                trans.add((i, new_pa.pair(a, b), sid((q2, l2, r2))))
        if lbuf and not rbuf:
            q2 = tm.get((q, pa.pair(lbuf[0], pad)))
            if q2 is not None:
                trans.add((i, None, sid((q2, lbuf[1:], ()))))
        if rbuf and not lbuf:
            q2 = tm.get((q, pa.pair(pad, rbuf[0])))
            if q2 is not None:
                trans.add((i, None, sid((q2, (), rbuf[1:]))))
    raw = Fsa(new_pa.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return PairRelation(new_pa, (raw & well_padded(new_pa)).minimize())


def tracked_pairs(
    pa: PaddedAlphabet,
    left: Fsa,
    right: Fsa,
    elem_of: Callable[[int], Hashable],
    mul: Callable[[Hashable, Hashable], Hashable],
    accept: Callable[[Hashable, Hashable], bool],
) -> PairRelation:
    """Pairs (u, v) with u in left, v in right, filtered by accumulated values.

    Each track folds mul over the letter values from elem_of (None stands for
    the empty fold); accept decides membership from the two folds.  The value
    domain must be finite for this to terminate.
    """
    d1, d2 = left.dfa, right.dfa
    t1 = {(s, a): t for s, a, t in d1.transitions}
    t2 = {(s, a): t for s, a, t in d2.transitions}
    n = len(pa.base)
    BOTH, LDONE, RDONE = 0, 1, 2

    def acc(e, letter):
        x = elem_of(letter)
        return x if e is None else mul(e, x)

    start = (next(iter(d1.initial)), None, next(iter(d2.initial)), None, BOTH)
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
        q1, e1, q2, e2, phase = state
        if q1 in d1.finals and q2 in d2.finals and accept(e1, e2):
            finals.add(i)
        if phase == BOTH:
            for a in range(n):
                m1 = t1.get((q1, a))
                if m1 is None:
                    continue
                f1 = acc(e1, a)
                for b in range(n):
                    m2 = t2.get((q2, b))
                    if m2 is not None:
                        trans.add((i, pa.pair(a, b), sid((m1, f1, m2, acc(e2, b), BOTH))))
                trans.add((i, pa.pair(a, n), sid((m1, f1, q2, e2, RDONE))))
            for b in range(n):
                m2 = t2.get((q2, b))
                if m2 is not None:
                    trans.add((i, pa.pair(n, b), sid((q1, e1, m2, acc(e2, b), LDONE))))
        elif phase == LDONE:
            for b in range(n):
                m2 = t2.get((q2, b))
                if m2 is not None:
                    trans.add((i, pa.pair(n, b), sid((q1, e1, m2, acc(e2, b), LDONE))))
        else:
            for a in range(n):
                m1 = t1.get((q1, a))
                if m1 is not None:
                    trans.add((i, pa.pair(a, n), sid((m1, acc(e1, a), q2, e2, RDONE))))
    raw = Fsa(pa.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    return PairRelation(pa, raw.minimize())


def conv_pair_shared(k: PairRelation, shared_lang: Fsa, shared: str) -> PairRelation:
    """Lift k to packed words sharing one track.

    For shared="right": {(pack(u, b), pack(v, b)) : (u,v) in k, b in shared_lang},
    a relation over the pair alphabet of k's pair alphabet.  shared="left"
    puts the common word on the left track instead.
    """
    if shared not in ("left", "right"):
        raise ValueError("shared must be 'left' or 'right'")
    pa = k.pairs
    outer = PaddedAlphabet(pa.alphabet)
    dk = k.fsa.dfa
    ds = shared_lang.dfa
    tk = {(s, a): t for s, a, t in dk.transitions}
    ts = {(s, a): t for s, a, t in ds.transitions}
    n = len(pa.base)
    pad = pa.pad
    opad = outer.pad

    def split(code: int) -> tuple[int, int]:
        # inner pair letter -> (own side, shared side)
        l, r = pa.sides(code)
        return (l, r) if shared == "right" else (r, l)

    start = (next(iter(dk.initial)), next(iter(ds.initial)))
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

    inner = list(range(len(pa.alphabet)))
    while queue:
        state = queue.popleft()
        i = index[state]
        qk, qs = state
        if qk in dk.finals and qs in ds.finals:
            finals.add(i)
        for p in inner + [opad]:
            for q in inner + [opad]:
                if p == opad and q == opad:
                    continue
                if p == opad:
                    # the whole top packed word ended, so u and b both did
                    y1, y2 = split(q)
                    if y2 != pad:
                        continue
                    k2 = tk.get((qk, pa.pair(pad, y1)))
                    if k2 is None:
                        continue
                    trans.add((i, outer.pair(opad, q), sid((k2, qs))))
                elif q == opad:
                    x1, x2 = split(p)
                    if x2 != pad:
                        continue
                    k2 = tk.get((qk, pa.pair(x1, pad)))
                    if k2 is None:
                        continue
                    trans.add((i, outer.pair(p, opad), sid((k2, qs))))
                else:
                    x1, x2 = split(p)
                    y1, y2 = split(q)
                    if x2 != y2:
                        continue
                    if x1 == pad and y1 == pad:
                        k2 = qk
                    else:
                        k2 = tk.get((qk, pa.pair(x1, y1)))
                        if k2 is None:
                            continue
                    if x2 == pad:
                        s2 = qs
                    else:
                        s2 = ts.get((qs, x2))
                        if s2 is None:
                            continue
                    trans.add((i, outer.pair(p, q), sid((k2, s2))))
    raw = Fsa(outer.alphabet, len(index), frozenset([0]), frozenset(finals), frozenset(trans))
    # the no-feed case above (both own sides padded) cannot tell leading pads
    # from trailing ones, so force both tracks to be genuinely packed words
    wp = well_padded(pa)
    shape = times(outer, wp, wp)
    return PairRelation(outer, (raw & shape.fsa).minimize())


def transpose(rel: PairRelation) -> PairRelation:
    """{(v, u) : (u, v) in rel}."""
    pa = rel.pairs

    def im(idx: int) -> Word:
        l, r = pa.sides(idx)
        return (pa.pair(r, l),)

    return PairRelation(pa, rel.fsa.map_letters(pa.alphabet, im).minimize())


def embed_relation(
    rel: PairRelation,
    target: PaddedAlphabet,
    rename: Callable[[str], str] | None = None,
) -> PairRelation:
    """Re-base a relation onto another padded alphabet, matching letters by name.

    Every base letter of the source (after rename, if given) must exist in the
    target base; pads map to pads.
    """
    pa = rel.pairs
    lut: dict[int, int] = {pa.pad: target.pad}
    for i, name in enumerate(pa.base.names):
        wanted = rename(name) if rename else name
        try:
            lut[i] = target.base.names.index(wanted)
        except ValueError:
            raise ValueError(f"letter {wanted!r} missing from the target base") from None

    def im(idx: int) -> Word:
        l, r = pa.sides(idx)
        return (target.pair(lut[l], lut[r]),)

    return PairRelation(target, rel.fsa.map_letters(target.alphabet, im))
