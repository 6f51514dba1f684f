"""Naive reference implementations the suite compares the package against.

Everything here favors obviousness over speed: plain set arithmetic on
truncated languages and explicit walks over machine edges.  Nothing uses the
automaton algebra under test beyond reading edge data out of the objects.
"""
from __future__ import annotations


def words_upto(nletters: int, max_len: int) -> list[tuple[int, ...]]:
    """All words over 0..nletters-1 of length <= max_len, shortest first."""
    out = [()]
    level = [()]
    for _ in range(max_len):
        level = [w + (a,) for w in level for a in range(nletters)]
        out.extend(level)
    return out


def concat_sets(xs: set, ys: set, max_len: int) -> set:
    return {x + y for x in xs for y in ys if len(x) + len(y) <= max_len}


def star_set(xs: set, max_len: int) -> set:
    acc = {()}
    frontier = {()}
    while frontier:
        nxt = set()
        for w in frontier:
            for x in xs:
                c = w + x
                if len(c) <= max_len and c not in acc:
                    acc.add(c)
                    nxt.add(c)
        frontier = nxt
    return acc


def plus_set(xs: set, max_len: int) -> set:
    """Concatenations of one or more factors from xs, truncated."""
    acc = {w for w in xs if len(w) <= max_len}
    frontier = set(acc)
    while frontier:
        nxt = set()
        for w in frontier:
            for x in xs:
                c = w + x
                if len(c) <= max_len and c not in acc:
                    acc.add(c)
                    nxt.add(c)
        frontier = nxt
    return acc


def gsm_runs(g, max_input_len: int) -> set[tuple[tuple, tuple]]:
    """(input, output) pairs of successful runs with |input| <= max_input_len.

    A successful run takes at least one edge and ends in a terminal state.
    Outputs are never shorter than inputs because every edge emits at least
    one letter, which is what makes truncated comparisons against eta and
    zeta exact.
    """
    by_state: dict[int, list] = {}
    for src, a, dst, out in g.edges:
        by_state.setdefault(src, []).append((a, dst, tuple(out)))
    results: set[tuple[tuple, tuple]] = set()
    stack = [(g.initial, (), ())]
    while stack:
        q, inp, out = stack.pop()
        if inp and q in g.terminals:
            results.add((inp, out))
        if len(inp) == max_input_len:
            continue
        for a, dst, o in by_state.get(q, ()):
            stack.append((dst, inp + (a,), out + o))
    return results


def concat_within(xs: set, ys: set, universe) -> set:
    """Truncated concatenation computed by split points.

    Agrees with concat_sets on the universe's length bound but is linear in
    the universe instead of quadratic in the operands, which matters once
    complements push the operands toward the whole universe.
    """
    return {w for w in universe
            if any(w[:i] in xs and w[i:] in ys for i in range(len(w) + 1))}


def star_within(xs: set, universe) -> set:
    acc = {()}
    for w in sorted(universe, key=len):
        # every proper suffix is shorter, so it has been decided already
        if w and any(w[:i] in xs and w[i:] in acc
                     for i in range(1, len(w) + 1)):
            acc.add(w)
    return acc


def plus_within(xs: set, universe) -> set:
    return concat_within(xs, star_within(xs, universe), universe)
