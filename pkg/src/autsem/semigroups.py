"""Semigroup element models with exact multiplication.

Finite semigroups carry explicit Cayley tables and are validated on
construction.  Each construction the package supports gets its own element
model: syllable sequences for free products, componentwise pairs for direct
products, sandwich-matrix triples, index-shifted triples over a monoid, and
map/point pairs for wreath products.  The infinite bases we need (free
monogenic, the integers under addition, the bicyclic monoid) are built in so
that oracles stay exact; enumeration bounds are someone else's problem.

Elements are plain hashable values (ints and nested tuples).  A model only
supplies the product, an optional identity, and display names.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .fsa import Alphabet, Fsa, Word


@dataclass(frozen=True)
class FiniteSemigroup:
    """A finite semigroup as a Cayley table over element indices.

    The table is checked for associativity on construction, and the identity
    index, when given, is checked against the identity law.  Rows are indexed
    by the left factor: ``table[a][b]`` is the product a*b.
    """

    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    identity: int | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.names, tuple):
            object.__setattr__(self, "names", tuple(self.names))
        if not isinstance(self.table, tuple) or not all(isinstance(r, tuple) for r in self.table):
            object.__setattr__(self, "table", tuple(tuple(r) for r in self.table))
        n = len(self.names)
        if n == 0:
            raise ValueError("need at least one element")
        if len(set(self.names)) != n:
            raise ValueError("element names must be distinct")
        if len(self.table) != n or any(len(row) != n for row in self.table):
            raise ValueError(f"table must be {n}x{n}")
        for row in self.table:
            for v in row:
                if not (isinstance(v, int) and 0 <= v < n):
                    raise ValueError(f"table entry {v!r} out of range")
        t = self.table
        for a in range(n):
            ra = t[a]
            for b in range(n):
                ab = ra[b]
                rb = t[b]
                for c in range(n):
                    if t[ab][c] != ra[rb[c]]:
                        raise ValueError(
                            "not associative at "
                            f"({self.names[a]}, {self.names[b]}, {self.names[c]})")
        e = self.identity
        if e is not None:
            if not 0 <= e < n:
                raise ValueError("identity index out of range")
            if any(t[e][x] != x or t[x][e] != x for x in range(n)):
                raise ValueError(f"{self.names[e]} is not an identity")

    @property
    def size(self) -> int:
        return len(self.names)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def elements(self) -> range:
        return range(self.size)

    def to_json(self) -> dict:
        data: dict = {
            "elements": list(self.names),
            "table": [list(row) for row in self.table],
        }
        if self.identity is not None:
            data["identity"] = self.identity
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteSemigroup":
        return cls(
            tuple(data["elements"]),
            tuple(tuple(row) for row in data["table"]),
            data.get("identity"),
        )


def trivial_semigroup() -> FiniteSemigroup:
    return FiniteSemigroup(("e",), ((0,),), identity=0)


def z2_monoid() -> FiniteSemigroup:
    """The two-element group, written additively."""
    return FiniteSemigroup(("0", "1"), ((0, 1), (1, 0)), identity=0)


def cyclic_group(n: int) -> FiniteSemigroup:
    if n < 1:
        raise ValueError("need n >= 1")
    names = tuple(str(i) for i in range(n))
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteSemigroup(names, table, identity=0)


def right_zero_semigroup(n: int) -> FiniteSemigroup:
    """Every element is a right zero: a*b = b."""
    if n < 1:
        raise ValueError("need n >= 1")
    names = tuple(f"r{i}" for i in range(n))
    table = tuple(tuple(range(n)) for _ in range(n))
    return FiniteSemigroup(names, table)


def null_semigroup(n: int) -> FiniteSemigroup:
    """All products collapse to a single zero element (index 0)."""
    if n < 1:
        raise ValueError("need n >= 1")
    names = ("z",) + tuple(f"x{i}" for i in range(1, n))
    table = tuple(tuple(0 for _ in range(n)) for _ in range(n))
    return FiniteSemigroup(names, table)


def monogenic_nilpotent(n: int) -> FiniteSemigroup:
    """Powers a, a^2, ..., a^n of one generator with a^n absorbing."""
    if n < 1:
        raise ValueError("need n >= 1")
    names = tuple("a" if i == 1 else f"a{i}" for i in range(1, n + 1))
    table = tuple(
        tuple(min(i + j, n) - 1 for j in range(1, n + 1)) for i in range(1, n + 1))
    return FiniteSemigroup(names, table)


def adjoin_identity(sg: FiniteSemigroup, name: str | None = None) -> FiniteSemigroup:
    """Append a fresh two-sided identity, even when sg already has one."""
    n = sg.size
    fresh = "1" if name is None else name
    while fresh in sg.names:
        fresh += "'"
    rows = [row + (i,) for i, row in enumerate(sg.table)]
    rows.append(tuple(range(n)) + (n,))
    return FiniteSemigroup(sg.names + (fresh,), tuple(rows), identity=n)


class ElementModel:
    """A set of hashable elements with an exact associative product.

    ``identity`` is a two-sided identity element, or None for a plain
    semigroup.  Subclasses either set it as a class attribute or compute it
    in ``__init__``.  Instances compare by object identity; elements compare
    by value.
    """

    identity: object | None = None

    def mul(self, x, y):
        raise NotImplementedError

    def name(self, x) -> str:
        return str(x)


class FiniteModel(ElementModel):
    """Elements are indices into a Cayley table."""

    def __init__(self, sg: FiniteSemigroup):
        self.sg = sg
        self.identity = sg.identity

    def mul(self, x: int, y: int) -> int:
        return self.sg.table[x][y]

    def name(self, x: int) -> str:
        return self.sg.names[x]


class FreeMonogenicModel(ElementModel):
    """Powers of one generator; exponent 0 is the identity in the monoid case."""

    def __init__(self, monoid: bool = False):
        self.monoid = monoid
        self.identity = 0 if monoid else None

    def mul(self, x: int, y: int) -> int:
        return x + y

    def name(self, x: int) -> str:
        return "1" if x == 0 else f"a^{x}"


class IntModel(ElementModel):
    """The integers under addition."""

    identity = 0

    def mul(self, x: int, y: int) -> int:
        return x + y


class BicyclicModel(ElementModel):
    """Pairs (m, n) of nonnegative integers with the index-shift product."""

    identity = (0, 0)

    def mul(self, x, y):
        m, n = x
        p, q = y
        k = max(n, p)
        return (m - n + k, q - p + k)

    def name(self, x) -> str:
        return f"({x[0]}, {x[1]})"


class FreeProductModel(ElementModel):
    """Alternating syllable sequences over a tuple of factor models.

    An element is a tuple of (factor tag, factor element) pairs in which
    adjacent tags differ.  Multiplication concatenates and merges the
    boundary syllables when their tags coincide.

    With ``monoid=True`` every factor must be a monoid; factor identities
    never appear as syllables and the empty tuple is the shared identity.
    A boundary merge that collapses to a factor identity drops the syllable
    and exposes a new boundary, so merging cascades.
    """

    def __init__(self, factors: Sequence[ElementModel], monoid: bool = False):
        self.factors = tuple(factors)
        if len(self.factors) < 2:
            raise ValueError("need at least two factors")
        self.monoid = monoid
        if monoid:
            if any(f.identity is None for f in self.factors):
                raise ValueError("a free product of monoids needs monoid factors")
            self.identity = ()

    def embed(self, tag: int, elem) -> tuple:
        """Lift a factor element to a (possibly empty) syllable sequence."""
        if not 0 <= tag < len(self.factors):
            raise ValueError(f"no factor {tag}")
        if self.monoid and elem == self.factors[tag].identity:
            return ()
        return ((tag, elem),)

    def mul(self, x, y):
        if not self.monoid:
            if x[-1][0] == y[0][0]:
                tag = x[-1][0]
                s = self.factors[tag].mul(x[-1][1], y[0][1])
                return x[:-1] + ((tag, s),) + y[1:]
            return x + y
        left = list(x)
        i = 0
        while left and i < len(y) and left[-1][0] == y[i][0]:
            tag = left[-1][0]
            s = self.factors[tag].mul(left[-1][1], y[i][1])
            left.pop()
            i += 1
            if s != self.factors[tag].identity:
                left.append((tag, s))
                break
        return tuple(left) + y[i:]

    def name(self, x) -> str:
        if not x:
            return "1"
        return " ".join(f"{tag}:{self.factors[tag].name(e)}" for tag, e in x)


class DirectProductModel(ElementModel):
    """Componentwise pairs over two factor models."""

    def __init__(self, left: ElementModel, right: ElementModel):
        self.left = left
        self.right = right
        if left.identity is not None and right.identity is not None:
            self.identity = (left.identity, right.identity)

    def mul(self, x, y):
        return (self.left.mul(x[0], y[0]), self.right.mul(x[1], y[1]))

    def name(self, x) -> str:
        return f"({self.left.name(x[0])}, {self.right.name(x[1])})"


class ReesMatrixModel(ElementModel):
    """Triples (l, s, r) multiplied through a sandwich matrix.

    ``p`` has one row per right index and one column per left index; entries
    are element indices of ``u``.  The product inserts the matrix entry
    between the middle coordinates:

        (l1, s1, r1)(l2, s2, r2) = (l1, s1 * p[r1][l2] * s2, r2)

    With ``adjoin=True`` (the default) the middle coordinate ranges over
    ``u`` with a fresh identity appended; matrix entries keep their indices
    either way.
    """

    def __init__(self, u: FiniteSemigroup, p: Sequence[Sequence[int]],
                 adjoin: bool = True):
        self.u = u
        self.p = tuple(tuple(row) for row in p)
        self.n_j = len(self.p)
        if self.n_j == 0 or any(len(row) != len(self.p[0]) for row in self.p):
            raise ValueError("matrix must be rectangular and nonempty")
        self.n_i = len(self.p[0])
        if self.n_i == 0:
            raise ValueError("matrix must be rectangular and nonempty")
        for row in self.p:
            for v in row:
                if not 0 <= v < u.size:
                    raise ValueError(f"matrix entry {v!r} out of range")
        self.adjoin = adjoin
        self.u1 = adjoin_identity(u) if adjoin else u

    def mul(self, x, y):
        l1, s1, r1 = x
        l2, s2, r2 = y
        t = self.u1.table
        return (l1, t[t[s1][self.p[r1][l2]]][s2], r2)

    def name(self, x) -> str:
        return f"({x[0]}, {self.u1.names[x[1]]}, {x[2]})"


class BruckReillyModel(ElementModel):
    """Triples (m, t, n) over a monoid base and an endomorphism of it.

    The product lines the inner indices up at k = max(n, p), pushing each
    middle coordinate forward with the endomorphism:

        (m, t1, n)(p, t2, q) = (m-n+k, iterate(t1, k-n) * iterate(t2, k-p), q-p+k)

    The identity is (0, 1, 0).
    """

    def __init__(self, base: ElementModel, theta: Callable):
        if base.identity is None:
            raise ValueError("base must be a monoid")
        self.base = base
        self.theta = theta
        self.identity = (0, base.identity, 0)

    def iterate(self, t, k: int):
        for _ in range(k):
            t = self.theta(t)
        return t

    def mul(self, x, y):
        m, t1, n = x
        p, t2, q = y
        k = max(n, p)
        s = self.base.mul(self.iterate(t1, k - n), self.iterate(t2, k - p))
        return (m - n + k, s, q - p + k)

    def name(self, x) -> str:
        return f"({x[0]}, {self.base.name(x[1])}, {x[2]})"


class WreathModel(ElementModel):
    """Pairs (f, t): a tuple f over the finite top semigroup and a point t.

    The product twists the second map by the first point before the
    pointwise fold: (f, t)(g, u) = (h, t*u) with h[i] = f[i] * g[i*t].
    """

    def __init__(self, bottom: ElementModel, top: FiniteSemigroup):
        self.bottom = bottom
        self.top = top
        if bottom.identity is not None and top.identity is not None:
            self.identity = ((bottom.identity,) * top.size, top.identity)

    def mul(self, x, y):
        f, t = x
        g, u = y
        tt = self.top.table
        h = tuple(self.bottom.mul(f[i], g[tt[i][t]]) for i in range(self.top.size))
        return (h, tt[t][u])

    def name(self, x) -> str:
        f, t = x
        vals = ", ".join(self.bottom.name(v) for v in f)
        return f"([{vals}], {self.top.names[t]})"


@dataclass(frozen=True)
class GenMap:
    """Letters mapped into an element model, extended to nonempty words.

    ``images`` is positional by letter index.  ``of`` builds one from a
    name-keyed mapping and checks it is total.
    """

    alphabet: Alphabet
    model: ElementModel
    images: tuple

    def __post_init__(self) -> None:
        if not isinstance(self.images, tuple):
            object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != len(self.alphabet):
            raise ValueError("need exactly one image per letter")

    @classmethod
    def of(cls, alphabet: Alphabet, model: ElementModel,
           images: Mapping[str, object]) -> "GenMap":
        extra = sorted(set(images) - set(alphabet.names))
        if extra:
            raise ValueError(f"images for unknown letters: {extra}")
        missing = [n for n in alphabet.names if n not in images]
        if missing:
            raise ValueError(f"letters without images: {missing}")
        return cls(alphabet, model, tuple(images[n] for n in alphabet.names))

    def image(self, letter: int):
        return self.images[letter]

    def evaluate(self, w: Word):
        if not w:
            raise ValueError("cannot evaluate the empty word")
        acc = self.images[w[0]]
        for c in w[1:]:
            acc = self.model.mul(acc, self.images[c])
        return acc


def square_surjective(sg: FiniteSemigroup) -> bool:
    """True when every element is a product of two elements."""
    seen: set[int] = set()
    for row in sg.table:
        seen.update(row)
    return len(seen) == sg.size


def right_identity_decomposition(
        sg: FiniteSemigroup) -> dict[int, tuple[int, int]] | None:
    """For each element t, a pair (e, q) with e a right identity and e*q = t.

    Returns None when some element lies in no principal right ideal generated
    by a right identity.  In a monoid the identity works for every t.
    """
    n = sg.size
    rid = [e for e in range(n) if all(sg.table[x][e] == x for x in range(n))]
    out: dict[int, tuple[int, int]] = {}
    for t in range(n):
        found = next(
            ((e, q) for e in rid for q in range(n) if sg.table[e][q] == t), None)
        if found is None:
            return None
        out[t] = found
    return out


def ideal_generated(sg: FiniteSemigroup, gens: Iterable[int]) -> frozenset[int]:
    """Smallest two-sided ideal containing gens; empty gens give the empty set."""
    have = set(gens)
    todo = list(have)
    while todo:
        x = todo.pop()
        for a in range(sg.size):
            for y in (sg.table[a][x], sg.table[x][a]):
                if y not in have:
                    have.add(y)
                    todo.append(y)
    return frozenset(have)


def theta_orbit(t, theta) -> tuple[int, int]:
    """Landmarks (j, k) of the eventually periodic orbit of t under theta.

    The orbit t, theta(t), theta^2(t), ... over a finite set is a tail
    followed by a cycle.  Returned are the minimal j for which some k >= j
    satisfies theta^j(t) == theta^(k+1)(t), and the minimal such k; the
    exponents then repeat with period k+1-j from j onward.  theta may be a
    callable or an index table.
    """
    step = theta if callable(theta) else tuple(theta).__getitem__
    seen = {t: 0}
    orbit = [t]
    x = t
    while True:
        x = step(x)
        if x in seen:
            return (seen[x], len(orbit) - 1)
        seen[x] = len(orbit)
        orbit.append(x)


def check_theta_table(sg: FiniteSemigroup, table: Sequence[int]) -> tuple[int, ...]:
    """Validate an endomorphism table of sg; monoids must also fix the identity."""
    tab = tuple(table)
    if len(tab) != sg.size or any(not 0 <= v < sg.size for v in tab):
        raise ValueError("map must send each element to an element")
    for a in range(sg.size):
        for b in range(sg.size):
            if tab[sg.table[a][b]] != sg.table[tab[a]][tab[b]]:
                raise ValueError(
                    f"map is not a homomorphism at ({sg.names[a]}, {sg.names[b]})")
    if sg.identity is not None and tab[sg.identity] != sg.identity:
        raise ValueError("map must fix the identity")
    return tab


def image_closure(g: GenMap, cap: int = 100_000) -> tuple[list, dict]:
    """All values of g.evaluate in discovery order, plus an index per value.

    Closes the letter images under right multiplication by letter images,
    which reaches exactly the evaluations of nonempty words.  Raises once
    more than cap distinct values appear, so only call this on maps whose
    image generates something finite.
    """
    order = list(dict.fromkeys(g.images))
    index = {e: i for i, e in enumerate(order)}
    at = 0
    while at < len(order):
        x = order[at]
        at += 1
        for a in g.images:
            y = g.model.mul(x, a)
            if y not in index:
                if len(order) >= cap:
                    raise ValueError(f"image closure larger than {cap}")
                index[y] = len(order)
                order.append(y)
    return order, index


def finitereg_automaton(g: GenMap, target, cap: int = 100_000) -> Fsa:
    """Deterministic acceptor for the nonempty words that evaluate to target.

    States are the distinct evaluation values plus a separate start state,
    so the map must have a finite image (the cap guards the closure).  An
    unreachable target yields the empty language.
    """
    order, index = image_closure(g, cap)
    trans = set()
    for a, img in enumerate(g.images):
        trans.add((0, a, index[img] + 1))
        for e, i in index.items():
            trans.add((i + 1, a, index[g.model.mul(e, img)] + 1))
    finals = frozenset(i + 1 for e, i in index.items() if e == target)
    return Fsa(g.alphabet, len(order) + 1, frozenset([0]), finals, frozenset(trans))


def fgt_witness(model: ElementModel, universe: Iterable, t1) -> int:
    """Largest solution count of x * t1 == t2 with x drawn from universe.

    A certificate lower bound for the bounded-solutions constant: exact when
    universe is the whole semigroup, a truncation artifact otherwise.
    """
    counts: dict = {}
    for x in universe:
        y = model.mul(x, t1)
        counts[y] = counts.get(y, 0) + 1
    return max(counts.values(), default=0)


FINITE_BUILTINS: dict[str, Callable[[], FiniteSemigroup]] = {
    "trivial": trivial_semigroup,
    "z2": z2_monoid,
}


def theta_to_json(table: Sequence[int]) -> dict:
    return {"map": list(table)}


def theta_from_json(data: Mapping) -> tuple[int, ...]:
    return tuple(data["map"])


def rees_data_to_json(model: ReesMatrixModel) -> dict:
    return {
        "U": model.u.to_json(),
        "I": model.n_i,
        "J": model.n_j,
        "P": [list(row) for row in model.p],
    }


def rees_data_from_json(data: Mapping) -> ReesMatrixModel:
    u = data["U"]
    sg = FINITE_BUILTINS[u]() if isinstance(u, str) else FiniteSemigroup.from_json(u)
    p = data["P"]
    if len(p) != data["J"] or any(len(row) != data["I"] for row in p):
        raise ValueError("matrix shape disagrees with I and J")
    return ReesMatrixModel(sg, p)
