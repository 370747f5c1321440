"""The category of finite sets.

Elements of a :class:`FiniteSet` are the indices ``0..size-1``.  Optional
labels are hashable tags (strings, ints or nested tuples) carried along for
display and for structural decoding of constructed sets; they never change
which maps exist.  Every construction here fixes a deterministic element
order so that derived objects can be compared with ``==``.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Sequence

from .errors import GuardExceeded, NotBijectiveError, NotInjectiveError, ShapeError

DEFAULT_GUARD = 10**6


def default_guard() -> int:
    """Enumeration limit; ``POLYOP_GUARD`` overrides the built-in default."""
    raw = os.environ.get("POLYOP_GUARD")
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ShapeError(f"POLYOP_GUARD must be an integer, got {raw!r}") from None
        if value > 0:
            return value
    return DEFAULT_GUARD


def check_guard(what: str, needed: int, guard: int | None = None) -> None:
    limit = default_guard() if guard is None else guard
    if needed > limit:
        raise GuardExceeded(what, needed, limit)


def _freeze(label):
    if isinstance(label, list):
        return tuple(_freeze(x) for x in label)
    return label


@dataclass(frozen=True)
class FiniteSet:
    size: int
    labels: tuple | None = None

    def __post_init__(self):
        if not isinstance(self.size, int) or self.size < 0:
            raise ShapeError(f"set size must be a natural number, got {self.size!r}")
        if self.labels is not None:
            labels = tuple(_freeze(x) for x in self.labels)
            if len(labels) != self.size:
                raise ShapeError(f"{len(labels)} labels for a set of size {self.size}")
            if len(set(labels)) != self.size:
                raise ShapeError("labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, labels: Iterable[Hashable]) -> "FiniteSet":
        labels = tuple(labels)
        return cls(len(labels), labels)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.size))

    def label(self, i: int):
        return self.labels[i] if self.labels is not None else i

    def all_labels(self) -> tuple:
        return self.labels if self.labels is not None else tuple(range(self.size))

    @cached_property
    def _lookup(self) -> dict:
        return {lab: i for i, lab in enumerate(self.all_labels())}

    def index(self, label) -> int:
        try:
            return self._lookup[label]
        except (KeyError, TypeError):
            raise ShapeError(f"{label!r} is not an element of this set") from None

    def __contains__(self, label) -> bool:
        try:
            return label in self._lookup
        except TypeError:
            return False

    def unlabelled(self) -> "FiniteSet":
        return FiniteSet(self.size)


EMPTY = FiniteSet(0)
POINT = FiniteSet(1)


@dataclass(frozen=True)
class FiniteMap:
    dom: FiniteSet
    cod: FiniteSet
    table: tuple

    def __post_init__(self):
        table = tuple(self.table)
        object.__setattr__(self, "table", table)
        if len(table) != self.dom.size:
            raise ShapeError(f"table has length {len(table)}, domain has size {self.dom.size}")
        for x, y in enumerate(table):
            if not isinstance(y, int) or not 0 <= y < self.cod.size:
                raise ShapeError(f"entry {x} -> {y!r} is outside a codomain of size {self.cod.size}")

    @classmethod
    def unchecked(cls, dom: FiniteSet, cod: FiniteSet, table: tuple) -> "FiniteMap":
        """Skip validation; for tables produced by code that already guarantees them."""
        m = object.__new__(cls)
        m.__dict__.update(dom=dom, cod=cod, table=table)
        return m

    @classmethod
    def from_labels(cls, dom: FiniteSet, cod: FiniteSet, fn) -> "FiniteMap":
        """Build a map from a function on labels."""
        return cls(dom, cod, tuple(cod.index(fn(dom.label(i))) for i in range(dom.size)))

    def __call__(self, x: int) -> int:
        return self.table[x]

    def on_label(self, label):
        return self.cod.label(self.table[self.dom.index(label)])

    @cached_property
    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    @cached_property
    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.cod.size

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    def image(self) -> "Subset":
        return Subset(self.cod, tuple(sorted(set(self.table))))

    def inverse(self) -> "FiniteMap":
        if not self.is_bijective:
            raise NotBijectiveError("map is not a bijection")
        inv = [0] * self.cod.size
        for x, y in enumerate(self.table):
            inv[y] = x
        return FiniteMap(self.cod, self.dom, tuple(inv))

    def restrict(self, sub: "Subset") -> "FiniteMap":
        if sub.ambient.size != self.dom.size:
            raise ShapeError("subset lives in a different set")
        dom = sub.as_set()
        return FiniteMap(dom, self.cod, tuple(self.table[i] for i in sub.members))


@dataclass(frozen=True)
class Subset:
    ambient: FiniteSet
    members: tuple = field(default=())

    def __post_init__(self):
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        for a, b in zip(members, members[1:]):
            if a >= b:
                raise ShapeError("subset members must be strictly increasing")
        if members and (members[0] < 0 or members[-1] >= self.ambient.size):
            raise ShapeError("subset member out of range")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x) -> bool:
        return x in set(self.members)

    def as_set(self) -> FiniteSet:
        if self.ambient.labels is None:
            return FiniteSet(len(self.members))
        return FiniteSet.of(self.ambient.labels[i] for i in self.members)

    def inclusion(self) -> FiniteMap:
        return FiniteMap(self.as_set(), self.ambient, self.members)


def identity(a: FiniteSet) -> FiniteMap:
    return FiniteMap(a, a, tuple(range(a.size)))


def constant(a: FiniteSet, b: FiniteSet, value: int) -> FiniteMap:
    return FiniteMap(a, b, (value,) * a.size)


def compose(g: FiniteMap, f: FiniteMap) -> FiniteMap:
    """``g ∘ f``."""
    if f.cod.size != g.dom.size:
        raise ShapeError(f"cannot compose: cod(f) has size {f.cod.size}, dom(g) has size {g.dom.size}")
    gt = g.table
    return FiniteMap(f.dom, g.cod, tuple(gt[y] for y in f.table))


def fiber(f: FiniteMap, b: int) -> Subset:
    if not 0 <= b < f.cod.size:
        raise ShapeError(f"index {b} out of range for a codomain of size {f.cod.size}")
    return Subset(f.dom, tuple(x for x, y in enumerate(f.table) if y == b))


def fibers(f: FiniteMap) -> list[tuple[int, ...]]:
    out: list[list[int]] = [[] for _ in range(f.cod.size)]
    for x, y in enumerate(f.table):
        out[y].append(x)
    return [tuple(xs) for xs in out]


def pullback(f: FiniteMap, g: FiniteMap) -> tuple[FiniteSet, FiniteMap, FiniteMap]:
    """Apex ``{(a, b) : f(a) = g(b)}`` in lexicographic order with its two projections."""
    if f.cod.size != g.cod.size:
        raise ShapeError("pullback needs maps with a common codomain")
    by_value = fibers(g)
    pairs = [(a, b) for a, y in enumerate(f.table) for b in by_value[y]]
    apex = FiniteSet.of((f.dom.label(a), g.dom.label(b)) for a, b in pairs)
    return (
        apex,
        FiniteMap(apex, f.dom, tuple(a for a, _ in pairs)),
        FiniteMap(apex, g.dom, tuple(b for _, b in pairs)),
    )


def pushout_mono(f: FiniteMap, g: FiniteMap) -> tuple[FiniteSet, FiniteMap, FiniteMap]:
    """Pushout of ``cod(f) <- C -> cod(g)`` with ``f`` injective.

    The apex is ``cod(g)`` followed by ``cod(f) minus image(f)``.  Returns the
    apex, the leg out of ``cod(f)`` and the (injective) leg out of ``cod(g)``.
    """
    if f.dom.size != g.dom.size:
        raise ShapeError("pushout needs maps with a common domain")
    if not f.is_injective:
        raise NotInjectiveError("pushouts are only formed along injective maps")
    A, D = f.cod, g.cod
    hit = {y: x for x, y in enumerate(f.table)}
    rest = [a for a in range(A.size) if a not in hit]
    if A.labels is None and D.labels is None:
        apex = FiniteSet(D.size + len(rest))
    else:
        apex = FiniteSet.of([(0, D.label(d)) for d in range(D.size)] + [(1, A.label(a)) for a in rest])
    offset = {a: D.size + k for k, a in enumerate(rest)}
    leg_a = tuple(g.table[hit[a]] if a in hit else offset[a] for a in range(A.size))
    leg_d = tuple(range(D.size))
    return apex, FiniteMap(A, apex, leg_a), FiniteMap(D, apex, leg_d)


def equalizer(f: FiniteMap, g: FiniteMap) -> Subset:
    if f.dom.size != g.dom.size or f.cod.size != g.cod.size:
        raise ShapeError("equalizer needs parallel maps")
    return Subset(f.dom, tuple(x for x in range(f.dom.size) if f.table[x] == g.table[x]))


def coproduct(a: FiniteSet, b: FiniteSet) -> tuple[FiniteSet, FiniteMap, FiniteMap]:
    if a.labels is None and b.labels is None:
        s = FiniteSet(a.size + b.size)
    else:
        s = FiniteSet.of([(0, x) for x in a.all_labels()] + [(1, y) for y in b.all_labels()])
    return s, FiniteMap(a, s, tuple(range(a.size))), FiniteMap(b, s, tuple(range(a.size, a.size + b.size)))


def hom_set(a: FiniteSet, b: FiniteSet, guard: int | None = None) -> list[FiniteMap]:
    """All maps ``a -> b`` in lexicographic table order."""
    check_guard("hom_set", b.size**a.size, guard)
    return [FiniteMap(a, b, t) for t in itertools.product(range(b.size), repeat=a.size)]


def _as_table(gen, x: FiniteSet) -> tuple:
    if isinstance(gen, FiniteMap):
        if gen.dom.size != x.size or gen.cod.size != x.size:
            raise ShapeError("generator is not an endomap of X")
        return gen.table
    table = tuple(gen)
    if len(table) != x.size or any(not 0 <= y < x.size for y in table):
        raise ShapeError("generator is not an endomap of X")
    return table


def orbit_count(x: FiniteSet, generators: Sequence) -> int:
    """Number of orbits of the group generated by ``generators`` (union-find)."""
    parent = list(range(x.size))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for gen in generators:
        table = _as_table(gen, x)
        if len(set(table)) != x.size:
            raise NotBijectiveError("orbit generators must be bijections")
        for i, j in enumerate(table):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    return sum(1 for i in range(x.size) if find(i) == i)


def is_pullback_square(top: FiniteMap, left: FiniteMap, right: FiniteMap, bottom: FiniteMap) -> bool:
    """Is ``W --top--> X``, ``W --left--> Y`` over ``X --right--> Z <--bottom-- Y`` cartesian?"""
    if compose(right, top).table != compose(bottom, left).table:
        return False
    _, px, py = pullback(right, bottom)
    comparison = {(top(w), left(w)) for w in range(top.dom.size)}
    return len(comparison) == top.dom.size == px.dom.size
