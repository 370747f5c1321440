"""Polynomial functors over finite sets.

A polynomial ``I <-s- E -p-> B -t-> J`` is stored as four finite sets and
three maps (:class:`Polynomial`).  Every polynomial also answers a small
label-level interface (``ops``, ``inputs``, ``input_colour``,
``output_colour``, ``op_of``), shared with the lazy views :class:`Composite`
and :class:`Sum`.  Labels of composite elements are structural tuples:

* operation of ``Q∘P``: ``(c, phi)`` with ``phi`` the tuple of ``P``-operations
  plugged into the inputs of ``c`` (in the order of ``Q.inputs(c)``);
* input of ``Q∘P``: ``(c, phi, f, e)`` with ``f`` an input of ``c`` and ``e``
  an input of the operation plugged into ``f``;
* elements of a sum ``P ⊔ Q``: ``(0, x)`` or ``(1, x)``.

Because the encoding is structural, associators, unitors and horizontal
composites are plain functions on labels (:class:`MorFn`) that can be
realized as index tables (:class:`PolyMor`) whenever both ends are
materialized.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable

from . import finset
from .errors import GuardExceeded, NotBijectiveError, ShapeError
from .finset import FiniteMap, FiniteSet, check_guard


@dataclass
class Report:
    """Outcome of a report-valued check."""

    ok: bool
    failures: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, message: str) -> None:
        self.ok = False
        self.failures.append(message)


# --------------------------------------------------------------------------
# Polynomials


def _check_map(name: str, m: FiniteMap, dom: FiniteSet, cod: FiniteSet) -> None:
    if not isinstance(m, FiniteMap):
        raise ShapeError(f"map {name}: expected a FiniteMap, got {type(m).__name__}")
    if m.dom.size != dom.size:
        raise ShapeError(f"map {name}: domain has size {m.dom.size}, expected {dom.size}")
    if m.cod.size != cod.size:
        raise ShapeError(f"map {name}: codomain has size {m.cod.size}, expected {cod.size}")


@dataclass(frozen=True)
class Polynomial:
    I: FiniteSet
    E: FiniteSet
    B: FiniteSet
    J: FiniteSet
    s: FiniteMap
    p: FiniteMap
    t: FiniteMap

    def __post_init__(self):
        _check_map("s", self.s, self.E, self.I)
        _check_map("p", self.p, self.E, self.B)
        _check_map("t", self.t, self.B, self.J)

    @classmethod
    def from_tables(cls, I, E, B, J, s, p, t) -> "Polynomial":
        """Build from sets (or sizes) and raw tables, naming the offending map on error."""
        sets = [x if isinstance(x, FiniteSet) else FiniteSet(x) for x in (I, E, B, J)]
        I, E, B, J = sets
        maps = {}
        for name, table, dom, cod in (("s", s, E, I), ("p", p, E, B), ("t", t, B, J)):
            if isinstance(table, FiniteMap):
                maps[name] = table
                continue
            try:
                maps[name] = FiniteMap(dom, cod, tuple(table))
            except ShapeError as exc:
                raise ShapeError(f"map {name}: {exc}") from None
        return cls(I, E, B, J, maps["s"], maps["p"], maps["t"])

    # index level -----------------------------------------------------------

    @cached_property
    def fiber_indices(self) -> list[tuple[int, ...]]:
        return finset.fibers(self.p)

    @cached_property
    def arities(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.fiber_indices)

    @property
    def is_endo(self) -> bool:
        return self.I == self.J

    # label level -------------------------------------------------------------

    @cached_property
    def _ops_by_colour(self) -> dict:
        out: dict = {}
        for b in range(self.B.size):
            out.setdefault(self.J.label(self.t(b)), []).append(self.B.label(b))
        return {k: tuple(v) for k, v in out.items()}

    def ops(self, colour=None) -> tuple:
        if colour is None:
            return self.B.all_labels()
        return self._ops_by_colour.get(colour, ())

    @cached_property
    def _inputs(self) -> dict:
        return {
            self.B.label(b): tuple(self.E.label(e) for e in es)
            for b, es in enumerate(self.fiber_indices)
        }

    def inputs(self, op) -> tuple:
        return self._inputs[op]

    def input_colour(self, e):
        return self.I.label(self.s(self.E.index(e)))

    def output_colour(self, op):
        return self.J.label(self.t(self.B.index(op)))

    def op_of(self, e):
        return self.B.label(self.p(self.E.index(e)))


class Composite:
    """Lazy ``outer ∘ inner`` (apply ``inner`` first)."""

    def __init__(self, outer, inner):
        if outer.I.size != inner.J.size:
            raise ShapeError(
                f"cannot compose: inner has {inner.J.size} output colours, outer has {outer.I.size} input colours"
            )
        self.outer = outer
        self.inner = inner
        self.I = inner.I
        self.J = outer.J
        self._ops: dict = {}
        self._inputs: dict = {}

    def _inner_colour(self, f):
        # outer input colours and inner output colours are identified by index
        return self.inner.J.label(self.outer.I.index(self.outer.input_colour(f)))

    def ops(self, colour=None) -> tuple:
        if colour in self._ops:
            return self._ops[colour]
        out = []
        for c in self.outer.ops(colour):
            choices = [self.inner.ops(self._inner_colour(f)) for f in self.outer.inputs(c)]
            out.extend((c, phi) for phi in itertools.product(*choices))
        out = tuple(out)
        self._ops[colour] = out
        return out

    def inputs(self, op) -> tuple:
        got = self._inputs.get(op)
        if got is None:
            c, phi = op
            got = tuple(
                (c, phi, f, e)
                for f, b in zip(self.outer.inputs(c), phi)
                for e in self.inner.inputs(b)
            )
            self._inputs[op] = got
        return got

    def input_colour(self, e):
        return self.inner.input_colour(e[3])

    def output_colour(self, op):
        return self.outer.output_colour(op[0])

    def op_of(self, e):
        return (e[0], e[1])


class Sum:
    """Lazy coproduct ``left ⊔ right`` of polynomials with the same colours."""

    def __init__(self, left, right):
        if left.I.size != right.I.size or left.J.size != right.J.size:
            raise ShapeError("summands must share input and output colours")
        self.left = left
        self.right = right
        self.I = left.I
        self.J = left.J
        self._parts = (left, right)

    def _colour(self, part, colour):
        if colour is None:
            return None
        return part.J.label(self.J.index(colour))

    def ops(self, colour=None) -> tuple:
        return tuple((k, b) for k, part in enumerate(self._parts) for b in part.ops(self._colour(part, colour)))

    def inputs(self, op) -> tuple:
        k, b = op
        return tuple((k, e) for e in self._parts[k].inputs(b))

    def input_colour(self, e):
        part = self._parts[e[0]]
        return self.I.label(part.I.index(part.input_colour(e[1])))

    def output_colour(self, op):
        part = self._parts[op[0]]
        return self.J.label(part.J.index(part.output_colour(op[1])))

    def op_of(self, e):
        return (e[0], self._parts[e[0]].op_of(e[1]))


def materialize(q, guard: int | None = None) -> Polynomial:
    """Turn any label-level polynomial into a :class:`Polynomial`."""
    if isinstance(q, Polynomial):
        return q
    b_labels = q.ops()
    check_guard("materialize operations", len(b_labels), guard)
    e_labels = []
    p_table = []
    for k, b in enumerate(b_labels):
        ins = q.inputs(b)
        e_labels.extend(ins)
        p_table.extend([k] * len(ins))
    check_guard("materialize inputs", len(e_labels), guard)
    E = FiniteSet.of(e_labels)
    B = FiniteSet.of(b_labels)
    s = tuple(q.I.index(q.input_colour(e)) for e in e_labels)
    t = tuple(q.J.index(q.output_colour(b)) for b in b_labels)
    return Polynomial(q.I, E, B, q.J, FiniteMap(E, q.I, s), FiniteMap(E, B, p_table), FiniteMap(B, q.J, t))


def identity_poly(I: FiniteSet) -> Polynomial:
    idm = finset.identity(I)
    return Polynomial(I, I, I, I, idm, idm, idm)


def compose_poly(Q, P, guard: int | None = None) -> Polynomial:
    """``Q ∘ P`` (``P`` applied first), materialized."""
    return materialize(Composite(Q, P), guard)


def validate(P: Polynomial) -> Report:
    """Shape report with the arity multiset; malformed inputs raise ShapeError."""
    if not isinstance(P, Polynomial):
        raise ShapeError("expected a Polynomial")
    # construction already checked the three maps; re-check in case of manual tampering
    _check_map("s", P.s, P.E, P.I)
    _check_map("p", P.p, P.E, P.B)
    _check_map("t", P.t, P.B, P.J)
    return Report(True, data={"arities": sorted(P.arities), "arity_by_op": list(P.arities)})


def base_change(P: Polynomial, f: FiniteMap, g: FiniteMap) -> Polynomial:
    """Relabel the endpoints along ``f: I -> I'`` and ``g: J -> J'``: ``I' <- E -> B -> J'``."""
    if f.dom.size != P.I.size or g.dom.size != P.J.size:
        raise ShapeError("endpoint maps must start at I and J")
    return Polynomial(f.cod, P.E, P.B, g.cod, finset.compose(f, P.s), P.p, finset.compose(g, P.t))


# --------------------------------------------------------------------------
# Families and evaluation


@dataclass(frozen=True)
class Family:
    """A finite set over ``base``: ``proj: total -> base``."""

    base: FiniteSet
    total: FiniteSet
    proj: FiniteMap

    def __post_init__(self):
        _check_map("proj", self.proj, self.total, self.base)

    @classmethod
    def from_sizes(cls, base: FiniteSet, sizes: Iterable[int]) -> "Family":
        sizes = list(sizes)
        if len(sizes) != base.size:
            raise ShapeError("need one size per base element")
        table = [i for i, n in enumerate(sizes) for _ in range(n)]
        total = FiniteSet(len(table))
        return cls(base, total, FiniteMap(total, base, table))

    @classmethod
    def over(cls, base: FiniteSet, table) -> "Family":
        total = FiniteSet(len(table))
        return cls(base, total, FiniteMap(total, base, tuple(table)))

    @cached_property
    def fiber_indices(self) -> list[tuple[int, ...]]:
        return finset.fibers(self.proj)

    @property
    def elem_tags(self) -> tuple:
        return self.total.all_labels()

    def colour_of(self, label):
        return self.base.label(self.proj(self.total.index(label)))

    def sizes(self) -> list[int]:
        return [len(f) for f in self.fiber_indices]


@dataclass(frozen=True)
class FamilyMap:
    src: Family
    dst: Family
    map: FiniteMap

    def __post_init__(self):
        if self.src.base.size != self.dst.base.size:
            raise ShapeError("family maps need a common base")
        _check_map("family map", self.map, self.src.total, self.dst.total)
        if finset.compose(self.dst.proj, self.map).table != self.src.proj.table:
            raise ShapeError("map does not commute with the projections")

    def __call__(self, x: int) -> int:
        return self.map(x)


def identity_family_map(X: Family) -> FamilyMap:
    return FamilyMap(X, X, finset.identity(X.total))


def compose_family_maps(g: FamilyMap, f: FamilyMap) -> FamilyMap:
    return FamilyMap(f.src, g.dst, finset.compose(g.map, f.map))


def family_maps(X: Family, Y: Family, guard: int | None = None) -> list[FamilyMap]:
    """All maps of families ``X -> Y`` over a common base."""
    choices = [Y.fiber_indices[X.proj(x)] for x in range(X.total.size)]
    count = 1
    for c in choices:
        count *= len(c)
    check_guard("family_maps", count, guard)
    return [FamilyMap(X, Y, FiniteMap(X.total, Y.total, t)) for t in itertools.product(*choices)]


def evaluate(P, X: Family, guard: int | None = None) -> Family:
    """``P(X)``: pairs ``(b, phi)`` with ``phi`` colouring the inputs of ``b`` by elements of ``X``."""
    if P.I.size != X.base.size:
        raise ShapeError(f"family lives over {X.base.size} colours, polynomial expects {P.I.size}")
    by_colour = [tuple(X.total.label(x) for x in xs) for xs in X.fiber_indices]
    labels = []
    proj = []
    for b in P.ops():
        choices = [by_colour[P.I.index(P.input_colour(e))] for e in P.inputs(b)]
        j = P.J.index(P.output_colour(b))
        for phi in itertools.product(*choices):
            labels.append((b, phi))
            proj.append(j)
            if guard is not None and len(labels) > guard:
                raise GuardExceeded("evaluate", len(labels), guard)
    check_guard("evaluate", len(labels), guard)
    total = FiniteSet.of(labels)
    return Family(P.J, total, FiniteMap(total, P.J, proj))


def evaluate_map(P, h: FamilyMap, src_eval: Family | None = None, dst_eval: Family | None = None) -> FamilyMap:
    """``P(h)``: ``(b, phi) -> (b, h∘phi)``."""
    PX = src_eval if src_eval is not None else evaluate(P, h.src)
    PY = dst_eval if dst_eval is not None else evaluate(P, h.dst)
    X, Y = h.src, h.dst

    def image(label):
        b, phi = label
        return (b, tuple(Y.total.label(h(X.total.index(x))) for x in phi))

    return FamilyMap(PX, PY, FiniteMap.from_labels(PX.total, PY.total, image))


def composite_eval_iso(Q, P, X: Family, guard: int | None = None) -> FamilyMap:
    """The explicit bijection ``(Q∘P)(X) -> Q(P(X))``."""
    QP = Composite(Q, P)
    lhs = evaluate(QP, X, guard)
    PX = evaluate(P, X, guard)
    rhs = evaluate(Q, PX, guard)

    def image(label):
        (c, phi), psi = label
        out = []
        k = 0
        for b in phi:
            n = len(P.inputs(b))
            out.append((b, psi[k : k + n]))
            k += n
        return (c, tuple(out))

    iso = FamilyMap(lhs, rhs, FiniteMap.from_labels(lhs.total, rhs.total, image))
    if not iso.map.is_bijective:
        raise NotBijectiveError("composite evaluation comparison is not a bijection")
    return iso


def pushforward_family(f: FiniteMap, X: Family) -> Family:
    """``f_! X``: compose the projection with ``f``."""
    if f.dom.size != X.base.size:
        raise ShapeError("map does not start at the base of the family")
    return Family(f.cod, X.total, finset.compose(f, X.proj))


def pullback_family(f: FiniteMap, Y: Family) -> Family:
    """``f^* Y``: elements ``(s, y)`` with ``f(s) = proj(y)``."""
    if f.cod.size != Y.base.size:
        raise ShapeError("map does not end at the base of the family")
    apex, left, _ = finset.pullback(f, Y.proj)
    return Family(f.dom, apex, left)


def pushforward_pullback_unit(f: FiniteMap, X: Family) -> FamilyMap:
    """Unit ``X -> f^* f_! X``."""
    target = pullback_family(f, pushforward_family(f, X))
    return FamilyMap(
        X,
        target,
        FiniteMap.from_labels(X.total, target.total, lambda x: (X.colour_of(x), x)),
    )


def pushforward_pullback_counit(f: FiniteMap, Y: Family) -> FamilyMap:
    """Counit ``f_! f^* Y -> Y``."""
    source = pushforward_family(f, pullback_family(f, Y))
    return FamilyMap(source, Y, FiniteMap.from_labels(source.total, Y.total, lambda sy: sy[1]))


# --------------------------------------------------------------------------
# Morphisms


@dataclass(frozen=True)
class PolyMor:
    """Diagram morphism ``src -> dst``: maps on ``I``, ``E``, ``B``, ``J``."""

    src: Polynomial
    dst: Polynomial
    on_I: FiniteMap
    on_J: FiniteMap
    eps: FiniteMap
    beta: FiniteMap

    def __post_init__(self):
        _check_map("on_I", self.on_I, self.src.I, self.dst.I)
        _check_map("on_J", self.on_J, self.src.J, self.dst.J)
        _check_map("eps", self.eps, self.src.E, self.dst.E)
        _check_map("beta", self.beta, self.src.B, self.dst.B)

    @classmethod
    def unchecked(cls, src, dst, on_I, on_J, eps, beta) -> "PolyMor":
        """Build from raw tables without validation (callers guarantee well-formedness)."""
        fm = FiniteMap.unchecked
        m = object.__new__(cls)
        m.__dict__.update(
            src=src,
            dst=dst,
            on_I=fm(src.I, dst.I, on_I),
            on_J=fm(src.J, dst.J, on_J),
            eps=fm(src.E, dst.E, eps),
            beta=fm(src.B, dst.B, beta),
        )
        return m

    def fn(self) -> "MorFn":
        S, D = self.src, self.dst
        return MorFn(
            S,
            D,
            on_I=lambda x: D.I.label(self.on_I(S.I.index(x))),
            on_J=lambda x: D.J.label(self.on_J(S.J.index(x))),
            on_B=lambda b: D.B.label(self.beta(S.B.index(b))),
            on_E=lambda e: D.E.label(self.eps(S.E.index(e))),
        )

    @property
    def is_iso(self) -> bool:
        return all(m.is_bijective for m in (self.on_I, self.on_J, self.eps, self.beta))

    @property
    def is_injective(self) -> bool:
        return all(m.is_injective for m in (self.on_I, self.on_J, self.eps, self.beta))


@dataclass(frozen=True, eq=False)
class MorFn:
    """Label-level morphism between label-level polynomials."""

    src: object
    dst: object
    on_I: Callable
    on_J: Callable
    on_B: Callable
    on_E: Callable

    def then(self, other: "MorFn") -> "MorFn":
        """``other ∘ self``."""
        return MorFn(
            self.src,
            other.dst,
            on_I=lambda x: other.on_I(self.on_I(x)),
            on_J=lambda x: other.on_J(self.on_J(x)),
            on_B=lambda b: other.on_B(self.on_B(b)),
            on_E=lambda e: other.on_E(self.on_E(e)),
        )

    def realize(self, src: Polynomial | None = None, dst: Polynomial | None = None) -> PolyMor:
        S = src if src is not None else materialize(self.src)
        D = dst if dst is not None else materialize(self.dst)
        return PolyMor(
            S,
            D,
            FiniteMap.from_labels(S.I, D.I, self.on_I),
            FiniteMap.from_labels(S.J, D.J, self.on_J),
            FiniteMap.from_labels(S.E, D.E, self.on_E),
            FiniteMap.from_labels(S.B, D.B, self.on_B),
        )


def _as_fn(m) -> MorFn:
    return m.fn() if isinstance(m, PolyMor) else m


def _ident(x):
    return x


def identity_fn(P) -> MorFn:
    return MorFn(P, P, _ident, _ident, _ident, _ident)


def identity_mor(P: Polynomial) -> PolyMor:
    return PolyMor(
        P, P, finset.identity(P.I), finset.identity(P.J), finset.identity(P.E), finset.identity(P.B)
    )


def compose_mor(n: PolyMor, m: PolyMor) -> PolyMor:
    """Vertical composite ``n ∘ m``."""
    if m.dst != n.src:
        raise ShapeError("vertical composition needs dst(m) = src(n)")
    return PolyMor(
        m.src,
        n.dst,
        finset.compose(n.on_I, m.on_I),
        finset.compose(n.on_J, m.on_J),
        finset.compose(n.eps, m.eps),
        finset.compose(n.beta, m.beta),
    )


def validate_mor(m: PolyMor) -> Report:
    """Check the three commuting squares and fiberwise bijectivity (cartesianness)."""
    S, D = m.src, m.dst
    rep = Report(True)
    for e in range(S.E.size):
        if D.s(m.eps(e)) != m.on_I(S.s(e)):
            rep.fail(f"s-square fails at input {S.E.label(e)!r}")
            return rep
        if D.p(m.eps(e)) != m.beta(S.p(e)):
            rep.fail(f"p-square fails at input {S.E.label(e)!r}")
            return rep
    for b in range(S.B.size):
        if D.t(m.beta(b)) != m.on_J(S.t(b)):
            rep.fail(f"t-square fails at operation {S.B.label(b)!r}")
            return rep
    for b, es in enumerate(S.fiber_indices):
        image = sorted(m.eps(e) for e in es)
        if image != list(D.fiber_indices[m.beta(b)]):
            rep.fail(f"not cartesian: fiber over {S.B.label(b)!r} is not mapped bijectively")
            return rep
    return rep


def mor_component(m, X: Family, src_eval: Family | None = None, dst_eval: Family | None = None) -> FamilyMap:
    """Component at ``X`` (a family over ``dst.I``) of the induced transformation.

    The domain is ``src(on_I^* X)``; the codomain is ``dst(X)``.  Cartesian
    morphisms are needed so inputs can be matched fiberwise.
    """
    f = _as_fn(m)
    S, D = f.src, f.dst
    if isinstance(m, PolyMor):
        on_I_map = m.on_I
    else:
        on_I_map = FiniteMap.from_labels(S.I, D.I, f.on_I)
    Xs = pullback_family(on_I_map, X) if not _is_identity(on_I_map) else X
    src_val = src_eval if src_eval is not None else evaluate(S, Xs)
    dst_val = dst_eval if dst_eval is not None else evaluate(D, X)
    pulled = Xs is not X

    def image(label):
        b, phi = label
        b2 = f.on_B(b)
        slot = {f.on_E(e): k for k, e in enumerate(S.inputs(b))}
        targets = D.inputs(b2)
        if len(slot) != len(targets):
            raise ShapeError("morphism is not cartesian; no component exists")
        values = []
        for e2 in targets:
            x = phi[slot[e2]]
            values.append(X.total.label(x[1]) if pulled else x)
        return (b2, tuple(values))

    return FamilyMap(src_val, dst_val, FiniteMap.from_labels(src_val.total, dst_val.total, image))


def _is_identity(m: FiniteMap) -> bool:
    return m.dom == m.cod and m.table == tuple(range(m.dom.size))


def hom_poly(src: Polynomial, dst: Polynomial, fix_endpoints: bool = False, endo: bool | None = None,
             guard: int | None = None) -> list[PolyMor]:
    """All cartesian morphisms ``src -> dst``.

    Each operation ``b'`` of ``src`` goes to an operation ``b`` of ``dst`` with a
    bijection of inputs compatible with colours.  With ``endo`` (the default
    when both are endofunctors) the maps on ``I`` and ``J`` coincide.  With
    ``fix_endpoints`` they are identities.  For a corolla ``C_n`` the count is
    ``n!`` times the number of ``n``-ary operations.
    """
    if endo is None:
        endo = src.is_endo and dst.is_endo
    limit = finset.default_guard() if guard is None else guard
    nI, nJ = src.I.size, src.J.size
    on_I: list = [None] * nI
    on_J: list = on_I if endo else [None] * nJ
    if fix_endpoints:
        if src.I.size != dst.I.size or src.J.size != dst.J.size:
            raise ShapeError("fixed endpoints need equal colour sets")
        for i in range(nI):
            on_I[i] = i
        for j in range(nJ):
            on_J[j] = j
    elif endo and dst.I.size != dst.J.size:
        raise ShapeError("endo morphisms need an endofunctor target")

    by_arity: dict[int, list[int]] = {}
    for b, n in enumerate(dst.arities):
        by_arity.setdefault(n, []).append(b)
    src_fibers = src.fiber_indices
    dst_fibers = dst.fiber_indices
    beta = [0] * src.B.size
    eps = [0] * src.E.size
    results: list[PolyMor] = []

    def emit():
        free_I = [i for i in range(nI) if on_I[i] is None]
        free_J = [] if endo else [j for j in range(nJ) if on_J[j] is None]
        for ci in itertools.product(range(dst.I.size), repeat=len(free_I)):
            for cj in itertools.product(range(dst.J.size), repeat=len(free_J)):
                I_tab = list(on_I)
                for i, v in zip(free_I, ci):
                    I_tab[i] = v
                J_tab = I_tab if endo else list(on_J)
                for j, v in zip(free_J, cj):
                    J_tab[j] = v
                if len(results) >= limit:
                    raise GuardExceeded("hom_poly", len(results) + 1, limit)
                results.append(PolyMor.unchecked(src, dst, tuple(I_tab), tuple(J_tab), tuple(eps), tuple(beta)))

    def assign(table, key, value, undo):
        cur = table[key]
        if cur is None:
            table[key] = value
            undo.append((table, key))
            return True
        return cur == value

    def search(k):
        if k == src.B.size:
            emit()
            return
        fib = src_fibers[k]
        for b in by_arity.get(len(fib), ()):
            undo: list = []
            if not assign(on_J, src.t(k), dst.t(b), undo):
                for tab, key in undo:
                    tab[key] = None
                continue
            beta[k] = b
            for perm in itertools.permutations(dst_fibers[b]):
                inner: list = []
                ok = True
                for e_src, e_dst in zip(fib, perm):
                    if not assign(on_I, src.s(e_src), dst.s(e_dst), inner):
                        ok = False
                        break
                if ok:
                    for e_src, e_dst in zip(fib, perm):
                        eps[e_src] = e_dst
                    search(k + 1)
                for tab, key in inner:
                    tab[key] = None
            for tab, key in undo:
                tab[key] = None

    search(0)
    return results


# --------------------------------------------------------------------------
# Structural morphisms (label level)


def hcomp_fn(psi, phi) -> MorFn:
    """Horizontal composite ``psi ⋆ phi : Q'∘P' -> Q∘P`` for ``psi: Q'->Q``, ``phi: P'->P``."""
    psi, phi = _as_fn(psi), _as_fn(phi)
    Qs, Qd, Ps, Pd = psi.src, psi.dst, phi.src, phi.dst
    src = Composite(Qs, Ps)
    dst = Composite(Qd, Pd)

    memo: dict = {}

    def on_B(op):
        got = memo.get(op)
        if got is None:
            c, phis = op
            c2 = psi.on_B(c)
            slot = {psi.on_E(f): k for k, f in enumerate(Qs.inputs(c))}
            got = memo[op] = (c2, tuple(phi.on_B(phis[slot[f2]]) for f2 in Qd.inputs(c2)))
        return got

    def on_E(e):
        c, phis, f, x = e
        return on_B((c, phis)) + (psi.on_E(f), phi.on_E(x))

    return MorFn(src, dst, on_I=phi.on_I, on_J=psi.on_J, on_B=on_B, on_E=on_E)


def hcomp_mor(psi: PolyMor, phi: PolyMor) -> PolyMor:
    """Horizontal composite, realized on the materialized composites."""
    if psi.src.I.size != phi.src.J.size or psi.dst.I.size != phi.dst.J.size:
        raise ShapeError("horizontal composition boundary mismatch")
    if psi.on_I.table != phi.on_J.table:
        raise ShapeError("middle colour maps of the two morphisms disagree")
    fn = hcomp_fn(psi, phi)
    return fn.realize(compose_poly(psi.src, phi.src), compose_poly(psi.dst, phi.dst))


def whisker_left(Q, phi) -> MorFn:
    """``Q ⋆ phi``; cheap because the outer fibers are untouched."""
    phi = _as_fn(phi)
    src = Composite(Q, phi.src)
    dst = Composite(Q, phi.dst)

    def on_B(op):
        c, phis = op
        return (c, tuple(phi.on_B(b) for b in phis))

    def on_E(e):
        c, phis, f, x = e
        return (c, tuple(phi.on_B(b) for b in phis), f, phi.on_E(x))

    return MorFn(src, dst, on_I=phi.on_I, on_J=_ident, on_B=on_B, on_E=on_E)


def assoc_fn(P, Q, R) -> MorFn:
    """``(R∘Q)∘P -> R∘(Q∘P)`` by re-nesting labels."""
    RQ = Composite(R, Q)
    QP = Composite(Q, P)
    src = Composite(RQ, P)
    dst = Composite(R, QP)

    def split(a, psi, phi):
        chi = []
        k = 0
        for c in psi:
            n = len(Q.inputs(c))
            chi.append((c, phi[k : k + n]))
            k += n
        return (a, tuple(chi))

    def on_B(op):
        (a, psi), phi = op
        return split(a, psi, phi)

    def on_E(e):
        (a, psi), phi, (_, _, h, f), x = e
        a2, chi = split(a, psi, phi)
        idx = R.inputs(a).index(h)
        c, phic = chi[idx]
        return (a2, chi, h, (c, phic, f, x))

    return MorFn(src, dst, _ident, _ident, on_B, on_E)


def assoc_inv_fn(P, Q, R) -> MorFn:
    """``R∘(Q∘P) -> (R∘Q)∘P``."""
    RQ = Composite(R, Q)
    QP = Composite(Q, P)
    src = Composite(R, QP)
    dst = Composite(RQ, P)

    def on_B(op):
        a, chi = op
        psi = tuple(c for c, _ in chi)
        phi = tuple(b for _, phic in chi for b in phic)
        return ((a, psi), phi)

    def on_E(e):
        a, chi, h, (c, phic, f, x) = e
        inner, phi = on_B((a, chi))
        return (inner, phi, (a, inner[1], h, f), x)

    return MorFn(src, dst, _ident, _ident, on_B, on_E)


def left_unitor_fn(P) -> MorFn:
    """``id_J ∘ P -> P``."""
    src = Composite(identity_poly(P.J), P)
    return MorFn(src, P, _ident, _ident, lambda op: op[1][0], lambda e: e[3])


def left_unitor_inv_fn(P) -> MorFn:
    dst = Composite(identity_poly(P.J), P)

    def on_B(b):
        j = P.output_colour(b)
        return (j, (b,))

    def on_E(e):
        b = P.op_of(e)
        j = P.output_colour(b)
        return (j, (b,), j, e)

    return MorFn(P, dst, _ident, _ident, on_B, on_E)


def right_unitor_fn(P) -> MorFn:
    """``P ∘ id_I -> P``."""
    src = Composite(P, identity_poly(P.I))
    return MorFn(src, P, _ident, _ident, lambda op: op[0], lambda e: e[2])


def right_unitor_inv_fn(P) -> MorFn:
    dst = Composite(P, identity_poly(P.I))

    def on_B(b):
        return (b, tuple(P.input_colour(e) for e in P.inputs(b)))

    def on_E(e):
        b = P.op_of(e)
        return on_B(b) + (e, P.input_colour(e))

    return MorFn(P, dst, _ident, _ident, on_B, on_E)


def associator(P, Q, R) -> tuple[PolyMor, PolyMor]:
    """Mutually inverse isos ``(R∘Q)∘P ⇄ R∘(Q∘P)``."""
    lhs = compose_poly(compose_poly(R, Q), P)
    rhs = compose_poly(R, compose_poly(Q, P))
    return assoc_fn(P, Q, R).realize(lhs, rhs), assoc_inv_fn(P, Q, R).realize(rhs, lhs)


def unitors(P) -> dict[str, tuple[PolyMor, PolyMor]]:
    """``{"left": (id∘P -> P, P -> id∘P), "right": (P∘id -> P, P -> P∘id)}``."""
    Pm = materialize(P)
    left = compose_poly(identity_poly(Pm.J), Pm)
    right = compose_poly(Pm, identity_poly(Pm.I))
    return {
        "left": (left_unitor_fn(Pm).realize(left, Pm), left_unitor_inv_fn(Pm).realize(Pm, left)),
        "right": (right_unitor_fn(Pm).realize(right, Pm), right_unitor_inv_fn(Pm).realize(Pm, right)),
    }


def sum_fn(alpha, beta) -> MorFn:
    """``alpha ⊔ beta``."""
    alpha, beta = _as_fn(alpha), _as_fn(beta)
    parts = (alpha, beta)
    return MorFn(
        Sum(alpha.src, beta.src),
        Sum(alpha.dst, beta.dst),
        alpha.on_I,
        alpha.on_J,
        lambda op: (op[0], parts[op[0]].on_B(op[1])),
        lambda e: (e[0], parts[e[0]].on_E(e[1])),
    )


def copair_fn(alpha, beta) -> MorFn:
    """``[alpha | beta] : X ⊔ Y -> Z``."""
    alpha, beta = _as_fn(alpha), _as_fn(beta)
    parts = (alpha, beta)
    return MorFn(
        Sum(alpha.src, beta.src),
        alpha.dst,
        alpha.on_I,
        alpha.on_J,
        lambda op: parts[op[0]].on_B(op[1]),
        lambda e: parts[e[0]].on_E(e[1]),
    )


def inclusion_fn(left, right, which: int) -> MorFn:
    src = (left, right)[which]
    return MorFn(src, Sum(left, right), _ident, _ident, lambda op: (which, op), lambda e: (which, e))


def distribute_fn(X, Y, C) -> MorFn:
    """``(X ⊔ Y) ∘ C -> (X∘C) ⊔ (Y∘C)``."""
    src = Composite(Sum(X, Y), C)
    dst = Sum(Composite(X, C), Composite(Y, C))

    def on_B(op):
        (k, x), phi = op
        return (k, (x, phi))

    def on_E(e):
        (k, x), phi, (_, f), y = e
        return (k, (x, phi, f, y))

    return MorFn(src, dst, _ident, _ident, on_B, on_E)


def is_labelwise_equal(f: MorFn, g: MorFn, P) -> Report:
    """Compare two label-level morphisms out of ``P`` on every operation and input."""
    rep = Report(True)
    count = 0
    for b in P.ops():
        count += 1
        if f.on_B(b) != g.on_B(b):
            rep.fail(f"operations differ at {b!r}")
            return rep
        for e in P.inputs(b):
            if f.on_E(e) != g.on_E(e):
                rep.fail(f"inputs differ at {e!r}")
                return rep
    rep.data["checked_ops"] = count
    return rep
