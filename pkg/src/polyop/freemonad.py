"""Free monads on polynomial endofunctors, by the ``P_n`` chain and by ``P``-trees.

``P``-trees are nested terms: ``("eta", i)`` is the trivial tree of colour
``i`` and ``("node", b, children)`` is an operation ``b`` with one child per
input of ``b`` (in the order of ``P.inputs(b)``).  A leaf is addressed by its
path, the tuple of inputs traversed from the root.  Leaves are listed in
depth-first order, which is also the input order of the corresponding
operation of ``P_h``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from . import finset
from .errors import ShapeError
from .finset import FiniteMap, FiniteSet, check_guard
from .lambek import (  # noqa: F401  (W-types and twisting are part of this module's surface)
    LambekAlgebra,
    LambekCoalgebra,
    Unbounded,
    WType,
    adamek_wtype,
    check_pca,
    constant_poly,
    free_algebra,
    twist_set,
)
from .poly import (
    Composite,
    Family,
    FamilyMap,
    MorFn,
    PolyMor,
    Polynomial,
    Report,
    Sum,
    assoc_fn,
    compose_poly,
    evaluate,
    hcomp_fn,
    hom_poly,
    identity_fn,
    identity_poly,
    inclusion_fn,
    is_labelwise_equal,
    left_unitor_inv_fn,
    materialize,
    mor_component,
    right_unitor_inv_fn,
    validate_mor,
    whisker_left,
)
from .tree import Tree, _tree_from_tables

# Lambek-algebra names above are re-exported from here.

ETA = "eta"
NODE = "node"


def coproduct_poly(P, Q) -> tuple[Polynomial, PolyMor, PolyMor]:
    """``P ⊔ Q`` over common colours with its two cartesian inclusions."""
    P, Q = materialize(P), materialize(Q)
    S = materialize(Sum(P, Q))
    return S, inclusion_fn(P, Q, 0).realize(P, S), inclusion_fn(P, Q, 1).realize(Q, S)


# --------------------------------------------------------------------------
# The chain P_0 -> P_1 -> ...


class Chain:
    """Lazy ``P_h`` with transition maps ``f_h: P_{h-1} -> P_h`` and ``μ_{m,n}``."""

    def __init__(self, P):
        self.P = materialize(P)
        self.unit_poly = identity_poly(self.P.I)
        self._levels = [self.unit_poly]
        self._memo: dict = {}

    def level(self, h: int):
        if h < 0:
            raise ShapeError("height must be a natural number")
        while len(self._levels) <= h:
            self._levels.append(Sum(self.unit_poly, Composite(self.P, self._levels[-1])))
        return self._levels[h]

    # transitions ----------------------------------------------------------

    def f_op(self, h: int, x):
        """``f_h: P_{h-1} -> P_h`` on operations."""
        if h == 1:
            return (0, x)
        k, y = x
        if k == 0:
            return x
        key = ("f", h, x)
        got = self._memo.get(key)
        if got is None:
            a, phi = y
            got = self._memo[key] = (1, (a, tuple(self.f_op(h - 1, z) for z in phi)))
        return got

    def f_input(self, h: int, e):
        if h == 1:
            return (0, e)
        k, y = e
        if k == 0:
            return e
        a, phi, f, x = y
        return (1, (a, tuple(self.f_op(h - 1, z) for z in phi), f, self.f_input(h - 1, x)))

    def raise_op(self, lo: int, hi: int, x):
        for h in range(lo + 1, hi + 1):
            x = self.f_op(h, x)
        return x

    def raise_input(self, lo: int, hi: int, e):
        for h in range(lo + 1, hi + 1):
            e = self.f_input(h, e)
        return e

    def transition_fn(self, h: int) -> MorFn:
        """``f_h`` as a label-level morphism ``P_{h-1} -> P_h``."""
        if h < 1:
            raise ShapeError("transitions start at f_1")
        return MorFn(
            self.level(h - 1),
            self.level(h),
            on_I=_ident,
            on_J=_ident,
            on_B=lambda x: self.f_op(h, x),
            on_E=lambda e: self.f_input(h, e),
        )

    def raise_fn(self, lo: int, hi: int) -> MorFn:
        return MorFn(
            self.level(lo),
            self.level(hi),
            _ident,
            _ident,
            lambda x: self.raise_op(lo, hi, x),
            lambda e: self.raise_input(lo, hi, e),
        )

    # multiplication cells -------------------------------------------------

    def _split(self, n: int, a, psi, phi):
        """Cut ``phi`` (indexed by inputs of ``(1, (a, psi))`` in ``P_{n+1}``) into per-child pieces."""
        Pn = self.level(n)
        pieces = []
        k = 0
        for y in psi:
            size = len(Pn.inputs(y))
            pieces.append(phi[k : k + size])
            k += size
        return pieces

    def mu_op(self, m: int, n: int, x):
        """``μ_{m,n}: P_n ∘ P_m -> P_{m+n}`` on operations ``(c, phi)``."""
        c, phi = x
        if n == 0:
            return phi[0]
        k, y = c
        if k == 0:
            return self.raise_op(m, m + n, phi[0])
        key = ("mu", m, n, x)
        got = self._memo.get(key)
        if got is None:
            a, psi = y
            pieces = self._split(n - 1, a, psi, phi)
            got = (1, (a, tuple(self.mu_op(m, n - 1, (z, piece)) for z, piece in zip(psi, pieces))))
            self._memo[key] = got
        return got

    def mu_input(self, m: int, n: int, e):
        c, phi, fc, x = e
        if n == 0:
            return x
        k, y = c
        if k == 0:
            return self.raise_input(m, m + n, x)
        a, psi = y
        pieces = self._split(n - 1, a, psi, phi)
        ys = tuple(self.mu_op(m, n - 1, (z, piece)) for z, piece in zip(psi, pieces))
        _, (_, _, f, ein) = fc
        slot = self.P.inputs(a).index(f)
        inner = self.mu_input(m, n - 1, (psi[slot], pieces[slot], ein, x))
        return (1, (a, ys, f, inner))

    def mu_fn(self, m: int, n: int) -> MorFn:
        return MorFn(
            Composite(self.level(n), self.level(m)),
            self.level(m + n),
            _ident,
            _ident,
            lambda x: self.mu_op(m, n, x),
            lambda e: self.mu_input(m, n, e),
        )

    def mu_squares(self, m: int, n: int) -> Report:
        """Check both compatibility squares of ``μ_{m,n}`` with the transitions, elementwise.

        (1) ``f_{m+n+1} ∘ μ_{m,n} = μ_{m,n+1} ∘ (f_{n+1} ⋆ P_m)``
        (2) ``f_{m+n+1} ∘ μ_{m,n} = μ_{m+1,n} ∘ (P_n ⋆ f_{m+1})``
        """
        dom = Composite(self.level(n), self.level(m))
        top = self.mu_fn(m, n).then(self.transition_fn(m + n + 1))
        first = hcomp_fn(self.transition_fn(n + 1), identity_fn(self.level(m))).then(self.mu_fn(m, n + 1))
        second = whisker_left(self.level(n), self.transition_fn(m + 1)).then(self.mu_fn(m + 1, n))
        r1 = is_labelwise_equal(top, first, dom)
        r2 = is_labelwise_equal(top, second, dom)
        rep = Report(r1.ok and r2.ok, r1.failures + r2.failures)
        rep.data = {"domain_ops": r1.data.get("checked_ops", 0), "square1": r1.ok, "square2": r2.ok}
        return rep

    # decoding into P-trees ------------------------------------------------

    def decode_op(self, h: int, x):
        if h == 0:
            return (ETA, x)
        k, y = x
        if k == 0:
            return (ETA, y)
        a, phi = y
        return (NODE, a, tuple(self.decode_op(h - 1, z) for z in phi))

    def decode_path(self, h: int, e) -> tuple:
        if h == 0:
            return ()
        k, y = e
        if k == 0:
            return ()
        _, _, f, x = y
        return (f,) + self.decode_path(h - 1, x)

    def tree_fn(self, h: int) -> MorFn:
        """``P_h -> F_h``: decode chain labels into ``P``-trees of height at most ``h``."""
        return MorFn(
            self.level(h),
            None,
            _ident,
            _ident,
            lambda x: self.decode_op(h, x),
            lambda e: (self.decode_op(h, self.level(h).op_of(e)), self.decode_path(h, e)),
        )


def _ident(x):
    return x


def pn_chain(P, h: int, guard: int | None = None) -> Polynomial:
    return materialize(Chain(P).level(h), guard)


def transition(P, h: int, guard: int | None = None) -> PolyMor:
    """``f_{h+1}: P_h -> P_{h+1}`` realized."""
    ch = Chain(P)
    src = materialize(ch.level(h), guard)
    dst = materialize(ch.level(h + 1), guard)
    return ch.transition_fn(h + 1).realize(src, dst)


def mu_mn(P, m: int, n: int, guard: int | None = None) -> PolyMor:
    """``μ_{m,n}: P_n ∘ P_m -> P_{m+n}`` realized."""
    ch = Chain(P)
    src = compose_poly(ch.level(n), ch.level(m), guard)
    dst = materialize(ch.level(m + n), guard)
    return ch.mu_fn(m, n).realize(src, dst)


# --------------------------------------------------------------------------
# P-trees


def eta_term(i):
    return (ETA, i)


def node_term(b, children):
    return (NODE, b, tuple(children))


def term_colour(P, t):
    return t[1] if t[0] == ETA else P.output_colour(t[1])


def term_height(t) -> int:
    if t[0] == ETA:
        return 0
    return 1 + max((term_height(c) for c in t[2]), default=0)


def term_nodes(t) -> int:
    if t[0] == ETA:
        return 0
    return 1 + sum(term_nodes(c) for c in t[2])


def term_leaves(P, t) -> list[tuple[tuple, object]]:
    """``(path, colour)`` for each leaf, depth first."""
    if t[0] == ETA:
        return [((), t[1])]
    out = []
    for e, child in zip(P.inputs(t[1]), t[2]):
        out.extend(((e,) + path, c) for path, c in term_leaves(P, child))
    return out


def graft_terms(P, t, subs):
    """Replace the ``k``-th leaf of ``t`` by ``subs[k]`` (colours must agree)."""
    subs = list(subs)
    pos = [0]

    def go(u):
        if u[0] == ETA:
            s = subs[pos[0]]
            pos[0] += 1
            if term_colour(P, s) != u[1]:
                raise ShapeError("grafted tree has the wrong root colour")
            return s
        return (NODE, u[1], tuple(go(c) for c in u[2]))

    out = go(t)
    if pos[0] != len(subs):
        raise ShapeError("need exactly one tree per leaf")
    return out


def ptree_canonical_form(t) -> str:
    """Canonical string with decorations at nodes and colours at edges."""
    if t[0] == ETA:
        return f"|{t[1]!r}"
    return f"({t[1]!r}:" + ",".join(sorted(f"{e!r}={ptree_canonical_form(c)}" for e, c in _children(t))) + ")"


def _children(t):
    return list(enumerate(t[2]))


@dataclass(frozen=True)
class PTree:
    """A tree with a cartesian map into ``P``."""

    P: Polynomial = field(compare=False, repr=False)
    term: tuple

    @cached_property
    def _shape(self) -> tuple[Tree, PolyMor]:
        P = self.P
        edge_col = [term_colour(P, self.term)]
        s, p, t, node_op, mid = [], [], [], [], []

        def visit(u, out_edge):
            if u[0] == ETA:
                return
            v = len(t)
            t.append(out_edge)
            node_op.append(P.B.index(u[1]))
            for e, child in zip(P.inputs(u[1]), u[2]):
                a = len(edge_col)
                edge_col.append(P.I.index(P.input_colour(e)))
                s.append(a)
                p.append(v)
                mid.append(P.E.index(e))
                visit(child, a)

        visit(self.term, 0)
        T = _tree_from_tables(len(edge_col), s, p, t)
        A = T.poly.I
        cols = FiniteMap(A, P.I, edge_col)
        deco = PolyMor(T.poly, P, cols, cols, FiniteMap(T.poly.E, P.E, mid), FiniteMap(T.poly.B, P.B, node_op))
        return T, deco

    @property
    def shape(self) -> Tree:
        return self._shape[0]

    @property
    def deco(self) -> PolyMor:
        return self._shape[1]

    @property
    def height(self) -> int:
        return term_height(self.term)

    def canonical_form(self) -> str:
        return ptree_canonical_form(self.term)

    def automorphisms(self) -> list[PolyMor]:
        """Automorphisms of the shape commuting with the decoration."""
        T, d = self._shape
        out = []
        for m in hom_poly(T.poly, T.poly):
            if not m.is_iso:
                continue
            if (
                finset.compose(d.on_I, m.on_I).table == d.on_I.table
                and finset.compose(d.beta, m.beta).table == d.beta.table
                and finset.compose(d.eps, m.eps).table == d.eps.table
            ):
                out.append(m)
        return out


def ptree_from_deco(P: Polynomial, T: Tree, deco: PolyMor):
    """Read the nested term off a decorated tree."""

    def at(e):
        v = T.node_above(e)
        if v is None:
            return (ETA, P.I.label(deco.on_I(e)))
        b = deco.beta(v)
        slot = {deco.eps(m): T.poly.s(m) for m in T.poly.fiber_indices[v]}
        return (NODE, P.B.label(b), tuple(at(slot[m2]) for m2 in P.fiber_indices[b]))

    return at(T.root)


class FreeMonadView:
    """Height-truncated views of the free monad on ``P``."""

    def __init__(self, P):
        self.P = materialize(P)
        self._trees: list[tuple] = []
        self._polys: dict[int, Polynomial] = {}

    def trees(self, h: int, guard: int | None = None) -> tuple:
        """All ``P``-trees of height at most ``h``; trivial trees first, then by root operation."""
        P = self.P
        while len(self._trees) <= h:
            k = len(self._trees)
            etas = [eta_term(i) for i in P.I.all_labels()]
            if k == 0:
                self._trees.append(tuple(etas))
                continue
            prev = self._trees[k - 1]
            by_colour: dict = {}
            for t in prev:
                by_colour.setdefault(term_colour(P, t), []).append(t)
            out = list(etas)
            for b in P.ops():
                choices = [by_colour.get(P.input_colour(e), []) for e in P.inputs(b)]
                count = 1
                for c in choices:
                    count *= len(c)
                check_guard("P-tree enumeration", len(out) + count, guard)
                out.extend(node_term(b, kids) for kids in itertools.product(*choices))
            self._trees.append(tuple(out))
        return self._trees[h]

    def marked(self, h: int, guard: int | None = None) -> list[tuple]:
        return [(t, path) for t in self.trees(h, guard) for path, _ in term_leaves(self.P, t)]

    def poly(self, h: int, guard: int | None = None) -> Polynomial:
        """``I <- tr'_{<=h} -> tr_{<=h} -> I`` (marked-leaf colour, root colour)."""
        if h in self._polys:
            return self._polys[h]
        P = self.P
        trees = self.trees(h, guard)
        B = FiniteSet.of(trees)
        e_labels, s, p = [], [], []
        for k, t in enumerate(trees):
            for path, c in term_leaves(P, t):
                e_labels.append((t, path))
                s.append(P.I.index(c))
                p.append(k)
        check_guard("free monad inputs", len(e_labels), guard)
        E = FiniteSet.of(e_labels)
        tt = [P.I.index(term_colour(P, t)) for t in trees]
        F = Polynomial(P.I, E, B, P.I, FiniteMap(E, P.I, s), FiniteMap(E, B, p), FiniteMap(B, P.I, tt))
        self._polys[h] = F
        return F

    def unit(self, h: int = 0) -> PolyMor:
        F = self.poly(h)
        I = self.P.I
        return MorFn(
            identity_poly(I), F, _ident, _ident, lambda i: eta_term(i), lambda i: (eta_term(i), ())
        ).realize(identity_poly(I), F)

    def mult_fn(self, a: int, b: int) -> MorFn:
        """Grafting ``F_a ∘ F_b -> F_{a+b}``: trees of ``F_b`` are glued onto the leaves of a tree of ``F_a``."""
        P = self.P

        def on_B(x):
            t, subs = x
            return graft_terms(P, t, subs)

        def on_E(e):
            t, subs, (_, path), (_, path2) = e
            return (graft_terms(P, t, subs), path + path2)

        return MorFn(Composite(self.poly(a), self.poly(b)), self.poly(a + b), _ident, _ident, on_B, on_E)

    def mult(self, h: int) -> PolyMor:
        return self.mult_fn(h, h).realize(compose_poly(self.poly(h), self.poly(h)), self.poly(2 * h))

    def corolla_fn(self) -> MorFn:
        """``P -> F_1``: an operation goes to its one-node tree."""
        P = self.P

        def on_B(b):
            return node_term(b, [eta_term(P.input_colour(e)) for e in P.inputs(b)])

        return MorFn(P, self.poly(1), _ident, _ident, on_B, lambda e: (on_B(P.op_of(e)), (e,)))

    def laws_check(self, a: int = 1, b: int = 1, c: int = 1) -> Report:
        """Unit and associativity laws of grafting, with heights tracked (a partial monad)."""
        rep = Report(True)
        for h in sorted({a, b, c}):
            F = self.poly(h)
            u0 = self.unit(0).fn()
            left = left_unitor_inv_fn(F).then(hcomp_fn(u0, identity_fn(F))).then(self.mult_fn(0, h))
            right = right_unitor_inv_fn(F).then(hcomp_fn(identity_fn(F), u0)).then(self.mult_fn(h, 0))
            for name, fn in (("left unit", left), ("right unit", right)):
                r = is_labelwise_equal(fn, identity_fn(F), F)
                if not r.ok:
                    rep.fail(f"{name} at height {h}: {r.failures[0]}")
        Fa, Fb, Fc = self.poly(a), self.poly(b), self.poly(c)
        dom = Composite(Composite(Fa, Fb), Fc)
        lhs = hcomp_fn(self.mult_fn(a, b), identity_fn(Fc)).then(self.mult_fn(a + b, c))
        rhs = assoc_fn(Fc, Fb, Fa).then(whisker_left(Fa, self.mult_fn(b, c))).then(self.mult_fn(a, b + c))
        r = is_labelwise_equal(lhs, rhs, dom)
        if not r.ok:
            rep.fail("associativity: " + r.failures[0])
        rep.data["associativity_ops"] = r.data.get("checked_ops", 0)
        return rep


def enumerate_ptrees(P, max_height: int, guard: int | None = None) -> list[PTree]:
    view = FreeMonadView(P)
    return [PTree(view.P, t) for t in view.trees(max_height, guard)]


def ptrees_marked(P, max_height: int, guard: int | None = None) -> list[tuple[PTree, tuple]]:
    view = FreeMonadView(P)
    return [(PTree(view.P, t), path) for t, path in view.marked(max_height, guard)]


def free_monad_poly(P, h: int, guard: int | None = None) -> Polynomial:
    return FreeMonadView(P).poly(h, guard)


def free_unit(P, h: int = 0) -> PolyMor:
    return FreeMonadView(P).unit(h)


def free_mult(P, h: int) -> PolyMor:
    return FreeMonadView(P).mult(h)


def chain_tree_iso(P, h: int) -> PolyMor:
    """The explicit isomorphism ``P_h -> F_h`` obtained by decoding chain labels."""
    ch = Chain(P)
    src = materialize(ch.level(h))
    dst = FreeMonadView(ch.P).poly(h)
    fn = ch.tree_fn(h)
    return MorFn(src, dst, fn.on_I, fn.on_J, fn.on_B, fn.on_E).realize(src, dst)


def free_eval_via_trees(P, X: Family, h: int, guard: int | None = None) -> Family:
    """Trees of height at most ``h`` with leaves labelled by elements of ``X`` of matching colour."""
    return evaluate(FreeMonadView(P).poly(h, guard), X, guard)


def free_eval_comparison(P, X: Family, h: int) -> FamilyMap:
    """Bijection ``P_h(X) -> (trees of height <= h with X-labelled leaves)``."""
    iso = chain_tree_iso(P, h)
    return mor_component(iso, X)


# --------------------------------------------------------------------------
# Polynomial monads


@dataclass(frozen=True)
class PolynomialMonad:
    P: Polynomial
    unit: PolyMor  # identity_poly(I) -> P
    mult: PolyMor  # P ∘ P -> P
    laws_verified: bool = False


def make_monad(P: Polynomial, unit_ops, unit_inputs, mult_ops, mult_inputs) -> PolynomialMonad:
    """Build from label functions (or dicts) and verify the laws."""
    I = identity_poly(P.I)
    PP = compose_poly(P, P)
    fn = lambda d: d.__getitem__ if isinstance(d, dict) else d
    unit = MorFn(I, P, _ident, _ident, fn(unit_ops), fn(unit_inputs)).realize(I, P)
    mult = MorFn(PP, P, _ident, _ident, fn(mult_ops), fn(mult_inputs)).realize(PP, P)
    M = PolynomialMonad(P, unit, mult)
    return PolynomialMonad(P, unit, mult, monad_laws_check(M).ok)


def monad_laws_check(M: PolynomialMonad) -> Report:
    """Cartesianness of unit and mult, both unit triangles and associativity, elementwise."""
    P = M.P
    rep = Report(True)
    checks = {}
    for name, m in (("unit_cartesian", M.unit), ("mult_cartesian", M.mult)):
        r = validate_mor(m)
        checks[name] = r.ok
        if not r.ok:
            rep.fail(f"{name}: {r.failures[0]}")
    if not rep.ok:
        # the label-level laws below assume inputs land in the fiber of their operation
        rep.data["checks"] = checks
        return rep
    u, mu = M.unit.fn(), M.mult.fn()
    left = left_unitor_inv_fn(P).then(hcomp_fn(u, identity_fn(P))).then(mu)
    right = right_unitor_inv_fn(P).then(hcomp_fn(identity_fn(P), u)).then(mu)
    for name, fn in (("left_unit", left), ("right_unit", right)):
        r = is_labelwise_equal(fn, identity_fn(P), P)
        checks[name] = r.ok
        if not r.ok:
            rep.fail(f"{name}: {r.failures[0]}")
    dom = Composite(Composite(P, P), P)
    lhs = hcomp_fn(mu, identity_fn(P)).then(mu)
    rhs = assoc_fn(P, P, P).then(whisker_left(P, mu)).then(mu)
    r = is_labelwise_equal(lhs, rhs, dom)
    checks["associativity"] = r.ok
    if not r.ok:
        rep.fail(f"associativity: {r.failures[0]}")
    rep.data["checks"] = checks
    return rep


def free_monad_if_finite(P, h: int) -> PolynomialMonad:
    """The free monad as an honest finite monad when no tree is taller than ``h``."""
    view = FreeMonadView(P)
    if len(view.trees(h + 1)) != len(view.trees(h)):
        raise ShapeError(f"free monad has trees taller than {h}")
    F = view.poly(h)
    FF = compose_poly(F, F)
    mult = MorFn(FF, F, _ident, _ident, view.mult_fn(h, h).on_B, view.mult_fn(h, h).on_E).realize(FF, F)
    unit = MorFn(identity_poly(F.I), F, _ident, _ident, eta_term, lambda i: (eta_term(i), ())).realize(
        identity_poly(F.I), F
    )
    M = PolynomialMonad(F, unit, mult)
    return PolynomialMonad(F, unit, mult, monad_laws_check(M).ok)


def fold_ptree(M: PolynomialMonad, t) -> tuple[object, dict]:
    """Fold a tree decorated in ``M.P`` through the multiplication.

    Returns the resulting operation and the bijection from leaf paths to its inputs.
    """
    term = t.term if isinstance(t, PTree) else t
    P = M.P
    u = M.unit.fn()
    mu = M.mult.fn()

    def go(s):
        if s[0] == ETA:
            return u.on_B(s[1]), {(): u.on_E(s[1])}
        b = s[1]
        results = [go(c) for c in s[2]]
        ys = tuple(r[0] for r in results)
        op = mu.on_B((b, ys))
        paths = {}
        for e, (_, sub) in zip(P.inputs(b), results):
            for path, x in sub.items():
                paths[(e,) + path] = mu.on_E((b, ys, e, x))
        return op, paths

    return go(term)


def map_ptree(phi, P, t):
    """Push a ``P``-tree along a cartesian morphism ``phi: P -> Q``."""
    f = phi.fn() if isinstance(phi, PolyMor) else phi

    def go(s):
        if s[0] == ETA:
            return (ETA, f.on_I(s[1]))
        b = s[1]
        b2 = f.on_B(b)
        slot = {f.on_E(e): k for k, e in enumerate(P.inputs(b))}
        return (NODE, b2, tuple(go(s[2][slot[e2]]) for e2 in f.dst.inputs(b2)))

    return go(t)


def extension(P, M: PolynomialMonad, phi):
    """The monad-map extension of ``phi: P -> M.P`` to ``P``-trees."""

    def ext(t):
        return fold_ptree(M, map_ptree(phi, P, t))

    return ext


def adjunction_check(P, M: PolynomialMonad, h: int, guard: int | None = None) -> Report:
    """Free-forgetful bijection at truncation ``h``.

    Every ``phi: P -> M.P`` extends along trees of height at most ``h`` to a
    map compatible with units and grafting, and restricting the extension to
    one-node trees gives ``phi`` back.  Conversely every cartesian map
    ``F_h -> M.P`` compatible with grafting is the extension of its restriction.
    """
    P = materialize(P)
    view = FreeMonadView(P)
    rep = Report(True)
    homs = hom_poly(P, M.P, guard=guard)
    trees = view.trees(h, guard)
    cor = view.corolla_fn()
    u = M.unit.fn()
    mu = M.mult.fn()

    def is_monad_map(op_of_tree) -> str | None:
        for t in trees:
            leaves = term_leaves(P, t)
            top = op_of_tree(t)
            if top is None:
                return f"tree {t!r} has no image"
            # graft trees onto t without exceeding height h
            budget = h - term_height(t)
            small = [s for s in trees if term_height(s) <= budget]
            by_col: dict = {}
            for s in small:
                by_col.setdefault(term_colour(P, s), []).append(s)
            choices = [by_col.get(c, []) for _, c in leaves]
            for subs in itertools.product(*choices):
                g = graft_terms(P, t, subs)
                lhs = op_of_tree(g)
                rhs = mu.on_B((top, tuple(op_of_tree(s) for s in subs)))
                if lhs != rhs:
                    return f"grafting onto {t!r} is not preserved"
        return None

    for phi in homs:
        f = phi.fn()
        ext = extension(P, M, phi)
        for i in P.I.all_labels():
            if ext(eta_term(i))[0] != u.on_B(f.on_I(i)):
                rep.fail("extension does not preserve units")
        for b in P.ops():
            if ext(cor.on_B(b))[0] != f.on_B(b):
                rep.fail(f"restriction of the extension differs at {b!r}")
        bad = is_monad_map(lambda t: ext(t)[0])
        if bad:
            rep.fail(bad)
    # converse: cartesian maps out of F_h that respect units and grafting
    F = view.poly(h, guard)
    converse = 0
    restrictions = set()
    for g in hom_poly(F, M.P, guard=guard):
        gf = g.fn()
        if any(gf.on_B(eta_term(i)) != u.on_B(gf.on_I(i)) for i in P.I.all_labels()):
            continue
        if is_monad_map(gf.on_B) is not None:
            continue
        converse += 1
        restrictions.add(tuple(gf.on_B(cor.on_B(b)) for b in P.ops()))
    rep.data.update({"hom_P_M": len(homs), "monad_maps_from_truncation": converse})
    if converse != len(homs):
        rep.fail(f"{len(homs)} maps P -> M but {converse} monad maps from the truncation")
    elif len(restrictions) != converse:
        rep.fail("distinct monad maps share a restriction")
    return rep


# --------------------------------------------------------------------------
# Counit maps of the chain


def counit_en(P, A: LambekAlgebra, n: int) -> FamilyMap:
    """``e_n: P_n(A) -> A`` with ``e_0 = id`` and ``e_{n+1} = (id | a) ∘ (id ⊔ P(e_n))``."""
    ch = Chain(P)
    X = A.carrier
    a = A.structure
    src = evaluate(ch.level(n), X)

    def e(k, label):
        x, phi = label
        if k == 0:
            return phi[0]
        tag, y = x
        if tag == 0:
            return phi[0]
        b, psi = y
        pieces = ch._split(k - 1, b, psi, phi)
        inner = tuple(e(k - 1, (z, piece)) for z, piece in zip(psi, pieces))
        return a.dst.total.label(a.map(a.src.total.index((b, inner))))

    return FamilyMap(src, X, FiniteMap.from_labels(src.total, X.total, lambda lab: e(n, lab)))
