"""Trees as polynomial endofunctors ``A <-s- M -p-> N -t-> A``.

Edges are ``A``, nodes ``N``, and ``M`` is the set of (node, incoming edge)
pairs.  Trees are non-planar: children are never ordered in any meaningful
way, and every comparison goes through :func:`canonical_form`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from . import finset
from .errors import ShapeError, TreeAxiomError
from .finset import FiniteMap, FiniteSet, Subset, check_guard
from .poly import PolyMor, Polynomial, hom_poly


@dataclass(frozen=True)
class Tree:
    poly: Polynomial
    root: int = field(init=False, compare=False)
    sigma: FiniteMap = field(init=False, compare=False, repr=False)
    height: int = field(init=False, compare=False)
    leaves: Subset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        P = self.poly
        if P.I.size != P.J.size:
            raise ShapeError("a tree is an endofunctor: I and J must coincide")
        if not P.t.is_injective:
            raise TreeAxiomError(2, "t is not injective (two nodes share an outgoing edge)")
        if not P.s.is_injective:
            raise TreeAxiomError(3, "s is not injective (an edge enters two nodes)")
        missing = [a for a in range(P.I.size) if a not in set(P.s.table)]
        if len(missing) != 1:
            raise TreeAxiomError(3, f"expected exactly one edge outside the image of s, found {len(missing)}")
        root = missing[0]
        s_inv = {a: m for m, a in enumerate(P.s.table)}
        sigma = tuple(root if a == root else P.t(P.p(s_inv[a])) for a in range(P.I.size))
        depth = []
        for a in range(P.I.size):
            k, x = 0, a
            while x != root:
                x = sigma[x]
                k += 1
                if k > P.I.size:
                    raise TreeAxiomError(4, f"edge {a} never reaches the root under the successor map")
            depth.append(k)
        with_node = set(P.t.table)
        height = max((depth[a] + (1 if a in with_node else 0) for a in range(P.I.size)), default=0)
        leaves = Subset(P.I, tuple(a for a in range(P.I.size) if a not in with_node))
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "sigma", FiniteMap(P.I, P.I, sigma))
        object.__setattr__(self, "height", height)
        object.__setattr__(self, "leaves", leaves)

    # shape accessors -------------------------------------------------------

    @property
    def n_edges(self) -> int:
        return self.poly.I.size

    @property
    def n_nodes(self) -> int:
        return self.poly.B.size

    def out_edge(self, v: int) -> int:
        return self.poly.t(v)

    def in_edges(self, v: int) -> tuple[int, ...]:
        return tuple(self.poly.s(m) for m in self.poly.fiber_indices[v])

    def arity(self, v: int) -> int:
        return self.poly.arities[v]

    @cached_property
    def _node_above(self) -> dict[int, int]:
        return {self.poly.t(v): v for v in range(self.n_nodes)}

    def node_above(self, e: int) -> int | None:
        """The node whose outgoing edge is ``e`` (``None`` for a leaf)."""
        return self._node_above.get(e)

    def node_below(self, e: int) -> int | None:
        """The node ``e`` enters (``None`` for the root)."""
        if e == self.root:
            return None
        s_inv = {a: m for m, a in enumerate(self.poly.s.table)}
        return self.poly.p(s_inv[e])

    def depth(self, e: int) -> int:
        k = 0
        while e != self.root:
            e = self.sigma(e)
            k += 1
        return k

    def is_leaf(self, e: int) -> bool:
        return e not in self._node_above

    def leaf_list(self) -> tuple[int, ...]:
        return self.leaves.members

    def to_nested(self, e: int | None = None):
        """Nested description: ``None`` for a leaf, a tuple of children for a node."""
        e = self.root if e is None else e
        v = self.node_above(e)
        if v is None:
            return None
        return tuple(self.to_nested(c) for c in self.in_edges(v))


def validate_tree(P: Polynomial) -> Tree:
    return Tree(P)


def _tree_from_tables(n_edges: int, s: Sequence[int], p: Sequence[int], t: Sequence[int]) -> Tree:
    A, M, N = FiniteSet(n_edges), FiniteSet(len(s)), FiniteSet(len(t))
    return Tree(Polynomial(A, M, N, A, FiniteMap(M, A, s), FiniteMap(M, N, p), FiniteMap(N, A, t)))


def from_nested(spec) -> Tree:
    """Build a tree from ``None`` (leaf) / tuple-of-children (node).

    Edge 0 is the root; edges and nodes are numbered in preorder.
    """
    s, p, t = [], [], []
    count = [1]

    def visit(sp, out_edge):
        if sp is None:
            return
        if not isinstance(sp, (tuple, list)):
            raise ShapeError(f"tree description must be None or a sequence, got {sp!r}")
        v = len(t)
        t.append(out_edge)
        for child in sp:
            e = count[0]
            count[0] += 1
            s.append(e)
            p.append(v)
            visit(child, e)

    visit(spec, 0)
    return _tree_from_tables(count[0], s, p, t)


def eta() -> Tree:
    return from_nested(None)


def corolla(n: int) -> Tree:
    """``n+1 <- n -> * -> n+1``: edge 0 is the root, edges ``1..n`` the leaves."""
    if n < 0:
        raise ShapeError("corolla arity must be a natural number")
    return _tree_from_tables(n + 1, list(range(1, n + 1)), [0] * n, [0])


def linear(k: int) -> Tree:
    """Chain of ``k`` unary nodes."""
    spec = None
    for _ in range(k):
        spec = (spec,)
    return from_nested(spec)


# --------------------------------------------------------------------------
# Canonical forms and isomorphisms


def _form_at(T: Tree, e: int) -> str:
    v = T.node_above(e)
    if v is None:
        return "|"
    return "(" + "".join(sorted(_form_at(T, c) for c in T.in_edges(v))) + ")"


def canonical_form(T: Tree) -> str:
    """``|`` for a leaf, ``(`` + sorted child forms + ``)`` for a node."""
    return _form_at(T, T.root)


def tree_iso(S: Tree, T: Tree) -> PolyMor | None:
    """One explicit isomorphism ``S -> T`` when the canonical forms agree."""
    if canonical_form(S) != canonical_form(T):
        return None
    edge = [0] * S.n_edges
    node = [0] * S.n_nodes
    mid = [0] * S.poly.E.size

    def match(a, b):
        edge[a] = b
        v, w = S.node_above(a), T.node_above(b)
        if v is None:
            return
        node[v] = w
        left = sorted(S.poly.fiber_indices[v], key=lambda m: _form_at(S, S.poly.s(m)))
        right = sorted(T.poly.fiber_indices[w], key=lambda m: _form_at(T, T.poly.s(m)))
        for m, m2 in zip(left, right):
            mid[m] = m2
            match(S.poly.s(m), T.poly.s(m2))

    match(S.root, T.root)
    A, A2 = S.poly.I, T.poly.I
    return PolyMor(
        S.poly,
        T.poly,
        FiniteMap(A, A2, edge),
        FiniteMap(A, A2, edge),
        FiniteMap(S.poly.E, T.poly.E, mid),
        FiniteMap(S.poly.B, T.poly.B, node),
    )


def automorphisms(T: Tree, guard: int | None = None) -> list[PolyMor]:
    return [m for m in hom_poly(T.poly, T.poly, guard=guard) if m.is_iso]


def embeddings(S: Tree, T: Tree, guard: int | None = None) -> list[PolyMor]:
    """All tree maps ``S -> T``; each is checked to be injective on edges and nodes."""
    out = hom_poly(S.poly, T.poly, guard=guard)
    for m in out:
        if not (m.on_I.is_injective and m.beta.is_injective):
            raise ShapeError("found a non-injective map between trees")
    return out


def enumerate_trees(max_nodes: int, max_arity: int, guard: int | None = None) -> list[Tree]:
    """One tree per isomorphism class, ordered by (node count, canonical form).

    Trees are grown by grafting corollas onto leaves and deduplicated by
    canonical form.
    """
    if max_nodes < 0 or max_arity < 0:
        raise ShapeError("bounds must be natural numbers")
    levels: list[dict[str, Tree]] = [{canonical_form(eta()): eta()}]
    total = 1
    for _ in range(max_nodes):
        nxt: dict[str, Tree] = {}
        for T in levels[-1].values():
            for leaf in T.leaf_list():
                for a in range(max_arity + 1):
                    G = graft(corolla(a), T, leaf)
                    nxt.setdefault(canonical_form(G), G)
        total += len(nxt)
        check_guard("enumerate_trees", total, guard)
        levels.append(nxt)
    return [level[k] for level in levels for k in sorted(level)]


# --------------------------------------------------------------------------
# Grafting


@dataclass(frozen=True)
class Graft:
    tree: Tree
    leg_S: FiniteMap  # edges of S -> edges of result
    leg_R: FiniteMap  # edges of R -> edges of result
    node_S: FiniteMap
    node_R: FiniteMap


def graft_with_legs(S: Tree, R: Tree, leaf: int) -> Graft:
    """Pushout ``S ⊔_η R`` identifying the root of ``S`` with ``leaf`` of ``R``."""
    if not 0 <= leaf < R.n_edges or not R.is_leaf(leaf):
        raise ShapeError(f"edge {leaf} is not a leaf of the base tree")
    one = finset.POINT
    f = FiniteMap(one, S.poly.I, (S.root,))
    g = FiniteMap(one, R.poly.I, (leaf,))
    A, leg_S, leg_R = finset.pushout_mono(f, g)
    N, nR, nS = finset.coproduct(R.poly.B, S.poly.B)
    M, mR, mS = finset.coproduct(R.poly.E, S.poly.E)
    PS, PR = S.poly, R.poly
    s = tuple(leg_R(PR.s(m)) for m in range(PR.E.size)) + tuple(leg_S(PS.s(m)) for m in range(PS.E.size))
    p = tuple(nR(PR.p(m)) for m in range(PR.E.size)) + tuple(nS(PS.p(m)) for m in range(PS.E.size))
    t = tuple(leg_R(PR.t(v)) for v in range(PR.B.size)) + tuple(leg_S(PS.t(v)) for v in range(PS.B.size))
    T = Tree(Polynomial(A, M, N, A, FiniteMap(M, A, s), FiniteMap(M, N, p), FiniteMap(N, A, t)))
    return Graft(T, leg_S, leg_R, nS, nR)


def graft(S: Tree, R: Tree, leaf: int) -> Tree:
    return graft_with_legs(S, R, leaf).tree


def graft_inclusions(g: Graft, S: Tree, R: Tree) -> tuple[PolyMor, PolyMor]:
    """The two subtree inclusions ``S -> T`` and ``R -> T`` as polynomial maps."""
    T = g.tree

    def inclusion(X: Tree, edges: FiniteMap, nodes: FiniteMap) -> PolyMor:
        mids = []
        for m in range(X.poly.E.size):
            v2 = nodes(X.poly.p(m))
            a2 = edges(X.poly.s(m))
            mids.append(next(m2 for m2 in T.poly.fiber_indices[v2] if T.poly.s(m2) == a2))
        return PolyMor(X.poly, T.poly, edges, edges, FiniteMap(X.poly.E, T.poly.E, mids), nodes)

    return inclusion(S, g.leg_S, g.node_S), inclusion(R, g.leg_R, g.node_R)


# --------------------------------------------------------------------------
# Elements and reassembly


@dataclass(frozen=True)
class ElementRef:
    kind: str  # "edge" or "node"
    index: int
    inclusion: PolyMor


@dataclass(frozen=True)
class Elements:
    edges: tuple  # ElementRefs of kind "edge", one per edge
    nodes: tuple  # ElementRefs of kind "node", one per node
    # (edge ref, node ref, position): position -1 is the root of the corolla, k >= 0 its k-th leaf
    incidence: tuple


def node_inclusion(T: Tree, v: int) -> PolyMor:
    """``C_n -> T`` picking out node ``v`` (corolla leaf ``k`` goes to the ``k``-th input of ``v``)."""
    C = corolla(T.arity(v))
    ms = T.poly.fiber_indices[v]
    edges = (T.out_edge(v),) + tuple(T.poly.s(m) for m in ms)
    A, A2 = C.poly.I, T.poly.I
    return PolyMor(
        C.poly,
        T.poly,
        FiniteMap(A, A2, edges),
        FiniteMap(A, A2, edges),
        FiniteMap(C.poly.E, T.poly.E, ms),
        FiniteMap(C.poly.B, T.poly.B, (v,)),
    )


def edge_inclusion(T: Tree, e: int) -> PolyMor:
    H = eta()
    A, A2 = H.poly.I, T.poly.I
    m = FiniteMap(A, A2, (e,))
    return PolyMor(H.poly, T.poly, m, m, FiniteMap(H.poly.E, T.poly.E, ()), FiniteMap(H.poly.B, T.poly.B, ()))


def elements(T: Tree) -> Elements:
    edge_refs = tuple(ElementRef("edge", e, edge_inclusion(T, e)) for e in range(T.n_edges))
    node_refs = tuple(ElementRef("node", v, node_inclusion(T, v)) for v in range(T.n_nodes))
    incidence = []
    for v in range(T.n_nodes):
        incidence.append((T.out_edge(v), v, -1))
        for k, e in enumerate(T.in_edges(v)):
            incidence.append((e, v, k))
    return Elements(edge_refs, node_refs, tuple(incidence))


def reassemble(el: Elements) -> Tree:
    """Rebuild a tree from its elements by iterated grafting from the root.

    Only the element shapes and the incidence relation are used.
    """
    n_edges, n_nodes = len(el.edges), len(el.nodes)
    arity = [el.nodes[v].inclusion.src.E.size for v in range(n_nodes)]
    root_of: dict[int, int] = {}
    leaf_slot: dict[int, tuple[int, int]] = {}
    for e, v, pos in el.incidence:
        if not (0 <= e < n_edges and 0 <= v < n_nodes) or pos >= arity[v] or pos < -1:
            raise ShapeError("inconsistent incidence: reference out of range")
        if pos == -1:
            if e in root_of or v in root_of.values():
                raise ShapeError("inconsistent incidence: repeated node output")
            root_of[e] = v
        else:
            if e in leaf_slot:
                raise ShapeError("inconsistent incidence: an edge enters two nodes")
            leaf_slot[e] = (v, pos)
    if len(root_of) != n_nodes or len(leaf_slot) != sum(arity):
        raise ShapeError("inconsistent incidence: missing node data")
    roots = [e for e in range(n_edges) if e not in leaf_slot]
    if len(roots) != 1:
        raise ShapeError("inconsistent incidence: no unique root edge")
    inputs = {v: [None] * arity[v] for v in range(n_nodes)}
    for e, (v, k) in leaf_slot.items():
        inputs[v][k] = e

    T = eta()
    where = {0: roots[0]}  # edge of current tree -> element edge
    pending = [0]
    used = 0
    while pending:
        a = pending.pop()
        e = where[a]
        v = root_of.get(e)
        if v is None:
            continue
        g = graft_with_legs(corolla(arity[v]), T, a)
        where = {g.leg_R(x): y for x, y in where.items()}
        for k, e_in in enumerate(inputs[v]):
            where[g.leg_S(k + 1)] = e_in
            pending.append(g.leg_S(k + 1))
        T = g.tree
        used += 1
    if used != n_nodes or len(where) != n_edges:
        raise ShapeError("inconsistent incidence: elements do not form one tree")
    return T


def grafting_decomposition(T: Tree) -> tuple[Tree, int, Tree] | None:
    """Cut ``T`` along the first inner input edge of its root node.

    Returns ``(S, leaf, R)`` where ``S`` is the part above the cut edge and
    ``R`` is the rest, with the cut edge as its leaf ``leaf``, so that
    ``graft(S, R, leaf)`` is isomorphic to ``T``.  ``None`` when no input of
    the root node carries a node.
    """
    if T.n_nodes <= 1:
        return None
    v = T.node_above(T.root)
    for e in T.in_edges(v):
        if T.is_leaf(e):
            continue
        above = subtree_with_boundary(T, e, _leaves_above(T, e))
        below_leaves = tuple(x for x in T.leaf_list() if x not in above.edges) + (e,)
        below = subtree_with_boundary(T, T.root, below_leaves)
        S, _ = subtree_tree(above)
        R, emb = subtree_tree(below)
        return (S, emb.on_I.table.index(e), R)
    return None


def _leaves_above(T: Tree, e: int) -> tuple[int, ...]:
    out, stack = [], [e]
    while stack:
        x = stack.pop()
        v = T.node_above(x)
        if v is None:
            out.append(x)
        else:
            stack.extend(T.in_edges(v))
    return tuple(out)


# --------------------------------------------------------------------------
# Subtrees


@dataclass(frozen=True)
class Subtree:
    """A subtree of ``ambient`` given by its edge and node subsets."""

    ambient: Tree
    root: int
    leaves: tuple  # ordered as requested by the caller
    edges: frozenset
    nodes: frozenset


def subtree_with_boundary(T: Tree, root: int, leaves: Sequence[int]) -> Subtree | None:
    """The subtree with the given root edge and exactly the given leaves, if any."""
    leaves = tuple(leaves)
    if len(set(leaves)) != len(leaves):
        return None
    wanted = set(leaves)
    edges, nodes = set(), set()
    stack = [root]
    while stack:
        e = stack.pop()
        edges.add(e)
        if e in wanted:
            continue
        v = T.node_above(e)
        if v is None:
            return None
        nodes.add(v)
        stack.extend(T.in_edges(v))
    if not wanted <= edges:
        return None
    return Subtree(T, root, leaves, frozenset(edges), frozenset(nodes))


def subtree_tree(sub: Subtree) -> tuple[Tree, PolyMor]:
    """Materialize a subtree as a tree with its embedding into the ambient tree."""
    T = sub.ambient
    edge_list = sorted(sub.edges)
    node_list = sorted(sub.nodes)
    eidx = {e: k for k, e in enumerate(edge_list)}
    nidx = {v: k for k, v in enumerate(node_list)}
    mids = [m for v in node_list for m in T.poly.fiber_indices[v]]
    s = [eidx[T.poly.s(m)] for m in mids]
    p = [nidx[T.poly.p(m)] for m in mids]
    t = [eidx[T.out_edge(v)] for v in node_list]
    S = _tree_from_tables(len(edge_list), s, p, t)
    A, A2 = S.poly.I, T.poly.I
    emb = PolyMor(
        S.poly,
        T.poly,
        FiniteMap(A, A2, edge_list),
        FiniteMap(A, A2, edge_list),
        FiniteMap(S.poly.E, T.poly.E, mids),
        FiniteMap(S.poly.B, T.poly.B, node_list),
    )
    return S, emb
