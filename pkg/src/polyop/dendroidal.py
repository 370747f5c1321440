"""The dendroidal category Ω, nerves of polynomial monads and Segal presheaves.

A morphism ``S -> T`` of Ω is stored by its edge map.  Each node ``v`` of
``S`` goes to the subtree of ``T`` whose root is the image of the outgoing
edge of ``v`` and whose leaves are the images of its incoming edges (which
must be distinct); a single-edge subtree means the node is collapsed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .errors import GuardExceeded, SegalError, ShapeError
from .finset import FiniteMap, FiniteSet, check_guard, default_guard
from .freemonad import (
    ETA,
    NODE,
    FreeMonadView,
    PolynomialMonad,
    map_ptree,
    monad_laws_check,
    term_leaves,
)
from .poly import MorFn, PolyMor, Polynomial, Report, compose_poly, hcomp_fn, hom_poly, identity_poly
from .tree import (
    Subtree,
    Tree,
    canonical_form,
    corolla,
    edge_inclusion,
    eta,
    from_nested,
    node_inclusion,
    subtree_tree,
    subtree_with_boundary,
)


@dataclass(frozen=True)
class OmegaMor:
    src: Tree
    dst: Tree
    edge_map: tuple

    def __post_init__(self):
        edge_map = tuple(self.edge_map)
        object.__setattr__(self, "edge_map", edge_map)
        if len(edge_map) != self.src.n_edges or any(not 0 <= e < self.dst.n_edges for e in edge_map):
            raise ShapeError("edge map does not fit the two trees")
        for v in range(self.src.n_nodes):
            if self._node_subtree(v) is None:
                raise ShapeError(f"node {v} has no subtree with the required root and leaves")

    def _node_subtree(self, v: int) -> Subtree | None:
        f = self.edge_map
        return subtree_with_boundary(
            self.dst, f[self.src.out_edge(v)], tuple(f[e] for e in self.src.in_edges(v))
        )

    @cached_property
    def node_map(self) -> tuple:
        """Per node of ``src``, its subtree of ``dst`` (leaves ordered as the node's inputs)."""
        return tuple(self._node_subtree(v) for v in range(self.src.n_nodes))

    def node_embedding(self, v: int) -> tuple[Tree, PolyMor]:
        return subtree_tree(self.node_map[v])

    def __call__(self, e: int) -> int:
        return self.edge_map[e]


def omega_identity(T: Tree) -> OmegaMor:
    return OmegaMor(T, T, tuple(range(T.n_edges)))


def _subtree_leafsets(T: Tree) -> dict[int, list[tuple]]:
    """For each edge ``r``, the leaf sets of all subtrees rooted at ``r``."""
    memo: dict[int, list[tuple]] = {}

    def at(r):
        if r in memo:
            return memo[r]
        out = [(r,)]
        v = T.node_above(r)
        if v is not None:
            for combo in itertools.product(*(at(e) for e in T.in_edges(v))):
                out.append(tuple(x for part in combo for x in part))
        memo[r] = out
        return out

    for r in range(T.n_edges):
        at(r)
    return memo


def omega_hom(S: Tree, T: Tree, guard: int | None = None) -> list[OmegaMor]:
    """All Ω-morphisms ``S -> T``: choose the root image, then node subtrees top-down."""
    limit = default_guard() if guard is None else guard
    leafsets = _subtree_leafsets(T)
    order = []  # nodes of S in preorder
    stack = [S.root]
    while stack:
        e = stack.pop(0)
        v = S.node_above(e)
        if v is not None:
            order.append(v)
            stack.extend(S.in_edges(v))
    out: list[OmegaMor] = []
    f = [None] * S.n_edges

    def search(k):
        if k == len(order):
            if len(out) >= limit:
                raise GuardExceeded("omega_hom", len(out) + 1, limit)
            out.append(OmegaMor(S, T, tuple(f)))
            return
        v = order[k]
        ins = S.in_edges(v)
        for leaves in leafsets[f[S.out_edge(v)]]:
            if len(leaves) != len(ins):
                continue
            for perm in itertools.permutations(leaves):
                for e, x in zip(ins, perm):
                    f[e] = x
                search(k + 1)
        for e in ins:
            f[e] = None

    for r in range(T.n_edges):
        f[S.root] = r
        search(0)
    return out


def omega_compose(g: OmegaMor, f: OmegaMor) -> OmegaMor:
    """``g ∘ f`` by substitution: each node subtree of ``f`` is refined by the subtrees of ``g``."""
    if f.dst != g.src:
        raise ShapeError("cannot compose: target of f is not the source of g")
    edge_map = tuple(g.edge_map[x] for x in f.edge_map)
    composite = OmegaMor(f.src, g.dst, edge_map)
    for v, sub in enumerate(f.node_map):
        edges = {g.edge_map[x] for x in sub.edges}
        nodes = set()
        for w in sub.nodes:
            gw = g.node_map[w]
            edges |= gw.edges
            nodes |= gw.nodes
        expect = composite.node_map[v]
        if edges != set(expect.edges) or nodes != set(expect.nodes):
            raise ShapeError(f"substitution at node {v} does not glue to the expected subtree")
    return composite


@dataclass(frozen=True)
class Classification:
    inert: bool
    active: bool

    @property
    def label(self) -> str:
        if self.inert and self.active:
            return "both"
        if self.inert:
            return "inert"
        if self.active:
            return "active"
        return "neither"


def classify(f: OmegaMor) -> Classification:
    """Inert: injective with every node sent to a one-node subtree.  Active: root to root, leaves onto leaves."""
    inert = len(set(f.edge_map)) == len(f.edge_map) and all(len(s.nodes) == 1 for s in f.node_map)
    leaves = [f.edge_map[e] for e in f.src.leaf_list()]
    active = (
        f.edge_map[f.src.root] == f.dst.root
        and len(set(leaves)) == len(leaves)
        and sorted(leaves) == list(f.dst.leaf_list())
    )
    return Classification(inert, active)


def active_inert_factorize(f: OmegaMor) -> tuple[OmegaMor, OmegaMor]:
    """Factor through the image subtree: ``f = inert ∘ active``."""
    S, T = f.src, f.dst
    image = subtree_with_boundary(T, f.edge_map[S.root], tuple(f.edge_map[e] for e in S.leaf_list()))
    if image is None:
        raise ShapeError("image of the morphism is not a subtree")
    mid, emb = subtree_tree(image)
    back = {x: k for k, x in enumerate(emb.on_I.table)}
    active = OmegaMor(S, mid, tuple(back[x] for x in f.edge_map))
    inert = OmegaMor(mid, T, emb.on_I.table)
    return active, inert


def omega_isos(S: Tree, T: Tree) -> list[OmegaMor]:
    if canonical_form(S) != canonical_form(T):
        return []
    return [m for m in omega_hom(S, T) if len(set(m.edge_map)) == T.n_edges and classify(m).inert]


# --------------------------------------------------------------------------
# Adjunction encoding: maps S.poly -> free monad on T.poly


def _subtree_term(T: Tree, sub: Subtree):
    leafset = set(sub.leaves)

    def at(r):
        if r in leafset:
            return (ETA, r)
        v = T.node_above(r)
        return (NODE, v, tuple(at(T.poly.s(m)) for m in T.poly.fiber_indices[v]))

    return at(sub.root)


def to_adjunction(f: OmegaMor, view: FreeMonadView | None = None) -> PolyMor:
    """``f`` as a cartesian map ``S -> F_h(T)`` (``h`` the height of ``T``)."""
    S, T = f.src, f.dst
    view = view or FreeMonadView(T.poly)
    F = view.poly(T.height)
    ops, inputs = [], []
    for v, sub in enumerate(f.node_map):
        term = _subtree_term(T, sub)
        ops.append(term)
        path_of = {x: path for path, x in _leaf_paths(T, term)}
        for m in S.poly.fiber_indices[v]:
            inputs.append((m, (term, path_of[f.edge_map[S.poly.s(m)]])))
    inputs.sort()
    return PolyMor(
        S.poly,
        F,
        FiniteMap(S.poly.I, F.I, f.edge_map),
        FiniteMap(S.poly.I, F.I, f.edge_map),
        FiniteMap(S.poly.E, F.E, tuple(F.E.index(lab) for _, lab in inputs)),
        FiniteMap(S.poly.B, F.B, tuple(F.B.index(t) for t in ops)),
    )


def _leaf_paths(T: Tree, term):
    return [(path, colour) for path, colour in term_leaves(T.poly, term)]


def from_adjunction(S: Tree, T: Tree, m: PolyMor) -> OmegaMor:
    """Inverse of :func:`to_adjunction`; checks that the node data agree with the edge map."""
    f = OmegaMor(S, T, m.on_I.table)
    back = to_adjunction(f)
    if back.beta.table != m.beta.table or back.eps.table != m.eps.table:
        raise ShapeError("node decorations disagree with the edge map")
    return f


# --------------------------------------------------------------------------
# Nerves


_PARTS_CACHE: dict = {}


def _monad_parts(M):
    """``(P, unit_fn, mult_fn, inside)`` for a monad or a truncated free monad ``(view, h)``."""
    key = id(M) if isinstance(M, PolynomialMonad) else (id(M[0]), M[1])
    hit = _PARTS_CACHE.get(key)
    if hit is not None and hit[0] is (M if isinstance(M, PolynomialMonad) else M[0]):
        return hit[1]
    if isinstance(M, PolynomialMonad):
        parts = (M.P, M.unit.fn(), M.mult.fn(), None)
        owner = M
    else:
        view, h = M
        parts = (view.poly(h), view.unit(h).fn(), view.mult_fn(h, h), h)
        owner = view
    _PARTS_CACHE[key] = (owner, parts)
    return parts


_NERVE_CACHE: dict = {}


def nerve(M, T: Tree, guard: int | None = None) -> list[PolyMor]:
    """``N(M)(T)``: decorations of ``T`` by operations of ``M``."""
    P, _, _, _ = _monad_parts(M)
    key = (id(P), id(T))
    hit = _NERVE_CACHE.get(key)
    if hit is not None and hit[0] is P and hit[1] is T:
        return hit[2]
    out = hom_poly(T.poly, P, guard=guard)
    _NERVE_CACHE[key] = (P, T, out)
    return out


def _deco_key(m: PolyMor) -> tuple:
    return (m.on_I.table, m.beta.table, m.eps.table)


def _fold(M, term):
    P, u, mu, h = _monad_parts(M)

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

    op, paths = go(term)
    if op not in P.B:
        raise ShapeError("folded operation lies outside the truncation")
    return op, paths


def restrict_decoration(M, f: OmegaMor, x: PolyMor, shortcut: bool = True) -> PolyMor:
    """Pull a decoration of ``f.dst`` back to ``f.src`` by folding node subtrees through ``M``."""
    P, _, _, _ = _monad_parts(M)
    S, T = f.src, f.dst
    if shortcut and all(len(sub.nodes) == 1 for sub in f.node_map):
        return _restrict_inert(P, f, x)
    xf = x.fn()
    col = [x.on_I(f.edge_map[e]) for e in range(S.n_edges)]
    ops = []
    eps = [0] * S.poly.E.size
    for v, sub in enumerate(f.node_map):
        term = _subtree_term(T, sub)
        # relabel: T-tree -> P-tree along the decoration x
        deco_term = map_ptree(xf, T.poly, term)
        op, paths = _fold(M, deco_term)
        ops.append(P.B.index(op))
        # leaves of the subtree, listed in the depth-first order of the relabelled tree
        edges_dfs = _dfs_leaf_edges(T, term, xf, P)
        deco_paths = [path for path, _ in term_leaves(P, deco_term)]
        input_of_edge = {edge: P.E.index(paths[path]) for edge, path in zip(edges_dfs, deco_paths)}
        for m in S.poly.fiber_indices[v]:
            eps[m] = input_of_edge[f.edge_map[S.poly.s(m)]]
    A = S.poly.I
    cols = FiniteMap(A, P.I, col)
    return PolyMor(S.poly, P, cols, cols, FiniteMap(S.poly.E, P.E, eps), FiniteMap(S.poly.B, P.B, ops))


def _restrict_inert(P, f: OmegaMor, x: PolyMor) -> PolyMor:
    """Restriction along a map sending nodes to single nodes: the unit laws make the fold trivial."""
    S, T = f.src, f.dst
    col = [x.on_I.table[f.edge_map[e]] for e in range(S.n_edges)]
    ops = []
    eps = [0] * S.poly.E.size
    for v, sub in enumerate(f.node_map):
        (w,) = sub.nodes
        ops.append(x.beta.table[w])
        slot = {T.poly.s.table[m]: m for m in T.poly.fiber_indices[w]}
        for m in S.poly.fiber_indices[v]:
            eps[m] = x.eps.table[slot[f.edge_map[S.poly.s.table[m]]]]
    col = tuple(col)
    return PolyMor.unchecked(S.poly, P, col, col, tuple(eps), tuple(ops))


def _dfs_leaf_edges(T: Tree, term, xf, P) -> list[int]:
    """Leaf edges of a ``T``-tree in the depth-first order of its image under ``xf``."""
    if term[0] == ETA:
        return [term[1]]
    v = term[1]
    b2 = xf.on_B(T.poly.B.label(v))
    ms = T.poly.fiber_indices[v]
    slot = {xf.on_E(T.poly.E.label(m)): k for k, m in enumerate(ms)}
    out = []
    for e2 in P.inputs(b2):
        out.extend(_dfs_leaf_edges(T, term[2][slot[e2]], xf, P))
    return out


def nerve_restrict(M, f: OmegaMor, guard: int | None = None) -> FiniteMap:
    """``N(M)(f): N(M)(T) -> N(M)(S)``."""
    top = nerve(M, f.dst, guard)
    bottom = nerve(M, f.src, guard)
    index = {_deco_key(m): k for k, m in enumerate(bottom)}
    if all(len(sub.nodes) == 1 for sub in f.node_map):
        keyer = _inert_keyer(f)
        table = [index[keyer(x)] for x in top]
    else:
        table = [index[_deco_key(restrict_decoration(M, f, x))] for x in top]
    return FiniteMap(FiniteSet(len(top)), FiniteSet(len(bottom)), table)


def _inert_keyer(f: OmegaMor):
    """Decoration key of the restriction along an inert ``f``, straight from the tables."""
    S, T = f.src, f.dst
    edges = f.edge_map
    nodes = [next(iter(sub.nodes)) for sub in f.node_map]
    inputs = []
    for v, w in enumerate(nodes):
        slot = {T.poly.s.table[m]: m for m in T.poly.fiber_indices[w]}
        for m in S.poly.fiber_indices[v]:
            inputs.append((m, slot[edges[S.poly.s.table[m]]]))
    inputs.sort()
    input_map = [m2 for _, m2 in inputs]

    def key(x: PolyMor) -> tuple:
        col, beta, eps = x.on_I.table, x.beta.table, x.eps.table
        return (
            tuple(col[e] for e in edges),
            tuple(beta[w] for w in nodes),
            tuple(eps[m] for m in input_map),
        )

    return key


# --------------------------------------------------------------------------
# Presheaves on trees


@dataclass
class Presheaf:
    """Finite-set valued presheaf on a finite list of trees.

    Restrictions are looked up in ``restrictions`` (keyed by source index,
    target index and edge map) and otherwise computed by ``restrict_fn``.
    """

    trees: list
    values: list
    restrictions: dict = field(default_factory=dict)
    restrict_fn: Callable | None = None

    def __post_init__(self):
        if len(self.trees) != len(self.values):
            raise ShapeError("need one value per tree")
        self._index = {}
        for k, T in enumerate(self.trees):
            self._index.setdefault(T.poly, k)

    def index(self, T: Tree) -> int:
        k = self._index.get(T.poly)
        if k is None:
            raise SegalError(f"tree {canonical_form(T)} is not in the presheaf domain")
        return k

    def value(self, T: Tree) -> FiniteSet:
        return self.values[self.index(T)]

    def restrict(self, f: OmegaMor) -> FiniteMap:
        key = (self.index(f.src), self.index(f.dst), f.edge_map)
        got = self.restrictions.get(key)
        if got is None:
            if self.restrict_fn is None:
                raise SegalError(f"missing restriction data for {key}")
            got = self.restrict_fn(f)
            self.restrictions[key] = got
        return got


def nerve_presheaf(M, trees: Sequence[Tree], guard: int | None = None) -> Presheaf:
    """The nerve of ``M`` on ``trees`` with restrictions computed on demand."""
    trees = list(trees)
    values = [FiniteSet(len(nerve(M, T, guard))) for T in trees]
    return Presheaf(trees, values, {}, lambda f: nerve_restrict(M, f, guard))


def element_inclusions(T: Tree) -> tuple[list[OmegaMor], list[OmegaMor]]:
    """Edge inclusions ``η -> T`` and node inclusions ``C_n -> T`` as Ω-morphisms."""
    edges = [OmegaMor(eta(), T, edge_inclusion(T, e).on_I.table) for e in range(T.n_edges)]
    nodes = [OmegaMor(corolla(T.arity(v)), T, node_inclusion(T, v).on_I.table) for v in range(T.n_nodes)]
    return edges, nodes


def segal_limit(phi: Presheaf, T: Tree) -> list[tuple]:
    """Compatible families ``(x_v)_v`` over the nodes of ``T`` (with the edge values implied).

    Built as an iterated fiber product over ``Φ(η)``, one grafting at a time
    in preorder from the root.
    """
    H = eta()
    if T.n_nodes == 0:
        return [(("edge", y),) for y in range(phi.value(H).size)]
    # restriction of a corolla value to each of its edges
    edge_restr: dict[int, list[FiniteMap]] = {}
    for v in range(T.n_nodes):
        n = T.arity(v)
        if n not in edge_restr:
            C = corolla(n)
            edge_restr[n] = [phi.restrict(OmegaMor(H, C, (a,))) for a in range(C.n_edges)]
    order = []
    stack = [T.root]
    while stack:
        e = stack.pop(0)
        v = T.node_above(e)
        if v is not None:
            order.append(v)
            stack.extend(T.in_edges(v))
    results = []
    chosen: dict[int, int] = {}
    edge_val: dict[int, int] = {}

    def search(k):
        if k == len(order):
            results.append(tuple(chosen[v] for v in range(T.n_nodes)))
            return
        v = order[k]
        n = T.arity(v)
        maps = edge_restr[n]
        C_val = phi.value(corolla(n))
        edges = (T.out_edge(v),) + T.in_edges(v)
        for x in range(C_val.size):
            ok = True
            assigned = []
            for a, e in enumerate(edges):
                y = maps[a](x)
                if e in edge_val:
                    if edge_val[e] != y:
                        ok = False
                        break
                else:
                    edge_val[e] = y
                    assigned.append(e)
            if ok:
                chosen[v] = x
                search(k + 1)
            for e in assigned:
                del edge_val[e]

    search(0)
    return results


def segal_check(phi: Presheaf, T: Tree) -> Report:
    """Is ``Φ(T) -> lim_{el(T)} Φ`` a bijection?  Failures carry a witness."""
    rep = Report(True)
    edges, nodes = element_inclusions(T)
    if T.n_nodes <= 1:
        rep.data["elementary"] = True
        return rep
    value = phi.value(T)
    node_maps = [phi.restrict(f) for f in nodes]
    limit = segal_limit(phi, T)
    image: dict[tuple, int] = {}
    for x in range(value.size):
        key = tuple(m(x) for m in node_maps)
        if key in image:
            rep.fail(f"not injective: elements {image[key]} and {x} have the same restrictions {key}")
            rep.data["witness"] = {"kind": "collision", "elements": [image[key], x], "restrictions": list(key)}
            return rep
        image[key] = x
    for fam in limit:
        if fam not in image:
            rep.fail(f"not surjective: compatible family {fam} has no preimage")
            rep.data["witness"] = {"kind": "missing", "family": list(fam)}
            return rep
    if len(image) != len(limit):
        rep.fail("restrictions land outside the compatible families")
        return rep
    rep.data.update({"size": value.size, "limit": len(limit)})
    return rep


# --------------------------------------------------------------------------
# From Segal presheaves back to monads


def two_level(n: int, ms: Sequence[int]) -> tuple[Tree, list[int]]:
    """Corolla ``C_n`` with ``C_{m_k}`` grafted on leaf ``k``, and its leaves in block order."""
    T = from_nested(tuple(tuple(None for _ in range(m)) for m in ms))
    if T.n_nodes == 0 or T.arity(0) != n:
        raise ShapeError("block sizes must match the root arity")
    leaves = []
    for e in T.in_edges(0):
        leaves.extend(T.in_edges(T.node_above(e)))
    return T, leaves


def segal_domain(max_arity: int) -> list[Tree]:
    """Trees needed to rebuild a monad with operations of arity at most ``max_arity``."""
    trees = [eta()] + [corolla(n) for n in range(max_arity + 1)]
    seen = {T.poly for T in trees}
    for n in range(max_arity + 1):
        for ms in itertools.product(range(max_arity + 1), repeat=n):
            if sum(ms) > max_arity:
                continue
            T, _ = two_level(n, ms)
            if T.poly not in seen:
                seen.add(T.poly)
                trees.append(T)
    return trees


@dataclass(frozen=True)
class PartialMult:
    """Composition data recovered from a Segal presheaf: defined on a subset of composable pairs."""

    P: Polynomial
    unit: dict
    ops: dict
    inputs: dict


def _segal_structure(phi: Presheaf, max_arity: int, strict: bool) -> PartialMult:
    H = eta()
    colours = phi.value(H)
    ops = []
    for n in range(max_arity + 1):
        for x in range(phi.value(corolla(n)).size):
            ops.append((n, x))
    e_labels, s, p, t = [], [], [], []
    for k, (n, x) in enumerate(ops):
        C = corolla(n)
        t.append(phi.restrict(OmegaMor(H, C, (0,)))(x))
        for j in range(1, n + 1):
            e_labels.append(((n, x), j))
            s.append(phi.restrict(OmegaMor(H, C, (j,)))(x))
            p.append(k)
    P = Polynomial.from_tables(colours, FiniteSet.of(e_labels), FiniteSet.of(ops), colours, s, p, t)
    # unit: restriction along the active collapse C_1 -> η
    collapse = phi.restrict(OmegaMor(corolla(1), H, (0, 0)))
    unit = {c: (1, collapse(c)) for c in range(colours.size)}
    mult_ops, mult_inputs = {}, {}
    PP = compose_poly(P, P)
    for c, psi in PP.B.all_labels():
        n = c[0]
        ms = [y[0] for y in psi]
        total = sum(ms)
        if total > max_arity:
            if strict:
                raise SegalError(f"composite of arity {total} exceeds the supplied domain")
            continue
        G, leaves = two_level(n, ms)
        try:
            value = phi.value(G)
        except SegalError:
            if strict:
                raise
            continue
        _, node_incl = element_inclusions(G)
        wanted = (c[1],) + tuple(y[1] for y in psi)
        restr = [phi.restrict(f) for f in node_incl]
        hits = [w for w in range(value.size) if tuple(m(w) for m in restr) == wanted]
        if len(hits) != 1:
            raise SegalError(f"Segal inversion failed for {(c, psi)}: {len(hits)} preimages")
        active = OmegaMor(corolla(total), G, (G.root,) + tuple(leaves))
        r = phi.restrict(active)(hits[0])
        mult_ops[(c, psi)] = (total, r)
        offset = 0
        for k, y in enumerate(psi):
            for j in range(1, y[0] + 1):
                mult_inputs[(c, psi, (c, k + 1), (y, j))] = ((total, r), offset + j)
            offset += y[0]
    return PartialMult(P, unit, mult_ops, mult_inputs)


def segal_to_monad(phi: Presheaf, max_arity: int) -> PolynomialMonad:
    """Rebuild a polynomial monad from a Segal presheaf supplied on :func:`segal_domain`."""
    data = _segal_structure(phi, max_arity, strict=True)
    P = data.P
    I = identity_poly(P.I)
    PP = compose_poly(P, P)
    unit = MorFn(I, P, _ident, _ident, data.unit.__getitem__, lambda c: (data.unit[c], 1)).realize(I, P)
    mult = MorFn(PP, P, _ident, _ident, data.ops.__getitem__, data.inputs.__getitem__).realize(PP, P)
    M = PolynomialMonad(P, unit, mult)
    return PolynomialMonad(P, unit, mult, monad_laws_check(M).ok)


def segal_partial_mult(phi: Presheaf, max_arity: int) -> PartialMult:
    """Like :func:`segal_to_monad` but skipping composites outside the supplied domain."""
    return _segal_structure(phi, max_arity, strict=False)


def _ident(x):
    return x


# --------------------------------------------------------------------------
# Maps of monads and of presheaves


def monad_maps(M1: PolynomialMonad, M2: PolynomialMonad, guard: int | None = None) -> list[PolyMor]:
    """Cartesian maps ``M1.P -> M2.P`` commuting with units and multiplications."""
    out = []
    u1, u2 = M1.unit.fn(), M2.unit.fn()
    mu1, mu2 = M1.mult.fn(), M2.mult.fn()
    PP = compose_poly(M1.P, M1.P)
    for m in hom_poly(M1.P, M2.P, guard=guard):
        f = m.fn()
        ok = all(f.on_B(u1.on_B(i)) == u2.on_B(f.on_I(i)) for i in M1.P.I.all_labels())
        ok = ok and all(f.on_E(u1.on_E(i)) == u2.on_E(f.on_I(i)) for i in M1.P.I.all_labels())
        if ok:
            ff = hcomp_fn(f, f)
            for x in PP.B.all_labels():
                if f.on_B(mu1.on_B(x)) != mu2.on_B(ff.on_B(x)):
                    ok = False
                    break
                for e in PP.inputs(x):
                    if f.on_E(mu1.on_E(e)) != mu2.on_E(ff.on_E(e)):
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            out.append(m)
    return out


def presheaf_maps(phi: Presheaf, psi: Presheaf, morphisms: Sequence[OmegaMor], guard: int | None = None) -> list[tuple]:
    """Natural transformations ``phi -> psi`` on the common tree list, by brute force."""
    n = len(phi.trees)
    choices = []
    total = 1
    for k in range(n):
        a, b = phi.values[k].size, psi.values[k].size
        total *= b**a
        choices.append(list(itertools.product(range(b), repeat=a)))
    check_guard("presheaf_maps", total, guard)
    out = []
    for comps in itertools.product(*choices):
        good = True
        for f in morphisms:
            i, j = phi.index(f.src), phi.index(f.dst)
            r1, r2 = phi.restrict(f), psi.restrict(f)
            for x in range(phi.values[j].size):
                if comps[i][r1(x)] != r2(comps[j][x]):
                    good = False
                    break
            if not good:
                break
        if good:
            out.append(comps)
    return out
