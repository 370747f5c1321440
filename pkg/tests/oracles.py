"""Independent reference computations used to freeze expected values.

Nothing here imports the construction code under test beyond plain data
access on a :class:`~polyop.poly.Polynomial` (its tables).
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from math import comb, factorial


def tree_profile(P, h: int) -> list[Counter]:
    """Per colour index, a Counter ``leaves -> number of P-trees of height <= h``.

    Recurrence: a tree of height <= h+1 is a bare edge or an operation with
    trees of height <= h on its inputs.
    """
    n = P.I.size
    level = [Counter({1: 1}) for _ in range(n)]
    for _ in range(h):
        nxt = [Counter({1: 1}) for _ in range(n)]
        for b in range(P.B.size):
            acc = Counter({0: 1})
            for e in P.fiber_indices[b]:
                step = Counter()
                for a, x in acc.items():
                    for k, y in level[P.s(e)].items():
                        step[a + k] += x * y
                acc = step
            nxt[P.t(b)].update(acc)
        level = nxt
    return level


def tree_count(P, h: int) -> int:
    return sum(sum(c.values()) for c in tree_profile(P, h))


def leafless_counts(P, rounds: int) -> list[int]:
    """Per colour, trees with no leaves, iterating ``W_{k+1}(c) = Σ_{t(b)=c} Π W_k(s(e))``."""
    w = [0] * P.I.size
    for _ in range(rounds):
        nxt = [0] * P.I.size
        for b in range(P.B.size):
            prod = 1
            for e in P.fiber_indices[b]:
                prod *= w[P.s(e)]
            nxt[P.t(b)] += prod
        w = nxt
    return w


def eval_size(P, sizes) -> list[int]:
    """``|P(X)_j|`` from the sizes of ``X``: sum over operations of products of fiber sizes."""
    out = [0] * P.J.size
    for b in range(P.B.size):
        prod = 1
        for e in P.fiber_indices[b]:
            prod *= sizes[P.s(e)]
        out[P.t(b)] += prod
    return out


def bell_compose(g, f, n: int) -> int:
    """``Σ_k g_k · B_{n,k}(f_1, f_2, ...)`` via the recursive partial Bell polynomials."""

    def bell(nn, k):
        if nn == 0 and k == 0:
            return 1
        if nn == 0 or k == 0:
            return 0
        return sum(comb(nn - 1, j - 1) * f[j] * bell(nn - j, k - 1) for j in range(1, nn - k + 2))

    return sum(g[k] * bell(n, k) for k in range(n + 1))


def series_compose(g, f, order: int) -> list[Fraction]:
    """Coefficients of ``g(f(x))`` by brute expansion, with ``f(0) = 0``."""
    out = [Fraction(0)] * (order + 1)
    power = [Fraction(1)] + [Fraction(0)] * order
    for k in range(order + 1):
        for i in range(order + 1):
            out[i] += g[k] * power[i]
        nxt = [Fraction(0)] * (order + 1)
        for i in range(order + 1):
            for j in range(order + 1 - i):
                nxt[i + j] += power[i] * f[j]
        power = nxt
    return out


def orbits_trivial(n_elems: int, arity: int, x: int) -> int:
    """Orbits of ``B × [x]^n`` when ``Σ_n`` fixes ``B``: multisets of size ``n`` from ``x``, times ``|B|``."""
    return n_elems * comb(x + arity - 1, arity) if x else (n_elems if arity == 0 else 0)


def hom_corolla_count(P, n: int) -> int:
    return factorial(n) * sum(1 for a in P.arities if a == n)


def tree_classes_by_nodes(max_nodes: int, max_arity: int) -> list[int]:
    """Isomorphism classes of non-planar trees with exactly ``n`` nodes and arities <= ``max_arity``.

    A tree is a leaf or a node over a multiset of subtrees; multisets are
    counted with ``C(f + c - 1, c)`` per size class.
    """
    f = [1] + [0] * max_nodes

    def multisets(budget, j, slots):
        # ways to fill at most ``slots`` children with subtrees of sizes >= j summing to ``budget``,
        # returning a dict ``children -> count``
        if j > budget:
            return {0: 1} if budget == 0 else {}
        out: dict = {}
        for c in range(0, slots + 1):
            if c * j > budget:
                break
            ways = comb(f[j] + c - 1, c) if c else 1
            for k, w in multisets(budget - c * j, j + 1, slots - c).items():
                out[k + c] = out.get(k + c, 0) + ways * w
        return out

    for n in range(1, max_nodes + 1):
        total = 0
        # children of size 0 are leaves (a single class); larger ones come from f
        for leaves in range(max_arity + 1):
            total += sum(multisets(n - 1, 1, max_arity - leaves).values())
        f[n] = total
    return f
