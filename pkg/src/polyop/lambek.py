"""Lambek algebras and coalgebras, the Adámek chain, twisting morphisms."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import finset
from .errors import ShapeError
from .finset import FiniteMap, FiniteSet
from .poly import (
    Family,
    FamilyMap,
    Polynomial,
    Report,
    Sum,
    compose_family_maps,
    evaluate,
    evaluate_map,
    family_maps,
    materialize,
)


@dataclass(frozen=True)
class LambekAlgebra:
    P: Polynomial
    carrier: Family
    structure: FamilyMap  # P(carrier) -> carrier

    def __post_init__(self):
        if self.structure.dst.total.size != self.carrier.total.size:
            raise ShapeError("algebra structure must land in the carrier")
        if self.structure.src.total.size != _eval_size(self.P, self.carrier):
            raise ShapeError("algebra structure must start at P(carrier)")


@dataclass(frozen=True)
class LambekCoalgebra:
    P: Polynomial
    carrier: Family
    structure: FamilyMap  # carrier -> P(carrier)

    def __post_init__(self):
        if self.structure.src.total.size != self.carrier.total.size:
            raise ShapeError("coalgebra structure must start at the carrier")
        if self.structure.dst.total.size != _eval_size(self.P, self.carrier):
            raise ShapeError("coalgebra structure must land in P(carrier)")


def _eval_size(P, X: Family) -> int:
    sizes = X.sizes()
    total = 0
    for b in P.ops():
        term = 1
        for e in P.inputs(b):
            term *= sizes[P.I.index(P.input_colour(e))]
        total += term
    return total


def empty_family(I: FiniteSet) -> Family:
    return Family.from_sizes(I, [0] * I.size)


@dataclass(frozen=True)
class WType:
    algebra: LambekAlgebra
    iterations: int
    sizes: tuple

    @property
    def family(self) -> Family:
        return self.algebra.carrier


@dataclass(frozen=True)
class Unbounded:
    iterations: int
    sizes: tuple
    reason: str = "no stabilization within the iteration bound"


def adamek_wtype(P, max_iter: int = 10, guard: int | None = None) -> WType | Unbounded:
    """Iterate ``∅ -> P∅ -> P²∅ -> ...`` until the chain map is a bijection.

    The result carries the initial algebra with structure map the inverse of
    the stabilized comparison.  ``iterations`` counts applications of ``P``.
    """
    P = materialize(P)
    X = empty_family(P.I)
    chain = FamilyMap(X, X, finset.identity(X.total))
    sizes = [0]
    for k in range(max_iter):
        needed = _eval_size(P, X)
        limit = finset.default_guard() if guard is None else guard
        if needed > limit:
            return Unbounded(k, tuple(sizes), f"next stage needs {needed} elements, guard is {limit}")
        Y = evaluate(P, X)
        if k == 0:
            step = FamilyMap(X, Y, FiniteMap(X.total, Y.total, ()))
        else:
            step = evaluate_map(P, chain, X, Y)
        sizes.append(Y.total.size)
        if step.map.is_bijective:
            structure = FamilyMap(Y, X, step.map.inverse())
            return WType(LambekAlgebra(P, X, structure), k + 1, tuple(sizes))
        chain, X = step, Y
    return Unbounded(max_iter, tuple(sizes))


def constant_poly(X: Family) -> Polynomial:
    """The polynomial with only nullary operations, one per element of ``X``."""
    E = finset.EMPTY
    return Polynomial(X.base, E, X.total, X.base, FiniteMap(E, X.base, ()), FiniteMap(E, X.total, ()), X.proj)


def free_algebra(P, X: Family, max_iter: int = 10, guard: int | None = None) -> WType | Unbounded:
    """Initial algebra of ``Y ↦ X ⊔ P(Y)``: the free ``P``-algebra on ``X`` when it is finite."""
    P = materialize(P)
    if X.base.size != P.I.size:
        raise ShapeError("family and polynomial live over different colours")
    const = constant_poly(Family(P.I, X.total, FiniteMap(X.total, P.I, X.proj.table)))
    return adamek_wtype(materialize(Sum(const, P)), max_iter, guard)


# --------------------------------------------------------------------------
# Twisting morphisms


def random_family_map(X: Family, Y: Family, rng: random.Random) -> FamilyMap | None:
    """A uniformly random colour-preserving map, or ``None`` when some fiber of ``Y`` is empty."""
    table = []
    for x in range(X.total.size):
        fiber = Y.fiber_indices[X.proj(x)]
        if not fiber:
            return None
        table.append(rng.choice(fiber))
    return FamilyMap(X, Y, FiniteMap(X.total, Y.total, tuple(table)))


def random_instance(P, rng: random.Random, max_size: int = 3, tries: int = 100):
    """A random coalgebra and algebra of ``P`` with carriers of at most ``max_size`` elements."""
    P = materialize(P)
    if not P.is_endo:
        raise ShapeError("twisting needs an endofunctor")
    for _ in range(tries):
        sizes_c = _random_sizes(P.I.size, rng, max_size)
        sizes_a = _random_sizes(P.I.size, rng, max_size)
        C = Family.from_sizes(P.I, sizes_c)
        A = Family.from_sizes(P.I, sizes_a)
        c = random_family_map(C, evaluate(P, C), rng)
        a = random_family_map(evaluate(P, A), A, rng)
        if c is not None and a is not None:
            return LambekCoalgebra(P, C, c), LambekAlgebra(P, A, a)
    raise ShapeError("could not find a random coalgebra/algebra pair")


def _random_sizes(n: int, rng: random.Random, max_size: int) -> list[int]:
    total = rng.randint(1, max_size)
    sizes = [0] * n
    for _ in range(total):
        sizes[rng.randrange(n)] += 1
    return sizes


def twist_set(P, C: LambekCoalgebra, A: LambekAlgebra, guard: int | None = None) -> list[FamilyMap]:
    """All ``f: C -> A`` over the colours with ``f = a ∘ P(f) ∘ c`` (brute force)."""
    candidates = family_maps(C.carrier, A.carrier, guard)
    PC = C.structure.dst
    PA = A.structure.src
    out = []
    for f in candidates:
        Pf = evaluate_map(P, f, PC, PA)
        rhs = compose_family_maps(A.structure, compose_family_maps(Pf, C.structure))
        if rhs.map.table == f.map.table:
            out.append(f)
    return out


def cofree_step(P, C: LambekCoalgebra) -> LambekCoalgebra:
    """The coalgebra ``P(c): P(C) -> P(P(C))``."""
    PC = C.structure.dst
    PPC = evaluate(P, PC)
    return LambekCoalgebra(P, PC, evaluate_map(P, C.structure, PC, PPC))


def check_pca(P, C: LambekCoalgebra, A: LambekAlgebra, guard: int | None = None) -> Report:
    """``g ↦ g∘c`` and ``f ↦ a∘P(f)`` are mutually inverse between ``Tw(PC, A)`` and ``Tw(C, A)``."""
    PCc = cofree_step(P, C)
    tw_pc = twist_set(P, PCc, A, guard)
    tw_c = twist_set(P, C, A, guard)
    rep = Report(True, data={"tw_pc": len(tw_pc), "tw_c": len(tw_c)})
    PC = C.structure.dst
    PA = A.structure.src
    keys_c = {f.map.table for f in tw_c}
    keys_pc = {g.map.table for g in tw_pc}

    def restrict(g):
        return compose_family_maps(g, C.structure)

    def extend(f):
        return compose_family_maps(A.structure, evaluate_map(P, f, PC, PA))

    for g in tw_pc:
        f = restrict(g)
        if f.map.table not in keys_c:
            rep.fail(f"g∘c is not twisting for g={g.map.table}")
        elif extend(f).map.table != g.map.table:
            rep.fail(f"a∘P(g∘c) differs from g={g.map.table}")
    for f in tw_c:
        g = extend(f)
        if g.map.table not in keys_pc:
            rep.fail(f"a∘P(f) is not twisting for f={f.map.table}")
        elif restrict(g).map.table != f.map.table:
            rep.fail(f"(a∘P(f))∘c differs from f={f.map.table}")
    if len(tw_pc) != len(tw_c):
        rep.fail("twist sets have different sizes")
    return rep
