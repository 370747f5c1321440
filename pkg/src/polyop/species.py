"""Symmetric sequences, exact power series and cardinality comparisons.

Everything here is exact: coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

from .errors import ShapeError
from .finset import FiniteSet, check_guard, orbit_count
from .poly import Polynomial


def _compose_perm(a: tuple, b: tuple) -> tuple:
    """``a ∘ b`` as tables."""
    return tuple(a[x] for x in b)


@dataclass(frozen=True)
class SymSeq:
    """``B_0..B_N`` with ``Σ_n`` acting on ``B_n`` through adjacent transpositions.

    ``actions[n][i]`` is the permutation of ``B_n`` induced by swapping ``i``
    and ``i+1``; there are ``n-1`` of them for ``n >= 2``.
    """

    sets: tuple
    actions: tuple

    def __post_init__(self):
        sets = tuple(s if isinstance(s, FiniteSet) else FiniteSet(s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if len(self.actions) != len(sets):
            raise ShapeError("need one list of generators per arity")
        actions = tuple(tuple(tuple(g) for g in gens) for gens in self.actions)
        object.__setattr__(self, "actions", actions)
        for n, (B, gens) in enumerate(zip(sets, actions)):
            if len(gens) != max(n - 1, 0):
                raise ShapeError(f"arity {n} needs {max(n - 1, 0)} generators, got {len(gens)}")
            ident = tuple(range(B.size))
            for g in gens:
                if sorted(g) != list(ident):
                    raise ShapeError(f"generator at arity {n} is not a bijection of B_{n}")
                if _compose_perm(g, g) != ident:
                    raise ShapeError(f"generator at arity {n} is not an involution")
            for i in range(len(gens) - 1):
                a, b = gens[i], gens[i + 1]
                if _compose_perm(a, _compose_perm(b, a)) != _compose_perm(b, _compose_perm(a, b)):
                    raise ShapeError(f"braid relation fails at arity {n}, position {i}")
            for i in range(len(gens)):
                for j in range(i + 2, len(gens)):
                    if _compose_perm(gens[i], gens[j]) != _compose_perm(gens[j], gens[i]):
                        raise ShapeError(f"far transpositions do not commute at arity {n}")

    @property
    def max_arity(self) -> int:
        return len(self.sets) - 1

    def card(self, n: int) -> int:
        return self.sets[n].size if n < len(self.sets) else 0

    @classmethod
    def trivial(cls, sizes: Sequence[int]) -> "SymSeq":
        """Trivial action on sets of the given sizes."""
        return cls(
            tuple(FiniteSet(k) for k in sizes),
            tuple(tuple(tuple(range(k)) for _ in range(max(n - 1, 0))) for n, k in enumerate(sizes)),
        )

    @classmethod
    def regular(cls, multiplicities: Sequence[int]) -> "SymSeq":
        """Free action: ``B_n = m_n`` copies of ``Σ_n`` acted on by left multiplication."""
        sets = []
        actions = []
        for n, m in enumerate(multiplicities):
            perms = list(itertools.permutations(range(n)))
            elems = [(k, p) for k in range(m) for p in perms]
            index = {e: i for i, e in enumerate(elems)}
            gens = []
            for i in range(n - 1):
                swap = list(range(n))
                swap[i], swap[i + 1] = swap[i + 1], swap[i]
                swap = tuple(swap)
                gens.append(tuple(index[(k, _compose_perm(swap, p))] for k, p in elems))
            sets.append(FiniteSet(len(elems)))
            actions.append(tuple(gens))
        return cls(tuple(sets), tuple(actions))


@dataclass(frozen=True)
class PowerSeries:
    """Truncated series ``c_0 + c_1 x + ... + c_N x^N`` with exact coefficients."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise ShapeError("a series needs at least the constant coefficient")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    @classmethod
    def zero(cls, order: int) -> "PowerSeries":
        return cls((0,) * (order + 1))

    @classmethod
    def x(cls, order: int) -> "PowerSeries":
        return cls(tuple(1 if k == 1 else 0 for k in range(order + 1)))

    @classmethod
    def exp(cls, order: int) -> "PowerSeries":
        return cls(tuple(Fraction(1, factorial(k)) for k in range(order + 1)))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if k < len(self.coeffs) else Fraction(0)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(tuple(self[k] for k in range(order + 1)))

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries(tuple(self[k] + other[k] for k in range(n + 1)))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        n = min(self.order, other.order)
        return PowerSeries(tuple(self[k] - other[k] for k in range(n + 1)))

    def __mul__(self, other) -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return PowerSeries(tuple(c * Fraction(other) for c in self.coeffs))
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            if self[i]:
                for j in range(n + 1 - i):
                    out[i + j] += self[i] * other[j]
        return PowerSeries(tuple(out))

    __rmul__ = __mul__

    def __call__(self, x) -> Fraction:
        total = Fraction(0)
        for c in reversed(self.coeffs):
            total = total * x + c
        return total


def egf(S: SymSeq) -> PowerSeries:
    return PowerSeries(tuple(Fraction(B.size, factorial(n)) for n, B in enumerate(S.sets)))


def htpy_eval_card(S: SymSeq, x: int) -> Fraction:
    """Groupoid cardinality ``Σ |B_n| x^n / n!``."""
    return sum((Fraction(B.size * x**n, factorial(n)) for n, B in enumerate(S.sets)), Fraction(0))


def set_eval_card(S: SymSeq, x: int, guard: int | None = None) -> int:
    """Number of orbits of ``B_n × [x]^n`` under the diagonal ``Σ_n`` action, summed over ``n``."""
    if x < 0:
        raise ShapeError("x must be a natural number")
    check_guard("set_eval_card", sum(B.size * x**n for n, B in enumerate(S.sets)), guard)
    total = 0
    for n, (B, gens) in enumerate(zip(S.sets, S.actions)):
        words = list(itertools.product(range(x), repeat=n))
        elems = [(b, w) for b in range(B.size) for w in words]
        index = {e: k for k, e in enumerate(elems)}
        tables = []
        for i, g in enumerate(gens):
            table = []
            for b, w in elems:
                w2 = list(w)
                w2[i], w2[i + 1] = w2[i + 1], w2[i]
                table.append(index[(g[b], tuple(w2))])
            tables.append(table)
        total += orbit_count(FiniteSet(len(elems)), tables)
    return total


def set_partitions(n: int) -> Iterator[list[list[int]]]:
    """All set partitions of ``{0..n-1}`` into nonempty blocks."""
    if n == 0:
        yield []
        return
    for part in set_partitions(n - 1):
        for k in range(len(part)):
            yield part[:k] + [part[k] + [n - 1]] + part[k + 1 :]
        yield part + [[n - 1]]


def _cards(S) -> list[int]:
    if isinstance(S, SymSeq):
        return [B.size for B in S.sets]
    return [int(c) for c in S]


def compose_card(G, F, n: int) -> int:
    """``|(G ∘ F)_n|``: sum over set partitions of ``n`` into nonempty blocks.

    ``F_0`` never contributes, so only the nonempty-block part of the
    substitution is counted.
    """
    g, f = _cards(G), _cards(F)
    if n > min(len(g), len(f)) - 1:
        raise ShapeError(f"arity {n} exceeds the truncation of the inputs")
    total = 0
    for part in set_partitions(n):
        term = g[len(part)]
        for block in part:
            term *= f[len(block)]
        total += term
    return total


def series_substitute(g: PowerSeries, f: PowerSeries) -> PowerSeries:
    """``g(f(x))`` truncated at the smaller order; needs ``f(0) = 0``."""
    if f[0] != 0:
        raise ShapeError("inner series must have zero constant term")
    n = min(g.order, f.order)
    return _horner(g, f.truncate(n), n)


def polynomial_substitute(g: PowerSeries, f: PowerSeries, order: int | None = None) -> PowerSeries:
    """``g(f(x))`` treating ``g`` as an honest polynomial, so ``f(0)`` may be nonzero.

    The default order is ``deg g * deg f``; the result is then exact.
    """
    if order is None:
        order = g.order * f.order
    return _horner(g, PowerSeries(tuple(f[k] for k in range(order + 1))), order)


def _horner(g: PowerSeries, f: PowerSeries, order: int) -> PowerSeries:
    acc = PowerSeries.zero(order)
    one = PowerSeries(tuple(1 if k == 0 else 0 for k in range(order + 1)))
    for c in reversed(g.coeffs):
        acc = acc * f + one * c
    return acc


def ogf_of_polynomial(P: Polynomial) -> PowerSeries:
    """``Σ_b x^{|E_b|}`` for a one-colour polynomial."""
    if P.I.size != 1 or P.J.size != 1:
        raise ShapeError("ordinary generating function needs a one-colour polynomial")
    top = max(P.arities, default=0)
    coeffs = [0] * (top + 1)
    for n in P.arities:
        coeffs[n] += 1
    return PowerSeries(tuple(coeffs))
