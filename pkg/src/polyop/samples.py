"""Small named polynomials and monads used by tests, the CLI and the docs."""

from __future__ import annotations

from .finset import POINT, FiniteSet
from .freemonad import PolynomialMonad, make_monad
from .poly import Polynomial, identity_poly


def p_bin() -> Polynomial:
    """One colour; a nullary operation ``b0`` and a binary operation ``b2``."""
    return Polynomial.from_tables(POINT, FiniteSet.of(["l", "r"]), FiniteSet.of(["b0", "b2"]), POINT,
                                  [0, 0], [1, 1], [0, 0])


def p_unary() -> Polynomial:
    """One colour; a nullary ``z`` and a unary ``s`` (the natural numbers)."""
    return Polynomial.from_tables(POINT, FiniteSet.of(["x"]), FiniteSet.of(["z", "s"]), POINT, [0], [1], [0, 0])


def constant(n_ops: int, colours: int = 1) -> Polynomial:
    """Only nullary operations, all of colour 0."""
    I = FiniteSet(colours)
    return Polynomial.from_tables(I, 0, FiniteSet.of([f"k{i}" for i in range(n_ops)]), I, [], [], [0] * n_ops)


def two_colour() -> Polynomial:
    """Colours 0, 1; ``z: -> 0``, ``u: 1 -> 0``, ``v: 0,0 -> 1``."""
    return Polynomial.from_tables(
        FiniteSet(2), FiniteSet.of(["u0", "v0", "v1"]), FiniteSet.of(["z", "u", "v"]), FiniteSet(2),
        [1, 0, 0], [1, 2, 2], [0, 0, 1],
    )


def nilpotent() -> Polynomial:
    """Colours 0, 1; ``z: -> 0`` and ``m: 0,0 -> 1``.  Operations only raise the colour."""
    return Polynomial.from_tables(
        FiniteSet(2), FiniteSet.of(["m0", "m1"]), FiniteSet.of(["z", "m"]), FiniteSet(2), [0, 0], [1, 1], [0, 1]
    )


def staircase() -> Polynomial:
    """Colours 0, 1, 2; ``b: 0,0 -> 1`` and ``c: 1 -> 2``.  Its free monad is finite."""
    return Polynomial.from_tables(
        FiniteSet(3), FiniteSet.of(["b0", "b1", "c0"]), FiniteSet.of(["b", "c"]), FiniteSet(3),
        [0, 0, 1], [0, 0, 1], [1, 2],
    )


def maybe_monad() -> PolynomialMonad:
    """``X ↦ X + 1``: a unary ``u`` (the unit) and a nullary ``c``."""
    P = Polynomial.from_tables(POINT, FiniteSet.of(["x"]), FiniteSet.of(["u", "c"]), POINT, [0], [0], [0, 0])
    mult_ops = {("u", ("u",)): "u", ("u", ("c",)): "c", ("c", ()): "c"}
    mult_inputs = {("u", ("u",), "x", "x"): "x"}
    return make_monad(P, {0: "u"}, {0: "x"}, mult_ops, mult_inputs)


def identity_monad(colours: int = 1) -> PolynomialMonad:
    I = FiniteSet(colours)
    P = identity_poly(I)
    return make_monad(P, lambda i: i, lambda i: i, lambda op: op[0], lambda e: e[2])
