"""JSON encodings of the library's objects.

Every document carries ``"schema_version"`` and ``"kind"``.  Labels are JSON
values; lists inside labels are read back as tuples so that composite labels
round-trip.  A polynomial or monad document may instead name one of the
built-in samples with ``{"sample": "p_bin"}``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from . import samples
from .dendroidal import OmegaMor, Presheaf
from .errors import ShapeError
from .finset import FiniteMap, FiniteSet, _freeze
from .freemonad import PolynomialMonad, make_monad
from .lambek import LambekAlgebra, LambekCoalgebra
from .poly import Family, FamilyMap, PolyMor, Polynomial, compose_poly
from .species import PowerSeries, SymSeq
from .tree import Tree, from_nested

SCHEMA_VERSION = 1

POLY_SAMPLES = {
    "p_bin": samples.p_bin,
    "p_unary": samples.p_unary,
    "two_colour": samples.two_colour,
    "nilpotent": samples.nilpotent,
    "staircase": samples.staircase,
}
MONAD_SAMPLES = {
    "maybe": samples.maybe_monad,
    "identity": samples.identity_monad,
}


class InputError(ShapeError):
    """A document does not match its schema."""


def _require(doc: dict, key: str):
    if not isinstance(doc, dict):
        raise InputError(f"expected a JSON object, got {type(doc).__name__}")
    if key not in doc:
        raise InputError(f"missing field {key!r}")
    return doc[key]


def _check_kind(doc: dict, kind: str) -> None:
    got = doc.get("kind", kind)
    if got != kind:
        raise InputError(f"expected a {kind} document, got {got!r}")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise InputError(f"unsupported schema_version {version!r}")


def to_jsonable(x):
    if isinstance(x, tuple):
        return [to_jsonable(y) for y in x]
    if isinstance(x, list):
        return [to_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    return x


def dumps(doc) -> str:
    """Deterministic rendering: sorted keys, fixed separators."""
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False)


def load_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


# --------------------------------------------------------------------------
# finite sets and maps


def set_to_json(A: FiniteSet) -> dict:
    out = {"size": A.size}
    if A.labels is not None:
        out["labels"] = to_jsonable(A.labels)
    return out


def set_from_json(doc) -> FiniteSet:
    if isinstance(doc, int) and not isinstance(doc, bool):
        return FiniteSet(doc)
    if isinstance(doc, list):
        return FiniteSet.of(_freeze(x) for x in doc)
    size = _require(doc, "size")
    labels = doc.get("labels")
    return FiniteSet(size, None if labels is None else tuple(_freeze(x) for x in labels))


def map_to_json(f: FiniteMap) -> dict:
    return {"dom": set_to_json(f.dom), "cod": set_to_json(f.cod), "table": list(f.table)}


def map_from_json(doc) -> FiniteMap:
    return FiniteMap(set_from_json(_require(doc, "dom")), set_from_json(_require(doc, "cod")), tuple(_require(doc, "table")))


def _table(doc):
    if isinstance(doc, dict):
        return tuple(_require(doc, "table"))
    if not isinstance(doc, list):
        raise InputError("a map must be a table (list of indices)")
    return tuple(doc)


# --------------------------------------------------------------------------
# polynomials and morphisms


def poly_to_json(P: Polynomial) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "polynomial",
        "I": set_to_json(P.I),
        "E": set_to_json(P.E),
        "B": set_to_json(P.B),
        "J": set_to_json(P.J),
        "s": list(P.s.table),
        "p": list(P.p.table),
        "t": list(P.t.table),
    }


def poly_from_json(doc) -> Polynomial:
    if isinstance(doc, dict) and "sample" in doc:
        name = doc["sample"]
        if name not in POLY_SAMPLES:
            raise InputError(f"unknown sample polynomial {name!r}; known: {sorted(POLY_SAMPLES)}")
        return POLY_SAMPLES[name]()
    _check_kind(doc, "polynomial")
    sets = [set_from_json(_require(doc, k)) for k in ("I", "E", "B", "J")]
    tables = [_table(_require(doc, k)) for k in ("s", "p", "t")]
    return Polynomial.from_tables(*sets, *tables)


def mor_to_json(m: PolyMor) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "morphism",
        "src": poly_to_json(m.src),
        "dst": poly_to_json(m.dst),
        "on_I": list(m.on_I.table),
        "on_J": list(m.on_J.table),
        "eps": list(m.eps.table),
        "beta": list(m.beta.table),
    }


def mor_from_json(doc) -> PolyMor:
    _check_kind(doc, "morphism")
    S = poly_from_json(_require(doc, "src"))
    D = poly_from_json(_require(doc, "dst"))
    return PolyMor(
        S,
        D,
        FiniteMap(S.I, D.I, _table(_require(doc, "on_I"))),
        FiniteMap(S.J, D.J, _table(_require(doc, "on_J"))),
        FiniteMap(S.E, D.E, _table(_require(doc, "eps"))),
        FiniteMap(S.B, D.B, _table(_require(doc, "beta"))),
    )


# --------------------------------------------------------------------------
# families


def family_to_json(X: Family) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "family",
        "base": set_to_json(X.base),
        "total": set_to_json(X.total),
        "proj": list(X.proj.table),
        "sizes": X.sizes(),
    }


def family_from_json(doc, base: FiniteSet | None = None) -> Family:
    _check_kind(doc, "family")
    if "base" in doc:
        base = set_from_json(doc["base"])
    if base is None:
        raise InputError("family needs a base")
    if "proj" in doc:
        total = set_from_json(doc["total"]) if "total" in doc else FiniteSet(len(doc["proj"]))
        return Family(base, total, FiniteMap(total, base, _table(doc["proj"])))
    sizes = _require(doc, "sizes")
    if len(sizes) != base.size:
        raise InputError(f"{len(sizes)} sizes for a base of {base.size} colours")
    return Family.from_sizes(base, sizes)


def _family_map_from_json(doc, src: Family, dst: Family) -> FamilyMap:
    return FamilyMap(src, dst, FiniteMap(src.total, dst.total, _table(doc)))


def algebra_from_json(P: Polynomial, doc) -> LambekAlgebra:
    from .poly import evaluate

    X = family_from_json(_require(doc, "carrier"), P.I)
    return LambekAlgebra(P, X, _family_map_from_json(_require(doc, "structure"), evaluate(P, X), X))


def coalgebra_from_json(P: Polynomial, doc) -> LambekCoalgebra:
    from .poly import evaluate

    X = family_from_json(_require(doc, "carrier"), P.I)
    return LambekCoalgebra(P, X, _family_map_from_json(_require(doc, "structure"), X, evaluate(P, X)))


# --------------------------------------------------------------------------
# trees


def tree_to_json(T: Tree) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "tree",
        "poly": poly_to_json(T.poly),
        "root": T.root,
        "height": T.height,
        "leaves": list(T.leaf_list()),
    }


def tree_from_json(doc) -> Tree:
    """Accepts ``{"nested": ...}`` (null = leaf, list = node) or ``{"poly": ...}``.

    Cached fields (root, height, leaves) are recomputed and must agree.
    """
    _check_kind(doc, "tree")
    if "nested" in doc:
        return from_nested(doc["nested"])
    T = Tree(poly_from_json(_require(doc, "poly")))
    checks = {"root": T.root, "height": T.height, "leaves": list(T.leaf_list())}
    for key, value in checks.items():
        if key in doc and doc[key] != value:
            raise InputError(f"cached field {key!r} is {doc[key]!r} but the tree gives {value!r}")
    return T


def omega_to_json(f: OmegaMor) -> dict:
    return {"edge_map": list(f.edge_map)}


# --------------------------------------------------------------------------
# monads


def monad_to_json(M: PolynomialMonad) -> dict:
    P = M.P
    uf, mf = M.unit.fn(), M.mult.fn()
    PP = compose_poly(P, P)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "monad",
        "poly": poly_to_json(P),
        "unit": {
            "ops": [[i, uf.on_B(i)] for i in P.I.all_labels()],
            "inputs": [[i, uf.on_E(i)] for i in P.I.all_labels()],
        },
        "mult": {
            "ops": [[b, mf.on_B(b)] for b in PP.B.all_labels()],
            "inputs": [[e, mf.on_E(e)] for e in PP.E.all_labels()],
        },
    }


def _pairs(doc, what) -> dict:
    out = {}
    for item in doc:
        if not isinstance(item, list) or len(item) != 2:
            raise InputError(f"{what} entries must be [key, value] pairs")
        out[_freeze(item[0])] = _freeze(item[1])
    return out


def monad_from_json(doc) -> PolynomialMonad:
    if isinstance(doc, dict) and "sample" in doc:
        name = doc["sample"]
        if name not in MONAD_SAMPLES:
            raise InputError(f"unknown sample monad {name!r}; known: {sorted(MONAD_SAMPLES)}")
        return MONAD_SAMPLES[name]()
    _check_kind(doc, "monad")
    P = poly_from_json(_require(doc, "poly"))
    unit, mult = _require(doc, "unit"), _require(doc, "mult")
    tables = [
        _pairs(_require(unit, "ops"), "unit.ops"),
        _pairs(_require(unit, "inputs"), "unit.inputs"),
        _pairs(_require(mult, "ops"), "mult.ops"),
        _pairs(_require(mult, "inputs"), "mult.inputs"),
    ]

    def lookup(table, name):
        def get(key):
            try:
                return table[key]
            except KeyError:
                raise InputError(f"{name} has no entry for {to_jsonable(key)!r}") from None

        return get

    names = ("unit.ops", "unit.inputs", "mult.ops", "mult.inputs")
    return make_monad(P, *(lookup(t, n) for t, n in zip(tables, names)))


# --------------------------------------------------------------------------
# presheaves


def presheaf_to_json(phi: Presheaf, morphisms) -> dict:
    """Values and the restriction tables along ``morphisms``."""
    restrictions = []
    for f in morphisms:
        table = phi.restrict(f).table
        restrictions.append(
            {"src": phi.index(f.src), "dst": phi.index(f.dst), "edge_map": list(f.edge_map), "table": list(table)}
        )
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "presheaf",
        "trees": [tree_to_json(T) for T in phi.trees],
        "values": [v.size for v in phi.values],
        "restrictions": restrictions,
    }


def presheaf_from_json(doc) -> Presheaf:
    _check_kind(doc, "presheaf")
    trees = [tree_from_json(t) for t in _require(doc, "trees")]
    values = [FiniteSet(n) for n in _require(doc, "values")]
    if len(values) != len(trees):
        raise InputError("need one value per tree")
    restrictions = {}
    for r in _require(doc, "restrictions"):
        i, j = _require(r, "src"), _require(r, "dst")
        if not (0 <= i < len(trees) and 0 <= j < len(trees)):
            raise InputError("restriction refers to a tree outside the list")
        f = OmegaMor(trees[i], trees[j], tuple(_require(r, "edge_map")))
        restrictions[(i, j, f.edge_map)] = FiniteMap(values[j], values[i], tuple(_require(r, "table")))
    return Presheaf(trees, values, restrictions)


# --------------------------------------------------------------------------
# species


def symseq_from_json(doc) -> SymSeq:
    if not isinstance(doc, dict):
        raise InputError("a symmetric sequence must be a JSON object")
    _check_kind(doc, "symseq")
    sizes = _require(doc, "B")
    N = doc.get("N", len(sizes) - 1)
    if N != len(sizes) - 1:
        raise InputError(f"N={N} but {len(sizes)} sets given")
    actions = doc.get("actions")
    if actions is None:
        return SymSeq.trivial(sizes)
    return SymSeq(tuple(sizes), tuple(tuple(tuple(g) for g in gens) for gens in actions))


def symseq_to_json(S: SymSeq) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "symseq",
        "N": S.max_arity,
        "B": [B.size for B in S.sets],
        "actions": [[list(g) for g in gens] for gens in S.actions],
    }


def series_to_json(f: PowerSeries) -> list:
    return [to_jsonable(c) for c in f.coeffs]


def detect_kind(doc) -> str:
    if isinstance(doc, dict):
        if "sample" in doc:
            return "monad" if doc["sample"] in MONAD_SAMPLES else "polynomial"
        if "kind" in doc:
            return doc["kind"]
        if "B" in doc and "actions" in doc:
            return "symseq"
        if {"I", "E", "B", "J"} <= doc.keys():
            return "polynomial"
        if "nested" in doc:
            return "tree"
    raise InputError("cannot tell what kind of document this is; add a \"kind\" field")
