"""Command-line front end.

Every verb reads JSON documents (see :mod:`polyop.serialize`), calls one
library operation and prints a deterministic report.  Exit codes: 0 ok,
1 a checked property failed, 2 bad usage, 3 bad input, 4 guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from collections import Counter
from dataclasses import dataclass, field

from . import __version__
from . import serialize as ser
from .dendroidal import (
    OmegaMor,
    active_inert_factorize,
    classify,
    element_inclusions,
    nerve_presheaf,
    omega_compose,
    omega_hom,
    segal_check,
    segal_domain,
    segal_to_monad,
)
from .errors import GuardExceeded, PolyopError
from .freemonad import FreeMonadView, monad_laws_check, pn_chain, ptree_canonical_form, term_colour, term_leaves
from .lambek import Unbounded, adamek_wtype, check_pca, random_instance
from .poly import compose_poly, evaluate, materialize, validate
from .species import compose_card, egf, htpy_eval_card, set_eval_card
from .tree import Tree, canonical_form, corolla, enumerate_trees, eta

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


@dataclass
class Command:
    verb: str
    args: argparse.Namespace
    options: dict = field(default_factory=dict)


@dataclass
class Outcome:
    report: dict
    ok: bool = True


# --------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {value}")
    return value


def _edge_map(text: str) -> tuple:
    try:
        value = json.loads(text)
    except json.JSONDecodeError:
        raise argparse.ArgumentTypeError(f"edge map must be a JSON list, got {text!r}") from None
    if not isinstance(value, list) or not all(isinstance(x, int) for x in value):
        raise argparse.ArgumentTypeError("edge map must be a JSON list of integers")
    return tuple(value)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--guard", type=_positive, default=None, help="enumeration limit (default: POLYOP_GUARD or 10^6)")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")

    parser = _Parser(prog="polyop", description="Finite polynomial functors, trees and operads.")
    parser.add_argument("--version", action="version", version=f"polyop {__version__}")
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("validate", "check a polynomial, tree, family, monad or symmetric sequence")
    p.add_argument("file")

    p = add("eval", "evaluate a polynomial on a family")
    p.add_argument("poly")
    p.add_argument("family")
    p.add_argument("--list", action="store_true", help="also list the elements")

    p = add("compose", "composite polynomial Q∘P")
    p.add_argument("q")
    p.add_argument("p")

    p = add("trees", "enumerate trees up to isomorphism")
    p.add_argument("--max-nodes", type=_natural, default=3)
    p.add_argument("--max-arity", type=_natural, default=2)
    p.add_argument("--list", action="store_true")

    for name, help_text in (("ptrees", "enumerate P-trees"), ("freemonad", "free monad by both constructions")):
        p = add(name, help_text)
        p.add_argument("poly")
        p.add_argument("--height", "--max-height", dest="height", type=_natural, default=2)
        p.add_argument("--list", action="store_true")

    p = add("wtype", "initial algebra by the Adámek chain")
    p.add_argument("poly")
    p.add_argument("--max-iter", type=_positive, default=10)

    p = add("twist", "twisting-morphism bijection on seeded random instances")
    p.add_argument("poly")
    p.add_argument("--instance", default=None, help="JSON with explicit coalgebra and algebra")
    p.add_argument("--samples", type=_positive, default=20)
    p.add_argument("--max-size", type=_positive, default=3)

    p = add("laws", "check the monad laws")
    p.add_argument("monad")

    p = add("omega", "morphisms of the dendroidal category")
    p.add_argument("action", choices=("hom", "compose", "factorize", "classify"))
    p.add_argument("trees", nargs="+")
    p.add_argument("--f", type=_edge_map, default=None, help="edge map of the (first) morphism")
    p.add_argument("--g", type=_edge_map, default=None, help="edge map of the second morphism")

    for name, help_text in (("nerve", "nerve presheaf of a monad"), ("segal", "Segal condition check")):
        p = add(name, help_text)
        p.add_argument("input", help="monad, polynomial (free truncation, with --height) or presheaf")
        p.add_argument("--tree", action="append", default=[], help="tree JSON (repeatable)")
        p.add_argument("--max-nodes", type=_natural, default=None)
        p.add_argument("--max-arity", type=_natural, default=None)
        p.add_argument("--height", "--max-height", dest="height", type=_natural, default=2)
        if name == "segal":
            p.add_argument("--to-monad", type=_natural, default=None, metavar="MAX_ARITY",
                           help="rebuild the monad from the values on trees of two levels")

    p = add("egf", "exponential generating function of a symmetric sequence")
    p.add_argument("symseq")

    p = add("card", "set-level and groupoid cardinalities")
    p.add_argument("symseq")
    p.add_argument("--x", type=_natural, default=None)
    p.add_argument("--compose", default=None, help="inner symmetric sequence F for |(G∘F)_n|")
    p.add_argument("--n", type=_natural, default=None)
    return parser


def parse(argv) -> Command:
    args = build_parser().parse_args(argv)
    if args.verb is None:
        raise UsageError("polyop: a verb is required (try --help)")
    return Command(args.verb, args)


# --------------------------------------------------------------------------
# verbs


def _load(path, loader):
    return loader(ser.load_json(path))


def _by_colour_arity(P, terms) -> list:
    counts = Counter((term_colour(P, t), len(term_leaves(P, t))) for t in terms)
    return [[c, n, k] for (c, n), k in sorted(counts.items(), key=lambda x: (repr(x[0][0]), x[0][1]))]


def _poly_by_colour_arity(F) -> list:
    counts = Counter((F.J.label(F.t(b)), F.arities[b]) for b in range(F.B.size))
    return [[c, n, k] for (c, n), k in sorted(counts.items(), key=lambda x: (repr(x[0][0]), x[0][1]))]


def do_validate(c: Command) -> Outcome:
    doc = ser.load_json(c.args.file)
    kind = ser.detect_kind(doc)
    if kind == "polynomial":
        P = ser.poly_from_json(doc)
        rep = validate(P)
        return Outcome({"kind": kind, "valid": rep.ok, "failures": rep.failures, "arities": list(P.arities)}, rep.ok)
    if kind == "tree":
        T = ser.tree_from_json(doc)
        return Outcome({"kind": kind, "valid": True, "edges": T.n_edges, "nodes": T.n_nodes,
                        "height": T.height, "canonical_form": canonical_form(T)})
    if kind == "monad":
        M = ser.monad_from_json(doc)
        rep = monad_laws_check(M)
        return Outcome({"kind": kind, "valid": rep.ok, "failures": rep.failures, "checks": rep.data.get("checks", {})}, rep.ok)
    if kind == "family":
        X = ser.family_from_json(doc)
        return Outcome({"kind": kind, "valid": True, "sizes": X.sizes()})
    if kind == "symseq":
        S = ser.symseq_from_json(doc)
        return Outcome({"kind": kind, "valid": True, "N": S.max_arity, "B": [B.size for B in S.sets]})
    if kind == "presheaf":
        phi = ser.presheaf_from_json(doc)
        return Outcome({"kind": kind, "valid": True, "trees": len(phi.trees)})
    raise ser.InputError(f"cannot validate documents of kind {kind!r}")


def do_eval(c: Command) -> Outcome:
    P = _load(c.args.poly, ser.poly_from_json)
    X = ser.family_from_json(ser.load_json(c.args.family), P.I)
    Y = evaluate(P, X, c.args.guard)
    report = {"size": Y.total.size, "sizes": Y.sizes()}
    if c.args.list:
        report["elements"] = list(Y.total.all_labels())
    return Outcome(report)


def do_compose(c: Command) -> Outcome:
    Q = _load(c.args.q, ser.poly_from_json)
    P = _load(c.args.p, ser.poly_from_json)
    QP = compose_poly(Q, P, c.args.guard)
    rep = validate(QP)
    return Outcome({"valid": rep.ok, "polynomial": ser.poly_to_json(QP), "arities": list(QP.arities)}, rep.ok)


def do_trees(c: Command) -> Outcome:
    trees = enumerate_trees(c.args.max_nodes, c.args.max_arity, c.args.guard)
    by_nodes = Counter(T.n_nodes for T in trees)
    report = {"count": len(trees), "by_nodes": [[n, by_nodes[n]] for n in sorted(by_nodes)]}
    if c.args.list:
        report["forms"] = [canonical_form(T) for T in trees]
    return Outcome(report)


def do_ptrees(c: Command) -> Outcome:
    P = _load(c.args.poly, ser.poly_from_json)
    view = FreeMonadView(P)
    terms = view.trees(c.args.height, c.args.guard)
    report = {"count": len(terms), "height": c.args.height, "by_colour_arity": _by_colour_arity(view.P, terms)}
    if c.args.list:
        report["forms"] = [ptree_canonical_form(t) for t in terms]
    return Outcome(report)


def do_freemonad(c: Command) -> Outcome:
    P = _load(c.args.poly, ser.poly_from_json)
    h = c.args.height
    view = FreeMonadView(P)
    trees = view.trees(h, c.args.guard)
    chain = materialize(pn_chain(P, h, c.args.guard), c.args.guard)
    by_trees = _by_colour_arity(view.P, trees)
    by_chain = _poly_by_colour_arity(chain)
    agree = len(trees) == chain.B.size and by_trees == by_chain
    report = {"count": len(trees), "chain_count": chain.B.size, "height": h, "agree": agree,
              "by_colour_arity": by_trees}
    if c.args.list:
        report["forms"] = [ptree_canonical_form(t) for t in trees]
    return Outcome(report, agree)


def do_wtype(c: Command) -> Outcome:
    P = _load(c.args.poly, ser.poly_from_json)
    w = adamek_wtype(P, c.args.max_iter, c.args.guard)
    if isinstance(w, Unbounded):
        return Outcome({"stabilized": False, "iterations": w.iterations, "sizes": list(w.sizes), "reason": w.reason})
    return Outcome({"stabilized": True, "size": w.family.total.size, "sizes_by_colour": w.family.sizes(),
                    "iterations": w.iterations, "chain_sizes": list(w.sizes)})


def do_twist(c: Command) -> Outcome:
    P = _load(c.args.poly, ser.poly_from_json)
    if c.args.instance:
        doc = ser.load_json(c.args.instance)
        instances = [(ser.coalgebra_from_json(P, ser._require(doc, "coalgebra")),
                      ser.algebra_from_json(P, ser._require(doc, "algebra")))]
    else:
        rng = random.Random(c.args.seed)
        instances = [random_instance(P, rng, c.args.max_size) for _ in range(c.args.samples)]
    rows, ok = [], True
    for C, A in instances:
        rep = check_pca(P, C, A, c.args.guard)
        ok = ok and rep.ok
        row = {"ok": rep.ok, "tw_pc": rep.data["tw_pc"], "tw_c": rep.data["tw_c"],
               "coalgebra_sizes": C.carrier.sizes(), "algebra_sizes": A.carrier.sizes()}
        if not rep.ok:
            row["failures"] = rep.failures
        rows.append(row)
    return Outcome({"bijection": ok, "instances": len(rows), "seed": c.args.seed, "results": rows}, ok)


def do_laws(c: Command) -> Outcome:
    M = _load(c.args.monad, ser.monad_from_json)
    rep = monad_laws_check(M)
    return Outcome({"laws": rep.ok, "checks": rep.data.get("checks", {}), "failures": rep.failures}, rep.ok)


def _trees(paths) -> list[Tree]:
    return [_load(p, ser.tree_from_json) for p in paths]


def _need(value, flag):
    if value is None:
        raise UsageError(f"this action needs {flag}")
    return value


def do_omega(c: Command) -> Outcome:
    a = c.args
    trees = _trees(a.trees)
    if a.action == "hom":
        if len(trees) != 2:
            raise UsageError("omega hom takes two trees")
        homs = omega_hom(trees[0], trees[1], a.guard)
        rows = [{"edge_map": list(f.edge_map), "class": classify(f).label} for f in homs]
        return Outcome({"count": len(rows), "morphisms": rows})
    if a.action == "classify":
        if len(trees) != 2:
            raise UsageError("omega classify takes two trees")
        f = OmegaMor(trees[0], trees[1], _need(a.f, "--f"))
        k = classify(f)
        return Outcome({"class": k.label, "inert": k.inert, "active": k.active})
    if a.action == "compose":
        if len(trees) != 3:
            raise UsageError("omega compose takes three trees R S T with --f: R->S and --g: S->T")
        f = OmegaMor(trees[0], trees[1], _need(a.f, "--f"))
        g = OmegaMor(trees[1], trees[2], _need(a.g, "--g"))
        return Outcome({"edge_map": list(omega_compose(g, f).edge_map)})
    if len(trees) != 2:
        raise UsageError("omega factorize takes two trees")
    f = OmegaMor(trees[0], trees[1], _need(a.f, "--f"))
    act, ine = active_inert_factorize(f)
    back = omega_compose(ine, act)
    return Outcome({
        "active": list(act.edge_map),
        "inert": list(ine.edge_map),
        "middle": ser.tree_to_json(act.dst),
        "recomposes": back.edge_map == f.edge_map,
    }, back.edge_map == f.edge_map)


def _domain(c: Command) -> list[Tree]:
    a = c.args
    trees: list[Tree] = []
    if a.max_nodes is not None or a.max_arity is not None:
        trees.extend(enumerate_trees(a.max_nodes if a.max_nodes is not None else 3,
                                     a.max_arity if a.max_arity is not None else 2, a.guard))
    trees.extend(_trees(a.tree))
    if not trees:
        raise UsageError("give --tree or --max-nodes/--max-arity")
    return trees


def _with_elements(trees: list[Tree]) -> list[Tree]:
    """Add ``η`` and the corollas that the Segal check of ``trees`` needs."""
    out, seen = [], set()
    extra = [eta()] + [corolla(n) for n in sorted({T.arity(v) for T in trees for v in range(T.n_nodes)})]
    for T in list(trees) + extra:
        if T.poly not in seen:
            seen.add(T.poly)
            out.append(T)
    return out


def _presheaf(c: Command, trees):
    doc = ser.load_json(c.args.input)
    kind = ser.detect_kind(doc)
    if kind == "presheaf":
        return ser.presheaf_from_json(doc), "presheaf"
    if kind == "monad":
        M = ser.monad_from_json(doc)
    elif kind == "polynomial":
        M = (FreeMonadView(ser.poly_from_json(doc)), c.args.height)
    else:
        raise ser.InputError(f"expected a monad, polynomial or presheaf, got {kind!r}")
    return nerve_presheaf(M, _with_elements(trees), c.args.guard), kind


def do_nerve(c: Command) -> Outcome:
    trees = _domain(c)
    phi, _ = _presheaf(c, trees)
    morphisms = []
    for T in phi.trees:
        edges, nodes = element_inclusions(T)
        morphisms.extend(edges + nodes)
    return Outcome(ser.presheaf_to_json(phi, morphisms))


def do_segal(c: Command) -> Outcome:
    a = c.args
    if a.to_monad is not None:
        phi, _ = _presheaf(c, segal_domain(a.to_monad))
        M = segal_to_monad(phi, a.to_monad)
        return Outcome({"laws": M.laws_verified, "monad": ser.monad_to_json(M)}, M.laws_verified)
    doc = ser.load_json(a.input)
    if ser.detect_kind(doc) == "presheaf" and not a.tree and a.max_nodes is None and a.max_arity is None:
        phi = ser.presheaf_from_json(doc)
        targets = list(phi.trees)
    else:
        targets = _domain(c)
        phi, _ = _presheaf(c, targets)
    rows, ok = [], True
    for T in targets:
        rep = segal_check(phi, T)
        ok = ok and rep.ok
        if not rep.ok:
            rows.append({"tree": canonical_form(T), "failures": rep.failures, "witness": rep.data.get("witness")})
    return Outcome({"segal": ok, "trees": len(targets), "failures": rows}, ok)


def do_egf(c: Command) -> Outcome:
    S = _load(c.args.symseq, ser.symseq_from_json)
    return Outcome({"coefficients": ser.series_to_json(egf(S))})


def do_card(c: Command) -> Outcome:
    a = c.args
    G = _load(a.symseq, ser.symseq_from_json)
    if a.compose is not None:
        F = _load(a.compose, ser.symseq_from_json)
        n = _need(a.n, "--n")
        return Outcome({"n": n, "compose_card": compose_card(G, F, n)})
    x = _need(a.x, "--x")
    return Outcome({"x": x, "set": set_eval_card(G, x, a.guard), "groupoid": htpy_eval_card(G, x)})


VERBS = {
    "validate": do_validate,
    "eval": do_eval,
    "compose": do_compose,
    "trees": do_trees,
    "ptrees": do_ptrees,
    "freemonad": do_freemonad,
    "wtype": do_wtype,
    "twist": do_twist,
    "laws": do_laws,
    "omega": do_omega,
    "nerve": do_nerve,
    "segal": do_segal,
    "egf": do_egf,
    "card": do_card,
}


def execute(c: Command) -> Outcome:
    return VERBS[c.verb](c)


# --------------------------------------------------------------------------
# rendering


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return ser.dumps(report)
    lines = []
    for key in sorted(report):
        value = ser.to_jsonable(report[key])
        if not isinstance(value, str):
            value = json.dumps(value, sort_keys=True)
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def _error(kind: str, message: str, **extra) -> dict:
    return {"error": {"type": kind, "message": message, **extra}}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    fmt, out_path = "json", None
    try:
        c = parse(argv)
        fmt, out_path = c.args.format, c.args.output
        outcome = execute(c)
        code = EXIT_OK if outcome.ok else EXIT_FAIL
        report = outcome.report
    except UsageError as exc:
        report, code = _error("usage", str(exc)), EXIT_USAGE
    except GuardExceeded as exc:
        report, code = _error("guard", str(exc), needed=exc.needed, guard=exc.guard), EXIT_GUARD
    except FileNotFoundError as exc:
        report, code = _error("input", str(exc)), EXIT_INPUT
    except (PolyopError, ValueError, KeyError, TypeError) as exc:
        report, code = _error("input", f"{type(exc).__name__}: {exc}"), EXIT_INPUT
    text = render(report, fmt)
    if out_path and code in (EXIT_OK, EXIT_FAIL):
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
