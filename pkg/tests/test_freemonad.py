import pytest
from oracles import eval_size, tree_count, tree_profile

from polyop.errors import ShapeError
from polyop.finset import POINT, FiniteSet
from polyop.freemonad import (
    Chain,
    FreeMonadView,
    adjunction_check,
    chain_tree_iso,
    counit_en,
    enumerate_ptrees,
    eta_term,
    fold_ptree,
    free_eval_comparison,
    free_monad_if_finite,
    free_mult,
    free_unit,
    make_monad,
    monad_laws_check,
    mu_mn,
    node_term,
    pn_chain,
    ptree_canonical_form,
    term_colour,
    term_height,
    term_leaves,
    term_nodes,
    transition,
)
from polyop.lambek import adamek_wtype
from polyop.poly import Family, Polynomial, compose_family_maps, mor_component, validate_mor
from polyop.samples import identity_monad, maybe_monad, nilpotent, p_bin, p_unary, staircase, two_colour

SAMPLES = {"bin": p_bin, "unary": p_unary, "two": two_colour, "nil": nilpotent, "stair": staircase}


@pytest.mark.parametrize("name", sorted(SAMPLES))
@pytest.mark.parametrize("h", range(3))
def test_chain_and_trees_have_oracle_sizes(name, h):
    P = SAMPLES[name]()
    assert pn_chain(P, h).B.size == tree_count(P, h)
    trees = FreeMonadView(P).trees(h)
    assert len(trees) == tree_count(P, h)
    profile = tree_profile(P, h)
    for i in range(P.I.size):
        got = sum(1 for t in trees if P.I.index(term_colour(P, t)) == i)
        assert got == sum(profile[i].values())


def test_p_bin_tree_counts_are_frozen():
    assert [pn_chain(p_bin(), h).B.size for h in range(4)] == [1, 3, 11, 123]


@pytest.mark.parametrize("h", range(3))
def test_transitions_are_cartesian_injections(h):
    f = transition(two_colour(), h)
    assert validate_mor(f)
    assert f.beta.is_injective and f.eps.is_injective


def test_chain_tree_iso():
    for h in range(3):
        iso = chain_tree_iso(two_colour(), h)
        assert iso.is_iso and validate_mor(iso)


@pytest.mark.parametrize("m,n", [(0, 0), (0, 1), (1, 0), (1, 1), (2, 1)])
def test_mu_mn_is_cartesian(m, n):
    mu = mu_mn(p_unary(), m, n)
    assert validate_mor(mu)
    assert mu.dst.B.size == tree_count(p_unary(), m + n)


def test_chain_rejects_negative_heights():
    with pytest.raises(ShapeError):
        Chain(p_bin()).level(-1)


def test_term_helpers():
    P = p_bin()
    t = node_term("b2", [node_term("b0", []), eta_term(0)])
    assert term_height(t) == 2
    assert term_nodes(t) == 2
    assert len(term_leaves(P, t)) == 1
    swapped = node_term("b2", [eta_term(0), node_term("b0", [])])
    # distinct as planar terms, but inputs are labelled so the forms differ as well
    assert ptree_canonical_form(t) != ptree_canonical_form(swapped)


def test_ptree_shapes_and_decorations():
    for pt in enumerate_ptrees(two_colour(), 2):
        assert validate_mor(pt.deco)
        assert pt.shape.n_nodes == term_nodes(pt.term)
        assert pt.height == term_height(pt.term)


def test_free_unit_and_mult_are_cartesian():
    P = two_colour()
    assert validate_mor(free_unit(P))
    assert validate_mor(free_mult(P, 1))


def test_grafting_laws_on_truncations():
    assert FreeMonadView(p_bin()).laws_check(1, 1, 1)
    assert FreeMonadView(two_colour()).laws_check(1, 0, 1)


def test_free_eval_comparison_is_bijective():
    P = two_colour()
    X = Family.from_sizes(P.I, [1, 2])
    for h in range(3):
        comp = free_eval_comparison(P, X, h)
        assert sorted(comp.map.table) == list(range(comp.dst.total.size))
        assert comp.src.sizes() == eval_size(pn_chain(P, h), [1, 2])


def test_sample_monads_satisfy_laws():
    for M in (maybe_monad(), identity_monad(1), identity_monad(3)):
        assert M.laws_verified
        rep = monad_laws_check(M)
        assert rep and all(rep.data["checks"].values())


def test_broken_multiplication_fails_laws():
    P = Polynomial.from_tables(POINT, FiniteSet.of(["xu", "xv"]), FiniteSet.of(["u", "v"]), POINT,
                               [0, 0], [0, 1], [0, 0])
    # every composite goes to v: cartesian, but u is no longer a unit
    mult_ops = lambda op: "v"
    mult_inputs = lambda e: "xv"
    M = make_monad(P, {0: "u"}, {0: "xu"}, mult_ops, mult_inputs)
    assert not M.laws_verified
    rep = monad_laws_check(M)
    assert rep.data["checks"]["mult_cartesian"]
    assert not rep.data["checks"]["left_unit"]
    # inputs sent outside the fiber of their operation: the cartesian check fails first
    bad = make_monad(P, {0: "u"}, {0: "xu"}, mult_ops, lambda e: "xu" if e[2] == "xu" else "xv")
    rep = monad_laws_check(bad)
    assert not bad.laws_verified and rep.data["checks"] == {"unit_cartesian": True, "mult_cartesian": False}


def test_finite_free_monad():
    M = free_monad_if_finite(staircase(), 2)
    assert M.laws_verified
    with pytest.raises(ShapeError):
        free_monad_if_finite(p_bin(), 3)


def test_fold_through_maybe():
    M = maybe_monad()
    t = node_term("u", [node_term("u", [eta_term(0)])])
    op, leaves = fold_ptree(M, t)
    assert op == "u" and len(leaves) == 1
    op, leaves = fold_ptree(M, node_term("u", [node_term("c", [])]))
    assert op == "c" and leaves == {}


def test_free_forgetful_bijection():
    assert adjunction_check(p_unary(), maybe_monad(), 2)
    assert adjunction_check(p_unary(), identity_monad(1), 2)


def test_counit_maps_form_a_cocone():
    P = nilpotent()
    A = adamek_wtype(P).algebra
    e0 = counit_en(P, A, 0)
    assert e0.map.table == tuple(range(A.carrier.total.size))
    for n in range(3):
        step = mor_component(transition(P, n), A.carrier)
        assert compose_family_maps(counit_en(P, A, n + 1), step).map.table == counit_en(P, A, n).map.table
