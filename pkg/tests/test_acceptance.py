"""Acceptance criteria.  Each test prints one ``[PASS]``/``[FAIL]`` line; a
summary of all lines is appended to the pytest report."""

import itertools
import random
import time
from fractions import Fraction
from math import factorial

from oracles import bell_compose, eval_size, hom_corolla_count, leafless_counts, tree_count, tree_profile

from polyop import finset
from polyop.dendroidal import (
    active_inert_factorize,
    classify,
    monad_maps,
    nerve_presheaf,
    omega_compose,
    omega_hom,
    omega_isos,
    segal_check,
    segal_domain,
    segal_to_monad,
)
from polyop.finset import FiniteMap, FiniteSet, is_pullback_square
from polyop.freemonad import Chain, FreeMonadView, pn_chain, term_colour, term_leaves, transition
from polyop.lambek import adamek_wtype, check_pca, random_instance
from polyop.poly import (
    Composite,
    Family,
    FamilyMap,
    Polynomial,
    composite_eval_iso,
    evaluate,
    evaluate_map,
    family_maps,
    hom_poly,
    identity_poly,
    materialize,
    mor_component,
    pushforward_pullback_counit,
    pushforward_pullback_unit,
    validate_mor,
)
from polyop.samples import constant, identity_monad, maybe_monad, nilpotent, p_bin, p_unary, staircase, two_colour
from polyop.species import (
    PowerSeries,
    SymSeq,
    compose_card,
    htpy_eval_card,
    ogf_of_polynomial,
    polynomial_substitute,
    series_substitute,
    set_eval_card,
)
from polyop.tree import corolla, enumerate_trees, eta

# frozen values produced by tests/oracles.py (tree_count on P_bin)
P_BIN_TREE_COUNTS = (1, 3, 11, 123)


# --------------------------------------------------------------------------
# criterion 1


def _shaped(n_in, n_out, arities, shift=0):
    s, p = [], []
    for b, n in enumerate(arities):
        for _ in range(n):
            s.append((len(s) + shift) % n_in)
            p.append(b)
    t = [(b + shift) % n_out for b in range(len(arities))]
    return Polynomial.from_tables(n_in, len(s), len(arities), n_out, s, p, t)


def _all_shapes():
    for n_in, n_out, n_ops in itertools.product(range(1, 4), repeat=3):
        for arities in itertools.combinations_with_replacement(range(4), n_ops):
            yield n_in, n_out, arities


def _families(n_colours, max_total=3):
    for sizes in itertools.product(range(max_total + 1), repeat=n_colours):
        if sum(sizes) <= max_total:
            yield sizes


PANEL = ((0, 1, 2), (1, 1), (0,))


def _check_composite(Q, P, sizes):
    X = Family.from_sizes(P.I, sizes)
    iso = composite_eval_iso(Q, P, X)
    expected = eval_size(Q, eval_size(P, sizes))
    assert iso.map.is_bijective
    assert iso.dst.sizes() == expected
    assert iso.src.sizes() == expected


def test_criterion_1_composition_oracle(criterion):
    with criterion(1, "evaluate(Q∘P, X) ≅ Q(P(X)) by an explicit bijection over the shape grid"):
        start = time.time()
        triples = 0
        shapes = list(_all_shapes())
        for n_in, n_out, arities in shapes:
            P = _shaped(n_in, n_out, arities)
            for q_arities, q_out in itertools.product(PANEL, range(1, 4)):
                Q = _shaped(n_out, q_out, q_arities, shift=1)
                for sizes in _families(n_in):
                    _check_composite(Q, P, sizes)
                    triples += 1
        for n_in, n_out, arities in shapes:
            Q = _shaped(n_in, n_out, arities)
            for p_arities, p_in in itertools.product(PANEL, range(1, 4)):
                P = _shaped(p_in, n_in, p_arities, shift=1)
                for sizes in _families(p_in):
                    _check_composite(Q, P, sizes)
                    triples += 1
        assert len(shapes) == 306
        assert triples > 50000
        assert time.time() - start < 60


# --------------------------------------------------------------------------
# criterion 2


def _profile_from_trees(view, h):
    P = view.P
    counts = {}
    for t in view.trees(h):
        key = (P.I.index(term_colour(P, t)), len(term_leaves(P, t)))
        counts[key] = counts.get(key, 0) + 1
    return counts


def _profile_from_chain(P, h):
    F = materialize(pn_chain(P, h))
    counts = {}
    for b in range(F.B.size):
        key = (F.t(b), F.arities[b])
        counts[key] = counts.get(key, 0) + 1
    return counts


def _profile_from_oracle(P, h):
    return {(c, n): k for c, prof in enumerate(tree_profile(P, h)) for n, k in prof.items()}


def test_criterion_2_free_monad_two_ways(criterion):
    with criterion(2, "P-tree counts per colour and arity equal pn_chain B-data for h ≤ 3"):
        start = time.time()
        for P in (p_bin(), p_unary(), two_colour()):
            view = FreeMonadView(P)
            for h in range(4):
                by_trees = _profile_from_trees(view, h)
                by_chain = _profile_from_chain(P, h)
                assert by_trees == by_chain, (h, by_trees, by_chain)
                assert by_trees == _profile_from_oracle(P, h)
        view = FreeMonadView(p_bin())
        counts = tuple(len(view.trees(h)) for h in range(4))
        chain_counts = tuple(materialize(pn_chain(p_bin(), h)).B.size for h in range(4))
        assert counts == chain_counts == P_BIN_TREE_COUNTS
        assert tuple(tree_count(p_bin(), h) for h in range(4)) == P_BIN_TREE_COUNTS
        assert time.time() - start < 30


# --------------------------------------------------------------------------
# criterion 3


def _leafless_by_colour(P, height):
    view = FreeMonadView(P)
    counts = [0] * P.I.size
    for t in view.trees(height):
        if not term_leaves(P, t):
            counts[P.I.index(term_colour(P, t))] += 1
    return counts


def test_criterion_3_wtype_stabilization(criterion):
    with criterion(3, "W-types: constant B₀, identity ↦ ∅, nilpotent 2-colour matches leafless trees"):
        for k in range(0, 4):
            w = adamek_wtype(constant(k))
            assert w.iterations <= 2
            assert w.family.total.size == k
        for colours in (1, 2, 3):
            w = adamek_wtype(identity_poly(FiniteSet(colours)))
            assert w.family.total.size == 0
        P = nilpotent()
        w = adamek_wtype(P)
        assert hasattr(w, "algebra")
        direct = _leafless_by_colour(P, w.iterations + 2)
        assert w.family.sizes() == direct
        assert direct == leafless_counts(P, w.iterations + 2)
        S = staircase()
        assert adamek_wtype(S).family.sizes() == _leafless_by_colour(S, 5)


# --------------------------------------------------------------------------
# criterion 4


def test_criterion_4_mu_coherence(criterion):
    with criterion(4, "both μ_{m,n} squares commute elementwise on P_bin for m, n ≤ 2"):
        ch = Chain(p_bin())
        for m, n in itertools.product(range(3), repeat=2):
            rep = ch.mu_squares(m, n)
            assert rep.ok, (m, n, rep.failures)
            assert rep.data["domain_ops"] > 0


# --------------------------------------------------------------------------
# criterion 5


def test_criterion_5_twisting_bijection(criterion):
    with criterion(5, "Tw(PC, A) ≅ Tw(C, A) on seeded random instances"):
        rng = random.Random(20240517)
        checked = 0
        nonempty = 0
        for P in (p_bin(), p_unary(), two_colour(), maybe_monad().P):
            for _ in range(8):
                C, A = random_instance(P, rng, max_size=3)
                assert C.carrier.total.size <= 3 and A.carrier.total.size <= 3
                rep = check_pca(P, C, A)
                assert rep.ok, rep.failures
                checked += 1
                nonempty += rep.data["tw_c"] > 0
        assert checked >= 20
        assert nonempty > 0


# --------------------------------------------------------------------------
# criterion 6


def test_criterion_6_omega_structure(criterion):
    with criterion(6, "Ω: Hom(η,T) = edges, corolla homs = n!·#ops, active/inert factorization"):
        start = time.time()
        for T in enumerate_trees(4, 4):
            assert len(omega_hom(eta(), T)) == T.n_edges
        for P in (p_bin(), p_unary(), two_colour(), nilpotent(), staircase(), maybe_monad().P):
            for n in range(5):
                assert len(hom_poly(corolla(n).poly, P)) == hom_corolla_count(P, n)

        trees = enumerate_trees(3, 3)
        homs = {(a, b): omega_hom(S, T) for a, S in enumerate(trees) for b, T in enumerate(trees)}
        inert_in = {k: [g.edge_map for g in fs if classify(g).inert] for k, fs in homs.items()}
        active_in = {k: [g.edge_map for g in fs if classify(g).active] for k, fs in homs.items()}
        iso_cache = {}
        alternatives = 0
        for (a, b), fs in homs.items():
            for f in fs:
                act, ine = active_inert_factorize(f)
                assert classify(act).active and classify(ine).inert
                assert omega_compose(ine, act).edge_map == f.edge_map
                # any other active-then-inert factorization through a listed tree has an isomorphic middle
                mid = act.dst
                for c, M in enumerate(trees):
                    if M.n_edges != mid.n_edges:
                        continue
                    for i2 in inert_in[c, b]:
                        for a2 in active_in[a, c]:
                            if tuple(i2[x] for x in a2) != f.edge_map:
                                continue
                            alternatives += 1
                            key = (mid.poly, c)
                            if key not in iso_cache:
                                iso_cache[key] = [phi.edge_map for phi in omega_isos(mid, M)]
                            assert any(
                                tuple(phi[x] for x in act.edge_map) == a2
                                and tuple(i2[x] for x in phi) == ine.edge_map
                                for phi in iso_cache[key]
                            )
        assert alternatives > sum(len(fs) for fs in homs.values())
        assert time.time() - start < 120


# --------------------------------------------------------------------------
# criterion 7


def test_criterion_7_nerve_segal(criterion):
    with criterion(7, "nerves of identity, maybe and F_2(P_bin) are Segal; maybe round-trips"):
        every = enumerate_trees(4, 4)
        for M in (identity_monad(), maybe_monad()):
            phi = nerve_presheaf(M, every)
            for T in every:
                assert segal_check(phi, T).ok
        small = enumerate_trees(4, 3)
        free = (FreeMonadView(p_bin()), 2)
        phi = nerve_presheaf(free, small)
        for T in small:
            assert segal_check(phi, T).ok
        wide = enumerate_trees(3, 5)
        phi = nerve_presheaf(free, wide)
        for T in wide:
            assert segal_check(phi, T).ok

        M = maybe_monad()
        rebuilt = segal_to_monad(nerve_presheaf(M, segal_domain(2)), 2)
        assert rebuilt.laws_verified
        assert any(m.is_iso for m in monad_maps(M, rebuilt))


# --------------------------------------------------------------------------
# criterion 8


def test_criterion_8_species_numerics(criterion):
    with criterion(8, "Faà di Bruno, E₂ set vs groupoid count, OGF of composites"):
        rng = random.Random(8)
        for _ in range(25):
            g = [rng.randint(0, 5) for _ in range(7)]
            f = [0] + [rng.randint(0, 5) for _ in range(6)]
            G = PowerSeries([Fraction(c, factorial(k)) for k, c in enumerate(g)])
            F = PowerSeries([Fraction(c, factorial(k)) for k, c in enumerate(f)])
            h = series_substitute(G, F)
            for n in range(7):
                card = compose_card(g, f, n)
                assert card == bell_compose(g, f, n)
                assert Fraction(card, factorial(n)) == h[n]
        E2 = SymSeq.trivial([0, 0, 1])
        assert set_eval_card(E2, 2) == 3
        assert htpy_eval_card(E2, 2) == 2
        profiles = [a for k in range(1, 4) for a in itertools.combinations_with_replacement(range(5), k)]
        profiles = [a for a in profiles if sum(a) <= 4]
        for qa, pa in itertools.product(profiles, repeat=2):
            Q, P = _shaped(1, 1, qa), _shaped(1, 1, pa)
            composite = materialize(Composite(Q, P))
            lhs = ogf_of_polynomial(composite)
            rhs = polynomial_substitute(ogf_of_polynomial(Q), ogf_of_polynomial(P))
            assert lhs.coeffs == rhs.truncate(lhs.order).coeffs
            assert all(c == 0 for c in rhs.coeffs[lhs.order + 1 :])


# --------------------------------------------------------------------------
# criterion 9


def _families_over(base, max_total=3):
    return [Family.from_sizes(base, sizes) for sizes in _families(base.size, max_total)]


def _square_is_cartesian(alpha_x: FamilyMap, alpha_y: FamilyMap, h_top: FamilyMap, h_bottom: FamilyMap) -> bool:
    """``F(X) -> G(X)`` over ``F(Y) -> G(Y)``: top is ``F(h)``, right is ``G(h)``."""
    return is_pullback_square(alpha_x.map, h_top.map, h_bottom.map, alpha_y.map)


def _natural_cartesian(P, m, families):
    for X, Y in itertools.product(families, repeat=2):
        for h in family_maps(X, Y):
            PX, PY = evaluate(m.src, X), evaluate(m.src, Y)
            QX, QY = evaluate(m.dst, X), evaluate(m.dst, Y)
            ax, ay = mor_component(m, X, PX, QX), mor_component(m, Y, PY, QY)
            if not _square_is_cartesian(ax, ay, evaluate_map(m.src, h, PX, PY), evaluate_map(m.dst, h, QX, QY)):
                return False
    return True


def test_criterion_9_cartesian_battery(criterion):
    with criterion(9, "units/counits of f_!⊣f*, chain transitions, free unit/mult are cartesian"):
        for n_i, n_j in itertools.product(range(1, 3), repeat=2):
            I, J = FiniteSet(n_i), FiniteSet(n_j)
            for f in finset.hom_set(I, J):
                fams_i = _families_over(I)
                for X, Y in itertools.product(fams_i, repeat=2):
                    for h in family_maps(X, Y):
                        ux, uy = pushforward_pullback_unit(f, X), pushforward_pullback_unit(f, Y)
                        fh = _pullpush_map(f, h, ux.dst, uy.dst)
                        assert is_pullback_square(h.map, ux.map, uy.map, fh.map)
                fams_j = _families_over(J)
                for X, Y in itertools.product(fams_j, repeat=2):
                    for h in family_maps(X, Y):
                        cx, cy = pushforward_pullback_counit(f, X), pushforward_pullback_counit(f, Y)
                        fh = _pushpull_map(f, h, cx.src, cy.src)
                        assert is_pullback_square(fh.map, cx.map, cy.map, h.map)

        for P in (p_bin(), two_colour()):
            for h in range(3):
                m = transition(P, h)
                assert validate_mor(m).ok
                fams = _families_over(P.I)
                assert _natural_cartesian(P, m, fams)
        for P in (p_bin(), two_colour()):
            view = FreeMonadView(P)
            fams = _families_over(P.I)
            for h in range(3):
                assert validate_mor(view.unit(h)).ok
                assert _natural_cartesian(P, view.unit(h), fams)
            for a, b in ((0, 1), (1, 0), (1, 1)):
                fn = view.mult_fn(a, b)
                mult = fn.realize()
                assert validate_mor(mult).ok
                assert _natural_cartesian(P, mult, fams)


def _pullpush_map(f: FiniteMap, h: FamilyMap, src: Family, dst: Family) -> FamilyMap:
    """``f^* f_! h`` between the given realizations (labels ``(i, x)``)."""
    return FamilyMap(src, dst, FiniteMap.from_labels(src.total, dst.total, lambda ix: (ix[0], h.dst.total.label(h(h.src.total.index(ix[1]))))))


def _pushpull_map(f: FiniteMap, h: FamilyMap, src: Family, dst: Family) -> FamilyMap:
    """``f_! f^* h`` between the given realizations (labels ``(i, y)``)."""
    return FamilyMap(src, dst, FiniteMap.from_labels(src.total, dst.total, lambda iy: (iy[0], h.dst.total.label(h(h.src.total.index(iy[1]))))))
