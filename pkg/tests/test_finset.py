import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyop import finset
from polyop.errors import GuardExceeded, NotBijectiveError, NotInjectiveError, ShapeError
from polyop.finset import FiniteMap, FiniteSet, Subset


@st.composite
def maps(draw, max_dom=5, max_cod=5, cod=None):
    n = draw(st.integers(0, max_dom))
    m = cod if cod is not None else draw(st.integers(1, max_cod))
    table = draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)) if m else []
    return FiniteMap(FiniteSet(n), FiniteSet(m), tuple(table))


def test_labels_round_trip():
    A = FiniteSet.of(["a", ("b", 1), 3])
    assert A.size == 3
    assert A.index(("b", 1)) == 1
    assert A.label(2) == 3
    assert ("b", 1) in A and "z" not in A


def test_list_labels_freeze_to_tuples():
    A = FiniteSet.of([[1, [2, 3]]])
    assert A.label(0) == (1, (2, 3))


def test_duplicate_labels_rejected():
    with pytest.raises(ShapeError):
        FiniteSet.of(["a", "a"])


def test_negative_size_rejected():
    with pytest.raises(ShapeError):
        FiniteSet(-1)


def test_map_checks_codomain():
    with pytest.raises(ShapeError):
        FiniteMap(FiniteSet(2), FiniteSet(2), (0, 2))
    with pytest.raises(ShapeError):
        FiniteMap(FiniteSet(2), FiniteSet(2), (0,))


def test_from_labels():
    A = FiniteSet.of(["x", "y"])
    B = FiniteSet.of(["X", "Y"])
    f = FiniteMap.from_labels(A, B, str.upper)
    assert f.table == (0, 1)
    assert f.on_label("y") == "Y"


@given(maps(), st.data())
def test_compose_associative(f, data):
    g = FiniteMap(f.cod, FiniteSet(3), tuple(data.draw(st.integers(0, 2)) for _ in range(f.cod.size)))
    h = FiniteMap(g.cod, FiniteSet(2), tuple(data.draw(st.integers(0, 1)) for _ in range(3)))
    assert finset.compose(h, finset.compose(g, f)) == finset.compose(finset.compose(h, g), f)
    assert finset.compose(f, finset.identity(f.dom)) == f
    assert finset.compose(finset.identity(f.cod), f) == f


def test_compose_mismatch():
    f = FiniteMap(FiniteSet(1), FiniteSet(2), (1,))
    with pytest.raises(ShapeError):
        finset.compose(f, f)


@given(maps())
def test_fibers_partition_domain(f):
    fibs = finset.fibers(f)
    assert sorted(x for fib in fibs for x in fib) == list(range(f.dom.size))
    for b, fib in enumerate(fibs):
        assert finset.fiber(f, b).members == fib


@given(maps(max_dom=4, max_cod=3), st.data())
def test_pullback_universal_counts(f, data):
    g = data.draw(maps(max_dom=4, cod=f.cod.size))
    apex, pa, pb = finset.pullback(f, g)
    expected = sum(1 for a in range(f.dom.size) for b in range(g.dom.size) if f(a) == g(b))
    assert apex.size == expected
    assert finset.compose(f, pa) == finset.compose(g, pb)
    assert finset.is_pullback_square(pa, pb, f, g)


def test_pullback_labels_are_pairs():
    f = FiniteMap(FiniteSet.of(["a", "b"]), FiniteSet(1), (0, 0))
    g = FiniteMap(FiniteSet.of(["u"]), FiniteSet(1), (0,))
    apex, _, _ = finset.pullback(f, g)
    assert apex.all_labels() == (("a", "u"), ("b", "u"))


def test_pullback_square_detects_non_cartesian():
    # a square that commutes but whose apex is too small
    one, two = FiniteSet(1), FiniteSet(2)
    top = FiniteMap(one, two, (0,))
    left = FiniteMap(one, one, (0,))
    right = FiniteMap(two, one, (0, 0))
    bottom = FiniteMap(one, one, (0,))
    assert not finset.is_pullback_square(top, left, right, bottom)


def test_pushout_mono_glues():
    # C = {*} -> A = {0, 1} at 1, C -> D = {0, 1, 2} at 0
    f = FiniteMap(FiniteSet(1), FiniteSet(2), (1,))
    g = FiniteMap(FiniteSet(1), FiniteSet(3), (0,))
    apex, leg_a, leg_d = finset.pushout_mono(f, g)
    assert apex.size == 4
    assert leg_d.table == (0, 1, 2)
    assert leg_a.table == (3, 0)
    assert finset.compose(leg_a, f) == finset.compose(leg_d, g)


def test_pushout_needs_injective():
    f = FiniteMap(FiniteSet(2), FiniteSet(1), (0, 0))
    g = FiniteMap(FiniteSet(2), FiniteSet(2), (0, 1))
    with pytest.raises(NotInjectiveError):
        finset.pushout_mono(f, g)


def test_equalizer_and_coproduct():
    f = FiniteMap(FiniteSet(3), FiniteSet(2), (0, 1, 1))
    g = FiniteMap(FiniteSet(3), FiniteSet(2), (0, 0, 1))
    assert finset.equalizer(f, g).members == (0, 2)
    s, i, j = finset.coproduct(FiniteSet.of("ab"), FiniteSet.of("c"))
    assert s.all_labels() == ((0, "a"), (0, "b"), (1, "c"))
    assert j.table == (2,)
    assert i.is_injective and j.is_injective


def test_hom_set_order_and_guard():
    homs = finset.hom_set(FiniteSet(2), FiniteSet(2))
    assert [h.table for h in homs] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    with pytest.raises(GuardExceeded):
        finset.hom_set(FiniteSet(5), FiniteSet(5), guard=100)


def test_guard_env(monkeypatch):
    monkeypatch.setenv("POLYOP_GUARD", "7")
    assert finset.default_guard() == 7
    with pytest.raises(GuardExceeded):
        finset.hom_set(FiniteSet(3), FiniteSet(2))
    monkeypatch.setenv("POLYOP_GUARD", "lots")
    with pytest.raises(ShapeError):
        finset.default_guard()


def test_inverse_of_bijection():
    f = FiniteMap(FiniteSet(3), FiniteSet(3), (2, 0, 1))
    assert finset.compose(f.inverse(), f) == finset.identity(FiniteSet(3))
    with pytest.raises(NotBijectiveError):
        FiniteMap(FiniteSet(2), FiniteSet(2), (0, 0)).inverse()


def test_subset_checks_and_restrict():
    A = FiniteSet.of("abcd")
    sub = Subset(A, (1, 3))
    assert sub.as_set().all_labels() == ("b", "d")
    assert sub.inclusion().table == (1, 3)
    f = FiniteMap(A, FiniteSet(2), (0, 1, 0, 1))
    assert f.restrict(sub).table == (1, 1)
    with pytest.raises(ShapeError):
        Subset(A, (3, 1))
    with pytest.raises(ShapeError):
        Subset(A, (4,))


def test_image():
    f = FiniteMap(FiniteSet(3), FiniteSet(4), (3, 0, 3))
    assert f.image().members == (0, 3)


@pytest.mark.parametrize("n", range(1, 5))
def test_orbit_count_of_cycle(n):
    cycle = tuple((i + 1) % n for i in range(n))
    assert finset.orbit_count(FiniteSet(n), [cycle]) == 1
    assert finset.orbit_count(FiniteSet(n), []) == n


def test_orbit_count_matches_brute_force():
    X = FiniteSet(6)
    gens = [(1, 0, 2, 3, 5, 4)]
    seen, orbits = set(), 0
    for x in range(6):
        if x in seen:
            continue
        orbits += 1
        frontier = {x}
        while frontier:
            seen |= frontier
            frontier = {g[y] for y in frontier for g in gens} - seen
    assert finset.orbit_count(X, gens) == orbits == 4


def test_orbit_generators_must_be_bijections():
    with pytest.raises(NotBijectiveError):
        finset.orbit_count(FiniteSet(2), [(0, 0)])


def test_all_injections_counted():
    count = sum(1 for t in itertools.product(range(4), repeat=2) if len(set(t)) == 2)
    injective = [h for h in finset.hom_set(FiniteSet(2), FiniteSet(4)) if h.is_injective]
    assert len(injective) == count == 12


@settings(max_examples=30)
@given(st.integers(0, 4), st.integers(0, 4))
def test_unlabelled_forgets_labels(n, k):
    A = FiniteSet.of(range(n))
    assert A.unlabelled() == FiniteSet(n)
    assert finset.constant(FiniteSet(k), FiniteSet(1), 0).table == (0,) * k
