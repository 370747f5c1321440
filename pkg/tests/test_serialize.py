import json

import pytest

from polyop import serialize as ser
from polyop.dendroidal import element_inclusions, nerve_presheaf, segal_check
from polyop.samples import maybe_monad, two_colour
from polyop.species import SymSeq
from polyop.tree import canonical_form, from_nested


def through_json(doc):
    return json.loads(ser.dumps(doc))


def test_polynomial_round_trip():
    P = two_colour()
    Q = ser.poly_from_json(through_json(ser.poly_to_json(P)))
    assert Q == P


def test_tree_round_trip_and_cached_fields():
    T = from_nested(((None, None), None))
    doc = through_json(ser.tree_to_json(T))
    assert canonical_form(ser.tree_from_json(doc)) == canonical_form(T)
    doc["height"] = 7
    with pytest.raises(ser.InputError, match="height"):
        ser.tree_from_json(doc)


def test_monad_round_trip():
    M = ser.monad_from_json(through_json(ser.monad_to_json(maybe_monad())))
    assert M.laws_verified and M.P.arities == maybe_monad().P.arities


def test_presheaf_round_trip_keeps_segal():
    trees = [from_nested(None), from_nested((None,)), from_nested(((None,),))]
    phi = nerve_presheaf(maybe_monad(), trees)
    morphisms = [f for T in trees for part in element_inclusions(T) for f in part]
    back = ser.presheaf_from_json(through_json(ser.presheaf_to_json(phi, morphisms)))
    assert [v.size for v in back.values] == [v.size for v in phi.values]
    assert segal_check(back, back.trees[2])


def test_symseq_round_trip():
    S = SymSeq.regular([1, 1, 2])
    assert ser.symseq_from_json(through_json(ser.symseq_to_json(S))) == S


def test_kind_detection_and_schema_checks():
    assert ser.detect_kind({"sample": "maybe"}) == "monad"
    assert ser.detect_kind({"sample": "p_bin"}) == "polynomial"
    assert ser.detect_kind({"nested": None}) == "tree"
    with pytest.raises(ser.InputError):
        ser.detect_kind([1, 2])
    with pytest.raises(ser.InputError, match="schema_version"):
        ser.tree_from_json({"kind": "tree", "schema_version": 99, "nested": None})
    with pytest.raises(ser.InputError, match="unknown sample"):
        ser.poly_from_json({"sample": "nope"})
