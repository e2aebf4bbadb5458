import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cbfourier.catalog import construct_builtin
from cbfourier.errors import NotAGroup
from cbfourier.groups import (
    ElementSet,
    PartialMap,
    alternating_group,
    automorphisms,
    build_group,
    cyclic_group,
    dihedral_group,
    direct_product,
    element_set,
    enumerate_cosets,
    enumerate_subgroups,
    is_affine,
    is_coset,
    is_group_homomorphism,
    is_isomorphism,
    is_subgroup,
    product_index,
    quaternion_group,
    subgroup_closure,
    symmetric_group,
    trivial_group,
)

GROUPS = construct_builtin()
SMALL = [G for G in GROUPS if G.order <= 8]


def brute_cosets(G):
    """Cosets as left translates of brute-force subgroups (closure of every subset)."""
    subs = set()
    for r in range(1, G.order + 1):
        for S in itertools.combinations(range(G.order), r):
            s = set(S)
            if G.identity in s and all(G.mul(a, G.inv(b)) in s for a in s for b in s):
                subs.add(frozenset(s))
    return {frozenset(G.mul(g, h) for h in K) for K in subs for g in range(G.order)}, subs


def test_build_group_z3():
    G = build_group([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert G.order == 3 and G.identity == 0
    assert list(G.inverses) == [0, 2, 1]


def test_non_associative_latin_square():
    # Latin square with identity 0 that is not associative
    table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(NotAGroup) as exc:
        build_group(table, "bad")
    assert exc.value.axiom == "associativity"


@pytest.mark.parametrize("table,axiom", [
    ([[0, 1], [1, 1]], None),
    ([[0, 1, 2], [1, 0, 0], [2, 0, 1]], None),
    ([[0, 1], [2, 0]], None),
])
def test_bad_tables(table, axiom):
    with pytest.raises(NotAGroup):
        build_group(table)


def test_orders_and_abelian():
    names = {G.name: G for G in GROUPS}
    assert [G.order for G in GROUPS] == [1, 2, 3, 4, 4, 5, 6, 6, 8, 8, 8, 8, 8, 12, 12]
    assert not names["S3"].is_abelian() and not names["D4"].is_abelian()
    assert not names["Q8"].is_abelian() and not names["A4"].is_abelian()
    assert names["Z4xZ2"].is_abelian()
    assert sorted(names["Q8"].element_orders()) == [1, 2, 4, 4, 4, 4, 4, 4]
    assert sorted(names["D4"].element_orders()) == [1, 2, 2, 2, 2, 2, 4, 4]
    assert max(names["A4"].element_orders()) == 3


def test_direct_product_encoding():
    G, H = cyclic_group(3), cyclic_group(2)
    GH = direct_product(G, H)
    for g1, h1, g2, h2 in itertools.product(range(3), range(2), range(3), range(2)):
        a, b = product_index(G, H, g1, h1), product_index(G, H, g2, h2)
        assert GH.mul(a, b) == product_index(G, H, (g1 + g2) % 3, (h1 + h2) % 2)


@pytest.mark.parametrize("G", SMALL, ids=lambda G: G.name)
def test_coset_test_matches_brute_force(G):
    cosets, subs = brute_cosets(G)
    for r in range(1, G.order + 1):
        for S in itertools.combinations(range(G.order), r):
            C = ElementSet(G, S)
            assert bool(is_coset(C)) == (frozenset(S) in cosets)
            assert is_subgroup(C) == (frozenset(S) in subs)
    assert {frozenset(C.members) for C in enumerate_cosets(G)} == cosets
    assert {frozenset(K.members) for K in enumerate_subgroups(G)} == subs


def test_empty_set_is_not_a_coset():
    assert not is_coset(ElementSet(cyclic_group(4), ()))


def test_coset_subgroup_returned():
    G = cyclic_group(6)
    res = is_coset(element_set(G, [1, 3, 5]))
    assert res and set(res.subgroup.members) == {0, 2, 4}
    bad = is_coset(element_set(G, [0, 1]))
    assert not bad and bad.witness is not None
    r, s, t = bad.witness
    assert G.prod(r, G.inv(s), t) not in {0, 1}


def test_subgroup_closure():
    S4 = symmetric_group(4)
    assert len(subgroup_closure(S4, [1])) in (2, 3, 4)
    assert len(subgroup_closure(S4, range(S4.order))) == 24


@pytest.mark.parametrize("G,count", [(cyclic_group(4), 2), (direct_product(cyclic_group(2), cyclic_group(2)), 6),
                                     (symmetric_group(3), 6), (dihedral_group(4), 8),
                                     (quaternion_group(), 24), (cyclic_group(5), 4)])
def test_automorphism_counts(G, count):
    auts = automorphisms(G)
    assert len(auts) == count
    assert list(auts[0]) == list(range(G.order))
    for a in auts:
        assert is_isomorphism(G, G, a)


def test_alternating_group_has_no_order_six_subgroup():
    A4 = alternating_group(4)
    assert 6 not in {len(K) for K in enumerate_subgroups(A4)}


def test_trivial_group():
    T = trivial_group()
    assert T.order == 1 and is_subgroup(ElementSet(T, (0,)))


# -- partial maps ------------------------------------------------------------

def brute_affine(pm):
    G, H = pm.target, pm.source
    d = pm.mapping
    Y = list(d)
    if not Y:
        return False
    closed = all(H.prod(r, H.inv(s), t) in d for r in Y for s in Y for t in Y)
    return closed and all(d[H.prod(r, H.inv(s), t)] == G.prod(d[r], G.inv(d[s]), d[t])
                          for r in Y for s in Y for t in Y)


def partial_maps(H, G):
    return st.lists(st.integers(-1, G.order - 1), min_size=H.order, max_size=H.order).map(
        lambda a: PartialMap.from_array(H, G, a))


PAIRS = [(cyclic_group(4), cyclic_group(2)), (symmetric_group(3), cyclic_group(3)),
         (cyclic_group(2), symmetric_group(3)), (dihedral_group(4), direct_product(cyclic_group(2), cyclic_group(2)))]


@pytest.mark.parametrize("H,G", PAIRS, ids=lambda g: g.name)
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_affine_matches_definition(H, G, data):
    pm = data.draw(partial_maps(H, G))
    res = is_affine(pm)
    assert bool(res) == brute_affine(pm)
    if res:
        # witness: alpha(s0 t) = alpha(s0) beta(t) with beta a homomorphism
        w = res.witness
        for t, b in w.homomorphism.items():
            assert pm(H.mul(w.anchor_source, t)) == G.mul(w.anchor_target, b)


@pytest.mark.parametrize("H,G", PAIRS, ids=lambda g: g.name)
@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_homomorphism_matches_definition(H, G, data):
    pm = data.draw(partial_maps(H, G))
    d = pm.mapping
    Y = set(d)
    expected = bool(Y) and H.identity in Y and brute_affine(pm) and d[H.identity] == G.identity
    assert is_group_homomorphism(pm) == expected


def test_partial_map_round_trip():
    H, G = cyclic_group(4), cyclic_group(2)
    pm = PartialMap.from_dict(H, G, {0: 0, 2: 1})
    assert list(pm.as_array()) == [0, -1, 1, -1]
    assert PartialMap.from_array(H, G, pm.as_array()).as_dict() == {0: 0, 2: 1}
    assert pm(2) == 1 and set(pm.image_set().members) == {0, 1}


def test_sign_map_is_a_homomorphism():
    S3, Z2 = symmetric_group(3), cyclic_group(2)
    sign = {}
    perms = sorted(itertools.permutations(range(3)))
    for i, p in enumerate(perms):
        inv = sum(p[a] > p[b] for a in range(3) for b in range(a + 1, 3))
        sign[i] = inv % 2
    assert is_group_homomorphism(PartialMap.from_dict(S3, Z2, sign))
