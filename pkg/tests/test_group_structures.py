import itertools
import json

import pytest

from iwalog.group_structures import (ACCEPTANCE_CATALOG, GroupValidationError, build_group, conjugacy_classes,
                                     group_to_json, transfer_exponent)

ALL = [(name, p) for p, names in ACCEPTANCE_CATALOG.items() for name in names]


def test_trivial_H():
    G = build_group("trivial_H", 3)
    assert G.order == 3
    assert sorted(P.order for P in G.subgroups) == [1, 3]


def _unitriangular_classes(p):
    def mul(a, b):
        return ((a[0] + b[0]) % p, (a[1] + b[1]) % p, (a[2] + b[2] + a[0] * b[1]) % p)

    els = list(itertools.product(range(p), repeat=3))
    inv = {a: next(b for b in els if mul(a, b) == (0, 0, 0)) for a in els}
    return len({frozenset(mul(mul(g, x), inv[g]) for g in els) for x in els})


def test_heisenberg_p3():
    G = build_group("heisenberg", 3)
    assert G.order == 27
    assert not G.is_abelian()
    assert G.ab_order == 9
    # oracle: upper unitriangular 3x3 matrices over F_3
    assert len(G.classes) == _unitriangular_classes(3) == 11


def test_dihedral8_classes():
    G = build_group("dihedral8", 2)
    assert G.order == 8 and len(G.classes) == 5


@pytest.mark.parametrize("name,p", ALL)
def test_group_tables(name, p):
    G = build_group(name, p)
    n = G.order
    for a, b, c in itertools.product(range(n), repeat=3):
        assert G.mul[G.mul[a][b]][c] == G.mul[a][G.mul[b][c]]
    # classes partition G and are conjugation orbits (brute-force oracle)
    assert sorted(g for c in G.classes for g in c) == list(range(n))
    for rep, cls in conjugacy_classes(G):
        assert set(cls) == {G.mul[G.mul[x][rep]][G.inv[x]] for x in range(n)}
    assert (0,) in G.classes
    if G.is_abelian():
        assert all(len(c) == 1 for c in G.classes)
    # C(G) is exactly the set of cyclic subgroups
    cyc = set()
    for g in range(n):
        els, r = {0}, g
        while r:
            els.add(r)
            r = G.mul[r][g]
        cyc.add(frozenset(els))
    assert {frozenset(P.elements) for P in G.subgroups} == cyc
    # coset representatives cover G exactly once
    for P in G.subgroups:
        reps = G.left_coset_reps(P.id)
        assert len(reps) == n // P.order
        cover = [G.mul[x][h] for x in reps for h in P.elements]
        assert sorted(cover) == list(range(n))


def test_transfer_exponent_examples():
    G = build_group("trivial_H", 3)
    full = G.subgroup_generated(G.index(0, 1)).id
    one = G.subgroup_of([0]).id
    assert transfer_exponent(G, G.index(0, 1), full, one) == (1, 0)
    assert transfer_exponent(G, 0, full, one) == (0, 0)
    H = build_group("cyclic_p", 3)
    h = H.index(1, 0)
    Ph = H.subgroup_generated(h).id
    assert transfer_exponent(H, h, Ph, H.subgroup_of([0]).id) == (0, 0)


def test_json_round_trip(tmp_path):
    G = build_group("heisenberg", 3)
    path = tmp_path / "g.json"
    path.write_text(json.dumps(group_to_json(G)))
    G2 = build_group(str(path))
    assert G2.mul == G.mul and G2.carry == G.carry


def _spec(**over):
    d = {"p": 2, "e": 1, "H_order": 2, "H_table": [[0, 1], [1, 0]], "gamma_action": [0, 1]}
    d.update(over)
    return d


@pytest.mark.parametrize("over,msg", [
    ({"H_order": 3, "H_table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]], "gamma_action": [0, 1, 2]}, "p-group"),
    ({"H_table": [[0, 1], [1, 1]]}, "inverses"),
    ({"gamma_action": [1, 0]}, "automorphism"),
    ({"p": 4}, "prime"),
    ({"H_table": [[0, 1], [1, 2]]}, "closure"),
])
def test_validation_errors(over, msg):
    with pytest.raises(GroupValidationError, match=msg):
        build_group(_spec(**over))


def test_sigma_order_must_divide_p_power():
    # sigma of order 3 on (Z/2)^2 with p = 2 fails the order check
    t = [[a ^ b for b in range(4)] for a in range(4)]
    with pytest.raises(GroupValidationError, match="order"):
        build_group({"p": 2, "e": 1, "H_order": 4, "H_table": t, "gamma_action": [0, 2, 3, 1]})
