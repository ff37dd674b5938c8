import pytest

from spinorigami.humphries import chain_relation, humphries_curves, humphries_system, realize
from spinorigami.origami import genus, homology_class, stratum, turning_number
from spinorigami.spin import (
    ChainIndexError,
    ChainSpin,
    StateSpaceError,
    all_orbits,
    chain_arf,
    chain_twist,
    count_by_arf,
    orbit,
)
from spinorigami.symplectic import HomologyClass, intersection_pairing
from spinorigami.thurstonveech import ParameterError


@pytest.mark.parametrize("g", [2, 3, 4, 5, 6])
def test_humphries_configuration(g):
    o = realize(g).origami
    assert genus(o) == g
    curves = humphries_curves(g)
    assert len(curves) == 2 * g + 1
    classes = [homology_class(o, c) for c in curves]
    for i in range(1, 2 * g):
        assert abs(intersection_pairing(classes[i], classes[i + 1])) == 1
    assert abs(intersection_pairing(classes[0], classes[4])) == 1
    for i in (1, 2, 3):
        assert intersection_pairing(classes[0], classes[i]) == 0
    for c in curves[1:]:
        assert turning_number(o, c) == 0


@pytest.mark.parametrize("g", [2, 3, 4, 5])
def test_c0_on_the_chain(g):
    relation = chain_relation(g)
    total = HomologyClass.zero(g)
    for t, h in zip(relation.coefficients, relation.classes[1:]):
        total = total + h * t
    assert total == relation.classes[0]


def test_humphries_needs_genus_two():
    with pytest.raises(ParameterError):
        realize(1)


def test_humphries_system_is_a_staircase():
    system = humphries_system(5)
    assert [c.name for c in system.curves] == [f"a{i}" for i in range(1, 10)] + ["b0"]
    assert [c.family for c in system.curves[:4]] == ["h", "v", "h", "v"]
    assert system.by_name["a9"].points == ("l8", "s8")
    o = realize(5).origami
    assert o.n == 9
    assert genus(o) == 5
    assert stratum(o) == [8]


@pytest.mark.parametrize(
    "g,r,sizes",
    [
        (2, 2, [6, 10]),
        (3, 2, [28, 36]),
        (3, 4, [1792, 2304]),
        (5, 2, [496, 528]),
    ],
)
def test_even_orbits_split_by_arf(g, r, sizes):
    relation = chain_relation(g)
    orbits = all_orbits(relation, r)
    assert sorted(len(members) for members in orbits) == sizes
    _, even, odd = count_by_arf(g, r)
    arfs = {}
    for members in orbits:
        values = {chain_arf(ChainSpin(relation=relation, r=r, free=m)) for m in members}
        assert len(values) == 1
        arfs[values.pop()] = len(members)
    assert arfs == {0: even, 1: odd}


@pytest.mark.parametrize("g,r", [(3, 1), (4, 3)])
def test_odd_modulus_single_orbit(g, r):
    orbits = all_orbits(chain_relation(g), r)
    assert len(orbits) == 1
    assert len(orbits[0]) == r ** (2 * g)


def test_twist_inverse():
    relation = chain_relation(3)
    state = ChainSpin(relation=relation, r=4, free=[1, 2, 3, 0, 1, 2])
    for j in range(7):
        assert chain_twist(chain_twist(state, j, 1), j, -1) == state
    with pytest.raises(ChainIndexError):
        chain_twist(state, 7, 1)


def test_orbit_contains_twists():
    relation = chain_relation(3)
    state = ChainSpin(relation=relation, r=2, free=[0] * 6)
    members = orbit(state)
    assert state in members
    for j in range(7):
        assert chain_twist(state, j, 1) in members
    with pytest.raises(StateSpaceError):
        orbit(state, max_states=10)


def test_reference_surface_stratum():
    for g in (2, 3, 4, 5):
        assert sum(stratum(realize(g).origami)) == 2 * g - 2
