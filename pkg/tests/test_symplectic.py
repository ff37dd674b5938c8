import numpy as np
import pytest

from spinorigami.symplectic import (
    DimensionError,
    EnumerationBoundError,
    HomologyClass,
    QuadForm2,
    RankError,
    SymplecticMap,
    arf,
    arf_by_majority,
    fixes_form,
    intersection_pairing,
    orbit_size_f2,
    quad_orbits_f2,
    quad_value,
    sp_order_f2,
    stabilizer_group_f2,
    symplectic_basis_from_unimodular,
    transvection,
)


def x(g: int, i: int) -> HomologyClass:
    return HomologyClass.x(g, i)


def y(g: int, i: int) -> HomologyClass:
    return HomologyClass.y(g, i)


def test_pairing_reference_basis():
    assert intersection_pairing(x(2, 1), y(2, 1)) == 1
    assert intersection_pairing(y(2, 1), x(2, 1)) == -1
    assert intersection_pairing(x(2, 1) + y(2, 2), y(2, 1) + x(2, 2)) == 0
    v = HomologyClass([3, -1, 4, 1])
    assert intersection_pairing(v, v) == 0


def test_pairing_dimension_mismatch():
    with pytest.raises(DimensionError):
        intersection_pairing(x(2, 1), x(3, 1))


def test_pairing_bilinear_random():
    rng = np.random.default_rng(11)
    for _ in range(200):
        u, v, w = (HomologyClass(rng.integers(-9, 10, size=6)) for _ in range(3))
        a, b = (int(t) for t in rng.integers(-9, 10, size=2))
        assert intersection_pairing(a * u + b * v, w) == a * intersection_pairing(
            u, w
        ) + b * intersection_pairing(v, w)
        assert intersection_pairing(u, v) == -intersection_pairing(v, u)


def test_transvection_examples():
    assert transvection(y(1, 1), 1)(x(1, 1)) == x(1, 1) + y(1, 1)
    c = HomologyClass([1, 2, -1, 0])
    assert transvection(c, 0) == SymplecticMap.identity(2)
    assert transvection(c, 2) @ transvection(c, 3) == transvection(c, 5)


def test_transvection_preserves_pairing():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        c, u, v = (HomologyClass(rng.integers(-9, 10, size=4)) for _ in range(3))
        e = int(rng.integers(-9, 10))
        t = transvection(c, e)
        assert intersection_pairing(t(u), t(v)) == intersection_pairing(u, v)


def test_symplectic_map_inverse():
    t = transvection(HomologyClass([1, 1, 0, 2]), 3)
    assert t.is_symplectic()
    assert t @ t.inverse() == SymplecticMap.identity(2)


def test_quad_value_polarization():
    q = QuadForm2([1, 0, 1, 1])
    assert quad_value(q, HomologyClass.zero(2)) == 0
    assert quad_value(q, x(2, 1) + y(2, 1)) == (1 + 0 + 1) % 2
    assert quad_value(q, x(2, 1) + x(2, 2)) == (1 + 1) % 2
    # Reduction mod 2 happens inside.
    assert quad_value(q, 3 * x(2, 1)) == quad_value(q, x(2, 1))


def test_arf_examples():
    assert arf(QuadForm2([0, 0, 0, 0])) == 0
    assert arf(QuadForm2([1, 1, 0, 0])) == 1
    even = [bits for bits in range(16) if arf(QuadForm2.from_bits(2, bits)) == 0]
    assert len(even) == 10


def test_arf_by_majority_adds_over_blocks():
    whole = [x(2, 1), y(2, 1), x(2, 2), y(2, 2)]
    for bits in range(16):
        q = QuadForm2.from_bits(2, bits)
        assert arf_by_majority(q, whole) == arf(q)
        head, tail = arf_by_majority(q, whole[:2]), arf_by_majority(q, whole[2:])
        assert (head + tail) % 2 == arf(q)
    assert arf_by_majority(QuadForm2([1, 1, 0, 0]), [x(2, 1), y(2, 1)]) == 1
    assert arf_by_majority(QuadForm2([1, 1, 0, 0]), [x(2, 2), y(2, 2)]) == 0


def test_arf_by_majority_needs_symplectic_block():
    q = QuadForm2([0, 0, 0, 0])
    with pytest.raises(RankError):
        arf_by_majority(q, [x(2, 1), x(2, 2)])
    with pytest.raises(RankError):
        arf_by_majority(q, [x(2, 1), x(2, 1)])
    with pytest.raises(DimensionError):
        arf_by_majority(q, [x(2, 1)])


@pytest.mark.parametrize("g,sizes", [(2, [6, 10]), (3, [28, 36])])
def test_two_orbits_constant_arf(g, sizes):
    orbits = quad_orbits_f2(g)
    assert sorted(len(o) for o in orbits) == sizes
    for orbit in orbits:
        assert len({arf(q) for q in orbit}) == 1


def test_sp_order():
    assert sp_order_f2(1) == 6
    assert sp_order_f2(2) == 720
    assert sp_order_f2(3) == 1451520


def test_stabilizer_genus_two_odd():
    q = QuadForm2([1, 1, 0, 0])
    group = stabilizer_group_f2(q)
    assert len(group) == 120
    assert len(group) * orbit_size_f2(q) == sp_order_f2(2)
    assert all(fixes_form(element, q) for element in group)


def test_stabilizer_genus_two_even_is_index_two():
    # O+(4, 2) is not generated by its transvections, they only reach half of it.
    q = QuadForm2([0, 0, 0, 0])
    group = stabilizer_group_f2(q)
    assert all(fixes_form(element, q) for element in group)
    assert len(group) == 36
    assert 2 * len(group) * orbit_size_f2(q) == sp_order_f2(2)


@pytest.mark.parametrize(
    "values,order",
    [
        ([0, 0, 0, 0, 0, 0], 40320),
        ([1, 1, 0, 0, 0, 0], 51840),
    ],
)
def test_stabilizer_genus_three(values, order):
    q = QuadForm2(values)
    group = stabilizer_group_f2(q)
    assert len(group) == order
    assert len(group) * orbit_size_f2(q) == sp_order_f2(3)


def test_stabilizer_bound():
    with pytest.raises(EnumerationBoundError):
        stabilizer_group_f2(QuadForm2([0] * 10))


def test_basis_from_reference():
    basis = [HomologyClass.basis(2, i) for i in range(4)]
    out, change = symplectic_basis_from_unimodular(basis)
    assert out == basis
    assert change == SymplecticMap.identity(2)


def _is_standard(basis):
    g = len(basis) // 2
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            expected = 0
            if j == i + 1 and i % 2 == 0:
                expected = 1
            elif i == j + 1 and j % 2 == 0:
                expected = -1
            if intersection_pairing(u, v) != expected:
                return False
    return len(basis) == 2 * g


@pytest.mark.parametrize(
    "vectors",
    [
        [x(2, 1), x(2, 1) + y(2, 1), x(2, 2), y(2, 2)],
        # Genus two chain: consecutive curves meet once.
        [x(2, 1), y(2, 1), x(2, 2) - x(2, 1), y(2, 2)],
    ],
)
def test_basis_from_unimodular(vectors):
    out, change = symplectic_basis_from_unimodular(vectors)
    assert _is_standard(out)
    assert change.is_symplectic()
    assert abs(round(np.linalg.det(change.matrix))) == 1


def test_basis_rejects_non_unimodular():
    with pytest.raises(RankError):
        symplectic_basis_from_unimodular([2 * x(2, 1), y(2, 1), x(2, 2), y(2, 2)])
    with pytest.raises(DimensionError):
        symplectic_basis_from_unimodular([x(2, 1), y(2, 1)])
