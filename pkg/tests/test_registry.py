import json

import pytest
from hypothesis import given, strategies as st

from f1kgw.abgroup import AffineInvolution, FgAbGroup, direct_sum, involution_fixed_and_orbits
from f1kgw.errors import DescriptorMismatch, InfiniteIndex
from f1kgw.invariants_registry import (AbGroupElements, FiniteList, FinSuppMap, FixedCosetIndex, OrbitIndex,
                                       Product, descriptor_from_json, group_ring_unit)

Z = FgAbGroup.free(1)
Z2Z = direct_sum([FgAbGroup.cyclic(2), FgAbGroup.free(1)])[0]


def zmap(d):
    return FinSuppMap(AbGroupElements(Z), {(k,): c for k, c in d.items()})


def test_add_negate():
    x = zmap({0: 2, 3: -1})
    assert (x + (-x)).is_zero()
    o1 = zmap({1: 1})
    assert o1 + o1 == zmap({1: 2})


def test_zero_coefficients_dropped():
    x = FinSuppMap(AbGroupElements(Z), [((1,), 2), ((1,), -2), ((0,), 0)])
    assert x.terms == {}


def test_orbit_canonicalization():
    _, orbits = involution_fixed_and_orbits(AffineInvolution.negation(Z))
    d = OrbitIndex(orbits)
    x = FinSuppMap.indicator(d, (-2,))
    assert x == FinSuppMap.indicator(d, (2,))
    assert x.support() == [(2,)]


def test_fixed_index_rejects_moved_points():
    fixed, _ = involution_fixed_and_orbits(AffineInvolution.negation(FgAbGroup.cyclic(4)))
    d = FixedCosetIndex(fixed)
    assert sorted(d.enumerate()) == [(0,), (2,)]
    assert not d.contains((1,))


def test_descriptor_mismatch():
    x = zmap({0: 1})
    y = FinSuppMap(AbGroupElements(FgAbGroup.cyclic(2)), [((0,), 1)])
    with pytest.raises(DescriptorMismatch):
        x + y
    with pytest.raises(DescriptorMismatch):
        x.convolve(y)
    f = FinSuppMap(FiniteList(["a", "b"]), [("a", 1)])
    with pytest.raises(DescriptorMismatch):
        f.convolve(f)


def test_infinite_enumeration_refused():
    with pytest.raises(InfiniteIndex):
        AbGroupElements(Z).enumerate()
    assert len(Product([FiniteList([1, 2]), AbGroupElements(FgAbGroup.cyclic(3))]).enumerate()) == 6


def test_convolution_examples():
    assert zmap({2: 1}) * zmap({5: 1}) == zmap({7: 1})
    s = zmap({0: 1, 1: 1})
    assert s * s == zmap({0: 1, 1: 2, 2: 1})
    assert group_ring_unit(Z) == zmap({0: 1})


def test_torsion_convolution_wraps():
    d = AbGroupElements(FgAbGroup.cyclic(3))
    x = FinSuppMap.indicator(d, (2,))
    assert x * x == FinSuppMap.indicator(d, (1,))


def elements_of(G):
    if G is Z:
        return st.tuples(st.integers(-4, 4))
    return st.tuples(st.integers(0, 1), st.integers(-4, 4))


def maps(G):
    d = AbGroupElements(G)
    return st.lists(st.tuples(elements_of(G), st.integers(-3, 3)), max_size=5).map(lambda t: FinSuppMap(d, t))


@pytest.mark.parametrize("G", [Z, Z2Z], ids=["Z", "Z2xZ"])
def test_ring_laws(G):
    @given(maps(G), maps(G), maps(G))
    def inner(x, y, z):
        assert x * y == y * x
        assert (x * y) * z == x * (y * z)
        assert x * group_ring_unit(G) == x
        assert x * (y + z) == x * y + x * z
        assert (x * y).rank() == x.rank() * y.rank()
    inner()


def product_oracle(x, y, add):
    # dense accumulation by explicit double loop
    acc = {}
    for a, c in x.terms.items():
        for b, e in y.terms.items():
            k = add(a, b)
            acc[k] = acc.get(k, 0) + c * e
    return {k: v for k, v in acc.items() if v}


@given(maps(Z2Z), maps(Z2Z))
def test_convolution_matches_dense_oracle(x, y):
    assert (x * y).terms == product_oracle(x, y, Z2Z.add)


@given(maps(Z2Z))
def test_json_round_trip_bit_exact(x):
    s = json.dumps(x.to_json())
    y = FinSuppMap.from_json(json.loads(s))
    assert y == x
    assert json.dumps(y.to_json()) == s


def test_json_key_order_lexicographic():
    x = zmap({3: 1, -2: 4, 0: 1})
    assert [k for k, _ in x.to_json()["terms"]] == [[-2], [0], [3]]


@pytest.mark.parametrize("d", [
    FiniteList(["a", "b"]),
    AbGroupElements(Z2Z),
    OrbitIndex(involution_fixed_and_orbits(AffineInvolution.negation(Z, (1,)))[1]),
    Product([FiniteList([0, 1]), AbGroupElements(Z)]),
])
def test_descriptor_json_round_trip(d):
    assert descriptor_from_json(json.loads(json.dumps(d.to_json()))) == d


@given(st.integers(-20, 20))
def test_canonicalization_idempotent(k):
    _, orbits = involution_fixed_and_orbits(AffineInvolution.negation(Z, (1,)))
    d = OrbitIndex(orbits)
    c = d.canonical((k,))
    assert d.canonical(c) == c
    assert c in [(k,), (1 - k,)]
