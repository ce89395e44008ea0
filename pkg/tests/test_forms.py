import json
import random
from itertools import permutations, product
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from f1kgw.builtins import builtin_scheme, form_from_json, named_duality, standard_data
from f1kgw.bundles import GenPermMatrix, pic, pn_line, tensor
from f1kgw.errors import InvalidDuality, InvalidForm, NotIntegral, NotIsotropic
from f1kgw.forms import (FormClass, SymForm, all_forms, brute_force_isometry_count, class_in_gw0, classify,
                         congruence, diag_form, gw0_monoid, gw0_scheme, hyperbolic, is_isometric, is_metabolic,
                         isometry_group_order, normal_form, parity_bijection_check, pic_involution, reduce_form,
                         spic, w0_cokernel_check, w0_monoid, w0_scheme)
from f1kgw.modcat import DualityDatum, negation_involution
from f1kgw.monoid import free, laurent, named_monoid
from f1kgw.scheme import projective_space, spec
from f1kgw.suite import metabolic_hyperbolic


def el(d, v):
    return d.monoid.parse_element(v)


EXTRA = {"F1Z3/neg/eps": named_duality("F1Z3", "neg", "[1]"), "F1Z4/id/eps": named_duality("F1Z4", "id", "[2]"),
         "F1[Z/2xZ/2]": named_duality("F1[Z/2xZ/2]"), "F1Z5/neg": named_duality("F1[Z/5]", "neg")}
DATA = {**standard_data(), **EXTRA}


def brute_orbits(d):
    """Twisted conjugation orbits of eps-symmetric units, by direct enumeration."""
    A, s = d.monoid, d.sigma
    units = A.units().elements()
    sym = [x for x in units if x == A.mul(d.epsilon, s(x))]
    orbits = []
    for x in sym:
        if any(x in o for o in orbits):
            continue
        orbits.append({A.mul(A.mul(u, x), s(u)) for u in units})
    return orbits


# ---------------------------------------------------------------- SPic

def test_spic_z3_negation():
    d = named_duality("F1Z3", "neg", "[1]")
    sp = spic(d)
    eps = d.epsilon
    assert len(sp) == 1
    assert sp.reps == [d.monoid.mul(eps, eps)]
    assert sp.stabilizer_order(sp.reps[0]) == 3


def test_spic_trivial_units():
    for A in (named_monoid("F1"), free(2)):
        sp = spic(DualityDatum(A))
        assert len(sp) == 1 and sp.stabilizer_order(A.one) == 1


def test_spic_z4():
    d = named_duality("F1Z4")
    sp = spic(d)
    assert len(sp) == 2
    assert sorted(sorted(o) for o in brute_orbits(d)) == [[(0,), (2,)], [(1,), (3,)]]
    for r in sp.reps:
        assert sorted(sp.stabilizer(r)) == [(0,), (2,)]


@pytest.mark.parametrize("key", list(DATA))
def test_spic_matches_brute_force(key):
    d = DATA[key]
    sp = spic(d)
    orbits = brute_orbits(d)
    assert len(sp) == len(orbits)
    n = d.monoid.units().order()
    for o in orbits:
        keys = {sp.key_of(x) for x in o}
        assert len(keys) == 1
        x = next(iter(o))
        assert len(o) * sp.stabilizer_order(x) == n


def test_spic_infinite_units():
    A = laurent(1)
    sp = spic(DualityDatum(A))
    # u . xi = xi + 2u, so classes are parities
    assert len(sp) == 2
    assert sp.key_of((3,)) == sp.key_of((-1,)) != sp.key_of((4,))
    sp = spic(DualityDatum(A, negation_involution(A)))
    assert len(sp) == 1


def test_duality_datum_checks():
    A = named_monoid("F1Z4")
    with pytest.raises(InvalidDuality):
        DualityDatum(A, epsilon=A.parse_element([1]))


# ---------------------------------------------------------------- classification

def test_classify_examples():
    d = named_duality("F1Z4")
    sp = spic(d)
    assert classify(hyperbolic(d, 1), sp)[0] == FormClass(1, {})
    xi = el(d, [1])
    assert classify(diag_form(d, [xi]), sp)[0] == FormClass(0, {sp.key_of(xi): 1})
    c, _ = classify(diag_form(d, [d.monoid.one, el(d, [2])]), sp)
    assert c == FormClass(0, {sp.key_of(d.monoid.one): 2})


def test_isometric_examples():
    d = named_duality("F1Z4")
    ok, g = is_isometric(diag_form(d, [el(d, [1])]), diag_form(d, [el(d, [3])]))
    assert ok and congruence(diag_form(d, [el(d, [3])]), g) == diag_form(d, [el(d, [1])])
    assert not is_isometric(diag_form(d, [d.monoid.one]), diag_form(d, [el(d, [1])]))[0]
    H = hyperbolic(d, 1)
    swap = GenPermMatrix([1, 0], [d.monoid.one] * 2, d.monoid.units())
    assert is_isometric(congruence(H, swap), H)[0]


def test_symform_rejects_bad_input():
    d = named_duality("F1")
    U = d.monoid.units()
    with pytest.raises(InvalidForm):
        SymForm(d, GenPermMatrix([1, 2, 0], [d.monoid.one] * 3, U))
    e = named_duality("F1Z3", "neg", "[1]")
    with pytest.raises(InvalidForm):
        SymForm(e, GenPermMatrix([1, 0], [e.monoid.one, e.monoid.one], e.monoid.units()))


@pytest.mark.parametrize("key", list(DATA))
def test_classify_witness_and_congruence_invariance(key):
    d = DATA[key]
    sp = spic(d)
    U = d.monoid.units()
    units = U.elements()
    rng = random.Random(11)
    forms = [f for n in (1, 2, 3) for f in all_forms(d, n)]
    forms += [f.direct_sum(hyperbolic(d, 1)) for f in rng.sample(forms, min(10, len(forms)))]
    for _ in range(300):
        psi = rng.choice(forms)
        n = psi.size
        perm = list(range(n))
        rng.shuffle(perm)
        g = GenPermMatrix(perm, [rng.choice(units) for _ in range(n)], U)
        c, w = classify(psi, sp)
        assert congruence(psi, w) == normal_form(d, c, sp)
        assert classify(congruence(psi, g), sp)[0] == c


@pytest.mark.parametrize("key", ["F1Z3/id", "F1Z3/neg", "F1Z4/id", "F1Z3/neg/eps"])
def test_classification_complete_rank_3(key):
    d = DATA[key]
    sp = spic(d)
    U = d.monoid.units()
    for n in (1, 2, 3):
        forms = all_forms(d, n)
        group = [GenPermMatrix(p, us, U) for p in permutations(range(n)) for us in product(U.elements(), repeat=n)]
        # congruence orbits by brute force
        orbit_of = {}
        for f in forms:
            if f in orbit_of:
                continue
            orb = {congruence(f, g) for g in group}
            for h in orb:
                orbit_of[h] = f
        for f1 in forms:
            c1 = classify(f1, sp)[0]
            for f2 in forms[:40]:
                same = orbit_of[f1] == orbit_of[f2]
                assert (classify(f2, sp)[0] == c1) == same
                ok, g = is_isometric(f1, f2)
                assert ok == same
                if ok:
                    assert congruence(f2, g) == f1


# ---------------------------------------------------------------- isometry groups

def test_isometry_order_examples():
    d = named_duality("F1")
    assert isometry_group_order(FormClass(1, {}), d) == 2
    for n in range(1, 5):
        assert isometry_group_order(FormClass(0, {d.monoid.one: n}), d) == factorial(n)
    e = named_duality("F1Z3", "neg", "[1]")
    sp = spic(e)
    psi = diag_form(e, [sp.reps[0]] * 2)
    c, _ = classify(psi, sp)
    assert isometry_group_order(c, e, sp) == 18 == brute_force_isometry_count(psi)


@pytest.mark.parametrize("key", [k for k, d in DATA.items() if d.monoid.units().order() <= 4])
def test_isometry_order_matches_brute_force(key):
    d = DATA[key]
    sp = spic(d)
    seen = set()
    for n in (1, 2, 3):
        for psi in all_forms(d, n):
            c, _ = classify(psi, sp)
            if c.key() in seen:
                continue
            seen.add(c.key())
            assert isometry_group_order(c, d, sp) == brute_force_isometry_count(psi)


# ---------------------------------------------------------------- metabolic and reduction

def test_metabolic_examples():
    d = named_duality("F1Z3")
    assert is_metabolic(hyperbolic(d, 2)) == [0, 1]
    assert is_metabolic(diag_form(d, [d.monoid.one])) is None
    H2 = hyperbolic(d, 2)
    R = reduce_form(H2, [1])
    assert classify(R)[0] == FormClass(1, {})
    with pytest.raises(NotIsotropic):
        reduce_form(H2, [0, 2])
    with pytest.raises(NotIsotropic):
        reduce_form(diag_form(d, [d.monoid.one]), [0])


def test_metabolic_implies_hyperbolic():
    ok, detail = metabolic_hyperbolic(4)
    assert ok, detail


@settings(max_examples=40)
@given(st.sampled_from(list(DATA)), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_reduction_drops_one_hyperbolic(key, h, seed):
    d = DATA[key]
    rng = random.Random(seed)
    # rank 1 forms can be absent, e.g. when epsilon is not a square class
    extra = rng.choice(all_forms(d, 1) or all_forms(d, 2))
    psi = hyperbolic(d, h).direct_sum(extra)
    S = rng.sample(range(h), rng.randint(1, h))
    c0 = classify(psi)[0]
    c1 = classify(reduce_form(psi, S))[0]
    assert c1.h == c0.h - len(S) and c1.m == c0.m


# ---------------------------------------------------------------- GW0 / W0

def test_gw0_monoid():
    assert gw0_monoid(named_duality("F1")).describe() == "Z + Z"
    G, _ = w0_monoid(DualityDatum(free(3)))
    assert G.w0_describe() == "Z"
    assert gw0_monoid(named_duality("F1Z4")).describe() == "Z^2 + Z"


def test_class_in_gw0_additive():
    d = named_duality("F1Z4")
    G = gw0_monoid(d)
    a, b = diag_form(d, [el(d, [1])]), hyperbolic(d, 1)
    assert class_in_gw0(G, a.direct_sum(b)) == class_in_gw0(G, a) + class_in_gw0(G, b)
    assert G.to_w0(class_in_gw0(G, b)).is_zero()


@pytest.mark.parametrize("d", range(-3, 4))
def test_pic_involution_pn(d):
    X = projective_space(2)
    inv = pic_involution(X, pn_line(X, d))
    for k in range(-4, 5):
        assert inv((k,)) == (d - k,)
        assert inv(inv((k,))) == (k,)
    # twisted involution is monoidal against the untwisted one
    p0 = pic_involution(X, pn_line(X, 0))
    for m, n in product(range(-2, 3), repeat=2):
        assert inv((m + n,)) == (p0((m,))[0] + inv((n,))[0],)


def test_pic_involution_nonintegral():
    T = builtin_scheme("triangle")
    L = pic(T).representative((1, 0, 0))
    with pytest.raises(NotIntegral):
        pic_involution(T, L)
    inv = pic_involution(T, L, allow_nonintegral=True)
    assert inv((0, 0, 0)) == pic(T).class_of(L)


def test_gw0_scheme_examples():
    X = projective_space(2)
    G0 = gw0_scheme(X, pn_line(X, 0))
    assert G0.fixed_nonempty() and G0.sym_rank() == 1
    assert G0.hyperbolic_reps(3) == [(0,), (1,), (2,), (3,)]
    G1 = gw0_scheme(X, pn_line(X, 1))
    assert not G1.fixed_nonempty() and G1.w0_describe() == "0"
    A1 = builtin_scheme("A1")
    G, _ = w0_scheme(A1, pic(A1).representative(()))
    assert G.w0_describe() == "Z"


@pytest.mark.parametrize("name", ["P1", "P2", "P1xP1", "H1", "A1"])
def test_w0_is_cokernel(name):
    X = builtin_scheme(name)
    P = pic(X)
    for c in [P.group.zero()] + P.group.basis():
        assert w0_cokernel_check(gw0_scheme(X, P.representative(c)))


@pytest.mark.parametrize("name", ["P1", "P2", "P1xP1", "H1"])
def test_twist_parity(name):
    X = builtin_scheme(name)
    P = pic(X)
    rng = random.Random(2)
    for _ in range(4):
        lam = tuple(rng.randint(-2, 2) for _ in range(P.group.ngens))
        mu = tuple(rng.randint(-2, 2) for _ in range(P.group.ngens))
        L, M = P.representative(lam), P.representative(mu)
        G1 = gw0_scheme(X, L)
        G2 = gw0_scheme(X, tensor(L, tensor(M, M)))
        assert parity_bijection_check(G1, G2, mu)
        assert G1.fixed_nonempty() == G2.fixed_nonempty()


def test_gw0_scheme_over_group_base():
    X = projective_space(1, named_monoid("F1Z3"))
    G = gw0_scheme(X, pn_line(X, 0))
    assert len(G.spic) == 1 and G.sym_rank() == 1


def test_form_json_round_trip():
    d = named_duality("F1Z3", "neg", "[1]")
    psi = hyperbolic(d, 1).direct_sum(diag_form(d, [spic(d).reps[0]]))
    back = form_from_json(json.loads(json.dumps(psi.to_json())))
    assert back == psi and classify(back)[0] == classify(psi)[0]


def test_spec_scheme_gw0_uses_global_units():
    X = spec(named_monoid("F1Z4"))
    G = gw0_scheme(X, pic(X).representative(()))
    assert G.w0_describe() == "Z^2"
