"""The ten acceptance criteria, one test each.

Every test records a PASS/FAIL line with its wall time; the lines are printed
in the pytest terminal summary.  Run alone with ``pytest tests/test_acceptance.py``.
"""
import json
import random
import sys
import time
from itertools import product
from pathlib import Path

import pytest

from f1kgw.abgroup import IntMatrix, smith_normal_form
from f1kgw.builtins import builtin_scheme, standard_data, triangle_bundle
from f1kgw.bundles import (LineClasses, Obstructed, decompose, direct_sum_bundle, gauge_transform, k0,
                           pic, pn_line, random_gauge, random_split_bundle, trivial_bundle,
                           verify_split)
from f1kgw.forms import classify, congruence, gw0_scheme, hyperbolic, spic, w0_cokernel_check
from f1kgw.bundles import GenPermMatrix
from f1kgw.modcat import Conflation, FreeModule, MonomialMatrix, all_splittings, split_conflation
from f1kgw.monoid import ExponentMonoid, free, named_monoid
from f1kgw.abgroup import FgAbGroup
from f1kgw.projbundle import gamma_check, gw0_pbf_check, k0_pbf_check, pic_pbf_check, proj_bundle
from f1kgw.scheme import projective_space
from f1kgw.suite import isometry_counts, metabolic_hyperbolic, theta_identity

FIXTURES = Path(__file__).parent / "fixtures"


def test_criterion_01_pic_pn(criterion):
    with criterion(1, "Pic(P^n) = Z generated by O(1), n = 1, 2, 3") as c:
        for n in (1, 2, 3):
            t0 = time.perf_counter()
            X = projective_space(n)
            P = pic(X)
            assert P.group.free_rank == 1 and P.group.torsion == ()
            assert P.class_of(pn_line(X, 1)) == (1,)
            dt = time.perf_counter() - t0
            assert dt < 1.0, f"P{n} took {dt:.2f} s"
            c.note(f"P{n} {dt:.3f} s")


def test_criterion_02_k0_pn(criterion):
    with criterion(2, "K0(P^n) = Z[Z] with [O(a)][O(b)] = [O(a+b)], |a|, |b| <= 2"):
        for n in (1, 2, 3):
            X = projective_space(n)
            K = k0(X)
            assert K.pic.group == FgAbGroup.free(1)
            for a, b in product(range(-2, 3), repeat=2):
                prod = K.multiply(K.class_of_bundle(pn_line(X, a)), K.class_of_bundle(pn_line(X, b)))
                assert prod == K.line((a + b,)) == K.class_of_bundle(pn_line(X, a + b))


def test_criterion_03_triangle(criterion):
    with criterion(3, "triangle: 6-point poset, Pic = Z^3 (hand Cech fixture), obstructed rank 2 bundle"):
        X = builtin_scheme("triangle")
        assert len(X.points()) == 6
        closed, maximal = X.closed_points(), X.maximal_points()
        assert len(closed) == 3 and len(maximal) == 3
        rel = X.generizations()
        # each line contains two of the three closed points, each closed point lies on two lines
        for m in maximal:
            assert sum(1 for y, _ in rel if y == m.index) == 2
        for p in closed:
            assert sum(1 for _, x in rel if x == p.index) == 2
        assert len(rel) == 6
        P = pic(X)
        fx = json.loads((FIXTURES / "triangle_cech.json").read_text())
        assert (P.C0.ngens, P.C1.ngens, P.C2.ngens) == tuple(fx["ranks"][k] for k in ("C0", "C1", "C2"))
        assert P.group == FgAbGroup.free(fx["pic"]["free_rank"])
        res = decompose(triangle_bundle(X))
        assert isinstance(res, Obstructed)
        assert [len(comp) for comp in res.components] == [6]


def test_criterion_04_random_splittings(criterion):
    with criterion(4, "decompose on 500 seeded random bundles, witness and gauge invariance", limit=30) as c:
        rng = random.Random(20240)
        names = ["P1", "P2", "P1xP1", "H1"]
        for n in range(500):
            X = builtin_scheme(names[n % 4])
            P = pic(X)
            r = rng.randint(1, 4)
            classes = [tuple(rng.randint(-3, 3) for _ in range(P.group.ngens)) for _ in range(r)]
            b = random_split_bundle(X, classes, rng)
            res = decompose(b)
            assert isinstance(res, LineClasses)
            assert verify_split(b, res)
            assert res.multiset == sorted(classes)
            assert decompose(gauge_transform(b, random_gauge(X, r, rng))).multiset == res.multiset
        c.note("500 bundles over P1, P2, P1xP1, H1")


def test_criterion_05_spic_and_isometry_groups(criterion):
    with criterion(5, "SPic(F1[Z/3], sigma != id) singleton with |I| = 3; isometry orders vs brute force") as c:
        from f1kgw.builtins import named_duality
        d = named_duality("F1Z3", "neg", "[1]")
        sp = spic(d)
        assert len(sp) == 1 and sp.stabilizer_order(sp.reps[0]) == 3
        assert set(standard_data()) == {"F1", "F1Z3/id", "F1Z3/neg", "F1Z4/id"}
        ok, detail = isometry_counts(max_rank=3)
        assert ok, detail
        c.note(detail)


def test_criterion_06_metabolic_hyperbolic(criterion):
    with criterion(6, "metabolic implies hyperbolic, all forms of rank <= 4, four duality data") as c:
        ok, detail = metabolic_hyperbolic(4)
        assert ok, detail
        c.note(detail)


def test_criterion_07_gw0_pn(criterion):
    with criterion(7, "GW0(P^n; O(d)): fixed part iff d even, orbit reps from ceil(d/2), W0 rank 1 - d mod 2"):
        window = 4
        for n in (1, 2, 3):
            X = projective_space(n)
            for d in range(-3, 5):
                G = gw0_scheme(X, pn_line(X, d))
                assert G.fixed_nonempty() == (d % 2 == 0)
                assert w0_cokernel_check(G)
                if d in (0, 1):
                    even = 1 - d % 2
                    assert G.sym_rank() == even
                    assert G.w0_describe() == ("Z" if even else "0")
                    lo = -(-d // 2)
                    reps = [k for (k,) in G.hyperbolic_reps(window)]
                    # every orbit has exactly one representative, and they are the integers >= ceil(d/2)
                    assert reps == list(range(lo, lo + len(reps)))
                    assert all(G.orbits.rep((k,)) in [(k,), (d - k,)] for k in range(-window, window + 1))


def pbf_matrix():
    out = []
    for name in ("point", "A1", "P1", "P2"):
        X = builtin_scheme(name)
        proj = X.meta.get("kind") == "Pn"

        def line(k, X=X, proj=proj):
            # Pic of the point and of A1 is trivial, so O(k) is O there
            return pn_line(X, k) if proj else trivial_bundle(X, 1)
        Es = [("O^2", trivial_bundle(X, 2)), ("O^3", trivial_bundle(X, 3))]
        Es += [(f"O+O({k})", direct_sum_bundle(line(0), line(k))) for k in range(-3, 4)]
        Ls = [("O", line(0)), ("O(1)", line(1)), ("O(2)", line(2))]
        out.append((name, X, Es, Ls))
    return out


def test_criterion_08_global_sections(criterion):
    with criterion(8, "Gamma(P^n_A) = A for A in {F1, F1[t]}; Gamma(P(E)) = Gamma(X) on the test matrix") as c:
        for A in (None, free(1)):
            for n in (1, 2, 3):
                X = projective_space(n, A)
                Gam = X.global_sections()
                want = [] if A is None else [X.meta["base_embedding"](g) for g in A.generators]
                assert sorted(Gam.generators) == sorted(want)
        count = 0
        for _, X, Es, _ in pbf_matrix():
            for _, E in Es:
                assert gamma_check(proj_bundle(X, E))
                count += 1
        c.note(f"{count} projective bundles")


def test_criterion_09_projective_bundle_formulas(criterion):
    with criterion(9, "Pic, K0, GW0 and W0 projective bundle formulas on the full matrix", limit=60) as c:
        cases = 0
        for name, X, Es, Ls in pbf_matrix():
            for ename, E in Es:
                PB = proj_bundle(X, E)
                k = k0_pbf_check(PB)
                assert k["ok"], (name, ename, k)
                for lname, L in Ls:
                    rep = pic_pbf_check(PB, L, strict=True)
                    assert rep.ok, (name, ename, lname)
                    g = gw0_pbf_check(PB, L)
                    assert g["ok"], (name, ename, lname, g)
                    cases += 1
        # the point-over-P^2 example: GW0 = Z^2 + Z^(Z>0) on both sides
        pt = builtin_scheme("point")
        PB = proj_bundle(pt, trivial_bundle(pt, 3))
        G = gw0_scheme(PB.scheme, trivial_bundle(PB.scheme, 1))
        assert G.sym_rank() == 1 and G.hyperbolic_reps(2) == [(0,), (1,), (2,)]
        c.note(f"{cases} (X, E, L) cases")


def _random_conflation(A, u, w, rng):
    units = A.units().elements()
    U, W, V = FreeModule(A, u), FreeModule(A, w), FreeModule(A, u + w)
    perm = list(range(u + w))
    rng.shuffle(perm)
    i = MonomialMatrix(U, V, {(perm[k], k): rng.choice(units) for k in range(u)})
    p = MonomialMatrix(V, W, {(k, perm[u + k]): rng.choice(units) for k in range(w)})
    return Conflation(i, p)


def _grid_faces(gens, bound=12):
    faces = set()
    for w in product(range(-bound, bound + 1), repeat=2):
        vals = [w[0] * g[0] + w[1] * g[1] for g in gens]
        if all(v >= 0 for v in vals):
            faces.add(frozenset(j for j, v in enumerate(vals) if v == 0))
    return faces


def test_criterion_10_property_suites(criterion):
    with criterion(10, "property suites: SNF, congruence invariance, theta, unique splitting, faces",
                   limit=120) as c:
        rng = random.Random(10)
        # SNF postconditions on 10^4 seeded matrices
        t0 = time.perf_counter()
        for _ in range(10 ** 4):
            m, n = rng.randint(1, 12), rng.randint(1, 12)
            rows = [[rng.randint(-10 ** 6, 10 ** 6) if rng.random() < 0.6 else 0 for _ in range(n)]
                    for _ in range(m)]
            M = IntMatrix.from_rows(rows, n)
            U, S, V, Ui, Vi = smith_normal_form(M, with_inverses=True)
            assert U @ M @ V == S
            assert U @ Ui == IntMatrix.identity(m) and V @ Vi == IntMatrix.identity(n)
            d = S.diagonal()
            assert all(S.rows[i][j] == 0 for i in range(m) for j in range(n) if i != j)
            nz = [x for x in d if x]
            assert all(x > 0 for x in nz) and d[:len(nz)] == nz
            assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
        c.note(f"SNF {time.perf_counter() - t0:.1f} s")
        # classify is constant on congruence orbits
        for d in standard_data().values():
            sp = spic(d)
            U = d.monoid.units()
            units = U.elements()
            syms = [x for x in units if x == d.monoid.mul(d.epsilon, d.sigma(x))]
            for _ in range(300):
                h = rng.randint(0, 2)
                xis = [rng.choice(syms) for _ in range(rng.randint(0 if h else 1, 5 - 2 * h))]
                psi = hyperbolic(d, h)
                if xis:
                    D = GenPermMatrix(range(len(xis)), xis, U)
                    from f1kgw.forms import SymForm
                    psi = psi.direct_sum(SymForm(d, D)) if h else SymForm(d, D)
                n = psi.size
                perm = list(range(n))
                rng.shuffle(perm)
                g = GenPermMatrix(perm, [rng.choice(units) for _ in range(n)], U)
                assert classify(congruence(psi, g), sp)[0] == classify(psi, sp)[0]
        # double dual identity
        ok, _ = theta_identity(max_rank=4)
        assert ok
        # unique splitting over every monoid of size <= 6 used here
        small = ["F1", "F1[Z/2]", "F1[Z/3]", "F1[Z/4]", "F1[Z/5]", "F1[Z/2xZ/2]", "F1[t]/t^3=0",
                 "F1[t]/t^3=t^2", "F1[t]/t^4=t", "F1[t]/t^5=0"]
        nconf = 0
        for name in small:
            A = named_monoid(name)
            for u, w in product(range(4), repeat=2):
                if u + w > 3:
                    continue
                for _ in range(3):
                    conf = _random_conflation(A, u, w, rng)
                    assert all_splittings(conf) == [split_conflation(conf)]
                    nconf += 1
        # prime enumeration against a functional search on Z^2
        for _ in range(200):
            k = rng.randint(1, 4)
            gens = list({(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(k)} - {(0, 0)})
            if not gens:
                continue
            A = ExponentMonoid(FgAbGroup.free(2), gens)
            assert {p.key for p in A.primes()} == _grid_faces(gens)
        c.note(f"{nconf} conflations split uniquely")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
