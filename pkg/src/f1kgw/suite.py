"""Named end-to-end checks, shared by ``verify-all`` and the acceptance tests.

Each check returns ``(ok, detail)``; ``detail`` is a short human summary.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .bundles import (K0Ring, LineClasses, decompose, pic, pn_line, random_gauge, random_split_bundle,
                      trivial_bundle, direct_sum_bundle, gauge_transform, verify_split)
from .builtins import builtin_scheme, named_duality, standard_data, triangle_bundle
from .forms import (all_forms, brute_force_isometry_count, classify, gw0_scheme, is_metabolic,
                    isometry_group_order, spic, w0_cokernel_check)
from .modcat import (Conflation, FreeModule, MonomialMatrix, all_splittings, compose, dual_of_morphism,
                     monomial_isos, normal_dual, theta)
from .monoid import named_monoid, toric
from .projbundle import gw0_pbf_check, proj_bundle, verify
from .scheme import projective_space


@dataclass
class Check:
    name: str
    run: Callable


def pic_pn(n):
    X = builtin_scheme(f"P{n}")
    P = pic(X)
    ok = P.group.free_rank == 1 and P.group.torsion == () and P.class_of(pn_line(X, 1)) == (1,)
    return ok, f"Pic(P{n}) = {P.describe()}, [O(1)] = {P.class_of(pn_line(X, 1))}"


def k0_pn(n, window=2):
    X = builtin_scheme(f"P{n}")
    K = K0Ring(X)
    rng = range(-window, window + 1)
    ok = all(K.multiply(K.line((a,)), K.line((b,))) == K.class_of_bundle(pn_line(X, a + b))
             and K.class_of_bundle(pn_line(X, a)) == K.line((a,)) for a in rng for b in rng)
    return ok, f"[O(a)][O(b)] = [O(a+b)] for |a|, |b| <= {window} on P{n}"


def triangle_poset():
    X = builtin_scheme("triangle")
    pts = X.points()
    ok = len(pts) == 6 and len(X.closed_points()) == 3 and len(X.maximal_points()) == 3 \
        and len(X.generizations()) == 6
    return ok, f"{len(pts)} points, {len(X.closed_points())} closed, {len(X.generizations())} specializations"


def triangle_pic():
    P = pic(builtin_scheme("triangle"))
    return P.group.free_rank == 3 and P.group.torsion == (), f"Pic(triangle) = {P.describe()}"


def triangle_obstructed():
    res = decompose(triangle_bundle(builtin_scheme("triangle")))
    ok = not isinstance(res, LineClasses) and res.summary() == "OBSTRUCTED: 1 component of 6 sheets"
    return ok, res.summary() if not isinstance(res, LineClasses) else "split unexpectedly"


def random_splits(seed=0, count=20):
    rng = random.Random(seed)
    fails = 0
    for name in ("P1", "P2", "P1xP1", "H1"):
        X = builtin_scheme(name)
        P = pic(X)
        for _ in range(count):
            r = rng.randint(1, 4)
            classes = [tuple(rng.randint(-3, 3) for _ in range(P.group.ngens)) for _ in range(r)]
            b = random_split_bundle(X, classes, rng)
            res = decompose(b)
            if not isinstance(res, LineClasses) or not verify_split(b, res) \
                    or res.multiset != sorted(P.group.reduce(c) for c in classes):
                fails += 1
    return fails == 0, f"{4 * count} random bundles, {fails} failures"


def spic_z3():
    sp = spic(named_duality("F1Z3", "neg"))
    ok = len(sp) == 1 and sp.stabilizer_order(sp.reps[0]) == 3
    return ok, f"|SPic| = {len(sp)}, |I| = {sp.stabilizer_order(sp.reps[0])}"


def isometry_counts(max_rank=2):
    bad = total = 0
    for d in standard_data().values():
        sp = spic(d)
        for n in range(1, max_rank + 1):
            seen = set()
            for psi in all_forms(d, n):
                cls, _ = classify(psi, sp)
                if cls.key() in seen:
                    continue
                seen.add(cls.key())
                total += 1
                if isometry_group_order(cls, d, sp) != brute_force_isometry_count(psi):
                    bad += 1
    return bad == 0, f"{total} classes, {bad} mismatches"


def metabolic_hyperbolic(max_rank=4):
    bad = total = 0
    for d in standard_data().values():
        sp = spic(d)
        for n in range(2, max_rank + 1, 2):
            for psi in all_forms(d, n):
                if is_metabolic(psi) is not None:
                    total += 1
                    cls, _ = classify(psi, sp)
                    if cls.m:
                        bad += 1
    return bad == 0, f"{total} metabolic forms, {bad} not hyperbolic"


def gw0_parity(ns=(1, 2, 3), ds=range(0, 4)):
    ok = True
    for n in ns:
        X = builtin_scheme(f"P{n}")
        for d in ds:
            G = gw0_scheme(X, pn_line(X, d))
            ok &= G.fixed_nonempty() == (d % 2 == 0)
            ok &= G.hyperbolic_reps(3)[0] == (-(-d // 2),)
            ok &= w0_cokernel_check(G)
    return ok, "fixed part nonempty iff d even; orbit reps start at ceil(d/2)"


def w0_pn():
    X = projective_space(2)
    G0, G1 = gw0_scheme(X, pn_line(X, 0)), gw0_scheme(X, pn_line(X, 1))
    ok = G0.w0_describe() == "Z" and G1.w0_describe() == "0"
    return ok, f"W0(P2) = {G0.w0_describe()}, W0(P2; O(1)) = {G1.w0_describe()}"


def gamma_pn():
    ok = True
    for A in (None, named_monoid("F1[t]")):
        for n in (1, 2, 3):
            X = projective_space(n, A)
            G = X.global_sections()
            want = [] if A is None else [X.meta["base_embedding"](g) for g in A.generators]
            ok &= sorted(G.generators) == sorted(want)
    return ok, "Gamma(P^n_A) = A for A in {F1, F1[t]}, n <= 3"


def pbf_p1():
    X = projective_space(1)
    PB = proj_bundle(X, direct_sum_bundle(pn_line(X, 0), pn_line(X, 1)))
    r = verify(PB, pn_line(X, 1))
    return all(r.values()), ", ".join(k for k, v in r.items() if v) or "none"


def pbf_point_gw0():
    pt = builtin_scheme("point")
    PB = proj_bundle(pt, trivial_bundle(pt, 3))
    rep = gw0_pbf_check(PB, trivial_bundle(pt, 1))
    G = gw0_scheme(PB.scheme, trivial_bundle(PB.scheme, 1))
    ok = rep["ok"] and G.sym_rank() == 1 and G.hyperbolic_reps(3)[0] == (0,)
    return ok, f"GW0(P(O^3)) = {G.describe()}"


def theta_identity(max_rank=4):
    """``P(Theta_U) Theta_P(U) = id`` and naturality of ``Theta`` on sample automorphisms."""
    ok = True
    data = list(standard_data().values()) + [named_duality("F1Z4", "id", "[2]"), named_duality("F1Z3", "neg", "[1]")]
    for d in data:
        for n in range(1, max_rank + 1):
            M = FreeModule(d.monoid, n)
            D, _ = normal_dual(M)
            ok &= compose(dual_of_morphism(theta(M, d), d), theta(D, d)) == MonomialMatrix.identity(D)
            for f in monomial_isos(M)[:50]:
                lhs = compose(theta(M, d), f)
                rhs = compose(dual_of_morphism(dual_of_morphism(f, d), d), theta(M, d))
                ok &= lhs == rhs
    return ok, f"double dual identity and naturality, ranks <= {max_rank}"


def unique_splitting():
    A = named_monoid("F1Z3")
    U, W, V = FreeModule(A, 1), FreeModule(A, 1), FreeModule(A, 2)
    i = MonomialMatrix(U, V, {(1, 0): A.one})
    p = MonomialMatrix(V, W, {(0, 0): A.parse_element([2])})
    n = len(all_splittings(Conflation(i, p)))
    return n == 1, f"{n} splitting"


def gauge_invariance(seed=0):
    rng = random.Random(seed)
    X = builtin_scheme("P2")
    b = direct_sum_bundle(pn_line(X, 1), pn_line(X, -1), pn_line(X, 2))
    base = decompose(b).multiset
    ok = all(decompose(gauge_transform(b, random_gauge(X, 3, rng))).multiset == base for _ in range(10))
    return ok, f"class multiset {base} stable under 10 gauges"


def toric_primes():
    A = toric([(1, 0), (1, 1), (1, 2)])
    n = len(A.primes())
    return n == 4, f"{n} primes of a 2-dim cone"


def checks(seed=0) -> list:
    return [
        Check("pic P1", lambda: pic_pn(1)),
        Check("pic P2", lambda: pic_pn(2)),
        Check("pic P3", lambda: pic_pn(3)),
        Check("k0 ring law P1..P3", lambda: (all(k0_pn(n)[0] for n in (1, 2, 3)), "generators |a|, |b| <= 2")),
        Check("triangle poset", triangle_poset),
        Check("triangle pic", triangle_pic),
        Check("triangle bundle obstructed", triangle_obstructed),
        Check("random splittings", lambda: random_splits(seed)),
        Check("gauge invariance", lambda: gauge_invariance(seed)),
        Check("spic F1[Z/3] with negation", spic_z3),
        Check("isometry group orders", isometry_counts),
        Check("metabolic implies hyperbolic", lambda: metabolic_hyperbolic(4)),
        Check("unique splitting", unique_splitting),
        Check("theta double dual", theta_identity),
        Check("toric primes", toric_primes),
        Check("gw0 parity on P^n", gw0_parity),
        Check("w0 of P2", w0_pn),
        Check("global sections of P^n_A", gamma_pn),
        Check("projective bundle over P1", pbf_p1),
        Check("gw0 of P(O^3) over a point", pbf_point_gw0),
    ]


def run_suite(seed=0, only=None):
    out = []
    for c in checks(seed):
        if only is not None and c.name not in only:
            continue
        try:
            ok, detail = c.run()
        except Exception as e:  # a crash counts as a failed check
            ok, detail = False, f"{type(e).__name__}: {e}"
        out.append((c.name, bool(ok), detail))
    return out
