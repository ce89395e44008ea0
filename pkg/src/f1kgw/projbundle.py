"""Projective bundles built from cocycle data, and the projective bundle checks.

For a base in the ambient model with group ``G`` and a rank ``r`` bundle ``E``,
the total space lives in ``G' = G + Z^(r-1)``.  Homogeneous coordinates are
expressed through the frame of chart 0: if ``phi_0i(s_l) = u_l s_m`` then the
coordinate ``T^i_m`` is the ambient element ``(-u_l, e_l)`` with ``e_0 = 0``.
Chart ``(i, k)`` is ``A_i[T^i_m / T^i_k]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .abgroup import AbHom, FgAbGroup, direct_sum
from .bundles import (CechBundle, LineClasses, PicGroup, decompose, line_bundle, pic, tensor,
                      validate)
from .errors import CheckFailure, InvalidBundle, IsoFailure, NotIntegral
from .forms import gw0_scheme
from .monoid import AmbientHom, ExponentMonoid, pullback_prime
from .scheme import MonoidScheme


def _fiber_vec(r, l):
    v = [0] * (r - 1)
    if l:
        v[l - 1] = 1
    return v


class ProjBundle:
    def __init__(self, X: MonoidScheme, E: CechBundle):
        if not X.is_ambient():
            raise NotIntegral("projective bundles need a base in the ambient model")
        if not X.is_integral():
            raise NotIntegral(f"{X.name} is not integral")
        rep = validate(E)
        if not rep.valid:
            raise InvalidBundle("bundle fails validation", violations=rep.violations)
        self.base, self.E, self.r = X, E, E.rank
        r = self.r
        G = X.ambient
        Gp, inj, proj = direct_sum([G, FgAbGroup.free(r - 1)])
        self.G, self.Gp = G, Gp
        self.inj, self.fib, self.proj_base = inj[0], inj[1], proj[0]
        # coordinates T^i_m as ambient elements
        self.coord = []
        for i in range(X.nchart):
            phi = E.phi(0, i) if i else None
            row = [None] * r
            for l in range(r):
                if phi is None:
                    m, u = l, G.zero()
                else:
                    m, u = phi.perm[l], phi.units[l]
                row[m] = Gp.add(self.inj(G.neg(u)), self.fib(_fiber_vec(r, l)))
            self.coord.append(row)
        charts = []
        self.index = {}
        for i, A in enumerate(X.charts):
            for k in range(r):
                self.index[(i, k)] = len(charts)
                gens = [self.inj(g) for g in A.generators]
                gens += [self.ratio(i, m, i, k) for m in range(r) if m != k]
                charts.append(gens)
        self.labels = sorted(self.index, key=self.index.get)
        meta = {"kind": "projbundle", "pic_hint": self._pic_hint}
        self.scheme = MonoidScheme.from_ambient(Gp, charts, name=f"P({X.name}, rank {r})", meta=meta)
        self._chart_maps = [AmbientHom(X.charts[i], self.scheme.charts[self.index[(i, k)]], self.inj)
                            for (i, k) in self.labels]
        self._section = None
        self._raw_pic = None

    def _pic_hint(self, PE):
        # basis pi^*(Pic(X) basis), O(1); only used when Pic(X) is free
        PX = pic(self.base)
        return [self.pullback_pi(PX.representative(e)) for e in PX.group.basis()] + [self.o_line(1)]

    def raw_pic(self) -> PicGroup:
        """Pic of the total space in the basis found by Smith normal form, without the hint."""
        if self._raw_pic is None:
            self._raw_pic = PicGroup(self.scheme)
        return self._raw_pic

    def ratio(self, j, l, i, k):
        """``T^j_l / T^i_k`` in the ambient group."""
        return self.Gp.sub(self.coord[j][l], self.coord[i][k])

    # -- line bundles
    def o_line(self, m: int) -> CechBundle:
        PE = self.scheme
        units = {}
        for a, b in PE.pairs():
            (i, k), (j, l) = self.labels[a], self.labels[b]
            units[(a, b)] = self.Gp.scale(m, self.ratio(j, l, i, k))
        return line_bundle(PE, units)

    def pullback_pi(self, L: CechBundle) -> CechBundle:
        PE = self.scheme
        units = {}
        for a, b in PE.pairs():
            (i, _), (j, _) = self.labels[a], self.labels[b]
            u = L.phi(i, j).units[0] if i != j else self.G.zero()
            units[(a, b)] = self.inj(u)
        return line_bundle(PE, units)

    def section_sheets(self):
        """Per base chart, the fiber index of the summand the section runs through."""
        if self._section is None:
            res = decompose(self.E)
            if not isinstance(res, LineClasses):
                raise InvalidBundle("bundle does not split; no coordinate section")
            zero = pic(self.base).group.zero()
            c = next((n for n, cl in enumerate(res.classes) if cl == zero), 0)
            self._section = [w.perm.index(c) for w in res.witness]
            self._section_trivial = res.classes[c] == zero
        return self._section

    def pullback_sigma(self, M: CechBundle) -> CechBundle:
        """Pull a line bundle on the total space back along the coordinate section."""
        X = self.base
        ks = self.section_sheets()
        units = {}
        for i, j in X.pairs():
            a, b = self.index[(i, ks[i])], self.index[(j, ks[j])]
            u = M.phi(a, b).units[0]
            units[(i, j)] = self.proj_base(u)
        return line_bundle(X, units)

    # -- points
    def pi_point(self, y):
        X = self.base
        i, _ = self.labels[y.chart]
        p = pullback_prime(self._chart_maps[y.chart], y.prime)
        return X.point_of(i, p)

    def sigma_point(self, x):
        """The generic point of the fibre over ``x``."""
        PE = self.scheme
        a = self.index[(x.chart, 0)]
        B = PE.charts[a]
        nbase = len(self.base.charts[x.chart].generators)
        key = {j for j in range(len(B.generators)) if j >= nbase}
        hom = self._chart_maps[a]
        for lab, g in self.base.charts[x.chart].labeled_generators():
            if not x.prime.contains(g):
                key |= {j for j, h in enumerate(B.generators) if h == hom(g)}
        q = B.prime_from_key(key)
        if q is None:
            raise CheckFailure("generic fibre point not found")
        return PE.point_of(a, q)


def proj_bundle(X: MonoidScheme, E: CechBundle) -> ProjBundle:
    return ProjBundle(X, E)


# ---------------------------------------------------------------- checks

@dataclass
class PicPbfReport:
    iso: bool
    section: bool
    equivariance: bool
    matrix: list = field(default_factory=list)

    @property
    def ok(self):
        return self.iso and self.section and self.equivariance


def _phi_map(PB: ProjBundle, raw: PicGroup, degree=1):
    PX = pic(PB.base)
    D, inj, _ = direct_sum([PX.group, FgAbGroup.free(1)])
    imgs = []
    for e in D.basis():
        imgs.append(raw.class_of(_phi_bundle(PB, PX, e, D, degree)))
    return D, AbHom.from_images(D, raw.group, imgs)


def _split(D, e):
    # D = Pic(X) + Z from direct_sum; recover the two components
    x = D.to_presentation_coords(e)
    return tuple(x[:-1]), x[-1]


def _phi_bundle(PB, PX, e, D, degree=1):
    x, m = _split(D, e)
    return tensor(PB.pullback_pi(PX.representative(x)), PB.o_line(degree * m))


def pic_pbf_check(PB: ProjBundle, L: CechBundle | None = None, strict=False, degree=1) -> PicPbfReport:
    """``(M, m) -> pi^*M (x) O(m)`` is an isomorphism, inverted by the section, and equivariant.

    ``degree`` replaces ``O(1)`` by ``O(degree)`` in the map; anything but
    ``+-1`` must fail, which the tests use as a negative control.
    """
    X = PB.base
    PX = pic(X)
    raw = PB.raw_pic()
    D, phi = _phi_map(PB, raw, degree)
    iso = phi.is_iso()
    if strict and not iso:
        raise IsoFailure("Pic(X) x Z -> Pic(P(E)) is not an isomorphism", matrix=phi.matrix.tolist())
    section = True
    for x in PX.group.basis() + [PX.group.zero()]:
        for m in (0, 1):
            M = tensor(PB.pullback_pi(PX.representative(x)), PB.o_line(m))
            back = PX.class_of(PB.pullback_sigma(M))
            want = x if PB._section_trivial or m == 0 else None
            if want is not None and back != PX.group.reduce(want):
                section = False
                if strict:
                    raise IsoFailure("section pullback does not invert pi*", generator=list(x), m=m)
    L = L if L is not None else line_bundle(X, {p: X.overlap(*p).monoid.one for p in X.pairs()})
    lam = PX.class_of(L)
    piL = raw.class_of(PB.pullback_pi(L))
    equiv = True
    for x in PX.group.basis() + [PX.group.zero()]:
        for m in (-1, 0, 1, 2):
            lhs_bundle = tensor(PB.pullback_pi(PX.representative(PX.group.sub(lam, x))), PB.o_line(-m))
            lhs = raw.class_of(lhs_bundle)
            rhs = raw.group.sub(piL, raw.class_of(tensor(PB.pullback_pi(PX.representative(x)), PB.o_line(m))))
            if lhs != rhs:
                equiv = False
                if strict:
                    raise IsoFailure("phi is not equivariant", generator=list(x), m=m)
    return PicPbfReport(iso, section, equiv, phi.matrix.tolist())


def k0_pbf_check(PB: ProjBundle) -> dict:
    from .bundles import K0Ring
    PX = pic(PB.base)
    K = K0Ring(PB.scheme)
    O1 = PB.o_line(1)
    ring_ok = True
    gens = PX.group.basis() + [PX.group.zero()]
    for x in gens:
        for y in gens:
            for m in (0, 1):
                a = tensor(PB.pullback_pi(PX.representative(x)), PB.o_line(m))
                b = tensor(PB.pullback_pi(PX.representative(y)), O1)
                prod = K.multiply(K.class_of_bundle(a), K.class_of_bundle(b))
                if prod != K.class_of_bundle(tensor(a, b)):
                    ring_ok = False
    rep = pic_pbf_check(PB)
    return {"group_iso": rep.iso, "ring_on_generators": ring_ok, "ok": rep.iso and ring_ok}


def gw0_pbf_check(PB: ProjBundle, L: CechBundle, window=3) -> dict:
    X, PE = PB.base, PB.scheme
    PX = pic(X)
    PP = pic(PE)
    GX = gw0_scheme(X, L)
    GP = gw0_scheme(PE, PB.pullback_pi(L))
    sx, sp = GX.spic, GP.spic
    spic_ok = len(sx) == len(sp) and sorted(sx.stabilizer_order(r) for r in sx.reps) == \
        sorted(sp.stabilizer_order(r) for r in sp.reps)

    def phi(x, m):
        return PP.class_of(tensor(PB.pullback_pi(PX.representative(x)), PB.o_line(m)))
    fixed_ok = orbit_ok = True
    P = PX.group
    box = [range(-window, window + 1)] * P.free_rank + [range(d) for d in P.torsion]
    for xs in product(*box):
        x = P.reduce(xs)
        for m in range(-window, window + 1):
            y = phi(x, m)
            if GP.fixed.contains(y) != (m == 0 and GX.fixed.contains(x)):
                fixed_ok = False
            if GP.orbits.is_free_orbit(y) != (m != 0 or GX.orbits.is_free_orbit(x)):
                orbit_ok = False
    w0_ok = (GX.fixed.is_empty() == GP.fixed.is_empty()) and spic_ok
    if not GX.fixed.is_empty() and GX.fixed.translations is not None:
        w0_ok = w0_ok and GX.fixed.translations.domain == GP.fixed.translations.domain
    ok = spic_ok and fixed_ok and orbit_ok and w0_ok
    return {"spic": spic_ok, "fixed_bijection": fixed_ok, "orbit_split": orbit_ok, "w0_iso": w0_ok, "ok": ok}


def gamma_check(PB: ProjBundle) -> bool:
    """``pi^*: Gamma(X) -> Gamma(P(E))`` is an isomorphism on generators."""
    GX = PB.base.global_sections()
    GP = PB.scheme.global_sections()
    img = [PB.inj(g) for g in GX.generators]
    M = ExponentMonoid(PB.Gp, img)
    return all(GP.contains(g) for g in img) and all(M.contains(g) for g in GP.generators)


def point_section_check(PB: ProjBundle) -> bool:
    return all(PB.pi_point(PB.sigma_point(x)).index == x.index for x in PB.base.points())


def verify(PB: ProjBundle, L: CechBundle) -> dict:
    rep = pic_pbf_check(PB, L)
    out = {"pic_iso": rep.iso, "sigma_pi": rep.section, "equivariance": rep.equivariance,
           "gamma": gamma_check(PB), "points": point_section_check(PB)}
    k = k0_pbf_check(PB)
    out["k0"] = k["ok"]
    g = gw0_pbf_check(PB, L)
    out["gw0"] = g["fixed_bijection"] and g["orbit_split"] and g["spic"]
    out["w0"] = g["w0_iso"]
    return out
