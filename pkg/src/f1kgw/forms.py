"""Symmetric forms over a pointed monoid with duality, and GW0 / W0.

A form of rank ``n`` is a generalized permutation matrix ``psi`` over the
units with ``psi_ij = eps sigma(psi_ji)``; its support permutation is then an
involution.  Isometry classes are pairs ``(h, m)``: ``h`` counts 2-cycles and
``m`` counts fixed points by their SPic orbit.

The same GW0 container serves both levels.  A monoid is treated as a scheme
with trivial Pic, so its symmetric part is indexed by SPic alone and the
hyperbolic part has a single index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from math import factorial

from .abgroup import (AbHom, AffineInvolution, FgAbGroup, IntMatrix, cokernel, involution_fixed_and_orbits,
                      kernel, solve)
from .bundles import CechBundle, GenPermMatrix, pic
from .errors import InfiniteUnits, InvalidForm, NotIntegral, NotIsotropic
from .modcat import DualityDatum
from .invariants_registry import FiniteList, FinSuppMap, FixedCosetIndex, OrbitIndex, Product, sort_key
from .scheme import MonoidScheme


def _ekey(A, x):
    return sort_key(A.encode(x))


class SymForm:
    def __init__(self, datum: DualityDatum, psi: GenPermMatrix, check=True):
        self.datum = datum
        self.psi = psi
        if check:
            self._check()

    @classmethod
    def from_entries(cls, datum, n, entries):
        """Build from ``{(row, col): unit}``."""
        U = datum.monoid.units()
        perm, units = [None] * n, [None] * n
        for (r, c), u in entries.items():
            if perm[c] is not None:
                raise InvalidForm("two entries in one column")
            perm[c], units[c] = r, u
        if None in perm or sorted(perm) != list(range(n)):
            raise InvalidForm("support is not a permutation")
        return cls(datum, GenPermMatrix(perm, units, U))

    @property
    def size(self):
        return self.psi.size

    def _check(self):
        d, psi = self.datum, self.psi
        A = d.monoid
        for u in psi.units:
            if not A.is_unit(u):
                raise InvalidForm(f"entry {u!r} is not a unit")
        for i in range(psi.size):
            j = psi.perm[i]
            if psi.perm[j] != i:
                raise InvalidForm("support permutation is not an involution")
            # entry (j, i) = u_i must equal eps * sigma(entry (i, j)) = eps * sigma(u_j)
            if psi.units[i] != A.mul(d.epsilon, d.sigma(psi.units[j])):
                raise InvalidForm(f"psi is not symmetric at {(j, i)}")

    def entry(self, r, c):
        return self.psi.entry(r, c)

    def __eq__(self, other):
        return isinstance(other, SymForm) and self.psi == other.psi

    def __hash__(self):
        return hash(self.psi)

    def __repr__(self):
        return f"SymForm({self.psi})"

    def direct_sum(self, other):
        return SymForm(self.datum, self.psi.block_sum(other.psi), check=False)

    def to_json(self):
        A = self.datum.monoid
        return {"monoid": A.to_json(), "sigma": self.datum.sigma.to_json(),
                "epsilon": A.encode(self.datum.epsilon), "size": self.size,
                "entries": [[self.psi.perm[c], c, A.encode(self.psi.units[c])] for c in range(self.size)]}


def congruence(psi: SymForm, g: GenPermMatrix) -> SymForm:
    """``sigma(g)^T psi g``."""
    s = psi.datum.sigma
    sg_t = g.map_units(s, g.group).transpose()
    return SymForm(psi.datum, sg_t.compose(psi.psi).compose(g), check=False)


def diag_form(d: DualityDatum, xis) -> SymForm:
    n = len(xis)
    return SymForm(d, GenPermMatrix(range(n), xis, d.monoid.units()))


def hyperbolic(d: DualityDatum, n: int) -> SymForm:
    """``H(A^n)`` on ``U + P(U)``: upper right identity, lower left ``eps``."""
    U = d.monoid.units()
    perm = [n + i for i in range(n)] + list(range(n))
    units = [d.epsilon] * n + [U.one] * n
    return SymForm(d, GenPermMatrix(perm, units, U))


# ---------------------------------------------------------------- SPic

class SPicSet:
    """Orbits of ``{xi : xi = eps sigma(xi)}`` under ``u . xi = u xi sigma(u)``."""

    def __init__(self, datum: DualityDatum):
        self.datum = datum
        A = datum.monoid
        U = A.units()
        self.units = U
        if U.is_finite() and (not U.abelian or (U.order() or 0) <= 4096):
            self._enumerate()
        elif U.abelian:
            self._by_snf()
        else:
            raise InfiniteUnits("SPic needs finite or abelian units")

    def _act(self, u, xi):
        A, s = self.datum.monoid, self.datum.sigma
        return A.mul(A.mul(u, xi), s(u))

    def _enumerate(self):
        A, d = self.datum.monoid, self.datum
        els = sorted(self.units.elements(), key=lambda x: _ekey(A, x))
        sym = [x for x in els if x == A.mul(d.epsilon, d.sigma(x))]
        self.symmetric = sym
        self.reps, self._orbit_of, self.orbits, self._stab = [], {}, {}, {}
        for x in sym:
            if x in self._orbit_of:
                continue
            orb = sorted({self._act(u, x) for u in els}, key=lambda y: _ekey(A, y))
            rep = orb[0]
            self.reps.append(rep)
            self.orbits[rep] = orb
            for y in orb:
                self._orbit_of[y] = rep
            self._stab[rep] = [u for u in els if self._act(u, rep) == rep]
        self.mode = "enumerated"

    def _by_snf(self):
        A, d = self.datum.monoid, self.datum
        U = self.units
        G = U.group
        S = AbHom.from_images(G, G, [U.coords(d.sigma(U.element(e))) for e in G.basis()])
        eps = U.coords(d.epsilon)
        I = AbHom.identity(G)
        x0 = solve(I - S, eps)
        self.mode = "snf"
        self._S, self._G = S, G
        _, self._stab_incl = kernel(I + S)
        if x0 is None:
            self.reps, self._x0 = [], None
            return
        K, kincl = kernel(I - S)
        imgs = [solve(kincl, (I + S)(e)) for e in G.basis()]
        Q, qproj = cokernel(AbHom.from_images(G, K, imgs))
        self._x0, self._kincl, self._qproj = x0, kincl, qproj
        self.reps = sorted((self._snf_rep(q) for q in Q.elements()), key=lambda x: _ekey(A, x))

    def _snf_rep(self, q):
        G = self._G
        k = solve(self._qproj, q)
        return self.units.element(G.add(self._x0, self._kincl(k)))

    def is_symmetric(self, xi) -> bool:
        A, d = self.datum.monoid, self.datum
        return A.is_unit(xi) and xi == A.mul(d.epsilon, d.sigma(xi))

    def orbit_rep(self, xi):
        if not self.is_symmetric(xi):
            raise InvalidForm(f"{xi!r} is not eps-symmetric")
        if self.mode == "enumerated":
            return self._orbit_of[xi]
        G = self._G
        k = solve(self._kincl, G.sub(self.units.coords(xi), self._x0))
        return self._snf_rep(self._qproj(k))

    def transporter(self, xi, target):
        """Some unit ``u`` with ``u . xi = target``, or None."""
        if self.mode == "enumerated":
            for u in sorted(self.units.elements(), key=lambda x: _ekey(self.datum.monoid, x)):
                if self._act(u, xi) == target:
                    return u
            return None
        G, U = self._G, self.units
        f = AbHom.identity(G) + self._S
        c = solve(f, G.sub(U.coords(target), U.coords(xi)))
        return None if c is None else U.element(c)

    def stabilizer(self, xi):
        if self.mode == "enumerated":
            return list(self._stab[self.orbit_rep(xi)])
        if not self._G.is_finite():
            raise InfiniteUnits("stabilizer is infinite")
        return [self.units.element(self._stab_incl(c)) for c in self._stab_incl.domain.elements()]

    def stabilizer_order(self, xi):
        if self.mode == "enumerated":
            return len(self._stab[self.orbit_rep(xi)])
        return self._stab_incl.domain.order()

    def descriptor(self) -> FiniteList:
        return FiniteList([self._key(r) for r in self.reps], name="SPic")

    def _key(self, xi):
        A = self.datum.monoid
        k = A.encode(xi)
        return tuple(k) if isinstance(k, list) else k

    def key_of(self, xi):
        return self._key(self.orbit_rep(xi))

    def __len__(self):
        return len(self.reps)


def spic(d: DualityDatum) -> SPicSet:
    return SPicSet(d)


# ---------------------------------------------------------------- classification

@dataclass
class FormClass:
    h: int
    m: dict = field(default_factory=dict)   # SPic key -> multiplicity

    @property
    def rank(self):
        return 2 * self.h + sum(self.m.values())

    def key(self):
        return (self.h, tuple(sorted(self.m.items(), key=lambda kv: sort_key(kv[0]))))

    def __eq__(self, other):
        return isinstance(other, FormClass) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def describe(self):
        parts = [f"h={self.h}"] + [f"m[{k}]={v}" for k, v in sorted(self.m.items(), key=lambda kv: sort_key(kv[0]))]
        return ", ".join(parts)


def normal_form(d: DualityDatum, cls: FormClass, sp: SPicSet) -> SymForm:
    reps = {sp._key(r): r for r in sp.reps}
    xis = []
    for k, mult in sorted(cls.m.items(), key=lambda kv: sort_key(kv[0])):
        xis += [reps[k]] * mult
    H = hyperbolic(d, cls.h)
    if not xis:
        return H
    D = diag_form(d, xis)
    return H.direct_sum(D) if cls.h else D


def classify(psi: SymForm, sp: SPicSet | None = None):
    """``(FormClass, g)`` with ``congruence(psi, g)`` equal to the normal form."""
    d = psi.datum
    A = d.monoid
    U = A.units()
    sp = sp or spic(d)
    n = psi.size
    pairs = [(i, psi.psi.perm[i]) for i in range(n) if i < psi.psi.perm[i]]
    fixed = [i for i in range(n) if psi.psi.perm[i] == i]
    m = {}
    keyed = []
    for i in fixed:
        k = sp.key_of(psi.psi.units[i])
        m[k] = m.get(k, 0) + 1
        keyed.append((sort_key(k), i, k))
    keyed.sort()
    h = len(pairs)
    cls = FormClass(h, m)
    # witness: normal index a -> (source index, coefficient)
    src, coef = [None] * n, [None] * n
    for a, (i, j) in enumerate(pairs):
        u_j = psi.psi.units[j]        # entry (i, j)
        src[a], coef[a] = i, U.one
        src[h + a], coef[h + a] = j, U.inv(u_j)
    reps = {sp._key(r): r for r in sp.reps}
    for b, (_, i, k) in enumerate(keyed):
        xi = psi.psi.units[i]
        u = sp.transporter(xi, reps[k])
        src[2 * h + b], coef[2 * h + b] = i, u
    g = GenPermMatrix(src, coef, U)
    return cls, g


def is_isometric(p1: SymForm, p2: SymForm):
    """``(True, g)`` with ``congruence(p2, g) == p1``, or ``(False, None)``."""
    if p1.size != p2.size:
        return False, None
    sp = spic(p1.datum)
    c1, g1 = classify(p1, sp)
    c2, g2 = classify(p2, sp)
    if c1 != c2:
        return False, None
    g = g2.compose(g1.inverse())
    if congruence(p2, g) != p1:
        raise InvalidForm("isometry witness failed verification")
    return True, g


def isometry_group_order(cls: FormClass, d: DualityDatum, sp: SPicSet | None = None) -> int:
    U = d.monoid.units()
    if not U.is_finite():
        raise InfiniteUnits("isometry group is infinite")
    sp = sp or spic(d)
    reps = {sp._key(r): r for r in sp.reps}
    n = (2 * U.order()) ** cls.h * factorial(cls.h)
    for k, mult in cls.m.items():
        n *= sp.stabilizer_order(reps[k]) ** mult * factorial(mult)
    return n


def brute_force_isometry_count(psi: SymForm) -> int:
    U = psi.datum.monoid.units()
    els = U.elements()
    count = 0
    for perm in permutations(range(psi.size)):
        for us in product(els, repeat=psi.size):
            if congruence(psi, GenPermMatrix(perm, us, U)) == psi:
                count += 1
    return count


def all_forms(d: DualityDatum, n: int):
    """Every symmetric form of rank ``n`` (finite units only)."""
    A = d.monoid
    U = A.units()
    els = sorted(U.elements(), key=lambda x: _ekey(A, x))
    out = []
    for perm in permutations(range(n)):
        if any(perm[perm[i]] != i for i in range(n)):
            continue
        free = [i for i in range(n) if i <= perm[i]]
        for choice in product(els, repeat=len(free)):
            units = [None] * n
            ok = True
            for i, u in zip(free, choice):
                units[i] = u
                j = perm[i]
                if j != i:
                    units[j] = A.mul(d.epsilon, d.sigma(u))
                elif u != A.mul(d.epsilon, d.sigma(u)):
                    ok = False
            if ok:
                out.append(SymForm(d, GenPermMatrix(perm, units, U)))
    return out


# ---------------------------------------------------------------- metabolic / reduction

def _pairing_zero(psi: SymForm, i, j) -> bool:
    return psi.entry(i, j) is None


def is_metabolic(psi: SymForm):
    """A coordinate Lagrangian ``L`` (isotropic with ``L = L^perp``), or None."""
    n = psi.size
    if n % 2:
        return None
    for L in combinations(range(n), n // 2):
        Ls = set(L)
        if not all(_pairing_zero(psi, i, j) for i in L for j in L):
            continue
        perp = {j for j in range(n) if all(_pairing_zero(psi, i, j) for i in L)}
        if perp == Ls:
            return list(L)
    return None


def reduce_form(psi: SymForm, S) -> SymForm:
    """The reduction ``U^perp / U`` along a coordinate isotropic ``U``."""
    S = sorted(set(S))
    if not all(_pairing_zero(psi, i, j) for i in S for j in S):
        raise NotIsotropic("index set is not isotropic", indices=S)
    n = psi.size
    perp = {j for j in range(n) if all(_pairing_zero(psi, i, j) for i in S)}
    keep = sorted(perp - set(S))
    pos = {k: a for a, k in enumerate(keep)}
    perm = [pos[psi.psi.perm[k]] for k in keep]
    units = [psi.psi.units[k] for k in keep]
    return SymForm(psi.datum, GenPermMatrix(perm, units, psi.psi.group))


# ---------------------------------------------------------------- GW0 / W0

class GW0Element:
    __slots__ = ("group", "sym", "hyp")

    def __init__(self, group, sym: FinSuppMap, hyp: FinSuppMap):
        self.group, self.sym, self.hyp = group, sym, hyp

    def __add__(self, other):
        return GW0Element(self.group, self.sym + other.sym, self.hyp + other.hyp)

    def __neg__(self):
        return GW0Element(self.group, -self.sym, -self.hyp)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return self.sym == other.sym and self.hyp == other.hyp

    def to_json(self):
        return {"sym": self.sym.to_json(), "hyp": self.hyp.to_json()}

    def __repr__(self):
        return f"GW0({self.sym}, H:{self.hyp})"


class GW0Group:
    """``Z^(SPic x Pic-fixed) + Z^(Pic / involution)``."""

    def __init__(self, spic_set: SPicSet, involution: AffineInvolution, label="GW0"):
        self.spic = spic_set
        self.involution = involution
        self.fixed, self.orbits = involution_fixed_and_orbits(involution)
        self.pic = involution.group
        self.sym_index = Product([spic_set.descriptor(), FixedCosetIndex(self.fixed)])
        self.hyp_index = OrbitIndex(self.orbits)
        self.label = label

    def zero(self):
        return GW0Element(self, FinSuppMap(self.sym_index), FinSuppMap(self.hyp_index))

    def sym_line(self, M, xi, coeff=1):
        key = (self.spic.key_of(xi), self.pic.reduce(M))
        return GW0Element(self, FinSuppMap(self.sym_index, [(key, coeff)]), FinSuppMap(self.hyp_index))

    def hyperbolic_class(self, M, coeff=1):
        return GW0Element(self, FinSuppMap(self.sym_index), FinSuppMap(self.hyp_index, [(M, coeff)]))

    def H(self, k0_element: FinSuppMap) -> GW0Element:
        """The hyperbolic map from ``K0 = Z[Pic]``."""
        out = self.zero()
        for M, c in k0_element.terms.items():
            out = out + self.hyperbolic_class(M, c)
        return out

    def to_w0(self, x: GW0Element) -> FinSuppMap:
        return x.sym

    def fixed_nonempty(self) -> bool:
        return not self.fixed.is_empty()

    def sym_rank(self):
        """Rank of the symmetric part, or None when infinite."""
        if self.fixed.is_empty():
            return 0
        if not self.sym_index.factors[1].is_finite():
            return None
        return len(self.spic) * len(self.fixed.enumerate())

    def hyp_rank(self):
        return len(self.orbits.enumerate()) if self.pic.is_finite() else None

    def describe(self) -> str:
        def part(r, name):
            if r is None:
                return f"Z^({name})"
            return "0" if r == 0 else ("Z" if r == 1 else f"Z^{r}")
        return f"{part(self.sym_rank(), 'SPic x Pic^inv')} + {part(self.hyp_rank(), 'Pic/inv')}"

    def w0_describe(self) -> str:
        r = self.sym_rank()
        return "Z^(SPic x Pic^inv)" if r is None else ("0" if r == 0 else ("Z" if r == 1 else f"Z^{r}"))

    def hyperbolic_reps(self, limit):
        """Canonical orbit representatives within a coordinate box, sorted."""
        from itertools import product as iprod
        G = self.pic
        box = [range(-limit, limit + 1)] * G.free_rank + [range(d) for d in G.torsion]
        return sorted({self.orbits.rep(x) for x in iprod(*box)})


def _trivial_involution():
    G = FgAbGroup(0)
    return AffineInvolution.negation(G)


def gw0_monoid(d: DualityDatum) -> GW0Group:
    return GW0Group(spic(d), _trivial_involution(), label=f"GW0({d.monoid.name})")


def class_in_gw0(G: GW0Group, psi: SymForm) -> GW0Element:
    cls, _ = classify(psi, G.spic)
    sym = FinSuppMap(G.sym_index, [((k, ()), c) for k, c in cls.m.items()])
    hyp = FinSuppMap(G.hyp_index, [((), cls.h)] if cls.h else [])
    return GW0Element(G, sym, hyp)


def w0_monoid(d: DualityDatum):
    G = gw0_monoid(d)
    return G, G.sym_index


def w0_cokernel_check(G: GW0Group, window=3) -> bool:
    """``W0 = coker(H)`` on a finite window of generators, via SNF."""
    P = G.pic
    from itertools import product as iprod
    rng = [range(-window, window + 1)] * P.free_rank + [range(d) for d in P.torsion]
    pics = sorted({P.reduce(x) for x in iprod(*rng)})
    hyp_keys = sorted({G.orbits.rep(x) for x in pics})
    sym_keys = []
    if not G.fixed.is_empty():
        fixed = [x for x in pics if G.fixed.contains(x)]
        sym_keys = [(k, x) for k in G.spic.descriptor().items for x in fixed]
    n_sym, n_hyp = len(sym_keys), len(hyp_keys)
    hidx = {k: i for i, k in enumerate(hyp_keys)}
    cols = []
    for x in pics:
        c = [0] * (n_sym + n_hyp)
        c[n_sym + hidx[G.orbits.rep(x)]] += 1
        cols.append(c)
    dom = FgAbGroup.free(len(pics))
    cod = FgAbGroup.free(n_sym + n_hyp)
    Q, _ = cokernel(AbHom(dom, cod, IntMatrix.from_cols(cols, n_sym + n_hyp)))
    return Q == FgAbGroup.free(n_sym)


def pic_involution(X: MonoidScheme, L: CechBundle, allow_nonintegral=False) -> AffineInvolution:
    if not allow_nonintegral and not X.is_integral():
        raise NotIntegral(f"{X.name} is not integral")
    P = pic(X)
    return AffineInvolution.negation(P.group, P.class_of(L))


def scheme_duality(X: MonoidScheme) -> DualityDatum:
    return DualityDatum(X.global_sections())


def gw0_scheme(X: MonoidScheme, L: CechBundle) -> GW0Group:
    inv = pic_involution(X, L)
    return GW0Group(spic(scheme_duality(X)), inv, label=f"GW0({X.name})")


def w0_scheme(X: MonoidScheme, L: CechBundle):
    G = gw0_scheme(X, L)
    return G, G.sym_index


def parity_bijection_check(G1: GW0Group, G2: GW0Group, mu, window=4) -> bool:
    """``x -> x + mu`` matches fixed points and orbits of two twisted involutions."""
    P = G1.pic
    from itertools import product as iprod
    rng = [range(-window, window + 1)] * P.free_rank + [range(d) for d in P.torsion]
    for x in iprod(*rng):
        x = P.reduce(x)
        y = P.add(x, mu)
        if G1.fixed.contains(x) != G2.fixed.contains(y):
            return False
        if G2.orbits.rep(P.add(G1.orbits.rep(x), mu)) != G2.orbits.rep(y):
            return False
    return True
