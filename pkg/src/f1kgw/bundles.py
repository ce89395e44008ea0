"""Vector bundles as Cech cocycles of generalized permutation matrices.

A rank ``n`` bundle stores ``phi_ij`` for each nonempty overlap with
``i < j``; ``phi_ji`` is its inverse.  Matrices act on chart-``i`` frames:
``phi_ij(s_k) = u_k s_{perm[k]}`` and the cocycle rule reads
``phi_ik = phi_jk phi_ij`` on nonempty triple overlaps.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

from .abgroup import AbHom, IntMatrix, _unimodular_inverse, cokernel, direct_sum, kernel, solve
from .errors import InvalidCocycle, NotIntegral, SchemeMismatch, SizeMismatch
from .invariants_registry import AbGroupElements, FinSuppMap
from .scheme import MonoidScheme, pn_ratio


class GenPermMatrix:
    """``s_i -> u_i s_{perm[i]}`` over a group with ``mul``, ``inv`` and ``one``."""

    __slots__ = ("perm", "units", "group")

    def __init__(self, perm, units, group):
        self.perm = tuple(perm)
        self.units = tuple(units)
        self.group = group
        if sorted(self.perm) != list(range(len(self.perm))) or len(self.units) != len(self.perm):
            raise ValueError("not a generalized permutation matrix")

    @classmethod
    def identity(cls, n, group):
        return cls(range(n), [group.one] * n, group)

    @classmethod
    def permutation(cls, perm, group):
        return cls(perm, [group.one] * len(perm), group)

    @property
    def size(self):
        return len(self.perm)

    def entry(self, r, c):
        return self.units[c] if self.perm[c] == r else None

    def compose(self, other: "GenPermMatrix") -> "GenPermMatrix":
        """``self o other`` (``other`` first)."""
        if other.size != self.size:
            raise SizeMismatch("sizes differ")
        g = self.group
        perm = [self.perm[other.perm[i]] for i in range(self.size)]
        units = [g.mul(self.units[other.perm[i]], other.units[i]) for i in range(self.size)]
        return GenPermMatrix(perm, units, g)

    __matmul__ = compose

    def inverse(self) -> "GenPermMatrix":
        n, g = self.size, self.group
        perm, units = [0] * n, [None] * n
        for i in range(n):
            perm[self.perm[i]] = i
            units[self.perm[i]] = g.inv(self.units[i])
        return GenPermMatrix(perm, units, g)

    def transpose(self) -> "GenPermMatrix":
        n = self.size
        perm, units = [0] * n, [None] * n
        for i in range(n):
            perm[self.perm[i]] = i
            units[self.perm[i]] = self.units[i]
        return GenPermMatrix(perm, units, self.group)

    def dual(self) -> "GenPermMatrix":
        """Inverse transpose: same permutation, inverted units."""
        return GenPermMatrix(self.perm, [self.group.inv(u) for u in self.units], self.group)

    def map_units(self, f, group) -> "GenPermMatrix":
        return GenPermMatrix(self.perm, [f(u) for u in self.units], group)

    def block_sum(self, other) -> "GenPermMatrix":
        n = self.size
        return GenPermMatrix(self.perm + tuple(p + n for p in other.perm), self.units + other.units, self.group)

    def kron(self, other) -> "GenPermMatrix":
        g, m = self.group, other.size
        perm, units = [], []
        for a in range(self.size):
            for b in range(m):
                perm.append(self.perm[a] * m + other.perm[b])
                units.append(g.mul(self.units[a], other.units[b]))
        return GenPermMatrix(perm, units, g)

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.size)) and all(u == self.group.one for u in self.units)

    def __eq__(self, other):
        return isinstance(other, GenPermMatrix) and self.perm == other.perm and self.units == other.units

    def __hash__(self):
        return hash((self.perm, self.units))

    def __repr__(self):
        return f"GenPerm({list(self.perm)}, {list(self.units)})"


class CechBundle:
    def __init__(self, scheme: MonoidScheme, rank: int, transitions: dict):
        self.scheme = scheme
        self.rank = rank
        self.transitions = {}
        for (i, j), m in transitions.items():
            if i > j:
                i, j, m = j, i, m.inverse()
            if m.size != rank:
                raise SizeMismatch(f"transition {(i, j)} has size {m.size}, expected {rank}")
            self.transitions[(i, j)] = m
        for p in scheme.pairs():
            if p not in self.transitions:
                self.transitions[p] = GenPermMatrix.identity(rank, scheme.overlap(*p).monoid.units())

    def phi(self, i, j) -> GenPermMatrix:
        if i < j:
            return self.transitions[(i, j)]
        return self.transitions[(j, i)].inverse()

    def restricted(self, i, j, k) -> GenPermMatrix:
        """``phi_ij`` pushed into the triple overlap ``U_i U_j U_k``."""
        t = self.scheme.triple(i, j, k)
        a, b = min(i, j), max(i, j)
        hom = t.from_pair[(a, b)]
        return self.phi(i, j).map_units(hom, t.monoid.units())

    def __eq__(self, other):
        return (isinstance(other, CechBundle) and other.scheme is self.scheme and other.rank == self.rank
                and other.transitions == self.transitions)

    def to_json(self):
        X = self.scheme
        out = []
        for (i, j), m in sorted(self.transitions.items()):
            O = X.overlap(i, j).monoid
            out.append({"pair": [i, j], "perm": list(m.perm), "units": [O.encode(u) for u in m.units]})
        return {"rank": self.rank, "transitions": out}

    @classmethod
    def from_json(cls, X: MonoidScheme, data):
        trans = {}
        for t in data["transitions"]:
            i, j = t["pair"]
            O = X.overlap(i, j)
            if O is None:
                raise InvalidCocycle(f"overlap {i},{j} is empty", pair=[i, j])
            U = O.monoid.units()
            units = t.get("units") or [None] * len(t["perm"])
            els = [U.one if u is None else O.monoid.decode(u) for u in units]
            for u in els:
                if not U.contains(u):
                    raise InvalidCocycle(f"entry {u} is not a unit on overlap {i},{j}", pair=[i, j])
            m = GenPermMatrix(t["perm"], els, U)
            key = (min(i, j), max(i, j))
            m = m if i < j else m.inverse()
            if key in trans and trans[key] != m:
                raise InvalidCocycle("inconsistent phi_ij and phi_ji", pair=list(key))
            trans[key] = m
        return cls(X, int(data["rank"]), trans)


@dataclass
class ValidationReport:
    valid: bool
    violations: list = field(default_factory=list)


def validate(b: CechBundle) -> ValidationReport:
    X = b.scheme
    bad = []
    for (i, j), m in b.transitions.items():
        U = X.overlap(i, j).monoid.units()
        if any(not U.contains(u) for u in m.units):
            bad.append({"kind": "non-unit", "pair": [i, j]})
        if not m.compose(m.inverse()).is_identity():
            bad.append({"kind": "inverse", "pair": [i, j]})
    for (i, j, k) in X.triple_list():
        lhs = b.restricted(i, k, j)
        rhs = b.restricted(j, k, i).compose(b.restricted(i, j, k))
        if lhs != rhs:
            bad.append({"kind": "cocycle", "triple": [i, j, k]})
    return ValidationReport(not bad, bad)


# ---------------------------------------------------------------- constructors

def trivial_bundle(X: MonoidScheme, n: int) -> CechBundle:
    return CechBundle(X, n, {})


def line_bundle(X: MonoidScheme, units: dict) -> CechBundle:
    """Rank one bundle from ``{(i, j): unit of O_ij}``."""
    trans = {}
    for (i, j), u in units.items():
        U = X.overlap(i, j).monoid.units()
        trans[(i, j)] = GenPermMatrix((0,), (u,), U)
    return CechBundle(X, 1, trans)


def pn_line(X: MonoidScheme, m: int) -> CechBundle:
    """``O(m)`` on a projective space built by ``projective_space``."""
    G = X.ambient
    return line_bundle(X, {(i, j): G.scale(m, pn_ratio(X, j, i)) for (i, j) in X.pairs()})


def direct_sum_bundle(*bs) -> CechBundle:
    X = bs[0].scheme
    for b in bs:
        if b.scheme is not X:
            raise SchemeMismatch("bundles on different schemes")
    trans = {}
    for p in X.pairs():
        m = bs[0].phi(*p)
        for b in bs[1:]:
            m = m.block_sum(b.phi(*p))
        trans[p] = m
    return CechBundle(X, sum(b.rank for b in bs), trans)


def tensor(b1: CechBundle, b2: CechBundle) -> CechBundle:
    if b1.scheme is not b2.scheme:
        raise SchemeMismatch("bundles on different schemes")
    return CechBundle(b1.scheme, b1.rank * b2.rank, {p: b1.phi(*p).kron(b2.phi(*p)) for p in b1.scheme.pairs()})


def dual(b: CechBundle) -> CechBundle:
    return CechBundle(b.scheme, b.rank, {p: b.phi(*p).dual() for p in b.scheme.pairs()})


def twist(b: CechBundle, L: CechBundle) -> CechBundle:
    if L.rank != 1:
        raise SizeMismatch("twist needs a line bundle")
    return tensor(b, L)


def gauge_transform(b: CechBundle, g) -> CechBundle:
    """``phi'_ij = g_j phi_ij g_i^-1`` with ``g_i`` over the units of chart ``i``."""
    X = b.scheme
    if len(g) != X.nchart or any(m.size != b.rank for m in g):
        raise SizeMismatch("gauge must have one matrix of the bundle's rank per chart")
    trans = {}
    for (i, j) in X.pairs():
        o = X.overlap(i, j)
        U = o.monoid.units()
        gi = g[i].map_units(o.hom_i, U)
        gj = g[j].map_units(o.hom_j, U)
        trans[(i, j)] = gj.compose(b.phi(i, j)).compose(gi.inverse())
    return CechBundle(X, b.rank, trans)


# ---------------------------------------------------------------- Pic

class PicGroup:
    """``H^1`` of the unit sheaf on the cover, with cocycle representatives."""

    def __init__(self, X: MonoidScheme, hint=None):
        self.scheme = X
        pairs, triples = X.pairs(), X.triple_list()
        self.pairs = pairs
        cu = [A.units() for A in X.charts]
        pu = [X.overlap(*p).monoid.units() for p in pairs]
        tu = [X.triple(*t).monoid.units() for t in triples]
        self._pu = pu
        C0, inj0, proj0 = direct_sum([u.group for u in cu])
        C1, inj1, proj1 = direct_sum([u.group for u in pu])
        C2, inj2, _ = direct_sum([u.group for u in tu])
        self.C0, self.C1, self.C2 = C0, C1, C2
        self._inj1, self._proj1 = inj1, proj1

        d0_imgs = []
        for e in C0.basis():
            v = C1.zero()
            for n, (i, j) in enumerate(pairs):
                o = X.overlap(i, j)
                ui = o.hom_i(cu[i].element(proj0[i](e)))
                uj = o.hom_j(cu[j].element(proj0[j](e)))
                v = C1.add(v, inj1[n](pu[n].group.sub(pu[n].coords(uj), pu[n].coords(ui))))
            d0_imgs.append(v)
        # d1 on each pair block, then on the basis of C1 through the projections
        touching = {p: [] for p in pairs}
        for m, (i, j, k) in enumerate(triples):
            for p, sign in (((i, j), 1), ((j, k), 1), ((i, k), -1)):
                touching[p].append((m, sign))
        block = []
        for n, p in enumerate(pairs):
            imgs = []
            for b in pu[n].group.basis():
                u = pu[n].element(b)
                v = C2.zero()
                for m, sign in touching[p]:
                    w = tu[m].coords(X.triple(*triples[m]).from_pair[p](u))
                    v = C2.add(v, inj2[m](tu[m].group.scale(sign, w)))
                imgs.append(v)
            block.append(imgs)
        d1_imgs = []
        for e in C1.basis():
            v = C2.zero()
            for n in range(len(pairs)):
                for c, img in zip(proj1[n](e), block[n]):
                    if c:
                        v = C2.add(v, C2.scale(c, img))
            d1_imgs.append(v)
        d0 = AbHom.from_images(C0, C1, d0_imgs)
        d1 = AbHom.from_images(C1, C2, d1_imgs)
        Z1, incl = kernel(d1)
        lifted = []
        for img in d0_imgs:
            z = solve(incl, img)
            if z is None:
                raise InvalidCocycle("coboundary is not a cocycle; cover data inconsistent")
            lifted.append(z)
        Pic, proj = cokernel(AbHom.from_images(C0, Z1, lifted))
        self.d0, self.d1 = d0, d1
        self.Z1, self._incl = Z1, incl
        self.group, self._proj = Pic, proj
        if hint is not None and Pic.torsion == () and Pic.free_rank == len(hint):
            cls = [self._raw_class(L) for L in hint]
            M = IntMatrix.from_cols(cls, Pic.ngens)
            if abs(M.det()) == 1:
                Minv = _unimodular_inverse(M)
                newG = Pic.rebased(cls)
                self._proj = AbHom(Z1, newG, Minv @ proj.matrix)
                self.group = newG
        self.generators = [self.representative(e) for e in self.group.basis()]

    def cocycle_vector(self, L: CechBundle):
        if L.rank != 1:
            raise SizeMismatch("class_of needs a line bundle")
        if L.scheme is not self.scheme:
            raise SchemeMismatch("line bundle on a different scheme")
        v = self.C1.zero()
        for n, p in enumerate(self.pairs):
            u = L.phi(*p).units[0]
            v = self.C1.add(v, self._inj1[n](self._pu[n].coords(u)))
        return v

    def _raw_class(self, L):
        z = solve(self._incl, self.cocycle_vector(L))
        if z is None:
            raise InvalidCocycle("transition data is not a cocycle")
        return self._proj(z)

    def class_of(self, L: CechBundle) -> tuple:
        return self._raw_class(L)

    def representative(self, x) -> CechBundle:
        x = self.group.reduce(x)
        z = solve(self._proj, x)
        c = self._incl(z)
        units = {}
        for n, p in enumerate(self.pairs):
            units[p] = self._pu[n].element(self._proj1[n](c))
        return line_bundle(self.scheme, units)

    def describe(self) -> str:
        return self.group.describe()


def pic(X: MonoidScheme) -> PicGroup:
    def comp():
        hint = None
        if X.meta.get("kind") == "Pn":
            hint = [pn_line(X, 1)]
        elif "pic_hint" in X.meta:
            hint = X.meta["pic_hint"](X)
        return PicGroup(X, hint)
    return X._cached("pic", comp)


# ---------------------------------------------------------------- splitting

@dataclass
class LineClasses:
    classes: list           # Pic class per summand, in summand order
    lines: list             # the diagonal line bundles
    witness: list           # per-chart gauge

    @property
    def multiset(self):
        return sorted(self.classes)


@dataclass
class Obstructed:
    components: list        # list of sorted (chart, index) lists

    def summary(self) -> str:
        sizes = sorted(len(c) for c in self.components)
        n = len(self.components)
        return f"OBSTRUCTED: {n} component{'s' if n != 1 else ''} of " + ", ".join(map(str, sizes)) + " sheets"


def sheet_components(b: CechBundle):
    X = b.scheme
    parent = {(i, k): (i, k) for i in range(X.nchart) for k in range(b.rank)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x
    for (i, j) in X.pairs():
        m = b.phi(i, j)
        for k in range(b.rank):
            a, c = find((i, k)), find((j, m.perm[k]))
            if a != c:
                parent[max(a, c)] = min(a, c)
    comps = {}
    for node in sorted(parent):
        comps.setdefault(find(node), []).append(node)
    return [comps[r] for r in sorted(comps)]


def _chart_order(X):
    """Breadth-first order of the chart nerve from chart 0, ties by index."""
    seen, order, q = {0}, [], deque([0])
    while q:
        i = q.popleft()
        order.append(i)
        for j in range(X.nchart):
            if j not in seen and X.overlap(i, j) is not None:
                seen.add(j)
                q.append(j)
    return order


def decompose(b: CechBundle):
    rep = validate(b)
    if not rep.valid:
        raise InvalidCocycle("bundle fails validation", violations=rep.violations)
    X = b.scheme
    comps = sheet_components(b)
    good = len(comps) == b.rank and all(sorted(c for c, _ in comp) == list(range(X.nchart)) for comp in comps)
    if not good:
        return Obstructed(comps)
    order = _chart_order(X)
    if len(order) != X.nchart:
        return Obstructed(comps)
    # summand c is the component through sheet (0, c)
    tau = [[None] * b.rank for _ in range(X.nchart)]
    for comp in comps:
        c = next(k for i, k in comp if i == 0)
        for i, k in comp:
            tau[i][k] = c
    witness = [GenPermMatrix.permutation(tau[i], A.units()) for i, A in enumerate(X.charts)]
    diag = gauge_transform(b, witness)
    lines = []
    for c in range(b.rank):
        units = {p: diag.phi(*p).units[c] for p in X.pairs()}
        lines.append(line_bundle(X, units))
    P = pic(X)
    classes = [P.class_of(L) for L in lines]
    return LineClasses(classes, lines, witness)


def verify_split(b: CechBundle, res: LineClasses) -> bool:
    """The witness gauge carries ``b`` exactly onto the sum of the returned lines."""
    return gauge_transform(b, res.witness) == direct_sum_bundle(*res.lines)


# ---------------------------------------------------------------- K0

class K0Ring:
    def __init__(self, X: MonoidScheme):
        if not X.is_integral():
            raise NotIntegral(f"{X.name} is not integral")
        self.scheme = X
        self.pic = pic(X)
        self.descriptor = AbGroupElements(self.pic.group)

    def one(self) -> FinSuppMap:
        return FinSuppMap.indicator(self.descriptor, self.pic.group.zero())

    def line(self, x) -> FinSuppMap:
        return FinSuppMap.indicator(self.descriptor, x)

    def class_of_bundle(self, b: CechBundle) -> FinSuppMap:
        res = decompose(b)
        if isinstance(res, Obstructed):
            raise NotIntegral("bundle does not split into line bundles", components=len(res.components))
        return FinSuppMap(self.descriptor, [(c, 1) for c in res.classes])

    def multiply(self, x: FinSuppMap, y: FinSuppMap) -> FinSuppMap:
        return x.convolve(y)


def k0(X: MonoidScheme) -> K0Ring:
    return K0Ring(X)


# ---------------------------------------------------------------- random input

def random_gauge(X: MonoidScheme, n: int, rng: random.Random, unit_range=2):
    out = []
    for A in X.charts:
        U = A.units()
        perm = list(range(n))
        rng.shuffle(perm)
        units = []
        for _ in range(n):
            c = [rng.randint(-unit_range, unit_range) for _ in range(U.group.ngens)]
            units.append(U.element(U.group.reduce(c)))
        out.append(GenPermMatrix(perm, units, U))
    return out


def random_split_bundle(X: MonoidScheme, classes, rng: random.Random):
    """A gauge-scrambled sum of line bundles with the given Pic classes."""
    P = pic(X)
    lines = [P.representative(c) for c in classes]
    b = direct_sum_bundle(*lines)
    return gauge_transform(b, random_gauge(X, len(classes), rng))
