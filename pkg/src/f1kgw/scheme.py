"""Monoid schemes as finite affine covers.

A scheme stores its charts, the pairwise overlap monoids with the two
localization maps into them, and the triple overlaps with the maps from the
pairwise overlaps.  Empty overlaps are ``None``.  In the ambient model every
chart is an exponent monoid inside one group ``G`` and overlaps are generated
by the union of chart generators, with identity restriction maps.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .abgroup import AbHom, FgAbGroup, IntMatrix, _unimodular_inverse, direct_sum, kernel
from .errors import NonCommutative, UnsupportedBase, UnsupportedModel
from .monoid import (AmbientHom, ExponentMonoid, FiniteMonoid, PointedMonoid, WedgeMonoid,
                     coordinate_wedge, localize_at_prime, pullback_prime)


@dataclass
class Overlap:
    monoid: PointedMonoid
    hom_i: object
    hom_j: object


@dataclass
class Triple:
    monoid: PointedMonoid
    from_pair: dict  # (a, b) -> hom O_ab -> O_ijk


@dataclass(frozen=True)
class SchemePoint:
    index: int
    chart: int
    prime: object
    charts: tuple

    def label(self):
        return f"p{self.index}"

    def describe(self):
        return f"U{self.chart}:{self.prime.describe()}"


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


class MonoidScheme:
    def __init__(self, charts, overlaps=None, triples=None, ambient=None, name="X", meta=None):
        self.charts = list(charts)
        for A in self.charts:
            if isinstance(A, FiniteMonoid) and not A.commutative:
                raise NonCommutative("scheme charts must be commutative")
        self.overlaps = dict(overlaps or {})
        self.triples = dict(triples or {})
        self.ambient = ambient
        self.name = name
        self.meta = dict(meta or {})
        self._cache = {}

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def nchart(self):
        return len(self.charts)

    # -- constructors
    @classmethod
    def from_ambient(cls, G: FgAbGroup, chart_gens, name="X", meta=None):
        charts = [ExponentMonoid(G, gens, name=f"U{i}") for i, gens in enumerate(chart_gens)]
        n = len(charts)
        overlaps, triples = {}, {}
        for i, j in combinations(range(n), 2):
            O = ExponentMonoid(G, list(charts[i].generators) + list(charts[j].generators), name=f"U{i}{j}")
            overlaps[(i, j)] = Overlap(O, AmbientHom(charts[i], O), AmbientHom(charts[j], O))
        for i, j, k in combinations(range(n), 3):
            O = ExponentMonoid(G, [g for c in (i, j, k) for g in charts[c].generators], name=f"U{i}{j}{k}")
            triples[(i, j, k)] = Triple(O, {p: AmbientHom(overlaps[p].monoid, O)
                                            for p in ((i, j), (i, k), (j, k))})
        return cls(charts, overlaps, triples, ambient=G, name=name, meta=meta)

    # -- access
    def overlap(self, i, j):
        if i == j:
            raise ValueError("diagonal overlap")
        o = self.overlaps.get((min(i, j), max(i, j)))
        if o is None or o.monoid.is_trivial():
            return None
        return o

    def restriction(self, i, j, c):
        """The map ``A_c -> O_ij`` for ``c`` in ``{i, j}``."""
        o = self.overlap(i, j)
        return o.hom_i if c == min(i, j) else o.hom_j

    def triple(self, i, j, k):
        t = self.triples.get(tuple(sorted((i, j, k))))
        if t is None or t.monoid.is_trivial():
            return None
        return t

    def pairs(self):
        return [p for p in combinations(range(self.nchart), 2) if self.overlap(*p) is not None]

    def triple_list(self):
        return [t for t in combinations(range(self.nchart), 3) if self.triple(*t) is not None]

    def is_ambient(self) -> bool:
        return self.ambient is not None

    # -- points
    def points(self) -> list:
        return self._cached("points", self._compute_points)

    def _compute_points(self):
        dsu = _DSU()
        chart_primes = [A.primes() for A in self.charts]
        index = {}
        for i, ps in enumerate(chart_primes):
            for k, p in enumerate(ps):
                index[(i, p.key)] = (i, k)
                dsu.find((i, k))
        for (i, j) in self.pairs():
            o = self.overlap(i, j)
            for q in o.monoid.primes():
                pi = pullback_prime(o.hom_i, q)
                pj = pullback_prime(o.hom_j, q)
                dsu.union(index[(i, pi.key)], index[(j, pj.key)])
        groups = {}
        for node in sorted(dsu.parent):
            groups.setdefault(dsu.find(node), []).append(node)
        pts = []
        for root in sorted(groups):
            members = groups[root]
            i, k = members[0]
            pts.append((i, chart_primes[i][k], tuple(sorted({c for c, _ in members})), members))
        out = []
        self._member = {}
        for n, (i, p, charts, members) in enumerate(pts):
            out.append(SchemePoint(n, i, p, charts))
            for m in members:
                self._member[m] = n
        self._chart_primes = chart_primes
        return out

    def point_in_chart(self, pt: SchemePoint, i):
        """The prime of chart ``i`` representing ``pt``."""
        self.points()
        for k, p in enumerate(self._chart_primes[i]):
            if self._member[(i, k)] == pt.index:
                return p
        return None

    def point_of(self, i, prime) -> SchemePoint:
        self.points()
        for k, p in enumerate(self._chart_primes[i]):
            if p.key == prime.key:
                return self.points()[self._member[(i, k)]]
        raise ValueError("prime not found")

    def generizations(self) -> set:
        """Pairs ``(y, x)`` with ``x`` in the closure of ``y`` and ``x != y``."""
        def comp():
            rel = set()
            pts = self.points()
            for x in pts:
                i = x.chart
                px = x.prime
                for p in self._chart_primes[i]:
                    if p.key != px.key and px.key <= p.key:
                        y = self.point_of(i, p)
                        rel.add((y.index, x.index))
            return rel
        return self._cached("gen", comp)

    def closed_points(self):
        rel = self.generizations()
        return [x for x in self.points() if not any(y == x.index for y, _ in rel)]

    def maximal_points(self):
        rel = self.generizations()
        return [x for x in self.points() if not any(x2 == x.index for _, x2 in rel)]

    def stalk(self, pt: SchemePoint):
        return localize_at_prime(self.charts[pt.chart], pt.prime)[0]

    def is_irreducible(self) -> bool:
        return len(self.maximal_points()) == 1

    def is_pc(self) -> bool:
        return all(self.stalk(p).properties().pc for p in self.points())

    def is_integral(self) -> bool:
        return self.is_irreducible() and self.is_pc()

    def integrality_report(self) -> dict:
        irr, pc = self.is_irreducible(), self.is_pc()
        return {"irreducible": irr, "pc": pc, "integral": irr and pc}

    def to_dot(self) -> str:
        pts = self.points()
        lines = ["digraph poset {", "  rankdir=BT;"]
        for p in pts:
            lines.append(f'  {p.label()} [label="{p.describe()}"];')
        rel = self.generizations()
        for y, x in sorted(rel):
            # draw only covering relations
            if not any((y, z) in rel and (z, x) in rel for z in range(len(pts))):
                lines.append(f"  p{x} -> p{y};")
        lines.append("}")
        return "\n".join(lines)

    # -- sections
    def global_units(self) -> FgAbGroup:
        return self._cached("gunits", lambda: self._global_units()[0])

    def _global_units(self):
        us = [A.units() for A in self.charts]
        S, inj, proj = direct_sum([u.group for u in us])
        pairs = self.pairs()
        if not pairs:
            return kernel(AbHom.zero(S, FgAbGroup(0)))
        ous = [self.overlap(*p).monoid.units() for p in pairs]
        T, tinj, _ = direct_sum([u.group for u in ous])
        imgs = []
        for e in S.basis():
            tot = T.zero()
            for n, (i, j) in enumerate(pairs):
                o = self.overlap(i, j)
                gi, gj = proj[i](e), proj[j](e)
                ui = o.hom_i(us[i].element(gi))
                uj = o.hom_j(us[j].element(gj))
                diff = ous[n].group.sub(ous[n].coords(uj), ous[n].coords(ui))
                tot = T.add(tot, tinj[n](diff))
            imgs.append(tot)
        return kernel(AbHom.from_images(S, T, imgs))

    def global_sections(self, bound=3) -> PointedMonoid:
        """``Gamma(X)``: the monoid of compatible sections."""
        return self._cached(("gamma", bound), lambda: self._global_sections(bound))

    def _global_sections(self, bound):
        if self.nchart == 1:
            return self.charts[0]
        if self.is_ambient():
            gens = _ambient_sections(self.ambient, self.charts, bound)
            M = ExponentMonoid(self.ambient, gens, name=f"Gamma({self.name})")
            extra = _ambient_sections(self.ambient, self.charts, bound + 2, raw=True)
            if any(not M.contains(g) for g in extra):
                raise UnsupportedModel("section generators not certified in the margin band")
            return M
        if all(isinstance(A, FiniteMonoid) for A in self.charts):
            return _finite_equalizer(self)
        raise UnsupportedModel("global sections need the ambient model or finite charts")

    def to_json(self):
        if "builtin" in self.meta:
            return {"builtin": self.meta["builtin"]}
        if self.is_ambient():
            return {"ambient": self.ambient.to_json(),
                    "charts": [[list(g) for g in A.generators] for A in self.charts]}
        raise UnsupportedModel("only built-in and ambient schemes serialize")


def _ambient_sections(G, charts, bound, raw=False):
    A0 = charts[0]
    T0 = A0._unit_indices()
    steps = list(A0.generators) + [G.neg(g) for j, g in enumerate(A0.generators) if j in T0]
    seen = {G.zero()}
    frontier = [G.zero()]
    for _ in range(bound):
        nxt = []
        for x in frontier:
            for s in steps:
                y = G.add(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    cands = sorted((x for x in seen if not G.is_zero(x) and all(A.contains(x) for A in charts)),
                   key=lambda x: (sum(abs(v) for v in x), x))
    if raw:
        return cands
    gens = []
    for x in cands:
        if not ExponentMonoid(G, gens).contains(x) if gens else True:
            gens.append(x)
    # drop generators implied by the others
    changed = True
    while changed:
        changed = False
        for g in list(gens):
            rest = [h for h in gens if h != g]
            if rest and ExponentMonoid(G, rest).contains(g):
                gens = rest
                changed = True
                break
    return gens


def _finite_equalizer(X):
    sizes = [A.n for A in X.charts]
    pairs = X.pairs()
    tuples = []
    for t in product(*[range(n) for n in sizes]):
        if all(X.overlap(i, j).hom_i(t[i]) == X.overlap(i, j).hom_j(t[j]) for i, j in pairs):
            tuples.append(t)
    zero = tuple(0 for _ in sizes)
    one = tuple(A.one for A in X.charts)
    order = [zero, one] + [t for t in tuples if t not in (zero, one)]
    idx = {t: k for k, t in enumerate(order)}
    table = [[idx[tuple(A.mul(a, b) for A, a, b in zip(X.charts, s, t))] for t in order] for s in order]
    return FiniteMonoid(table, name=f"Gamma({X.name})")


# ---------------------------------------------------------------- built-ins

def spec(A: PointedMonoid, name=None) -> MonoidScheme:
    if isinstance(A, FiniteMonoid) and not A.commutative:
        raise NonCommutative("Spec needs a commutative monoid")
    amb = A.ambient if isinstance(A, ExponentMonoid) else None
    return MonoidScheme([A], ambient=amb, name=name or f"Spec {A.name}")


def _pn_vec(n, j, i):
    v = [0] * n
    if j:
        v[j - 1] += 1
    if i:
        v[i - 1] -= 1
    return v


def projective_space(n: int, A: ExponentMonoid | None = None, name=None) -> MonoidScheme:
    """``P^n_A`` with ambient ``A^gp + Z^n``; chart ``i`` is ``A[T_j/T_i]``."""
    from .monoid import f1
    A = A if A is not None else f1()
    if n < 1:
        raise UnsupportedBase("need n >= 1")
    if not isinstance(A, ExponentMonoid):
        raise UnsupportedBase("projective space needs an exponent base monoid")
    H = A.ambient
    G, inj, _ = direct_sum([H, FgAbGroup.free(n)])
    base = [inj[0](g) for g in A.generators]
    charts = []
    for i in range(n + 1):
        charts.append(base + [inj[1](_pn_vec(n, j, i)) for j in range(n + 1) if j != i])
    meta = {"kind": "Pn", "n": n, "base": A, "base_embedding": inj[0], "lattice_embedding": inj[1]}
    X = MonoidScheme.from_ambient(G, charts, name=name or f"P{n}_{A.name}", meta=meta)
    return X


def pn_ratio(X: MonoidScheme, j, i):
    """The unit ``T_j/T_i`` of the overlap ``U_i U_j`` in ambient coordinates."""
    n = X.meta["n"]
    return X.meta["lattice_embedding"](_pn_vec(n, j, i))


def affine_space(n: int) -> MonoidScheme:
    from .monoid import free
    return spec(free(n), name=f"A{n}")


def triangle() -> MonoidScheme:
    """Three coordinate lines in ``P^2`` glued in a cycle."""
    G = FgAbGroup.free(2)

    def e(j, i):
        return tuple(_pn_vec(2, j, i))
    charts = []
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        comps = [ExponentMonoid(G, [e(j, i)], name=f"T{j}/T{i}"), ExponentMonoid(G, [e(k, i)], name=f"T{k}/T{i}")]
        charts.append(WedgeMonoid(comps, name=f"U{i}"))
    overlaps = {}
    for i, j in combinations(range(3), 2):
        O = ExponentMonoid(G, [e(j, i), e(i, j)], name=f"U{i}{j}")
        overlaps[(i, j)] = Overlap(O, AmbientHom(charts[i], O), AmbientHom(charts[j], O))
    triples = {(0, 1, 2): None}
    return MonoidScheme(charts, overlaps, triples, ambient=None, name="triangle",
                        meta={"builtin": "triangle", "kind": "triangle"})


def triangle_ratio(j, i):
    return tuple(_pn_vec(2, j, i))


def smooth_toric(rays, cones, name="toric") -> MonoidScheme:
    """A smooth toric scheme from maximal cones whose rays form lattice bases."""
    n = len(rays[0])
    G = FgAbGroup.free(n)
    charts = []
    for cone in cones:
        V = IntMatrix.from_cols([rays[r] for r in cone], n)
        if abs(V.det()) != 1:
            raise UnsupportedModel("cones must be unimodular")
        Vi = _unimodular_inverse(V)
        charts.append([tuple(Vi[r, c] for c in range(n)) for r in range(n)])
    return MonoidScheme.from_ambient(G, charts, name=name, meta={"kind": "toric", "rays": rays, "cones": cones})


def p1xp1() -> MonoidScheme:
    rays = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    X = smooth_toric(rays, [(0, 1), (1, 2), (2, 3), (3, 0)], name="P1xP1")
    X.meta["builtin"] = "P1xP1"
    return X


def hirzebruch(a: int) -> MonoidScheme:
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    X = smooth_toric(rays, [(0, 1), (1, 2), (2, 3), (3, 0)], name=f"H{a}")
    X.meta["builtin"] = f"H{a}"
    return X


def spec_wedge() -> MonoidScheme:
    return spec(coordinate_wedge(2, ["t", "s"]), name="Spec F1[t,s]/ts=0")
