"""Pointed monoids in three decidable backends.

* ``FiniteMonoid``: an explicit multiplication table, index 0 is zero and
  index 1 is one.  Non-commutative tables are allowed.
* ``ExponentMonoid``: ``{0}`` together with the submonoid of a finitely
  generated abelian group spanned by a list of generators.
* ``WedgeMonoid``: several exponent monoids glued along a common unit group;
  non-units from different components multiply to zero.

Exponent elements are coordinate tuples in the ambient group and the zero
element is the singleton ``ZERO``.  Wedge elements are pairs
``(component, coords)`` with component ``-1`` reserved for units.
"""
from __future__ import annotations

import re
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

from .abgroup import (AbHom, FgAbGroup, IntMatrix, cokernel, solve, subgroup)
from .errors import (InvalidLocalization, InvalidMonoid, NonCommutative,
                     NotCancellative, ParseError)
from .lp import find_functional, positive_relation_support, rank_q


class _Zero:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "0"

    def __reduce__(self):
        return (_Zero, ())


ZERO = _Zero()


@dataclass(frozen=True)
class PropertyReport:
    cancellative: bool
    pc: bool
    rpc: bool
    lpc: bool
    right_reversible: bool
    left_reversible: bool
    reversible: bool
    right_noetherian: bool | None = None

    def as_dict(self):
        return {k: v for k, v in self.__dict__.items() if v is not None}


class PrimeIdeal:
    """A prime ideal, described by which generators lie in its complement.

    ``key`` is the frozenset of generator labels outside the ideal; for
    finite tables it is the full complement.  ``phi`` certifies exponent
    faces: it vanishes on the complement generators and is positive elsewhere.
    """

    def __init__(self, monoid, key, phi=None, component=None, members=None):
        self.monoid = monoid
        self.key = frozenset(key)
        self.phi = phi
        self.component = component
        self.members = members

    def contains(self, x) -> bool:
        return self.monoid._prime_contains(self, x)

    def __eq__(self, other):
        return isinstance(other, PrimeIdeal) and other.monoid is self.monoid and other.key == self.key

    def __hash__(self):
        return hash(self.key)

    def is_subset_of(self, other: "PrimeIdeal") -> bool:
        return other.key <= self.key

    def describe(self) -> str:
        return self.monoid.describe_prime(self)

    def __repr__(self):
        return f"Prime({self.describe()})"


class UnitsGroup:
    """The group of units of a monoid, with a bijection to monoid elements."""

    def __init__(self, monoid, elements=None, group=None, to_elem=None, from_elem=None):
        self.monoid = monoid
        self._elements = elements
        self.group = group
        self._to_elem = to_elem
        self._from_elem = from_elem

    @property
    def abelian(self) -> bool:
        return self.group is not None

    @property
    def one(self):
        return self.monoid.one

    def mul(self, u, v):
        return self.monoid.mul(u, v)

    def inv(self, u):
        if self.group is not None:
            return self.element(self.group.neg(self.coords(u)))
        for v in self._elements:
            if self.monoid.mul(u, v) == self.monoid.one:
                return v
        raise ValueError("not a unit")

    def contains(self, u) -> bool:
        return self.monoid.is_unit(u)

    def coords(self, u) -> tuple:
        return self._from_elem(u)

    def element(self, c):
        return self._to_elem(c)

    def is_finite(self) -> bool:
        return self._elements is not None or self.group.is_finite()

    def order(self):
        if self._elements is not None:
            return len(self._elements)
        return self.group.order()

    def elements(self) -> list:
        if self._elements is not None:
            return list(self._elements)
        return [self.element(c) for c in self.group.elements()]


class PointedMonoid:
    name = "?"
    commutative = True

    def __init__(self):
        self._cache = {}

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def is_zero(self, x) -> bool:
        return x == self.zero

    def is_trivial(self) -> bool:
        return False

    def units(self) -> UnitsGroup:
        return self._cached("units", self._compute_units)

    def primes(self) -> list:
        return self._cached("primes", self._compute_primes)

    def properties(self) -> PropertyReport:
        return self._cached("props", self._compute_properties)

    def pow(self, x, k):
        r = self.one
        for _ in range(k):
            r = self.mul(r, x)
        return r

    def prime_from_key(self, key):
        key = frozenset(key)
        for p in self.primes():
            if p.key == key:
                return p
        return None

    def maximal_ideal(self) -> PrimeIdeal:
        return max(self.primes(), key=lambda p: -len(p.key))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


# ---------------------------------------------------------------- finite tables

class FiniteMonoid(PointedMonoid):
    def __init__(self, table, name=None, element_names=None, check=True):
        super().__init__()
        self.table = tuple(tuple(int(v) for v in row) for row in table)
        self.n = n = len(self.table)
        if n == 0 or any(len(r) != n for r in self.table):
            raise InvalidMonoid("table must be square and nonempty")
        self.zero = 0
        self.one = 1 if n > 1 else 0
        self.name = name or f"table{n}"
        self.element_names = tuple(element_names) if element_names else \
            tuple(["0", "1"] + [f"a{i}" for i in range(2, n)])[:n]
        if check:
            self._check()
        t = self.table
        self.commutative = all(t[i][j] == t[j][i] for i in range(n) for j in range(n))

    def _check(self):
        t, n = self.table, self.n
        for i in range(n):
            for j in range(n):
                if not 0 <= t[i][j] < n:
                    raise InvalidMonoid("table entry out of range")
        for i in range(n):
            if t[0][i] != 0 or t[i][0] != 0:
                raise InvalidMonoid("0 is not absorbing")
            if t[self.one][i] != i or t[i][self.one] != i:
                raise InvalidMonoid("1 is not neutral")
        for a in range(n):
            ta = t[a]
            for b in range(n):
                ab = ta[b]
                tb = t[b]
                for c in range(n):
                    if t[ab][c] != ta[tb[c]]:
                        raise InvalidMonoid(f"not associative at {(a, b, c)}")

    def is_trivial(self):
        return self.n == 1

    def mul(self, x, y):
        return self.table[x][y]

    def contains(self, x) -> bool:
        return isinstance(x, int) and 0 <= x < self.n

    def elements(self):
        return list(range(self.n))

    def nonzero(self):
        return list(range(1, self.n))

    def is_finite(self):
        return True

    def is_unit(self, x) -> bool:
        if x == 0:
            return self.n == 1
        return any(self.table[x][y] == self.one and self.table[y][x] == self.one for y in range(1, self.n))

    def _compute_units(self):
        us = [x for x in range(self.n) if self.is_unit(x)]
        if not self.commutative:
            return UnitsGroup(self, elements=us)
        k = len(us)
        pos = {u: i for i, u in enumerate(us)}
        rels = []
        for i, u in enumerate(us):
            for j, v in enumerate(us):
                if i <= j:
                    c = [0] * k
                    c[i] += 1
                    c[j] += 1
                    c[pos[self.mul(u, v)]] -= 1
                    rels.append(c)
        G = FgAbGroup.from_presentation(k, IntMatrix.from_cols(rels, k))
        to_c = {}
        for u in us:
            e = [0] * k
            e[pos[u]] = 1
            to_c[u] = G.from_presentation_coords(e)
        from_c = {c: u for u, c in to_c.items()}
        return UnitsGroup(self, elements=us, group=G,
                          to_elem=lambda c: from_c[G.reduce(c)], from_elem=lambda u: to_c[u])

    def idempotents(self):
        return [e for e in range(self.n) if self.table[e][e] == e]

    def _compute_properties(self):
        t, n = self.table, self.n
        nz = range(1, n)
        rows = range(n)

        def right_canc(a):
            col = [t[x][a] for x in rows]
            return len(set(col)) == n

        def left_canc(a):
            return len(set(t[a])) == n

        def rpc(a):
            seen = {}
            for x in rows:
                v = t[x][a]
                if v != 0 and v in seen:
                    return False
                seen[v] = x
            return True

        def lpc(a):
            seen = set()
            for v in t[a]:
                if v != 0 and v in seen:
                    return False
                seen.add(v)
            return True

        right_ideals = {a: {t[x][a] for x in rows} for a in nz}
        left_ideals = {a: set(t[a]) for a in nz}
        rrev = all(len(right_ideals[a] & right_ideals[b]) > 1 for a in nz for b in nz)
        lrev = all(len(left_ideals[a] & left_ideals[b]) > 1 for a in nz for b in nz)
        r = all(rpc(a) for a in nz)
        l_ = all(lpc(a) for a in nz)
        canc = all(right_canc(a) and left_canc(a) for a in nz)
        return PropertyReport(canc, r and l_, r, l_, rrev, lrev, rrev and lrev, True)

    def labeled_generators(self):
        return [(x, x) for x in range(1, self.n)]

    def _compute_primes(self):
        if self.n == 1:
            return []
        if not self.commutative:
            raise NonCommutative("primes need a commutative monoid")
        t = self.table
        others = list(range(2, self.n))
        out = []
        for bits in product((0, 1), repeat=len(others)):
            S = {1} | {x for x, b in zip(others, bits) if b}
            ok = True
            for a in range(self.n):
                for b in range(self.n):
                    if (t[a][b] in S) != (a in S and b in S):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                members = frozenset(range(self.n)) - S
                out.append(PrimeIdeal(self, S, members=members))
        out.sort(key=lambda p: (len(p.key), sorted(p.key)))
        return out

    def _prime_contains(self, p, x):
        return x in p.members

    def describe_prime(self, p):
        gens = sorted(p.members - {0})
        return "<" + ", ".join(self.element_names[g] for g in gens) + ">" if gens else "<0>"

    def localize(self, S):
        if not self.commutative:
            raise NonCommutative("localization needs a commutative monoid")
        S = set(S) | {self.one}
        if any(not self.contains(s) for s in S):
            raise InvalidLocalization("element outside monoid")
        changed = True
        while changed:
            new = {self.mul(a, b) for a in S for b in S} - S
            changed = bool(new)
            S |= new
        if 0 in S:
            triv = trivial_monoid()
            return triv, TableHom(self, triv, [0] * self.n)
        t = self.table
        Sl = sorted(S)
        pairs = [(s, a) for s in Sl for a in range(self.n)]

        def equiv(p, q):
            (s, a), (s2, a2) = p, q
            return any(t[u][t[s][a2]] == t[u][t[s2][a]] for u in Sl)

        classes = []
        cls_of = {}
        for p in pairs:
            for k, rep in enumerate(classes):
                if equiv(p, rep):
                    cls_of[p] = k
                    break
            else:
                cls_of[p] = len(classes)
                classes.append(p)
        zero_c = cls_of[(self.one, 0)]
        one_c = cls_of[(self.one, self.one)]
        if zero_c == one_c:
            triv = trivial_monoid()
            return triv, TableHom(self, triv, [0] * self.n)
        order = [zero_c, one_c] + [k for k in range(len(classes)) if k not in (zero_c, one_c)]
        idx = {k: i for i, k in enumerate(order)}
        m = len(classes)
        table = [[0] * m for _ in range(m)]
        for k1 in range(m):
            s1, a1 = classes[k1]
            for k2 in range(m):
                s2, a2 = classes[k2]
                table[idx[k1]][idx[k2]] = idx[cls_of[(t[s1][s2], t[a1][a2])]]
        names = []
        for k in order:
            s, a = classes[k]
            names.append(self.element_names[a] if s == self.one else f"{self.element_names[a]}/{self.element_names[s]}")
        loc = FiniteMonoid(table, name=f"{self.name}[S^-1]", element_names=names)
        mapping = [idx[cls_of[(self.one, a)]] for a in range(self.n)]
        return loc, TableHom(self, loc, mapping)

    def fraction_group(self):
        if not self.properties().cancellative:
            raise NotCancellative(f"{self.name} is not cancellative")
        return self.units().group

    def format(self, x):
        return self.element_names[x]

    def parse_element(self, s):
        if isinstance(s, int):
            return s
        if s in self.element_names:
            return self.element_names.index(s)
        raise ParseError(f"unknown element {s!r}")

    def encode(self, x):
        return x

    def decode(self, v):
        return int(v)

    def to_json(self):
        return {"backend": "finite", "name": self.name, "table": [list(r) for r in self.table],
                "names": list(self.element_names)}


def trivial_monoid():
    m = FiniteMonoid([[0]], name="zero", element_names=["0"])
    m.degenerate = True
    return m


# ---------------------------------------------------------------- exponent

class ExponentMonoid(PointedMonoid):
    def __init__(self, ambient: FgAbGroup, generators, name=None, var=None):
        super().__init__()
        self.ambient = ambient
        gens = []
        for g in generators:
            g = ambient.reduce(g)
            if not ambient.is_zero(g) and g not in gens:
                gens.append(g)
        self.generators = tuple(gens)
        self.zero = ZERO
        self.one = ambient.zero()
        self.name = name or f"exp{len(gens)}"
        self.var = var
        self._reach = None

    # -- basic structure
    def _free(self, g):
        return g[: self.ambient.free_rank]

    def mul(self, x, y):
        if x is ZERO or y is ZERO:
            return ZERO
        return self.ambient.add(x, y)

    def _unit_indices(self):
        def comp():
            vecs = [self._free(g) for g in self.generators]
            return frozenset(positive_relation_support(vecs, self.ambient.free_rank))
        return self._cached("T0", comp)

    def _grading(self):
        """Integer functional vanishing on unit generators, positive on the rest."""
        def comp():
            T0 = self._unit_indices()
            zero = [self._free(g) for j, g in enumerate(self.generators) if j in T0]
            pos = [self._free(g) for j, g in enumerate(self.generators) if j not in T0]
            phi = find_functional(zero, pos, self.ambient.free_rank)
            den = lcm(*[f.denominator for f in phi]) if phi else 1
            return tuple(int(f * den) for f in phi)
        return self._cached("phi", comp)

    def _units_data(self):
        def comp():
            T0 = self._unit_indices()
            U, incl = subgroup(self.ambient, [g for j, g in enumerate(self.generators) if j in T0])
            Q, proj = cokernel(incl)
            return U, incl, Q, proj
        return self._cached("udata", comp)

    def degree(self, g) -> int:
        phi = self._grading()
        return sum(a * b for a, b in zip(phi, self._free(g)))

    def is_unit(self, x) -> bool:
        if x is ZERO:
            return False
        U, incl, _, _ = self._units_data()
        return solve(incl, x) is not None

    def _compute_units(self):
        U, incl, _, _ = self._units_data()
        return UnitsGroup(self, group=U, to_elem=lambda c: incl(c),
                          from_elem=lambda g: _must(solve(incl, g)))

    def nonunit_generators(self):
        T0 = self._unit_indices()
        return [g for j, g in enumerate(self.generators) if j not in T0]

    def _extend_reach(self, level):
        _, _, Q, proj = self._units_data()
        if self._reach is None:
            self._reach = [{Q.zero(): None}]
            T0 = self._unit_indices()
            self._moves = [(j, self.degree(g), proj(g)) for j, g in enumerate(self.generators) if j not in T0]
        reach = self._reach
        while len(reach) <= level:
            b = len(reach)
            cur = {}
            for j, w, q in self._moves:
                if w <= b:
                    for q0 in reach[b - w]:
                        nq = Q.add(q0, q)
                        if nq not in cur:
                            cur[nq] = j
            reach.append(cur)
        return Q, proj

    def membership_witness(self, g):
        """Nonnegative coefficients on non-unit generators plus a unit, or None."""
        if g is ZERO:
            return None
        g = self.ambient.reduce(g)
        v = self.degree(g)
        if v < 0:
            return None
        Q, proj = self._extend_reach(v)
        target = proj(g)
        if target not in self._reach[v]:
            return None
        coeffs = [0] * len(self.generators)
        q, b = target, v
        while b > 0:
            j = self._reach[b][q]
            coeffs[j] += 1
            q = Q.sub(q, proj(self.generators[j]))
            b -= self.degree(self.generators[j])
        rest = g
        for j, c in enumerate(coeffs):
            if c:
                rest = self.ambient.sub(rest, self.ambient.scale(c, self.generators[j]))
        return coeffs, rest

    def contains(self, x) -> bool:
        if x is ZERO:
            return True
        try:
            x = self.ambient.reduce(x)
        except (ValueError, TypeError):
            return False
        return self.membership_witness(x) is not None

    def is_finite(self):
        return not self.nonunit_generators() and self.ambient.is_finite()

    def elements(self):
        if not self.is_finite():
            raise ValueError("infinite monoid")
        return [ZERO] + self.units().elements()

    def idempotents(self):
        return [ZERO, self.one]

    def _compute_properties(self):
        return PropertyReport(True, True, True, True, True, True, True, None)

    def labeled_generators(self):
        return list(enumerate(self.generators))

    # -- faces
    def faces(self):
        """All faces as ``(T, phi)`` with ``T`` the generator indices in the face."""
        return self._cached("faces", self._compute_faces)

    def _compute_faces(self):
        vecs = [self._free(g) for g in self.generators]
        k = len(vecs)

        def closure(S):
            base = [vecs[j] for j in S]
            r = rank_q(base) if base else 0
            return frozenset(j for j in range(k) if j in S or rank_q(base + [vecs[j]]) == r)

        start = closure(frozenset())
        flats, todo = {start}, [start]
        while todo:
            F = todo.pop()
            for j in range(k):
                if j not in F:
                    G = closure(F | {j})
                    if G not in flats:
                        flats.add(G)
                        todo.append(G)
        out = []
        for F in flats:
            phi = find_functional([vecs[j] for j in F], [vecs[j] for j in range(k) if j not in F],
                                  self.ambient.free_rank)
            if phi is not None:
                out.append((F, tuple(phi)))
        out.sort(key=lambda fp: (len(fp[0]), sorted(fp[0])))
        return out

    def _compute_primes(self):
        return [PrimeIdeal(self, T, phi=phi) for T, phi in self.faces()]

    def _prime_contains(self, p, x):
        if x is ZERO:
            return True
        return sum(Fraction(a) * b for a, b in zip(p.phi, self._free(x))) != 0

    def describe_prime(self, p):
        out = [self.format(g) for j, g in enumerate(self.generators) if j not in p.key]
        return "<" + ", ".join(out) + ">" if out else "<0>"

    def localize(self, S):
        S = list(S)
        if any(s is ZERO for s in S):
            triv = trivial_monoid()
            return triv, ZeroHom(self, triv)
        gens = list(self.generators) + [self.ambient.neg(s) for s in S]
        loc = ExponentMonoid(self.ambient, gens, name=f"{self.name}[S^-1]", var=self.var)
        return loc, AmbientHom(self, loc)

    def fraction_group(self):
        return subgroup(self.ambient, self.generators)[0]

    def format(self, x):
        if x is ZERO:
            return "0"
        if self.var and self.ambient.ngens == 1:
            k = x[0]
            return "1" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
        return "(" + ",".join(str(v) for v in x) + ")"

    def parse_element(self, s):
        if s is None or s == "0":
            return ZERO
        if isinstance(s, (list, tuple)):
            return self.ambient.reduce(s)
        if isinstance(s, int) and self.ambient.ngens == 1:
            return self.ambient.reduce((s,))
        if self.var and isinstance(s, str):
            if s == "1":
                return self.one
            m = re.fullmatch(re.escape(self.var) + r"(?:\^(-?\d+))?", s)
            if m:
                return self.ambient.reduce((int(m.group(1) or 1),))
        raise ParseError(f"cannot parse element {s!r}")

    def encode(self, x):
        return None if x is ZERO else list(x)

    def decode(self, v):
        return ZERO if v is None else self.ambient.reduce(v)

    def to_json(self):
        out = {"backend": "exponent", "name": self.name, "ambient": self.ambient.to_json(),
               "generators": [list(g) for g in self.generators]}
        if self.var:
            out["var"] = self.var
        return out


def _must(v):
    if v is None:
        raise ValueError("element is not a unit")
    return v


# ---------------------------------------------------------------- wedge

class WedgeMonoid(PointedMonoid):
    def __init__(self, components, name=None, var_names=None):
        super().__init__()
        if len(components) < 2:
            raise InvalidMonoid("a wedge needs at least two components")
        G = components[0].ambient
        for c in components:
            if c.ambient is not G and c.ambient != G:
                raise InvalidMonoid("wedge components must share an ambient group")
        u0 = components[0].units()
        for c in components[1:]:
            uc = c.units()
            if uc.group != u0.group or not all(components[0].is_unit(uc.element(e)) for e in uc.group.basis()) \
                    or not all(c.is_unit(u0.element(e)) for e in u0.group.basis()):
                raise InvalidMonoid("wedge components must share their unit group")
        for c in components:
            if not c.nonunit_generators():
                raise InvalidMonoid("each wedge component needs a non-unit")
        self.components = tuple(components)
        self.ambient = G
        self.zero = ZERO
        self.one = (-1, G.zero())
        self.name = name or "wedge"
        self.var_names = var_names

    def elem(self, c, g):
        g = self.ambient.reduce(g)
        if self.components[0].is_unit(g):
            return (-1, g)
        return (c, g)

    def mul(self, x, y):
        if x is ZERO or y is ZERO:
            return ZERO
        (c1, g1), (c2, g2) = x, y
        g = self.ambient.add(g1, g2)
        if c1 == -1:
            return (c2, g)
        if c2 == -1 or c1 == c2:
            return (c1, g)
        return ZERO

    def contains(self, x) -> bool:
        if x is ZERO:
            return True
        c, g = x
        if c == -1:
            return self.components[0].is_unit(g)
        return 0 <= c < len(self.components) and self.components[c].contains(g) \
            and not self.components[c].is_unit(g)

    def is_unit(self, x) -> bool:
        return x is not ZERO and x[0] == -1 and self.components[0].is_unit(x[1])

    def _compute_units(self):
        base = self.components[0].units()
        return UnitsGroup(self, group=base.group, to_elem=lambda c: (-1, base.element(c)),
                          from_elem=lambda u: base.coords(u[1]))

    def is_finite(self):
        return False

    def idempotents(self):
        return [ZERO, self.one]

    def _compute_properties(self):
        return PropertyReport(False, True, True, True, False, False, False, None)

    def labeled_generators(self):
        return [((c, j), self.elem(c, g)) for c, comp in enumerate(self.components)
                for j, g in enumerate(comp.generators)]

    def _unit_key(self):
        return {(c, j) for c, comp in enumerate(self.components) for j in comp._unit_indices()}

    def _compute_primes(self):
        base = self._unit_key()
        out = [PrimeIdeal(self, base, component=None)]
        for c, comp in enumerate(self.components):
            T0 = comp._unit_indices()
            for T, phi in comp.faces():
                if T == T0:
                    continue
                key = base | {(c, j) for j in T}
                out.append(PrimeIdeal(self, key, phi=phi, component=c))
        out.sort(key=lambda p: (len(p.key), sorted(p.key)))
        return out

    def _prime_contains(self, p, x):
        if x is ZERO:
            return True
        c, g = x
        if c == -1:
            return False
        if p.component is None or c != p.component:
            return True
        comp = self.components[c]
        return sum(Fraction(a) * b for a, b in zip(p.phi, comp._free(g))) != 0

    def describe_prime(self, p):
        out = [self.format(e) for (c, j), e in self.labeled_generators()
               if (c, j) not in p.key]
        return "<" + ", ".join(out) + ">" if out else "<0>"

    def localize(self, S):
        S = list(S)
        comps = set()
        for s in S:
            if s is ZERO:
                triv = trivial_monoid()
                return triv, ZeroHom(self, triv)
            if s[0] != -1:
                comps.add(s[0])
        if len(comps) >= 2:
            triv = trivial_monoid()
            return triv, ZeroHom(self, triv)
        if not comps:
            return self, AmbientHom(self, self)
        (c,) = comps
        loc, _ = self.components[c].localize([s[1] for s in S])
        return loc, AmbientHom(self, loc)

    def format(self, x):
        if x is ZERO:
            return "0"
        c, g = x
        return "(" + ",".join(str(v) for v in g) + ")"

    def parse_element(self, s):
        if s is None or s == "0":
            return ZERO
        if isinstance(s, (list, tuple)) and len(s) == 2 and isinstance(s[1], (list, tuple)):
            return self.elem(int(s[0]), s[1])
        if isinstance(s, (list, tuple)):
            g = self.ambient.reduce(s)
            for c, comp in enumerate(self.components):
                if comp.contains(g):
                    return self.elem(c, g)
        raise ParseError(f"cannot parse element {s!r}")

    def encode(self, x):
        return None if x is ZERO else [x[0], list(x[1])]

    def decode(self, v):
        return ZERO if v is None else (int(v[0]), self.ambient.reduce(v[1]))

    def to_json(self):
        return {"backend": "wedge", "name": self.name, "ambient": self.ambient.to_json(),
                "components": [[list(g) for g in c.generators] for c in self.components]}


# ---------------------------------------------------------------- homs

class MonoidHom:
    def __init__(self, domain, codomain):
        self.domain = domain
        self.codomain = codomain

    def units_map(self) -> AbHom:
        Ud, Uc = self.domain.units(), self.codomain.units()
        imgs = [Uc.coords(self(Ud.element(e))) for e in Ud.group.basis()]
        return AbHom.from_images(Ud.group, Uc.group, imgs)

    def then(self, other: "MonoidHom") -> "MonoidHom":
        return ComposedHom(other, self)


class AmbientHom(MonoidHom):
    """Coordinate map between exponent/wedge monoids, optionally through a linear map."""

    def __init__(self, domain, codomain, linear: AbHom | None = None):
        super().__init__(domain, codomain)
        self.linear = linear
        self._killed = set()
        if isinstance(domain, WedgeMonoid):
            for c, comp in enumerate(domain.components):
                g = comp.nonunit_generators()[0]
                if not self._target_contains(c, self._lin(g)):
                    self._killed.add(c)

    def _lin(self, g):
        return self.linear(g) if self.linear is not None else g

    def _target_contains(self, c, g):
        cod = self.codomain
        if isinstance(cod, WedgeMonoid):
            return cod.contains(cod.elem(c, g))
        return cod.contains(g)

    def __call__(self, x):
        if x is ZERO:
            return ZERO
        if isinstance(self.domain, WedgeMonoid):
            c, g = x
            if c in self._killed:
                return ZERO
        else:
            c, g = 0, x
        g = self._lin(g)
        if isinstance(self.codomain, WedgeMonoid):
            return self.codomain.elem(c, g)
        return self.codomain.ambient.reduce(g)


class TableHom(MonoidHom):
    def __init__(self, domain, codomain, mapping):
        super().__init__(domain, codomain)
        self.mapping = tuple(mapping)

    def __call__(self, x):
        return self.mapping[x]


class ZeroHom(MonoidHom):
    def __call__(self, x):
        return self.codomain.zero


class ComposedHom(MonoidHom):
    def __init__(self, outer, inner):
        super().__init__(inner.domain, outer.codomain)
        self.outer, self.inner = outer, inner

    def __call__(self, x):
        return self.outer(self.inner(x))


class IdentityHom(MonoidHom):
    def __init__(self, m):
        super().__init__(m, m)

    def __call__(self, x):
        return x


def pullback_prime(hom: MonoidHom, P: PrimeIdeal) -> PrimeIdeal:
    """The prime ``hom^-1(P)`` of the domain."""
    key = {lab for lab, g in hom.domain.labeled_generators() if not P.contains(hom(g))}
    if isinstance(hom.domain, FiniteMonoid):
        key |= {hom.domain.one}
    p = hom.domain.prime_from_key(key)
    if p is None:
        raise ValueError("preimage is not a listed prime")
    return p


def localize_at_prime(A, p: PrimeIdeal):
    """The stalk ``A_p`` and the localization map."""
    if isinstance(A, FiniteMonoid):
        return A.localize(sorted(p.key))
    S = [g for lab, g in A.labeled_generators() if lab in p.key]
    return A.localize(S)


# ---------------------------------------------------------------- constructors

def f1():
    return ExponentMonoid(FgAbGroup(0), [], name="F1")


def free(n, var=None):
    G = FgAbGroup.free(n)
    name = "F1[t]" if n == 1 and var in (None, "t") else f"free({n})"
    return ExponentMonoid(G, G.basis(), name=name, var=var or ("t" if n == 1 else None))


def laurent(n):
    G = FgAbGroup.free(n)
    gens = G.basis() + [G.neg(e) for e in G.basis()]
    return ExponentMonoid(G, gens, name=f"laurent({n})", var="t" if n == 1 else None)


def group_monoid(orders, name=None):
    """``F1[G]`` for a finite abelian group with the given cyclic factors."""
    orders = list(orders)
    G = FgAbGroup.from_presentation(len(orders), IntMatrix.diag(orders))
    gens = [G.from_presentation_coords(e) for e in FgAbGroup.free(len(orders)).basis()]
    label = name or "F1[" + "x".join(f"Z/{d}" for d in orders) + "]"
    return ExponentMonoid(G, gens, name=label, var="t" if G.ngens == 1 else None)


def toric(generators, ambient=None, name=None):
    generators = [tuple(g) for g in generators]
    G = ambient or FgAbGroup.free(len(generators[0]))
    return ExponentMonoid(G, generators, name=name or f"toric({json.dumps([list(g) for g in generators])})")


def truncated(n):
    """``F1[t]/(t^n = 0)``."""
    size = n + 1

    def idx(k):
        return 0 if k >= n else k + 1
    table = [[0] * size for _ in range(size)]
    for a in range(n):
        for b in range(n):
            table[a + 1][b + 1] = idx(a + b)
    names = ["0", "1"] + ["t" if k == 1 else f"t^{k}" for k in range(1, n)]
    return FiniteMonoid(table, name=f"F1[t]/t^{n}=0", element_names=names)


def collapsed(n, d):
    """``F1[t]/(t^n = t^d)`` with ``d < n``."""
    if not 0 <= d < n:
        raise ParseError("need 0 <= d < n")
    size = n + 1

    def red(k):
        return k if k < n else d + (k - d) % (n - d)
    table = [[0] * size for _ in range(size)]
    for a in range(n):
        for b in range(n):
            table[a + 1][b + 1] = red(a + b) + 1
    names = ["0", "1"] + ["t" if k == 1 else f"t^{k}" for k in range(1, n)]
    return FiniteMonoid(table, name=f"F1[t]/t^{n}=t^{d}", element_names=names)


def coordinate_wedge(n, names=None):
    """``F1[T_1..T_n]/(T_i T_j = 0 for i != j)`` inside ``Z^n``."""
    G = FgAbGroup.free(n)
    comps = [ExponentMonoid(G, [e], name=f"C{i}") for i, e in enumerate(G.basis())]
    return WedgeMonoid(comps, name=f"wedge({n})", var_names=names)


_GROUP_RE = re.compile(r"F1\[((?:Z/\d+)(?:x(?:Z/\d+))*)\]")


def named_monoid(spec: str) -> PointedMonoid:
    """Parse a named monoid such as ``F1[t]/t^3=0`` or ``F1[Z/4]``."""
    s = spec.replace(" ", "")
    aliases = {"F1": f1, "F1[t]": lambda: free(1), "F1Z3": lambda: group_monoid([3], "F1[Z/3]"),
               "F1Z4": lambda: group_monoid([4], "F1[Z/4]"), "F1[t,s]/ts=0": lambda: coordinate_wedge(2, ["t", "s"]),
               "F1[t^pm]": lambda: laurent(1)}
    if s in aliases:
        return aliases[s]()
    m = re.fullmatch(r"F1\[t\]/t\^(\d+)=0", s)
    if m:
        return truncated(int(m.group(1)))
    m = re.fullmatch(r"F1\[t\]/t\^(\d+)=t(?:\^(\d+))?", s)
    if m:
        return collapsed(int(m.group(1)), int(m.group(2) or 1))
    m = _GROUP_RE.fullmatch(s)
    if m:
        orders = [int(x[2:]) for x in m.group(1).split("x")]
        return group_monoid(orders)
    m = re.fullmatch(r"(free|laurent|wedge)\((\d+)\)", s)
    if m:
        fn = {"free": free, "laurent": laurent, "wedge": coordinate_wedge}[m.group(1)]
        return fn(int(m.group(2)))
    m = re.fullmatch(r"toric\((.*)\)", s)
    if m:
        try:
            gens = json.loads(m.group(1))
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad toric generators: {exc}") from None
        return toric(gens)
    raise ParseError(f"unknown monoid name {spec!r}")


def monoid_from_json(data) -> PointedMonoid:
    if isinstance(data, str):
        return named_monoid(data)
    backend = data.get("backend")
    if backend == "finite":
        return FiniteMonoid(data["table"], name=data.get("name"), element_names=data.get("names"))
    if backend == "exponent":
        G = FgAbGroup.from_json(data["ambient"])
        return ExponentMonoid(G, [tuple(g) for g in data["generators"]], name=data.get("name"),
                              var=data.get("var"))
    if backend == "wedge":
        G = FgAbGroup.from_json(data["ambient"])
        comps = [ExponentMonoid(G, [tuple(g) for g in gens], name=f"C{i}")
                 for i, gens in enumerate(data["components"])]
        return WedgeMonoid(comps, name=data.get("name"))
    raise ParseError(f"unknown monoid backend {backend!r}")
