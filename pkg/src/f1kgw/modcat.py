"""Free and projective modules over pointed monoids, with monomial morphisms.

Modules are right modules ``M = s_1 A + ... + s_n A``.  A morphism
``f: M -> N`` is stored as a sparse ``rank(N) x rank(M)`` matrix with at most
one nonzero entry per row and per column; ``f(s_j) = s_i f_ij``.  Composition
multiplies entries in matrix order, ``(f g)_ik = f_ij g_jk``.

Admissible monics follow one fixed convention: an entry ``a`` may occur in an
inflation iff ``x -> a x`` is injective on ``A``.  Deflations need unit
entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .abgroup import AbHom, IntMatrix
from .errors import (InvalidDuality, NotAConflation, NotComposable, NotReversible,
                     SupportViolation, UnsupportedMorphism)
from .monoid import ExponentMonoid, FiniteMonoid, PointedMonoid, WedgeMonoid, ZERO


@dataclass(frozen=True, eq=False)
class FreeModule:
    monoid: PointedMonoid
    rank: int
    labels: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(f"s{i + 1}" for i in range(self.rank)))
        if len(self.labels) != self.rank:
            raise ValueError("one label per basis element")

    def __eq__(self, other):
        return isinstance(other, FreeModule) and other.monoid is self.monoid and other.rank == self.rank

    def __hash__(self):
        return hash((id(self.monoid), self.rank))

    def direct_sum(self, other: "FreeModule") -> "FreeModule":
        if other.monoid is not self.monoid:
            raise NotComposable("modules over different monoids")
        return FreeModule(self.monoid, self.rank + other.rank, self.labels + other.labels)


@dataclass(frozen=True)
class ProjectiveModule:
    """``A e_1 + ... + A e_n`` for idempotents ``e_i``."""
    monoid: PointedMonoid
    idempotents: tuple

    def __post_init__(self):
        A = self.monoid
        for e in self.idempotents:
            if A.mul(e, e) != e:
                raise ValueError(f"{e!r} is not idempotent")

    @property
    def rank(self):
        return len(self.idempotents)

    def is_free(self) -> bool:
        return all(e == self.monoid.one for e in self.idempotents)


def _left_mult_injective(A, a) -> bool:
    if a == A.zero:
        return A.is_trivial()
    if isinstance(A, ExponentMonoid):
        return True
    if isinstance(A, WedgeMonoid):
        return A.is_unit(a)
    return len({A.mul(a, x) for x in A.elements()}) == A.n


def _left_mult_normal(A, a) -> bool:
    if isinstance(A, (ExponentMonoid, WedgeMonoid)):
        return True
    seen = set()
    for x in A.elements():
        v = A.mul(a, x)
        if v != A.zero and v in seen:
            return False
        seen.add(v)
    return True


class MonomialMatrix:
    def __init__(self, domain: FreeModule, codomain: FreeModule, entries=None):
        if domain.monoid is not codomain.monoid:
            raise NotComposable("modules over different monoids")
        self.domain, self.codomain = domain, codomain
        A = domain.monoid
        ent = {}
        rows, cols = set(), set()
        for (i, j), a in (entries.items() if isinstance(entries, dict) else (entries or [])):
            if not (0 <= i < codomain.rank and 0 <= j < domain.rank):
                raise ValueError(f"index {(i, j)} out of range")
            if not A.contains(a):
                raise ValueError(f"entry {a!r} not in monoid")
            if a == A.zero:
                continue
            if i in rows or j in cols:
                raise UnsupportedMorphism("more than one nonzero entry in a row or column")
            rows.add(i)
            cols.add(j)
            ent[(i, j)] = a
        self.entries = ent

    @property
    def monoid(self):
        return self.domain.monoid

    @classmethod
    def identity(cls, M: FreeModule):
        return cls(M, M, {(i, i): M.monoid.one for i in range(M.rank)})

    @classmethod
    def zero(cls, M, N):
        return cls(M, N, {})

    @classmethod
    def from_dense(cls, domain, codomain, rows):
        A = domain.monoid
        ent = {}
        for i, row in enumerate(rows):
            for j, a in enumerate(row):
                if a != A.zero:
                    ent[(i, j)] = a
        return cls(domain, codomain, ent)

    def entry(self, i, j):
        return self.entries.get((i, j), self.monoid.zero)

    def column_target(self, j):
        for (i, jj), a in self.entries.items():
            if jj == j:
                return i, a
        return None

    def row_source(self, i):
        for (ii, j), a in self.entries.items():
            if ii == i:
                return j, a
        return None

    def __eq__(self, other):
        return (isinstance(other, MonomialMatrix) and other.domain == self.domain
                and other.codomain == self.codomain and other.entries == self.entries)

    def __hash__(self):
        return hash(tuple(sorted(self.entries.items(), key=repr)))

    def __repr__(self):
        return f"MonomialMatrix({self.codomain.rank}x{self.domain.rank}, {self.entries})"

    def apply_basis(self, j):
        """Image of the basis vector ``s_j`` as ``(i, a)`` or None."""
        return self.column_target(j)

    def to_json(self, encode=None):
        enc = encode or self.monoid.encode
        return {"rows": self.codomain.rank, "cols": self.domain.rank,
                "entries": [[i, j, enc(a)] for (i, j), a in sorted(self.entries.items())]}

    @classmethod
    def from_json(cls, A, data):
        M, N = FreeModule(A, data["cols"]), FreeModule(A, data["rows"])
        return cls(M, N, {(i, j): A.decode(a) for i, j, a in data["entries"]})


def compose(f: MonomialMatrix, g: MonomialMatrix) -> MonomialMatrix:
    """``f o g``."""
    if g.codomain != f.domain:
        raise NotComposable(f"cannot compose {f.domain.rank}-source with {g.codomain.rank}-target")
    A = f.monoid
    props = A.properties() if isinstance(A, FiniteMonoid) else None
    out = {}
    for (j, k), b in g.entries.items():
        t = f.column_target(j)
        if t is None:
            continue
        i, a = t
        v = A.mul(a, b)
        if v == A.zero and props is not None and not props.pc:
            raise SupportViolation("product entry vanished over a non-pc monoid", index=[i, k])
        out[(i, k)] = v
    return MonomialMatrix(g.domain, f.codomain, out)


def block_sum(f: MonomialMatrix, g: MonomialMatrix) -> MonomialMatrix:
    ent = dict(f.entries)
    r, c = f.codomain.rank, f.domain.rank
    for (i, j), a in g.entries.items():
        ent[(i + r, j + c)] = a
    return MonomialMatrix(f.domain.direct_sum(g.domain), f.codomain.direct_sum(g.codomain), ent)


@dataclass(frozen=True)
class MorphismReport:
    normal: bool
    inflation: bool
    deflation: bool
    iso: bool


def classify_morphism(f: MonomialMatrix) -> MorphismReport:
    A = f.monoid
    normal = all(_left_mult_normal(A, a) for a in f.entries.values())
    cols = {j for (_, j) in f.entries}
    rows = {i for (i, _) in f.entries}
    infl = normal and len(cols) == f.domain.rank and all(_left_mult_injective(A, a) for a in f.entries.values())
    defl = normal and len(rows) == f.codomain.rank and all(A.is_unit(a) for a in f.entries.values())
    iso = f.domain.rank == f.codomain.rank and infl and defl and len(cols) == f.domain.rank
    return MorphismReport(normal, infl, defl, iso)


@dataclass
class Conflation:
    inflation: MonomialMatrix
    deflation: MonomialMatrix

    def validate(self):
        i, p = self.inflation, self.deflation
        if i.codomain != p.domain:
            raise NotAConflation("middle objects differ")
        if not classify_morphism(i).inflation:
            raise NotAConflation("first map is not an inflation")
        if not classify_morphism(p).deflation:
            raise NotAConflation("second map is not a deflation")
        A = i.monoid
        if any(not A.is_unit(a) for a in i.entries.values()):
            raise NotAConflation("inflation is not an isomorphism onto the kernel")
        image = {r for (r, _) in i.entries}
        killed = {j for j in range(p.domain.rank) if p.column_target(j) is None}
        if image != killed:
            raise NotAConflation("image of the inflation differs from the kernel of the deflation")


def split_conflation(c: Conflation) -> MonomialMatrix:
    """The isomorphism ``U + W -> V`` restricting to ``i`` and splitting ``pi``."""
    c.validate()
    i, p = c.inflation, c.deflation
    A = i.monoid
    U, V, W = i.domain, i.codomain, p.codomain
    ent = dict(i.entries)
    units = A.units()
    for (k, j), a in p.entries.items():
        ent[(j, U.rank + k)] = units.inv(a)
    return MonomialMatrix(U.direct_sum(W), V, ent)


def all_splittings(c: Conflation) -> list:
    """Every isomorphism ``U + W -> V`` restricting to ``i`` and splitting ``pi``, by exhaustion."""
    c.validate()
    i, p = c.inflation, c.deflation
    S = i.domain.direct_sum(p.codomain)
    nU = i.domain.rank
    jW = MonomialMatrix(p.codomain, S, {(nU + k, k): S.monoid.one for k in range(p.codomain.rank)})
    jU = MonomialMatrix(i.domain, S, {(k, k): S.monoid.one for k in range(nU)})
    idW = MonomialMatrix.identity(p.codomain)
    out = []
    for f in _isos(S, i.codomain):
        if compose(f, jU) == i and compose(p, compose(f, jW)) == idW:
            out.append(f)
    return out


def _isos(M: FreeModule, N: FreeModule):
    units = M.monoid.units().elements()
    for perm in permutations(range(N.rank)):
        for us in product(units, repeat=M.rank):
            yield MonomialMatrix(M, N, {(perm[j], j): us[j] for j in range(M.rank)})


def section_of(p: MonomialMatrix) -> MonomialMatrix:
    A = p.monoid
    units = A.units()
    return MonomialMatrix(p.codomain, p.domain, {(j, k): units.inv(a) for (k, j), a in p.entries.items()})


# ---------------------------------------------------------------- duality

class Involution:
    """A monoid involution ``sigma``; subclasses fix the representation."""

    def __call__(self, x):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class IdentityInvolution(Involution):
    def __call__(self, x):
        return x

    def to_json(self):
        return "id"


class TableInvolution(Involution):
    def __init__(self, perm):
        self.perm = tuple(perm)

    def __call__(self, x):
        return self.perm[x]

    def to_json(self):
        return {"perm": list(self.perm)}


class AmbientInvolution(Involution):
    def __init__(self, linear: AbHom):
        self.linear = linear

    def __call__(self, x):
        if x is ZERO:
            return ZERO
        return self.linear(x)

    def to_json(self):
        return {"matrix": self.linear.matrix.tolist()}


def negation_involution(A: ExponentMonoid) -> AmbientInvolution:
    G = A.ambient
    return AmbientInvolution(AbHom(G, G, IntMatrix.diag([-1] * G.ngens)))


class DualityDatum:
    """``(A, sigma, epsilon)`` with ``sigma`` an anti-involution and ``epsilon sigma(epsilon) = 1``."""

    def __init__(self, monoid, sigma: Involution | None = None, epsilon=None, check=True):
        self.monoid = monoid
        self.sigma = sigma or IdentityInvolution()
        self.epsilon = monoid.one if epsilon is None else epsilon
        if check:
            self._check()

    def _check(self):
        A, s, e = self.monoid, self.sigma, self.epsilon
        if s(A.zero) != A.zero or s(A.one) != A.one:
            raise InvalidDuality("sigma must fix 0 and 1")
        if isinstance(A, FiniteMonoid):
            els = A.elements()
            for x in els:
                if s(s(x)) != x:
                    raise InvalidDuality("sigma is not an involution")
                for y in els:
                    if s(A.mul(x, y)) != A.mul(s(y), s(x)):
                        raise InvalidDuality("sigma is not an anti-homomorphism")
        elif isinstance(A, ExponentMonoid):
            for g in A.generators:
                if not A.contains(s(g)) or s(s(g)) != g:
                    raise InvalidDuality("sigma does not preserve the monoid")
        elif not isinstance(s, IdentityInvolution):
            raise InvalidDuality("only the identity involution is supported on this backend")
        if not A.is_unit(e):
            raise InvalidDuality("epsilon must be a unit")
        if A.mul(e, s(e)) != A.one:
            raise InvalidDuality("epsilon * sigma(epsilon) != 1")
        if isinstance(A, FiniteMonoid) and not A.commutative:
            if any(A.mul(e, x) != A.mul(x, e) for x in A.elements()):
                raise InvalidDuality("epsilon must be central")

    def to_json(self):
        return {"sigma": self.sigma.to_json(), "epsilon": self.monoid.encode(self.epsilon)}


def _require_dualizable(A):
    p = A.properties()
    if not (p.right_reversible and p.rpc):
        raise NotReversible(f"{A.name} is not right reversible and rpc")


def normal_dual(M: FreeModule):
    """The dual module with its dual basis labels."""
    _require_dualizable(M.monoid)
    labels = tuple(f"{l}^v" for l in M.labels)
    return FreeModule(M.monoid, M.rank, labels), list(labels)


def dual_of_morphism(f: MonomialMatrix, d: DualityDatum) -> MonomialMatrix:
    """``P(f)``: the sigma-twisted transpose."""
    _require_dualizable(f.monoid)
    Md, _ = normal_dual(f.domain)
    Nd, _ = normal_dual(f.codomain)
    return MonomialMatrix(Nd, Md, {(j, i): d.sigma(a) for (i, j), a in f.entries.items()})


def theta(M: FreeModule, d: DualityDatum) -> MonomialMatrix:
    """The double-dual comparison ``M -> P(P(M))``."""
    Mdd, _ = normal_dual(normal_dual(M)[0])
    return MonomialMatrix(M, Mdd, {(i, i): d.epsilon for i in range(M.rank)})


def monomial_isos(M: FreeModule):
    """Every automorphism of a free module over a monoid with finitely many units."""
    A = M.monoid
    units = A.units().elements()
    out = []
    for perm in permutations(range(M.rank)):
        for us in product(units, repeat=M.rank):
            out.append(MonomialMatrix(M, M, {(perm[j], j): us[j] for j in range(M.rank)}))
    return out

