"""Exact integer linear algebra and finitely generated abelian groups.

Elements of a group are tuples of integers in *canonical coordinates*:
free coordinates first, then one coordinate per torsion factor reduced
into ``[0, d)``.  Homomorphisms act on column vectors, so the matrix of
``f: G -> H`` has ``H.ngens`` rows and ``G.ngens`` columns.

>>> U, S, V = smith_normal_form(IntMatrix.from_rows([[2, 0], [0, 3]]))
>>> S.diagonal()
[1, 6]
>>> G = FgAbGroup.from_presentation(2, IntMatrix.from_rows([[2, 0], [0, 3]]))
>>> G.torsion
(6,)
"""
from __future__ import annotations

from functools import lru_cache
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntMatrix:
    nrows: int
    ncols: int
    rows: tuple

    def __post_init__(self):
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise ValueError("inconsistent matrix shape")

    @classmethod
    def from_rows(cls, rows, ncols=None) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_cols(cls, cols, nrows) -> "IntMatrix":
        cols = [tuple(c) for c in cols]
        rows = tuple(tuple(c[i] for c in cols) for i in range(nrows))
        return cls(nrows, len(cols), rows)

    @classmethod
    def zeros(cls, m, n) -> "IntMatrix":
        return cls(m, n, tuple((0,) * n for _ in range(m)))

    @classmethod
    def identity(cls, n) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, entries, m=None, n=None) -> "IntMatrix":
        k = len(entries)
        m = k if m is None else m
        n = k if n is None else n
        return cls(m, n, tuple(tuple(entries[i] if i == j and i < k else 0 for j in range(n))
                               for i in range(m)))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j):
        return tuple(r[j] for r in self.rows)

    def cols(self):
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.ncols, self.nrows,
                         tuple(tuple(self.rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in matmul")
        ocols = other.cols()
        return IntMatrix(self.nrows, other.ncols,
                         tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.rows))

    def apply(self, v: Sequence[int]) -> tuple:
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row mismatch in hstack")
        return IntMatrix(self.nrows, self.ncols + other.ncols,
                         tuple(a + b for a, b in zip(self.rows, other.rows)))

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column mismatch in vstack")
        return IntMatrix(self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def select_rows(self, idx) -> "IntMatrix":
        return IntMatrix(len(idx), self.ncols, tuple(self.rows[i] for i in idx))

    def select_cols(self, idx) -> "IntMatrix":
        return IntMatrix(self.nrows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.rows))

    def diagonal(self) -> list:
        return [self.rows[i][i] for i in range(min(self.nrows, self.ncols))]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def tolist(self) -> list:
        return [list(r) for r in self.rows]

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.nrows != self.ncols:
            raise ValueError("det of non-square matrix")
        n = self.nrows
        a = [list(r) for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def smith_normal_form(m: IntMatrix, with_inverses=False):
    """Return ``(U, S, V)`` with ``U @ m @ V == S`` in Smith normal form.

    With ``with_inverses`` also return ``U^-1`` and ``V^-1``.
    Pivots are chosen by minimal absolute value.
    """
    nr, nc = m.nrows, m.ncols
    a = [list(r) for r in m.rows]
    U = [[int(i == j) for j in range(nr)] for i in range(nr)]
    Ui = [[int(i == j) for j in range(nr)] for i in range(nr)]
    V = [[int(i == j) for j in range(nc)] for i in range(nc)]
    Vi = [[int(i == j) for j in range(nc)] for i in range(nc)]

    def row_add(i, t, q):
        # row_i += q * row_t ; inverse: col_t -= q * col_i
        if q == 0:
            return
        ai, at = a[i], a[t]
        for j in range(nc):
            if at[j]:
                ai[j] += q * at[j]
        Ui_, Ut = U[i], U[t]
        for j in range(nr):
            if Ut[j]:
                Ui_[j] += q * Ut[j]
        for r in Ui:
            if r[i]:
                r[t] -= q * r[i]

    def row_swap(i, t):
        if i == t:
            return
        a[i], a[t] = a[t], a[i]
        U[i], U[t] = U[t], U[i]
        for r in Ui:
            r[i], r[t] = r[t], r[i]

    def row_neg(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_add(j, t, q):
        # col_j += q * col_t ; inverse: row_t -= q * row_j
        if q == 0:
            return
        for r in a:
            if r[t]:
                r[j] += q * r[t]
        for r in V:
            if r[t]:
                r[j] += q * r[t]
        vj, vt = Vi[j], Vi[t]
        for k in range(nc):
            if vj[k]:
                vt[k] -= q * vj[k]

    def col_swap(j, t):
        if j == t:
            return
        for r in a:
            r[j], r[t] = r[t], r[j]
        for r in V:
            r[j], r[t] = r[t], r[j]
        Vi[j], Vi[t] = Vi[t], Vi[j]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        row_swap(t, i)
        col_swap(t, j)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_add(i, t, -(a[i][t] // p))
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_add(j, t, -(a[t][j] // p))
                    if a[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remaining entry of row/col t to the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t, nr) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t, nc) if a[t][j]]
                _, i, j = min(cand)
                row_swap(t, i)
                col_swap(t, j)
                continue
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if a[t][t] < 0:
            row_neg(t)
        t += 1

    mk = IntMatrix.from_rows
    res = (mk(U, nr), mk(a, nc), mk(V, nc))
    if with_inverses:
        return res + (mk(Ui, nr), mk(Vi, nc))
    return res


def integer_kernel(m: IntMatrix) -> IntMatrix:
    """Columns form a basis of ``{x in Z^n : m x = 0}``."""
    U, S, V = smith_normal_form(m)
    r = sum(1 for d in S.diagonal() if d)
    return V.select_cols(list(range(r, m.ncols)))


@lru_cache(maxsize=512)
def _snf_cached(m: IntMatrix):
    return smith_normal_form(m)


def solve_integer(m: IntMatrix, b: Sequence[int]):
    """An integer solution of ``m x = b`` or None."""
    U, S, V = _snf_cached(m)
    bb = U.apply(b)
    diag = S.diagonal()
    z = [0] * m.ncols
    for i, v in enumerate(bb):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if v != 0:
                return None
        else:
            if v % d:
                return None
            z[i] = v // d
    return V.apply(z)


@dataclass(frozen=True, eq=False)
class FgAbGroup:
    """``Z^free_rank + Z/d_1 + ... + Z/d_k`` with ``d_i | d_{i+1}``.

    ``to_canon`` maps presentation coordinates to canonical ones and
    ``from_canon`` lifts canonical generators back to presentation coordinates.
    """
    free_rank: int
    torsion: tuple = ()
    labels: tuple | None = None
    npres: int | None = None
    to_canon: IntMatrix | None = field(default=None, repr=False)
    from_canon: IntMatrix | None = field(default=None, repr=False)
    relations: IntMatrix | None = field(default=None, repr=False)

    def __post_init__(self):
        tor = tuple(int(d) for d in self.torsion)
        object.__setattr__(self, "torsion", tor)
        for d in tor:
            if d < 2:
                raise ValueError("torsion orders must be >= 2")
        for a, b in zip(tor, tor[1:]):
            if b % a:
                raise ValueError("torsion must form a divisibility chain")
        if self.npres is None:
            n = self.ngens
            object.__setattr__(self, "npres", n)
            object.__setattr__(self, "to_canon", IntMatrix.identity(n))
            object.__setattr__(self, "from_canon", IntMatrix.identity(n))

    @classmethod
    def free(cls, n) -> "FgAbGroup":
        return cls(n)

    @classmethod
    def cyclic(cls, d) -> "FgAbGroup":
        return cls(0, (d,)) if d != 1 else cls(0)

    @classmethod
    def from_presentation(cls, ngens: int, relations: IntMatrix, labels=None) -> "FgAbGroup":
        """``Z^ngens`` modulo the column span of ``relations``."""
        if relations.nrows != ngens:
            raise ValueError("relation matrix must have ngens rows")
        U, S, V, Ui, Vi = smith_normal_form(relations, with_inverses=True)
        diag = S.diagonal()
        ds = [diag[i] if i < len(diag) else 0 for i in range(ngens)]
        free_idx = [i for i, d in enumerate(ds) if d == 0]
        tor_idx = [i for i, d in enumerate(ds) if d >= 2]
        order = free_idx + tor_idx
        return cls(len(free_idx), tuple(ds[i] for i in tor_idx), labels, ngens,
                   U.select_rows(order), Ui.select_cols(order), relations)

    @classmethod
    def from_finite_abelian(cls, orders: Iterable[int]) -> "FgAbGroup":
        orders = list(orders)
        return cls.from_presentation(len(orders), IntMatrix.diag(orders))

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    def __eq__(self, other):
        return (isinstance(other, FgAbGroup) and self.free_rank == other.free_rank
                and self.torsion == other.torsion)

    def __hash__(self):
        return hash((self.free_rank, self.torsion))

    def is_isomorphic(self, other) -> bool:
        return self == other

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self):
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def reduce(self, x) -> tuple:
        x = tuple(int(v) for v in x)
        if len(x) != self.ngens:
            raise ValueError(f"element {x} has wrong length for {self}")
        f = self.free_rank
        return x[:f] + tuple(v % d for v, d in zip(x[f:], self.torsion))

    def zero(self) -> tuple:
        return (0,) * self.ngens

    def basis(self) -> list:
        return [tuple(int(i == j) for j in range(self.ngens)) for i in range(self.ngens)]

    def add(self, x, y) -> tuple:
        return self.reduce(tuple(a + b for a, b in zip(x, y)))

    def neg(self, x) -> tuple:
        return self.reduce(tuple(-a for a in x))

    def sub(self, x, y) -> tuple:
        return self.reduce(tuple(a - b for a, b in zip(x, y)))

    def scale(self, k, x) -> tuple:
        return self.reduce(tuple(k * a for a in x))

    def is_zero(self, x) -> bool:
        return all(v == 0 for v in self.reduce(x))

    def from_presentation_coords(self, v) -> tuple:
        return self.reduce(self.to_canon.apply(v))

    def to_presentation_coords(self, x) -> tuple:
        return self.from_canon.apply(x)

    def elements(self):
        if self.free_rank:
            raise ValueError("cannot enumerate an infinite group")
        return [tuple(c) for c in product(*[range(d) for d in self.torsion])]

    def torsion_matrix(self) -> IntMatrix:
        """Relations of the canonical coordinates, one column per torsion factor."""
        n, f = self.ngens, self.free_rank
        cols = []
        for k, d in enumerate(self.torsion):
            c = [0] * n
            c[f + k] = d
            cols.append(c)
        return IntMatrix.from_cols(cols, n)

    def element_order(self, x):
        x = self.reduce(x)
        if any(x[: self.free_rank]):
            return None
        n = 1
        for v, d in zip(x[self.free_rank:], self.torsion):
            from math import gcd
            k = d // gcd(v, d)
            n = n * k // gcd(n, k)
        return n

    def rebased(self, basis_elements) -> "FgAbGroup":
        """Same torsion-free group with ``basis_elements`` as the new canonical basis."""
        if self.torsion:
            raise ValueError("rebasing only supported for free groups")
        M = IntMatrix.from_cols(basis_elements, self.ngens)
        if abs(M.det()) != 1:
            raise ValueError("new basis is not unimodular")
        Minv = _unimodular_inverse(M)
        return FgAbGroup(self.free_rank, (), self.labels, self.npres,
                         Minv @ self.to_canon, self.from_canon @ M, self.relations)

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data) -> "FgAbGroup":
        return cls(int(data["free_rank"]), tuple(data.get("torsion", [])))

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"FgAbGroup({self.describe()})"


def _unimodular_inverse(M: IntMatrix) -> IntMatrix:
    U, S, V = smith_normal_form(M)
    # S is the identity for a unimodular matrix, so M^-1 = V U
    return V @ U


@dataclass(frozen=True)
class AbHom:
    domain: FgAbGroup
    codomain: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        if self.matrix.nrows != self.codomain.ngens or self.matrix.ncols != self.domain.ngens:
            raise ValueError("matrix shape does not match groups")
        f = self.domain.free_rank
        for k, d in enumerate(self.domain.torsion):
            if not self.codomain.is_zero(tuple(d * x for x in self.matrix.col(f + k))):
                raise ValueError("matrix does not respect torsion")

    @classmethod
    def from_images(cls, domain, codomain, images) -> "AbHom":
        images = [codomain.reduce(v) for v in images]
        return cls(domain, codomain, IntMatrix.from_cols(images, codomain.ngens))

    @classmethod
    def from_presentation_matrix(cls, domain, codomain, M: IntMatrix) -> "AbHom":
        """Build from a matrix acting on presentation coordinates."""
        can = codomain.to_canon @ M @ domain.from_canon
        cols = [codomain.reduce(c) for c in can.cols()]
        return cls(domain, codomain, IntMatrix.from_cols(cols, codomain.ngens))

    @classmethod
    def zero(cls, domain, codomain) -> "AbHom":
        return cls(domain, codomain, IntMatrix.zeros(codomain.ngens, domain.ngens))

    @classmethod
    def identity(cls, G) -> "AbHom":
        return cls(G, G, IntMatrix.identity(G.ngens))

    def __call__(self, x) -> tuple:
        return self.codomain.reduce(self.matrix.apply(self.domain.reduce(x)))

    def compose(self, inner: "AbHom") -> "AbHom":
        """``self ∘ inner``."""
        return AbHom.from_images(inner.domain, self.codomain,
                                 [self(inner(e)) for e in inner.domain.basis()])

    def __sub__(self, other: "AbHom") -> "AbHom":
        return AbHom.from_images(self.domain, self.codomain,
                                 [self.codomain.sub(self(e), other(e)) for e in self.domain.basis()])

    def __add__(self, other: "AbHom") -> "AbHom":
        return AbHom.from_images(self.domain, self.codomain,
                                 [self.codomain.add(self(e), other(e)) for e in self.domain.basis()])

    def _lifted(self) -> IntMatrix:
        return self.matrix.hstack(self.codomain.torsion_matrix())

    def is_injective(self) -> bool:
        return kernel(self)[0].is_trivial()

    def is_surjective(self) -> bool:
        return cokernel(self)[0].is_trivial()

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()


def subgroup(G: FgAbGroup, elements) -> tuple:
    """The subgroup generated by ``elements`` and its inclusion into G."""
    elements = [G.reduce(e) for e in elements]
    q = len(elements)
    E = IntMatrix.from_cols(elements, G.ngens) if q else IntMatrix.zeros(G.ngens, 0)
    K = integer_kernel(E.hstack(G.torsion_matrix()))
    rel = K.select_rows(list(range(q)))
    S = FgAbGroup.from_presentation(q, rel)
    incl_cols = [G.reduce(E.apply(c)) for c in S.from_canon.cols()] if q else []
    return S, AbHom(S, G, IntMatrix.from_cols(incl_cols, G.ngens))


def kernel(f: AbHom) -> tuple:
    n = f.domain.ngens
    K = integer_kernel(f._lifted())
    gens = [c[:n] for c in K.cols()]
    return subgroup(f.domain, gens)


def cokernel(f: AbHom) -> tuple:
    H = f.codomain
    rel = f.matrix.hstack(H.torsion_matrix())
    Q = FgAbGroup.from_presentation(H.ngens, rel)
    proj = AbHom.from_images(H, Q, [Q.from_presentation_coords(e) for e in H.basis()])
    return Q, proj


def solve(f: AbHom, target):
    """Some ``x`` with ``f(x) == target``, or None."""
    target = f.codomain.reduce(target)
    sol = solve_integer(f._lifted(), target)
    if sol is None:
        return None
    return f.domain.reduce(sol[: f.domain.ngens])


def image_contains(f: AbHom, target) -> bool:
    return solve(f, target) is not None


def direct_sum(groups: Sequence[FgAbGroup]) -> tuple:
    """``(sum, injections, projections)`` for a finite list of groups."""
    sizes = [g.ngens for g in groups]
    n = sum(sizes)
    offs = [sum(sizes[:i]) for i in range(len(groups))]
    tors = []
    for g, o in zip(groups, offs):
        t = g.torsion_matrix()
        for c in t.cols():
            col = [0] * n
            col[o:o + g.ngens] = c
            tors.append(col)
    # torsion-free summands: coordinates just concatenate
    S = FgAbGroup.free(n) if not tors else FgAbGroup.from_presentation(n, IntMatrix.from_cols(tors, n))
    pres = [S.to_presentation_coords(e) for e in S.basis()] if tors else S.basis()
    injections, projections = [], []
    for g, o in zip(groups, offs):
        imgs = []
        for e in g.basis():
            v = [0] * n
            v[o:o + g.ngens] = e
            imgs.append(S.from_presentation_coords(v) if tors else tuple(v))
        injections.append(AbHom.from_images(g, S, imgs))
        pimgs = [g.reduce(v[o:o + g.ngens]) for v in pres]
        projections.append(AbHom.from_images(S, g, pimgs))
    return S, injections, projections


def lex_key(x):
    return tuple(x)


@dataclass(frozen=True)
class AffineInvolution:
    """``x -> linear(x) + shift`` with square equal to the identity."""
    group: FgAbGroup
    linear: AbHom
    shift: tuple

    def __post_init__(self):
        G = self.group
        object.__setattr__(self, "shift", G.reduce(self.shift))
        if not G.is_zero(G.add(self.linear(self.shift), self.shift)):
            raise ValueError("affine map is not an involution (shift)")
        for e in G.basis():
            if G.reduce(self.linear(self.linear(e))) != G.reduce(e):
                raise ValueError("linear part is not an involution")

    @classmethod
    def negation(cls, G: FgAbGroup, shift=None) -> "AffineInvolution":
        lin = AbHom(G, G, IntMatrix.diag([-1] * G.ngens))
        return cls(G, lin, G.zero() if shift is None else shift)

    def __call__(self, x) -> tuple:
        return self.group.add(self.linear(x), self.shift)

    def to_json(self):
        return {"group": self.group.to_json(), "linear": self.linear.matrix.tolist(),
                "shift": list(self.shift)}

    @classmethod
    def from_json(cls, data) -> "AffineInvolution":
        G = FgAbGroup.from_json(data["group"])
        M = IntMatrix.from_rows(data["linear"], G.ngens)
        return cls(G, AbHom(G, G, M), tuple(data["shift"]))


@dataclass(frozen=True)
class FixedCoset:
    """Fixed points of an involution: empty, or ``particular + image(translations)``."""
    involution: AffineInvolution
    particular: tuple | None
    translations: AbHom | None

    @property
    def group(self):
        return self.involution.group

    def is_empty(self) -> bool:
        return self.particular is None

    def contains(self, x) -> bool:
        return self.involution(x) == self.group.reduce(x)

    def enumerate(self):
        if self.is_empty():
            return []
        if not self.group.is_finite():
            if self.translations.domain.is_trivial():
                return [self.particular]
            raise ValueError("infinite fixed set")
        return sorted(x for x in self.group.elements() if self.contains(x))


@dataclass(frozen=True)
class OrbitSpace:
    """Orbits of an involution, represented by their larger element."""
    involution: AffineInvolution

    @property
    def group(self):
        return self.involution.group

    def rep(self, x) -> tuple:
        x = self.group.reduce(x)
        return max(x, self.involution(x), key=lex_key)

    def is_rep(self, x) -> bool:
        return self.rep(x) == self.group.reduce(x)

    def is_free_orbit(self, x) -> bool:
        return self.involution(x) != self.group.reduce(x)

    def contains(self, x) -> bool:
        try:
            self.group.reduce(x)
        except ValueError:
            return False
        return True

    def enumerate(self):
        if not self.group.is_finite():
            raise ValueError("infinite orbit space")
        return sorted({self.rep(x) for x in self.group.elements()})


def involution_fixed_and_orbits(inv: AffineInvolution) -> tuple:
    G = inv.group
    # inv(x) = x  <=>  (L - I) x = -shift
    diff = inv.linear - AbHom.identity(G)
    x0 = solve(diff, G.neg(inv.shift))
    if x0 is None:
        return FixedCoset(inv, None, None), OrbitSpace(inv)
    _, incl = kernel(diff)
    return FixedCoset(inv, x0, incl), OrbitSpace(inv)
