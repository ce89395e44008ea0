"""Finitely supported integer maps over possibly infinite index sets.

An index descriptor knows how to canonicalize an index and, when finite, how
to enumerate.  A ``FinSuppMap`` stores only canonical keys with nonzero
coefficients, so equality is dictionary equality.
"""
from __future__ import annotations

import json

from .abgroup import AffineInvolution, FgAbGroup, FixedCoset, OrbitSpace, involution_fixed_and_orbits
from .errors import DescriptorMismatch, InfiniteIndex


class IndexDescriptor:
    kind = "?"

    def canonical(self, key):
        raise NotImplementedError

    def contains(self, key) -> bool:
        try:
            self.canonical(key)
        except (ValueError, TypeError, KeyError):
            return False
        return True

    def is_finite(self) -> bool:
        return False

    def enumerate(self):
        raise InfiniteIndex(f"{self.kind} index set is infinite")

    def encode_key(self, key):
        return list(key)

    def decode_key(self, v):
        return tuple(v)

    def __eq__(self, other):
        return isinstance(other, IndexDescriptor) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(json.dumps(self.to_json(), sort_keys=True))


class FiniteList(IndexDescriptor):
    kind = "finite"

    def __init__(self, items, name=None):
        self.items = tuple(items)
        self._set = set(self.items)
        self.name = name

    def canonical(self, key):
        if key not in self._set:
            raise KeyError(key)
        return key

    def is_finite(self):
        return True

    def enumerate(self):
        return list(self.items)

    def encode_key(self, key):
        return list(key) if isinstance(key, tuple) else key

    def decode_key(self, v):
        return tuple(v) if isinstance(v, list) else v

    def to_json(self):
        return {"kind": self.kind, "items": [self.encode_key(i) for i in self.items]}


class AbGroupElements(IndexDescriptor):
    kind = "group"

    def __init__(self, group: FgAbGroup):
        self.group = group

    def canonical(self, key):
        return self.group.reduce(key)

    def is_finite(self):
        return self.group.is_finite()

    def enumerate(self):
        if not self.is_finite():
            return super().enumerate()
        return self.group.elements()

    def to_json(self):
        return {"kind": self.kind, "group": self.group.to_json()}


class FixedCosetIndex(IndexDescriptor):
    kind = "fixed"

    def __init__(self, coset: FixedCoset):
        self.coset = coset

    def canonical(self, key):
        x = self.coset.group.reduce(key)
        if not self.coset.contains(x):
            raise ValueError(f"{x} is not a fixed point")
        return x

    def is_finite(self):
        c = self.coset
        return c.is_empty() or c.group.is_finite() or c.translations.domain.is_trivial()

    def enumerate(self):
        if not self.is_finite():
            return super().enumerate()
        return self.coset.enumerate()

    def to_json(self):
        return {"kind": self.kind, "involution": self.coset.involution.to_json()}


class OrbitIndex(IndexDescriptor):
    kind = "orbits"

    def __init__(self, orbits: OrbitSpace):
        self.orbits = orbits

    def canonical(self, key):
        return self.orbits.rep(key)

    def is_finite(self):
        return self.orbits.group.is_finite()

    def enumerate(self):
        if not self.is_finite():
            return super().enumerate()
        return self.orbits.enumerate()

    def to_json(self):
        return {"kind": self.kind, "involution": self.orbits.involution.to_json()}


class Product(IndexDescriptor):
    kind = "product"

    def __init__(self, factors):
        self.factors = tuple(factors)

    def canonical(self, key):
        if len(key) != len(self.factors):
            raise ValueError("wrong arity")
        return tuple(f.canonical(k) for f, k in zip(self.factors, key))

    def is_finite(self):
        return all(f.is_finite() for f in self.factors)

    def enumerate(self):
        from itertools import product
        return [tuple(t) for t in product(*[f.enumerate() for f in self.factors])]

    def encode_key(self, key):
        return [f.encode_key(k) for f, k in zip(self.factors, key)]

    def decode_key(self, v):
        return tuple(f.decode_key(k) for f, k in zip(self.factors, v))

    def to_json(self):
        return {"kind": self.kind, "factors": [f.to_json() for f in self.factors]}


def descriptor_from_json(data) -> IndexDescriptor:
    kind = data["kind"]
    if kind == "finite":
        return FiniteList([tuple(i) if isinstance(i, list) else i for i in data["items"]])
    if kind == "group":
        return AbGroupElements(FgAbGroup.from_json(data["group"]))
    if kind in ("fixed", "orbits"):
        fixed, orbits = involution_fixed_and_orbits(AffineInvolution.from_json(data["involution"]))
        return FixedCosetIndex(fixed) if kind == "fixed" else OrbitIndex(orbits)
    if kind == "product":
        return Product([descriptor_from_json(f) for f in data["factors"]])
    raise ValueError(f"unknown descriptor kind {kind!r}")


def sort_key(k):
    # lexicographic on canonical coordinates, with a type tag for mixed keys
    if isinstance(k, bool) or k is None:
        return (0, str(k))
    if isinstance(k, int):
        return (1, k)
    if isinstance(k, (list, tuple)):
        return (3, tuple(sort_key(v) for v in k))
    return (2, str(k))


class FinSuppMap:
    """A finitely supported map ``index -> Z``."""

    __slots__ = ("descriptor", "terms")

    def __init__(self, descriptor: IndexDescriptor, terms=None):
        self.descriptor = descriptor
        acc = {}
        items = terms.items() if isinstance(terms, dict) else (terms or [])
        for k, c in items:
            k = descriptor.canonical(k)
            acc[k] = acc.get(k, 0) + int(c)
        self.terms = {k: c for k, c in acc.items() if c}

    @classmethod
    def indicator(cls, descriptor, key, coeff=1):
        return cls(descriptor, [(key, coeff)])

    @classmethod
    def zero(cls, descriptor):
        return cls(descriptor)

    def _check(self, other):
        if not isinstance(other, FinSuppMap) or other.descriptor != self.descriptor:
            raise DescriptorMismatch("finitely supported maps over different index sets")

    def __getitem__(self, key):
        return self.terms.get(self.descriptor.canonical(key), 0)

    def __add__(self, other):
        self._check(other)
        return FinSuppMap(self.descriptor, list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self):
        return FinSuppMap(self.descriptor, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, n):
        return FinSuppMap(self.descriptor, {k: n * c for k, c in self.terms.items()})

    def __eq__(self, other):
        self._check(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items(), key=lambda kc: sort_key(kc[0]))))

    def is_zero(self):
        return not self.terms

    def support(self):
        return sorted(self.terms, key=self._key_order)

    def _key_order(self, k):
        return sort_key(self.descriptor.encode_key(k))

    def rank(self) -> int:
        """Sum of coefficients (the augmentation)."""
        return sum(self.terms.values())

    def convolve(self, other, law=None):
        """Group-ring product; ``law`` defaults to the descriptor's group addition."""
        self._check(other)
        if law is None:
            if not isinstance(self.descriptor, AbGroupElements):
                raise DescriptorMismatch("convolution needs a group index set")
            law = self.descriptor.group.add
        out = []
        for a, x in self.terms.items():
            for b, y in other.terms.items():
                out.append((law(a, b), x * y))
        return FinSuppMap(self.descriptor, out)

    __mul__ = convolve

    def to_json(self):
        d = self.descriptor
        return {"descriptor": d.to_json(),
                "terms": [[d.encode_key(k), self.terms[k]] for k in self.support()]}

    @classmethod
    def from_json(cls, data):
        d = descriptor_from_json(data["descriptor"])
        return cls(d, [(d.decode_key(k), c) for k, c in data["terms"]])

    def __repr__(self):
        inner = " + ".join(f"{c}[{self.descriptor.encode_key(k)}]" for k, c in
                           ((k, self.terms[k]) for k in self.support()))
        return f"FinSuppMap({inner or '0'})"


def group_ring_unit(G: FgAbGroup) -> FinSuppMap:
    return FinSuppMap.indicator(AbGroupElements(G), G.zero())
