"""Named schemes, bundles, twists and duality data, so examples run without input files."""
from __future__ import annotations

import json
import re
from pathlib import Path

from .abgroup import AbHom, FgAbGroup, IntMatrix
from .bundles import CechBundle, GenPermMatrix, direct_sum_bundle, line_bundle, pic, pn_line, trivial_bundle
from .errors import ParseError, UnsupportedBase
from .forms import SymForm
from .modcat import AmbientInvolution, DualityDatum, IdentityInvolution, TableInvolution, negation_involution
from .monoid import f1, monoid_from_json, named_monoid
from .scheme import (MonoidScheme, affine_space, hirzebruch, p1xp1, projective_space, spec,
                     spec_wedge, triangle)

SCHEME_NAMES = ["point", "F1", "F1Z3", "A1", "A2", "P1", "P2", "P3", "triangle", "P1xP1", "H1", "H2",
                "wedge"]


def builtin_scheme(name: str) -> MonoidScheme:
    """Schemes by name: ``Pn``, ``An``, ``Ha`` (Hirzebruch), ``point``/``F1``, ``F1Z3``, ``triangle``, ..."""
    m = re.fullmatch(r"([PAH])(\d+)", name)
    if m:
        kind, n = m.group(1), int(m.group(2))
        if kind == "P":
            X = projective_space(n)
        elif kind == "A":
            X = affine_space(n)
        else:
            X = hirzebruch(n)
    elif name in ("point", "F1"):
        X = spec(f1(), name="point")
    elif name == "F1Z3":
        X = spec(named_monoid("F1Z3"), name="Spec F1[Z/3]")
    elif name == "triangle":
        X = triangle()
    elif name == "P1xP1":
        X = p1xp1()
    elif name == "wedge":
        X = spec_wedge()
    else:
        raise ParseError(f"unknown built-in scheme {name!r}", known=SCHEME_NAMES)
    X.meta["builtin"] = name
    return X


def scheme_from_json(data) -> MonoidScheme:
    if "builtin" in data:
        return builtin_scheme(data["builtin"])
    if "ambient" in data:
        G = FgAbGroup.from_json(data["ambient"])
        charts = [[tuple(g) for g in c] for c in data["charts"]]
        return MonoidScheme.from_ambient(G, charts, name=data.get("name", "X"))
    if "monoid" in data:
        return spec(monoid_from_json(data["monoid"]))
    raise ParseError("scheme JSON needs 'builtin', 'ambient' or 'monoid'")


def _read_json(ref: str):
    p = Path(ref)
    if p.suffix == ".json" or p.exists():
        try:
            return json.loads(p.read_text())
        except FileNotFoundError:
            raise ParseError(f"no such file {ref!r}")
        except json.JSONDecodeError as e:
            raise ParseError(f"{ref}: invalid JSON ({e.msg})")
    return None


def load_scheme(ref: str) -> MonoidScheme:
    """A built-in name or a path to scheme JSON."""
    data = _read_json(ref)
    return builtin_scheme(ref) if data is None else scheme_from_json(data)


def triangle_bundle(X: MonoidScheme) -> CechBundle:
    """Rank 2 on the triangle: identity transitions except a swap between charts 1 and 2."""
    if X.meta.get("kind") != "triangle":
        raise UnsupportedBase("triangle_F lives on the triangle scheme")
    return CechBundle(X, 2, {(1, 2): GenPermMatrix.permutation([1, 0], X.overlap(1, 2).monoid.units())})


def _line_term(X: MonoidScheme, term: str) -> CechBundle:
    term = term.strip()
    if term in ("O", "O(0)"):
        return trivial_bundle(X, 1)
    m = re.fullmatch(r"O\((-?\d+)\)", term)
    if m:
        if X.meta.get("kind") != "Pn":
            raise UnsupportedBase("O(d) needs a projective space base")
        return pn_line(X, int(m.group(1)))
    m = re.fullmatch(r"L\(([-\d, ]+)\)", term)
    if m:
        return pic(X).representative(tuple(int(v) for v in m.group(1).split(",")))
    raise ParseError(f"cannot parse line bundle {term!r}")


def named_bundle(X: MonoidScheme, ref: str) -> CechBundle:
    """``triangle_F``, ``O^n``, ``O(a)+O(b)+...``, ``L(x, y)`` by Pic class, or a JSON path."""
    ref = ref.strip()
    if ref == "triangle_F" or (ref == "triangle_F.json" and not Path(ref).exists()):
        return triangle_bundle(X)
    data = _read_json(ref)
    if data is not None:
        return CechBundle.from_json(X, data)
    m = re.fullmatch(r"O\^(\d+)", ref)
    if m:
        return trivial_bundle(X, int(m.group(1)))
    terms = ref.split("+")
    bs = [_line_term(X, t) for t in terms]
    return bs[0] if len(bs) == 1 else direct_sum_bundle(*bs)


def named_twist(X: MonoidScheme, ref: str | None) -> CechBundle:
    if ref is None:
        return line_bundle(X, {p: X.overlap(*p).monoid.one for p in X.pairs()})
    b = named_bundle(X, ref)
    if b.rank != 1:
        raise ParseError("a twist must be a line bundle")
    return b


def named_duality(monoid: str, sigma: str = "id", epsilon: str | None = None) -> DualityDatum:
    """``sigma`` is ``id``, ``neg`` or a JSON permutation of a finite table."""
    A = named_monoid(monoid)
    if sigma == "id":
        s = IdentityInvolution()
    elif sigma == "neg":
        s = negation_involution(A)
    else:
        try:
            s = TableInvolution(json.loads(sigma))
        except json.JSONDecodeError:
            raise ParseError(f"cannot parse involution {sigma!r}")
    e = None
    if epsilon is not None:
        try:
            e = A.parse_element(json.loads(epsilon))
        except json.JSONDecodeError:
            e = A.parse_element(epsilon)
    return DualityDatum(A, s, e)


def standard_data() -> dict:
    """The four duality data used throughout the form tests."""
    return {
        "F1": named_duality("F1"),
        "F1Z3/id": named_duality("F1Z3"),
        "F1Z3/neg": named_duality("F1Z3", "neg"),
        "F1Z4/id": named_duality("F1Z4"),
    }


def _monoid_ref(ref):
    return monoid_from_json(ref) if isinstance(ref, dict) else named_monoid(ref)


def datum_from_json(data) -> DualityDatum:
    """``{"monoid": ref, "sigma": "id" | "neg" | {"perm"} | {"matrix"}, "epsilon": element}``."""
    A = _monoid_ref(data["monoid"])
    s = data.get("sigma", "id")
    if s == "id":
        sigma = IdentityInvolution()
    elif s == "neg":
        sigma = negation_involution(A)
    elif isinstance(s, dict) and "perm" in s:
        sigma = TableInvolution(s["perm"])
    elif isinstance(s, dict) and "matrix" in s:
        G = A.ambient
        sigma = AmbientInvolution(AbHom(G, G, IntMatrix.from_rows(s["matrix"])))
    else:
        raise ParseError(f"cannot parse involution {s!r}")
    e = data.get("epsilon")
    return DualityDatum(A, sigma, None if e is None else A.parse_element(e))


def form_from_json(data) -> SymForm:
    d = datum_from_json(data)
    A = d.monoid
    entries = {(int(r), int(c)): A.parse_element(u) for r, c, u in data["entries"]}
    return SymForm.from_entries(d, int(data["size"]), entries)
