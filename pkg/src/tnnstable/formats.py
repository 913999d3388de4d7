"""JSON document formats for polynomials, matrices, words, Plücker vectors and operators.

Rationals are written as ``"p/q"`` strings with ``q > 0``.  Every reader raises
:class:`~tnnstable.errors.FormatError` naming the offending field.
"""

from __future__ import annotations

import dataclasses
import json
from enum import Enum
from pathlib import Path
from typing import Any

from gmpy2 import mpq

from .errors import FormatError, TnnStableError
from .gaussian import GaussianRational, format_rational, rational
from .grassmann import GrassmannianPoint, PluckerVector
from .linalg import GeneratorWord, Letter, RationalMatrix
from .operators import MultiaffineOperator
from .poly import MultiaffinePoly, indices_of, mask_of

_MPQ = type(mpq(0))


# -- helpers -----------------------------------------------------------------------------------

def _req(doc: dict, key: str, path: str):
    if not isinstance(doc, dict):
        raise FormatError(f"{path or 'document'}: expected an object")
    if key not in doc:
        raise FormatError(f"{path + '.' if path else ''}{key}: missing field")
    return doc[key]


def _int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{path}: expected an integer, got {value!r}")
    return value


def _rat(value, path: str) -> mpq:
    if isinstance(value, bool):
        raise FormatError(f"{path}: expected a rational string")
    if isinstance(value, int):
        return mpq(value)
    if not isinstance(value, str):
        raise FormatError(f"{path}: expected a \"p/q\" string, got {value!r}")
    try:
        return rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"{path}: bad rational {value!r} ({exc})") from None


def _gq(doc: dict, path: str) -> GaussianRational:
    re = _rat(_req(doc, "re", path), f"{path}.re")
    im = _rat(doc.get("im", "0/1"), f"{path}.im")
    return GaussianRational(re, im)


def _index_list(value, path: str, n: int, strict: bool = True) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise FormatError(f"{path}: expected a list of indices")
    out = tuple(_int(v, f"{path}[{i}]") for i, v in enumerate(value))
    if any(not 1 <= v <= n for v in out):
        raise FormatError(f"{path}: indices must lie in 1..{n}")
    if strict and any(a >= b for a, b in zip(out, out[1:])):
        raise FormatError(f"{path}: indices must be strictly increasing")
    return out


def rat_str(x) -> str:
    return format_rational(x)


def gq_doc(c: GaussianRational) -> dict:
    c = GaussianRational.coerce(c)
    return {"re": rat_str(c.re), "im": rat_str(c.im)}


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load_file(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from None
    try:
        return loads(text)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


# -- polynomials ------------------------------------------------------------------------------

def poly_from_json(doc: dict, path: str = "") -> MultiaffinePoly:
    n = _int(_req(doc, "n", path), f"{path}n" if not path else f"{path}.n")
    if not 1 <= n <= 16:
        raise FormatError(f"{path or 'poly'}.n: must be in 1..16")
    terms = _req(doc, "terms", path)
    if not isinstance(terms, list):
        raise FormatError(f"{path or 'poly'}.terms: expected a list")
    out = {}
    for t, term in enumerate(terms):
        tp = f"{path + '.' if path else ''}terms[{t}]"
        idx = _index_list(_req(term, "vars", tp), f"{tp}.vars", n)
        mask = mask_of(idx)
        if mask in out:
            raise FormatError(f"{tp}.vars: duplicate monomial {list(idx)}")
        out[mask] = _gq(term, tp)
    return MultiaffinePoly(n, out)


def poly_to_json(f: MultiaffinePoly) -> dict:
    return {
        "n": f.n,
        "terms": [{"vars": list(indices_of(m)), **gq_doc(c)} for m, c in f.sorted_terms()],
    }


# -- matrices ---------------------------------------------------------------------------------------

def matrix_from_json(doc: dict, path: str = "") -> RationalMatrix:
    pre = path + "." if path else ""
    rows = _int(_req(doc, "rows", path), f"{pre}rows")
    cols = _int(_req(doc, "cols", path), f"{pre}cols")
    if not (1 <= rows <= 16 and 1 <= cols <= 16):
        raise FormatError(f"{pre}rows/cols: must be in 1..16")
    entries = _req(doc, "entries", path)
    im = doc.get("im")

    def grid(value, name):
        if not isinstance(value, list) or len(value) != rows:
            raise FormatError(f"{pre}{name}: expected {rows} rows")
        out = []
        for r, row in enumerate(value):
            if not isinstance(row, list) or len(row) != cols:
                raise FormatError(f"{pre}{name}[{r}]: expected {cols} entries")
            out.append([_rat(x, f"{pre}{name}[{r}][{c}]") for c, x in enumerate(row)])
        return out

    re_part = grid(entries, "entries")
    im_part = grid(im, "im") if im is not None else [[0] * cols for _ in range(rows)]
    return RationalMatrix([[GaussianRational(a, b) for a, b in zip(r1, r2)]
                           for r1, r2 in zip(re_part, im_part)])


def matrix_to_json(a: RationalMatrix) -> dict:
    doc = {
        "rows": a.rows,
        "cols": a.cols,
        "entries": [[rat_str(x.re) for x in row] for row in a.data],
    }
    if not a.is_real():
        doc["im"] = [[rat_str(x.im) for x in row] for row in a.data]
    return doc


def word_from_json(doc: dict, path: str = "") -> GeneratorWord:
    pre = path + "." if path else ""
    n = _int(_req(doc, "n", path), f"{pre}n")
    letters = _req(doc, "letters", path)
    if not isinstance(letters, list):
        raise FormatError(f"{pre}letters: expected a list")
    out = []
    for k, item in enumerate(letters):
        lp = f"{pre}letters[{k}]"
        kind = _req(item, "kind", lp)
        if kind not in ("D", "E", "F"):
            raise FormatError(f"{lp}.kind: must be D, E or F")
        out.append(Letter(kind, _int(_req(item, "i", lp), f"{lp}.i"),
                          _rat(_req(item, "t", lp), f"{lp}.t")))
    try:
        return GeneratorWord(n, tuple(out))
    except TnnStableError as exc:
        raise FormatError(f"{pre}letters: {exc}") from None


def word_to_json(w: GeneratorWord) -> dict:
    return {"n": w.n, "letters": [{"kind": l.kind, "i": l.i, "t": rat_str(l.t)} for l in w.letters]}


# -- Plücker vectors --------------------------------------------------------------------------------

def plucker_from_json(doc: dict, path: str = "") -> PluckerVector:
    pre = path + "." if path else ""
    n = _int(_req(doc, "n", path), f"{pre}n")
    k = _int(_req(doc, "k", path), f"{pre}k")
    if not (1 <= n <= 16 and 0 <= k <= n):
        raise FormatError(f"{pre}n/k: need 1 <= n <= 16 and 0 <= k <= n")
    coords = _req(doc, "coords", path)
    if not isinstance(coords, list):
        raise FormatError(f"{pre}coords: expected a list")
    values = {}
    for t, item in enumerate(coords):
        cp = f"{pre}coords[{t}]"
        s = _index_list(_req(item, "set", cp), f"{cp}.set", n)
        if len(s) != k:
            raise FormatError(f"{cp}.set: expected {k} indices")
        if s in values:
            raise FormatError(f"{cp}.set: duplicate set {list(s)}")
        values[s] = _gq(item, cp)
    try:
        return PluckerVector.from_mapping(n, k, values)
    except TnnStableError as exc:
        raise FormatError(f"{pre}coords: {exc}") from None


def plucker_to_json(p: PluckerVector | GrassmannianPoint, keep_zero: bool = False) -> dict:
    if isinstance(p, GrassmannianPoint):
        p = p.plucker
    return {
        "n": p.n,
        "k": p.k,
        "coords": [{"set": list(s), **gq_doc(c)} for s, c in zip(p.sets, p.coords)
                   if c or keep_zero],
    }


# -- operators -----------------------------------------------------------------------------------------

def operator_from_json(doc: dict, path: str = "") -> MultiaffineOperator:
    pre = path + "." if path else ""
    n = _int(_req(doc, "n", path), f"{pre}n")
    if not 1 <= n <= 16:
        raise FormatError(f"{pre}n: must be in 1..16")
    images = _req(doc, "images", path)
    if not isinstance(images, list):
        raise FormatError(f"{pre}images: expected a list")
    out = {}
    for t, item in enumerate(images):
        ip = f"{pre}images[{t}]"
        s = mask_of(_index_list(_req(item, "basis", ip), f"{ip}.basis", n))
        if s in out:
            raise FormatError(f"{ip}.basis: duplicate basis monomial")
        f = poly_from_json(_req(item, "poly", ip), f"{ip}.poly")
        if f.n != n:
            raise FormatError(f"{ip}.poly.n: expected {n}")
        out[s] = f
    return MultiaffineOperator(n, out)


def operator_to_json(phi: MultiaffineOperator) -> dict:
    return {
        "n": phi.n,
        "images": [{"basis": list(indices_of(s)), "poly": poly_to_json(img)}
                   for s, img in sorted(phi.images.items(), key=lambda kv: indices_of(kv[0]))],
    }


# -- generic serialization of results -----------------------------------------------------------------

def to_jsonable(obj: Any) -> Any:
    """Recursively turn library values (certificates, verdicts, scalars) into JSON data.

    Exact rationals become ``"p/q"``; floats become decimal strings.
    """
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, complex):
        return {"re": repr(obj.real), "im": repr(obj.imag)}
    if isinstance(obj, _MPQ):
        return rat_str(obj)
    if isinstance(obj, GaussianRational):
        return gq_doc(obj)
    if isinstance(obj, MultiaffinePoly):
        return poly_to_json(obj)
    if isinstance(obj, RationalMatrix):
        return matrix_to_json(obj)
    if isinstance(obj, PluckerVector):
        return plucker_to_json(obj)
    if isinstance(obj, GrassmannianPoint):
        return {"plucker": plucker_to_json(obj.plucker), "relations_verified": obj.relations_verified}
    if isinstance(obj, GeneratorWord):
        return word_to_json(obj)
    if isinstance(obj, MultiaffineOperator):
        return operator_to_json(obj)
    if dataclasses.is_dataclass(obj):
        out = {}
        kind = getattr(obj, "kind", None)
        if kind is not None:
            out["kind"] = kind
        for f in dataclasses.fields(obj):
            out[f.name] = to_jsonable(getattr(obj, f.name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(x) for x in items]
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_gq(value) -> GaussianRational:
    """Inverse of the scalar encodings produced by :func:`to_jsonable`."""
    if isinstance(value, dict):
        return GaussianRational(rational(value["re"]), rational(value.get("im", "0/1")))
    return GaussianRational.coerce(rational(value))


def dumps(doc: Any, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(doc, indent=2, sort_keys=False, ensure_ascii=False)
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)
