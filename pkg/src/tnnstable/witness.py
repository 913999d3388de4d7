"""Re-validation of serialized refutation witnesses.

A witness is checked against the object it refutes, never against the verdict
that produced it, so a round trip through JSON exercises the same exact
arithmetic a skeptical reader would run.
"""

from __future__ import annotations

from .errors import FormatError
from .formats import parse_gq
from .gaussian import ZERO, rational
from .grassmann import PluckerVector, check_plucker_relations, exchange_relation
from .linalg import RationalMatrix, minor
from .poly import MultiaffinePoly, indices_of
from .stability import rayleigh_value


def _ints(xs) -> tuple[int, ...]:
    return tuple(int(x) for x in xs)


def _rayleigh(f: MultiaffinePoly, w: dict, orthant: bool) -> bool:
    if not f.is_real():
        return False
    point = [rational(x) for x in w["point"]]
    if len(point) != f.n or (orthant and min(point) < 0):
        return False
    v = rayleigh_value(f, int(w["i"]), int(w["j"]), point)
    return v < 0 and v == parse_gq(w["value"]).re


def _zero(f: MultiaffinePoly, w: dict) -> bool:
    point = [parse_gq(z) for z in w["point"]]
    return len(point) == f.n and all(z.im > 0 for z in point) and not f.evaluate_exact(point)


def _phase(coeff, pair: dict) -> bool:
    a, b = parse_gq(pair["first_coeff"]), parse_gq(pair["second_coeff"])
    if coeff(_ints(pair["first"])) != a or coeff(_ints(pair["second"])) != b:
        return False
    return bool(a) and bool(b) and not a.same_phase(b)


def _minor(a: RationalMatrix, w: dict, strict: bool) -> bool:
    v = minor(a, _ints(w["rows"]), _ints(w["cols"]))
    if v != parse_gq(w["value"]) or not v.is_real:
        return False
    return v.re < 0 if strict else v.re <= 0


def _violated(p: PluckerVector, w: dict) -> bool:
    v = exchange_relation(p._lookup(), _ints(w["I"]), _ints(w["J"]))
    return bool(v) and v == parse_gq(w["value"])


def validate_witness(w: dict, poly: MultiaffinePoly | None = None,
                     matrix: RationalMatrix | None = None,
                     plucker: PluckerVector | None = None) -> bool:
    """True iff ``w`` is a correct refutation of the supplied object."""
    kind = w.get("kind")
    try:
        if kind in ("rayleigh", "Violation"):
            return poly is not None and _rayleigh(poly, w, orthant=kind == "Violation")
        if kind == "zero":
            return poly is not None and _zero(poly, w)
        if kind == "phase":
            # The phase argument only refutes homogeneous polynomials.
            return poly is not None and poly.is_homogeneous() and _phase(poly.coefficient, w["pair"])
        if kind == "NegativeMinor":
            return matrix is not None and _minor(matrix, w, strict=True)
        if kind == "NonpositiveMinor":
            return matrix is not None and _minor(matrix, w, strict=False)
        if kind == "NotGrassmannian":
            return plucker is not None and _violated(plucker, w["violation"])
        if kind == "Violated":
            return plucker is not None and _violated(plucker, w)
        if kind == "NotTNN":
            if plucker is None or not check_plucker_relations(plucker).ok:
                return False
            lookup = plucker.as_dict()
            return _phase(lambda s: lookup.get(s, ZERO), w["witness"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"witness: malformed ({exc})") from None
    raise FormatError(f"witness.kind: unknown kind {kind!r}")


def plucker_of_poly(f: MultiaffinePoly) -> PluckerVector:
    """Coefficients of a homogeneous polynomial read as Plücker coordinates."""
    return PluckerVector.from_mapping(f.n, f.degree(), {indices_of(m): c for m, c in f.terms.items()})
