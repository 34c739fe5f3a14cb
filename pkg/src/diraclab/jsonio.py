"""JSON codecs for the shared tensor / map / structure-constant formats.

Tensor format (shared by all modules and the CLI); indices are 1-based:

    {"chart": n, "degree": k, "kind": "vector"|"form",
     "components": [{"idx": [i1,...,ik],
                     "poly": [{"exp": [e1,...,en], "num": int, "den": int}]}]}
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ShapeError
from .fields import Chart, PolyKForm, PolyKVector, PolyMap, PolyScalar


def poly_to_json(p: PolyScalar) -> list:
    return [
        {"exp": list(exp), "num": c.numerator, "den": c.denominator}
        for exp, c in p.sorted_terms()
    ]


def poly_from_json(chart: Chart, data) -> PolyScalar:
    terms = {}
    for t in data:
        exp = tuple(int(e) for e in t["exp"])
        num = int(t["num"])
        den = int(t.get("den", 1))
        terms[exp] = terms.get(exp, Fraction(0)) + Fraction(num, den)
    return PolyScalar(chart, terms)


def tensor_to_json(T) -> dict:
    kind = "vector" if isinstance(T, PolyKVector) else "form"
    comps = []
    for idx in sorted(T.components):
        comps.append(
            {"idx": [i + 1 for i in idx], "poly": poly_to_json(T.components[idx])}
        )
    return {"chart": T.chart.dim, "degree": T.degree, "kind": kind, "components": comps}


def tensor_from_json(data, chart: Chart | None = None):
    n = int(data["chart"])
    if chart is None:
        chart = Chart(n)
    elif chart.dim != n:
        raise ShapeError(f"tensor declares chart dim {n}, expected {chart.dim}")
    k = int(data["degree"])
    kind = data.get("kind", "vector")
    cls = PolyKVector if kind == "vector" else PolyKForm
    comps = {}
    for c in data.get("components", []):
        idx = tuple(int(i) - 1 for i in c["idx"])
        comps[idx] = poly_from_json(chart, c["poly"])
    return cls(chart, k, comps)


def map_to_json(phi: PolyMap) -> dict:
    return {
        "source": phi.source.dim,
        "target": phi.target.dim,
        "components": [poly_to_json(p) for p in phi.components],
    }


def map_from_json(data) -> PolyMap:
    src = Chart(int(data["source"]))
    tgt = Chart(int(data["target"]))
    comps = [poly_from_json(src, c) for c in data["components"]]
    return PolyMap(src, tgt, comps)


def rational_from_json(v) -> Fraction:
    """Accepts int, [num, den], or {"num":, "den":}."""
    if isinstance(v, bool):
        raise ShapeError("boolean is not a rational")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return Fraction(int(v[0]), int(v[1]))
    if isinstance(v, dict):
        return Fraction(int(v["num"]), int(v.get("den", 1)))
    raise ShapeError(f"cannot parse rational from {v!r}")


def rational_to_json(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else [x.numerator, x.denominator]


def structure_constants_from_json(data) -> tuple[int, dict]:
    """Format: {"n": k, "c": [{"i":1,"j":2,"k":3, "value": rational}]} (1-based)."""
    n = int(data["n"])
    c = {}
    for entry in data["c"]:
        i, j, k = int(entry["i"]) - 1, int(entry["j"]) - 1, int(entry["k"]) - 1
        val = rational_from_json(entry.get("value", entry.get("poly_or_rational")))
        c[(i, j, k)] = c.get((i, j, k), Fraction(0)) + val
    return n, c
