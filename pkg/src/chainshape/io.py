"""CSV ingestion/emission of spaces and canonical JSON output."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

from .metric_cover import DEFAULT_PRECISION, FiniteMetricSpace, build_space


def format_number(x) -> str:
    """Exact text for a rational: a finite decimal when one exists, else p/q."""
    x = Fraction(x)
    den = x.denominator
    k2 = k5 = 0
    while den % 2 == 0:
        den //= 2
        k2 += 1
    while den % 5 == 0:
        den //= 5
        k5 += 1
    if den != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(k2, k5)
    scaled = x * 10**digits
    assert scaled.denominator == 1
    n = scaled.numerator
    sign = "-" if n < 0 else ""
    n = abs(n)
    if digits == 0:
        return f"{sign}{n}"
    whole, frac = divmod(n, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def points_csv(coords, basepoint: int = 0, precision=DEFAULT_PRECISION) -> str:
    buf = io.StringIO()
    buf.write(f"# basepoint={basepoint}\n")
    buf.write(f"# precision={format_number(precision)}\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in coords:
        w.writerow([format_number(x) for x in row])
    return buf.getvalue()


def matrix_csv(matrix, basepoint: int = 0, precision=DEFAULT_PRECISION) -> str:
    buf = io.StringIO()
    buf.write("# kind=matrix\n")
    buf.write(f"# basepoint={basepoint}\n")
    buf.write(f"# precision={format_number(precision)}\n")
    w = csv.writer(buf, lineterminator="\n")
    for row in matrix:
        w.writerow([format_number(x) for x in row])
    return buf.getvalue()


def space_csv(space: FiniteMetricSpace) -> str:
    """CSV for a space: coordinates when known, otherwise its distance matrix."""
    if space.coords is not None:
        return points_csv(space.coords, space.basepoint, space.precision)
    n = space.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            d = space.exact_dist(i, j)
            if d is None:
                raise ValueError(f"distance ({i},{j}) is irrational; cannot write exactly")
            row.append(d)
        rows.append(row)
    return matrix_csv(rows, space.basepoint, space.precision)


def parse_csv(text: str, *, metric: str = "euclidean", precision=None) -> FiniteMetricSpace:
    """Read a points or matrix CSV.  `# key=value` lines carry metadata."""
    meta = {}
    rows = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            body = s[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k.strip()] = v.strip()
            continue
        rows.append(next(csv.reader([s])))
    if not rows:
        raise ValueError("no data rows")
    try:
        values = [[Fraction(c.strip()) for c in r] for r in rows]
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"non-numeric cell: {exc}") from None
    base = int(meta.get("basepoint", 0))
    prec = Fraction(meta.get("precision", str(DEFAULT_PRECISION))) if precision is None \
        else Fraction(precision)
    if meta.get("kind", "points") == "matrix":
        return build_space(matrix=values, basepoint=base, precision=prec)
    return build_space(values, basepoint=base, precision=prec,
                       metric=meta.get("metric", metric))


def read_space(path, **kw) -> FiniteMetricSpace:
    return parse_csv(Path(path).read_text(), **kw)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def strip_volatile(obj, keys=("generated_at",)):
    """Copy of a JSON object without timestamp-like keys, for comparisons."""
    if isinstance(obj, dict):
        return {k: strip_volatile(v, keys) for k, v in obj.items() if k not in keys}
    if isinstance(obj, list):
        return [strip_volatile(v, keys) for v in obj]
    return obj
