"""Serialization of exact values into byte-stable JSON and aligned text."""

from __future__ import annotations

import json
import sys
from fractions import Fraction

from .exactlin import GaussianRational
from .invariant_complex import InvariantForm

if hasattr(sys, "set_int_max_str_digits"):
    # deep Liouville truncations produce integers with tens of thousands of digits
    sys.set_int_max_str_digits(0)


def fr(x) -> str:
    """A rational as ``"p/q"`` (or ``"p"`` when integral)."""
    return str(Fraction(x))


def gr(x) -> dict:
    x = GaussianRational.coerce(x)
    return {"re": fr(x.re), "im": fr(x.im)}


def form_entries(u: InvariantForm) -> list[dict]:
    """Nonzero coefficients of a form, 1-based indices, lexicographic."""
    return [{"index": [j + 1 for j in J], "value": gr(x)} for J, x in sorted(u.coeffs.items())]


def dumps_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


_MAX_CELL = 48


def _cell(v) -> str:
    if isinstance(v, dict) and set(v) == {"re", "im"}:
        re, im = v["re"], v["im"]
        s = re if im == "0" else (f"{im}i" if re == "0" else f"{re}+{im}i".replace("+-", "-"))
    elif isinstance(v, (list, tuple)):
        s = "(" + ", ".join(_cell(x) for x in v) + ")"
    elif isinstance(v, dict):
        s = "{" + ", ".join(f"{k}: {_cell(x)}" for k, x in v.items()) + "}"
    elif isinstance(v, bool):
        s = "yes" if v else "no"
    elif v is None:
        s = "-"
    else:
        s = str(v)
    if len(s) > _MAX_CELL:
        s = f"{s[:20]}...[{len(s)} chars]"
    return s


def _flatten(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if isinstance(v, dict) and v and set(v) != {"re", "im"}:
            out.update({f"{k}.{kk}": vv for kk, vv in v.items()})
        else:
            out[k] = v
    return out


def _table(rows: list[dict], indent: str) -> list[str]:
    rows = [_flatten(r) for r in rows]
    cols = list(rows[0])
    for r in rows[1:]:
        cols.extend(k for k in r if k not in cols)
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    out = [indent + "  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    out.append(indent + "  ".join("-" * w for w in widths))
    out.extend(indent + "  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells)
    return out


def render_text(report: dict, indent: str = "") -> str:
    lines = []
    width = max((len(k) for k in report), default=0)
    for key, val in report.items():
        if isinstance(val, list) and val and all(isinstance(r, dict) for r in val):
            lines.append(f"{indent}{key}:")
            lines.extend(_table(val, indent + "  "))
        elif isinstance(val, dict) and val and set(val) != {"re", "im"}:
            lines.append(f"{indent}{key}:")
            lines.append(render_text(val, indent + "  ").rstrip("\n"))
        else:
            lines.append(f"{indent}{key.ljust(width)}  {_cell(val)}")
    return "\n".join(lines) + "\n"
