"""Plain-text problem and set files, and JSON reports.

Problem files hold one ``key: value`` entry per line; ``#`` starts a
comment. Matrices list rows separated by ``;``. Example::

    kappa: norm one
    A: 1 1
    b: 2
    rho: norm one
    sigma: 0

Gauge specs: ``norm one|two|inf [| w1 w2 ...]``, ``atomic a; b; ...``
(one atom per row), ``conic orthant c1 c2 ...``, ``conic psd r1; r2; ...``,
``lovasz n | f(0) f(1) ... f(2^n - 1)`` (table indexed by bitmask).
Cones: ``orthant``, ``psd``, ``zero``, ``free``. Optional keys: ``D``,
``cone``, ``ri: declared``, ``interior: declared``, ``name``, and
``graph: n | i-j i-j ...`` which builds the max-cut relaxation instead.

Set files name one set per line and finish with ``set: <name>``::

    H1: halfspace 1 1 | 1
    H2: halfspace 1 -1 | 1
    C1: intersection H1 H2
    C2: affine 1 0 | 1
    set: intersection C1 C2
"""

from __future__ import annotations

import json
import math
import re

import numpy as np

from .cones import FreeSpace, NonnegOrthant, PsdCone, ZeroCone
from .duality import GaugeProblem
from .gauges import Atomic, ConicLinear, Lovasz, Norm
from .sets import (
    Affine,
    ConeTranslate,
    GaugeBallTranslate,
    Halfspace,
    Hull,
    HullOfUnion,
    Image,
    Intersection,
    Preimage,
    Ray,
    Union,
)

__all__ = [
    "ParseError",
    "dump_report",
    "load_report",
    "parse_problem",
    "parse_set",
    "read_problem",
    "read_set",
]


class ParseError(ValueError):
    def __init__(self, msg, line, col=1):
        super().__init__("line %d, column %d: %s" % (line, col, msg))
        self.line = line
        self.col = col


class _Field:
    """A value with its source position, for error anchoring."""

    def __init__(self, text, line, col):
        self.text = text
        self.line = line
        self.col = col

    def fail(self, msg, offset=0):
        raise ParseError(msg, self.line, self.col + offset)

    def numbers(self, text=None, offset=0):
        text = self.text if text is None else text
        out = []
        for mt in re.finditer(r"\S+", text):
            try:
                out.append(float(mt.group()))
            except ValueError:
                self.fail("expected a number, got %r" % mt.group(), offset + mt.start())
        return np.array(out)

    def matrix(self, text=None, offset=0):
        text = self.text if text is None else text
        rows, pos = [], 0
        for chunk in text.split(";"):
            rows.append(self.numbers(chunk, offset + pos))
            pos += len(chunk) + 1
        if len({r.size for r in rows}) != 1 or rows[0].size == 0:
            self.fail("matrix rows must be nonempty and of equal length", offset)
        return np.array(rows)

    def split_bar(self):
        if "|" not in self.text:
            return self.text, None, 0
        i = self.text.index("|")
        return self.text[:i], self.text[i + 1:], i + 1


def _entries(text):
    out = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError("expected 'key: value'", ln, 1)
        key, val = line.split(":", 1)
        k = key.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", k):
            raise ParseError("bad key %r" % k, ln, 1)
        col = len(key) + 2 + (len(val) - len(val.lstrip()))
        if k in out:
            raise ParseError("duplicate key %r" % k, ln, 1)
        out[k] = _Field(val.strip(), ln, col)
    return out


def _gauge(f, dim):
    word, _, rest = f.text.partition(" ")
    off = len(word) + 1
    rest_field = _Field(rest, f.line, f.col + off)
    if word == "norm":
        head, tail, bar = rest_field.split_bar()
        kind = head.strip()
        if kind not in ("one", "two", "inf", "1", "2"):
            rest_field.fail("unknown norm %r" % kind)
        w = None if tail is None else rest_field.numbers(tail, bar)
        if w is not None and w.size != dim:
            rest_field.fail("expected %d weights" % dim, bar)
        return Norm(kind, dim, weights=w)
    if word == "atomic":
        return Atomic(rest_field.matrix().T)
    if word == "conic":
        cname, _, ctext = rest.partition(" ")
        cf = _Field(ctext, f.line, f.col + off + len(cname) + 1)
        if cname == "orthant":
            c = cf.numbers()
            return ConicLinear(c, NonnegOrthant(c.size))
        if cname == "psd":
            C = cf.matrix()
            return ConicLinear(C, PsdCone(C.shape[0]))
        rest_field.fail("unknown cone %r" % cname)
    if word == "lovasz":
        head, tail, bar = rest_field.split_bar()
        if tail is None:
            rest_field.fail("expected 'lovasz n | table'")
        n = int(rest_field.numbers(head)[0])
        return Lovasz(rest_field.numbers(tail, bar), n)
    f.fail("unknown gauge %r" % word)


def _cone(f, n):
    word = f.text.strip()
    if word == "orthant":
        return NonnegOrthant(n)
    if word == "psd":
        k = math.isqrt(n)
        if k * k != n:
            f.fail("psd cone needs a square number of variables")
        return PsdCone(k)
    if word == "zero":
        return ZeroCone(n)
    if word == "free":
        return FreeSpace(n)
    f.fail("unknown cone %r" % word)


def _graph(f):
    head, tail, bar = f.split_bar()
    n = int(f.numbers(head)[0])
    W = np.zeros((n, n))
    for mt in re.finditer(r"\S+", tail or ""):
        parts = mt.group().split("-")
        try:
            i, j = int(parts[0]), int(parts[1])
        except (ValueError, IndexError):
            f.fail("expected an edge 'i-j'", bar + mt.start())
        if not (0 <= i < n and 0 <= j < n) or i == j:
            f.fail("bad edge %r" % mt.group(), bar + mt.start())
        W[i, j] = W[j, i] = 1.0
    return W


def parse_problem(text):
    """Parse a problem file into ``(GaugeProblem, meta)``.

    ``meta`` records declarations and, for graph files, the adjacency matrix.
    """
    e = _entries(text)
    meta = {"interior_declared": False, "graph": None, "name": ""}
    if "name" in e:
        meta["name"] = e["name"].text
    if "interior" in e:
        if e["interior"].text != "declared":
            e["interior"].fail("expected 'declared'")
        meta["interior_declared"] = True
    ri = False
    if "ri" in e:
        if e["ri"].text != "declared":
            e["ri"].fail("expected 'declared'")
        ri = True
    if "graph" in e:
        from .instances import maxcut
        W = _graph(e["graph"])
        meta["graph"] = W
        p = maxcut(W).problem
        p.name = meta["name"] or "maxcut"
        p.ri_declared = ri
        return p, meta
    for k in ("kappa", "A", "b", "rho", "sigma"):
        if k not in e:
            raise ParseError("missing key %r" % k, len(text.splitlines()) + 1, 1)
    A = _matrix_entry(e["A"])
    b = e["b"].numbers()
    sig = e["sigma"].numbers()
    if sig.size != 1:
        e["sigma"].fail("sigma must be a single number")
    D = _matrix_entry(e["D"]) if "D" in e else None
    n = A.shape[1]
    kdim = n if D is None else D.shape[0]
    kappa = _gauge(e["kappa"], kdim)
    rho = _gauge(e["rho"], b.size)
    cone = _cone(e["cone"], n) if "cone" in e else None
    p = GaugeProblem(kappa, A, b, rho, float(sig[0]), cone=cone, D=D, ri_declared=ri,
                     name=meta["name"])
    return p, meta


def _matrix_entry(f):
    if f.text.startswith("diag "):
        from .instances import diag_map
        return diag_map(int(f.numbers(f.text[5:], 5)[0]))
    return f.matrix()


def read_problem(path):
    with open(path) as fh:
        return parse_problem(fh.read())


# ---------------------------------------------------------------------------
# sets


def _set(f, named):
    word, _, rest = f.text.partition(" ")
    off = len(word) + 1
    rf = _Field(rest, f.line, f.col + off)
    head, tail, bar = rf.split_bar()

    def refs(text, base):
        out = []
        for mt in re.finditer(r"\S+", text):
            if mt.group() not in named:
                rf.fail("unknown set %r" % mt.group(), base + mt.start())
            out.append(named[mt.group()])
        if not out:
            rf.fail("expected set names", base)
        return out

    if word == "halfspace":
        if tail is None:
            rf.fail("expected 'halfspace a | beta'")
        return Halfspace(rf.numbers(head), float(rf.numbers(tail, bar)[0]))
    if word == "ray":
        return Ray(rf.numbers())
    if word == "hull":
        return Hull(rf.matrix().T)
    if word == "affine":
        if tail is None:
            rf.fail("expected 'affine rows | b'")
        return Affine(rf.matrix(head), rf.numbers(tail, bar))
    if word == "ball":
        # ball <norm kind> b... | sigma
        kind, _, btext = head.strip().partition(" ")
        b = rf.numbers(btext, len(kind) + 1)
        if tail is None:
            rf.fail("expected 'ball kind b | sigma'")
        return GaugeBallTranslate(Norm(kind, b.size), b, float(rf.numbers(tail, bar)[0]))
    if word == "cone_translate":
        cname, _, btext = head.strip().partition(" ")
        b = rf.numbers(btext, len(cname) + 1)
        return ConeTranslate(b, _cone(_Field(cname, rf.line, rf.col), b.size))
    if word in ("image", "preimage"):
        if tail is None:
            rf.fail("expected '%s rows | set'" % word)
        M = rf.matrix(head)
        inner = refs(tail, bar)[0]
        return Image(M, inner) if word == "image" else Preimage(M, inner)
    if word == "union":
        return Union(refs(rest, 0))
    if word == "intersection":
        return Intersection(refs(rest, 0))
    if word == "hull_of_union":
        return HullOfUnion(refs(rest, 0))
    f.fail("unknown set type %r" % word)


def parse_set(text):
    named = {}
    target = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if ":" not in line:
            raise ParseError("expected 'name: definition'", ln, 1)
        key, val = line.split(":", 1)
        k = key.strip()
        col = len(key) + 2 + (len(val) - len(val.lstrip()))
        f = _Field(val.strip(), ln, col)
        if k == "set":
            target = _set(f, named)
        else:
            if k in named:
                raise ParseError("duplicate set %r" % k, ln, 1)
            named[k] = _set(f, named)
    if target is None:
        raise ParseError("missing 'set:' line", len(text.splitlines()) + 1, 1)
    return target, named


def read_set(path):
    with open(path) as fh:
        return parse_set(fh.read())


# ---------------------------------------------------------------------------
# reports


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return v


def dump_report(report):
    """Deterministic JSON text for a report dictionary."""
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False)


def load_report(text):
    return json.loads(text)
