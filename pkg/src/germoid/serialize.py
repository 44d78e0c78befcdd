"""JSON structure files.

Every file is an object with ``"v": 1`` and a ``"kind"`` tag.  Subsets are
sorted integer arrays; partial maps are arrays with ``-1`` off the domain.
Loading checks the schema and index ranges (``ParseError``) and returns the
object together with a report of its structural axioms, which are always
re-checked rather than trusted.
"""

import json
import os
import tempfile

import numpy as np

from .fintop import FiniteSpace, bits, mask_of, verify_neighbourhoods, verify_topology
from .groupoid import FiniteGroupoid, verify_groupoid
from .invsemi import (
    InverseSemigroup,
    PartialBijection,
    Pseudogroup,
    compose,
    invert,
    verify_inverse_semigroup,
    verify_partial_bijection,
)
from .coarse import CoarseStructure, generate_coarse_structure, pair_index, verify_coarse_structure
from .report import ParseError, Report
from .representation import Representation, verify_representation

VERSION = 1
KINDS = ("space", "semigroup", "pseudogroup", "representation", "groupoid", "coarse")


# ----------------------------------------------------------------------------
# schema helpers


def _need(body, key, where):
    if not isinstance(body, dict) or key not in body:
        raise ParseError(f"{where}: missing field {key!r}")
    return body[key]


def _int(v, where, lo=None, hi=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{where}: expected an integer")
    if (lo is not None and v < lo) or (hi is not None and v >= hi):
        raise ParseError(f"{where}: index {v} out of range")
    return v


def _ints(v, where, lo=None, hi=None, length=None):
    if not isinstance(v, list):
        raise ParseError(f"{where}: expected an array")
    if length is not None and len(v) != length:
        raise ParseError(f"{where}: expected {length} entries, got {len(v)}")
    return [_int(x, f"{where}[{k}]", lo, hi) for k, x in enumerate(v)]


def _bitset(v, where, n):
    pts = _ints(v, where, 0, n)
    if any(a >= b for a, b in zip(pts, pts[1:])):
        raise ParseError(f"{where}: subsets must be strictly increasing arrays")
    return mask_of(pts)


def _mapping(v, where, n):
    return tuple(_ints(v, where, -1, n, length=n))


def _check_kind(body, kind, where):
    k = _need(body, "kind", where)
    if k != kind:
        raise ParseError(f"{where}: expected kind {kind!r}, got {k!r}")


def _sorted_list(mask):
    return list(bits(mask))


# ----------------------------------------------------------------------------
# loaders: body -> (object, report)


def load_space(body, where="space"):
    _check_kind(body, "space", where)
    n = _int(_need(body, "points", where), f"{where}.points", 0)
    if "nbhd" in body:
        raw = _need(body, "nbhd", where)
        if not isinstance(raw, list) or len(raw) != n:
            raise ParseError(f"{where}.nbhd: expected {n} entries")
        nb = [_bitset(m, f"{where}.nbhd[{p}]", n) for p, m in enumerate(raw)]
        report = verify_neighbourhoods(n, nb)
        return FiniteSpace(n, tuple(nb)), report
    if "opens" in body:
        if not isinstance(body["opens"], list):
            raise ParseError(f"{where}.opens: expected an array")
        opens = [_bitset(u, f"{where}.opens[{k}]", n) for k, u in enumerate(body["opens"])]
        report = verify_topology(n, opens)
        full = (1 << n) - 1
        nb = []
        for p in range(n):
            m = full
            for u in opens:
                if u >> p & 1:
                    m &= u
            nb.append(m)
        return FiniteSpace(n, tuple(nb)), report
    raise ParseError(f"{where}: needs 'nbhd' or 'opens'")


def load_semigroup(body, where="semigroup"):
    _check_kind(body, "semigroup", where)
    n = _int(_need(body, "size", where), f"{where}.size", 0)
    rows = _need(body, "mul", where)
    if not isinstance(rows, list) or len(rows) != n:
        raise ParseError(f"{where}.mul: expected {n} rows")
    mul = [_ints(row, f"{where}.mul[{a}]", 0, n, length=n) for a, row in enumerate(rows)]
    report = Report("semigroup")
    if "inv" in body:
        inv = _ints(body["inv"], f"{where}.inv", 0, n, length=n)
    else:
        inv = []
        for s in range(n):
            cands = [t for t in range(n) if mul[mul[s][t]][s] == s and mul[mul[t][s]][t] == t]
            inv.append(cands[0] if cands else s)
    unit = body.get("unit")
    if unit is not None:
        unit = _int(unit, f"{where}.unit", 0, n)
    labels = body.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n or not all(isinstance(x, str) for x in labels)):
        raise ParseError(f"{where}.labels: expected {n} strings")
    S = InverseSemigroup(np.array(mul, dtype=np.int64).reshape(n, n), inv, unit, labels)
    report.extend(verify_inverse_semigroup(S))
    return S, report


def load_pseudogroup(body, where="pseudogroup"):
    _check_kind(body, "pseudogroup", where)
    X, report = load_space(_need(body, "space", where), f"{where}.space")
    raw = _need(body, "elements", where)
    if not isinstance(raw, list):
        raise ParseError(f"{where}.elements: expected an array")
    elems = [PartialBijection(X, _mapping(m, f"{where}.elements[{k}]", X.point_count)) for k, m in enumerate(raw)]
    out = Report("pseudogroup")
    out.extend(report, prefix="space:")
    if not report.valid:
        return None, out
    for k, h in enumerate(elems):
        out.extend(verify_partial_bijection(h), prefix=f"element-{k}:")
    if not out.valid:
        return None, out
    seen = set(elems)
    for k, h in enumerate(elems):
        if invert(h) not in seen:
            out.add("closure-inverse", (k,))
        for j, g in enumerate(elems):
            if compose(h, g) not in seen:
                out.add("closure-product", (k, j))
                break
    if not out.valid:
        return None, out
    return Pseudogroup(X, elems), out


def load_representation(body, where="representation"):
    _check_kind(body, "representation", where)
    S, srep = load_semigroup(_need(body, "semigroup", where), f"{where}.semigroup")
    X, xrep = load_space(_need(body, "space", where), f"{where}.space")
    raw = _need(body, "assign", where)
    if not isinstance(raw, list) or len(raw) != S.size:
        raise ParseError(f"{where}.assign: expected {S.size} maps")
    assign = tuple(PartialBijection(X, _mapping(m, f"{where}.assign[{k}]", X.point_count)) for k, m in enumerate(raw))
    rep = Representation(S, X, assign)
    report = Report("representation")
    report.extend(srep, prefix="semigroup:")
    report.extend(xrep, prefix="space:")
    if report.valid:
        report.extend(verify_representation(rep))
    return rep, report


def load_groupoid(body, where="groupoid"):
    _check_kind(body, "groupoid", where)
    O, orep = load_space(_need(body, "objects", where), f"{where}.objects")
    A, arep = load_space(_need(body, "arrows", where), f"{where}.arrows")
    n0, n1 = O.point_count, A.point_count
    d = tuple(_ints(_need(body, "d", where), f"{where}.d", 0, n0, length=n1))
    r = tuple(_ints(_need(body, "r", where), f"{where}.r", 0, n0, length=n1))
    u = tuple(_ints(_need(body, "u", where), f"{where}.u", 0, n1, length=n0))
    i = tuple(_ints(_need(body, "i", where), f"{where}.i", 0, n1, length=n1))
    raw = _need(body, "mul", where)
    if not isinstance(raw, list):
        raise ParseError(f"{where}.mul: expected an array of [x, y, xy] triples")
    triples = [tuple(_ints(t, f"{where}.mul[{k}]", 0, n1, length=3)) for k, t in enumerate(raw)]
    triples.sort()
    labels = body.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n1 or not all(isinstance(x, str) for x in labels):
            raise ParseError(f"{where}.labels: expected {n1} strings")
        labels = tuple(labels)
    pairs = tuple(t[:2] for t in triples)
    G = FiniteGroupoid(O, A, d, r, u, i, pairs, tuple(t[2] for t in triples), labels)
    report = Report("groupoid")
    report.extend(orep, prefix="objects:")
    report.extend(arep, prefix="arrows:")
    if report.valid:
        report.extend(verify_groupoid(G))
    return G, report


def load_coarse(body, where="coarse"):
    _check_kind(body, "coarse", where)
    n = _int(_need(body, "points", where), f"{where}.points", 0)

    def pairs_mask(v, w):
        if not isinstance(v, list):
            raise ParseError(f"{w}: expected an array of pairs")
        ps = [tuple(_ints(p, f"{w}[{k}]", 0, n, length=2)) for k, p in enumerate(v)]
        if any(a >= b for a, b in zip(ps, ps[1:])):
            raise ParseError(f"{w}: pairs must be strictly increasing")
        return mask_of(pair_index(n, x, y) for x, y in ps)

    if "controlled" in body:
        fam = [pairs_mask(E, f"{where}.controlled[{k}]") for k, E in enumerate(body["controlled"])]
        report = verify_coarse_structure(n, fam)
        top = 0
        for E in fam:
            top |= E
        return CoarseStructure(n, top), report
    gens = [pairs_mask(E, f"{where}.generators[{k}]") for k, E in enumerate(_need(body, "generators", where))]
    report = Report("coarse")
    for k, g in enumerate(gens):
        if not g:
            report.add("generator-nonempty", (k,))
    if not report.valid:
        return None, report
    return generate_coarse_structure(n, gens), report


LOADERS = {
    "space": load_space,
    "semigroup": load_semigroup,
    "pseudogroup": load_pseudogroup,
    "representation": load_representation,
    "groupoid": load_groupoid,
    "coarse": load_coarse,
}


def load_document(doc):
    if not isinstance(doc, dict):
        raise ParseError("structure file must be a JSON object")
    if doc.get("v") != VERSION:
        raise ParseError(f"unsupported schema version {doc.get('v')!r}")
    kind = _need(doc, "kind", "file")
    if kind not in LOADERS:
        raise ParseError(f"unknown kind {kind!r}")
    obj, report = LOADERS[kind](doc)
    return kind, obj, report


def loads(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    return load_document(doc)


def load_path(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads(text)


# ----------------------------------------------------------------------------
# emitters: object -> body


def space_body(X):
    return {"kind": "space", "points": X.point_count, "nbhd": [_sorted_list(m) for m in X.nbhd]}


def semigroup_body(S):
    body = {
        "kind": "semigroup",
        "size": S.size,
        "mul": S.mul.tolist(),
        "inv": S.inv.tolist(),
        "unit": S.unit,
    }
    if S.labels is not None:
        body["labels"] = list(S.labels)
    return body


def pseudogroup_body(P):
    return {"kind": "pseudogroup", "space": space_body(P.space), "elements": [list(h.mapping) for h in P.elements]}


def representation_body(rep):
    return {
        "kind": "representation",
        "semigroup": semigroup_body(rep.semigroup),
        "space": space_body(rep.space),
        "assign": [list(h.mapping) for h in rep.assign],
    }


def groupoid_body(G, labels=None):
    body = {
        "kind": "groupoid",
        "objects": space_body(G.objects),
        "arrows": space_body(G.arrows),
        "d": list(G.d),
        "r": list(G.r),
        "u": list(G.u),
        "i": list(G.i),
        "mul": [[x, y, z] for (x, y), z in zip(G.pairs, G.prod)],
    }
    labels = G.labels if labels is None else labels
    if labels is not None:
        body["labels"] = list(labels)
    return body


def coarse_body(E):
    n = E.base_size
    return {"kind": "coarse", "points": n, "generators": [[list(divmod(p, n)) for p in bits(E.maximal)]]}


def germ_labels(germs):
    return [f"{x}:{sorted(m)}" for x, m in germs.arrows]


EMITTERS = {
    FiniteSpace: space_body,
    InverseSemigroup: semigroup_body,
    Pseudogroup: pseudogroup_body,
    Representation: representation_body,
    FiniteGroupoid: groupoid_body,
    CoarseStructure: coarse_body,
}


def body_of(obj):
    for cls, fn in EMITTERS.items():
        if isinstance(obj, cls):
            return fn(obj)
    raise TypeError(f"no serializer for {type(obj).__name__}")


def document(body):
    return {"v": VERSION, **body}


def dumps(doc):
    """Canonical text: sorted keys, arrays of scalars kept on one line."""
    return _pretty(doc, 0) + "\n"


def _pretty(obj, level):
    pad = "  " * (level + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_pretty(obj[k], level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * level + "}"
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        if all(isinstance(x, list) and not any(isinstance(y, (dict, list)) for y in x) for x in obj):
            rows = [json.dumps(x, ensure_ascii=False) for x in obj]
            return "[\n" + ",\n".join(pad + r for r in rows) + "\n" + "  " * level + "]"
        items = [pad + _pretty(x, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * level + "]"
    return json.dumps(obj, ensure_ascii=False)


def dump_object(obj):
    return dumps(document(body_of(obj)))


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".germoid-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
