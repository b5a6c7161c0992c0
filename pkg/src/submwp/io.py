"""JSON reading and writing for instances, graphs and fractional assignments.

Rationals are written as "p/q" strings. Parse errors carry a JSON pointer to
the offending field.
"""

from __future__ import annotations

import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

from ._util import as_fraction, fmt_value
from .core import (CoverageOracle, ExplicitOracle, GraphCoverageOracle, GroundSet, Instance,
                   PartitionMatroidOracle)
from .errors import DomainError, InputError, SubmwpError
from .gcov import WeightedGraph
from .hardness import SimpleGraph
from .relax import FractionalAssignment

EXPLICIT_EXPORT_MAX_N = 12
SUBSET_SEP = "|"


def load_json(path):
    text = Path(path).read_text() if str(path) != "-" else sys.stdin.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", pointer="") from exc


def dump_json(doc, path=None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def digest(doc) -> str:
    """sha256 of the canonical (sorted, compact) JSON encoding."""
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _get(doc, key, ptr, kind=None):
    if not isinstance(doc, dict):
        raise InputError("expected an object", pointer=ptr or "/")
    if key not in doc:
        raise InputError(f"missing field {key!r}", pointer=f"{ptr}/{key}")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise InputError(f"field {key!r} has the wrong type", pointer=f"{ptr}/{key}")
    return val


def _rational(v, ptr):
    try:
        return as_fraction(v)
    except DomainError as exc:
        raise InputError(str(exc), pointer=ptr) from exc


def _member(ground: GroundSet, name, ptr) -> int:
    try:
        return ground.index(name)
    except (KeyError, DomainError) as exc:
        if isinstance(name, int) and not isinstance(name, bool) and 0 <= name < ground.n:
            return name
        raise InputError(f"unknown element {name!r}", pointer=ptr) from exc


def _members(ground, names, ptr):
    if not isinstance(names, list):
        raise InputError("expected a list of elements", pointer=ptr)
    return {_member(ground, v, f"{ptr}/{i}") for i, v in enumerate(names)}


def _subset_key(ground: GroundSet, mask: int) -> str:
    if any(SUBSET_SEP in n for n in ground.elements):
        raise DomainError(f"element names may not contain {SUBSET_SEP!r} in explicit tables")
    return SUBSET_SEP.join(ground.names(mask))


def oracle_from_json(ground: GroundSet, fn, ptr="/function"):
    kind = _get(fn, "kind", ptr, str)
    try:
        if kind == "explicit":
            values = _get(fn, "values", ptr, dict)
            table = {}
            for key, val in values.items():
                names = [s for s in key.split(SUBSET_SEP) if s] if key else []
                table[frozenset(_members(ground, names, f"{ptr}/values/{key}"))] = _rational(
                    val, f"{ptr}/values/{key}")
            return ExplicitOracle(ground, table, monotone=bool(fn.get("monotone", True)))
        if kind == "coverage":
            hyper = []
            for i, item in enumerate(_get(fn, "hyperedges", ptr, list)):
                p = f"{ptr}/hyperedges/{i}"
                if not isinstance(item, list) or len(item) != 2:
                    raise InputError("hyperedge must be [members, weight]", pointer=p)
                hyper.append((_members(ground, item[0], f"{p}/0"), _rational(item[1], f"{p}/1")))
            return CoverageOracle(ground, hyper)
        if kind == "graph_coverage":
            edges = []
            for i, item in enumerate(_get(fn, "edges", ptr, list)):
                p = f"{ptr}/edges/{i}"
                if not isinstance(item, list) or len(item) != 3:
                    raise InputError("edge must be [u, v, weight]", pointer=p)
                edges.append((_member(ground, item[0], f"{p}/0"), _member(ground, item[1], f"{p}/1"),
                              _rational(item[2], f"{p}/2")))
            return GraphCoverageOracle(ground, edges)
        if kind == "partition_matroid":
            blocks = [_members(ground, b, f"{ptr}/blocks/{i}") for i, b in enumerate(_get(fn, "blocks", ptr, list))]
            return PartitionMatroidOracle(ground, blocks)
        if kind == "symgap":
            from .symgap import SymInstance

            k = _get(fn, "k", ptr, int)
            oracle = SymInstance(k).oracle()
            if list(oracle.ground) != list(ground):
                raise InputError("symgap ground set must list the grid cells in row-major order", pointer="/ground")
            return oracle
    except InputError:
        raise
    except SubmwpError as exc:
        raise InputError(str(exc), pointer=ptr) from exc
    raise InputError(f"unknown function kind {kind!r}", pointer=f"{ptr}/kind")


def instance_from_json(doc) -> Instance:
    names = _get(doc, "ground", "", list)
    try:
        ground = GroundSet(names)
    except SubmwpError as exc:
        raise InputError(str(exc), pointer="/ground") from exc
    terms = _get(doc, "terminals", "", list)
    terminals = tuple(_member(ground, t, f"/terminals/{i}") for i, t in enumerate(terms))
    oracle = oracle_from_json(ground, _get(doc, "function", "", dict))
    try:
        return Instance(oracle, terminals, name=str(doc.get("name", "")))
    except SubmwpError as exc:
        raise InputError(str(exc), pointer="/terminals") from exc


def load_instance(path) -> Instance:
    return instance_from_json(load_json(path))


def instance_to_json(instance: Instance, form: str = "native") -> dict:
    """Canonical JSON. ``form="explicit"`` writes the full table (n <= 12)."""
    f, ground = instance.oracle, instance.ground
    doc = {"ground": list(ground), "terminals": [ground.elements[t] for t in instance.terminals]}
    if instance.name:
        doc["name"] = instance.name
    if form == "explicit":
        if f.n > EXPLICIT_EXPORT_MAX_N:
            raise DomainError(f"explicit export needs n <= {EXPLICIT_EXPORT_MAX_N}")
        nums, den = f.exact_table()
        doc["function"] = {"kind": "explicit", "values": {
            _subset_key(ground, m): fmt_value(Fraction(int(nums[m]), den)) for m in range(1 << f.n)}}
        return doc
    if f.kind == "explicit":
        doc["function"] = {"kind": "explicit", "values": {
            _subset_key(ground, m): fmt_value(v) for m, v in sorted(f.table.items())}}
    elif f.kind == "graph_coverage":
        doc["function"] = {"kind": "graph_coverage", "edges": [
            [ground.elements[u], ground.elements[v], fmt_value(w)] for u, v, w in f.edges]}
    elif f.kind == "coverage":
        doc["function"] = {"kind": "coverage", "hyperedges": [
            [ground.names(m), fmt_value(w)] for m, w in zip(f.edge_masks, f.weights)]}
    elif f.kind == "partition_matroid":
        doc["function"] = {"kind": "partition_matroid", "blocks": [ground.names(b) for b in f.blocks]}
    elif f.kind == "symgap":
        doc["function"] = {"kind": "symgap", "k": f.sym.k}
    else:
        raise DomainError(f"no JSON form for oracle kind {f.kind!r}")
    return doc


def graph_from_json(doc):
    """Weighted graph JSON -> (WeightedGraph, terminals)."""
    names = _get(doc, "vertices", "", list)
    try:
        ground = GroundSet(names)
    except SubmwpError as exc:
        raise InputError(str(exc), pointer="/vertices") from exc
    edges = []
    for i, item in enumerate(_get(doc, "edges", "", list)):
        p = f"/edges/{i}"
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise InputError("edge must be [u, v, weight]", pointer=p)
        w = _rational(item[2], f"{p}/2") if len(item) == 3 else Fraction(1)
        edges.append((_member(ground, item[0], f"{p}/0"), _member(ground, item[1], f"{p}/1"), w))
    try:
        graph = WeightedGraph(ground, edges)
    except SubmwpError as exc:
        raise InputError(str(exc), pointer="/edges") from exc
    terms = tuple(_member(ground, t, f"/terminals/{i}") for i, t in enumerate(doc.get("terminals", [])))
    return graph, terms


def graph_to_json(graph: WeightedGraph, terminals=()) -> dict:
    names = graph.vertices.elements
    return {"vertices": list(names), "terminals": [names[t] for t in terminals],
            "edges": [[names[u], names[v], fmt_value(w)] for u, v, w in graph.edges]}


def simple_graph_from_json(doc) -> SimpleGraph:
    names = _get(doc, "vertices", "", list)
    index = {str(v): i for i, v in enumerate(names)}
    edges = []
    for i, item in enumerate(_get(doc, "edges", "", list)):
        p = f"/edges/{i}"
        if not isinstance(item, list) or len(item) != 2:
            raise InputError("edge must be [u, v]", pointer=p)
        ends = []
        for j, v in enumerate(item):
            if str(v) in index:
                ends.append(index[str(v)])
            elif isinstance(v, int) and 0 <= v < len(names):
                ends.append(v)
            else:
                raise InputError(f"unknown vertex {v!r}", pointer=f"{p}/{j}")
        edges.append(tuple(ends))
    try:
        return SimpleGraph(names, edges)
    except SubmwpError as exc:
        raise InputError(str(exc), pointer="/edges") from exc


def x_to_json(x: FractionalAssignment) -> dict:
    return {"terminals": list(x.terminals), "x": [[fmt_value(v) for v in row] for row in x.tolist()]}


def x_from_json(doc, instance: Instance) -> FractionalAssignment:
    rows = _get(doc, "x", "", list)
    if len(rows) != instance.n:
        raise InputError(f"x has {len(rows)} rows, instance has {instance.n} elements", pointer="/x")
    parsed = []
    exact = True
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != instance.k:
            raise InputError(f"row must have {instance.k} entries", pointer=f"/x/{i}")
        if any(isinstance(v, float) for v in row):
            exact = False
        parsed.append([v if isinstance(v, float) else _rational(v, f"/x/{i}/{j}") for j, v in enumerate(row)])
    try:
        return FractionalAssignment(parsed, instance.terminals, exact=exact)
    except SubmwpError as exc:
        raise InputError(str(exc), pointer="/x") from exc


def family_instance(family: str, param: int | None = None):
    """Instance for a named family: tight43, ckr3, symgap, matroid-tight."""
    from . import families
    from .gcov import ckr_instance
    from .symgap import SymInstance

    if family == "tight43":
        return families.tight43(param or 2)
    if family == "ckr3":
        g, t = ckr_instance(3)
        return g.instance(t, name="ckr3")
    if family == "symgap":
        return SymInstance(param or 4).instance()
    if family == "matroid-tight":
        return families.matroid_tight(param or 3)
    raise DomainError(f"unknown family {family!r}")
