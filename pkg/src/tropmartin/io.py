"""Graph and vector files, and JSON encoding of max-plus values.

Graph text format: one arc per line ``src dst weight``; ``#`` starts a
comment.  JSON format: ``{"nodes": [...], "edges": [[src, dst, w], ...]}``.
Vector format: one ``node value`` pair per line.  In JSON, ``-inf`` is
``null`` and ``+inf`` is the string ``"inf"``.
"""
from __future__ import annotations

import dataclasses
import json
import math
import warnings
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .core import ZERO, TropicalError, TropicalMatrix, TropicalVector


class GraphParseError(TropicalError):
    def __init__(self, msg, line=None, col=None, path=None):
        self.line, self.col, self.path = line, col, path
        where = ":".join(str(x) for x in (path, line, col) if x is not None)
        super().__init__(f"{where}: {msg}" if where else msg)


class DuplicateEdgeWarning(UserWarning):
    pass


def _parse_weight(tok: str, line: int, col: int, path) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise GraphParseError(f"weight {tok!r} is not a number", line, col, path) from None
    if math.isnan(w) or w == math.inf:
        raise GraphParseError(f"weight {tok!r} is not allowed", line, col, path)
    return w


def _columns(raw: str):
    """Tokens of a line with their 1-based column numbers."""
    out, col = [], 0
    for tok in raw.split():
        col = raw.index(tok, col)
        out.append((tok, col + 1))
        col += len(tok)
    return out


def parse_graph_text(text: str, nodes: Sequence[str] | None = None, integer: bool = False, path=None) -> TropicalMatrix:
    arcs: dict[tuple[str, str], float] = {}
    seen: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        toks = _columns(raw)
        if not toks:
            continue
        if len(toks) != 3:
            col = toks[min(len(toks), 3) - 1][1] if toks else 1
            raise GraphParseError(f"expected 'src dst weight', got {len(toks)} fields", lineno, col, path)
        (s, _), (d, _), (wt, wcol) = toks
        w = _parse_weight(wt, lineno, wcol, path)
        if integer and w != ZERO and w != round(w):
            raise GraphParseError(f"integer mode forbids weight {wt}", lineno, wcol, path)
        if (s, d) in arcs:
            warnings.warn(f"line {lineno}: duplicate arc {s}->{d}, keeping the last weight", DuplicateEdgeWarning)
        arcs[(s, d)] = w
        seen.extend((s, d))
    return _build(arcs, seen, nodes, path)


def _build(arcs, seen, nodes, path) -> TropicalMatrix:
    if nodes is None:
        labels = sorted(set(seen))
    else:
        labels = list(nodes)
        unknown = sorted(set(seen) - set(labels))
        if unknown:
            raise GraphParseError(f"node {unknown[0]!r} is not in the --nodes list", path=path)
    return TropicalMatrix.from_arcs(labels, [(s, d, w) for (s, d), w in arcs.items()])


def parse_graph_json(data: dict, nodes=None, integer=False, path=None) -> TropicalMatrix:
    if not isinstance(data, dict) or "edges" not in data:
        raise GraphParseError("JSON graph needs an 'edges' list", path=path)
    arcs: dict[tuple[str, str], float] = {}
    seen = [str(x) for x in data.get("nodes", [])]
    for k, e in enumerate(data["edges"]):
        if not isinstance(e, list) or len(e) != 3:
            raise GraphParseError(f"edge {k} must be [src, dst, weight]", path=path)
        s, d = str(e[0]), str(e[1])
        w = ZERO if e[2] is None else _parse_weight(str(e[2]), None, None, path)
        if integer and w != ZERO and w != round(w):
            raise GraphParseError(f"integer mode forbids weight {e[2]} (edge {k})", path=path)
        if (s, d) in arcs:
            warnings.warn(f"edge {k}: duplicate arc {s}->{d}, keeping the last weight", DuplicateEdgeWarning)
        arcs[(s, d)] = w
        seen.extend((s, d))
    if nodes is None and data.get("nodes"):
        nodes = [str(x) for x in data["nodes"]]
    return _build(arcs, seen, nodes, path)


def parse_graph(path, nodes: Sequence[str] | None = None, integer: bool = False) -> TropicalMatrix:
    p = Path(path)
    text = p.read_text()
    if p.suffix == ".json" or text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphParseError(exc.msg, exc.lineno, exc.colno, str(p)) from None
        return parse_graph_json(data, nodes, integer, str(p))
    return parse_graph_text(text, nodes, integer, str(p))


def format_number(w: float) -> str:
    if w == ZERO:
        return "-inf"
    if w == math.inf:
        return "inf"
    return str(int(w)) if float(w).is_integer() and abs(w) < 2**53 else repr(float(w))


def emit_graph(A: TropicalMatrix) -> str:
    lines = [f"{s} {d} {format_number(w)}" for s, d, w in A.arcs()]
    return "\n".join(lines) + ("\n" if lines else "")


def emit_graph_json(A: TropicalMatrix) -> dict:
    return {"nodes": list(A.labels), "edges": [[s, d, w] for s, d, w in A.arcs()]}


def parse_vector_text(text: str, labels: Sequence[str], path=None) -> TropicalVector:
    index = {x: i for i, x in enumerate(labels)}
    vals = np.full(len(labels), ZERO)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        toks = _columns(raw)
        if not toks:
            continue
        if len(toks) != 2:
            raise GraphParseError("expected 'node value'", lineno, toks[0][1], path)
        (node, ncol), (v, vcol) = toks
        if node not in index:
            raise GraphParseError(f"unknown node {node!r}", lineno, ncol, path)
        try:
            val = float(v)
        except ValueError:
            raise GraphParseError(f"value {v!r} is not a number", lineno, vcol, path) from None
        if math.isnan(val) or val == math.inf:
            raise GraphParseError(f"value {v!r} is not allowed", lineno, vcol, path)
        vals[index[node]] = val
    return TropicalVector(tuple(labels), vals)


def parse_vector(path, labels: Sequence[str]) -> TropicalVector:
    return parse_vector_text(Path(path).read_text(), labels, str(path))


def emit_vector(u: TropicalVector) -> str:
    return "".join(f"{x} {format_number(v)}\n" for x, v in zip(u.labels, u.values) if v != ZERO)


# --------------------------------------------------------------------------
# JSON


def to_jsonable(obj: Any) -> Any:
    """Recursively convert to JSON types: -inf -> None, +inf -> "inf"."""
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if f == ZERO:
            return None
        if f == math.inf:
            return "inf"
        if math.isnan(f):
            raise TropicalError("NaN cannot be serialised")
        return int(f) if f.is_integer() and abs(f) < 2**53 else f
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, str) or obj is None:
        return obj
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, TropicalVector):
        return {x: to_jsonable(v) for x, v in zip(obj.labels, obj.values)}
    if isinstance(obj, TropicalMatrix):
        return {"labels": list(obj.labels), "values": to_jsonable(obj.dense())}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Iterable):
        return [to_jsonable(x) for x in obj]
    return str(obj)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)
