"""JSON graph files, DOT export and exact rational text.

File format::

    {"vertices": ["u", "v"],
     "edges": [{"id": "a", "ends": ["u", "v"], "length": "3/2"}],
     "cusps": [{"id": "z", "end": "u"}]}

``length`` is optional; a file where every edge carries one loads as a
:class:`MetricGraph`.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .errors import GraphError
from .graph import Graph, MetricGraph


def format_rational(x) -> str:
    """``num/den`` with the denominator omitted when it is 1."""
    if isinstance(x, float):
        if x == float("inf"):
            return "inf"
        raise TypeError("floats are never serialized")
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text) -> Fraction:
    if isinstance(text, bool):
        raise GraphError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise GraphError(f"rationals must be 'num/den' strings, got {text!r}")
    try:
        num, sep, den = text.strip().partition("/")
        if sep:
            return Fraction(int(num), int(den))
        return Fraction(int(num))
    except (ValueError, ZeroDivisionError):
        raise GraphError(f"not a rational: {text!r}") from None


def graph_to_dict(g) -> dict:
    graph = g.graph if isinstance(g, MetricGraph) else g
    edges = []
    for e in graph.sorted_edges():
        item = {"id": e, "ends": list(graph.edges[e])}
        if isinstance(g, MetricGraph):
            item["length"] = format_rational(g.length[e])
        edges.append(item)
    out = {"vertices": graph.sorted_vertices(), "edges": edges}
    out["cusps"] = [{"id": c, "end": graph.cusps[c]} for c in sorted(graph.cusps)]
    return out


def graph_from_dict(data: dict):
    if not isinstance(data, dict):
        raise GraphError("graph file must hold a JSON object")
    try:
        vertices = list(data.get("vertices", []))
        triples = []
        lengths = {}
        for item in data["edges"]:
            ends = item["ends"]
            if len(ends) != 2:
                raise GraphError(f"edge {item.get('id')!r} must list two ends")
            triples.append((item["id"], ends[0], ends[1]))
            if "length" in item:
                lengths[item["id"]] = parse_rational(item["length"])
        cusps = [(c["id"], c["end"]) for c in data.get("cusps", [])]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph file: {exc}") from None
    undeclared = {v for _, u, w in triples for v in (u, w)} - set(vertices)
    if vertices and undeclared:
        raise GraphError(f"edges use undeclared vertices {sorted(undeclared)!r}")
    graph = Graph.from_edges(triples, vertices, cusps)
    if lengths and len(lengths) == len(graph.edges):
        return MetricGraph(graph, lengths)
    if lengths:
        raise GraphError("either every edge or no edge must carry a length")
    return graph


def dumps_graph(g) -> str:
    return json.dumps(graph_to_dict(g), indent=2, sort_keys=True) + "\n"


def loads_graph(text: str):
    return graph_from_dict(json.loads(text))


def load_graph(path) -> Graph | MetricGraph:
    return loads_graph(Path(path).read_text(encoding="utf-8"))


def save_graph(g, path) -> None:
    Path(path).write_text(dumps_graph(g), encoding="utf-8")


def _dot_id(x) -> str:
    return json.dumps(str(x))


def to_dot(g, name: str = "G", labels: dict | None = None) -> str:
    """Undirected DOT text; edge labels are lengths unless ``labels`` is given."""
    graph = g.graph if isinstance(g, MetricGraph) else g
    lines = [f"graph {_dot_id(name)} {{"]
    for v in graph.sorted_vertices():
        lines.append(f"  {_dot_id(v)};")
    for e in graph.sorted_edges():
        u, v = graph.edges[e]
        label = str(e)
        if labels is not None and e in labels:
            label = f"{e}: {labels[e]}"
        elif isinstance(g, MetricGraph):
            label = f"{e}: {format_rational(g.length[e])}"
        lines.append(f"  {_dot_id(u)} -- {_dot_id(v)} [label={_dot_id(label)}];")
    for c in sorted(graph.cusps):
        stub = f"cusp:{c}"
        lines.append(f"  {_dot_id(stub)} [shape=point];")
        lines.append(f"  {_dot_id(graph.cusps[c])} -- {_dot_id(stub)} [label={_dot_id(c)}, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
