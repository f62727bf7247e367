"""JSON and DOT input/output for complexes, maps, graphs of spaces and search data."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .cubes import AbstractSimplicialish, CubeComplex, CubeError
from .freegrp import CosetProduct, FiniteQuotient
from .gos import EdgeSpace, GraphOfSpaces, HorizontalGraph, UGraph
from .maps import CubicalMap, PartialLocalIsometry, extend_to_faces
from .symmetry import Sym

PathLike = Union[str, Path]


class SchemaError(ValueError):
    """Input does not match the expected schema."""


def _expect(d: dict, schema: str) -> None:
    got = d.get("schema", schema)
    if got != schema:
        raise SchemaError(f"expected schema {schema}, got {got}")


# complexes -------------------------------------------------------------------------


def complex_to_json(X: CubeComplex) -> dict:
    return {"schema": "cubecomplex.v1", **X.to_records()}


def complex_from_json(d: dict) -> CubeComplex:
    _expect(d, "cubecomplex.v1")
    try:
        return CubeComplex.from_records(d["vertices"], d.get("edges", []), d.get("squares", []), d.get("cubes3", []))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed cubecomplex: {exc!r}") from exc


# maps ------------------------------------------------------------------------------


def map_to_json(f: CubicalMap) -> dict:
    return f.to_json()


def map_from_json(domain: CubeComplex, codomain: CubeComplex, d: dict) -> CubicalMap:
    _expect(d, "cubicalmap.v1")
    rows = d["cells"]
    if isinstance(rows, dict):
        rows = [{"cell": c, **v} for c, v in rows.items()]
    cells = {}
    for row in rows:
        c = row["cell"]
        if c not in domain:
            raise SchemaError(f"map cell {c} is not in the domain")
        cells[c] = (row["image"], Sym.from_index(domain.dim_of(c), row.get("sym", 0)))
    return extend_to_faces(domain, codomain, cells)


def partial_map_from_json(Y: CubeComplex, d: dict) -> PartialLocalIsometry:
    """``cells`` lists the generating cells; their faces are added automatically."""
    rows = d["cells"]
    if isinstance(rows, dict):
        rows = [{"cell": c, **v} for c, v in rows.items()]
    cells = {}
    for row in rows:
        c = row["cell"]
        if c not in Y:
            raise SchemaError(f"partial map cell {c} is not in Y")
        cells[c] = (row["image"], Sym.from_index(Y.dim_of(c), row.get("sym", 0)))
    return PartialLocalIsometry.build(Y, cells, d.get("name", ""))


def problem_to_json(Y: CubeComplex, O: Sequence[PartialLocalIsometry]) -> dict:
    return {"schema": "problem.v1", "Y": complex_to_json(Y),
            "maps": [{"name": P.name or f"phi{j}", **P.phi.to_json()} for j, P in enumerate(O, 1)]}


def problem_from_json(d: dict) -> Tuple[CubeComplex, List[PartialLocalIsometry]]:
    _expect(d, "problem.v1")
    Y = complex_from_json(d["Y"])
    return Y, [partial_map_from_json(Y, m) for m in d.get("maps", [])]


# graphs of spaces --------------------------------------------------------------------


def gos_to_json(G: GraphOfSpaces) -> dict:
    return {
        "schema": "gos.v1",
        "graph": G.graph.to_json(),
        "vertex_spaces": {v: complex_to_json(X) for v, X in G.vertex_spaces.items()},
        "edge_spaces": {e: {"space": complex_to_json(es.space), "tau1": es.tau1.to_json(), "tau2": es.tau2.to_json()}
                        for e, es in G.edge_spaces.items()},
    }


def gos_from_json(d: dict) -> GraphOfSpaces:
    _expect(d, "gos.v1")
    g = d["graph"]
    graph = UGraph(list(g["vertices"]), {e["id"]: tuple(e["ends"]) for e in g["edges"]})
    spaces = {v: complex_from_json(x) for v, x in d["vertex_spaces"].items()}
    edge_spaces = {}
    for e, (v1, v2) in graph.edges.items():
        es = d["edge_spaces"][e]
        A = complex_from_json(es["space"])
        edge_spaces[e] = EdgeSpace(A, map_from_json(A, spaces[v1], es["tau1"]), map_from_json(A, spaces[v2], es["tau2"]))
    return GraphOfSpaces(graph, spaces, edge_spaces)


# search data -------------------------------------------------------------------------


def quotient_from_json(d: dict) -> FiniteQuotient:
    _expect(d, "quotient.v1")
    return FiniteQuotient.from_json(d)


def products_from_json(d) -> List[CosetProduct]:
    """A single product.v1 object, a list of them, or ``{"products": [...]}``."""
    if isinstance(d, dict) and "products" in d:
        d = d["products"]
    if isinstance(d, dict):
        d = [d]
    out = []
    for p in d:
        if isinstance(p, dict):
            _expect(p, "product.v1")
        out.append(CosetProduct.from_json(p))
    return out


def replay_certificate(d: dict):
    """Recompute the R-side ledger of a certificate.v1 from its own contents."""
    from .pipeline import certify

    _expect(d, "certificate.v1")
    Y, O = problem_from_json(d["problem"])
    R = complex_from_json(d["R"])
    iota = map_from_json(Y, R, d["iota"])
    Phis = [map_from_json(R, R, m) for m in d["automorphisms"]]
    return certify(R, iota, Phis, Y, O, d.get("target", "npc"))


# files ---------------------------------------------------------------------------------


def load(path: PathLike) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default)


def _default(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, tuple):
        return list(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dump(obj, path: Optional[PathLike] = None) -> None:
    text = dumps(obj) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# DOT -----------------------------------------------------------------------------------


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot(name: str, nodes: Iterable[str], edges: Iterable[Tuple[str, str, Dict[str, str]]],
         directed: bool = False, node_attrs: Optional[Dict[str, Dict[str, str]]] = None) -> str:
    kind, arrow = ("digraph", "->") if directed else ("graph", "--")
    lines = [f"{kind} {_q(name)} {{"]
    node_attrs = node_attrs or {}
    for v in nodes:
        attrs = node_attrs.get(v)
        extra = " [" + ", ".join(f"{k}={_q(x)}" for k, x in sorted(attrs.items())) + "]" if attrs else ""
        lines.append(f"  {_q(v)}{extra};")
    for a, b, attrs in edges:
        extra = " [" + ", ".join(f"{k}={_q(x)}" for k, x in sorted(attrs.items())) + "]" if attrs else ""
        lines.append(f"  {_q(a)} {arrow} {_q(b)}{extra};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def complex_dot(X: CubeComplex, highlight: Iterable[str] = (), name: str = "X") -> str:
    """Directed 1-skeleton; highlighted edges (e.g. dual edges of a hyperplane) in red."""
    hl = set(highlight)
    edges = []
    for e in X.edges:
        a, b = X.ends(e)
        attrs = {"label": e}
        if e in hl:
            attrs.update(color="red", penwidth="2")
        edges.append((a, b, attrs))
    nodes = {v: {"color": "red"} for v in X.vertices if v in hl}
    return _dot(name, X.vertices, edges, directed=True, node_attrs=nodes)


def link_dot(L: AbstractSimplicialish, name: str = "link") -> str:
    """Vertices and 1-simplices of a link; 2-simplices go into a comment-free label list."""
    edges = [(a, b, {"label": e}) for e, (a, b) in sorted(L.edges.items())]
    dot = _dot(name, L.vertices, edges)
    if L.triangles:
        tri = "; ".join(",".join(L.triangle_vertices(t)) for t in sorted(L.triangles))
        dot = dot.replace("{\n", "{\n  label=" + _q("triangles: " + tri) + ";\n", 1)
    return dot


def ugraph_dot(g: UGraph, name: str = "graph") -> str:
    return _dot(name, g.vertices, [(a, b, {"label": e}) for e, (a, b) in g.edges.items()], directed=True)


def horizontal_graph_dot(H: HorizontalGraph, name: str = "horizontal") -> str:
    edges = [(a, b, {"label": f"{lab[0]}{'+' if lab[1] > 0 else '-'}"}) for _, (a, b, lab) in sorted(H.edges.items())]
    return _dot(name, H.vertices, edges, directed=True)


def carrier_dot(X: CubeComplex, carrier: Iterable[str], dual_edges: Iterable[str], name: str = "carrier") -> str:
    """1-skeleton of a hyperplane carrier with its dual edges highlighted."""
    Z = X.restrict(set(carrier))
    return complex_dot(Z, dual_edges, name)
