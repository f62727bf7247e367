"""Cubical maps, immersions, local isometries, local convexity, partial local isometries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from .cubes import CubeComplex, CubeError, Verdict, is_npc, link, simplex_id
from .symmetry import Pattern, Sym, faces, pattern_dim, pattern_str

CellImage = Tuple[str, Sym]


@dataclass
class CubicalMap:
    """``cells[c] = (c', g)``: c goes to c' through ``g`` on standard cubes."""

    domain: CubeComplex
    codomain: CubeComplex
    cells: Dict[str, CellImage]

    def __call__(self, c: str) -> str:
        return self.cells[c][0]

    def sym(self, c: str) -> Sym:
        return self.cells[c][1]

    def image_cells(self) -> Set[str]:
        return {c for c, _ in self.cells.values()}

    def restrict(self, sub: CubeComplex) -> "CubicalMap":
        return CubicalMap(sub, self.codomain, {c: self.cells[c] for c in sub.cells()})

    def to_json(self) -> dict:
        return {
            "schema": "cubicalmap.v1",
            "cells": [{"cell": c, "image": i, "sym": g.index} for c, (i, g) in sorted(self.cells.items())],
        }

    @classmethod
    def from_json(cls, domain: CubeComplex, codomain: CubeComplex, data: dict) -> "CubicalMap":
        cells = {}
        for row in data["cells"]:
            c = row["cell"]
            cells[c] = (row["image"], Sym.from_index(domain.dim_of(c), row.get("sym", 0)))
        return extend_to_faces(domain, codomain, cells)

    def __eq__(self, other) -> bool:
        return isinstance(other, CubicalMap) and self.cells == other.cells


def identity(X: CubeComplex) -> CubicalMap:
    return CubicalMap(X, X, {c: (c, Sym.identity(X.dim_of(c))) for c in X.cells()})


def inclusion(A: CubeComplex, X: CubeComplex) -> CubicalMap:
    return CubicalMap(A, X, {c: (c, Sym.identity(A.dim_of(c))) for c in A.cells()})


def compose(f: CubicalMap, g: CubicalMap) -> CubicalMap:
    """``g`` after ``f``."""
    if f.codomain is not g.domain and f.codomain != g.domain:
        raise CubeError("compose: codomain of f is not the domain of g")
    out = {}
    for c, (d, s) in f.cells.items():
        e, t = g.cells[d]
        out[c] = (e, t * s)
    return CubicalMap(f.domain, g.codomain, out)


def face_image(f: CubicalMap, c: str, p: Pattern) -> CellImage:
    """Image cell and symmetry of face ``p`` of ``c`` as forced by ``f(c)``."""
    X, Y = f.domain, f.codomain
    F, h = X.face(c, p)
    c2, g = f.cells[c]
    image, rho = g.restrict(p)
    G, h2 = Y.face(c2, image)
    return G, h2 * rho * h.inverse()


def extend_to_faces(X: CubeComplex, Y: CubeComplex, cells: Dict[str, CellImage]) -> CubicalMap:
    """Complete a map given on some cells by pushing down to their faces.

    Faces already present are kept as given so that :func:`check_map` can
    report disagreements.
    """
    out = dict(cells)
    f = CubicalMap(X, Y, out)
    for c in sorted(cells, key=lambda x: -X.dim_of(x)):
        n = X.dim_of(c)
        for p in faces(n)[:-1]:
            F = X.face(c, p)[0]
            if F not in out:
                out[F] = face_image(f, c, p)
    return f


def check_map(f: CubicalMap) -> Verdict:
    """Totality, dimension preservation and boundary compatibility."""
    X, Y = f.domain, f.codomain
    for c in X.cells():
        if c not in f.cells:
            return Verdict(False, {"kind": "undefined", "cell": c})
        d, g = f.cells[c]
        if d not in Y or Y.dim_of(d) != X.dim_of(c) or g.dim != X.dim_of(c):
            return Verdict(False, {"kind": "dimension", "cell": c, "image": d})
    for c in X.cells():
        n = X.dim_of(c)
        for p in faces(n)[:-1]:
            F = X.face(c, p)[0]
            if f.cells[F] != face_image(f, c, p):
                return Verdict(False, {"kind": "boundary", "cell": c, "face": pattern_str(p)})
    return Verdict(True)


def is_injective(f: CubicalMap) -> Verdict:
    seen: Dict[str, str] = {}
    for c in sorted(f.cells):
        d = f.cells[c][0]
        if d in seen:
            return Verdict(False, {"cells": [seen[d], c], "image": d})
        seen[d] = c
    return Verdict(True)


def _link_image(f: CubicalMap, c: str, p: Pattern) -> str:
    d, g = f.cells[c]
    return simplex_id(d, g.apply_pattern(p))


def is_immersion(f: CubicalMap) -> Verdict:
    """Induced link maps at 0-cubes are injective on all simplices."""
    X = f.domain
    for v in X.vertices:
        seen: Dict[str, str] = {}
        for c, p in X.cofaces(v):
            img = _link_image(f, c, p)
            sid = simplex_id(c, p)
            if img in seen:
                return Verdict(False, {"vertex": v, "simplices": [seen[img], sid], "image": img})
            seen[img] = sid
    return Verdict(True)


def _missing_simplex(image_simplices: Set[str], image_vertices: Set[str], L) -> Optional[List[str]]:
    for e, (a, b) in sorted(L.edges.items()):
        if a in image_vertices and b in image_vertices and e not in image_simplices:
            return [a, b]
    for t in sorted(L.triangles):
        vs = L.triangle_vertices(t)
        if all(x in image_vertices for x in vs) and t not in image_simplices:
            return list(vs)
    return None


def is_local_isometry(f: CubicalMap, check_npc: bool = True) -> Verdict:
    """Immersion whose link images are full subcomplexes."""
    if check_npc:
        for name, Z in (("domain", f.domain), ("codomain", f.codomain)):
            v = is_npc(Z)
            if not v:
                return Verdict(False, {"precondition": f"{name} not NPC", **v.witness})
    im = is_immersion(f)
    if not im:
        return Verdict(False, {"not_immersion": True, **im.witness})
    X = f.domain
    for v in X.vertices:
        imgs = {_link_image(f, c, p) for c, p in X.cofaces(v)}
        verts = {_link_image(f, c, p) for c, p in X.cofaces(v, 1)}
        miss = _missing_simplex(imgs, verts, link(f.codomain, f(v)))
        if miss is not None:
            return Verdict(False, {"vertex": v, "missing": miss})
    return Verdict(True)


def is_locally_convex(X: CubeComplex, A: Iterable[str]) -> Verdict:
    """Links of A sit fully inside links of X at every 0-cube of A."""
    A = set(A)
    for v in sorted(x for x in A if X.dim_of(x) == 0):
        inside = {simplex_id(c, p) for c, p in X.cofaces(v) if c in A}
        verts = {simplex_id(c, p) for c, p in X.cofaces(v, 1) if c in A}
        miss = _missing_simplex(inside, verts, link(X, v))
        if miss is not None:
            return Verdict(False, {"vertex": v, "missing": miss})
    return Verdict(True)


def is_automorphism(f: CubicalMap) -> Verdict:
    if f.domain != f.codomain:
        return Verdict(False, {"kind": "domain_codomain"})
    ok = check_map(f)
    if not ok:
        return ok
    inj = is_injective(f)
    if not inj:
        return inj
    if f.image_cells() != set(f.codomain.cells()):
        missing = sorted(set(f.codomain.cells()) - f.image_cells())
        return Verdict(False, {"kind": "not_surjective", "cell": missing[0]})
    return Verdict(True)


def inverse(f: CubicalMap) -> CubicalMap:
    return CubicalMap(f.codomain, f.domain, {d: (c, g.inverse()) for c, (d, g) in f.cells.items()})


def is_connected(X: CubeComplex) -> bool:
    if not X.vertices:
        return False
    g = nx.MultiGraph()
    g.add_nodes_from(X.vertices)
    g.add_edges_from(X.ends(e) for e in X.edges)
    return nx.is_connected(g)


def closure(X: CubeComplex, cells: Iterable[str]) -> FrozenSet[str]:
    out = set()
    for c in cells:
        out.add(c)
        out.update(f for f, _ in X.table(c).values())
    return frozenset(out)


@dataclass
class PartialLocalIsometry:
    """A map from the subcomplex ``domain`` of Y back into Y."""

    Y: CubeComplex
    domain: FrozenSet[str]
    phi: CubicalMap
    name: str = ""

    @property
    def source(self) -> CubeComplex:
        return self.phi.domain

    @property
    def image(self) -> FrozenSet[str]:
        return frozenset(self.phi.image_cells())

    @classmethod
    def build(cls, Y: CubeComplex, cells: Dict[str, CellImage], name: str = "") -> "PartialLocalIsometry":
        dom = closure(Y, cells)
        A = Y.restrict(dom)
        return cls(Y, dom, extend_to_faces(A, Y, dict(cells)), name)

    @classmethod
    def from_vertex_edge_maps(cls, Y: CubeComplex, vmap: Dict[str, str], emap: Dict[str, Tuple[str, int]] = None,
                              name: str = "") -> "PartialLocalIsometry":
        cells = {v: (w, Sym.identity(0)) for v, w in vmap.items()}
        for e, (e2, d) in (emap or {}).items():
            cells[e] = (e2, Sym.from_dir(d))
        return cls.build(Y, cells, name)

    def to_json(self) -> dict:
        return {"name": self.name, **self.phi.to_json()}


def validate_partial_local_isometry(P: PartialLocalIsometry, check_npc: bool = True) -> Dict[str, Verdict]:
    """Every condition, each with its own verdict."""
    out: Dict[str, Verdict] = {}
    if check_npc:
        out["npc"] = is_npc(P.Y)
    out["map"] = check_map(P.phi)
    if not out["map"]:
        return out
    out["injective"] = is_injective(P.phi)
    out["connected"] = Verdict(is_connected(P.source), None if is_connected(P.source) else {"domain": sorted(P.domain)})
    out["domain_convex"] = is_locally_convex(P.Y, P.domain)
    out["image_convex"] = is_locally_convex(P.Y, P.image)
    out["local_isometry"] = is_local_isometry(P.phi, check_npc=False)
    return out


def is_valid_partial_local_isometry(P: PartialLocalIsometry, check_npc: bool = True) -> bool:
    return all(validate_partial_local_isometry(P, check_npc).values())
