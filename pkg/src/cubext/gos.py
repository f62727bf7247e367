"""Graphs of cube complexes, total spaces, horizontal quotients and their diagnostics.

Total-space ids: a cell ``c`` of the vertex-space at ``v`` is ``v/c``; the thick
cell ``c x I`` of the edge-space at ``e`` is ``e/c|I`` with the interval as the
last coordinate.  The ends of a thick cell are identified with vertex-space
cells through the attaching maps, so the total space has no separate end
copies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .cubes import AbstractSimplicialish, CubeComplex, CubeError, Verdict, check_valid, is_npc, simplex_id
from .hyperplanes import corner_pairs, edge_parallelism_classes, hyperplanes, subcomplex_self_osculates
from .maps import (
    CubicalMap,
    PartialLocalIsometry,
    check_map,
    inclusion,
    is_connected,
    is_injective,
    is_local_isometry,
    is_valid_partial_local_isometry,
)
from .symmetry import Pattern, Sym, faces, free_coords, localize, pattern_dim, pattern_str
from .uf import WeightedUnionFind, sym_uf


@dataclass
class UGraph:
    vertices: List[str]
    edges: Dict[str, Tuple[str, str]]

    def __post_init__(self):
        vs = set(self.vertices)
        for e, (a, b) in self.edges.items():
            if a not in vs or b not in vs:
                raise CubeError(f"graph edge {e} has unknown endpoint")

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [{"id": e, "ends": list(v)} for e, v in self.edges.items()]}

    def is_tree(self) -> bool:
        import networkx as nx

        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges.values())
        return bool(self.vertices) and nx.is_tree(g)


@dataclass
class EdgeSpace:
    space: CubeComplex
    tau1: CubicalMap
    tau2: CubicalMap


@dataclass
class GraphOfSpaces:
    graph: UGraph
    vertex_spaces: Dict[str, CubeComplex]
    edge_spaces: Dict[str, EdgeSpace]

    def check(self) -> List[str]:
        """Problems with the attaching data (empty when well-formed)."""
        out = []
        for v in self.graph.vertices:
            if v not in self.vertex_spaces:
                out.append(f"vertex {v} has no space")
        for e, (v1, v2) in self.graph.edges.items():
            es = self.edge_spaces.get(e)
            if es is None:
                out.append(f"edge {e} has no edge-space")
                continue
            if not is_connected(es.space):
                out.append(f"edge-space {e} is not connected")
            for name, tau, v in (("tau1", es.tau1, v1), ("tau2", es.tau2, v2)):
                if tau.codomain is not self.vertex_spaces[v] and tau.codomain != self.vertex_spaces[v]:
                    out.append(f"{name} of {e} does not land in the space of {v}")
                    continue
                if not check_map(tau):
                    out.append(f"{name} of {e} is not a cubical map: {check_map(tau).witness}")
                elif not is_injective(tau):
                    out.append(f"{name} of {e} is not injective")
        return out


def vid(v: str, c: str) -> str:
    return f"{v}/{c}"


def tid(e: str, c: str) -> str:
    return f"{e}/{c}|I"


@dataclass
class TotalSpace:
    gos: GraphOfSpaces
    complex: CubeComplex
    provenance: Dict[str, Tuple[str, str, str]]

    def projection(self, cell: str) -> Tuple[str, str]:
        """('vertex', v) or ('edge', e)."""
        kind, where, _ = self.provenance[cell]
        return kind, where

    def is_vertical(self, cell: str) -> bool:
        return self.provenance[cell][0] == "vertex"

    def vertex_space_cells(self, v: str) -> List[str]:
        return sorted(c for c, (k, w, _) in self.provenance.items() if k == "vertex" and w == v)

    def end(self, e: str, c: str, side: int) -> Tuple[str, Sym]:
        """Total-space cell that ``c`` of edge-space ``e`` is attached to on ``side`` (1 or 2)."""
        es = self.gos.edge_spaces[e]
        v = self.gos.graph.edges[e][side - 1]
        d, g = (es.tau1 if side == 1 else es.tau2).cells[c]
        return vid(v, d), g


def assemble(G: GraphOfSpaces) -> TotalSpace:
    problems = G.check()
    if problems:
        raise CubeError("invalid graph of spaces: " + "; ".join(problems))
    dims: Dict[str, int] = {}
    tables: Dict[str, dict] = {}
    prov: Dict[str, Tuple[str, str, str]] = {}
    for v in G.graph.vertices:
        X = G.vertex_spaces[v]
        for c in X.cells():
            dims[vid(v, c)] = X.dim_of(c)
            tables[vid(v, c)] = {p: (vid(v, f), h) for p, (f, h) in X.table(c).items()}
            prov[vid(v, c)] = ("vertex", v, c)
    for e, (v1, v2) in G.graph.edges.items():
        es = G.edge_spaces[e]
        Xe = es.space
        for c in Xe.cells():
            n = Xe.dim_of(c)
            t = {}
            for p in faces(n + 1)[:-1]:
                base, last = p[:-1], p[-1]
                f, h = (c, Sym.identity(n)) if pattern_dim(base) == n else Xe.face(c, base)
                if last is None:
                    t[p] = (tid(e, f), h.extend())
                else:
                    v, tau = (v1, es.tau1) if last == 0 else (v2, es.tau2)
                    d, g = tau.cells[f]
                    t[p] = (vid(v, d), g * h)
            dims[tid(e, c)] = n + 1
            tables[tid(e, c)] = t
            prov[tid(e, c)] = ("edge", e, c)
    if len(prov) != sum(len(X.cells()) for X in G.vertex_spaces.values()) + sum(
            len(s.space.cells()) for s in G.edge_spaces.values()):
        raise CubeError("total-space ids collide; avoid '/' and '|I' in cell ids")
    X = CubeComplex(dims, tables)
    check_valid(X)
    return TotalSpace(G, X, prov)


def realization(Y: CubeComplex, O: Sequence[PartialLocalIsometry], check: bool = True,
                vertex: str = "v") -> GraphOfSpaces:
    """Graph of spaces over a bouquet: one loop ``g{j}`` per partial map."""
    if check:
        for j, P in enumerate(O, 1):
            if not is_valid_partial_local_isometry(P):
                raise CubeError(f"partial map {j} ({P.name or 'unnamed'}) is not a valid partial local isometry")
    edges = {loop_name(j): (vertex, vertex) for j in range(1, len(O) + 1)}
    spaces = {}
    for j, P in enumerate(O, 1):
        A = P.source
        spaces[loop_name(j)] = EdgeSpace(A, inclusion(A, Y), CubicalMap(A, Y, dict(P.phi.cells)))
    return GraphOfSpaces(UGraph([vertex], edges), {vertex: Y}, spaces)


def loop_name(j: int) -> str:
    return f"g{j}"


# horizontal quotient ------------------------------------------------------------


@dataclass
class HorizontalQuotient:
    T: TotalSpace
    strict: bool
    witness: Optional[dict]
    complex: Optional[CubeComplex]
    q: Dict[str, Tuple[str, Sym]]
    classes: Dict[str, List[str]]
    uf: WeightedUnionFind = field(repr=False)

    def root(self, cell: str) -> str:
        return self.uf.find(cell)[0]


def _horizontal_uf(T: TotalSpace) -> Tuple[WeightedUnionFind, List[dict]]:
    X = T.complex
    uf = sym_uf(X.dim_of)
    for c in X.cells():
        if T.is_vertical(c):
            uf.add(c)
    twists = []
    for c in X.cells():
        kind, e, base = T.provenance[c]
        if kind != "edge":
            continue
        a, ga = T.end(e, base, 1)
        b, gb = T.end(e, base, 2)
        if not uf.union(a, b, gb * ga.inverse()):
            twists.append({"kind": "twist", "cells": [a, b], "thick": c})
    return uf, twists


def horizontal_quotient(T: TotalSpace) -> HorizontalQuotient:
    X = T.complex
    uf, twists = _horizontal_uf(T)
    classes = {r: sorted(m) for r, m in uf.classes().items()}
    witness = None
    # 0-cubes first: the witness the strict-cover argument talks about
    for d in range(X.dim + 1):
        for r in sorted(classes):
            by_space: Dict[str, str] = {}
            for c in classes[r]:
                if X.dim_of(c) != d:
                    continue
                v = T.provenance[c][1]
                if v in by_space:
                    witness = {"kind": "same_vertex_space", "dim": d, "cells": [by_space[v], c], "vertex": v}
                    break
                by_space[v] = c
            if witness:
                break
        if witness:
            break
    if witness is None and twists:
        witness = twists[0]
    q: Dict[str, Tuple[str, Sym]] = {}
    for c in X.cells():
        if T.is_vertical(c):
            q[c] = uf.find(c)
    for c in X.cells():
        kind, e, base = T.provenance[c]
        if kind == "edge":
            a, ga = T.end(e, base, 1)
            r, m = q[a]
            q[c] = (r, m * ga)
    if witness is not None:
        return HorizontalQuotient(T, False, witness, None, q, classes, uf)
    dims = {r: X.dim_of(r) for r in classes}
    tables = {}
    for r in classes:
        tables[r] = {p: (q[f][0], q[f][1] * h) for p, (f, h) in X.table(r).items()}
    R = CubeComplex(dims, tables)
    return HorizontalQuotient(T, True, None, R, q, classes, uf)


def is_strict(T: TotalSpace) -> Verdict:
    H = horizontal_quotient(T)
    return Verdict(H.strict, H.witness)


def e_class(T: TotalSpace, cell: str) -> List[str]:
    uf, _ = _horizontal_uf(T)
    if not T.is_vertical(cell):
        kind, e, base = T.provenance[cell]
        cell = T.end(e, base, 1)[0]
    r = uf.find(cell)[0]
    return sorted(c for c in uf.parent if uf.find(c)[0] == r)


@dataclass
class HorizontalGraph:
    vertices: List[str]
    edges: Dict[str, Tuple[str, str, Tuple[str, int]]]

    def to_json(self) -> dict:
        return {"vertices": self.vertices,
                "edges": [{"id": h, "ends": [a, b], "label": list(lab)} for h, (a, b, lab) in sorted(self.edges.items())]}


def horizontal_edges(T: TotalSpace) -> Dict[str, Tuple[str, str, Tuple[str, int]]]:
    """Every horizontal 1-cell with its (tau1 end, tau2 end, label)."""
    out = {}
    for c, (kind, e, base) in T.provenance.items():
        if kind == "edge" and T.gos.edge_spaces[e].space.dim_of(base) == 0:
            out[c] = (T.end(e, base, 1)[0], T.end(e, base, 2)[0], (e, 1))
    return out


def horizontal_graph(T: TotalSpace, x: str) -> HorizontalGraph:
    if T.complex.dim_of(x) != 0 or not T.is_vertical(x):
        raise CubeError(f"{x} is not a 0-cube of a vertex-space")
    cls = set(e_class(T, x))
    edges = {h: v for h, v in horizontal_edges(T).items() if v[0] in cls}
    return HorizontalGraph(sorted(cls), edges)


# induced graph of links -----------------------------------------------------------


@dataclass
class LinkGraph:
    graph: HorizontalGraph
    vertex_links: Dict[str, AbstractSimplicialish]
    edge_links: Dict[str, AbstractSimplicialish]
    attach: Dict[str, Tuple[Dict[str, str], Dict[str, str]]]
    classes: Dict[str, List[str]]
    quotient_check: Verdict

    def quotient_link(self) -> AbstractSimplicialish:
        """Horizontal quotient of the link graph, one simplex per class."""
        L = AbstractSimplicialish()
        rep = {m: r for r, ms in self.classes.items() for m in ms}
        merged = AbstractSimplicialish()
        for Lv in self.vertex_links.values():
            merged.vertices += Lv.vertices
            merged.edges.update(Lv.edges)
            merged.triangles.update(Lv.triangles)
        for r, ms in sorted(self.classes.items()):
            s = ms[0]
            if s in merged.edges:
                a, b = merged.edges[s]
                L.edges[r] = (rep[a], rep[b])
            elif s in merged.triangles:
                L.triangles[r] = tuple(rep[x] for x in merged.triangles[s])
            else:
                L.vertices.append(r)
        L.vertices.sort()
        return L


def _vertical_link(T: TotalSpace, x: str) -> AbstractSimplicialish:
    X = T.complex
    L = AbstractSimplicialish()
    for c, p in X.cofaces(x):
        if not T.is_vertical(c):
            continue
        k = X.dim_of(c)
        sid = simplex_id(c, p)
        if k == 1:
            L.vertices.append(sid)
            continue
        bd = []
        for i in range(k):
            if p[i] is None:
                continue
            P = tuple(p[i] if j == i else None for j in range(k))
            f, h = X.face(c, P)
            bd.append(simplex_id(f, h.restrict(localize(P, p))[0]))
        if k == 2:
            L.edges[sid] = (bd[0], bd[1])
        else:
            L.triangles[sid] = tuple(bd)
    L.vertices.sort()
    return L


def induced_graph_of_links(T: TotalSpace, x: str, HQ: Optional[HorizontalQuotient] = None) -> LinkGraph:
    """Graph of links over the horizontal graph of the total-space 0-cube ``x``.

    Its horizontal quotient is compared with the link of ``q(x)`` in the quotient.
    """
    from .cubes import link

    HQ = HQ or horizontal_quotient(T)
    if not HQ.strict:
        raise CubeError("induced_graph_of_links needs a strict horizontal quotient")
    G = horizontal_graph(T, x)
    vlinks = {y: _vertical_link(T, y) for y in G.vertices}
    elinks, attach = {}, {}
    uf = sym_uf(lambda _s: 0)
    for L in vlinks.values():
        for s in L.vertices + list(L.edges) + list(L.triangles):
            uf.add(s)
    for h in sorted(G.edges):
        _, e, base = T.provenance[h]
        es = T.gos.edge_spaces[e]
        Le = AbstractSimplicialish()
        maps = ({}, {})
        for c, p in es.space.cofaces(base):
            sid = simplex_id(c, p)
            k = es.space.dim_of(c)
            if k == 1:
                Le.vertices.append(sid)
            images = []
            for side, tau in ((1, es.tau1), (2, es.tau2)):
                d, g = tau.cells[c]
                v = T.gos.graph.edges[e][side - 1]
                img = simplex_id(vid(v, d), g.apply_pattern(p))
                maps[side - 1][sid] = img
                images.append(img)
            uf.union(images[0], images[1], Sym.identity(0))
        elinks[h] = Le
        attach[h] = maps
    classes = {r: sorted(m) for r, m in uf.classes().items()}
    # compare with the link of x in the quotient through q
    R = HQ.complex
    target = link(R, HQ.q[x][0])
    tset = set(target.vertices) | set(target.edges) | set(target.triangles)
    seen: Dict[str, str] = {}
    check = Verdict(True)
    for r, ms in sorted(classes.items()):
        imgs = set()
        for s in ms:
            c, pat = s.split("@")
            p = tuple(None if ch == "*" else int(ch) for ch in pat)
            d, m = HQ.q[c]
            imgs.add(simplex_id(d, m.apply_pattern(p)))
        if len(imgs) != 1:
            check = Verdict(False, {"kind": "class_not_constant", "class": ms})
            break
        img = imgs.pop()
        if img in seen:
            check = Verdict(False, {"kind": "not_injective", "classes": [seen[img], r]})
            break
        seen[img] = r
    if check and set(seen) != tset:
        check = Verdict(False, {"kind": "not_surjective", "missing": sorted(tset - set(seen))[:3]})
    return LinkGraph(G, vlinks, elinks, attach, classes, check)


# controlled ---------------------------------------------------------------------------


def _class_index(X: CubeComplex) -> Tuple[Dict[str, int], Set[FrozenSet[int]]]:
    idx = {}
    for k, cls in enumerate(edge_parallelism_classes(X)):
        for e in cls:
            idx[e] = k
    cross = set()
    for s in X.squares:
        a = idx[X.face(s, (None, 0))[0]]
        b = idx[X.face(s, (0, None))[0]]
        if a != b:
            cross.add(frozenset((a, b)))
    return idx, cross


def is_controlled(G: GraphOfSpaces, check_preconditions: bool = True) -> Verdict:
    """Wall-injectivity, cross-injectivity and non-self-osculation on both sides of every edge."""
    pre = []
    failures = []
    for e, (v1, v2) in sorted(G.graph.edges.items()):
        es = G.edge_spaces[e]
        Ie, Ce = _class_index(es.space)
        for side, tau, v in ((1, es.tau1, v1), (2, es.tau2, v2)):
            Xv = G.vertex_spaces[v]
            if check_preconditions:
                if not is_injective(tau):
                    pre.append({"edge": e, "side": side, "problem": "attaching map not injective"})
                li = is_local_isometry(tau)
                if not li:
                    pre.append({"edge": e, "side": side, "problem": "attaching map not a local isometry", **li.witness})
            Iv, Cv = _class_index(Xv)
            image_of: Dict[int, int] = {}
            where = f"{e}:tau{side}"
            for a in es.space.edges:
                k = Ie[a]
                image_of.setdefault(k, Iv[tau(a)])
            inv: Dict[int, int] = {}
            for k, m in sorted(image_of.items()):
                if m in inv:
                    failures.append({"edge": e, "side": side, "condition": "wall_injectivity",
                                     "classes": [min(_members(Ie, inv[m])), min(_members(Ie, k))], "at": where})
                    break
                inv[m] = k
            for k1, k2 in itertools.combinations(sorted(image_of), 2):
                if frozenset((k1, k2)) in Ce:
                    continue
                m1, m2 = image_of[k1], image_of[k2]
                if m1 != m2 and frozenset((m1, m2)) in Cv:
                    failures.append({"edge": e, "side": side, "condition": "cross_injectivity",
                                     "classes": [min(_members(Ie, k1)), min(_members(Ie, k2))], "at": where})
                    break
            so = subcomplex_self_osculates(Xv, tau.image_cells())
            if so:
                failures.append({"edge": e, "side": side, "condition": "self_osculation", **so.witness, "at": where})
    if pre:
        return Verdict(False, {"preconditions": pre, "failures": failures})
    return Verdict(not failures, {"failures": failures} if failures else None)


def _members(idx: Dict[str, int], k: int) -> List[str]:
    return [e for e, j in idx.items() if j == k]


# remote osculation ----------------------------------------------------------------------


def detect_remote_osculation(T: TotalSpace, HQ: Optional[HorizontalQuotient] = None,
                             include_local: bool = False, limit: Optional[int] = None) -> List[dict]:
    """Witnesses of remote self-/inter-osculation (``t_a != t_b``) at horizontal graphs."""
    HQ = HQ or horizontal_quotient(T)
    if not HQ.strict:
        raise CubeError("detect_remote_osculation needs a cubical (strict) horizontal quotient")
    X = T.complex
    R = HQ.complex
    corners = corner_pairs(R)
    hs = hyperplanes(X)
    vertical = {h.id: [e for e in h.dual_edges if T.is_vertical(e)] for h in hs}
    out: List[dict] = []

    def qe(a):
        return HQ.q[a][0]

    def root(v):
        return HQ.q[v][0]

    for H in hs:
        if not H.two_sided:
            continue
        for role in (0, 1):
            rows = []
            for a in vertical[H.id]:
                ends = X.ends(a)
                t = ends[role] if H.orientation[a] == 1 else ends[1 - role]
                rows.append((a, t))
            for (a, ta), (b, tb) in itertools.combinations(rows, 2):
                if root(ta) != root(tb) or (ta == tb and not include_local):
                    continue
                if qe(a) == qe(b) or frozenset((qe(a), qe(b))) in corners:
                    continue
                out.append({"kind": "self", "hyperplane": H.dual_edges, "edges": [a, b], "ends": [ta, tb],
                            "role": "initial" if role == 0 else "terminal", "graph": root(ta)})
    owners = {H.id: {c for c, _ in H.midcubes} for H in hs}
    for H1, H2 in itertools.combinations(hs, 2):
        if not owners[H1.id] & owners[H2.id]:
            continue
        for a in vertical[H1.id]:
            for b in vertical[H2.id]:
                if frozenset((qe(a), qe(b))) in corners:
                    continue
                for ta in sorted(set(X.ends(a))):
                    for tb in sorted(set(X.ends(b))):
                        if root(ta) != root(tb) or (ta == tb and not include_local):
                            continue
                        out.append({"kind": "inter", "hyperplanes": [H1.dual_edges, H2.dual_edges],
                                    "edges": [a, b], "ends": [ta, tb], "graph": root(ta)})
    out.sort(key=lambda w: (w["kind"], w["edges"], w["ends"]))
    return out[:limit] if limit else out


# k-corners --------------------------------------------------------------------------------


def _corner_sides(X: CubeComplex, C: str, p: Pattern) -> Tuple[Tuple[str, str], ...]:
    """The (dim D + 1)-faces of C through the corner p, as (cell, local corner) pairs."""
    n = X.dim_of(C)
    out = []
    for i in range(n):
        if p[i] is None:
            continue
        # free coordinate i, keep the rest of p fixed: this is an edge of the link
        P = tuple(None if j == i else p[j] for j in range(n))
        F, h = X.face(C, P)
        sub = h.apply_pattern(localize(P, p))
        out.append((F, pattern_str(sub)))
    return tuple(out)


def detect_empty_k_corners(X: CubeComplex) -> List[dict]:
    """Empty 1-, 2- and 3-corners at cubes D with dim D <= 1.

    An (n+2)-dimensional corner at D is an (n+2)-cube C with a face pattern
    over D; its two sides are the (n+1)-faces through D.  Witnesses are
    deduplicated by (D, set of image cells).
    """
    found: Dict[Tuple[str, FrozenSet[str]], dict] = {}

    def add(k, D, cells, occ):
        key = (D, frozenset(cells))
        found.setdefault(key, {"k": k, "at": D, "cells": sorted(set(cells)), "corners": occ})

    for D in X.cells():
        n = X.dim_of(D)
        if n > 1:
            continue
        occ = []
        for C in X.cells(n + 2):
            for p in faces(n + 2, n):
                if X.face(C, p)[0] == D:
                    occ.append((C, p, _corner_sides(X, C, p)))
        fill = set()
        if n + 3 <= X.dim:
            for C in X.cells(n + 3):
                for p in faces(n + 3, n):
                    if X.face(C, p)[0] != D:
                        continue
                    tri = []
                    for i in range(n + 3):
                        if p[i] is None:
                            continue
                        P = tuple(p[j] if j == i else None for j in range(n + 3))
                        F, h = X.face(C, P)
                        tri.append(f"{F}@{pattern_str(h.apply_pattern(localize(P, p)))}")
                    fill.add(frozenset(tri))
        labels = [f"{C}@{pattern_str(p)}" for C, p, _ in occ]
        for (C, p, sides), lab in zip(occ, labels):
            if sides[0] == sides[1]:
                add(1, D, [C], [lab])
        # corners with two distinct sides, grouped by their side pair
        by_pair: Dict[FrozenSet, List[int]] = {}
        for i, (_, _, sides) in enumerate(occ):
            if len(set(sides)) == 2:
                by_pair.setdefault(frozenset(sides), []).append(i)
        for group in by_pair.values():
            for i, j in itertools.combinations(group, 2):
                add(2, D, [occ[i][0], occ[j][0]], [labels[i], labels[j]])
        nbr: Dict[Tuple[str, str], Set[Tuple[str, str]]] = {}
        for pair in by_pair:
            u, v = sorted(pair)
            nbr.setdefault(u, set()).add(v)
            nbr.setdefault(v, set()).add(u)
        triples = []
        for u in nbr:
            for v in nbr[u]:
                if v <= u:
                    continue
                for w in nbr[u] & nbr[v]:
                    if w <= v:
                        continue
                    triples.extend(itertools.product(by_pair[frozenset((u, v))], by_pair[frozenset((v, w))],
                                                     by_pair[frozenset((u, w))]))
        for t in sorted(tuple(sorted(t)) for t in triples):
            lab = [labels[i] for i in t]
            if frozenset(lab) in fill:
                continue
            add(3, D, [occ[i][0] for i in t], lab)
    return sorted(found.values(), key=lambda w: (w["k"], w["at"], w["cells"]))
