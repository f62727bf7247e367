"""Cube complexes of dimension at most 3, links, simplicity, flagness and NPC.

Internally every cell carries a *face table*: for each proper face pattern ``p``
of its standard cube, the pair ``(F, h)`` where ``F`` is the cell the face is
glued to and ``h`` maps the local coordinates of ``p`` onto the standard cube of
``F``.  Slot records (the JSON form) and face tables convert both ways.

Cell ids are opaque strings, unique across all dimensions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .symmetry import (
    Pattern,
    Sym,
    contains,
    embed,
    faces,
    free_coords,
    localize,
    pattern_dim,
    pattern_str,
    top,
)

MAX_DIM = 3

FaceRef = Tuple[str, Sym]
Table = Dict[Pattern, FaceRef]


class CubeError(ValueError):
    """Raised on malformed input or violated preconditions."""


@dataclass(frozen=True)
class Violation:
    code: str
    cells: Tuple[str, ...]
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "cells": list(self.cells), "message": self.message}


class CubeComplex:
    """A finite cube complex given by face tables.

    Use :meth:`from_records` for slot data and :meth:`from_tables` for tables
    that may omit faces derivable from higher faces.
    """

    def __init__(self, dims: Dict[str, int], tables: Dict[str, Table],
                 problems: Sequence[Violation] = ()):
        self._dims = dict(dims)
        self._tables = {c: dict(t) for c, t in tables.items()}
        self._problems = list(problems)
        self._complete()

    # construction -----------------------------------------------------------

    @classmethod
    def from_tables(cls, dims: Dict[str, int], tables: Dict[str, Table]) -> "CubeComplex":
        return cls(dims, tables)

    @classmethod
    def from_records(cls, vertices: Iterable[str], edges: Iterable[dict] = (),
                     squares: Iterable[dict] = (), cubes3: Iterable[dict] = ()) -> "CubeComplex":
        dims: Dict[str, int] = {}
        tables: Dict[str, Table] = {}
        problems: List[Violation] = []

        def add(cid, d):
            if cid in dims:
                problems.append(Violation("duplicate_id", (cid,), f"id {cid!r} used more than once"))
            dims[cid] = d
            tables[cid] = {}

        for v in vertices:
            add(v, 0)
        for e in edges:
            add(e["id"], 1)
            a, b = e["ends"]
            tables[e["id"]][(0,)] = (a, Sym.identity(0))
            tables[e["id"]][(1,)] = (b, Sym.identity(0))
        for s in squares:
            add(s["id"], 2)
            t = tables[s["id"]]
            for p, c in zip(faces(2, 0), s.get("corners") or ()):
                t[p] = (c, Sym.identity(0))
            for p, slot in zip(faces(2, 1), s["sides"]):
                t[p] = (slot["edge"], _dir_sym(slot["dir"], problems, s["id"]))
        for c in cubes3:
            add(c["id"], 3)
            t = tables[c["id"]]
            for p, v in zip(faces(3, 0), c.get("corners") or ()):
                t[p] = (v, Sym.identity(0))
            for p, slot in zip(faces(3, 1), c.get("edges") or ()):
                t[p] = (slot["edge"], _dir_sym(slot["dir"], problems, c["id"]))
            for p, slot in zip(faces(3, 2), c["faces"]):
                k = slot["sym"]
                if not (isinstance(k, int) and 0 <= k < 8):
                    problems.append(Violation("bad_symmetry", (c["id"],), f"square symmetry {k!r} out of range"))
                    k = 0
                t[p] = (slot["square"], Sym.from_index(2, k))
        return cls(dims, tables, problems)

    def _complete(self) -> None:
        """Fill faces derivable through higher faces (tolerates bad data)."""
        for cid in sorted(self._dims, key=lambda c: (self._dims[c], c)):
            n = self._dims[cid]
            if not 0 <= n <= MAX_DIM:
                continue
            t = self._tables[cid]
            for p in reversed(faces(n)[:-1]):
                if p in t:
                    continue
                for q in faces(n)[:-1]:
                    if q in t and pattern_dim(q) > pattern_dim(p) and contains(q, p):
                        ref = self._through(t[q], localize(q, p))
                        if ref is not None:
                            t[p] = ref
                            break

    def _through(self, ref: FaceRef, local: Pattern) -> Optional[FaceRef]:
        cell, h = ref
        if cell not in self._dims or self._dims[cell] != h.dim:
            return None
        image, rho = h.restrict(local)
        if pattern_dim(image) == h.dim:
            return cell, rho
        sub = self._tables.get(cell, {}).get(image)
        if sub is None:
            return None
        return sub[0], sub[1] * rho

    # basic access -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return max(self._dims.values(), default=-1)

    def dim_of(self, cid: str) -> int:
        try:
            return self._dims[cid]
        except KeyError:
            raise CubeError(f"unknown cell id {cid!r}") from None

    def __contains__(self, cid: str) -> bool:
        return cid in self._dims

    def cells(self, d: Optional[int] = None) -> List[str]:
        return sorted(c for c, k in self._dims.items() if d is None or k == d)

    @property
    def vertices(self) -> List[str]:
        return self.cells(0)

    @property
    def edges(self) -> List[str]:
        return self.cells(1)

    @property
    def squares(self) -> List[str]:
        return self.cells(2)

    @property
    def cubes3(self) -> List[str]:
        return self.cells(3)

    def counts(self) -> Tuple[int, ...]:
        return tuple(len(self.cells(d)) for d in range(self.dim + 1))

    def face(self, cid: str, p: Pattern) -> FaceRef:
        """Cell and local identification for face ``p`` of ``cid``."""
        n = self.dim_of(cid)
        if len(p) != n:
            raise CubeError(f"pattern {pattern_str(p)} has wrong length for {cid}")
        if pattern_dim(p) == n:
            return cid, Sym.identity(n)
        return self._tables[cid][p]

    def table(self, cid: str) -> Table:
        return dict(self._tables[cid])

    def ends(self, e: str) -> Tuple[str, str]:
        return self.face(e, (0,))[0], self.face(e, (1,))[0]

    def vertices_of(self, cid: str) -> List[str]:
        n = self.dim_of(cid)
        return [self.face(cid, p)[0] for p in faces(n, 0)]

    @cached_property
    def _cofaces(self) -> Dict[str, List[Tuple[str, Pattern]]]:
        out: Dict[str, List[Tuple[str, Pattern]]] = {c: [] for c in self._dims}
        for c in self.cells():
            for p, (f, _) in sorted(self._tables[c].items(), key=lambda kv: pattern_str(kv[0])):
                if f in out:
                    out[f].append((c, p))
        return out

    def cofaces(self, cid: str, d: Optional[int] = None) -> List[Tuple[str, Pattern]]:
        """Occurrences ``(C, p)`` of ``cid`` as a proper face, optionally with dim C = d."""
        self.dim_of(cid)
        return [(c, p) for c, p in self._cofaces[cid] if d is None or self._dims[c] == d]

    def degree(self, v: str) -> int:
        return len(self.cofaces(v, 1))

    # records ----------------------------------------------------------------

    def to_records(self) -> dict:
        def edge_slot(ref):
            return {"edge": ref[0], "dir": ref[1].direction}

        out = {"dim": max(self.dim, 0), "vertices": self.vertices, "edges": [], "squares": [], "cubes3": []}
        for e in self.edges:
            out["edges"].append({"id": e, "ends": list(self.ends(e))})
        for s in self.squares:
            t = self._tables[s]
            out["squares"].append({
                "id": s,
                "corners": [t[p][0] for p in faces(2, 0)],
                "sides": [edge_slot(t[p]) for p in faces(2, 1)],
            })
        for c in self.cubes3:
            t = self._tables[c]
            out["cubes3"].append({
                "id": c,
                "corners": [t[p][0] for p in faces(3, 0)],
                "edges": [edge_slot(t[p]) for p in faces(3, 1)],
                "faces": [{"square": t[p][0], "sym": t[p][1].index} for p in faces(3, 2)],
            })
        return out

    def restrict(self, cells: Iterable[str]) -> "CubeComplex":
        """Smallest subcomplex containing ``cells``."""
        keep = set()
        for c in cells:
            keep.add(c)
            keep.update(f for f, _ in self._tables[c].values())
        return CubeComplex({c: self._dims[c] for c in keep}, {c: self._tables[c] for c in keep})

    def relabel(self, fn) -> "CubeComplex":
        return CubeComplex(
            {fn(c): d for c, d in self._dims.items()},
            {fn(c): {p: (fn(f), h) for p, (f, h) in t.items()} for c, t in self._tables.items()},
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, CubeComplex) and self._dims == other._dims and self._tables == other._tables

    def __hash__(self):
        return hash(tuple(self.counts()))

    def __repr__(self) -> str:
        return f"CubeComplex(counts={self.counts()})"


def _dir_sym(d, problems: List[Violation], owner: str) -> Sym:
    if d not in (1, -1):
        problems.append(Violation("bad_direction", (owner,), f"direction flag {d!r} is not +1 or -1"))
        return Sym.identity(1)
    return Sym.from_dir(d)


# validation -----------------------------------------------------------------


def validate(X: CubeComplex) -> List[Violation]:
    """Every violated structural invariant, with offending cell ids."""
    out = list(X._problems)
    for c in X.cells():
        n = X._dims[c]
        if not 0 <= n <= MAX_DIM:
            out.append(Violation("dimension", (c,), f"cell dimension {n} outside 0..{MAX_DIM}"))
            continue
        t = X._tables[c]
        bad = False
        for p in faces(n)[:-1]:
            if p not in t:
                out.append(Violation("missing_face", (c,), f"face {pattern_str(p)} of {c} is not attached"))
                bad = True
                continue
            f, h = t[p]
            k = pattern_dim(p)
            if f not in X._dims:
                out.append(Violation("unknown_id", (c, f), f"{c} references unknown id {f!r}"))
                bad = True
            elif X._dims[f] != k or h.dim != k:
                out.append(Violation("wrong_dimension", (c, f), f"face {pattern_str(p)} of {c} is {f} of dimension {X._dims[f]}, expected {k}"))
                bad = True
        if bad:
            continue
        for p in faces(n)[:-1]:
            for q in faces(n)[:-1]:
                if pattern_dim(q) >= pattern_dim(p) or not contains(p, q):
                    continue
                f, h = t[p]
                if f not in X._dims or any(x not in X._tables[f] for x in faces(X._dims[f])[:-1]):
                    continue
                image, rho = h.restrict(localize(p, q))
                g, h2 = X._tables[f][image]
                if t[q] != (g, h2 * rho):
                    out.append(Violation(
                        "inconsistent",
                        (c,),
                        f"{c}: face {pattern_str(q)} is {t[q][0]} but through {pattern_str(p)} ({f}) it is {g}",
                    ))
                    break
            else:
                continue
            break
    return out


def check_valid(X: CubeComplex) -> None:
    v = validate(X)
    if v:
        raise CubeError("invalid cube complex: " + "; ".join(x.message for x in v[:3]))


# links ----------------------------------------------------------------------


@dataclass
class AbstractSimplicialish:
    """Simplex-like complex that may carry loops and parallel simplices."""

    vertices: List[str] = field(default_factory=list)
    edges: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    triangles: Dict[str, Tuple[str, str, str]] = field(default_factory=dict)

    def loops(self) -> List[str]:
        return sorted(e for e, (a, b) in self.edges.items() if a == b)

    def bigons(self) -> List[Tuple[str, str]]:
        seen: Dict[frozenset, str] = {}
        out = []
        for e in sorted(self.edges):
            a, b = self.edges[e]
            if a == b:
                continue
            key = frozenset((a, b))
            if key in seen:
                out.append((seen[key], e))
            else:
                seen[key] = e
        return out

    def parallel_triangles(self) -> List[Tuple[str, str]]:
        seen: Dict[frozenset, str] = {}
        out = []
        for t in sorted(self.triangles):
            key = frozenset(self.triangles[t])
            if key in seen:
                out.append((seen[key], t))
            else:
                seen[key] = t
        return out

    @property
    def simplicial(self) -> bool:
        if self.loops() or self.bigons() or self.parallel_triangles():
            return False
        return all(len(set(self.triangle_vertices(t))) == 3 for t in self.triangles)

    def triangle_vertices(self, t: str) -> Tuple[str, ...]:
        vs = set()
        for e in self.triangles[t]:
            vs.update(self.edges[e])
        return tuple(sorted(vs))

    def adjacency(self) -> Dict[str, set]:
        adj: Dict[str, set] = {v: set() for v in self.vertices}
        for a, b in self.edges.values():
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def to_networkx(self):
        import networkx as nx

        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for e, (a, b) in sorted(self.edges.items()):
            g.add_edge(a, b, key=e)
        return g

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e, "ends": list(v)} for e, v in sorted(self.edges.items())],
            "triangles": [{"id": t, "edges": list(v)} for t, v in sorted(self.triangles.items())],
        }


def simplex_id(c: str, p: Pattern) -> str:
    return f"{c}@{pattern_str(p)}"


def corner_boundary(X: CubeComplex, c: str, p: Pattern) -> List[Tuple[str, Pattern]]:
    """Facets of the link simplex ``(c, p)``, one per fixed coordinate of ``p``."""
    n = X.dim_of(c)
    out = []
    for i in range(n):
        if p[i] is None:
            continue
        P = tuple(p[i] if j == i else None for j in range(n))
        f, h = X.face(c, P)
        out.append((f, h.restrict(localize(P, p))[0]))
    return out


def link(X: CubeComplex, D: str) -> AbstractSimplicialish:
    """Link of ``D`` computed from corners of the cubes containing it."""
    k = X.dim_of(D)
    if k > 2:
        raise CubeError(f"link requires dim(D) <= 2, got {k}")
    L = AbstractSimplicialish()
    for s in range(MAX_DIM - k):
        for c, p in X.cofaces(D, k + s + 1):
            sid = simplex_id(c, p)
            if s == 0:
                L.vertices.append(sid)
                continue
            bd = [simplex_id(f, q) for f, q in corner_boundary(X, c, p)]
            if s == 1:
                L.edges[sid] = (bd[0], bd[1])
            else:
                L.triangles[sid] = tuple(bd)
    L.vertices.sort()
    return L


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "witness": self.witness}


def is_simple(X: CubeComplex) -> Verdict:
    """No cube link has a loop or a pair of parallel 1-simplices."""
    for D in X.cells():
        if X.dim_of(D) > 2:
            continue
        L = link(X, D)
        loops = L.loops()
        if loops:
            return Verdict(False, {"cube": D, "kind": "loop", "link_cells": [loops[0]]})
        bigons = L.bigons()
        if bigons:
            return Verdict(False, {"cube": D, "kind": "bigon", "link_cells": list(bigons[0])})
    return Verdict(True)


def is_flag(L: AbstractSimplicialish) -> Verdict:
    if not L.simplicial:
        raise CubeError("is_flag requires a simplicial complex")
    adj = L.adjacency()
    filled = {frozenset(L.triangle_vertices(t)) for t in L.triangles}
    for a in sorted(adj):
        for b in sorted(x for x in adj[a] if x > a):
            for c in sorted(x for x in adj[a] & adj[b] if x > b):
                if frozenset((a, b, c)) not in filled:
                    return Verdict(False, {"kind": "empty_triangle", "clique": [a, b, c]})
    for a in sorted(adj):
        for b, c, d in itertools.combinations(sorted(x for x in adj[a] if x > a), 3):
            if c in adj[b] and d in adj[b] and d in adj[c]:
                return Verdict(False, {"kind": "four_clique", "clique": [a, b, c, d]})
    return Verdict(True)


def is_npc(X: CubeComplex) -> Verdict:
    s = is_simple(X)
    if not s:
        return Verdict(False, {"check": "simple", **s.witness})
    for v in X.vertices:
        f = is_flag(link(X, v))
        if not f:
            return Verdict(False, {"check": "flag", "vertex": v, **f.witness})
    return Verdict(True)


# products -------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalProduct:
    complex: CubeComplex
    lower: Dict[str, str]
    upper: Dict[str, str]
    thick: Dict[str, str]
    projection: Dict[str, str]


def product_with_interval(X: CubeComplex, sep: str = "|") -> IntervalProduct:
    """X x I with cells ``c|-``, ``c|+`` and ``c|I``; the interval is the last coordinate."""
    if X.dim > 2:
        raise CubeError("product_with_interval: dimension cap exceeded")
    lo = {c: f"{c}{sep}-" for c in X.cells()}
    hi = {c: f"{c}{sep}+" for c in X.cells()}
    th = {c: f"{c}{sep}I" for c in X.cells()}
    dims: Dict[str, int] = {}
    tables: Dict[str, Table] = {}
    for c in X.cells():
        n = X.dim_of(c)
        t = X._tables[c]
        for m in (lo, hi):
            dims[m[c]] = n
            tables[m[c]] = {p: (m[f], h) for p, (f, h) in t.items()}
        dims[th[c]] = n + 1
        tt: Table = {}
        for p in faces(n + 1)[:-1]:
            base, last = p[:-1], p[-1]
            if pattern_dim(base) == n:
                f, h = c, Sym.identity(n)
            else:
                f, h = t[base]
            if last is None:
                tt[p] = (th[f], h.extend())
            else:
                tt[p] = ((lo if last == 0 else hi)[f], h)
        tables[th[c]] = tt
    proj = {}
    for c in X.cells():
        proj[lo[c]] = proj[hi[c]] = proj[th[c]] = c
    return IntervalProduct(CubeComplex(dims, tables), lo, hi, th, proj)


# small builders -------------------------------------------------------------


def point(v: str = "v") -> CubeComplex:
    return CubeComplex.from_records([v])


def graph(vertices: Iterable[str], edges: Dict[str, Tuple[str, str]]) -> CubeComplex:
    return CubeComplex.from_records(list(vertices), [{"id": e, "ends": list(ab)} for e, ab in edges.items()])


def standard_cube(n: int, prefix: str = "") -> CubeComplex:
    """The cube I^n with one cell per face; ids are ``prefix + pattern``."""
    dims: Dict[str, int] = {}
    tables: Dict[str, Table] = {}
    for p in faces(n):
        cid = prefix + pattern_str(p)
        k = pattern_dim(p)
        dims[cid] = k
        tables[cid] = {}
        for q in faces(k)[:-1]:
            tables[cid][q] = (prefix + pattern_str(embed(p, q)), Sym.identity(pattern_dim(q)))
    return CubeComplex(dims, tables)


def disjoint_union(*parts: Tuple[str, CubeComplex]) -> CubeComplex:
    dims: Dict[str, int] = {}
    tables: Dict[str, Table] = {}
    for prefix, X in parts:
        Y = X.relabel(lambda c, pre=prefix: pre + c)
        dims.update(Y._dims)
        tables.update(Y._tables)
    return CubeComplex(dims, tables)


__all__ = [
    "AbstractSimplicialish",
    "CubeComplex",
    "CubeError",
    "IntervalProduct",
    "Verdict",
    "Violation",
    "check_valid",
    "corner_boundary",
    "disjoint_union",
    "free_coords",
    "graph",
    "is_flag",
    "is_npc",
    "is_simple",
    "link",
    "point",
    "product_with_interval",
    "simplex_id",
    "standard_cube",
    "top",
    "validate",
]
