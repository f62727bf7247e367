"""Immersed hyperplanes, dual edges, carriers and the specialness pathologies.

Two independent routes compute the pathology flags:

* the midcube route (primary) traces gluings of midcubes ``(C, i)`` with a
  parity recording whether coordinate ``i`` of ``C`` is reversed;
* the edge-class route (oracle) works only with squares and their sides.

Both produce flags keyed by each hyperplane's sorted dual-edge tuple.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .cubes import CubeComplex, CubeError, Verdict, is_npc
from .symmetry import Sym, faces, free_coords, pattern_dim
from .uf import parity_uf

Midcube = Tuple[str, int]


def midcube_id(m: Midcube) -> str:
    return f"{m[0]}#{m[1]}"


# midcube route ---------------------------------------------------------------


@dataclass
class MidcubeComplex:
    X: CubeComplex
    midcubes: List[Midcube]
    adjacency: Dict[Midcube, List[Tuple[Midcube, int]]]
    component: Dict[Midcube, int] = field(default_factory=dict)
    parity: Dict[Midcube, int] = field(default_factory=dict)
    reversing_cycle: Dict[int, List[str]] = field(default_factory=dict)
    members: List[List[Midcube]] = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.members)

    def dual_edges(self, k: int) -> List[str]:
        return sorted(c for c, i in self.members[k] if self.X.dim_of(c) == 1)

    def as_complex(self, k: int) -> CubeComplex:
        """The hyperplane itself: one (n-1)-cell per midcube of an n-cube."""
        X = self.X
        dims: Dict[str, int] = {}
        tables: Dict[str, dict] = {}
        for C, i in self.members[k]:
            n = X.dim_of(C)
            mid = midcube_id((C, i))
            dims[mid] = n - 1
            t = {}
            others = [j for j in range(n) if j != i]
            for q in faces(n - 1)[:-1]:
                p: list = [None] * n
                for t_, j in enumerate(others):
                    p[j] = q[t_]
                p = tuple(p)
                F, h = X.face(C, p)
                fc = free_coords(p)
                ti = fc.index(i)
                fi = h.perm[ti]
                rest = [j for j in range(h.dim) if j != fi]
                pos = {c: s for s, c in enumerate(rest)}
                perm = tuple(pos[h.perm[s]] for s in range(h.dim) if s != ti)
                flip = tuple(h.flip[s] for s in range(h.dim) if s != ti)
                t[q] = (midcube_id((F, fi)), Sym(perm, flip))
            tables[mid] = t
        return CubeComplex(dims, tables)


def _midcube_gluings(X: CubeComplex) -> Dict[Midcube, List[Tuple[Midcube, int]]]:
    adj: Dict[Midcube, List[Tuple[Midcube, int]]] = {}
    for C in X.cells():
        n = X.dim_of(C)
        for i in range(n):
            adj.setdefault((C, i), [])
    for C in X.cells():
        n = X.dim_of(C)
        if n < 2:
            continue
        for p in faces(n, n - 1):
            F, h = X.face(C, p)
            for t, i in enumerate(free_coords(p)):
                m, f = (C, i), (F, h.perm[t])
                adj[m].append((f, h.flip[t]))
                adj[f].append((m, h.flip[t]))
    for m in adj:
        adj[m].sort()
    return adj


def build_midcube_complex(X: CubeComplex) -> MidcubeComplex:
    adj = _midcube_gluings(X)
    M = MidcubeComplex(X, sorted(adj), adj)
    parent: Dict[Midcube, Optional[Tuple[Midcube, int]]] = {}
    roots = [(e, 0) for e in X.edges]
    for root in roots:
        if root in M.component:
            continue
        k = len(M.members)
        M.members.append([])
        M.component[root] = k
        M.parity[root] = 0
        parent[root] = None
        queue = deque([root])
        while queue:
            u = queue.popleft()
            M.members[k].append(u)
            for w, par in adj[u]:
                want = M.parity[u] ^ par
                if w not in M.component:
                    M.component[w] = k
                    M.parity[w] = want
                    parent[w] = (u, par)
                    queue.append(w)
                elif M.parity[w] != want and k not in M.reversing_cycle:
                    M.reversing_cycle[k] = _cycle(parent, u, w)
        M.members[k].sort()
    return M


def _cycle(parent, u: Midcube, w: Midcube) -> List[str]:
    def up(x):
        path = [x]
        while parent[x] is not None:
            x = parent[x][0]
            path.append(x)
        return path

    pu, pw = up(u), up(w)
    common = set(pu) & set(pw)
    a = [x for x in pu if x not in common]
    b = [x for x in pw if x not in common]
    meet = next(x for x in pu if x in common)
    return [midcube_id(x) for x in a + [meet] + list(reversed(b))]


# hyperplane objects ------------------------------------------------------------


@dataclass
class Hyperplane:
    id: str
    dual_edges: Tuple[str, ...]
    orientation: Optional[Dict[str, int]]
    component: int
    carrier_cells: Tuple[str, ...]
    midcubes: Tuple[Midcube, ...]

    @property
    def two_sided(self) -> bool:
        return self.orientation is not None

    @property
    def key(self) -> Tuple[str, ...]:
        return self.dual_edges


def hyperplanes(X: CubeComplex, M: Optional[MidcubeComplex] = None) -> List[Hyperplane]:
    M = M or build_midcube_complex(X)
    out = []
    for k in range(M.n_components):
        duals = tuple(M.dual_edges(k))
        if k in M.reversing_cycle:
            orient = None
        else:
            orient = {e: (-1 if M.parity[(e, 0)] else 1) for e in duals}
        owners = sorted({c for c, _ in M.members[k]})
        carrier = set()
        for c in owners:
            carrier.add(c)
            carrier.update(f for f, _ in X.table(c).values())
        out.append(Hyperplane(f"H{k}", duals, orient, k, tuple(sorted(carrier)), tuple(M.members[k])))
    return out


def carrier(X: CubeComplex, H: Hyperplane) -> CubeComplex:
    return X.restrict(H.carrier_cells)


def two_sidedness(H: Hyperplane, M: MidcubeComplex) -> dict:
    if H.two_sided:
        return {"two_sided": True, "orientation": dict(H.orientation)}
    return {"two_sided": False, "reversing_cycle": M.reversing_cycle[H.component]}


def edge_parallelism_classes(X: CubeComplex) -> List[FrozenSet[str]]:
    """Closure of 'opposite sides of a square', sorted by least member."""
    uf = parity_uf()
    for e in X.edges:
        uf.add(e)
    for s in X.squares:
        for a, b in (((None, 0), (None, 1)), ((0, None), (1, None))):
            uf.union(X.face(s, a)[0], X.face(s, b)[0], 0)
    return sorted((frozenset(v) for v in uf.classes().values()), key=min)


# pathology checks (midcube route) ---------------------------------------------


def corner_pairs(X: CubeComplex) -> Set[FrozenSet[str]]:
    """Unordered pairs of edges that are consecutive sides of some square."""
    out = set()
    for s in X.squares:
        ys = [X.face(s, p)[0] for p in ((None, 0), (None, 1))]
        xs = [X.face(s, p)[0] for p in ((0, None), (1, None))]
        for a in ys:
            for b in xs:
                out.add(frozenset((a, b)))
    return out


def self_crossing(H: Hyperplane) -> Verdict:
    seen: Dict[str, int] = {}
    for c, i in H.midcubes:
        if c in seen:
            return Verdict(True, {"cube": c, "midcubes": [midcube_id((c, seen[c])), midcube_id((c, i))]})
        seen[c] = i
    return Verdict(False)


def oriented_ends(X: CubeComplex, e: str, d: int) -> Tuple[str, str]:
    a, b = X.ends(e)
    return (a, b) if d == 1 else (b, a)


def _osculating_pairs(X, es: Iterable[Tuple[str, str, str]], fs, corners, distinct) -> Optional[dict]:
    """First pair of distinct edges meeting at a vertex without cornering a square.

    ``es`` and ``fs`` yield (edge, vertex, role).  When ``distinct`` is set the
    roles of the two edges must agree (initial with initial etc).
    """
    by_vertex: Dict[Tuple[str, str], List[str]] = {}
    for e, v, role in fs:
        by_vertex.setdefault((v, role if distinct else ""), []).append(e)
    for e, v, role in es:
        for f in by_vertex.get((v, role if distinct else ""), ()):
            if e == f:
                continue
            if frozenset((e, f)) in corners:
                continue
            return {"edges": sorted((e, f)), "vertex": v, "role": role if distinct else "shared"}
    return None


def self_osculation(X: CubeComplex, H: Hyperplane, corners=None) -> Verdict:
    if not H.two_sided:
        return Verdict(False, {"blocked": "one_sided"})
    corners = corner_pairs(X) if corners is None else corners
    rows = []
    for e in H.dual_edges:
        s, t = oriented_ends(X, e, H.orientation[e])
        rows.append((e, s, "initial"))
        rows.append((e, t, "terminal"))
    w = _osculating_pairs(X, rows, rows, corners, True)
    return Verdict(w is not None, w)


def crosses(H1: Hyperplane, H2: Hyperplane) -> Optional[str]:
    a = {c for c, _ in H1.midcubes}
    both = sorted(a & {c for c, _ in H2.midcubes})
    return both[0] if both else None


def inter_osculation(X: CubeComplex, H1: Hyperplane, H2: Hyperplane, corners=None) -> Verdict:
    if H1.key == H2.key:
        raise CubeError("inter_osculation needs two distinct hyperplanes")
    cube = crosses(H1, H2)
    if cube is None:
        return Verdict(False)
    corners = corner_pairs(X) if corners is None else corners

    def rows(H):
        for e in H.dual_edges:
            for v in set(X.ends(e)):
                yield e, v, ""

    w = _osculating_pairs(X, list(rows(H1)), list(rows(H2)), corners, False)
    if w is None:
        return Verdict(False)
    return Verdict(True, {"crossing_cube": cube, **w})


def loop_dual_edges(X: CubeComplex, H: Hyperplane) -> List[str]:
    return [e for e in H.dual_edges if X.ends(e)[0] == X.ends(e)[1]]


# report ----------------------------------------------------------------------


@dataclass
class SpecialnessReport:
    flags: Dict[str, Dict[str, bool]]
    inter_osculation: List[Tuple[str, str]]
    witnesses: Dict[str, dict]
    blocked: List[str]
    diagnostics: Dict[str, dict]
    hyperplane_edges: Dict[str, Tuple[str, ...]]
    precondition: Optional[dict] = None

    @property
    def special(self) -> bool:
        if self.precondition is not None:
            return False
        return not self.inter_osculation and not any(any(f.values()) for f in self.flags.values())

    def keyed_flags(self) -> Dict[Tuple[str, ...], Dict[str, bool]]:
        return {self.hyperplane_edges[h]: f for h, f in self.flags.items()}

    def keyed_pairs(self) -> Set[FrozenSet[Tuple[str, ...]]]:
        return {frozenset((self.hyperplane_edges[a], self.hyperplane_edges[b])) for a, b in self.inter_osculation}

    def to_json(self) -> dict:
        return {
            "schema": "specialness.v1",
            "special": self.special,
            "precondition": self.precondition,
            "hyperplanes": [
                {"id": h, "dual_edges": list(self.hyperplane_edges[h]), **self.flags[h],
                 "self_osculation_blocked": h in self.blocked}
                for h in sorted(self.flags, key=lambda x: int(x[1:]))
            ],
            "inter_osculation": [list(p) for p in self.inter_osculation],
            "witnesses": self.witnesses,
            "diagnostics": self.diagnostics,
        }


def is_special(X: CubeComplex, require_npc: bool = True) -> SpecialnessReport:
    pre = None
    if require_npc:
        v = is_npc(X)
        if not v:
            pre = {"npc": False, **v.witness}
    M = build_midcube_complex(X)
    hs = hyperplanes(X, M)
    corners = corner_pairs(X)
    flags, wit, blocked, diag = {}, {}, [], {}
    for H in hs:
        sc = self_crossing(H)
        so = self_osculation(X, H, corners)
        flags[H.id] = {"one_sided": not H.two_sided, "self_crossing": sc.ok, "self_osculating": so.ok}
        if not H.two_sided:
            wit[f"{H.id}.one_sided"] = {"reversing_cycle": M.reversing_cycle[H.component]}
            blocked.append(H.id)
        if sc.ok:
            wit[f"{H.id}.self_crossing"] = sc.witness
        if so.ok:
            wit[f"{H.id}.self_osculating"] = so.witness
        loops = loop_dual_edges(X, H)
        if loops:
            diag[H.id] = {"loop_dual_edge": loops}
    pairs = []
    for i, H1 in enumerate(hs):
        for H2 in hs[i + 1:]:
            io = inter_osculation(X, H1, H2, corners)
            if io.ok:
                pairs.append((H1.id, H2.id))
                wit[f"{H1.id}.{H2.id}.inter_osculation"] = io.witness
    return SpecialnessReport(flags, pairs, wit, blocked, diag, {H.id: H.dual_edges for H in hs}, pre)


# edge-class route (oracle) ------------------------------------------------------


def oracle_flags(X: CubeComplex) -> Tuple[Dict[Tuple[str, ...], Dict[str, bool]], Set[FrozenSet[Tuple[str, ...]]]]:
    """Pathology flags using only squares and edge parallelism with parity."""
    uf = parity_uf()
    for e in X.edges:
        uf.add(e)
    conflict: Set[str] = set()
    bad_pairs = []
    sides: Dict[str, Tuple[Tuple[str, int], ...]] = {}
    for s in X.squares:
        # per square: y-sides are parallel to x, x-sides parallel to y
        ys = tuple((X.face(s, p)[0], X.face(s, p)[1].flip[0]) for p in ((None, 0), (None, 1)))
        xs = tuple((X.face(s, p)[0], X.face(s, p)[1].flip[0]) for p in ((0, None), (1, None)))
        sides[s] = ys + xs
        for (a, fa), (b, fb) in (ys, xs):
            if not uf.union(a, b, fa ^ fb):
                bad_pairs.append(a)
    classes = {}
    for e in X.edges:
        classes.setdefault(uf.find(e)[0], []).append(e)
    key_of = {r: tuple(sorted(v)) for r, v in classes.items()}
    for a in bad_pairs:
        conflict.add(uf.find(a)[0])

    corners = set()
    crossing: Set[FrozenSet] = set()
    self_cross: Set = set()
    for s, (y0, y1, x0, x1) in sides.items():
        for a in (y0, y1):
            for b in (x0, x1):
                corners.add(frozenset((a[0], b[0])))
        ry, rx = uf.find(y0[0])[0], uf.find(x0[0])[0]
        if ry == rx:
            self_cross.add(ry)
        else:
            crossing.add(frozenset((ry, rx)))

    flags = {}
    for r, edges in classes.items():
        f = {"one_sided": r in conflict, "self_crossing": r in self_cross, "self_osculating": False}
        if r not in conflict:
            least = min(edges)
            base = uf.find(least)[1]
            ends_by_role: Dict[Tuple[str, int], List[str]] = {}
            for e in edges:
                d = uf.find(e)[1] ^ base
                a, b = X.ends(e)
                init, term = (a, b) if d == 0 else (b, a)
                ends_by_role.setdefault((init, 0), []).append(e)
                ends_by_role.setdefault((term, 1), []).append(e)
            for group in ends_by_role.values():
                g = sorted(set(group))
                if any(frozenset((x, y)) not in corners for i, x in enumerate(g) for y in g[i + 1:]):
                    f["self_osculating"] = True
        flags[key_of[r]] = f

    inter = set()
    at_vertex: Dict[str, Set] = {}
    for e in X.edges:
        for v in set(X.ends(e)):
            at_vertex.setdefault(v, set()).add(e)
    for v, es in at_vertex.items():
        es = sorted(es)
        for i, e in enumerate(es):
            for f in es[i + 1:]:
                re, rf = uf.find(e)[0], uf.find(f)[0]
                if re == rf or frozenset((e, f)) in corners:
                    continue
                if frozenset((re, rf)) in crossing:
                    inter.add(frozenset((key_of[re], key_of[rf])))
    return flags, inter


# subcomplex osculation ---------------------------------------------------------


def subcomplex_self_osculates(X: CubeComplex, A: Iterable[str]) -> Verdict:
    """Some hyperplane of X dual to an edge of A is also dual to an edge meeting A only in 0-cubes."""
    A = set(A)
    for U in edge_parallelism_classes(X):
        inside = sorted(e for e in U if e in A)
        if not inside:
            continue
        for f in sorted(U):
            if f in A:
                continue
            hit = sorted(v for v in set(X.ends(f)) if v in A)
            if hit:
                return Verdict(True, {"class_edge": inside[0], "edge": f, "vertex": hit[0]})
    return Verdict(False)
