"""Finite regular covers of realizations, descent of automorphisms and certificates.

Cover convention: the thick edge-space at (r, j) puts Y_j into copy r by
inclusion and into copy r*phi(g_j) through phi_j.  A horizontal path from a
0-cube of copy r then reads the same word as its image in the realization,
and the extension of phi_j is left multiplication by phi(g_j)^-1.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .cubes import CubeComplex, CubeError, Verdict, is_npc, simplex_id
from .freegrp import (
    CosetProduct,
    Exhausted,
    FiniteQuotient,
    QuotientTooLarge,
    catalog,
    find_separating_quotient,
    generator_constraint,
    intersect,
    perm_inv,
    perm_mul,
    strictness_products,
)
from .gos import (
    EdgeSpace,
    GraphOfSpaces,
    HorizontalQuotient,
    TotalSpace,
    UGraph,
    assemble,
    detect_empty_k_corners,
    horizontal_quotient,
    is_controlled,
    realization,
    tid,
    vid,
)
from .hyperplanes import is_special
from .maps import (
    CubicalMap,
    PartialLocalIsometry,
    check_map,
    compose,
    is_automorphism,
    is_injective,
    is_locally_convex,
    is_valid_partial_local_isometry,
)
from .symmetry import Sym

log = logging.getLogger(__name__)

TARGETS = ("npc", "special")


@dataclass
class Budget:
    max_degree: int = 8
    seconds: Optional[float] = 60.0
    seed: int = 0
    refinements: int = 200
    jobs: int = 1


# covers --------------------------------------------------------------------------------


def copy_name(k: int) -> str:
    return f"q{k}"


@dataclass
class CoverSpec:
    realization: GraphOfSpaces
    phi: FiniteQuotient
    elements: List[Tuple[int, ...]]
    gos: GraphOfSpaces
    total: TotalSpace
    index: Dict[Tuple[int, ...], int] = field(default_factory=dict)

    @property
    def loops(self) -> List[str]:
        return list(self.realization.graph.edges)

    def copy_of(self, r) -> str:
        return copy_name(self.index[r])

    def projection(self) -> Dict[str, str]:
        """Cover total-space cell -> realization total-space cell."""
        v = self.realization.graph.vertices[0]
        out = {}
        for c, (kind, where, base) in self.total.provenance.items():
            if kind == "vertex":
                out[c] = vid(v, base)
            else:
                out[c] = tid(where.split("@")[0], base)
        return out


def induced_cover(G: GraphOfSpaces, phi: FiniteQuotient, enforce_constraint: bool = True) -> CoverSpec:
    loops = list(G.graph.edges)
    if len(G.graph.vertices) != 1:
        raise CubeError("induced_cover needs a realization over a bouquet")
    if phi.rank != len(loops):
        raise CubeError(f"quotient rank {phi.rank} differs from the number of partial maps {len(loops)}")
    if enforce_constraint and loops and not generator_constraint(phi):
        raise CubeError("generator images must be nontrivial with all images and inverses distinct")
    v = G.graph.vertices[0]
    Y = G.vertex_spaces[v]
    elems = phi.elements()
    index = {r: k for k, r in enumerate(elems)}
    verts = [copy_name(k) for k in range(len(elems))]
    edges, spaces = {}, {}
    for k, r in enumerate(elems):
        for j, g in enumerate(loops):
            target = index[perm_mul(r, phi.gens[j])]
            e = f"{g}@{copy_name(k)}"
            edges[e] = (copy_name(k), copy_name(target))
            es = G.edge_spaces[g]
            spaces[e] = EdgeSpace(es.space, es.tau1, es.tau2)
    cover = GraphOfSpaces(UGraph(verts, edges), {x: Y for x in verts}, spaces)
    return CoverSpec(G, phi, elems, cover, assemble(cover), index)


def is_covering(cover: CoverSpec, base: Optional[TotalSpace] = None) -> Verdict:
    """The projection is a bijection on the link of every 0-cube."""
    base = base or assemble(cover.realization)
    proj = cover.projection()
    X, B = cover.total.complex, base.complex
    for x in X.vertices:
        src = {simplex_id(proj[c], p) for c, p in X.cofaces(x)}
        n_src = len(X.cofaces(x))
        dst = {simplex_id(c, p) for c, p in B.cofaces(proj[x])}
        if len(src) != n_src or src != dst:
            return Verdict(False, {"vertex": x, "image": proj[x]})
    return Verdict(True)


def left_multiplication(cover: CoverSpec, s) -> CubicalMap:
    """Deck transformation r -> s*r on copy indices, identity on each copy."""
    X = cover.total.complex
    cells = {}
    for c, (kind, where, base) in cover.total.provenance.items():
        if kind == "vertex":
            k = cover.index[perm_mul(s, cover.elements[int(where[1:])])]
            cells[c] = (vid(copy_name(k), base), Sym.identity(X.dim_of(c)))
        else:
            g, copy = where.split("@")
            k = cover.index[perm_mul(s, cover.elements[int(copy[1:])])]
            cells[c] = (tid(f"{g}@{copy_name(k)}", base), Sym.identity(X.dim_of(c)))
    return CubicalMap(X, X, cells)


def induced_automorphism(cover: CoverSpec, j: int) -> CubicalMap:
    """Extension of the j-th partial map (0-based) upstairs: left multiplication by phi(g_j)^-1."""
    return left_multiplication(cover, perm_inv(cover.phi.gens[j]))


def _head(g: Sym, n: int) -> Sym:
    """Restriction of a symmetry fixing the trailing coordinates to the first n."""
    return Sym(g.perm[:n], g.flip[:n])


def descend(HQ: HorizontalQuotient, Phi: CubicalMap) -> Tuple[CubicalMap, Verdict]:
    """Automorphism of the quotient with q o Phi = Phi^E o q, and the cell-wise check."""
    if not HQ.strict:
        raise CubeError("descend needs a strict horizontal quotient")
    R = HQ.complex
    T = HQ.T
    cells = {}
    for r in R.cells():
        d, g = Phi.cells[r]
        if not T.is_vertical(d):
            raise CubeError("automorphism does not preserve vertex-spaces")
        r2, m = HQ.q[d]
        cells[r] = (r2, m * g)
    PhiE = CubicalMap(R, R, cells)
    X = T.complex
    for x in X.cells():
        d, g = Phi.cells[x]
        if T.is_vertical(x) != T.is_vertical(d):
            return PhiE, Verdict(False, {"kind": "fiber_not_preserved", "cell": x})
        a, ma = HQ.q[d]
        n = ma.dim
        lhs = (a, ma * (g if T.is_vertical(x) else _head(g, n)))
        b, mb = HQ.q[x]
        e, h = cells[b]
        rhs = (e, h * mb)
        if lhs != rhs:
            return PhiE, Verdict(False, {"kind": "descent_square", "cell": x, "lhs": lhs[0], "rhs": rhs[0]})
    return PhiE, Verdict(True)


# ledgers -----------------------------------------------------------------------------------


@dataclass
class LedgerEntry:
    name: str
    ok: bool
    required: bool = True
    source: str = "R"
    detail: Optional[dict] = None

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "required": self.required, "source": self.source,
                "detail": self.detail}


@dataclass
class Ledger:
    entries: List[LedgerEntry] = field(default_factory=list)

    def add(self, name, ok, required=True, source="R", detail=None):
        self.entries.append(LedgerEntry(name, bool(ok), required, source, detail))

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries if e.required)

    def failures(self) -> List[str]:
        return [e.name for e in self.entries if e.required and not e.ok]

    def get(self, name: str) -> LedgerEntry:
        return next(e for e in self.entries if e.name == name)

    def by_source(self, source: str) -> List[dict]:
        return [e.to_json() for e in self.entries if e.source == source]

    def to_json(self) -> List[dict]:
        return [e.to_json() for e in self.entries]


def certify(R: CubeComplex, iota: CubicalMap, Phis: Sequence[CubicalMap], Y: CubeComplex,
            O: Sequence[PartialLocalIsometry], target: str = "npc") -> Ledger:
    """Checks recomputable from R, the maps, Y and O alone."""
    L = Ledger()
    npc = is_npc(R)
    L.add("quotient_npc", npc, detail=npc.witness)
    corners = detect_empty_k_corners(R)
    L.add("k_corner_cross_check", (not corners) == bool(npc), detail={"empty_corners": len(corners)})
    ok_map = check_map(iota)
    inj = is_injective(iota)
    L.add("iota_embedding", ok_map and inj, detail=ok_map.witness or inj.witness)
    conv = is_locally_convex(R, iota.image_cells())
    L.add("iota_locally_convex", conv, required=(target == "special"), detail=conv.witness)
    L.add("dimension", R.dim == Y.dim, detail={"dim_R": R.dim, "dim_Y": Y.dim})
    for j, (Phi, P) in enumerate(zip(Phis, O)):
        auto = is_automorphism(Phi)
        L.add(f"automorphism[{j}]", auto, detail=auto.witness)
        lhs = compose(P.phi, iota)
        rhs = compose(iota.restrict(P.source), Phi)
        bad = sorted(c for c in P.source.cells() if lhs.cells[c] != rhs.cells[c])
        L.add(f"extension[{j}]", not bad, detail={"cells": bad[:5]} if bad else None)
    if target == "special":
        rep = is_special(R, require_npc=False)
        L.add("quotient_special", rep.special, detail=None if rep.special else rep.to_json()["witnesses"])
        one = sorted(h for h, f in rep.flags.items() if f["one_sided"])
        L.add("two_sided", not one, detail={"one_sided": one} if one else None)
    return L


def verify_cover(cover: CoverSpec, target: str = "npc", base: Optional[TotalSpace] = None,
                 O: Sequence[PartialLocalIsometry] = ()) -> Tuple[Ledger, Optional["Certificate"]]:
    """Full ledger for a candidate cover; the certificate when the quotient is strict."""
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    L = Ledger()
    HQ = horizontal_quotient(cover.total)
    L.add("strict", HQ.strict, source="cover", detail=HQ.witness)
    cov = is_covering(cover, base)
    L.add("covering", cov, source="cover", detail=cov.witness)
    if target == "special":
        ctl = is_controlled(cover.realization)
        L.add("realization_controlled", ctl, source="cover", detail=ctl.witness)
    if not HQ.strict:
        return L, None
    R = HQ.complex
    Y = cover.realization.vertex_spaces[cover.realization.graph.vertices[0]]
    base_copy = copy_name(0)
    iota = CubicalMap(Y, R, {c: HQ.q[vid(base_copy, c)] for c in Y.cells()})
    Phis, upstairs = [], []
    for j in range(len(cover.loops)):
        Phi_bar = induced_automorphism(cover, j)
        PhiE, ok = descend(HQ, Phi_bar)
        L.add(f"descent[{j}]", ok, source="cover", detail=ok.witness)
        Phis.append(PhiE)
        upstairs.append(Phi_bar)
    if not O:
        O = _partial_maps_of(cover.realization, Y)
    sub = certify(R, iota, Phis, Y, O, target)
    L.entries.extend(sub.entries)
    cert = Certificate(R, iota, Phis, sub, L, cover.phi, target, Y, list(O))
    return L, cert


def _partial_maps_of(G: GraphOfSpaces, Y: CubeComplex) -> List[PartialLocalIsometry]:
    out = []
    for g, es in G.edge_spaces.items():
        out.append(PartialLocalIsometry(Y, frozenset(es.space.cells()), es.tau2, g))
    return out


# certificates ----------------------------------------------------------------------------------


@dataclass
class Certificate:
    R: CubeComplex
    iota: CubicalMap
    automorphisms: List[CubicalMap]
    ledger: Ledger
    full_ledger: Ledger
    phi: FiniteQuotient
    target: str
    Y: CubeComplex
    O: List[PartialLocalIsometry]
    pruned: Dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.full_ledger.passed

    def recheck(self) -> Ledger:
        return certify(self.R, self.iota, self.automorphisms, self.Y, self.O, self.target)

    def to_json(self) -> dict:
        return {
            "schema": "certificate.v1",
            "target": self.target,
            "R": {"schema": "cubecomplex.v1", **self.R.to_records()},
            "iota": self.iota.to_json(),
            "automorphisms": [{"map": j, **m.to_json()} for j, m in enumerate(self.automorphisms)],
            "quotient": self.phi.to_json(),
            "ledger": self.full_ledger.to_json(),
            "pruned": {str(k): v for k, v in self.pruned.items()},
            "problem": {"schema": "problem.v1", "Y": {"schema": "cubecomplex.v1", **self.Y.to_records()},
                        "maps": [{"name": P.name or f"phi{j}", **P.phi.to_json()} for j, P in enumerate(self.O, 1)]},
            "passed": self.ok,
        }


# search ---------------------------------------------------------------------------------------------


def search_cover(G: GraphOfSpaces, target: str = "npc", budget: Optional[Budget] = None,
                 O: Sequence[PartialLocalIsometry] = ()) -> Tuple[Optional[Certificate], dict]:
    """Separate, verify, refine.  Returns the accepted certificate (or None) and a trace."""
    budget = budget or Budget()
    start = time.monotonic()
    trace: Dict[str, object] = {"stage1": None, "candidates": [], "accepted": None}
    if target == "special":
        ctl = is_controlled(G)
        if not ctl:
            trace["precondition"] = {"controlled": False, **(ctl.witness or {})}
            return None, trace
    rank = len(G.graph.edges)
    base = assemble(G)
    if rank == 0:
        first: FiniteQuotient | Exhausted = FiniteQuotient(0, 1, (), "trivial")
    else:
        products = strictness_products(base)
        trace["products"] = len(products)
        first = find_separating_quotient(products, rank, budget.max_degree, budget.seconds, budget.seed,
                                         accept=generator_constraint)
    if isinstance(first, Exhausted):
        trace["stage1"] = first.to_json()
        return None, trace
    trace["stage1"] = first.to_json()

    def attempt(phi: FiniteQuotient) -> Optional[Certificate]:
        cover = induced_cover(G, phi)
        L, cert = verify_cover(cover, target, base, O)
        trace["candidates"].append({"quotient": phi.name, "degree": phi.degree, "order": len(cover.elements),
                                    "failures": L.failures()})
        if cert is not None and L.passed:
            trace["accepted"] = phi.to_json()
            return cert
        return None

    cert = attempt(first)
    if cert is not None or rank == 0:
        return cert, trace

    def refinements():
        tried = 0
        for psi in catalog(rank, budget.max_degree, budget.seed):
            if tried >= budget.refinements:
                return
            if psi.degree == 1:
                continue
            try:
                phi = intersect(first, psi)
            except QuotientTooLarge:
                continue
            tried += 1
            yield phi

    def out_of_time():
        return budget.seconds is not None and time.monotonic() - start > budget.seconds

    if budget.jobs <= 1:
        for phi in refinements():
            if out_of_time():
                trace["exhausted"] = "time budget"
                return None, trace
            cert = attempt(phi)
            if cert is not None:
                return cert, trace
    else:
        # batches of candidates in parallel; the earliest passing one in enumeration order wins
        from concurrent.futures import ProcessPoolExecutor

        stream = refinements()
        with ProcessPoolExecutor(budget.jobs) as pool:
            while True:
                if out_of_time():
                    trace["exhausted"] = "time budget"
                    return None, trace
                batch = list(itertools.islice(stream, budget.jobs))
                if not batch:
                    break
                results = list(pool.map(_evaluate, [(G, phi, target, tuple(O)) for phi in batch]))
                for phi, (order, failures) in zip(batch, results):
                    trace["candidates"].append({"quotient": phi.name, "degree": phi.degree, "order": order,
                                                "failures": failures})
                    if not failures:
                        cert = attempt(phi)
                        trace["candidates"].pop()
                        return cert, trace
    trace["exhausted"] = "refinement budget"
    return None, trace


def _evaluate(args) -> Tuple[int, List[str]]:
    """Worker: (|Q|, failing ledger entries) for one candidate quotient."""
    G, phi, target, O = args
    cover = induced_cover(G, phi)
    L, cert = verify_cover(cover, target, None, O)
    failures = L.failures()
    if cert is None and not failures:
        failures = ["strict"]
    return len(cover.elements), failures


def prune_restrictions(O: Sequence[PartialLocalIsometry]) -> Tuple[List[PartialLocalIsometry], Dict[int, int]]:
    """Drop maps that are restrictions of another map (subcomplex inclusion only).

    Returns the kept maps and, for every original index, the index of the kept
    map whose extension serves it.
    """
    host: Dict[int, int] = {}
    for j, P in enumerate(O):
        for k, Q in enumerate(O):
            if k == j or not P.domain <= Q.domain:
                continue
            if P.domain == Q.domain and k > j:
                # equal maps: keep the first
                continue
            if all(Q.phi.cells[c] == P.phi.cells[c] for c in P.domain):
                host[j] = k
                break
    keep = [j for j in range(len(O)) if j not in host]
    where = {}
    for j in range(len(O)):
        k = j
        while k in host:
            k = host[k]
        where[j] = keep.index(k)
    return [O[j] for j in keep], where


def hrushovski(Y: CubeComplex, O: Sequence[PartialLocalIsometry], target: str = "npc",
               budget: Optional[Budget] = None, prune: bool = False) -> Tuple[Optional[Certificate], dict]:
    if target not in TARGETS:
        raise ValueError(f"target must be one of {TARGETS}")
    for j, P in enumerate(O):
        if not is_valid_partial_local_isometry(P):
            raise CubeError(f"partial map {j} is not a valid partial local isometry")
    if target == "special":
        rep = is_special(Y)
        if not rep.special:
            return None, {"precondition": {"special": False, "report": rep.to_json()}}
    used, where = (prune_restrictions(O) if prune else (list(O), {j: j for j in range(len(O))}))
    G = realization(Y, used, check=False)
    cert, trace = search_cover(G, target, budget, used)
    if cert is None:
        return None, trace
    if prune:
        # every original map gets the automorphism of the map it restricts
        cert.automorphisms = [cert.automorphisms[where[j]] for j in range(len(O))]
        cert.O = list(O)
        cert.pruned = {j: where[j] for j in range(len(O)) if O[j] is not used[where[j]]}
        cert.ledger = cert.recheck()
        cover_entries = [e for e in cert.full_ledger.entries if e.source == "cover"]
        cert.full_ledger = Ledger(cover_entries + cert.ledger.entries)
    return cert, trace
