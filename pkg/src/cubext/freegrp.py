"""Free-group words, Stallings graphs, finite permutation quotients and coset-product separation.

Words are tuples of nonzero ints: ``k`` is the k-th generator, ``-k`` its
inverse.  As strings, ``a..z`` are generators and capitals their inverses.

Permutations are tuples of images on ``0..m-1`` and act on the right: the
product ``p * q`` means "p then q", so a word's image is the left-to-right
product of its letters' images and the map word -> permutation is a
homomorphism.
"""

from __future__ import annotations

import itertools
import logging
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

log = logging.getLogger(__name__)

Word = Tuple[int, ...]
Perm = Tuple[int, ...]

SIZE_BOUND = 100_000


class QuotientTooLarge(ValueError):
    pass


# words --------------------------------------------------------------------------


def reduce(w: Sequence[int]) -> Word:
    out: List[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def mul(*ws: Sequence[int]) -> Word:
    return reduce(tuple(itertools.chain.from_iterable(ws)))


def parse_word(s: str) -> Word:
    s = s.strip()
    if s in ("", "1"):
        return ()
    out = []
    for ch in s:
        if not ("a" <= ch.lower() <= "z"):
            raise ValueError(f"bad letter {ch!r} in word {s!r}")
        k = ord(ch.lower()) - ord("a") + 1
        out.append(k if ch.islower() else -k)
    return tuple(out)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return "".join(chr(ord("a") + abs(x) - 1) if x > 0 else chr(ord("A") + abs(x) - 1) for x in w)


def rank_of(words: Iterable[Sequence[int]]) -> int:
    return max((abs(x) for w in words for x in w), default=0)


# Stallings graphs ---------------------------------------------------------------------


@dataclass
class StallingsGraph:
    """Based labeled graph; ``out[v][k] = w`` for a positive edge v -k-> w."""

    base: Hashable
    vertices: Set[Hashable]
    edges: List[Tuple[Hashable, int, Hashable]]
    folded: bool = False
    merged: Dict[Hashable, Hashable] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, base, vertices: Iterable, edges: Iterable[Tuple[Hashable, int, Hashable]]) -> "StallingsGraph":
        es = []
        for u, k, w in edges:
            es.append((u, k, w) if k > 0 else (w, -k, u))
        return fold(cls(base, set(vertices) | {base}, es))

    def step(self, v, k: int):
        if k > 0:
            return self._out.get(v, {}).get(k)
        return self._inc.get(v, {}).get(-k)

    def trace(self, w: Sequence[int], start=None):
        v = self.base if start is None else self.find(start)
        for x in reduce(w):
            v = self.step(v, x)
            if v is None:
                return None
        return v

    def find(self, v):
        while v in self.merged:
            v = self.merged[v]
        return v

    def generators(self) -> List[Word]:
        """Free basis read off a BFS spanning tree."""
        path = {self.base: ()}
        tree: Set[int] = set()
        queue = deque([self.base])
        adj: Dict[Hashable, List[Tuple[int, int, Hashable]]] = {}
        for i, (u, k, w) in enumerate(self.edges):
            adj.setdefault(u, []).append((i, k, w))
            adj.setdefault(w, []).append((i, -k, u))
        while queue:
            u = queue.popleft()
            for i, k, w in sorted(adj.get(u, []), key=lambda t: (t[0], t[1])):
                if w not in path:
                    path[w] = path[u] + (k,)
                    tree.add(i)
                    queue.append(w)
        out = []
        for i, (u, k, w) in enumerate(self.edges):
            if i not in tree and u in path:
                out.append(mul(path[u], (k,), inverse(path[w])))
        return out

    @property
    def rank(self) -> int:
        return len(self.generators())

    def to_json(self) -> dict:
        name = {v: i for i, v in enumerate(sorted(self.vertices, key=repr))}
        return {"base": name[self.base], "edges": [[name[u], k, name[w]] for u, k, w in self.edges]}


def fold(G: StallingsGraph) -> StallingsGraph:
    """Fold to completion, driven by a worklist of edges."""
    out: Dict[Hashable, Dict[int, Hashable]] = {}
    inc: Dict[Hashable, Dict[int, Hashable]] = {}
    merged: Dict[Hashable, Hashable] = {}
    edges: Set[Tuple[Hashable, int, Hashable]] = set()

    def find(v):
        while v in merged:
            v = merged[v]
        return v

    pending = deque(G.edges)
    while pending:
        u, k, w = pending.popleft()
        u, w = find(u), find(w)
        if (u, k, w) in edges:
            continue
        a = out.get(u, {}).get(k)
        b = inc.get(w, {}).get(k)
        if a is not None and find(a) != w:
            _merge(find(a), w, out, inc, merged, edges, pending, find)
            pending.append((u, k, w))
            continue
        if b is not None and find(b) != u:
            _merge(find(b), u, out, inc, merged, edges, pending, find)
            pending.append((u, k, w))
            continue
        edges.add((u, k, w))
        out.setdefault(u, {})[k] = w
        inc.setdefault(w, {})[k] = u
    verts = {find(v) for v in G.vertices}
    H = StallingsGraph(find(G.base), verts, sorted(edges, key=repr), True, {**G.merged, **merged})
    H._out, H._inc = out, inc
    return H


def _merge(x, y, out, inc, merged, edges, pending, find):
    """Merge vertex y into x; edges at y are re-queued."""
    if x == y:
        return
    if repr(y) < repr(x):
        x, y = y, x
    merged[y] = x
    moved = [e for e in edges if e[0] == y or e[2] == y]
    for e in moved:
        u, k, w = e
        edges.discard(e)
        if out.get(u, {}).get(k) == w:
            del out[u][k]
        if inc.get(w, {}).get(k) == u:
            del inc[w][k]
        pending.append((find(u), k, find(w)))


def stallings(generators: Iterable[Sequence[int]]) -> StallingsGraph:
    """Wedge of loops at the base, folded."""
    base = ("b",)
    verts = {base}
    edges = []
    for gi, g in enumerate(generators):
        g = reduce(g)
        if not g:
            continue
        prev = base
        for t, x in enumerate(g):
            nxt = base if t == len(g) - 1 else (gi, t)
            verts.add(nxt)
            edges.append((prev, x, nxt) if x > 0 else (nxt, -x, prev))
            prev = nxt
    return fold(StallingsGraph(base, verts, edges))


def member(H: StallingsGraph, w: Sequence[int]) -> bool:
    if not H.folded:
        raise ValueError("member needs a folded graph")
    return H.trace(w) == H.base


def in_double_coset(Ki: StallingsGraph, w: Sequence[int], Kj: StallingsGraph, u: Sequence[int]) -> bool:
    """Is ``u`` in Ki * w * Kj?  Join the two graphs by a w-path and fold."""
    w = reduce(w)
    bi, bj = ("i", Ki.base), ("j", Kj.base)

    def j_name(v):
        # with an empty connector the two bases are one vertex
        return bi if (not w and v == Kj.base) else ("j", v)

    verts = {("i", v) for v in Ki.vertices} | {j_name(v) for v in Kj.vertices}
    edges = [(("i", a), k, ("i", b)) for a, k, b in Ki.edges] + [(j_name(a), k, j_name(b)) for a, k, b in Kj.edges]
    prev = bi
    for t, x in enumerate(w):
        nxt = j_name(Kj.base) if t == len(w) - 1 else ("w", t)
        verts.add(nxt)
        edges.append((prev, x, nxt) if x > 0 else (nxt, -x, prev))
        prev = nxt
    G = fold(StallingsGraph(bi, verts, edges))
    end = G.trace(u)
    return end is not None and end == G.find(j_name(Kj.base))


# finite quotients ---------------------------------------------------------------------------


def perm_mul(p: Perm, q: Perm) -> Perm:
    """p then q."""
    return tuple(q[i] for i in p)


def perm_inv(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def perm_id(m: int) -> Perm:
    return tuple(range(m))


@dataclass(frozen=True)
class FiniteQuotient:
    rank: int
    degree: int
    gens: Tuple[Perm, ...]
    name: str = ""

    def image(self, w: Sequence[int]) -> Perm:
        p = perm_id(self.degree)
        for x in w:
            g = self.gens[abs(x) - 1]
            p = perm_mul(p, g if x > 0 else perm_inv(g))
        return p

    @property
    def identity(self) -> Perm:
        return perm_id(self.degree)

    def in_kernel(self, w: Sequence[int]) -> bool:
        return self.image(w) == self.identity

    def elements(self, bound: int = SIZE_BOUND) -> List[Perm]:
        """Group elements in BFS order from the identity."""
        return list(closure([self.identity], self.gens, bound))

    def order(self, bound: int = SIZE_BOUND) -> int:
        return len(self.elements(bound))

    def to_json(self) -> dict:
        return {"schema": "quotient.v1", "rank": self.rank, "degree": self.degree,
                "gens": [list(g) for g in self.gens], "name": self.name}

    @classmethod
    def from_json(cls, d: dict) -> "FiniteQuotient":
        return cls(d["rank"], d["degree"], tuple(tuple(g) for g in d["gens"]), d.get("name", ""))


def closure(start: Iterable[Perm], gens: Sequence[Perm], bound: int = SIZE_BOUND) -> Dict[Perm, None]:
    """Closure of ``start`` under right multiplication by ``gens`` (ordered dict)."""
    seen: Dict[Perm, None] = {}
    queue = deque()
    for s in start:
        if s not in seen:
            seen[s] = None
            queue.append(s)
    gens = [g for g in gens if g != perm_id(len(g))]
    while queue:
        p = queue.popleft()
        for g in gens:
            r = perm_mul(p, g)
            if r not in seen:
                if len(seen) >= bound:
                    raise QuotientTooLarge(f"group exceeds {bound} elements")
                seen[r] = None
                queue.append(r)
    return seen


def image_in_quotient(phi: FiniteQuotient, H: StallingsGraph) -> FrozenSet[Perm]:
    return frozenset(closure([phi.identity], [phi.image(g) for g in H.generators()]))


@dataclass
class CosetProduct:
    """g_0 H_1 g_1 ... H_m g_m."""

    words: List[Word]
    subgroups: List[StallingsGraph]

    def __post_init__(self):
        if len(self.words) != len(self.subgroups) + 1 or not self.subgroups:
            raise ValueError("a coset product alternates m+1 words with m >= 1 subgroups")

    def to_json(self) -> dict:
        items = []
        for i, H in enumerate(self.subgroups):
            items.append(format_word(self.words[i]))
            items.append([format_word(g) for g in H.generators()])
        items.append(format_word(self.words[-1]))
        return {"schema": "product.v1", "items": items}

    @classmethod
    def from_json(cls, d: dict) -> "CosetProduct":
        items = d["items"] if isinstance(d, dict) else d
        words = [parse_word(x) for x in items[0::2]]
        subs = [stallings(parse_word(g) for g in gs) for gs in items[1::2]]
        return cls(words, subs)

    def sample(self, rng: random.Random, max_gens: int = 3) -> Word:
        out: Word = self.words[0]
        for H, g in zip(self.subgroups, self.words[1:]):
            gens = H.generators()
            for _ in range(rng.randint(0, max_gens) if gens else 0):
                h = rng.choice(gens)
                out = mul(out, h if rng.random() < 0.5 else inverse(h))
            out = mul(out, g)
        return out


def double_coset(Ki: StallingsGraph, w: Word, Kj: StallingsGraph) -> CosetProduct:
    return CosetProduct([(), w, ()], [Ki, Kj])


def product_image(phi: FiniteQuotient, P: CosetProduct) -> FrozenSet[Perm]:
    current = {phi.image(P.words[0]): None}
    for H, g in zip(P.subgroups, P.words[1:]):
        current = closure(current, [phi.image(h) for h in H.generators()])
        gi = phi.image(g)
        current = {perm_mul(p, gi): None for p in current}
    return frozenset(current)


def separates(phi: FiniteQuotient, P: CosetProduct) -> bool:
    return phi.identity not in product_image(phi, P)


def intersect(phi1: FiniteQuotient, phi2: FiniteQuotient, bound: int = SIZE_BOUND) -> FiniteQuotient:
    if phi1.rank != phi2.rank:
        raise ValueError("intersect needs equal ranks")
    m = phi1.degree
    gens = tuple(a + tuple(m + x for x in b) for a, b in zip(phi1.gens, phi2.gens))
    out = FiniteQuotient(phi1.rank, m + phi2.degree, gens, f"({phi1.name})x({phi2.name})")
    out.elements(bound)
    return out


# catalog -------------------------------------------------------------------------------


def _cycle(d: int, pts: Sequence[int], m: int) -> Perm:
    p = list(range(m))
    for i, x in enumerate(pts):
        p[x] = pts[(i + 1) % len(pts)]
    return tuple(p)


def _reflection(d: int) -> Perm:
    return tuple((-i) % d for i in range(d))


def _shift(p: Perm, k: int, m: int) -> Perm:
    out = list(range(m))
    for i, j in enumerate(p):
        out[i + k] = j + k
    return tuple(out)


def catalog_groups(d: int) -> List[Tuple[str, List[Perm]]]:
    """Small permutation groups of degree d, as (name, generators)."""
    out: List[Tuple[str, List[Perm]]] = []
    if d == 1:
        return [("trivial", [perm_id(1)])]
    cyc = _cycle(d, list(range(d)), d)
    out.append((f"C{d}", [cyc]))
    if d >= 3:
        out.append((f"D{d}", [cyc, _reflection(d)]))
    if 3 <= d <= 5:
        out.append((f"S{d}", [cyc, _cycle(d, [0, 1], d)]))
    if d == 4:
        out.append(("A4", [_cycle(4, [0, 1, 2], 4), _cycle(4, [1, 2, 3], 4)]))
    if d % 2 == 0 and d >= 4:
        h = d // 2
        for name, gens in catalog_groups(h):
            if name.startswith("C") or name in ("S3",):
                left = [_shift(g, 0, d) for g in gens]
                right = [_shift(g, h, d) for g in gens]
                out.append((f"{name}x{name}", left + right))
    return out


def catalog(rank: int, max_degree: int = 8, seed: int = 0, tuple_cap: int = 4096,
            samples: int = 256, random_per_degree: int = 64) -> Iterator[FiniteQuotient]:
    """Deterministic enumeration: catalog tuples by degree, then seeded random S_d tuples."""
    rng = random.Random(seed)
    if rank == 0:
        yield FiniteQuotient(0, 1, (), "trivial")
        return
    for d in range(1, max_degree + 1):
        for name, gens in catalog_groups(d):
            try:
                elems = list(closure([perm_id(d)], gens, bound=tuple_cap * 16))
            except QuotientTooLarge:
                continue
            if len(elems) ** rank <= tuple_cap:
                tuples: Iterable = itertools.product(elems, repeat=rank)
            else:
                tuples = (tuple(rng.choice(elems) for _ in range(rank)) for _ in range(samples))
            for t in tuples:
                yield FiniteQuotient(rank, d, tuple(t), name)
    for d in range(2, max_degree + 1):
        for _ in range(random_per_degree):
            gens = []
            for _ in range(rank):
                p = list(range(d))
                rng.shuffle(p)
                gens.append(tuple(p))
            yield FiniteQuotient(rank, d, tuple(gens), f"random S{d}")


def generator_constraint(phi: FiniteQuotient) -> bool:
    """phi(g_j) != 1 and the 2n images of generators and inverses pairwise distinct."""
    imgs = []
    for g in phi.gens:
        if g == perm_id(phi.degree):
            return False
        imgs += [g, perm_inv(g)]
    return len(set(imgs)) == len(imgs)


@dataclass
class Exhausted:
    reason: str
    tried: int
    trace: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"exhausted": True, "reason": self.reason, "tried": self.tried, "trace": self.trace[-50:]}


def find_separating_quotient(products: Sequence[CosetProduct], rank: Optional[int] = None, max_degree: int = 8,
                             seconds: Optional[float] = None, seed: int = 0,
                             accept: Optional[Callable[[FiniteQuotient], bool]] = None,
                             candidates: Optional[Iterable[FiniteQuotient]] = None) -> FiniteQuotient | Exhausted:
    """First quotient in catalog order separating every product."""
    if rank is None:
        rank = max([rank_of(P.words) for P in products]
                   + [rank_of(g for H in P.subgroups for g in H.generators()) for P in products] + [1])
    start = time.monotonic()
    tried = 0
    trace = []
    for phi in candidates if candidates is not None else catalog(rank, max_degree, seed):
        if seconds is not None and time.monotonic() - start > seconds:
            return Exhausted("time budget", tried, trace)
        if phi.degree > max_degree:
            break
        if accept is not None and not accept(phi):
            continue
        tried += 1
        try:
            bad = next((i for i, P in enumerate(products) if not separates(phi, P)), None)
        except QuotientTooLarge:
            log.info("skipping %s: image too large", phi.name)
            trace.append(f"{phi.name} deg {phi.degree}: too large")
            continue
        if bad is None:
            return phi
        if len(trace) < 1000:
            trace.append(f"{phi.name} deg {phi.degree}: product {bad} not separated")
    return Exhausted("degree budget", tried, trace)


# normal-form oracle ------------------------------------------------------------------------------


def words_up_to(rank: int, length: int) -> Iterator[Word]:
    letters = [k for i in range(1, rank + 1) for k in (i, -i)]
    frontier: List[Word] = [()]
    yield ()
    for _ in range(length):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        for w in nxt:
            yield w
        frontier = nxt


def bounded_identity_search(P: CosetProduct, max_factors: int = 4, max_len: int = 12) -> bool:
    """Search products of at most ``max_factors`` subgroup generators per factor for the identity."""
    partial = {reduce(P.words[0])}
    for H, g in zip(P.subgroups, P.words[1:]):
        gens = H.generators()
        letters = gens + [inverse(x) for x in gens]
        elems = {()}
        frontier = {()}
        for _ in range(max_factors):
            frontier = {mul(w, x) for w in frontier for x in letters if len(mul(w, x)) <= max_len}
            elems |= frontier
        partial = {mul(a, h, g) for a in partial for h in elems}
    return () in partial


# horizontal subgroups of realizations -------------------------------------------------------------


def _loop_index(T) -> Dict[str, int]:
    g = T.gos.graph
    if len(g.vertices) != 1:
        raise ValueError("horizontal subgroups need a total space over a bouquet")
    return {e: j for j, e in enumerate(g.edges, 1)}


def horizontal_stallings(T, C: str) -> Tuple[StallingsGraph, Dict[str, Hashable]]:
    """Folded horizontal graph of the 0-cube C, and where each of its 0-cubes went."""
    from .gos import horizontal_graph

    idx = _loop_index(T)
    G = horizontal_graph(T, C)
    edges = [(a, idx[lab[0]], b) for a, b, lab in G.edges.values()]
    S = fold(StallingsGraph(C, set(G.vertices), edges))
    return S, {v: S.find(v) for v in G.vertices}


def horizontal_subgroup(T, C: str) -> StallingsGraph:
    return horizontal_stallings(T, C)[0]


def connecting_word(T, Ci: str, Cj: str) -> Optional[Word]:
    """Label of one horizontal path from Ci to Cj, or None."""
    from .gos import horizontal_graph

    idx = _loop_index(T)
    G = horizontal_graph(T, Ci)
    if Cj not in G.vertices:
        return None
    adj: Dict[str, List[Tuple[str, int, str]]] = {}
    for h, (a, b, lab) in sorted(G.edges.items()):
        adj.setdefault(a, []).append((h, idx[lab[0]], b))
        adj.setdefault(b, []).append((h, -idx[lab[0]], a))
    path: Dict[str, Word] = {Ci: ()}
    queue = deque([Ci])
    while queue:
        u = queue.popleft()
        for _, k, w in adj.get(u, []):
            if w not in path:
                path[w] = path[u] + (k,)
                queue.append(w)
    return path.get(Cj)


def _cell_steps(T, d: int, idx: Dict[str, int]):
    """Horizontal moves between vertical d-cubes: cell -> [(letter, cell, transport)]."""
    steps: Dict[str, List[Tuple[int, str, object]]] = {}
    for c, (kind, e, base) in T.provenance.items():
        if kind != "edge" or T.gos.edge_spaces[e].space.dim_of(base) != d:
            continue
        a, ga = T.end(e, base, 1)
        b, gb = T.end(e, base, 2)
        h = gb * ga.inverse()
        steps.setdefault(a, []).append((idx[e], b, h))
        steps.setdefault(b, []).append((-idx[e], a, h.inverse()))
    return steps


def _explore(steps, start: str, dim: Optional[int] = None):
    """Paths from ``start`` to every reachable node, and the positive edges.

    Nodes are cells, or (cell, transport) pairs when ``dim`` is given; the
    latter graph is the cover on which a loop closes iff its transport is trivial.
    """
    from .symmetry import Sym

    s0 = Sym.identity(dim) if dim is not None else None
    root = start if dim is None else (start, s0)
    paths: Dict[Hashable, Word] = {root: ()}
    edges = []
    queue = deque([(start, s0)])
    while queue:
        x, s = queue.popleft()
        u = x if dim is None else (x, s)
        for k, y, h in steps.get(x, []):
            t = None if dim is None else h * s
            v = y if dim is None else (y, t)
            if k > 0:
                edges.append((u, k, v))
            if v not in paths:
                paths[v] = paths[u] + (k,)
                queue.append((y, t))
    return root, paths, edges


def strictness_products(T) -> List[CosetProduct]:
    """Coset products whose separation makes a finite cover strict.

    For every dimension: K_a w_ab K_b for each ordered pair of distinct cubes
    a, b in a common horizontal class, and K0 w K0 for every loop w whose
    transport around a class is a nontrivial symmetry (K0 = loops with
    trivial transport).
    """
    idx = _loop_index(T)
    X = T.complex
    out: List[CosetProduct] = []
    for d in range(X.dim + 1):
        steps = _cell_steps(T, d, idx)
        done: Set[str] = set()
        for c in sorted(x for x in X.cells() if X.dim_of(x) == d and T.is_vertical(x)):
            if c in done or c not in steps:
                continue
            _, paths, edges = _explore(steps, c)
            cls = sorted(paths)
            done.update(cls)
            K = {a: fold(StallingsGraph(a, set(cls), list(edges))) for a in cls} if len(cls) > 1 else {}
            for a in cls:
                for b in cls:
                    if a != b:
                        w = mul(inverse(paths[a]), paths[b])
                        out.append(double_coset(K[a], w, K[b]))
            if d == 0:
                continue
            root, tpaths, tedges = _explore(steps, c, d)
            twisted = sorted((s.index, w) for (x, s), w in tpaths.items() if x == c and s != root[1])
            if twisted:
                K0 = fold(StallingsGraph(root, set(tpaths), tedges))
                out.extend(double_coset(K0, w, K0) for _, w in twisted)
    return out
