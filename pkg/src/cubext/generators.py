"""Seeded random instances: square complexes, tree-shaped graphs of spaces, realizations."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .cubes import CubeComplex, graph, is_npc, validate
from .fixtures import (
    cycle_graph,
    grid,
    inter_osculating_pair,
    moebius_square,
    self_osculating_square,
    single_square,
    strip,
    torus,
)
from .gos import EdgeSpace, GraphOfSpaces, UGraph
from .maps import (
    CubicalMap,
    PartialLocalIsometry,
    check_map,
    closure,
    face_image,
    inclusion,
    is_connected,
    is_local_isometry,
    is_locally_convex,
    is_valid_partial_local_isometry,
)
from .symmetry import all_syms, faces


@dataclass
class SquareComplexConfig:
    max_squares: int = 12
    max_vertices: int = 5
    reuse: Tuple[float, float] = (0.1, 0.7)


def random_square_complex(rng: random.Random, cfg: SquareComplexConfig = SquareComplexConfig()) -> CubeComplex:
    """Squares with random corners; each side reuses a fitting edge with some probability."""
    vs = [f"v{i}" for i in range(rng.randint(1, cfg.max_vertices))]
    edges: Dict[str, Tuple[str, str]] = {}
    reuse = rng.uniform(*cfg.reuse)
    squares = []
    for k in range(rng.randint(1, cfg.max_squares)):
        c = [rng.choice(vs) for _ in range(4)]
        sides = []
        for a, b in ((c[0], c[1]), (c[2], c[3]), (c[0], c[2]), (c[1], c[3])):
            fits = [(e, 1) for e, ab in edges.items() if ab == (a, b)]
            fits += [(e, -1) for e, ab in edges.items() if ab == (b, a) and a != b]
            if fits and rng.random() < reuse:
                sides.append(rng.choice(sorted(fits)))
            else:
                e = f"e{len(edges)}"
                edges[e] = (a, b)
                sides.append((e, 1))
        squares.append({"id": f"s{k}", "corners": c, "sides": [{"edge": e, "dir": d} for e, d in sides]})
    X = CubeComplex.from_records(vs, [{"id": e, "ends": list(ab)} for e, ab in edges.items()], squares)
    assert not validate(X)
    return X


def random_graph(rng: random.Random, max_vertices: int = 6, extra: int = 2, prefix: str = "") -> CubeComplex:
    """Connected graph: random spanning tree plus a few extra edges (loops allowed)."""
    n = rng.randint(1, max_vertices)
    vs = [f"{prefix}{i}" for i in range(n)]
    es = {}
    for i in range(1, n):
        j = rng.randrange(i)
        es[f"{prefix}e{len(es)}"] = (vs[j], vs[i]) if rng.random() < 0.5 else (vs[i], vs[j])
    for _ in range(rng.randint(0, extra)):
        es[f"{prefix}e{len(es)}"] = (rng.choice(vs), rng.choice(vs))
    return graph(vs, es)


# embeddings -------------------------------------------------------------------------------


def maximal_cells(A: CubeComplex) -> List[str]:
    covered = set()
    for c in A.cells():
        covered.update(f for f, _ in A.table(c).values())
    tops = [c for c in A.cells() if c not in covered]
    # order so each cell after the first meets an earlier one
    out = [tops[0]] if tops else []
    rest = tops[1:]
    seen = set(A.vertices_of(out[0])) if out else set()
    while rest:
        nxt = next((c for c in rest if seen & set(A.vertices_of(c))), rest[0])
        rest.remove(nxt)
        out.append(nxt)
        seen.update(A.vertices_of(nxt))
    return out


def embeddings(A: CubeComplex, X: CubeComplex, rng: Optional[random.Random] = None,
               limit: Optional[int] = None) -> Iterator[CubicalMap]:
    """Injective cubical maps A -> X by backtracking over maximal cells."""
    tops = maximal_cells(A)
    found = 0

    def candidates(c):
        n = A.dim_of(c)
        opts = [(d, g) for d in X.cells(n) for g in all_syms(n)]
        if rng is not None:
            rng.shuffle(opts)
        return opts

    def rec(i, cells, used):
        nonlocal found
        if limit is not None and found >= limit:
            return
        if i == len(tops):
            f = CubicalMap(A, X, dict(cells))
            if check_map(f):
                found += 1
                yield f
            return
        c = tops[i]
        for d, g in candidates(c):
            trial = {c: (d, g)}
            f = CubicalMap(A, X, {**cells, c: (d, g)})
            ok = True
            for p in faces(A.dim_of(c))[:-1]:
                F = A.face(c, p)[0]
                trial[F] = face_image(f, c, p)
            for F, img in trial.items():
                if F in cells and cells[F] != img:
                    ok = False
                    break
                owner = used.get(img[0])
                if owner is not None and owner != F:
                    ok = False
                    break
            if not ok or len({img[0] for img in trial.values()}) != len(trial):
                continue
            new = {F: img for F, img in trial.items() if F not in cells}
            cells.update(new)
            for F, img in new.items():
                used[img[0]] = F
            yield from rec(i + 1, cells, used)
            for F, img in new.items():
                del cells[F]
                del used[img[0]]

    yield from rec(0, {}, {})


def random_convex_subcomplex(rng: random.Random, X: CubeComplex, tries: int = 20) -> Optional[CubeComplex]:
    """Closure of a random vertex, edge, square or short path that is connected and locally convex."""
    for _ in range(tries):
        kind = rng.choice(["vertex", "edge", "square", "path", "path"])
        if kind == "vertex" or not X.edges:
            cells = [rng.choice(X.vertices)]
        elif kind == "edge":
            cells = [rng.choice(X.edges)]
        elif kind == "square":
            if not X.squares:
                continue
            cells = [rng.choice(X.squares)]
        else:
            e = rng.choice(X.edges)
            cells = [e]
            v = X.ends(e)[1]
            for _ in range(rng.randint(1, 2)):
                nxt = [c for c, _ in X.cofaces(v, 1) if c not in cells]
                if not nxt:
                    break
                e2 = rng.choice(sorted(nxt))
                cells.append(e2)
                a, b = X.ends(e2)
                v = b if a == v else a
        dom = closure(X, cells)
        A = X.restrict(dom)
        if is_connected(A) and is_locally_convex(X, dom):
            return A
    return None


def random_local_isometry(rng: random.Random, A: CubeComplex, X: CubeComplex, convex_image: bool = True,
                          limit: int = 40) -> Optional[CubicalMap]:
    """A random injective local isometry A -> X (with locally convex image if requested)."""
    for f in embeddings(A, X, rng, limit):
        if not is_local_isometry(f, check_npc=False):
            continue
        if convex_image and not is_locally_convex(X, f.image_cells()):
            continue
        return f
    return None


# pools ----------------------------------------------------------------------------------------


PATHOLOGICAL = {
    "moebius": moebius_square,
    "self_osculating": self_osculating_square,
    "inter_osculating": inter_osculating_pair,
}


def npc_pool(rng: random.Random, two_dim: bool = True, special_only: bool = True) -> CubeComplex:
    choices = ["graph", "cycle"]
    if two_dim:
        choices += ["square", "grid", "strip", "torus", "grid2"]
        if not special_only:
            choices += ["moebius", "self_osculating", "inter_osculating"]
    k = rng.choice(choices)
    if k in PATHOLOGICAL:
        return PATHOLOGICAL[k]()
    if k == "graph":
        return random_graph(rng)
    if k == "cycle":
        return cycle_graph(rng.randint(2, 5))
    if k == "square":
        return single_square()
    if k == "grid":
        return grid(rng.randint(1, 2), 1)
    if k == "grid2":
        return grid(2, 2)
    if k == "strip":
        return strip(rng.randint(1, 3))
    return torus()


# tree-shaped graphs of spaces -------------------------------------------------------------------


@dataclass
class TreeConfig:
    max_vertices: int = 4
    two_dim: bool = True
    convex_image: bool = True
    # False also draws NPC vertex-spaces that are not special
    special_only: bool = True


def random_tree_gos(rng: random.Random, cfg: TreeConfig = TreeConfig(), tries: int = 50) -> GraphOfSpaces:
    """Random tree of NPC spaces with injective locally isometric attaching maps."""
    for _ in range(tries):
        n = rng.randint(1, cfg.max_vertices)
        verts = [f"x{i}" for i in range(n)]
        spaces = {v: npc_pool(rng, cfg.two_dim, cfg.special_only) for v in verts}
        edges, es = {}, {}
        ok = True
        for i in range(1, n):
            j = rng.randrange(i)
            e = f"t{i}"
            a, b = (verts[j], verts[i]) if rng.random() < 0.5 else (verts[i], verts[j])
            A = random_convex_subcomplex(rng, spaces[a])
            f = random_local_isometry(rng, A, spaces[b], cfg.convex_image) if A is not None else None
            if f is None:
                ok = False
                break
            edges[e] = (a, b)
            es[e] = EdgeSpace(A, inclusion(A, spaces[a]), f)
        if ok:
            return GraphOfSpaces(UGraph(verts, edges), spaces, es)
    raise RuntimeError("could not build a tree of spaces")


# realizations ---------------------------------------------------------------------------------------


def random_partial_isometry(rng: random.Random, Y: CubeComplex, name: str = "", tries: int = 20
                            ) -> Optional[PartialLocalIsometry]:
    for _ in range(tries):
        A = random_convex_subcomplex(rng, Y)
        if A is None:
            continue
        f = random_local_isometry(rng, A, Y)
        if f is None:
            continue
        P = PartialLocalIsometry(Y, frozenset(A.cells()), f, name)
        if is_valid_partial_local_isometry(P, check_npc=False):
            return P
    return None


def random_problem(rng: random.Random, max_maps: int = 2, two_dim: bool = True
                   ) -> Tuple[CubeComplex, List[PartialLocalIsometry]]:
    """NPC complex Y with up to ``max_maps`` valid partial local isometries."""
    Y = npc_pool(rng, two_dim)
    assert is_npc(Y)
    O = []
    for j in range(rng.randint(1, max_maps)):
        P = random_partial_isometry(rng, Y, f"phi{j + 1}")
        if P is not None:
            O.append(P)
    return Y, O
