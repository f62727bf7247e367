"""Small named complexes used by tests, the CLI and the acceptance suite."""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .cubes import CubeComplex, graph, standard_cube
from .maps import PartialLocalIsometry
from .symmetry import Sym, faces


def _sq(sid: str, sides: Sequence[Tuple[str, int]], corners: Sequence[str] = ()) -> dict:
    """Square record; sides are (edge, dir) for y=-1, y=+1, x=-1, x=+1."""
    rec = {"id": sid, "sides": [{"edge": e, "dir": d} for e, d in sides]}
    if corners:
        rec["corners"] = list(corners)
    return rec


def _edges(spec: Dict[str, Tuple[str, str]]) -> List[dict]:
    return [{"id": e, "ends": list(ab)} for e, ab in spec.items()]


def single_square() -> CubeComplex:
    return CubeComplex.from_records(
        ["p", "q", "r", "s"],
        _edges({"a": ("p", "q"), "b": ("r", "s"), "c": ("p", "r"), "d": ("q", "s")}),
        [_sq("S", [("a", 1), ("b", 1), ("c", 1), ("d", 1)], ["p", "q", "r", "s"])],
    )


def torus() -> CubeComplex:
    """One vertex, one square, opposite sides glued without twist."""
    return CubeComplex.from_records(
        ["v"], _edges({"x": ("v", "v"), "y": ("v", "v")}),
        [_sq("T", [("x", 1), ("x", 1), ("y", 1), ("y", 1)])],
    )


def self_crossing_square() -> CubeComplex:
    """Klein-bottle square: bottom and right are ``a``, top and left are ``b``."""
    return CubeComplex.from_records(
        ["v"], _edges({"a": ("v", "v"), "b": ("v", "v")}),
        [_sq("K", [("a", 1), ("b", 1), ("b", 1), ("a", 1)])],
    )


def moebius_square() -> CubeComplex:
    """Left and right sides glued with a flip; the vertical hyperplane is one-sided."""
    return CubeComplex.from_records(
        ["p", "q"], _edges({"e": ("p", "q"), "f": ("p", "q"), "g": ("q", "p")}),
        [_sq("M", [("f", 1), ("g", 1), ("e", 1), ("e", -1)], ["p", "q", "q", "p"])],
    )


def self_osculating_square() -> CubeComplex:
    """Bottom and top start at the same vertex; the left side is a loop there."""
    return CubeComplex.from_records(
        ["p", "q", "s"],
        _edges({"a": ("p", "q"), "b": ("p", "s"), "c": ("p", "p"), "d": ("q", "s")}),
        [_sq("S", [("a", 1), ("b", 1), ("c", 1), ("d", 1)], ["p", "q", "p", "s"])],
    )


def inter_osculating_pair() -> CubeComplex:
    """Two squares sharing edge ``d``; the horizontal hyperplane of the first
    square and the vertical hyperplane through ``d`` meet again at ``r``."""
    return CubeComplex.from_records(
        ["p", "q", "r", "s", "t"],
        _edges({
            "a": ("p", "q"), "b": ("r", "s"), "c": ("p", "r"), "d": ("q", "s"),
            "a2": ("q", "r"), "b2": ("s", "t"), "d2": ("r", "t"),
        }),
        [
            _sq("S", [("a", 1), ("b", 1), ("c", 1), ("d", 1)], ["p", "q", "r", "s"]),
            _sq("T", [("a2", 1), ("b2", 1), ("d", 1), ("d2", 1)], ["q", "r", "s", "t"]),
        ],
    )


def loop_square() -> CubeComplex:
    """Square with two adjacent sides on the same edge: link of ``v`` has a loop."""
    return CubeComplex.from_records(
        ["v", "w", "z"],
        _edges({"a": ("v", "w"), "b": ("w", "z"), "c": ("w", "z")}),
        [_sq("S", [("a", 1), ("b", 1), ("a", 1), ("c", 1)], ["v", "w", "w", "z"])],
    )


def three_squares(filled: bool = False) -> CubeComplex:
    """Three squares around a vertex; with ``filled`` the 3-cube is present."""
    X = standard_cube(3)
    if filled:
        return X
    keep = [c for c in X.cells() if c.count("*") < 2 or "0" in c]
    # the three squares at the corner 000 are the ones with a 0 in them
    return X.restrict(keep)


def wedge_of_loops(k: int = 2) -> CubeComplex:
    return graph(["v"], {f"l{i}": ("v", "v") for i in range(k)})


def bouquet_double_cover() -> Tuple[CubeComplex, CubeComplex, dict]:
    """Circle of length two covering a one-edge loop; returns (cover, base, cell map)."""
    cover = graph(["u0", "u1"], {"e0": ("u0", "u1"), "e1": ("u1", "u0")})
    base = graph(["v"], {"e": ("v", "v")})
    cells = {"u0": "v", "u1": "v", "e0": "e", "e1": "e"}
    return cover, base, cells


def strip(n: int = 2) -> CubeComplex:
    """A row of ``n`` unit squares."""
    vs = [f"b{i}" for i in range(n + 1)] + [f"t{i}" for i in range(n + 1)]
    es = {}
    for i in range(n):
        es[f"bot{i}"] = (f"b{i}", f"b{i + 1}")
        es[f"top{i}"] = (f"t{i}", f"t{i + 1}")
    for i in range(n + 1):
        es[f"r{i}"] = (f"b{i}", f"t{i}")
    sq = [_sq(f"S{i}", [(f"bot{i}", 1), (f"top{i}", 1), (f"r{i}", 1), (f"r{i + 1}", 1)]) for i in range(n)]
    return CubeComplex.from_records(vs, _edges(es), sq)


def grid(w: int, h: int, prefix: str = "") -> CubeComplex:
    """The planar ``w`` x ``h`` grid of unit squares; vertices ``{prefix}i,j``."""
    def v(i, j):
        return f"{prefix}{i},{j}"

    vs = [v(i, j) for i in range(w + 1) for j in range(h + 1)]
    es = {}
    for i in range(w + 1):
        for j in range(h + 1):
            if i < w:
                es[f"{prefix}h{i},{j}"] = (v(i, j), v(i + 1, j))
            if j < h:
                es[f"{prefix}v{i},{j}"] = (v(i, j), v(i, j + 1))
    sq = []
    for i in range(w):
        for j in range(h):
            sq.append(_sq(f"{prefix}s{i},{j}", [
                (f"{prefix}h{i},{j}", 1), (f"{prefix}h{i},{j + 1}", 1),
                (f"{prefix}v{i},{j}", 1), (f"{prefix}v{i + 1},{j}", 1)]))
    return CubeComplex.from_records(vs, _edges(es), sq)


def cycle_graph(n: int, prefix: str = "") -> CubeComplex:
    return graph([f"{prefix}{i}" for i in range(n)],
                 {f"{prefix}e{i}": (f"{prefix}{i}", f"{prefix}{(i + 1) % n}") for i in range(n)})


def perturbed_cube() -> CubeComplex:
    """Solid 3-cube whose first square slot uses a wrong symmetry."""
    X = standard_cube(3)
    rec = X.to_records()
    rec["cubes3"][0]["faces"][0]["sym"] = Sym((1, 0), (0, 0)).index
    return CubeComplex.from_records(rec["vertices"], rec["edges"], rec["squares"], rec["cubes3"])


# Hrushovski problems: (Y, partial maps) -------------------------------------------------


Problem = Tuple[CubeComplex, List[PartialLocalIsometry]]


def edge_ab() -> Problem:
    """Y = one edge ab, one partial map a -> b."""
    Y = graph(["a", "b"], {"e": ("a", "b")})
    return Y, [PartialLocalIsometry.from_vertex_edge_maps(Y, {"a": "b"}, name="a->b")]


def cycle4_rotation() -> Problem:
    """4-cycle with its first edge rotated onto the second."""
    Y = cycle_graph(4)
    return Y, [PartialLocalIsometry.from_vertex_edge_maps(Y, {"0": "1", "1": "2"}, {"e0": ("e1", 1)}, "rot")]


def path_two_maps() -> Problem:
    """Path 0-1-2 with a vertex map 0 -> 2 and an edge map e0 -> e1."""
    Y = graph(["0", "1", "2"], {"e0": ("0", "1"), "e1": ("1", "2")})
    return Y, [
        PartialLocalIsometry.from_vertex_edge_maps(Y, {"0": "2"}, name="0->2"),
        PartialLocalIsometry.from_vertex_edge_maps(Y, {"0": "1", "1": "2"}, {"e0": ("e1", 1)}, "shift"),
    ]


def triangle_flip() -> Problem:
    """3-cycle with one edge reversed onto itself."""
    Y = cycle_graph(3)
    return Y, [PartialLocalIsometry.from_vertex_edge_maps(Y, {"0": "1", "1": "0"}, {"e0": ("e0", -1)}, "flip")]


def theta_two_maps() -> Problem:
    """Two vertices joined by three edges; one map swaps two parallel edges' ends, one moves a vertex."""
    Y = graph(["u", "w"], {"x": ("u", "w"), "y": ("u", "w"), "z": ("u", "w")})
    return Y, [
        PartialLocalIsometry.from_vertex_edge_maps(Y, {"u": "w", "w": "u"}, {"x": ("y", -1)}, "swap"),
        PartialLocalIsometry.from_vertex_edge_maps(Y, {"u": "w"}, name="u->w"),
    ]


def square_translation() -> Problem:
    """Single square, bottom side carried to the top side; controlled and special."""
    Y = single_square()
    return Y, [PartialLocalIsometry.from_vertex_edge_maps(Y, {"p": "r", "q": "s"}, {"a": ("b", 1)}, "lift")]


PROBLEMS = {
    "edge_ab": edge_ab,
    "cycle4_rotation": cycle4_rotation,
    "path_two_maps": path_two_maps,
    "triangle_flip": triangle_flip,
    "theta_two_maps": theta_two_maps,
    "square_translation": square_translation,
}


PATHOLOGIES = {
    "self_crossing": self_crossing_square,
    "one_sided": moebius_square,
    "self_osculating": self_osculating_square,
    "inter_osculating": inter_osculating_pair,
}

NAMED = {
    "square": single_square,
    "torus": torus,
    "klein": self_crossing_square,
    "moebius": moebius_square,
    "self_osculating": self_osculating_square,
    "inter_osculating": inter_osculating_pair,
    "loop_square": loop_square,
    "three_squares": three_squares,
    "cube": lambda: standard_cube(3),
    "strip": strip,
}
