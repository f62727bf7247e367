"""Union-find with group-valued edge labels.

``rel[x]`` maps x's coordinates to its parent's coordinates; ``find`` composes
along the path.  For parities use :func:`parity_uf`.
"""

from __future__ import annotations

import operator
from typing import Any, Callable, Dict, Hashable, Tuple


class WeightedUnionFind:
    def __init__(self, mul: Callable[[Any, Any], Any], inv: Callable[[Any], Any],
                 one: Callable[[Hashable], Any]):
        self.mul = mul
        self.inv = inv
        self.one = one
        self.parent: Dict[Hashable, Hashable] = {}
        self.rel: Dict[Hashable, Any] = {}

    def add(self, x: Hashable) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.rel[x] = self.one(x)

    def find(self, x: Hashable) -> Tuple[Hashable, Any]:
        self.add(x)
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        # compress: walk from the node nearest the root outwards
        acc = self.one(root)
        for y in reversed(path):
            acc = self.mul(acc, self.rel[y])
            self.parent[y] = root
            self.rel[y] = acc
        return root, self.rel[path[0]] if path else self.one(root)

    def union(self, a: Hashable, b: Hashable, g: Any) -> bool:
        """Record ``g``: a-coords -> b-coords.  Returns False on a conflict."""
        ra, ma = self.find(a)
        rb, mb = self.find(b)
        if ra == rb:
            return self.mul(mb, g) == ma
        if repr(ra) < repr(rb):
            # keep the smaller representative as root for determinism
            ra, rb, ma, mb, g = rb, ra, mb, ma, self.inv(g)
        self.parent[ra] = rb
        self.rel[ra] = self.mul(self.mul(mb, g), self.inv(ma))
        return True

    def same(self, a: Hashable, b: Hashable) -> bool:
        return self.find(a)[0] == self.find(b)[0]

    def classes(self) -> Dict[Hashable, list]:
        out: Dict[Hashable, list] = {}
        for x in list(self.parent):
            out.setdefault(self.find(x)[0], []).append(x)
        return out


def parity_uf() -> WeightedUnionFind:
    return WeightedUnionFind(operator.xor, lambda g: g, lambda _x: 0)


def sym_uf(dim_of: Callable[[Hashable], int]) -> WeightedUnionFind:
    from .symmetry import Sym

    return WeightedUnionFind(lambda a, b: a * b, lambda g: g.inverse(), lambda x: Sym.identity(dim_of(x)))
