"""Signed-permutation symmetries of the standard cube and face patterns.

A vertex of the standard n-cube is a bit tuple (0 for coordinate -1, 1 for +1).
A face is a *pattern*: a tuple over {0, 1, None} where ``None`` marks a free
coordinate.  The local coordinates of a face are its free coordinates in
increasing order.

A symmetry ``g`` with ``perm`` and ``flip`` sends a point ``b`` to ``c`` with
``c[perm[i]] = b[i] ^ flip[i]``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Tuple

Pattern = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class Sym:
    perm: Tuple[int, ...]
    flip: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.perm)

    @classmethod
    def identity(cls, k: int) -> "Sym":
        return cls(tuple(range(k)), (0,) * k)

    @classmethod
    def from_index(cls, k: int, index: int) -> "Sym":
        return all_syms(k)[index]

    @classmethod
    def from_dir(cls, direction: int) -> "Sym":
        """Edge-slot direction flag (+1 / -1) as a symmetry of the interval."""
        if direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {direction!r}")
        return cls((0,), (0 if direction == 1 else 1,))

    @property
    def index(self) -> int:
        return _sym_index(self)

    @property
    def direction(self) -> int:
        assert self.dim == 1
        return -1 if self.flip[0] else 1

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.dim)) and not any(self.flip)

    def apply(self, bits: Sequence[int]) -> Tuple[int, ...]:
        out = [0] * self.dim
        for i, b in enumerate(bits):
            out[self.perm[i]] = b ^ self.flip[i]
        return tuple(out)

    def apply_pattern(self, p: Pattern) -> Pattern:
        out: list = [None] * self.dim
        for i, x in enumerate(p):
            out[self.perm[i]] = None if x is None else x ^ self.flip[i]
        return tuple(out)

    def __mul__(self, other: "Sym") -> "Sym":
        # self after other
        if self.dim != other.dim:
            raise ValueError("dimension mismatch in symmetry product")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.dim))
        flip = tuple(other.flip[i] ^ self.flip[other.perm[i]] for i in range(self.dim))
        return Sym(perm, flip)

    def inverse(self) -> "Sym":
        inv = [0] * self.dim
        for i, j in enumerate(self.perm):
            inv[j] = i
        return Sym(tuple(inv), tuple(self.flip[inv[j]] for j in range(self.dim)))

    def restrict(self, p: Pattern) -> Tuple[Pattern, "Sym"]:
        """Image face of ``p`` and the induced map between local coordinates."""
        image = self.apply_pattern(p)
        src = free_coords(p)
        dst = free_coords(image)
        pos = {c: t for t, c in enumerate(dst)}
        perm = tuple(pos[self.perm[i]] for i in src)
        flip = tuple(self.flip[i] for i in src)
        return image, Sym(perm, flip)

    def extend(self) -> "Sym":
        """Act as the identity on one extra trailing coordinate."""
        return Sym(self.perm + (self.dim,), self.flip + (0,))

    def __repr__(self) -> str:
        return f"Sym({self.dim}:{self.index})"


@lru_cache(maxsize=None)
def all_syms(k: int) -> Tuple[Sym, ...]:
    """Symmetries of I^k in index order: permutation-major, flip bits minor."""
    out = []
    for perm in itertools.permutations(range(k)):
        for f in range(2 ** k):
            out.append(Sym(perm, tuple((f >> i) & 1 for i in range(k))))
    return tuple(out)


@lru_cache(maxsize=None)
def _index_table(k: int) -> dict:
    return {g: i for i, g in enumerate(all_syms(k))}


def _sym_index(g: Sym) -> int:
    return _index_table(g.dim)[g]


def free_coords(p: Pattern) -> Tuple[int, ...]:
    return tuple(i for i, x in enumerate(p) if x is None)


def pattern_dim(p: Pattern) -> int:
    return sum(1 for x in p if x is None)


def top(n: int) -> Pattern:
    return (None,) * n


def pattern_str(p: Pattern) -> str:
    return "".join("*" if x is None else str(x) for x in p)


def parse_pattern(s: str) -> Pattern:
    return tuple(None if ch == "*" else int(ch) for ch in s)


@lru_cache(maxsize=None)
def faces(n: int, k: Optional[int] = None) -> Tuple[Pattern, ...]:
    """Faces of I^n in slot order.

    Ordered by dimension, then by free-coordinate set (lexicographic), then by
    the fixed bits read as an integer with the lowest fixed coordinate as the
    least significant bit.  For a square this gives corners c00, c10, c01, c11
    and sides y=-1, y=+1, x=-1, x=+1.
    """
    dims = range(n + 1) if k is None else (k,)
    out = []
    for d in dims:
        for free in itertools.combinations(range(n), d):
            fixed = [i for i in range(n) if i not in free]
            for bits in range(2 ** len(fixed)):
                p: list = [None] * n
                for t, i in enumerate(fixed):
                    p[i] = (bits >> t) & 1
                out.append(tuple(p))
    return tuple(out)


def proper_faces(n: int) -> Tuple[Pattern, ...]:
    return faces(n)[:-1]


def embed(p: Pattern, local: Pattern) -> Pattern:
    """Pattern of I^n for the sub-face ``local`` of the face ``p``."""
    out = list(p)
    for t, i in enumerate(free_coords(p)):
        out[i] = local[t]
    return tuple(out)


def localize(p: Pattern, sub: Pattern) -> Pattern:
    """Inverse of :func:`embed`: ``sub`` (a face inside ``p``) in ``p``'s local coordinates."""
    return tuple(sub[i] for i in free_coords(p))


def contains(p: Pattern, sub: Pattern) -> bool:
    return all(x is None or x == y for x, y in zip(p, sub))


def vertex_pattern(bits: Sequence[int]) -> Pattern:
    return tuple(bits)
