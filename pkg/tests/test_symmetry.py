import itertools

from hypothesis import given, strategies as st

from cubext.symmetry import Sym, all_syms, faces, pattern_dim, parse_pattern, pattern_str


def sym(k):
    return st.integers(0, len(all_syms(k)) - 1).map(lambda i: Sym.from_index(k, i))


dims = st.integers(1, 3)


def test_group_orders():
    assert [len(all_syms(k)) for k in range(4)] == [1, 2, 8, 48]


def test_index_roundtrip():
    for k in range(4):
        assert [g.index for g in all_syms(k)] == list(range(len(all_syms(k))))


def test_face_counts():
    # I^3: 8 vertices, 12 edges, 6 squares, 1 cube
    assert [len(faces(3, k)) for k in range(4)] == [8, 12, 6, 1]
    assert [pattern_str(p) for p in faces(2, 1)] == ["*0", "*1", "0*", "1*"]


def test_pattern_parse():
    for p in faces(3):
        assert parse_pattern(pattern_str(p)) == p


@given(dims.flatmap(lambda k: st.tuples(sym(k), sym(k), sym(k))))
def test_associative(t):
    a, b, c = t
    assert (a * b) * c == a * (b * c)


@given(dims.flatmap(sym))
def test_inverse(g):
    e = Sym.identity(g.dim)
    assert g * g.inverse() == e == g.inverse() * g


@given(dims.flatmap(lambda k: st.tuples(sym(k), sym(k))))
def test_product_acts_as_composition(t):
    a, b = t
    for bits in itertools.product((0, 1), repeat=a.dim):
        assert (a * b).apply(bits) == a.apply(b.apply(bits))


@given(dims.flatmap(sym))
def test_restrict_matches_vertices(g):
    # the induced face map sends each vertex of the face where g does
    n = g.dim
    for p in faces(n):
        image, h = g.restrict(p)
        assert pattern_dim(image) == pattern_dim(p)
        free_p = [i for i in range(n) if p[i] is None]
        free_q = [i for i in range(n) if image[i] is None]
        for local in itertools.product((0, 1), repeat=len(free_p)):
            full = list(p)
            for i, b in zip(free_p, local):
                full[i] = b
            out = g.apply(full)
            assert tuple(out[i] for i in free_q) == h.apply(local)


def test_direction():
    assert Sym.from_dir(1).direction == 1 and Sym.from_dir(-1).direction == -1
    assert Sym.from_dir(1).index == 0
