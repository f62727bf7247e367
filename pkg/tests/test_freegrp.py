import itertools
import random

from hypothesis import given, settings

from cubext.cubes import graph, point
from cubext.fixtures import edge_ab, torus
from cubext.freegrp import (
    CosetProduct,
    Exhausted,
    FiniteQuotient,
    catalog,
    connecting_word,
    double_coset,
    find_separating_quotient,
    format_word,
    horizontal_subgroup,
    image_in_quotient,
    in_double_coset,
    intersect,
    inverse,
    member,
    mul,
    parse_word,
    perm_id,
    perm_mul,
    product_image,
    reduce,
    separates,
    stallings,
    strictness_products,
    words_up_to,
)
from cubext.generators import random_problem
from cubext.gos import assemble, horizontal_edges, horizontal_graph, realization
from cubext.maps import PartialLocalIsometry

from conftest import rng_of, seeds
from oracles import reduced_path_labels

W = parse_word

# S2 and S3 as image arrays
ID2, T12 = (0, 1), (1, 0)
C123, S12 = (1, 2, 0), (1, 0, 2)


def test_reduce():
    assert reduce(()) == ()
    assert reduce(W("aA")) == ()
    assert reduce(W("abBa")) == W("aa")
    assert format_word(W("abBa")) == "abBa" and format_word(()) == "1"


def test_stallings_examples():
    H = stallings([W("a")])
    assert len(H.vertices) == 1 and H.edges == [(H.base, 1, H.base)]
    assert len(stallings([W("aa"), W("b")]).vertices) == 2
    E = stallings([])
    assert len(E.vertices) == 1 and not E.edges


def brute_subgroup(gens, factors=4, max_len=12):
    letters = list(gens) + [inverse(g) for g in gens]
    out = {()}
    frontier = {()}
    for _ in range(factors):
        frontier = {mul(w, g) for w in frontier for g in letters if len(mul(w, g)) <= max_len}
        out |= frontier
    return out


def test_member_examples():
    gens = [W("aa"), W("b")]
    H = stallings(gens)
    short = {w for w in brute_subgroup(gens) if len(w) <= 3}
    assert member(H, ())
    assert (W("a") in short) is False and member(H, W("a")) is False
    assert (W("aa") in short) is True and member(H, W("aa")) is True


def subgroup_closure(gens, m):
    seen = {perm_id(m)}
    frontier = [perm_id(m)]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = perm_mul(p, g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def test_image_in_quotient():
    assert image_in_quotient(FiniteQuotient(1, 2, (ID2,)), stallings([W("a")])) == {ID2}
    assert image_in_quotient(FiniteQuotient(1, 2, (T12,)), stallings([W("a")])) == {ID2, T12}
    phi = FiniteQuotient(2, 3, (C123, S12))
    expected = subgroup_closure([perm_mul(C123, C123), S12], 3)
    assert image_in_quotient(phi, stallings([W("aa"), W("b")])) == expected and len(expected) == 6


def test_product_image():
    phi = FiniteQuotient(2, 2, (ID2, T12))
    P = CosetProduct([(), W("b"), ()], [stallings([W("a")]), stallings([W("a")])])
    assert product_image(phi, P) == {T12}
    assert separates(phi, P)
    triv = CosetProduct([(), ()], [stallings([])])
    assert product_image(phi, triv) == {ID2}


def test_three_factor_product_s3():
    phi = FiniteQuotient(2, 3, (C123, S12))
    Hs = [stallings([W("b")]), stallings([W("a")]), stallings([W("ab")])]
    words = [W("a"), W("b"), (), W("A")]
    P = CosetProduct(words, Hs)
    # oracle: multiply element sets by hand
    cur = {phi.image(words[0])}
    for H, g in zip(Hs, words[1:]):
        sub = subgroup_closure([phi.image(x) for x in H.generators()], 3)
        cur = {perm_mul(perm_mul(p, h), phi.image(g)) for p in cur for h in sub}
    assert product_image(phi, P) == cur


def test_separation_examples():
    hall = CosetProduct([(), W("b")], [stallings([W("a")])])
    phi = find_separating_quotient([hall], 2)
    assert phi.degree == 2 and separates(phi, hall)
    assert not separates(FiniteQuotient(2, 1, ((0,), (0,))), hall)
    P = CosetProduct([(), W("ba"), ()], [stallings([W("a")]), stallings([W("b")])])
    phi = find_separating_quotient([P], 2, max_degree=6)
    assert not isinstance(phi, Exhausted) and phi.degree <= 6
    assert phi.identity not in product_image(phi, P)
    first = next(iter(catalog(2)))
    assert find_separating_quotient([], 2) == first


def test_exhausted_when_not_separable():
    # b is in <b>: nothing separates it
    P = CosetProduct([(), W("b"), ()], [stallings([W("a")]), stallings([W("b")])])
    P2 = CosetProduct([(), W("B")], [stallings([W("b")])])
    assert isinstance(find_separating_quotient([P, P2], 2, max_degree=3), Exhausted)


def test_intersect():
    phi = FiniteQuotient(1, 2, (T12,))
    assert intersect(phi, phi).order() == phi.order()
    z2, z3 = FiniteQuotient(1, 2, (T12,)), FiniteQuotient(1, 3, (C123,))
    assert intersect(z2, z3).order() == 6
    triv = FiniteQuotient(1, 1, ((0,),))
    assert intersect(z3, triv).order() == z3.order()


def test_quotient_json():
    phi = FiniteQuotient(2, 3, (C123, S12), "S3")
    assert FiniteQuotient.from_json(phi.to_json()) == phi
    P = CosetProduct([(), W("ba"), ()], [stallings([W("a")]), stallings([W("b")])])
    assert CosetProduct.from_json(P.to_json()).to_json() == P.to_json()


# horizontal subgroups ----------------------------------------------------------------------


def test_horizontal_subgroup_edge_ab():
    Y, O = edge_ab()
    T = assemble(realization(Y, O))
    assert horizontal_subgroup(T, "v/a").rank == 0
    assert connecting_word(T, "v/a", "v/b") == (1,)
    ps = strictness_products(T)
    assert sorted((p.words[1], tuple(H.rank for H in p.subgroups)) for p in ps) == [((-1,), (0, 0)), ((1,), (0, 0))]


def test_horizontal_subgroup_empty():
    Y, _ = edge_ab()
    T = assemble(realization(Y, []))
    assert horizontal_subgroup(T, "v/a").rank == 0
    assert connecting_word(T, "v/a", "v/b") is None
    assert strictness_products(T) == []


def test_horizontal_subgroup_two_loops():
    Y = point("o")
    P = PartialLocalIsometry.from_vertex_edge_maps(Y, {"o": "o"})
    T = assemble(realization(Y, [P, P]))
    K = horizontal_subgroup(T, "v/o")
    assert K.rank == 2 and member(K, W("abAB"))


def test_strictness_products_torus():
    Y = torus()
    P = PartialLocalIsometry.from_vertex_edge_maps(Y, {"v": "v"}, {"x": ("x", 1)})
    assert strictness_products(assemble(realization(Y, [P]))) == []


# properties -------------------------------------------------------------------------------------


def random_words(rng, rank, n, max_len):
    return [reduce(tuple(rng.choice([k, -k]) for k in (rng.randint(1, rank) for _ in range(rng.randint(1, max_len)))))
            for _ in range(n)]


@given(seeds)
def test_member_matches_enumeration(seed):
    rng = rng_of(seed)
    rank = rng.randint(1, 3)
    gens = [g for g in random_words(rng, rank, rng.randint(1, 3), 3) if g]
    H = stallings(gens)
    for w in brute_subgroup(gens):
        assert member(H, w)
    # non-members are certified by some small finite quotient when one exists
    image_cache = {}
    for w in words_up_to(rank, 3):
        if member(H, w):
            continue
        for phi in itertools.islice(catalog(rank, 4), 200):
            key = phi
            if key not in image_cache:
                image_cache[key] = image_in_quotient(phi, H)
            if phi.image(w) not in image_cache[key]:
                break
        else:
            continue


@given(seeds)
def test_separation_cross_check(seed):
    rng = rng_of(seed)
    rank = rng.randint(1, 3)
    Hs = [stallings([g for g in random_words(rng, rank, rng.randint(0, 2), 3) if g]) for _ in range(2)]
    P = CosetProduct([reduce(w) for w in random_words(rng, rank, 3, 3)], Hs)
    for phi in itertools.islice(catalog(rank, 4, seed=seed % 7), 40):
        if not separates(phi, P):
            continue
        for _ in range(30):
            w = P.sample(rng)
            if len(w) <= 10:
                assert not phi.in_kernel(w)


@given(seeds)
def test_intersect_kernels(seed):
    rng = rng_of(seed)
    rank = rng.randint(1, 3)
    qs = list(itertools.islice(catalog(rank, 4, seed=seed % 11), 300))
    a, b = rng.choice(qs), rng.choice(qs)
    ab = intersect(a, b)
    for w in random_words(rng, rank, 30, 10):
        assert ab.in_kernel(w) == (a.in_kernel(w) and b.in_kernel(w))


@settings(max_examples=50)
@given(seeds)
def test_double_coset_law(seed):
    rng = rng_of(seed)
    Y, O = random_problem(rng)
    if not O:
        return
    T = assemble(realization(Y, O, check=False))
    L = 5
    for Ci in T.complex.vertices:
        labels = reduced_path_labels(T, Ci, L)
        Ki = horizontal_subgroup(T, Ci)
        for Cj, ws in labels.items():
            w = connecting_word(T, Ci, Cj)
            Kj = horizontal_subgroup(T, Cj)
            assert all(in_double_coset(Ki, w, Kj, u) for u in ws)
            D = double_coset(Ki, w, Kj)
            for _ in range(10):
                u = D.sample(rng)
                if len(u) <= L:
                    assert u in ws
