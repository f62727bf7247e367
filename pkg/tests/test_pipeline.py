import networkx as nx
import pytest
from hypothesis import given, settings

from cubext.cubes import CubeError, graph, is_npc
from cubext.fixtures import PROBLEMS, edge_ab, square_translation
from cubext.freegrp import FiniteQuotient
from cubext.generators import random_problem
from cubext.gos import assemble, horizontal_quotient, realization
from cubext.hyperplanes import is_special
from cubext.maps import PartialLocalIsometry, compose, is_automorphism
from cubext.pipeline import (
    Budget,
    certify,
    descend,
    hrushovski,
    induced_automorphism,
    induced_cover,
    is_covering,
    left_multiplication,
    prune_restrictions,
    search_cover,
    verify_cover,
)

from conftest import rng_of, seeds

# property tests skip covers with more copies than this, to stay at desk scale
MAX_COPIES = 120

Z3 = FiniteQuotient(1, 3, ((1, 2, 0),), "C3")
Z4 = FiniteQuotient(1, 4, ((1, 2, 3, 0),), "C4")


def nx_graph(X):
    g = nx.MultiGraph()
    g.add_nodes_from(X.vertices)
    g.add_edges_from(X.ends(e) for e in X.edges)
    return g


def power(f, k):
    out = f
    for _ in range(k - 1):
        out = compose(out, f)
    return out


def is_identity(f):
    return all(d == c and g.is_identity() for c, (d, g) in f.cells.items())


# covers -----------------------------------------------------------------------------------


def test_induced_cover_edge_ab():
    Y, O = edge_ab()
    cover = induced_cover(realization(Y, O), Z3)
    X = cover.total.complex
    assert X.counts() == (6, 6)
    assert nx.is_isomorphic(nx_graph(X), nx.cycle_graph(6))
    assert is_covering(cover)


def test_induced_cover_constraint():
    Y, O = edge_ab()
    with pytest.raises(CubeError):
        induced_cover(realization(Y, O), FiniteQuotient(1, 1, ((0,),)))
    with pytest.raises(CubeError):
        induced_cover(realization(Y, O), FiniteQuotient(2, 2, ((1, 0), (1, 0))))


def test_induced_cover_empty():
    Y, _ = edge_ab()
    cover = induced_cover(realization(Y, []), FiniteQuotient(0, 1, ()))
    assert cover.total.complex.counts() == Y.counts()
    assert is_identity(left_multiplication(cover, (0,)))


def test_induced_cover_square_translation():
    Y, O = square_translation()
    cover = induced_cover(realization(Y, O), Z4)
    g = nx.MultiGraph(list(cover.gos.graph.edges.values()))
    assert len(cover.gos.graph.vertices) == 4 and nx.is_isomorphic(g, nx.cycle_graph(4))
    # 4 copies of the square plus 4 thick copies of (edge a) x I
    assert cover.total.complex.counts() == (16, 16 + 8, 4 + 4)
    assert is_covering(cover)


def test_automorphism_order_and_rotation():
    Y, O = edge_ab()
    cover = induced_cover(realization(Y, O), Z3)
    Phi = induced_automorphism(cover, 0)
    assert is_automorphism(Phi)
    assert not is_identity(Phi) and is_identity(power(Phi, 3))
    g = nx_graph(cover.total.complex)
    assert all(nx.shortest_path_length(g, v, Phi.cells[v][0]) == 2 for v in g)


def test_descent_to_three_cycle():
    Y, O = edge_ab()
    cover = induced_cover(realization(Y, O), Z3)
    HQ = horizontal_quotient(cover.total)
    R = HQ.complex
    assert nx.is_isomorphic(nx_graph(R), nx.cycle_graph(3))
    PhiE, ok = descend(HQ, induced_automorphism(cover, 0))
    assert ok and is_automorphism(PhiE)
    assert all(PhiE.cells[v][0] != v for v in R.vertices) and is_identity(power(PhiE, 3))
    ident, ok = descend(HQ, left_multiplication(cover, (0, 1, 2)))
    assert ok and is_identity(ident)


def test_degree_one_cover_not_strict():
    Y, O = edge_ab()
    cover = induced_cover(realization(Y, O), FiniteQuotient(1, 1, ((0,),)), enforce_constraint=False)
    ledger, cert = verify_cover(cover)
    assert cert is None and not ledger.passed
    entry = ledger.get("strict")
    assert not entry.ok and sorted(entry.detail["cells"]) == ["q0/a", "q0/b"]


def test_verify_cover_six_cycle_passes():
    Y, O = edge_ab()
    ledger, cert = verify_cover(induced_cover(realization(Y, O), Z3), O=O)
    assert ledger.passed and cert.ok
    assert {e.name for e in ledger.entries} >= {"strict", "covering", "descent[0]", "quotient_npc", "extension[0]"}


# end to end ---------------------------------------------------------------------------------


def test_hrushovski_edge_ab():
    Y, O = edge_ab()
    cert, trace = hrushovski(Y, O)
    assert cert.ok and trace["accepted"]["degree"] == 3
    R = cert.R
    assert nx.is_isomorphic(nx_graph(R), nx.cycle_graph(3)) and R.dim == 1
    Phi = cert.automorphisms[0]
    assert Phi.cells[cert.iota.cells["a"][0]][0] == cert.iota.cells["b"][0]
    assert all(Phi.cells[v][0] != v for v in R.vertices)


def test_hrushovski_empty():
    Y, _ = edge_ab()
    cert, _ = hrushovski(Y, [])
    assert cert.ok and cert.automorphisms == [] and cert.R.counts() == Y.counts()
    assert sorted(d for d, _ in cert.iota.cells.values()) == sorted(cert.R.cells())


def test_hrushovski_cycle4_rotation():
    # R is not vertex-transitive: a hand count gives three vertices of degree 2 and three of degree 4
    Y, O = PROBLEMS["cycle4_rotation"]()
    cert, _ = hrushovski(Y, O)
    assert cert.ok and cert.R.counts() == (6, 9)
    assert sorted(d for _, d in nx_graph(cert.R).degree()) == [2, 2, 2, 4, 4, 4]


@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_fixture_problems(name):
    Y, O = PROBLEMS[name]()
    target = "special" if name == "square_translation" else "npc"
    cert, _ = hrushovski(Y, O, target)
    assert cert is not None and cert.ok
    assert cert.ledger.to_json() == cert.recheck().to_json()


def test_special_certificate_ledger():
    Y, O = square_translation()
    cert, _ = hrushovski(Y, O, "special")
    names = {e.name: e.ok for e in cert.full_ledger.entries}
    for key in ("quotient_special", "two_sided", "iota_locally_convex", "extension[0]", "realization_controlled"):
        assert names[key]
    assert is_special(cert.R).special


def test_special_preconditions():
    from cubext.fixtures import moebius_square

    X = moebius_square()
    cert, trace = hrushovski(X, [], "special")
    assert cert is None and trace["precondition"]["special"] is False
    Y, O = edge_ab()
    with pytest.raises(ValueError):
        hrushovski(Y, O, "flat")


def test_prune_restrictions():
    Y = graph(["0", "1", "2"], {"e0": ("0", "1"), "e1": ("1", "2")})
    shift = PartialLocalIsometry.from_vertex_edge_maps(Y, {"0": "1", "1": "2"}, {"e0": ("e1", 1)}, "shift")
    part = PartialLocalIsometry.from_vertex_edge_maps(Y, {"0": "1"}, name="part")
    other = PartialLocalIsometry.from_vertex_edge_maps(Y, {"0": "2"}, name="other")
    kept, where = prune_restrictions([part, shift, other])
    assert [P.name for P in kept] == ["shift", "other"] and where == {0: 0, 1: 0, 2: 1}
    kept, where = prune_restrictions([shift, shift])
    assert len(kept) == 1 and where == {0: 0, 1: 0}
    cert, _ = hrushovski(Y, [part, shift, other], prune=True)
    assert cert.ok and len(cert.automorphisms) == 3 and cert.pruned == {0: 0}
    assert cert.automorphisms[0] is cert.automorphisms[1]


def test_search_cover_exhausts_on_tiny_budget():
    Y, O = PROBLEMS["theta_two_maps"]()
    cert, trace = search_cover(realization(Y, O), "npc", Budget(max_degree=2), O)
    assert cert is None and "stage1" in trace


# properties over random problems ------------------------------------------------------------------


@settings(max_examples=20)
@given(seeds)
def test_cover_and_certificate_laws(seed):
    got = stage_one(seed)
    if got is None:
        return
    Y, O, G, _ = got
    cert, trace = search_cover(G, "npc", Budget(seconds=30), O)
    if cert is None:
        return
    assert cert.ok
    # covering, deck action and descent square on the accepted cover
    cover = induced_cover(G, cert.phi)
    assert is_covering(cover)
    copies = {left_multiplication(cover, r).cells["q0/" + Y.vertices[0]][0].split("/")[0] for r in cover.elements}
    assert len(copies) == len(cover.elements)
    HQ = horizontal_quotient(cover.total)
    for j in range(len(O)):
        _, ok = descend(HQ, induced_automorphism(cover, j))
        assert ok, ok.witness
    # dimension, NPC and extension on every cell of each Y_j
    R = cert.R
    assert R.dim == Y.dim and is_npc(R)
    for Phi, P in zip(cert.automorphisms, O):
        assert is_automorphism(Phi)
        for y in P.source.cells():
            d, g = P.phi.cells[y]
            img, k = cert.iota.cells[y]
            a, h = cert.iota.cells[d]
            e, m = Phi.cells[img]
            assert e == a and m * k == h * g
    # idempotent certification
    again = certify(R, cert.iota, cert.automorphisms, Y, O, cert.target)
    assert again.to_json() == cert.ledger.to_json()


def stage_one(seed):
    """Random problem, its realization and strictness quotient; None when trivial or too large."""
    from cubext.freegrp import Exhausted, find_separating_quotient, generator_constraint, strictness_products

    Y, O = random_problem(rng_of(seed))
    if not O:
        return None
    G = realization(Y, O)
    phi = find_separating_quotient(strictness_products(assemble(G)), len(O), 8, 10, 0, accept=generator_constraint)
    if isinstance(phi, Exhausted) or phi.order() > MAX_COPIES:
        return None
    return Y, O, G, phi


def stage_one_cover(seed):
    got = stage_one(seed)
    if got is None:
        return None
    cover = induced_cover(got[2], got[3])
    HQ = horizontal_quotient(cover.total)
    assert HQ.strict, HQ.witness
    return cover, HQ


@settings(max_examples=25)
@given(seeds)
def test_disconnection_law(seed):
    from cubext.gos import detect_remote_osculation, horizontal_edges
    from cubext.hyperplanes import hyperplanes

    got = stage_one_cover(seed)
    if got is None:
        return
    cover, HQ = got
    T = cover.total
    # the law assumes a special total space; without it a carrier can swallow a whole horizontal graph
    if not is_special(T.complex).special:
        return
    carriers = {H.dual_edges: set(H.carrier_cells) for H in hyperplanes(T.complex)}
    hor = horizontal_edges(T)
    seen = {}
    for w in detect_remote_osculation(T, HQ):
        if w["kind"] != "self":
            continue
        key = (w["graph"], tuple(w["hyperplane"]))
        if key not in seen:
            car = carriers[tuple(w["hyperplane"])]
            g = nx.MultiGraph()
            g.add_nodes_from(c for c in T.complex.vertices if T.is_vertical(c) and HQ.q[c][0] == w["graph"]
                             and c in car)
            g.add_edges_from((a, b) for h, (a, b, _) in hor.items() if h in car and a in g and b in g)
            seen[key] = g
        g = seen[key]
        assert not nx.is_connected(g) and not nx.has_path(g, *w["ends"])


@settings(max_examples=25)
@given(seeds)
def test_pathology_lifting(seed):
    from cubext.gos import detect_remote_osculation

    got = stage_one_cover(seed)
    if got is None:
        return
    cover, HQ = got
    if not is_special(cover.total.complex).special:
        return
    rep = is_special(HQ.complex)
    osculates = any(k.endswith("self_osculating") or k.endswith("inter_osculation") for k in rep.witnesses)
    if osculates:
        assert detect_remote_osculation(cover.total, HQ, limit=1)


def test_parallel_refinement_matches_sequential():
    import random

    from cubext import io

    # a random problem whose first strictness quotient fails NPC, so refinement runs
    Y, O = random_problem(random.Random(52))
    one, t1 = hrushovski(Y, O, "npc", Budget(seconds=60, jobs=1))
    two, t2 = hrushovski(Y, O, "npc", Budget(seconds=60, jobs=2))
    assert len(t1["candidates"]) > 1
    assert t1["candidates"] == t2["candidates"]
    assert io.dumps(one.to_json()) == io.dumps(two.to_json())
