"""The eight acceptance criteria, each at its stated size and time limit.

Every test prints (and records for the terminal summary) one line:
``[k] PASS|FAIL  <name>  <seconds>s  <details>``.
Run standalone with ``python3 tests/test_acceptance.py``.
"""

import functools
import random
import time

import networkx as nx

from cubext.cubes import is_npc, validate
from cubext.fixtures import PATHOLOGIES, PROBLEMS
from cubext.freegrp import (
    CosetProduct,
    Exhausted,
    bounded_identity_search,
    connecting_word,
    double_coset,
    find_separating_quotient,
    horizontal_subgroup,
    in_double_coset,
    separates,
    strictness_products,
)
from cubext.generators import TreeConfig, random_problem, random_square_complex, random_tree_gos
from cubext.gos import assemble, detect_empty_k_corners, horizontal_quotient, is_controlled, realization
from cubext.hyperplanes import is_special, oracle_flags
from cubext.maps import is_automorphism, is_injective, is_local_isometry
from cubext.pipeline import hrushovski, induced_automorphism, induced_cover

from conftest import ACCEPTANCE_LINES
from oracles import reduced_path_labels

SEED = 20240601


def report(k, name, ok, seconds, limit=None, detail=""):
    ok = ok and (limit is None or seconds < limit)
    bound = f"limit {limit}s" if limit is not None else "no time limit"
    line = f"[{k}] {'PASS' if ok else 'FAIL'}  {name}  {seconds:.2f}s ({bound})  {detail}".rstrip()
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0


# 1 ----------------------------------------------------------------------------------------------


def test_1_pathology_catalog():
    seen = {}
    with Timer() as t:
        for name, make in PATHOLOGIES.items():
            rep = is_special(make())
            flags = {k for fl in rep.flags.values() for k, v in fl.items() if v}
            if rep.inter_osculation:
                flags.add("inter_osculating")
            seen[name] = flags
    ok = len(seen) == 4 and all(flags == {name} for name, flags in seen.items())
    assert report(1, "pathology catalog", ok, t.seconds, 1, str({k: sorted(v) for k, v in seen.items()}))


# 2 ----------------------------------------------------------------------------------------------


def test_2_oracle_equivalence():
    rng = random.Random(SEED)
    bad, npc_count, n = [], 0, 200
    with Timer() as t:
        for i in range(n):
            X = random_square_complex(rng)
            assert not validate(X) and len(X.squares) <= 12
            rep = is_special(X, require_npc=False)
            flags, pairs = oracle_flags(X)
            npc = bool(is_npc(X))
            npc_count += npc
            if rep.keyed_flags() != flags or rep.keyed_pairs() != pairs:
                bad.append((i, "specialness"))
            if (not detect_empty_k_corners(X)) != npc:
                bad.append((i, "k-corners"))
    assert report(2, "oracle equivalence", not bad, t.seconds, 30,
                  f"{n} complexes, {npc_count} NPC, mismatches {bad[:3]}")


# 3 ----------------------------------------------------------------------------------------------


def test_3_tree_laws():
    rng = random.Random(SEED)
    n, special_subset, bad = 100, 0, []
    # every other instance may use NPC vertex-spaces that are not special
    configs = (TreeConfig(), TreeConfig(special_only=False))
    with Timer() as t:
        for i in range(n):
            G = random_tree_gos(rng, configs[i % 2])
            assert G.graph.is_tree()
            assert all(is_npc(X) for X in G.vertex_spaces.values())
            for es in G.edge_spaces.values():
                for tau in (es.tau1, es.tau2):
                    assert is_injective(tau) and is_local_isometry(tau)
            T = assemble(G)
            HQ = horizontal_quotient(T)
            if not HQ.strict or not is_npc(HQ.complex):
                bad.append((i, "npc"))
                continue
            if is_controlled(G) and is_special(T.complex).special:
                special_subset += 1
                if not is_special(HQ.complex).special:
                    bad.append((i, "special"))
    ok = not bad and special_subset > 0
    assert report(3, "tree laws", ok, t.seconds, 60,
                  f"{n} trees, controlled-special subset {special_subset}, failures {bad[:3]}")


# 4 ----------------------------------------------------------------------------------------------

# (rank, alternating words and subgroup generators)
SEPARATION_SUITE = {
    "hall": (2, ["", ["a"], "b"]),
    "a2_coset": (1, ["", ["aa"], "a"]),
    "a3_coset": (1, ["", ["aaa"], "a"]),
    "a_ba_b": (2, ["", ["a"], "ba", ["b"], ""]),
    "ab_c": (3, ["", ["a", "b"], "c"]),
    "ab_a_ba": (2, ["", ["ab"], "a", ["ba"], ""]),
    "squares_ab": (2, ["", ["aa", "bb"], "ab"]),
    "conj_b": (2, ["", ["abA"], "b"]),
    "a_b_c": (3, ["", ["a"], "b", ["c"], ""]),
    "commutator_a": (2, ["", ["abAB"], "a"]),
    "a_bab_b": (2, ["", ["a", "baB"], "b"]),
    "three_factor": (3, ["", ["a"], "b", ["c"], "a", ["b"], "c"]),
}


def test_4_separation_suite():
    results, bad = {}, []
    with Timer() as t:
        for name, (rank, items) in SEPARATION_SUITE.items():
            P = CosetProduct.from_json({"items": items})
            # the oracle must first confirm that the identity is not in the product
            assert not bounded_identity_search(P), name
            phi = find_separating_quotient([P], rank, max_degree=8, seconds=10)
            if isinstance(phi, Exhausted) or not separates(phi, P):
                bad.append(name)
                continue
            results[name] = phi.degree
        # strictness products of the graph fixtures, jointly
        for name in ("edge_ab", "path_two_maps", "theta_two_maps"):
            Y, O = PROBLEMS[name]()
            ps = strictness_products(assemble(realization(Y, O)))
            assert not any(bounded_identity_search(P) for P in ps), name
            phi = find_separating_quotient(ps, len(O), max_degree=8, seconds=10)
            if isinstance(phi, Exhausted) or not all(separates(phi, P) for P in ps):
                bad.append(name)
                continue
            results[name] = phi.degree
    ok = not bad and results.get("hall") == 2 and len(results) >= 10
    assert report(4, "separation suite", ok, t.seconds, 10, f"degrees {results}, failed {bad}")


# 5 ----------------------------------------------------------------------------------------------


def test_5_double_coset_law():
    rng = random.Random(SEED)
    L, realizations, pairs, sampled, bad = 5, 0, 0, 0, []
    with Timer() as t:
        while realizations < 50:
            Y, O = random_problem(rng)
            if not O:
                continue
            realizations += 1
            T = assemble(realization(Y, O))
            K = {}
            for Ci in T.complex.vertices:
                labels = reduced_path_labels(T, Ci, L)
                K.setdefault(Ci, horizontal_subgroup(T, Ci))
                for Cj, words in labels.items():
                    K.setdefault(Cj, horizontal_subgroup(T, Cj))
                    w = connecting_word(T, Ci, Cj)
                    pairs += 1
                    if not all(in_double_coset(K[Ci], w, K[Cj], u) for u in words):
                        bad.append((realizations, Ci, Cj, "label outside"))
                    D = double_coset(K[Ci], w, K[Cj])
                    for _ in range(5):
                        u = D.sample(rng)
                        if len(u) <= L:
                            sampled += 1
                            if u not in words:
                                bad.append((realizations, Ci, Cj, "sample missing"))
    assert report(5, "double-coset law", not bad, t.seconds, 30,
                  f"{realizations} realizations, {pairs} pairs, {sampled} short samples, failures {bad[:3]}")


# 6 / 7: end-to-end runs, shared with 8 ------------------------------------------------------------

NPC_GRAPH_PROBLEMS = ("cycle4_rotation", "path_two_maps", "triangle_flip", "theta_two_maps")


@functools.lru_cache(maxsize=None)
def run(name, target):
    Y, O = PROBLEMS[name]()
    with Timer() as t:
        cert, trace = hrushovski(Y, O, target)
    return Y, O, cert, trace, t.seconds


def nx_graph(X):
    g = nx.MultiGraph()
    g.add_nodes_from(X.vertices)
    g.add_edges_from(X.ends(e) for e in X.edges)
    return g


def test_6_npc_end_to_end():
    Y, O, cert, _, secs = run("edge_ab", "npc")
    details = []
    ok = cert is not None and cert.ok and secs < 60
    if ok:
        R, Phi, iota = cert.R, cert.automorphisms[0], cert.iota
        ok &= nx.is_isomorphic(nx_graph(R), nx.cycle_graph(3)) and R.dim == 1
        ok &= Phi.cells[iota.cells["a"][0]][0] == iota.cells["b"][0]
        # a rotation: fixed-point free on vertices, order 3
        ok &= all(Phi.cells[v][0] != v for v in R.vertices)
        ok &= all(Phi.cells[Phi.cells[Phi.cells[v][0]][0]][0] == v for v in R.vertices)
    details.append(f"edge_ab {secs:.2f}s")
    worst = secs
    for name in NPC_GRAPH_PROBLEMS:
        Y, O, cert, _, secs = run(name, "npc")
        assert Y.dim == 1 and len(Y.vertices) <= 6 and len(O) <= 2
        ok &= cert is not None and cert.ok and secs < 60
        worst = max(worst, secs)
        details.append(f"{name} R={cert.R.counts() if cert else None} {secs:.2f}s")
    assert report(6, "NPC end-to-end", ok, worst, 60, "; ".join(details))


def test_7_special_end_to_end():
    Y, O, cert, trace, secs = run("square_translation", "special")
    need = ("quotient_special", "two_sided", "iota_locally_convex", "extension[0]", "quotient_npc")
    entries = {e.name: e.ok for e in cert.full_ledger.entries} if cert else {}
    ok = Y.dim == 2 and cert is not None and cert.ok and all(entries.get(k) for k in need)
    assert report(7, "special end-to-end", ok, secs, 300,
                  f"R={cert.R.counts() if cert else None}, ledger {[k for k in need if entries.get(k)]}")


# 8 ----------------------------------------------------------------------------------------------


def head(g, n):
    from cubext.symmetry import Sym

    return Sym(g.perm[:n], g.flip[:n])


def descent_mismatches(cover, j):
    """Cells x of the cover where q(Phi(x)) and Phi^E(q(x)) differ, Phi^E read off the 0-cube copy."""
    HQ = horizontal_quotient(cover.total)
    T, X = HQ.T, cover.total.complex
    Phi = induced_automorphism(cover, j)
    # Phi^E on each quotient cell, from any representative
    PhiE = {}
    for x in X.cells():
        if T.is_vertical(x):
            r, m = HQ.q[x]
            d, g = Phi.cells[x]
            a, ma = HQ.q[d]
            PhiE.setdefault(r, (a, ma * g * m.inverse()))
    bad = []
    for x in X.cells():
        d, g = Phi.cells[x]
        a, ma = HQ.q[d]
        n = ma.dim
        lhs = (a, ma * (g if T.is_vertical(x) else head(g, n)))
        b, mb = HQ.q[x]
        e, h = PhiE[b]
        if lhs != (e, h * mb):
            bad.append(x)
    return bad


def test_8_descent_exactness():
    runs = [("edge_ab", "npc")] + [(n, "npc") for n in NPC_GRAPH_PROBLEMS] + [("square_translation", "special")]
    checked, bad = 0, []
    with Timer() as t:
        for name, target in runs:
            Y, O, cert, _, _ = run(name, target)
            if cert is None:
                bad.append((name, "no certificate"))
                continue
            cover = induced_cover(realization(Y, O), cert.phi)
            for j in range(len(O)):
                assert is_automorphism(induced_automorphism(cover, j))
                miss = descent_mismatches(cover, j)
                checked += len(cover.total.complex.cells())
                if miss:
                    bad.append((name, j, miss[:3]))
    assert report(8, "descent exactness", not bad, t.seconds, None,
                  f"{len(runs)} accepted covers, {checked} cells checked, mismatches {bad[:3]}")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
