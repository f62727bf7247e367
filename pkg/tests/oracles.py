"""Independent brute-force oracles shared by the tests and the acceptance suite."""

from cubext.gos import horizontal_edges


def reduced_path_labels(T, start, max_len):
    """Labels of non-backtracking horizontal paths from ``start`` with length <= max_len."""
    idx = {e: j for j, e in enumerate(T.gos.graph.edges, 1)}
    steps = {}
    for h, (a, b, (e, _)) in horizontal_edges(T).items():
        steps.setdefault(a, []).append((h, idx[e], b))
        steps.setdefault(b, []).append((h, -idx[e], a))
    out = {}
    frontier = [(start, (), None)]
    for _ in range(max_len + 1):
        nxt = []
        for v, w, last in frontier:
            out.setdefault(v, set()).add(w)
            for h, k, u in steps.get(v, ()):
                if h == last and w and w[-1] == -k:
                    continue
                nxt.append((u, w + (k,), h))
        frontier = nxt
    return out
