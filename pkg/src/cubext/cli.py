"""Command-line interface.

Exit codes: 0 pass, 1 property fails (witness in the report), 2 input error,
3 search budget exhausted.  Reports go to stdout (or ``--out``) as JSON;
diagnostics go to stderr.  Inputs are JSON files or ``fixture:NAME``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Tuple

from . import io
from .cubes import CubeComplex, CubeError, is_npc, is_simple, link, validate
from .fixtures import NAMED, PROBLEMS
from .freegrp import Exhausted, find_separating_quotient
from .gos import (
    GraphOfSpaces,
    assemble,
    detect_empty_k_corners,
    horizontal_graph,
    horizontal_quotient,
    is_controlled,
    realization,
)
from .hyperplanes import build_midcube_complex, carrier, hyperplanes, is_special, two_sidedness
from .maps import PartialLocalIsometry, validate_partial_local_isometry
from .pipeline import Budget, hrushovski, induced_cover, search_cover, verify_cover

log = logging.getLogger("cubext")

PASS, FAIL, INPUT_ERROR, EXHAUSTED = 0, 1, 2, 3


class InputError(Exception):
    pass


# inputs ------------------------------------------------------------------------------------


def _fixture(arg: str, table: Dict[str, Callable]):
    name = arg.split(":", 1)[1]
    if name not in table:
        raise InputError(f"unknown fixture {name!r}; choose from {sorted(table)}")
    return table[name]()


def load_complex(arg: str) -> CubeComplex:
    if arg.startswith("fixture:"):
        return _fixture(arg, NAMED)
    d = io.load(arg)
    if d.get("schema") == "problem.v1":
        return io.complex_from_json(d["Y"])
    if d.get("schema") == "certificate.v1":
        return io.complex_from_json(d["R"])
    return io.complex_from_json(d)


def load_problem(arg: str) -> Tuple[CubeComplex, List[PartialLocalIsometry]]:
    if arg.startswith("fixture:"):
        return _fixture(arg, PROBLEMS)
    return io.problem_from_json(io.load(arg))


def load_gos(arg: str) -> GraphOfSpaces:
    """A gos.v1 file, or a problem whose realization is taken."""
    if not arg.startswith("fixture:"):
        d = io.load(arg)
        if d.get("schema") == "gos.v1":
            return io.gos_from_json(d)
        Y, O = io.problem_from_json(d)
    else:
        Y, O = load_problem(arg)
    return realization(Y, O)


def _budget(a) -> Budget:
    return Budget(max_degree=a.budget_degree, seconds=a.budget_seconds, seed=a.seed, jobs=a.jobs)


# commands ----------------------------------------------------------------------------------
# each returns (report, exit code)


def cmd_validate(a):
    X = load_complex(a.input)
    vs = validate(X)
    return {"valid": not vs, "violations": [v.to_json() for v in vs], "counts": list(X.counts())}, FAIL if vs else PASS


def cmd_links(a):
    X = load_complex(a.input)
    cells = a.cell or [c for c in X.cells() if X.dim_of(c) <= 2]
    out = {}
    for c in cells:
        if c not in X:
            raise InputError(f"unknown cell {c}")
        L = link(X, c)
        out[c] = {**L.to_json(), "simplicial": L.simplicial}
    return {"links": out}, PASS


def cmd_npc(a):
    X = load_complex(a.input)
    simple = is_simple(X)
    v = is_npc(X)
    corners = detect_empty_k_corners(X)
    rep = {"npc": v.ok, "simple": simple.ok, "witness": v.witness, "empty_k_corners": corners,
           "cross_check": (not corners) == v.ok}
    return rep, PASS if v.ok else FAIL


def cmd_special(a):
    X = load_complex(a.input)
    rep = is_special(X)
    return rep.to_json(), PASS if rep.special else FAIL


def cmd_hyperplanes(a):
    X = load_complex(a.input)
    M = build_midcube_complex(X)
    out = []
    for H in hyperplanes(X, M):
        out.append({"id": H.id, "dual_edges": list(H.dual_edges), "carrier": list(H.carrier_cells),
                    **two_sidedness(H, M)})
    return {"hyperplanes": out}, PASS


def cmd_localiso(a):
    Y, O = load_problem(a.input)
    maps = []
    ok = True
    for j, P in enumerate(O):
        checks = validate_partial_local_isometry(P)
        good = all(checks.values())
        ok &= good
        maps.append({"map": P.name or j, "valid": good, "checks": {k: v.to_json() for k, v in checks.items()}})
    return {"maps": maps, "valid": ok}, PASS if ok else FAIL


def cmd_realize(a):
    G = load_gos(a.input)
    T = assemble(G)
    return {**io.gos_to_json(G), "total_space": io.complex_to_json(T.complex)}, PASS


def cmd_hquotient(a):
    G = load_gos(a.input)
    T = assemble(G)
    HQ = horizontal_quotient(T)
    rep = {"strict": HQ.strict, "witness": HQ.witness}
    if HQ.strict:
        rep["quotient"] = io.complex_to_json(HQ.complex)
        rep["q"] = {c: {"image": d, "sym": g.index} for c, (d, g) in sorted(HQ.q.items())}
    if a.cell:
        rep["horizontal_graph"] = horizontal_graph(T, a.cell).to_json()
    return rep, PASS if HQ.strict else FAIL


def cmd_controlled(a):
    G = load_gos(a.input)
    v = is_controlled(G)
    return {"controlled": v.ok, "witness": v.witness}, PASS if v.ok else FAIL


def cmd_separate(a):
    products = io.products_from_json(io.load(a.input))
    phi = find_separating_quotient(products, a.rank, a.budget_degree, a.budget_seconds, a.seed)
    if isinstance(phi, Exhausted):
        return phi.to_json(), EXHAUSTED
    return phi.to_json(), PASS


def cmd_cover(a):
    Y, O = load_problem(a.input)
    G = realization(Y, O)
    if a.quotient:
        phi = io.quotient_from_json(io.load(a.quotient))
        ledger, cert = verify_cover(induced_cover(G, phi), a.target, O=O)
        rep = {"quotient": phi.to_json(), "ledger": ledger.to_json(), "passed": ledger.passed}
        return rep, PASS if ledger.passed else FAIL
    cert, trace = search_cover(G, a.target, _budget(a), O)
    if cert is None:
        return {"trace": trace}, FAIL if "precondition" in trace else EXHAUSTED
    return {"quotient": cert.phi.to_json(), "ledger": cert.full_ledger.to_json(), "passed": cert.ok,
            "trace": trace}, PASS


def cmd_hrushovski(a):
    Y, O = load_problem(a.input)
    cert, trace = hrushovski(Y, O, a.target, _budget(a), prune=a.prune)
    if cert is None:
        code = FAIL if "precondition" in trace else EXHAUSTED
        return {"schema": "certificate.v1", "passed": False, "trace": trace}, code
    return {**cert.to_json(), "trace": trace}, PASS if cert.ok else FAIL


def cmd_export_dot(a):
    if a.gos:
        G = load_gos(a.input)
        if a.horizontal:
            return io.horizontal_graph_dot(horizontal_graph(assemble(G), a.horizontal)), PASS
        return io.ugraph_dot(G.graph), PASS
    X = load_complex(a.input)
    if a.link:
        if a.link not in X:
            raise InputError(f"unknown cell {a.link}")
        return io.link_dot(link(X, a.link), f"link {a.link}"), PASS
    if a.hyperplane:
        hs = {H.id: H for H in hyperplanes(X)}
        if a.hyperplane not in hs:
            raise InputError(f"unknown hyperplane {a.hyperplane}; have {sorted(hs)}")
        H = hs[a.hyperplane]
        return io.carrier_dot(X, H.carrier_cells, H.dual_edges, f"carrier {H.id}"), PASS
    return io.complex_dot(X), PASS


COMMANDS = {
    "validate": (cmd_validate, "structural invariants of a cube complex"),
    "links": (cmd_links, "links of cells"),
    "npc": (cmd_npc, "nonpositive curvature with k-corner cross-check"),
    "special": (cmd_special, "specialness report"),
    "hyperplanes": (cmd_hyperplanes, "hyperplanes, dual edges, carriers, sidedness"),
    "localiso": (cmd_localiso, "validate partial local isometries of a problem"),
    "realize": (cmd_realize, "realization graph of spaces and its total space"),
    "hquotient": (cmd_hquotient, "horizontal quotient and strictness"),
    "controlled": (cmd_controlled, "controlled-ness of a graph of spaces"),
    "separate": (cmd_separate, "search a finite quotient separating coset products"),
    "cover": (cmd_cover, "verify a given cover or search for one"),
    "hrushovski": (cmd_hrushovski, "build R with extending automorphisms and a certificate"),
    "export-dot": (cmd_export_dot, "DOT export of 1-skeletons, links, carriers, graphs"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubext", description="Cube complex checks and finite extensions of partial maps.",
                                epilog="exit codes: 0 pass, 1 fails with witness, 2 input error, 3 budget exhausted")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("input", help="JSON file or fixture:NAME")
        s.add_argument("--out", help="write the report here instead of stdout")
        if name in ("separate", "cover", "hrushovski"):
            s.add_argument("--budget-degree", type=int, default=8)
            s.add_argument("--budget-seconds", type=float, default=60.0)
            s.add_argument("--seed", type=int, default=0)
            s.add_argument("--jobs", type=int, default=1)
        if name in ("cover", "hrushovski"):
            s.add_argument("--target", choices=["npc", "special"], default="npc")
        if name == "separate":
            s.add_argument("--rank", type=int, default=None)
        if name == "cover":
            s.add_argument("--quotient", help="quotient.v1 file to verify instead of searching")
        if name == "hrushovski":
            s.add_argument("--prune", action="store_true", help="drop maps that restrict another map")
        if name == "links":
            s.add_argument("--cell", action="append", help="cell id (repeatable); default all")
        if name == "hquotient":
            s.add_argument("--cell", help="also report the horizontal graph of this 0-cube")
        if name == "export-dot":
            s.add_argument("--link", help="export the link of this cell")
            s.add_argument("--hyperplane", help="export the carrier of this hyperplane (e.g. H0)")
            s.add_argument("--gos", action="store_true", help="input is a graph of spaces or problem")
            s.add_argument("--horizontal", help="with --gos: horizontal graph of this total-space 0-cube")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    fn = COMMANDS[args.command][0]
    try:
        report, code = fn(args)
    except (InputError, io.SchemaError, CubeError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    if isinstance(report, str):
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(report)
        else:
            sys.stdout.write(report)
    else:
        report.setdefault("command", args.command)
        io.dump(report, args.out)
    if code != PASS:
        print(f"{args.command}: exit {code}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
