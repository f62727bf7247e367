"""Write the fixture directory: complexes, problems, products and a quotient, as JSON.

    python3 scripts/make_fixtures.py [outdir]
"""

import sys
from pathlib import Path

from cubext import io
from cubext.fixtures import NAMED, PATHOLOGIES, PROBLEMS, strip
from cubext.freegrp import CosetProduct, FiniteQuotient, strictness_products
from cubext.gos import assemble, realization


def main(out: Path) -> None:
    (out / "pathologies").mkdir(parents=True, exist_ok=True)
    (out / "complexes").mkdir(exist_ok=True)
    (out / "problems").mkdir(exist_ok=True)
    (out / "search").mkdir(exist_ok=True)
    for name, make in PATHOLOGIES.items():
        io.dump(io.complex_to_json(make()), out / "pathologies" / f"{name}.json")
    for name, make in NAMED.items():
        io.dump(io.complex_to_json(make()), out / "complexes" / f"{name}.json")
    for n in (1, 3):
        io.dump(io.complex_to_json(strip(n)), out / "complexes" / f"strip{n}.json")
    for name, make in PROBLEMS.items():
        Y, O = make()
        io.dump(io.problem_to_json(Y, O), out / "problems" / f"{name}.json")
        io.dump(io.gos_to_json(realization(Y, O)), out / "problems" / f"{name}.gos.json")
    hall = CosetProduct.from_json({"items": ["", ["a"], "b"]})
    io.dump(hall.to_json(), out / "search" / "hall.product.json")
    Y, O = PROBLEMS["edge_ab"]()
    ps = strictness_products(assemble(realization(Y, O)))
    io.dump({"products": [p.to_json() for p in ps]}, out / "search" / "edge_ab.products.json")
    io.dump(FiniteQuotient(1, 3, ((1, 2, 0),), "C3").to_json(), out / "search" / "z3.quotient.json")
    print(f"wrote {sum(1 for _ in out.rglob('*.json'))} files under {out}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures")
