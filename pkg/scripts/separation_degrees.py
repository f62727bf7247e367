"""Smallest separating degree for random double cosets K1 w K2 in free groups.

    python3 scripts/separation_degrees.py --n 200 --rank 2 --max-len 4

Products containing the identity (by the bounded normal-form search) are
skipped.  Prints a histogram of the degree found, and how many exhausted the
degree budget.
"""

import argparse
import random
from collections import Counter

from cubext.freegrp import (
    CosetProduct,
    Exhausted,
    bounded_identity_search,
    find_separating_quotient,
    reduce,
    stallings,
)


def random_word(rng, rank, max_len):
    return reduce(tuple(rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(rng.randint(1, max_len))))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--max-len", type=int, default=4)
    p.add_argument("--max-degree", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    rng = random.Random(a.seed)
    hist, skipped = Counter(), 0
    for _ in range(a.n):
        subs = [stallings([random_word(rng, a.rank, a.max_len) for _ in range(rng.randint(0, 2))]) for _ in range(2)]
        P = CosetProduct([(), random_word(rng, a.rank, a.max_len), ()], subs)
        if bounded_identity_search(P):
            skipped += 1
            continue
        phi = find_separating_quotient([P], a.rank, a.max_degree, seconds=10, seed=a.seed)
        hist["exhausted" if isinstance(phi, Exhausted) else phi.degree] += 1
    print(f"rank {a.rank}, words up to length {a.max_len}: {a.n - skipped} products, {skipped} contain 1")
    for k in sorted(hist, key=str):
        print(f"  degree {k}: {hist[k]}")


if __name__ == "__main__":
    main()
