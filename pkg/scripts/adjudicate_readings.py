"""Compare the corrected and typeset variants of every formula that has more than one reading.

Prints the worst residual of each reading over random chains, so a reader can
see which variant holds and where the others break.
"""

import argparse

import numpy as np

from ikchain import basis, bethe, hilbert
from ikchain.kernel import random_params, sample_box


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--draws", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)

    rows = []
    for n_sites in (1, 2, 3):
        exch = {"corrected": 0.0, "printed": 0.0}
        b2 = {r: 0.0 for r in basis.B2_READINGS}
        f2 = {"corrected": 0.0, "printed": 0.0}
        for _ in range(args.draws):
            p = random_params(rng, n_sites)
            u, v = sample_box(rng, 2)
            for reading in exch:
                exch[reading] = max(exch[reading], max(r for _, r in hilbert.check_exchange_relations(u, v, p, reading)))
            for label in basis.enumerate_labels(p):
                if label.m <= 2:
                    for reading in b2:
                        b2[reading] = max(b2[reading], basis.formula_residual(label, u, "B2", p, reading))
            us = tuple(sample_box(rng, 2))
            for label in basis.enumerate_labels(p):
                if label.weight == 2:
                    fd = bethe.f_direct(label, us, p)
                    for reading in f2:
                        f2[reading] = max(f2[reading], abs(bethe.f_explicit(label, us, p, reading) - fd) / abs(fd))
        rows.append((n_sites, exch, b2, f2))

    for n_sites, exch, b2, f2 in rows:
        print(f"N={n_sites}")
        print("  exchange   " + "  ".join(f"{k}={v:.2e}" for k, v in exch.items()))
        print("  B2 action  " + "  ".join(f"{k}={v:.2e}" for k, v in b2.items()))
        print("  two-root F " + "  ".join(f"{k}={v:.2e}" for k, v in f2.items()))


if __name__ == "__main__":
    main()
