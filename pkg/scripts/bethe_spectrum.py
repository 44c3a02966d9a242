"""Solve the Bethe equations from many starts and match the eigenvalues against exact diagonalization.

For each distinct converged root set, prints the roots, the Bethe-equation
residual, the eigenvector residual and the distance to the nearest eigenvalue
of t(u) at a probe point.
"""

import argparse

import numpy as np

from ikchain import bethe
from ikchain.errors import NoConvergence
from ikchain.kernel import ModelParams, sample_box


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-sites", type=int, default=2)
    parser.add_argument("--roots", type=int, default=1)
    parser.add_argument("--eta", type=complex, default=0.3 + 0.1j)
    parser.add_argument("--starts", type=int, default=60)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = np.random.default_rng(args.seed)
    theta = tuple(0.3 * sample_box(rng, args.n_sites))
    p = ModelParams(args.eta, args.n_sites, theta)
    probe = [0.2 + 0.1j, -0.4 + 0.3j, 0.7 - 0.2j]

    found: list[bethe.BetheRoots] = []
    for _ in range(args.starts):
        guess = list(1.5 * sample_box(rng, args.roots))
        try:
            roots = bethe.solve_bae(args.roots, [guess], p)
            # the equations are 2 pi i periodic in each root
            roots = bethe.BetheRoots(tuple(z - 2j * np.pi * round(z.imag / (2 * np.pi)) for z in roots.u)).canonical()
        except (NoConvergence, ArithmeticError, ValueError):
            continue
        if any(np.allclose(roots.u, r.u, atol=1e-8) for r in found):
            continue
        found.append(roots)

    print(f"N={args.n_sites}, n={args.roots}, theta={np.round(theta, 4)}")
    for roots in found:
        bae = float(np.abs(bethe.bae_residual(roots, p)).max())
        try:
            eig = bethe.on_shell_check(roots, p, probe)
            dist = bethe.spectrum_distance(bethe.transfer_eigenvalue(roots, probe[0], p), probe[0], p)
        except (ArithmeticError, ValueError) as exc:
            print(f"  {np.round(roots.u, 6)}  BAE {bae:.1e}  state unusable: {exc}")
            continue
        print(f"  {np.round(roots.u, 6)}  BAE {bae:.1e}  eigen {eig:.1e}  spectrum {dist:.1e}")


if __name__ == "__main__":
    main()
