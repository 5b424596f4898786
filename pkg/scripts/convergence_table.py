"""Relative error against the closed form as the grid is refined.

Prints one row per (family, points per dimension) for a fixed parameter
draw, which shows the geometric convergence of the trapezoidal rule on the
torus, segment and line contours.

    python scripts/convergence_table.py [--seed 0] [--n 1]
"""

import argparse

from ellbeta.identities import sample_params
from ellbeta.integrals import integrate, qreduced_integrate, rhs_closed_form, segment_integrate
from ellbeta.kernels.params import Family, ModifiedParams, QReducedParams
from ellbeta.quadrature import GridOptions
from ellbeta.special import BaseSet, OmegaTriple

PHI = (1 + 5**0.5) / 2
WHERE = {
    Family.UNIVARIATE: BaseSet(0.3, 0.2),
    Family.CN: BaseSet(0.3, 0.2),
    Family.AN: BaseSet(0.3, 0.2),
    Family.CN_UNIT: OmegaTriple(1, PHI, 3j),
    Family.CN_Q: OmegaTriple(1, 1 - 0.4j, 5j),
}


def value(par, where, N):
    opt = GridOptions(initial_points=N, max_points=N)
    if isinstance(par, ModifiedParams):
        return segment_integrate(par, opt).value
    if isinstance(par, QReducedParams):
        return qreduced_integrate(par, opt).value
    return integrate(par, where, opt).value


def main():
    ap = argparse.ArgumentParser(description="grid refinement table")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=1)
    args = ap.parse_args()
    print(f"{'family':<12}{'N':>6}{'rel_err':>12}")
    for fam, where in WHERE.items():
        par = sample_params(fam, where, args.seed, n=args.n)
        rhs = rhs_closed_form(par, None if isinstance(where, OmegaTriple) else where)
        for N in (16, 32, 64, 128, 256):
            v = value(par, where, N)
            print(f"{fam.value:<12}{N:>6}{abs(v / rhs - 1):>12.2e}")


if __name__ == "__main__":
    main()
