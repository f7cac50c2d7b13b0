"""Table of the 2x2 first-variable counterexample across n.

For each n: closed-form error of A_n^(1/2), the vertex t*, the discriminant
8 a p, and the margin <(diag(a,0) - A_n o B) x, x> at the violating probe,
for a = 1 - 1/n.  Also shows where the naive p = 1 - 1/n - sqrt(1 - 2/n)
loses precision.
"""

import numpy as np

from effectseq.effects import Effect, seq_product
from effectseq.matcore import psd_sqrt, quad_form
from effectseq.scenarios import COUNTEREXAMPLE_B, QuadraticWitness, counterexample_An, find_violating_probe


def main():
    B = Effect(COUNTEREXAMPLE_B)
    print(f"{'n':>8} {'sqrt err':>10} {'t*':>12} {'delta':>12} {'margin':>12} {'naive p rel err':>16}")
    for n in (3, 4, 10, 100, 1000, 10**4, 10**6, 10**8):
        a = 1 - 1 / n
        w = QuadraticWitness(n, a)
        naive = QuadraticWitness(n, a, stable=False)
        x = find_violating_probe(n, a)
        if n <= 10**4:
            An = counterexample_An(n)
            err = np.abs(psd_sqrt(An.matrix) - w.sqrt_closed()).max()
            margin = quad_form(np.diag([a, 0.0]) - seq_product(An, B).matrix, x).real
        else:
            # kernel margins drown in rounding here; use the closed form
            err, margin = float("nan"), w.margin(x)
        print(f"{n:>8} {err:>10.2e} {w.vertex:>12.5e} {w.delta:>12.5e} {margin:>12.5e} {abs(naive.p - w.p) / w.p:>16.2e}")


if __name__ == "__main__":
    main()
