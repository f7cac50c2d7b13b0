"""Axiom residuals per dimension.

    python scripts/axiom_sweep.py --trials 200
"""

import argparse

from effectseq.effects import AXIOMS, check_axioms


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--max-dim", type=int, default=8)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    print("dim " + " ".join(f"{a:>9}" for a in AXIOMS))
    for d in range(1, args.max_dim + 1):
        reps = check_axioms(dims=[d], trials=args.trials, seed=args.seed)
        cells = [f"{r.max_residual:9.1e}" if r.passed else f"{'FAIL':>9}" for r in reps]
        print(f"{d:>3} " + " ".join(cells))


if __name__ == "__main__":
    main()
