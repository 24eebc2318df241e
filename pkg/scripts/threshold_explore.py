"""Exploratory threshold sweep: p at which an FS witness of length L appears in [1..N] half the time.

No ground truth is known for L >= 2; for L = 1 the closed form 1 - 2**(-1/N) is printed alongside.
"""
import argparse

from randfs.stats import threshold_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-L", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("-N", type=int, nargs="+", default=[100, 300, 1000])
    ap.add_argument("--trials", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print(f"{'L':>2} {'N':>6} {'p_lo':>9} {'p_hi':>9} {'closed form':>12}")
    for L in args.L:
        for N in args.N:
            res = threshold_sweep(L, N, trials_per_p=args.trials, seed_base=args.seed, tol=0.002)
            exact = f"{1 - 2 ** (-1 / N):.6f}" if L == 1 else "-"
            print(f"{L:>2} {N:>6} {res.lo:9.5f} {res.hi:9.5f} {exact:>12}")


if __name__ == "__main__":
    main()
