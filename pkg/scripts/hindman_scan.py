"""Exhaustive 2-coloring scan for {x, y, x+y, xy} over [1..N], both quadruple conventions."""
import argparse

from randfs.color import exhaustive_2coloring_scan


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=30)
    args = ap.parse_args()
    print(f"{'N':>3}  {'lenient':>8} {'nodes':>6}  {'strict':>8} {'nodes':>6}  avoiding coloring (lenient)")
    for N in range(1, args.max_n + 1):
        a = exhaustive_2coloring_scan(N)
        b = exhaustive_2coloring_scan(N, strict=True)
        tag = lambda r: "forced" if r.forced else "avoid"
        line = a.witness.to_line() if a.witness is not None else ""
        print(f"{N:>3}  {tag(a):>8} {a.nodes:>6}  {tag(b):>8} {b.nodes:>6}  {line}")


if __name__ == "__main__":
    main()
