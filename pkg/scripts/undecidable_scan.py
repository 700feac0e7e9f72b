"""List every undecidable monotonicity profile in a range of block orders."""

import argparse

from slldecomp.theory import scan_undecidable


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k-min", type=int, default=3)
    parser.add_argument("--k-max", type=int, default=40)
    parser.add_argument("--n-max", type=int, default=4)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args()

    hits = scan_undecidable(range(args.k_min, args.k_max + 1), args.n_max, workers=args.workers)
    for profile, dist in hits:
        kind = "uniform" if dist.q1 == dist.q2 == dist.q3 else f"({dist.q1}, {dist.q2}, {dist.q2}, {dist.q3})"
        print(f"{profile.label:<40} {kind}")
    print(f"{len(hits)} profiles")


if __name__ == "__main__":
    main()
