"""Build and verify a nested neighborhood tower, then test the epsilon bound.

Walks through the whole pipeline for one (moduli, winding, epsilon)
triple: parameter selection, level construction, per-level verification,
a coherent sample of deep points, and the exact distance bound against
the delta-dense base sample.  Optionally writes every level as CSV.

Usage:
    python3 scripts/tower_demo.py --moduli 2,3 --winding 1,1 --epsilon 1/2
    python3 scripts/tower_demo.py --moduli 2,3 --winding 2,3 --epsilon 1/4 \
        --csv-dir out/
"""

import argparse
import os

from fupcon.exact_arith import Moduli, format_rational, parse_rational
from fupcon.lifting import PLLoop
from fupcon.torus import write_segment_set_csv
from fupcon.tower import (
    build_tower,
    choose_params,
    coherent_base_sample,
    coherent_deep_sample,
    epsilon_bound_check,
    verify_tower,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--moduli", default="2,3")
    parser.add_argument("--winding", default="1,1")
    parser.add_argument("--epsilon", default="1/2")
    parser.add_argument("--depth", type=int, default=2)
    parser.add_argument("--candidates", type=int, default=20)
    parser.add_argument("--csv-dir", default=None)
    args = parser.parse_args()

    moduli = Moduli(tuple(int(v) for v in args.moduli.split(",")))
    s = tuple(int(v) for v in args.winding.split(","))
    epsilon = parse_rational(args.epsilon)

    params = choose_params(epsilon, moduli, s, depth=args.depth)
    print(f"epsilon  {format_rational(params.epsilon)}")
    print(f"n0       {params.n0}   (2^-n0 below epsilon/2)")
    print(f"delta    {format_rational(params.delta)}")
    print(f"n1       {params.n1}   (valuation {params.valuation},"
          f" minimal {params.minimal})")
    print(f"depth    {params.depth}   -> {params.levels_total} levels")

    tower = build_tower(PLLoop.straight(s), params, moduli)
    report = verify_tower(tower)
    print("\nlevel  role      segs  comps  base  bond  fwd-eq")
    for c in report.checks:
        bond = "-" if c.bonding_into_previous is None else str(c.bonding_into_previous)
        fwd = "-" if c.forward_equality is None else str(c.forward_equality)
        print(f"{c.index:>5}  {c.role:<8}  {c.segment_count:>4}  "
              f"{c.component_count:>5}  {str(c.contains_base):<5} {bond:<5} {fwd}")
    print(f"\nall level checks: {'ok' if report.all_ok else 'FAILED'}")

    bases = coherent_base_sample(tower)
    cands = coherent_deep_sample(tower, args.candidates)
    res = epsilon_bound_check(tower, bases, cands)
    print(f"base sample size {len(bases)}, deep candidates {res.candidates}")
    print(f"matched within delta at the base stage: {res.matched}")
    if res.max_distance is not None:
        print(f"max distance          {format_rational(res.max_distance)}")
        print(f"max distance + tail   {format_rational(res.max_distance_with_tail)}")
        print(f"epsilon               {format_rational(params.epsilon)}")
    print(f"epsilon bound: {'ok' if res.ok else 'FAILED'}")

    if args.csv_dir:
        os.makedirs(args.csv_dir, exist_ok=True)
        for idx, lvl in enumerate(tower.levels, start=1):
            path = os.path.join(args.csv_dir, f"tower_level_{idx:02d}.csv")
            write_segment_set_csv(lvl, path)
        print(f"\nwrote {len(tower.levels)} level files to {args.csv_dir}")


if __name__ == "__main__":
    main()
