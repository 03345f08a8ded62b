"""Survey hitting stages over a grid of windings for a fixed moduli set.

For each winding with entries in [-bound, bound] (zeros excluded) the
script reports the least stage at which the lift hits the whole base
fiber, the closed-form valuation stage when the clean m-adic split
exists, and whether the sweep check agrees with the divisibility test
at the stages around the transition.

Usage:
    python3 scripts/level_survey.py --moduli 2,3 --bound 6
"""

import argparse
import itertools

from fupcon.exact_arith import Moduli, NoDecomposition
from fupcon.hitting import (
    SizeGuardExceeded,
    hitting_check,
    level_condition,
    minimal_level,
    valuation_level,
)


def survey(moduli: Moduli, bound: int, size_guard: int):
    rows = []
    entries = [v for v in range(-bound, bound + 1) if v != 0]
    for s in itertools.product(*[entries] * moduli.r):
        mini = minimal_level(s, moduli)
        try:
            val = valuation_level(s, moduli)
        except NoDecomposition:
            val = None
        agree = True
        for n in range(mini + 2):
            try:
                if hitting_check(s, moduli, n, size_guard) is not level_condition(
                    s, moduli, n
                ):
                    agree = False
            except SizeGuardExceeded:
                break
        rows.append((s, mini, val, agree))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--moduli", default="2,3")
    parser.add_argument("--bound", type=int, default=6)
    parser.add_argument("--size-guard", type=int, default=10**6)
    args = parser.parse_args()

    moduli = Moduli(tuple(int(v) for v in args.moduli.split(",")))
    rows = survey(moduli, args.bound, args.size_guard)

    print(f"moduli {tuple(moduli)}  windings {len(rows)}")
    print(f"{'winding':>16}  {'minimal':>7}  {'valuation':>9}  agree")
    for s, mini, val, agree in rows:
        val_text = "-" if val is None else str(val)
        print(f"{str(s):>16}  {mini:>7}  {val_text:>9}  {agree}")

    by_level = {}
    for _, mini, _, _ in rows:
        by_level[mini] = by_level.get(mini, 0) + 1
    print("\nminimal stage histogram:")
    for level in sorted(by_level):
        print(f"  stage {level}: {by_level[level]}")
    disagreements = [r for r in rows if not r[3]]
    print(f"\nsweep/divisibility disagreements: {len(disagreements)}")


if __name__ == "__main__":
    main()
