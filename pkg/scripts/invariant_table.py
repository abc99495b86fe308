"""Print the invariant table for the two Hadamard-based model families.

    python scripts/invariant_table.py --m 2 4 --r 1 2 4 8
"""

import argparse

from smlab.invariants import format_table1, table1


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, nargs="+", default=[2, 4])
    parser.add_argument("--r", type=int, nargs="+", default=[1, 2, 4, 8])
    parser.add_argument("--b", type=int, nargs="+", default=[1, 2], help="exponents of b for W'")
    args = parser.parse_args()
    rows = table1(args.m, args.r, b_exps=tuple(args.b))
    print(format_table1(rows))
    bad = [r for r in rows if not all(v for k, v in r["expected"].items() if k.endswith("_ok"))]
    print(f"\n{len(rows) - len(bad)}/{len(rows)} rows match the expected pattern")


if __name__ == "__main__":
    main()
