"""Evaluate sum_x xi^(-x(x-m)) over x in Z_{m^2} for every primitive 2m^2-th root xi."""

import sys
from math import gcd

from smlab.cyclo import gauss_sum, root_of_unity


def main(ms: list[int]) -> None:
    for m in ms:
        n = 2 * m * m
        vals = {gauss_sum(m, root_of_unity(n, e)) for e in range(n) if gcd(e, n) == 1}
        print(f"m={m}: {len(vals)} distinct value(s): {sorted(map(repr, vals))}")


if __name__ == "__main__":
    main([int(a) for a in sys.argv[1:]] or [2, 4, 6, 8])
