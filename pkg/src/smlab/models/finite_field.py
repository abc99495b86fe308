"""Small finite fields GF(p^k), elements encoded as integers in base p."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import sympy


def prime_power(q: int) -> tuple[int, int] | None:
    """(p, k) with q = p^k, or None."""
    if q < 2:
        return None
    f = sympy.factorint(q)
    if len(f) != 1:
        return None
    (p, k), = f.items()
    return int(p), int(k)


@lru_cache(maxsize=None)
def _irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree k over GF(p), low degree first."""
    x = sympy.Symbol("x")
    for tail in product(range(p), repeat=k):
        coeffs = list(tail) + [1]
        if coeffs[0] == 0 and k > 1:
            continue
        poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
        if poly.is_irreducible:
            return tuple(coeffs)
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")


class GF:
    """GF(q) with add/mul tables; element e <-> polynomial with base-p digits of e."""

    def __init__(self, q: int):
        pk = prime_power(q)
        if pk is None:
            raise ValueError(f"{q} is not a prime power")
        self.q = q
        self.p, self.k = pk
        self.modulus = _irreducible(self.p, self.k)
        self._add = [[self._encode(self._add_vec(a, b)) for b in range(q)] for a in range(q)]
        self._mul = [[self._encode(self._mul_vec(a, b)) for b in range(q)] for a in range(q)]
        self._neg = [self._encode([(-c) % self.p for c in self._decode(a)]) for a in range(q)]

    def _decode(self, a: int) -> list[int]:
        out = []
        for _ in range(self.k):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def _encode(self, v) -> int:
        a = 0
        for d in reversed(list(v)):
            a = a * self.p + d
        return a

    def _add_vec(self, a: int, b: int) -> list[int]:
        return [(x + y) % self.p for x, y in zip(self._decode(a), self._decode(b))]

    def _mul_vec(self, a: int, b: int) -> list[int]:
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(self._decode(a)):
            for j, y in enumerate(self._decode(b)):
                prod[i + j] = (prod[i + j] + x * y) % p
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if c:
                for j in range(k + 1):
                    prod[d - k + j] = (prod[d - k + j] - c * self.modulus[j]) % p
        return prod[:k]

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def pow(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def quadratic_character(self, a: int) -> int:
        if a == 0:
            return 0
        return 1 if self.pow(a, (self.q - 1) // 2) == 1 else -1
