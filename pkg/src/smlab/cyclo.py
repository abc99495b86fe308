"""Exact arithmetic in cyclotomic fields Q(zeta_N).

An element is stored as a rational coefficient vector on the power basis
``1, z, ..., z^(phi(N)-1)`` reduced modulo the N-th cyclotomic polynomial.
Every public operation returns the element at its minimal conductor, so two
elements are equal exactly when conductors and coefficient vectors agree.
Conductors congruent to 2 mod 4 never appear (Q(zeta_2k) = Q(zeta_k), k odd).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping

__all__ = [
    "Cyclotomic",
    "DivisionByZero",
    "NotPrimitiveRoot",
    "ZeroInput",
    "cyclotomic_poly",
    "euler_phi",
    "gauss_sum",
    "gauss_sum_naive",
    "order_of",
    "power_table",
    "root_of_unity",
]


class DivisionByZero(ZeroDivisionError):
    pass


class ZeroInput(ValueError):
    pass


class NotPrimitiveRoot(ValueError):
    pass


def lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def prime_factors(n: int) -> tuple[int, ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


def euler_phi(n: int) -> int:
    result = n
    for p in prime_factors(n):
        result = result // p * (p - 1)
    return result


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _poly_divexact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # den is monic; division must be exact
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            out[i - dd] = c
            for j, dc in enumerate(den):
                num[i - dd + j] -= c * dc
    assert not any(num), "inexact cyclotomic division"
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        poly = _poly_divexact(poly, cyclotomic_poly(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row j holds the reduction of x^j modulo Phi_n, for 0 <= j < n."""
    phi = cyclotomic_poly(n)
    deg = len(phi) - 1
    rows = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(n):
        rows.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            for i in range(deg):
                cur[i] -= top * phi[i]
    return tuple(rows)


@lru_cache(maxsize=None)
def _subgroup_generators(n: int, m: int) -> tuple[int, ...]:
    """Generators of {t in (Z/n)^* : t = 1 mod m}, i.e. Gal(Q(z_n)/Q(z_m))."""
    elems = [t for t in range(1, n, m) if gcd(t, n) == 1] or [1]
    gens: list[int] = []
    span = {1}
    for t in elems:
        if t in span:
            continue
        gens.append(t)
        frontier = list(span)
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    v = s * g % n
                    if v not in span:
                        span.add(v)
                        nxt.append(v)
            frontier = nxt
    return tuple(gens)


def _galois(n: int, coeffs: tuple[Fraction, ...], t: int) -> tuple[Fraction, ...]:
    table = power_table(n)
    out = [Fraction(0)] * len(coeffs)
    for j, c in enumerate(coeffs):
        if c:
            row = table[j * t % n]
            for i, v in enumerate(row):
                if v:
                    out[i] += c * v
    return tuple(out)


def _solve_square(mat: list[list[Fraction]]) -> list[list[Fraction]]:
    size = len(mat)
    aug = [row[:] + [Fraction(int(i == k)) for k in range(size)] for i, row in enumerate(mat)]
    for col in range(size):
        piv = next(r for r in range(col, size) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


@lru_cache(maxsize=None)
def _demotion(n: int, m: int) -> tuple[tuple[int, ...], tuple[tuple[Fraction, ...], ...]]:
    """Pivot columns and inverse matrix to rewrite Q(z_m)-elements from the z_n basis."""
    table = power_table(n)
    step = n // m
    dm = euler_phi(m)
    basis = [[Fraction(v) for v in table[i * step]] for i in range(dm)]
    # pick dm independent columns by elimination on a copy
    work = [row[:] for row in basis]
    pivots: list[int] = []
    row_idx = 0
    for col in range(len(basis[0])):
        if row_idx == dm:
            break
        piv = next((r for r in range(row_idx, dm) if work[r][col]), None)
        if piv is None:
            continue
        work[row_idx], work[piv] = work[piv], work[row_idx]
        for r in range(dm):
            if r != row_idx and work[r][col]:
                f = work[r][col] / work[row_idx][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[row_idx])]
        pivots.append(col)
        row_idx += 1
    square = [[basis[i][c] for c in pivots] for i in range(dm)]
    inv = _solve_square(square)
    return tuple(pivots), tuple(tuple(r) for r in inv)


def _demote(n: int, coeffs: tuple[Fraction, ...], m: int) -> tuple[Fraction, ...]:
    pivots, inv = _demotion(n, m)
    picked = [coeffs[c] for c in pivots]
    dm = len(pivots)
    return tuple(sum((picked[k] * inv[k][i] for k in range(dm)), Fraction(0)) for i in range(dm))


def _in_subfield(n: int, coeffs: tuple[Fraction, ...], m: int) -> bool:
    return all(_galois(n, coeffs, t) == coeffs for t in _subgroup_generators(n, m))


def _canonical(n: int, coeffs: tuple[Fraction, ...]) -> tuple[int, tuple[Fraction, ...]]:
    if n % 4 == 2:
        coeffs = _demote(n, coeffs, n // 2)
        n //= 2
    progress = True
    while progress and n > 1:
        progress = False
        for p in prime_factors(n):
            m = n // p
            if n % (p * p) == 0 and m % 4 != 2:
                if all(not c for j, c in enumerate(coeffs) if j % p):
                    coeffs = coeffs[::p]
                    n = m
                    progress = True
                    break
                continue
            if m % 4 == 2:
                m //= 2
            if _in_subfield(n, coeffs, m):
                coeffs = _demote(n, coeffs, m)
                n = m
                progress = True
                break
    return n, coeffs


def _promote(n: int, coeffs: tuple[Fraction, ...], target: int) -> tuple[Fraction, ...]:
    if n == target:
        return coeffs
    table = power_table(target)
    step = target // n
    out = [Fraction(0)] * euler_phi(target)
    for j, c in enumerate(coeffs):
        if c:
            for i, v in enumerate(table[j * step]):
                if v:
                    out[i] += c * v
    return tuple(out)


def _poly_mul_mod(n: int, a: tuple[Fraction, ...], b: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    prod: dict[int, Fraction] = {}
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    k = (i + j) % n
                    prod[k] = prod.get(k, 0) + x * y
    table = power_table(n)
    out = [Fraction(0)] * len(a)
    for k, c in prod.items():
        if c:
            for i, v in enumerate(table[k]):
                if v:
                    out[i] += c * v
    return tuple(out)


def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _trim(a[:])
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b):
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, v in enumerate(b):
            a[shift + i] -= c * v
        a = _trim(a)
    return q, a


def _poly_inverse_mod(n: int, coeffs: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
    """Extended Euclid: the inverse of coeffs modulo Phi_n."""
    modulus = [Fraction(c) for c in cyclotomic_poly(n)]
    r0, r1 = modulus, _trim(list(coeffs))
    s0: list[Fraction] = [Fraction(0)]
    s1: list[Fraction] = [Fraction(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        prod = [Fraction(0)] * (len(q) + len(s1))
        for i, x in enumerate(q):
            for j, y in enumerate(s1):
                prod[i + j] += x * y
        s_new = [
            (s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)
            for i in range(max(len(s0), len(prod)))
        ]
        r0, r1 = r1, r
        s0, s1 = s1, _trim(s_new) or [Fraction(0)]
    # r1 is a nonzero constant since Phi_n is irreducible
    c = r1[0]
    inv = [v / c for v in s1]
    deg = euler_phi(n)
    out = inv + [Fraction(0)] * (deg - len(inv))
    return tuple(out[:deg])


class Cyclotomic:
    """Immutable element of Q(zeta_N) in canonical form."""

    __slots__ = ("N", "coeffs", "_hash")

    def __init__(self, N: int, coeffs: Iterable):
        vec = tuple(Fraction(c) for c in coeffs)
        if len(vec) != euler_phi(N):
            raise ValueError(f"need {euler_phi(N)} coefficients for conductor {N}, got {len(vec)}")
        n, vec = _canonical(N, vec)
        object.__setattr__(self, "N", n)
        object.__setattr__(self, "coeffs", vec)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, key, value):
        raise AttributeError("Cyclotomic is immutable")

    @classmethod
    def rational(cls, q) -> "Cyclotomic":
        return cls(1, (Fraction(q),))

    @classmethod
    def from_exponents(cls, N: int, terms: Mapping[int, object]) -> "Cyclotomic":
        """Build sum(c * zeta_N^e) from a mapping e -> c."""
        table = power_table(N)
        out = [Fraction(0)] * euler_phi(N)
        for e, c in terms.items():
            c = Fraction(c)
            if c:
                for i, v in enumerate(table[e % N]):
                    if v:
                        out[i] += c * v
        return cls(N, out)

    # -- conversion -------------------------------------------------------
    def promote(self, target: int) -> tuple[Fraction, ...]:
        """Coefficient vector of self on the power basis of Q(zeta_target)."""
        if target % self.N:
            raise ValueError(f"conductor {self.N} does not divide {target}")
        return _promote(self.N, self.coeffs, target)

    def _coerce(self, other) -> "Cyclotomic":
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return Cyclotomic.rational(other)
        return NotImplemented

    def _align(self, other: "Cyclotomic"):
        n = lcm(self.N, other.N)
        return n, self.promote(n), other.promote(n)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n, a, b = self._align(other)
        return Cyclotomic(n, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.N, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.N == 1:
            return Cyclotomic(self.N, [c * other.coeffs[0] for c in self.coeffs])
        if self.N == 1:
            return Cyclotomic(other.N, [c * self.coeffs[0] for c in other.coeffs])
        n, a, b = self._align(other)
        return Cyclotomic(n, _poly_mul_mod(n, a, b))

    __rmul__ = __mul__

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in a cyclotomic field")
        if self.N == 1:
            return Cyclotomic(1, (1 / self.coeffs[0],))
        return Cyclotomic(self.N, _poly_inverse_mod(self.N, self.coeffs))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic.rational(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, t: int) -> "Cyclotomic":
        """Apply zeta_N -> zeta_N^t (t coprime to N)."""
        if gcd(t, self.N) != 1:
            raise ValueError("Galois exponent must be coprime to the conductor")
        return Cyclotomic(self.N, _galois(self.N, self.coeffs, t % self.N))

    def conjugate(self) -> "Cyclotomic":
        return self.galois(-1)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.N == 1 and self.coeffs[0] == 0

    def is_rational(self) -> bool:
        return self.N == 1

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.N == 1 and self.coeffs[0] == other
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self.N == other.N and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.N, self.coeffs)))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def to_complex(self) -> complex:
        import cmath

        w = cmath.exp(2j * cmath.pi / self.N)
        return sum((float(c) * w**j for j, c in enumerate(self.coeffs) if c), 0j)

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "Cyclotomic":
        return cls(int(obj["N"]), [Fraction(int(a), int(b)) for a, b in obj["coeffs"]])

    def __repr__(self):
        terms = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            if j == 0:
                terms.append(str(c))
            else:
                mono = f"z{self.N}" + (f"^{j}" if j > 1 else "")
                terms.append(mono if c == 1 else f"({c})*{mono}")
        return "Cyclotomic(" + (" + ".join(terms) or "0") + ")"


def root_of_unity(N: int, e: int = 1) -> Cyclotomic:
    """zeta_N^e at its minimal conductor."""
    if N < 1:
        raise ValueError("N must be positive")
    row = power_table(N)[e % N]
    return Cyclotomic(N, row)


def order_of(x: Cyclotomic) -> int | str:
    """Multiplicative order of x, or "infinite" when x is not a root of unity."""
    if x.is_zero():
        raise ZeroInput("order of zero is undefined")
    bound = lcm(2, x.N)
    # roots of unity in Q(zeta_N) are exactly +-zeta_N^j
    table = power_table(bound)
    target = x.promote(bound)
    for e in range(bound):
        if tuple(Fraction(v) for v in table[e]) == target:
            return bound // gcd(bound, e)
    return "infinite"


def discrete_log(x: Cyclotomic, N: int) -> int | None:
    """Return e with x == zeta_N^e, or None."""
    if N % x.N:
        return None
    target = x.promote(N)
    for e, row in enumerate(power_table(N)):
        if all(Fraction(v) == t for v, t in zip(row, target)):
            return e
    return None


def gauss_sum(m: int, xi: Cyclotomic) -> Cyclotomic:
    """sum_{x=0}^{m^2-1} xi^(-x(x-m)) for a primitive 2m^2-th root xi."""
    if m <= 0 or m % 2:
        raise ValueError("m must be an even positive integer")
    n = 2 * m * m
    if order_of(xi) != n:
        raise NotPrimitiveRoot(f"xi must have order {n}")
    e = discrete_log(xi, n)
    hist: dict[int, int] = {}
    for x in range(m * m):
        k = -e * x * (x - m) % n
        hist[k] = hist.get(k, 0) + 1
    return Cyclotomic.from_exponents(n, hist)


def gauss_sum_naive(m: int, xi: Cyclotomic) -> Cyclotomic:
    """Same sum by repeated field multiplication; used as a cross-check."""
    total = Cyclotomic.rational(0)
    for x in range(m * m):
        total = total + xi ** (-x * (x - m))
    return total
