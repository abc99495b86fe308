"""The entry ring Q(zeta_N)[U]/(U^8 - (r-2)U^4 + 1) and its complex embedding.

For r <= 4 the Potts parameter u is a root of unity, so the ring is
specialised: u = zeta_M^branch with M = 4 (r = 1, 4), 16 (r = 2) or 24
(r = 3) and every value lives in a cyclotomic field.  For r > 4, U stays
formal and ``branch`` selects which root of the modulus the embedding uses:
``u = i^(branch % 4) * u0^(+-1)`` where u0 > 0 has u0^2 = (sqrt(r) + sqrt(r-4))/2,
and the sign of the exponent is ``-`` when ``branch >= 4``.
"""

from __future__ import annotations

import os
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from mpmath import iv

from .cyclo import Cyclotomic, lcm, root_of_unity

__all__ = [
    "EntryMonomial",
    "ParameterMismatch",
    "Ring",
    "Scalar",
    "ZeroEntry",
    "default_precision",
    "embed",
    "monomial_inverse",
    "potts_D",
]


class ParameterMismatch(ValueError):
    pass


class ZeroEntry(ZeroDivisionError):
    pass


def default_precision() -> int:
    return int(os.environ.get("SMLAB_PRECISION_BITS", "256"))


_U_ORDER = {1: 4, 2: 16, 3: 24, 4: 4}
_IV_LOCK = threading.RLock()


@contextmanager
def _ivprec(bits: int):
    # mpmath's interval context keeps its precision globally
    with _IV_LOCK:
        old = iv.prec
        iv.prec = max(bits, old)
        try:
            yield
        finally:
            iv.prec = old


@dataclass(frozen=True)
class Ring:
    """Parameter context for the Potts variable u."""

    r: int
    branch: int | None = None

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be a positive integer")
        if self.branch is None:
            object.__setattr__(self, "branch", 1 if self.r in (2, 3) else 0)
        if self.specialized:
            object.__setattr__(self, "branch", self.branch % self.u_order)
            u = root_of_unity(self.u_order, self.branch)
            if self.r == 1:
                ok = u**4 == 1
            else:
                s = u * u + (u * u).inverse()
                ok = s * s == self.r
            if not ok:
                raise ValueError(f"branch {self.branch} does not give a valid u for r={self.r}")
        elif not 0 <= self.branch < 8:
            raise ValueError("branch for r > 4 must lie in 0..7")

    @property
    def specialized(self) -> bool:
        return self.r <= 4

    @property
    def u_order(self) -> int:
        """Order of u when it is a root of unity, else 0."""
        return _U_ORDER.get(self.r, 0)

    @property
    def udim(self) -> int:
        return 1 if self.specialized else 8

    @property
    def modulus(self) -> tuple[int, ...]:
        return (1, 0, 0, 0, -(self.r - 2), 0, 0, 0, 1)

    def min_conductor(self) -> int:
        return self.u_order if self.specialized else 1

    def u_exp(self, N: int) -> int:
        """Exponent e with u = zeta_N^e (specialised rings only)."""
        if not self.specialized:
            raise ParameterMismatch("u is formal for r > 4")
        if N % self.u_order:
            raise ParameterMismatch(f"conductor {N} does not contain u (order {self.u_order})")
        return self.branch * (N // self.u_order) % N

    def u_power(self, k: int) -> tuple[int, ...]:
        """Coefficients of U^k reduced modulo the modulus (formal rings)."""
        return _u_power(self.r, k)

    def same_u(self, other: "Ring") -> bool:
        if self.specialized and other.specialized:
            return Fraction(self.branch, self.u_order) == Fraction(other.branch, other.u_order)
        return self == other

    # -- embedding -------------------------------------------------------
    def u_interval(self, prec: int):
        with _ivprec(prec + 20):
            if self.specialized:
                return _unit_interval(self.branch, self.u_order)
            r = iv.mpf(self.r)
            u0 = iv.sqrt((iv.sqrt(r) + iv.sqrt(r - 4)) / 2)
            if self.branch >= 4:
                u0 = 1 / u0
            return u0 * _unit_interval(self.branch % 4, 4)

    def abs_u_interval(self, prec: int):
        with _ivprec(prec + 20):
            if self.specialized:
                return iv.mpf(1)
            r = iv.mpf(self.r)
            u0 = iv.sqrt((iv.sqrt(r) + iv.sqrt(r - 4)) / 2)
            return 1 / u0 if self.branch >= 4 else u0

    def branch_factor(self) -> tuple[int, ...] | None:
        """Irreducible rational factor of the modulus vanishing at the branch value."""
        if self.specialized:
            return None
        return _branch_factor(self.r, self.branch)

    def to_json(self) -> dict:
        return {"r": self.r, "branch": self.branch}


def _unit_interval(e: int, n: int):
    ang = 2 * iv.pi * e / n
    return iv.mpc(iv.cos(ang), iv.sin(ang))


@lru_cache(maxsize=None)
def _u_power(r: int, k: int) -> tuple[int, ...]:
    if k == 0:
        return (1, 0, 0, 0, 0, 0, 0, 0)
    if k > 0:
        prev = _u_power(r, k - 1)
        top = prev[7]
        cur = [0] + list(prev[:7])
        # U^8 = (r-2)U^4 - 1
        cur[4] += top * (r - 2)
        cur[0] -= top
        return tuple(cur)
    prev = _u_power(r, k + 1)
    # U^-1 = (r-2)U^3 - U^7
    low = prev[0]
    cur = list(prev[1:]) + [0]
    cur[3] += low * (r - 2)
    cur[7] -= low
    return tuple(cur)


@lru_cache(maxsize=None)
def _branch_factor(r: int, branch: int) -> tuple[int, ...] | None:
    import sympy

    U = sympy.Symbol("U")
    _, factors = sympy.factor_list(U**8 - (r - 2) * U**4 + 1, U)
    ring = Ring(r, branch)
    prec = 200
    u = ring.u_interval(prec)
    found = []
    for f, _mult in factors:
        coeffs = [int(c) for c in reversed(sympy.Poly(f, U).all_coeffs())]
        if coeffs[-1] < 0:
            coeffs = [-c for c in coeffs]
        with _ivprec(prec):
            val = iv.mpc(0)
            p = iv.mpc(1)
            for c in coeffs:
                val += c * p
                p *= u
            if 0 in val.real and 0 in val.imag:
                found.append(tuple(coeffs))
    # exactly one irreducible factor has u as a root; others are bounded away
    if len(found) != 1 or len(found[0]) == 9:
        return None
    return found[0]


class Scalar:
    """Element of Q(zeta)[U]/(modulus): a vector of Cyclotomic coefficients."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: Ring, coeffs: Sequence):
        coeffs = tuple(c if isinstance(c, Cyclotomic) else Cyclotomic.rational(c) for c in coeffs)
        if len(coeffs) != ring.udim:
            raise ValueError(f"expected {ring.udim} coefficients")
        self.ring = ring
        self.coeffs = coeffs

    @classmethod
    def zero(cls, ring: Ring) -> "Scalar":
        return cls(ring, [0] * ring.udim)

    @classmethod
    def const(cls, ring: Ring, c) -> "Scalar":
        c = c if isinstance(c, Cyclotomic) else Cyclotomic.rational(c)
        return cls(ring, [c] + [Cyclotomic.rational(0)] * (ring.udim - 1))

    @classmethod
    def u_power(cls, ring: Ring, k: int) -> "Scalar":
        if ring.specialized:
            return cls(ring, [root_of_unity(ring.u_order, ring.branch * k)])
        return cls(ring, [Cyclotomic.rational(c) for c in ring.u_power(k)])

    @classmethod
    def monomial(cls, ring: Ring, q, N: int, zexp: int, upow: int) -> "Scalar":
        z = root_of_unity(N, zexp) * Fraction(q)
        return cls.u_power(ring, upow) * z

    def _check(self, other: "Scalar"):
        if not isinstance(other, Scalar):
            raise TypeError("expected Scalar")
        if self.ring != other.ring:
            raise ParameterMismatch(f"ring mismatch: {self.ring} vs {other.ring}")

    def _lift(self, other):
        if isinstance(other, Scalar):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return Scalar.const(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Scalar(self.ring, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.ring, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            return Scalar(self.ring, [a * other for a in self.coeffs])
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.ring.specialized:
            return Scalar(self.ring, [self.coeffs[0] * other.coeffs[0]])
        zero = Cyclotomic.rational(0)
        prod = [zero] * 15
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] = prod[i + j] + a * b
        c = self.ring.r - 2
        # fold U^8.. U^14 using U^8 = (r-2)U^4 - 1
        for k in range(14, 7, -1):
            top = prod[k]
            if top:
                prod[k - 4] = prod[k - 4] + top * c
                prod[k - 8] = prod[k - 8] - top
        return Scalar(self.ring, prod[:8])

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers only exist for monomials; use Scalar.u_power")
        result = Scalar.const(self.ring, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Cyclotomic)):
            other = Scalar.const(self.ring, other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def conductor(self) -> int:
        n = 1
        for c in self.coeffs:
            n = lcm(n, c.N)
        return n

    def as_monomial(self, N: int | None = None) -> "EntryMonomial | None":
        """Collapse to q*zeta_N^e*U^k (normal form) when self is a monomial.

        N defaults to the smallest conductor that holds the value and u.
        """
        nz = [k for k, c in enumerate(self.coeffs) if c]
        if len(nz) != 1:
            return None
        k = nz[0]
        c = self.coeffs[k]
        if N is None:
            N = lcm(lcm(2, c.N), self.ring.min_conductor())
        elif N % c.N or N % 2 or N % self.ring.min_conductor():
            raise ParameterMismatch(f"conductor {N} cannot hold this monomial")
        for e in range(N):
            q = c * root_of_unity(N, -e)
            if q.is_rational() and q.coeffs[0] > 0:
                return EntryMonomial(q.coeffs[0], e, k).normal(self.ring, N)
        return None

    def embed(self, prec: int | None = None):
        return embed(self, prec)

    def to_complex(self) -> complex:
        z = embed(self, 64)
        return complex(float(z.real.mid), float(z.imag.mid))

    def to_json(self) -> dict:
        return {**self.ring.to_json(), "poly": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "Scalar":
        return cls(Ring(int(obj["r"]), int(obj["branch"])), [Cyclotomic.from_json(c) for c in obj["poly"]])

    def __repr__(self):
        if self.ring.specialized:
            return f"Scalar(r={self.ring.r}, {self.coeffs[0]!r})"
        parts = [f"{c!r}*U^{k}" for k, c in enumerate(self.coeffs) if c]
        return f"Scalar(r={self.ring.r}, " + (" + ".join(parts) or "0") + ")"


def embed(x: Scalar, prec: int | None = None):
    """Certified complex interval for x at the designated branch."""
    prec = prec or default_precision()
    with _ivprec(prec + 20):
        u = x.ring.u_interval(prec)
        total = iv.mpc(0)
        upow = iv.mpc(1)
        for c in x.coeffs:
            if c:
                total += upow * _cyclo_interval(c, prec)
            upow *= u
        return total


def _cyclo_interval(c: Cyclotomic, prec: int):
    with _ivprec(prec + 20):
        total = iv.mpc(0)
        for j, a in enumerate(c.coeffs):
            if a:
                total += _unit_interval(j, c.N) * (iv.mpf(a.numerator) / a.denominator)
        return total


@dataclass(frozen=True)
class EntryMonomial:
    """q * zeta_N^zeta_exp * U^u_pow, with the conductor N supplied by context."""

    q: Fraction = Fraction(1)
    zeta_exp: int = 0
    u_pow: int = 0

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))

    def __mul__(self, other: "EntryMonomial") -> "EntryMonomial":
        return EntryMonomial(self.q * other.q, self.zeta_exp + other.zeta_exp, self.u_pow + other.u_pow)

    def inverse(self) -> "EntryMonomial":
        return monomial_inverse(self)

    def normal(self, ring: Ring, N: int) -> "EntryMonomial":
        """Positive q, zeta exponent in [0, N), u folded into zeta for specialised rings."""
        q, e, k = self.q, self.zeta_exp, self.u_pow
        if q < 0:
            if N % 2:
                raise ParameterMismatch("sign folding needs an even conductor")
            q, e = -q, e + N // 2
        if ring.specialized:
            e, k = e + k * ring.u_exp(N), 0
        return EntryMonomial(q, e % N, k)

    def expand(self, ring: Ring, N: int) -> Scalar:
        return Scalar.monomial(ring, self.q, N, self.zeta_exp, self.u_pow)

    def to_json(self) -> dict:
        return {"q": [self.q.numerator, self.q.denominator], "zexp": self.zeta_exp, "upow": self.u_pow}

    @classmethod
    def from_json(cls, obj) -> "EntryMonomial":
        num, den = obj["q"]
        return cls(Fraction(int(num), int(den)), int(obj["zexp"]), int(obj["upow"]))


def monomial_inverse(x: EntryMonomial) -> EntryMonomial:
    if x.q == 0:
        raise ZeroEntry("monomial with zero coefficient has no inverse")
    return EntryMonomial(1 / x.q, -x.zeta_exp, -x.u_pow)


def potts_D(r: int, branch: int | None = None) -> Scalar:
    """D_u: u^2 when r = 1, else -u^2 - u^-2."""
    ring = Ring(r, branch)
    if r == 1:
        return Scalar.u_power(ring, 2)
    return -(Scalar.u_power(ring, 2) + Scalar.u_power(ring, -2))

