"""Square matrices of monomial entries ``+-zeta_N^e * U^k``.

Entries are kept as two integer arrays (zeta exponent with the sign folded
in as ``+N/2``, and U power).  Only products such as ``W^T W^-`` expand to
general ring elements; that happens in :mod:`smlab.kernel`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from .cyclo import lcm
from .scalar import EntryMonomial, ParameterMismatch, Ring, Scalar

__all__ = [
    "Labels",
    "NotPermutation",
    "PermutationSpec",
    "SizeMismatch",
    "SpinMatrix",
    "as_permutation",
    "entrywise_minus",
    "mat_mul",
    "scalar_identity",
    "shift_permutation",
    "tensor",
]


class SizeMismatch(ValueError):
    pass


class NotPermutation(ValueError):
    def __init__(self, msg: str, witness=None):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True)
class Labels:
    """Index decomposition X = Z_m x Z_m x {1..r}; flat = (i*m + l)*r + (x-1)."""

    m: int
    r: int

    def flat(self, i: int, ell: int, x: int) -> int:
        return (i % self.m * self.m + ell % self.m) * self.r + x

    def triple(self, a: int) -> tuple[int, int, int]:
        il, x = divmod(a, self.r)
        i, ell = divmod(il, self.m)
        return i, ell, x


@dataclass(frozen=True)
class PermutationSpec:
    images: tuple[int, ...]
    order: int = 0

    def __post_init__(self):
        imgs = tuple(int(v) for v in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError("images do not form a bijection")
        object.__setattr__(self, "images", imgs)
        object.__setattr__(self, "order", _perm_order(imgs))

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, a: int) -> int:
        return self.images[a]

    def inverse(self) -> "PermutationSpec":
        inv = [0] * self.n
        for a, b in enumerate(self.images):
            inv[b] = a
        return PermutationSpec(tuple(inv))

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.int64)
        out[np.arange(self.n), self.images] = 1
        return out


def _perm_order(images: Sequence[int]) -> int:
    seen = [False] * len(images)
    order = 1
    for start in range(len(images)):
        if seen[start]:
            continue
        length = 0
        a = start
        while not seen[a]:
            seen[a] = True
            a = images[a]
            length += 1
        order = lcm(order, length)
    return order


def shift_permutation(m: int, r: int) -> PermutationSpec:
    """The permutation of I_m (x) z_m (x) I_r: row (i, l, x) has its 1 in column (i, l-1, x)."""
    lab = Labels(m, r)
    images = []
    for a in range(m * m * r):
        i, ell, x = lab.triple(a)
        images.append(lab.flat(i, ell - 1, x))
    return PermutationSpec(tuple(images))


class SpinMatrix:
    """Matrix with nonzero monomial entries over a Ring, conductor N."""

    def __init__(
        self,
        ring: Ring,
        N: int,
        zexp,
        upow=None,
        labels: Labels | None = None,
        family: str | None = None,
        params: dict | None = None,
    ):
        zexp = np.asarray(zexp, dtype=np.int64)
        if zexp.ndim != 2 or zexp.shape[0] != zexp.shape[1]:
            raise SizeMismatch("entry array must be square")
        if upow is None:
            upow = np.zeros_like(zexp)
        upow = np.asarray(upow, dtype=np.int64)
        if upow.shape != zexp.shape:
            raise SizeMismatch("exponent arrays differ in shape")
        full = lcm(lcm(N, 2), ring.min_conductor())
        # exponents were given relative to N; rescale to the full conductor
        self.ring = ring
        self.N = full
        self.zexp = (zexp * (full // N)) % full
        self.upow = upow
        self.labels = labels
        self.family = family
        self.params = dict(params or {})
        if labels is not None and labels.m * labels.m * labels.r != self.n:
            raise SizeMismatch(f"labels m={labels.m}, r={labels.r} do not match n={self.n}")
        self.zexp.setflags(write=False)
        self.upow.setflags(write=False)
        self._folded = None

    @property
    def n(self) -> int:
        return self.zexp.shape[0]

    @property
    def r(self) -> int:
        return self.ring.r

    @property
    def m(self) -> int | None:
        return self.labels.m if self.labels else None

    def entry(self, a: int, b: int) -> EntryMonomial:
        return EntryMonomial(Fraction(1), int(self.zexp[a, b]), int(self.upow[a, b]))

    def scalar(self, a: int, b: int) -> Scalar:
        return self.entry(a, b).expand(self.ring, self.N)

    def folded(self) -> tuple[np.ndarray, np.ndarray]:
        """Canonical exponents: u folded into zeta for specialised rings."""
        if self._folded is None:
            if self.ring.specialized:
                z = (self.zexp + self.upow * self.ring.u_exp(self.N)) % self.N
                k = np.zeros_like(z)
            else:
                z, k = self.zexp % self.N, self.upow.copy()
            z.setflags(write=False)
            k.setflags(write=False)
            self._folded = (z, k)
        return self._folded

    def uses_u(self) -> bool:
        return bool(np.any(self.upow))

    def replace(self, zexp=None, upow=None, **kw) -> "SpinMatrix":
        args = dict(
            ring=self.ring,
            N=self.N,
            zexp=self.zexp if zexp is None else zexp,
            upow=self.upow if upow is None else upow,
            labels=self.labels,
            family=self.family,
            params=self.params,
        )
        args.update(kw)
        return SpinMatrix(**args)

    def with_conductor(self, N: int) -> "SpinMatrix":
        if N % self.N:
            raise ParameterMismatch(f"{self.N} does not divide {N}")
        return self.replace(zexp=self.zexp * (N // self.N), N=N)

    def with_ring(self, ring: Ring) -> "SpinMatrix":
        """Reinterpret over another ring; only legal when U is unused or u agrees."""
        if self.uses_u() and not self.ring.same_u(ring):
            raise ParameterMismatch("matrix uses U; rings disagree on u")
        N = lcm(self.N, ring.min_conductor())
        out = self.with_conductor(N)
        if self.uses_u() and ring.specialized:
            # same u value, possibly expressed with a different order
            z, _ = out.folded()
            return SpinMatrix(ring, N, z, None, self.labels, self.family, self.params)
        return SpinMatrix(ring, N, out.zexp, out.upow, self.labels, self.family, self.params)

    def transpose(self) -> "SpinMatrix":
        return self.replace(zexp=self.zexp.T.copy(), upow=self.upow.T.copy())

    def permute(self, sigma: PermutationSpec | Sequence[int]) -> "SpinMatrix":
        """W^sigma(a, b) = W(sigma(a), sigma(b))."""
        idx = np.asarray(sigma.images if isinstance(sigma, PermutationSpec) else sigma, dtype=np.int64)
        return self.replace(zexp=self.zexp[np.ix_(idx, idx)], upow=self.upow[np.ix_(idx, idx)])

    def scale(self, c: EntryMonomial) -> "SpinMatrix":
        """Multiply every entry by a unit monomial (q = +-1)."""
        zshift, N = self._zeta_shift(c)
        base = self.with_conductor(N)
        return base.replace(zexp=base.zexp + zshift, upow=base.upow + c.u_pow)

    def _zeta_shift(self, c: EntryMonomial) -> tuple[int, int]:
        if abs(c.q) != 1:
            raise ValueError("only unit scalings keep entries monomial")
        N = self.N
        e = c.zeta_exp
        if c.q < 0:
            e += N // 2
        return e, N

    def negate_entry(self, a: int, b: int, shift: int | None = None) -> "SpinMatrix":
        """Multiply one entry by zeta_N^shift (default -1); used for mutation tests."""
        shift = self.N // 2 if shift is None else shift
        z = self.zexp.copy()
        z[a, b] = (z[a, b] + shift) % self.N
        return self.replace(zexp=z)

    def equals(self, other: "SpinMatrix") -> bool:
        return self.first_difference(other) is None

    def first_difference(self, other: "SpinMatrix") -> tuple[int, int] | None:
        """First entry (row-major) where the two matrices differ as ring values."""
        if self.n != other.n:
            return (-1, -1)
        try:
            a, b = _align(self, other)
        except ParameterMismatch:
            return (-1, -1)
        za, ka = a.folded()
        zb, kb = b.folded()
        diff = (za != zb) | (ka != kb)
        if not diff.any():
            return None
        idx = np.flatnonzero(diff.ravel())[0]
        return divmod(int(idx), self.n)

    def is_symmetric(self) -> bool:
        return self.equals(self.transpose())

    def to_scalars(self) -> list[list[Scalar]]:
        return [[self.scalar(a, b) for b in range(self.n)] for a in range(self.n)]

    def complex_entries(self) -> np.ndarray:
        """Entries at the designated embedding, as complex128."""
        uval = self.ring.u_interval(64)
        u = complex(float(uval.real.mid), float(uval.imag.mid))
        zeta = np.exp(2j * np.pi * self.zexp / self.N)
        return zeta * u ** self.upow.astype(float)

    def __repr__(self):
        lab = f", m={self.labels.m}" if self.labels else ""
        return f"SpinMatrix(n={self.n}, N={self.N}, r={self.r}, branch={self.ring.branch}{lab})"


def entrywise_minus(W: SpinMatrix) -> SpinMatrix:
    """W^-(x, y) = W(y, x)^-1."""
    return W.replace(zexp=(-W.zexp.T) % W.N, upow=-W.upow.T, labels=None, family=None)


def _common_ring(A: SpinMatrix, B: SpinMatrix) -> Ring:
    if A.uses_u() and B.uses_u():
        if not A.ring.same_u(B.ring):
            raise ParameterMismatch(f"incompatible rings {A.ring} and {B.ring}")
        return A.ring if A.ring.r >= B.ring.r else B.ring
    if A.uses_u():
        return A.ring
    if B.uses_u():
        return B.ring
    return A.ring if A.ring.r >= B.ring.r else B.ring


def _align(A: SpinMatrix, B: SpinMatrix) -> tuple[SpinMatrix, SpinMatrix]:
    ring = _common_ring(A, B)
    A2, B2 = A.with_ring(ring), B.with_ring(ring)
    N = lcm(A2.N, B2.N)
    return A2.with_conductor(N), B2.with_conductor(N)


def tensor(A: SpinMatrix, B: SpinMatrix) -> SpinMatrix:
    """Kronecker product; the left factor indexes the slow (outer) coordinate."""
    A2, B2 = _align(A, B)
    ring, N = A2.ring, A2.N
    na, nb = A.n, B.n
    z = (A2.zexp[:, None, :, None] + B2.zexp[None, :, None, :]).reshape(na * nb, na * nb)
    k = (A2.upow[:, None, :, None] + B2.upow[None, :, None, :]).reshape(na * nb, na * nb)
    return SpinMatrix(ring, N, z, k)


def mat_mul(A, B) -> list[list[Scalar]]:
    """Exact matrix product.

    Two SpinMatrix operands go through the histogram kernel; anything else
    (nested lists of Scalar, e.g. an identity matrix) is multiplied directly.
    """
    from .kernel import Reducer

    if len(A if not isinstance(A, SpinMatrix) else A.zexp) != len(B if not isinstance(B, SpinMatrix) else B.zexp):
        raise SizeMismatch("operand sizes differ")
    if isinstance(A, SpinMatrix) and isinstance(B, SpinMatrix):
        A2, B2 = _align(A, B)
        n = A.n
        za, ka = A2.folded()
        zb, kb = B2.folded()
        red = Reducer(A2.ring, A2.N)
        z = za[:, None, :] + zb.T[None, :, :]
        k = ka[:, None, :] + kb.T[None, :, :]
        coords = red.reduce(z.reshape(n * n, n), k.reshape(n * n, n))
        return [[red.to_scalar(coords[a * n + b]) for b in range(n)] for a in range(n)]
    A = A.to_scalars() if isinstance(A, SpinMatrix) else A
    B = B.to_scalars() if isinstance(B, SpinMatrix) else B
    n = len(A)
    out = []
    for a in range(n):
        row = []
        for b in range(n):
            acc = A[a][0] * B[0][b]
            for x in range(1, n):
                acc = acc + A[a][x] * B[x][b]
            row.append(acc)
        out.append(row)
    return out


def scalar_identity(ring: Ring, n: int) -> list[list[Scalar]]:
    one, zero = Scalar.const(ring, 1), Scalar.zero(ring)
    return [[one if a == b else zero for b in range(n)] for a in range(n)]


def as_permutation(M: Sequence[Sequence[Scalar]]) -> PermutationSpec:
    """Read a 0/1 matrix of ring elements as a permutation (row -> column of its 1)."""
    from .kernel import scalar_equals

    n = len(M)
    images = []
    for a, row in enumerate(M):
        ones = []
        for b, v in enumerate(row):
            if scalar_equals(v, 1):
                ones.append(b)
            elif not scalar_equals(v, 0):
                raise NotPermutation(f"entry ({a},{b}) is neither 0 nor 1", witness=(a, b))
        if len(ones) != 1:
            raise NotPermutation(f"row {a} has {len(ones)} ones", witness=(a, ones[1] if ones else -1))
        images.append(ones[0])
    if len(set(images)) != n:
        col = next(c for c in range(n) if images.count(c) != 1)
        raise NotPermutation(f"column {col} does not hold exactly one 1", witness=(-1, col))
    return PermutationSpec(tuple(images))

