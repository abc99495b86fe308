"""Vectorised exact reduction of sums of monomials.

A batch of sums ``sum_t w_t * zeta_N^z_t * U^k_t`` is turned into a histogram
over (k, z) with ``np.bincount`` and then multiplied by an integer table whose
row (k, z) holds the canonical coordinates of ``U^k zeta_N^z``.  Coordinates
have shape ``(udim, phi(N))``: slot s is the coefficient of U^s, written on
the power basis of Q(zeta_N).  They are unique, so a sum is zero in the ring
exactly when all its coordinates vanish.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from mpmath import iv

from .cyclo import Cyclotomic, euler_phi, lcm, power_table
from .scalar import Ring, Scalar, _ivprec, _unit_interval, default_precision

__all__ = ["Reducer", "Verdict", "scalar_equals", "scalar_verdict", "scan_first_failure"]

EXACT, NUMERIC, FAIL = "exact-pass", "numeric-pass", "fail"
_FLOAT_SAFE = 2**52
_INT_SAFE = 2**62


@lru_cache(maxsize=None)
def _zeta_table(N: int) -> np.ndarray:
    return np.array(power_table(N), dtype=np.int64)


@lru_cache(maxsize=None)
def _factor_matrix(r: int, factor: tuple[int, ...]) -> np.ndarray:
    """Row s: coefficients of U^s reduced modulo the monic factor."""
    d = len(factor) - 1
    rows = []
    cur = [0] * d
    for s in range(8):
        if s < d:
            cur = [0] * d
            cur[s] = 1
        else:
            top = cur[-1]
            cur = [0] + cur[:-1]
            for j in range(d):
                cur[j] -= top * factor[j]
        rows.append(list(cur))
    return np.array(rows, dtype=np.int64)


class Reducer:
    """Canonical coordinates for batches of monomial sums over (ring, N)."""

    def __init__(self, ring: Ring, N: int, precision: int | None = None):
        self.ring = ring
        self.N = N
        self.phi = euler_phi(N)
        self.udim = ring.udim
        self.precision = precision or default_precision()
        self._tables: dict[tuple[int, int], np.ndarray] = {}
        self._u_exp = ring.u_exp(N) if ring.specialized else 0
        self._embedding = None
        factor = ring.branch_factor()
        self._factor = None if factor is None else _factor_matrix(ring.r, factor)

    # -- exact reduction --------------------------------------------------
    def _table(self, kmin: int, kmax: int) -> np.ndarray:
        key = (kmin, kmax)
        tab = self._tables.get(key)
        if tab is None:
            zt = _zeta_table(self.N)
            blocks = []
            for k in range(kmin, kmax + 1):
                up = np.array(self.ring.u_power(k), dtype=np.int64)
                blocks.append(np.einsum("s,zj->zsj", up, zt).reshape(self.N, 8 * self.phi))
            tab = np.concatenate(blocks, axis=0)
            self._tables[key] = tab
        return tab

    def reduce(self, z, k=None, weights=None) -> np.ndarray:
        """Coordinates (B, udim, phi) of the B row sums of w * zeta^z * U^k."""
        z = np.asarray(z, dtype=np.int64)
        B = z.shape[0]
        if k is None:
            k = np.zeros_like(z)
        k = np.asarray(k, dtype=np.int64)
        if self.ring.specialized:
            z = z + k * self._u_exp
            k = np.zeros_like(z)
        z = z % self.N
        kmin, kmax = (int(k.min()), int(k.max())) if k.size else (0, 0)
        K = kmax - kmin + 1
        rows = np.broadcast_to(np.arange(B, dtype=np.int64)[:, None], z.shape)
        bins = ((rows * K + (k - kmin)) * self.N + z).ravel()
        w = None if weights is None else np.broadcast_to(np.asarray(weights, dtype=np.int64), z.shape).ravel()
        hist = np.bincount(bins, weights=w, minlength=B * K * self.N)
        if w is not None:
            hist = np.rint(hist).astype(np.int64)
        hist = hist.reshape(B, K * self.N)
        if self.ring.specialized:
            table = _zeta_table(self.N)
        else:
            table = self._table(kmin, kmax)
        out = _int_matmul(hist, table)
        return out.reshape(B, self.udim, self.phi)

    def coords_of(self, x: Scalar) -> np.ndarray:
        """Coordinates of a Scalar already living in Q(zeta_N)."""
        out = np.zeros((self.udim, self.phi), dtype=object)
        for s, c in enumerate(x.coeffs):
            out[s] = c.promote(self.N)
        return out

    def to_scalar(self, coords: np.ndarray) -> Scalar:
        coeffs = [Cyclotomic(self.N, [Fraction(int(v)) for v in coords[s]]) for s in range(self.udim)]
        return Scalar(self.ring, coeffs)

    def terms(self, coords: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Monomial terms (z, k, weight) whose sum has these coordinates."""
        s_idx, j_idx = np.nonzero(coords)
        weights = np.array([int(coords[s, j]) for s, j in zip(s_idx, j_idx)], dtype=np.int64)
        return j_idx.astype(np.int64), s_idx.astype(np.int64), weights

    # -- verdicts ---------------------------------------------------------
    def branch_zero(self, coords: np.ndarray) -> np.ndarray:
        """Zero test after reducing U modulo the factor that vanishes at the branch."""
        if self._factor is None:
            return ~coords.reshape(coords.shape[0], -1).any(axis=1)
        red = np.einsum("sd,bsj->bdj", self._factor.astype(object), coords.astype(object))
        return ~np.array([np.any(red[b] != 0) for b in range(red.shape[0])], dtype=bool)

    def embed(self, coords: np.ndarray):
        """Certified complex interval for one coordinate block."""
        basis = self._basis()
        with _ivprec(self.precision + 20):
            total = iv.mpc(0)
            for s, j in zip(*np.nonzero(coords)):
                v = coords[s, j]
                v = Fraction(v) if isinstance(v, Fraction) else Fraction(int(v))
                total += basis[s][j] * (iv.mpf(int(v.numerator)) / int(v.denominator))
            return total

    def _basis(self):
        if self._embedding is None:
            with _ivprec(self.precision + 20):
                u = self.ring.u_interval(self.precision)
                zs = [_unit_interval(j, self.N) for j in range(self.phi)]
                rows = []
                up = iv.mpc(1)
                for _s in range(self.udim):
                    rows.append([up * zj for zj in zs])
                    up = up * u
                self._embedding = rows
        return self._embedding

    def numeric_zero(self, coords: np.ndarray) -> bool:
        val = self.embed(coords)
        tol = iv.mpf("1e-30")
        with _ivprec(self.precision + 20):
            ok_re = 0 in val.real and (val.real.b - val.real.a) < tol
            ok_im = 0 in val.imag and (val.imag.b - val.imag.a) < tol
        return bool(ok_re and ok_im)

    def classify(self, coords: np.ndarray) -> tuple[str, int | None]:
        """Verdict for a batch of residuals: (worst verdict, first failing row)."""
        flat = coords.reshape(coords.shape[0], -1)
        nonzero = np.flatnonzero(flat.any(axis=1))
        if nonzero.size == 0:
            return EXACT, None
        sub = coords[nonzero]
        still = nonzero[~self.branch_zero(sub)]
        verdict = EXACT
        for b in still:
            if self.numeric_zero(coords[b]):
                verdict = NUMERIC
            else:
                return FAIL, int(b)
        return verdict, None


def _int_matmul(hist: np.ndarray, table: np.ndarray) -> np.ndarray:
    if hist.size == 0:
        return np.zeros((hist.shape[0], table.shape[1]), dtype=np.int64)
    hmax = int(np.abs(hist).max())
    tmax = int(np.abs(table).max()) if table.size else 0
    bound = hmax * tmax * hist.shape[1]
    if bound < _FLOAT_SAFE:
        return np.rint(hist.astype(np.float64) @ table.astype(np.float64)).astype(np.int64)
    if bound < _INT_SAFE:
        return hist @ table
    return hist.astype(object) @ table.astype(object)


def scalar_verdict(v: Scalar, c) -> str:
    """EXACT / NUMERIC / FAIL for the claim v == c (branch factor, then intervals)."""
    diff = v - c
    if diff.is_zero():
        return EXACT
    N = lcm(lcm(diff.conductor(), 2), v.ring.min_conductor())
    red = Reducer(v.ring, N)
    verdict, _ = red.classify(red.coords_of(diff)[None])
    return verdict


def scalar_equals(v: Scalar, c) -> bool:
    """Exact comparison of a Scalar with a constant, honouring the branch factor."""
    return scalar_verdict(v, c) != FAIL


@dataclass(frozen=True)
class Verdict:
    verdict: str
    index: tuple | None = None
    residual: object = None


def scan_first_failure(
    chunks: Iterable,
    check: Callable[[object], Verdict],
    threads: int = 1,
) -> Verdict:
    """Run ``check`` over ordered chunks; return the first failure in chunk order.

    The result does not depend on scheduling: every chunk reports its own first
    failure and the earliest chunk wins.
    """
    chunks = list(chunks)
    worst = EXACT
    if threads <= 1:
        results = map(check, chunks)
        for res in results:
            if res.verdict == FAIL:
                return res
            if res.verdict == NUMERIC:
                worst = NUMERIC
        return Verdict(worst)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(check, chunks))
    for res in results:
        if res.verdict == FAIL:
            return res
        if res.verdict == NUMERIC:
            worst = NUMERIC
    return Verdict(worst)
