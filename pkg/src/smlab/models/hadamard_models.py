"""Potts models and the index-m / symmetric block models built from a Hadamard matrix."""

from __future__ import annotations

from math import gcd

import numpy as np

from ..cyclo import lcm
from ..matrix import Labels, SpinMatrix
from ..scalar import Ring
from .hadamard import HadamardSource, hadamard_array, sign_exponents

__all__ = [
    "BadParameters",
    "build_index_m_model",
    "build_symmetric_model",
    "potts",
    "potts_exponents",
]


class BadParameters(ValueError):
    pass


def potts_exponents(r: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """(zeta exponents, U powers) of A_u = u^3 I - u^-1 (J - I)."""
    eye = np.eye(r, dtype=bool)
    z = np.where(eye, 0, N // 2).astype(np.int64)
    k = np.where(eye, 3, -1).astype(np.int64)
    return z, k


def potts(r: int, u_branch: int | None = None) -> SpinMatrix:
    if r < 1:
        raise BadParameters("r must be positive")
    ring = Ring(r, u_branch)
    z, k = potts_exponents(r, 2)
    return SpinMatrix(ring, 2, z, k, family="potts", params={"r": r, "branch": ring.branch})


def _v_blocks(H: np.ndarray, N: int):
    """Exponent pairs for V_ij: A_u (i-j even), H ((i,j) = (0,1) mod 2), H^T ((1,0) mod 2)."""
    r = H.shape[0]
    az, ak = potts_exponents(r, N)
    hz = sign_exponents(H, N)
    zero = np.zeros((r, r), dtype=np.int64)
    return {0: (az, ak), 1: (hz, zero), 2: (hz.T.copy(), zero)}


def _v_kind(i: int, j: int) -> int:
    if (i - j) % 2 == 0:
        return 0
    return 1 if i % 2 == 0 else 2


def _assemble(m: int, r: int, N: int, H: np.ndarray, phase) -> tuple[np.ndarray, np.ndarray]:
    """Entry exponents of the block matrix with entries zeta_N^phase(i,j,l,l') * V_ij(x,y)."""
    blocks = _v_blocks(H, N)
    n = m * m * r
    z = np.zeros((n, n), dtype=np.int64)
    k = np.zeros((n, n), dtype=np.int64)
    lab = Labels(m, r)
    for i in range(m):
        for j in range(m):
            vz, vk = blocks[_v_kind(i, j)]
            for ell in range(m):
                for ell2 in range(m):
                    a0 = lab.flat(i, ell, 0)
                    b0 = lab.flat(j, ell2, 0)
                    z[a0 : a0 + r, b0 : b0 + r] = (vz + phase(i, j, ell, ell2)) % N
                    k[a0 : a0 + r, b0 : b0 + r] = vk
    return z, k


def _check_m(m: int):
    if m < 2 or m % 2:
        raise BadParameters(f"m must be a positive even integer, got {m}")


def _resolve_hadamard(hadamard, r: int | None) -> np.ndarray:
    if hadamard is None:
        if r is None:
            raise BadParameters("need a Hadamard source or an order r")
        return _default_hadamard(r)
    H = hadamard_array(hadamard) if isinstance(hadamard, HadamardSource) else np.asarray(hadamard, dtype=np.int64)
    if r is not None and H.shape[0] != r:
        raise BadParameters(f"Hadamard matrix has order {H.shape[0]}, expected r={r}")
    return H


def _default_hadamard(r: int) -> np.ndarray:
    if r & (r - 1) == 0:
        return hadamard_array(HadamardSource("sylvester", r.bit_length() - 1))
    if (r - 1) % 4 == 3:
        return hadamard_array(HadamardSource("paley1", r - 1))
    raise BadParameters(f"no built-in Hadamard matrix of order {r}")


def build_index_m_model(
    m: int,
    r: int | None = None,
    a_exp: int = 1,
    hadamard=None,
    u_branch: int | None = None,
) -> SpinMatrix:
    """W_{H,u,a}: entry a^(2m(l-l')(i-j) + eps(i,j)) V_ij(x,y), a = zeta_{2m^2}^a_exp.

    eps(i,j) = (i-j)^2 + m(i-j) with i - j taken as a plain integer difference of
    representatives in {0..m-1}.
    """
    _check_m(m)
    H = _resolve_hadamard(hadamard, r)
    r = H.shape[0]
    order = 2 * m * m
    if gcd(a_exp, order) != 1:
        raise BadParameters(f"a = zeta_{order}^{a_exp} is not primitive")
    ring = Ring(r, u_branch)
    N = lcm(lcm(order, 2), ring.min_conductor())
    step = N // order * a_exp

    def phase(i, j, ell, ell2):
        d = i - j
        return step * (2 * m * (ell - ell2) * d + d * d + m * d)

    z, k = _assemble(m, r, N, H, phase)
    params = {"m": m, "r": r, "a_exp": a_exp % order, "branch": ring.branch}
    return SpinMatrix(ring, N, z, k, labels=Labels(m, r), family="whua", params=params)


def build_symmetric_model(
    m: int,
    r: int | None = None,
    b_exp: int = 1,
    eta_exp: int = 1,
    hadamard=None,
    u_branch: int | None = None,
) -> SpinMatrix:
    """W'_{H,u,b}: entry eta^((l-l')(i-j)) b^((i-j)^2) V_ij(x,y), b = zeta_{m^2}^b_exp, eta = zeta_m^eta_exp."""
    _check_m(m)
    if gcd(eta_exp, m) != 1:
        raise BadParameters(f"eta = zeta_{m}^{eta_exp} is not primitive")
    H = _resolve_hadamard(hadamard, r)
    r = H.shape[0]
    ring = Ring(r, u_branch)
    N = lcm(lcm(m * m, 2), ring.min_conductor())
    bstep = N // (m * m) * b_exp
    estep = N // m * eta_exp

    def phase(i, j, ell, ell2):
        d = i - j
        return estep * (ell - ell2) * d + bstep * d * d

    z, k = _assemble(m, r, N, H, phase)
    params = {"m": m, "r": r, "b_exp": b_exp % (m * m), "eta_exp": eta_exp % m, "branch": ring.branch}
    return SpinMatrix(ring, N, z, k, labels=Labels(m, r), family="whub", params=params)
