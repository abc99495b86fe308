"""Spin models on finite abelian groups and the cyclic model on Z_{m^2}.

The group is Z_{n_1} + ... + Z_{n_h} with the product character
chi_a(b) = prod zeta_{n_i}^{c_i a_i b_i}, so chi_{a_i}(a_i) = zeta_{n_i}^{c_i} and
all cross terms chi_{a_l}(a_k), l != k, equal 1.  eta_i is given as
zeta_{2 n_i}^{e_i}.  Elements are flattened in mixed radix with x_1 slowest.
"""

from __future__ import annotations

from itertools import product
from math import gcd, prod

import numpy as np

from ..cyclo import Cyclotomic, discrete_log, lcm, root_of_unity
from ..matrix import SpinMatrix
from ..scalar import Ring
from .hadamard_models import BadParameters

__all__ = [
    "BadEtaChoice",
    "TZeroBranchUnresolved",
    "abelian_theta",
    "build_abelian_model",
    "build_cyclic_bb_model",
    "cyclic_bb_parameters",
]


class BadEtaChoice(ValueError):
    pass


class TZeroBranchUnresolved(ArithmeticError):
    pass


def _defaults(group, eta_exps, chi_exps):
    group = [int(n) for n in group]
    if not group or any(n < 1 for n in group):
        raise BadParameters("group orders must be positive")
    chi_exps = [1] * len(group) if chi_exps is None else [int(c) for c in chi_exps]
    if eta_exps is None:
        eta_exps = [1 if n % 2 == 0 else 0 for n in group]
    eta_exps = [int(e) for e in eta_exps]
    if not len(group) == len(chi_exps) == len(eta_exps):
        raise BadParameters("group, eta and chi choices differ in length")
    for n, c in zip(group, chi_exps):
        if gcd(n, c) != 1:
            raise BadParameters(f"character exponent {c} is degenerate on Z_{n}")
    return group, eta_exps, chi_exps


def abelian_theta(group, eta_exps=None, chi_exps=None) -> tuple[int, list[int]]:
    """(L, exps) with theta_x = zeta_L^exps[x] for x in mixed-radix order."""
    group, eta_exps, chi_exps = _defaults(group, eta_exps, chi_exps)
    L = 2
    for n in group:
        L = lcm(L, 2 * n)
    for n, e, c in zip(group, eta_exps, chi_exps):
        eta = root_of_unity(2 * n, e)
        need = root_of_unity(n, -c * n * (n - 1) // 2)
        if eta**n != need:
            raise BadEtaChoice(f"eta = zeta_{2 * n}^{e} violates eta^{n} = chi^(-{n}({n}-1)/2)")
    exps = []
    for x in product(*(range(n) for n in group)):
        t = 0
        for xi, n, e, c in zip(x, group, eta_exps, chi_exps):
            t += e * xi * (L // (2 * n)) + c * (xi * (xi - 1) // 2) * (L // n)
        exps.append(t % L)
    return L, exps


def build_abelian_model(
    group,
    eta_exps=None,
    chi_exps=None,
    d_sign: int = 1,
    t0_sign: int = 1,
) -> SpinMatrix:
    """W = sum_x t_x A_x, i.e. W(alpha, beta) = t_{beta - alpha}.

    t0 is chosen among the four roots of t0^4 = G^2/|U|, G = sum_x theta_x^-1;
    ``d_sign`` fixes the sign of D = G / t0^2 and ``t0_sign`` the remaining sign.
    """
    group, eta_exps, chi_exps = _defaults(group, eta_exps, chi_exps)
    L, theta = abelian_theta(group, eta_exps, chi_exps)
    size = prod(group)
    hist: dict[int, int] = {}
    for e in theta:
        hist[-e % L] = hist.get(-e % L, 0) + 1
    G = Cyclotomic.from_exponents(L, hist)
    rho = G * G / size
    Lr = lcm(2, rho.N)
    j = discrete_log(rho, Lr)
    if j is None:
        raise TZeroBranchUnresolved("G^2/|U| is not a root of unity")
    D0 = G / root_of_unity(2 * Lr, j)
    if D0 * D0 != size:
        raise TZeroBranchUnresolved("D^2 != |U|")
    k = 0 if (D0.to_complex().real > 0) == (d_sign > 0) else 1
    if t0_sign < 0:
        k += 2
    t0_exp = j + Lr * k
    N = lcm(L, 4 * Lr)
    D = D0 if k % 2 == 0 else -D0
    # theta_x^(2|U|) = 1 for every x
    for e in theta:
        if (2 * size * e) % L:
            raise BadEtaChoice("theta_x^(2|U|) != 1")

    coords = list(product(*(range(n) for n in group)))
    flat = {x: idx for idx, x in enumerate(coords)}
    t_exp = [(t0_exp * (N // (4 * Lr)) + e * (N // L)) % N for e in theta]
    z = np.zeros((size, size), dtype=np.int64)
    for a, xa in enumerate(coords):
        for b, xb in enumerate(coords):
            diff = tuple((q - p) % n for p, q, n in zip(xa, xb, group))
            z[a, b] = t_exp[flat[diff]]
    params = {
        "group": group,
        "eta_exps": eta_exps,
        "chi_exps": chi_exps,
        "t0": [t0_exp % (4 * Lr), 4 * Lr],
        "theta_conductor": L,
        "theta_exps": theta,
        "D": D.to_json(),
    }
    return SpinMatrix(Ring(1), N, z, family="abelian", params=params)


def cyclic_bb_parameters(m: int, a_exp: int) -> dict:
    """Abelian-model parameters on Z_{m^2} reproducing the cyclic model: eta = a^(1-m), chi = a^2."""
    order = 2 * m * m
    return {
        "group": [m * m],
        "eta_exps": [a_exp * (1 - m) % order],
        "chi_exps": [a_exp % (m * m)],
    }


def build_cyclic_bb_model(m: int, a_exp: int = 1) -> SpinMatrix:
    """W(alpha, beta) = a^((beta-alpha)(beta-alpha-m)) on Z_{m^2}, a = zeta_{2m^2}^a_exp."""
    if m < 2 or m % 2:
        raise BadParameters(f"m must be a positive even integer, got {m}")
    order = 2 * m * m
    if gcd(a_exp, order) != 1:
        raise BadParameters(f"a = zeta_{order}^{a_exp} is not primitive")
    n = m * m
    d = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    z = (a_exp * d * (d - m)) % order
    return SpinMatrix(Ring(1), order, z, family="cyclic-bb", params={"m": m, "a_exp": a_exp % order})
