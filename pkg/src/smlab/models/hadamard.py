"""Hadamard matrices (entries +-1, H H^T = r I) and their equivalence moves."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..matrix import SpinMatrix
from ..scalar import Ring
from .finite_field import GF, prime_power

__all__ = [
    "HadamardSource",
    "NotHadamard",
    "hadamard",
    "hadamard_array",
    "hadamard_transform",
    "normalized_order4",
    "paley1",
    "read_hadamard_file",
    "sylvester",
]


class NotHadamard(ValueError):
    def __init__(self, msg: str, witness: tuple[int, int] | None = None):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True)
class HadamardSource:
    """Where a Hadamard matrix comes from: sylvester(k), paley1(q), file(path) or explicit(entries)."""

    kind: str
    param: object = None
    entries: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False)

    @classmethod
    def parse(cls, text: str) -> "HadamardSource":
        """Parse ``sylvester:K``, ``paley1:Q``, ``file:PATH`` or ``normalized4``."""
        kind, _, arg = text.partition(":")
        if kind == "sylvester":
            return cls("sylvester", int(arg))
        if kind == "paley1":
            return cls("paley1", int(arg))
        if kind == "file":
            return cls("file", arg)
        if kind == "normalized4":
            return cls("explicit", None, tuple(map(tuple, normalized_order4().tolist())))
        raise ValueError(f"unknown Hadamard source {text!r}")

    @classmethod
    def explicit(cls, entries) -> "HadamardSource":
        return cls("explicit", None, tuple(tuple(int(v) for v in row) for row in entries))

    @property
    def order(self) -> int:
        return hadamard_array(self).shape[0]


def sylvester(k: int) -> np.ndarray:
    if k < 0:
        raise NotHadamard("Sylvester index must be non-negative")
    h = np.ones((1, 1), dtype=np.int64)
    base = np.array([[1, 1], [1, -1]], dtype=np.int64)
    for _ in range(k):
        h = np.kron(base, h)
    return h


def paley1(q: int) -> np.ndarray:
    """Paley type I matrix of order q + 1 (q = 3 mod 4 a prime power), normalised."""
    if prime_power(q) is None or q % 4 != 3:
        raise NotHadamard(f"Paley I needs a prime power q = 3 mod 4, got {q}")
    F = GF(q)
    Q = np.array([[F.quadratic_character(F.sub(a, b)) for b in range(q)] for a in range(q)], dtype=np.int64)
    S = np.zeros((q + 1, q + 1), dtype=np.int64)
    S[0, 1:] = 1
    S[1:, 0] = -1
    S[1:, 1:] = Q
    H = np.eye(q + 1, dtype=np.int64) + S
    # negate rows 1..q so that the first row and column are all +1
    H[1:] *= -1
    return H


def normalized_order4() -> np.ndarray:
    """The order-4 Hadamard matrix 2I - J (diagonal +1, off-diagonal -1)."""
    return 2 * np.eye(4, dtype=np.int64) - np.ones((4, 4), dtype=np.int64)


def read_hadamard_file(path: str | Path) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        chars = [c for c in line if not c.isspace()]
        bad = [c for c in chars if c not in "+-"]
        if bad:
            raise NotHadamard(f"unexpected character {bad[0]!r} in {path}")
        rows.append([1 if c == "+" else -1 for c in chars])
    if not rows or any(len(r) != len(rows) for r in rows):
        raise NotHadamard(f"{path} does not hold a square matrix")
    return check_hadamard(np.array(rows, dtype=np.int64))


def check_hadamard(H: np.ndarray) -> np.ndarray:
    H = np.asarray(H, dtype=np.int64)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHadamard("matrix is not square")
    if not np.all(np.abs(H) == 1):
        a, b = map(int, np.argwhere(np.abs(H) != 1)[0])
        raise NotHadamard(f"entry ({a},{b}) is not +-1", (a, b))
    r = H.shape[0]
    gram = H @ H.T - r * np.eye(r, dtype=np.int64)
    if np.any(gram):
        a, b = map(int, np.argwhere(gram)[0])
        raise NotHadamard(f"rows {a} and {b} are not orthogonal", (a, b))
    return H


def hadamard_array(src: HadamardSource) -> np.ndarray:
    if src.kind == "sylvester":
        H = sylvester(int(src.param))
    elif src.kind == "paley1":
        H = paley1(int(src.param))
    elif src.kind == "file":
        H = read_hadamard_file(src.param)
    elif src.kind == "explicit":
        H = np.array(src.entries, dtype=np.int64)
    else:
        raise ValueError(f"unknown Hadamard source kind {src.kind!r}")
    return check_hadamard(H)


def sign_exponents(H: np.ndarray, N: int = 2) -> np.ndarray:
    """Zeta_N exponents of a +-1 matrix."""
    return np.where(np.asarray(H) < 0, N // 2, 0).astype(np.int64)


def hadamard(src: HadamardSource | np.ndarray) -> SpinMatrix:
    H = hadamard_array(src) if isinstance(src, HadamardSource) else check_hadamard(src)
    return SpinMatrix(Ring(H.shape[0]), 2, sign_exponents(H), family="hadamard")


def hadamard_transform(H: np.ndarray, op: str, arg=None) -> np.ndarray:
    """Apply one equivalence move to a +-1 matrix.

    ops: ``negate_row`` (arg = row), ``negate_col`` (arg = column),
    ``swap_rows`` / ``swap_cols`` (arg = pair), ``permute_rows`` /
    ``permute_cols`` (arg = images).  Row permutation pi' gives
    H2(pi'(x), y) = H1(x, y); column permutation pi gives H2(x, pi(y)) = H1(x, y).
    """
    H = np.array(H, dtype=np.int64)
    if op == "negate_row":
        H[arg] *= -1
    elif op == "negate_col":
        H[:, arg] *= -1
    elif op == "swap_rows":
        a, b = arg
        H[[a, b]] = H[[b, a]]
    elif op == "swap_cols":
        a, b = arg
        H[:, [a, b]] = H[:, [b, a]]
    elif op == "permute_rows":
        out = np.empty_like(H)
        out[list(arg)] = H
        H = out
    elif op == "permute_cols":
        out = np.empty_like(H)
        out[:, list(arg)] = H
        H = out
    else:
        raise ValueError(f"unknown transform {op!r}")
    return H

