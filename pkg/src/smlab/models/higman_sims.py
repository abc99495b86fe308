"""The Higman-Sims graph from PG(2,4) and Jaeger's spin model on it.

Vertices: a base vertex, the 22 points of the Steiner system S(3,6,22)
(21 points of PG(2,4) plus one point at infinity), and its 77 blocks
(21 lines extended by infinity, and one class of 56 hyperovals).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..matrix import SpinMatrix
from ..scalar import Ring

__all__ = [
    "ConstructionInvariantViolated",
    "HigmanSimsGraph",
    "higman_sims_graph",
    "jaeger_model",
    "srg_parameters",
    "steiner_blocks",
]


class ConstructionInvariantViolated(RuntimeError):
    pass


# GF(4) = {0, 1, w, w^2} encoded 0..3; addition is xor
_GF4_MUL = [
    [0, 0, 0, 0],
    [0, 1, 2, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
]


def _dot(p, q) -> int:
    s = 0
    for a, b in zip(p, q):
        s ^= _GF4_MUL[a][b]
    return s


def _projective_points() -> list[tuple[int, int, int]]:
    pts = []
    for v in range(1, 64):
        vec = (v >> 4, (v >> 2) & 3, v & 3)
        lead = next(c for c in vec if c)
        if lead == 1:
            pts.append(vec)
    return pts


def _lines(points) -> list[frozenset[int]]:
    # lines are the zero sets of the dual points
    return [frozenset(i for i, p in enumerate(points) if _dot(p, l) == 0) for l in points]


def _hyperovals(lines) -> list[frozenset[int]]:
    line_sets = [set(l) for l in lines]
    on_line = {}
    for li, l in enumerate(line_sets):
        for a, b in combinations(sorted(l), 2):
            on_line[(a, b)] = li
    out = []
    for six in combinations(range(21), 6):
        used = set()
        ok = True
        for a, b in combinations(six, 2):
            li = on_line[(a, b)]
            if li in used:
                ok = False
                break
            used.add(li)
        if ok:
            out.append(frozenset(six))
    return out


def steiner_blocks() -> list[frozenset[int]]:
    """Blocks of S(3,6,22) on points 0..21 (21 = infinity)."""
    points = _projective_points()
    lines = _lines(points)
    ovals = _hyperovals(lines)
    if len(ovals) != 168:
        raise ConstructionInvariantViolated(f"found {len(ovals)} hyperovals, expected 168")
    base = ovals[0]
    cls = [o for o in ovals if len(o & base) % 2 == 0]
    if len(cls) != 56 or any(len(o & p) % 2 for o, p in combinations(cls, 2)):
        raise ConstructionInvariantViolated("hyperovals with even intersections do not form a class of 56")
    blocks = [l | {21} for l in lines] + cls
    _check_steiner(blocks)
    return blocks


def _check_steiner(blocks):
    count = {}
    for B in blocks:
        if len(B) != 6:
            raise ConstructionInvariantViolated("block size is not 6")
        for t in combinations(sorted(B), 3):
            count[t] = count.get(t, 0) + 1
    if len(count) != 22 * 21 * 20 // 6 or any(v != 1 for v in count.values()):
        raise ConstructionInvariantViolated("blocks do not form S(3,6,22)")


@dataclass(frozen=True)
class HigmanSimsGraph:
    adjacency: np.ndarray
    blocks: tuple[frozenset[int], ...]

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


def higman_sims_graph() -> HigmanSimsGraph:
    """Vertex 0 is the base vertex, 1..22 the points, 23..99 the blocks."""
    blocks = steiner_blocks()
    n = 1 + 22 + len(blocks)
    A = np.zeros((n, n), dtype=bool)
    A[0, 1:23] = True
    for bi, B in enumerate(blocks):
        v = 23 + bi
        for p in B:
            A[1 + p, v] = True
        for bj in range(bi + 1, len(blocks)):
            if not (B & blocks[bj]):
                A[v, 23 + bj] = True
    A = A | A.T
    if n != 100 or set(A.sum(axis=1).tolist()) != {22}:
        raise ConstructionInvariantViolated("graph is not 22-regular on 100 vertices")
    A.setflags(write=False)
    return HigmanSimsGraph(A, tuple(blocks))


def srg_parameters(A: np.ndarray) -> tuple[int, int, int, int] | None:
    """(n, k, lambda, mu) by brute force over all pairs, or None if not strongly regular."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    degs = set(A.sum(axis=1).tolist())
    if len(degs) != 1:
        return None
    common = A @ A
    lam, mu = set(), set()
    for a in range(n):
        for b in range(a + 1, n):
            (lam if A[a, b] else mu).add(int(common[a, b]))
    if len(lam) > 1 or len(mu) > 1:
        return None
    return n, degs.pop(), lam.pop() if lam else 0, mu.pop() if mu else 0


def jaeger_model(graph: HigmanSimsGraph | None = None) -> SpinMatrix:
    """W_J = -tau^5 I - tau A + tau^-1 (J - A - I), tau = U in the r = 9 ring (tau^2 + tau^-2 = 3)."""
    graph = graph or higman_sims_graph()
    A = graph.adjacency
    n = A.shape[0]
    eye = np.eye(n, dtype=bool)
    z = np.where(eye | A, 1, 0).astype(np.int64)
    k = np.where(eye, 5, np.where(A, 1, -1)).astype(np.int64)
    return SpinMatrix(Ring(9, 0), 2, z, k, family="higman-sims")
