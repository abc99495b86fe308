"""Matrix files: versioned exact JSON ("smlab/1") and a complex-valued CSV export."""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .matrix import Labels, SpinMatrix
from .scalar import Ring

__all__ = ["FORMAT", "MalformedFile", "dumps_json", "matrix_from_json", "matrix_to_json", "read_matrix", "to_csv_complex", "write_matrix"]

FORMAT = "smlab/1"


class MalformedFile(ValueError):
    pass


def matrix_to_json(W: SpinMatrix) -> dict:
    z, k = W.zexp, W.upow
    header = {"fmt": FORMAT, "n": W.n, "N": W.N, "r": W.ring.r, "branch": W.ring.branch}
    if W.labels is not None:
        header["m"] = W.labels.m
        header["labels"] = {"m": W.labels.m, "r": W.labels.r}
    if W.family is not None:
        header["family"] = W.family
    if W.params:
        header["params"] = W.params
    header["entries"] = [
        [{"q": [1, 1], "zexp": int(z[a, b]), "upow": int(k[a, b])} for b in range(W.n)] for a in range(W.n)
    ]
    return header


def dumps_json(obj, jsonl: bool = False) -> str:
    if jsonl:
        return json.dumps(obj, separators=(",", ":"), default=_default)
    return json.dumps(obj, indent=1, default=_default)


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, Fraction):
        return [o.numerator, o.denominator]
    if hasattr(o, "to_json"):
        return o.to_json()
    return str(o)


def matrix_from_json(obj) -> SpinMatrix:
    try:
        if obj.get("fmt") != FORMAT:
            raise MalformedFile(f"unsupported format {obj.get('fmt')!r}")
        n, N = int(obj["n"]), int(obj["N"])
        ring = Ring(int(obj["r"]), int(obj["branch"]))
        rows = obj["entries"]
        if len(rows) != n or any(len(row) != n for row in rows):
            raise MalformedFile("entry array is not n x n")
        z = np.zeros((n, n), dtype=np.int64)
        k = np.zeros((n, n), dtype=np.int64)
        for a, row in enumerate(rows):
            for b, e in enumerate(row):
                q = Fraction(int(e["q"][0]), int(e["q"][1]))
                if q not in (1, -1):
                    raise MalformedFile(f"entry ({a},{b}) is not a unit monomial")
                z[a, b] = int(e["zexp"]) + (N // 2 if q < 0 else 0)
                k[a, b] = int(e["upow"])
        labels = None
        if "labels" in obj:
            labels = Labels(int(obj["labels"]["m"]), int(obj["labels"]["r"]))
        W = SpinMatrix(ring, N, z, k, labels=labels, family=obj.get("family"), params=obj.get("params"))
    except MalformedFile:
        raise
    except (KeyError, TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise MalformedFile(f"malformed matrix file: {exc}") from exc
    if W.N != N:
        raise MalformedFile(f"conductor {N} is not compatible with r={ring.r}")
    return W


def write_matrix(W: SpinMatrix, path: str | Path | None) -> str:
    text = dumps_json(matrix_to_json(W), jsonl=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def read_matrix(path: str | Path) -> SpinMatrix:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedFile(f"cannot read {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedFile("top level is not an object")
    return matrix_from_json(obj)


def to_csv_complex(W: SpinMatrix) -> str:
    """One row per matrix row, cells as ``re+imj`` with 17 significant digits."""
    C = W.complex_entries()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in C:
        writer.writerow([f"{v.real:.17g}{v.imag:+.17g}j" for v in row])
    return buf.getvalue()
