"""Command-line interface: construct, verify, invariants, equiv, report, export.

Exit codes: 0 success, 1 a requested check failed, 2 bad flags or budget,
3 construction error, 4 malformed matrix file.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from math import gcd

from . import __version__
from .cyclo import Cyclotomic, gauss_sum, root_of_unity
from .io import MalformedFile, dumps_json, read_matrix, to_csv_complex, write_matrix
from .kernel import FAIL
from .matrix import NotPermutation
from .models import (
    BadEtaChoice,
    BadParameters,
    ConstructionInvariantViolated,
    HadamardSource,
    ModelSpec,
    NotHadamard,
    TZeroBranchUnresolved,
    build_index_m_model,
    build_model,
)
from .scalar import ParameterMismatch

EXIT_FAIL, EXIT_USAGE, EXIT_CONSTRUCT, EXIT_MALFORMED = 1, 2, 3, 4
CONSTRUCTION_ERRORS = (
    BadParameters,
    BadEtaChoice,
    ConstructionInvariantViolated,
    NotHadamard,
    ParameterMismatch,
    TZeroBranchUnresolved,
    OSError,
)


class BudgetExceeded(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated command line; every computation reads from here."""

    command: str
    output: str | None = None
    precision_bits: int = 256
    threads: int = 1
    jsonl: bool = False
    options: dict = field(default_factory=dict)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _hadamard(text: str) -> HadamardSource:
    try:
        return HadamardSource.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_model_flags(p: argparse.ArgumentParser, required: bool) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--family", required=required, help="whua, whub, potts, abelian, cyclic-bb, higman-sims")
    g.add_argument("--m", type=int, help="index parameter m (even)")
    g.add_argument("--r", type=int, help="order of the Hadamard matrix / Potts size")
    g.add_argument("--hadamard", type=_hadamard, help="sylvester:K, paley1:Q, file:PATH or normalized4")
    g.add_argument("--a-exp", type=int, default=1, help="a = zeta_{2m^2}^A")
    g.add_argument("--b-exp", type=int, default=1, help="b = zeta_{m^2}^B")
    g.add_argument("--eta-exp", type=int, default=1, help="eta = zeta_m^E")
    g.add_argument("--u-branch", type=int, help="which root u of u^8 - (r-2)u^4 + 1 (0..7)")
    g.add_argument("--group", type=_int_list, help="abelian group orders, e.g. 2,2")
    g.add_argument("--eta-exps", type=_int_list, help="eta_i = zeta_{2n_i}^e_i")
    g.add_argument("--chi-exps", type=_int_list, help="chi_{a_i}(a_i) = zeta_{n_i}^c_i")
    g.add_argument("--d-sign", type=int, choices=(1, -1), default=1)
    g.add_argument("--t0-sign", type=int, choices=(1, -1), default=1)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jsonl", action="store_true", help="one JSON object per line")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: available CPUs)")
    p.add_argument("--precision-bits", type=int, default=None, help="interval precision (default $SMLAB_PRECISION_BITS or 256)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smlab", description="Exact spin models built from Hadamard matrices.")
    parser.add_argument("--version", action="version", version=f"smlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a model and write its matrix file")
    _add_model_flags(p, required=True)
    p.add_argument("-o", "--output", help="output path (default: stdout)")
    _common(p)

    p = sub.add_parser("verify", help="run type II / type III / index checks")
    p.add_argument("file", nargs="?", help="matrix file (or give model flags)")
    _add_model_flags(p, required=False)
    p.add_argument("--type2", action="store_true")
    p.add_argument("--type3", nargs="?", const="auto", choices=("auto", "full", "block"))
    p.add_argument("--index", action="store_true")
    _common(p)

    p = sub.add_parser("invariants", help="E(W), mu(W) and the invariant signature")
    p.add_argument("file", nargs="?")
    _add_model_flags(p, required=False)
    p.add_argument("--obstructions", action="store_true", help="also replay the decomposability obstructions")
    _common(p)

    p = sub.add_parser("equiv", help="equivalence tests and explicit equivalence maps")
    p.add_argument("files", nargs="*", help="two matrix files to compare")
    p.add_argument("--max-n", type=int, default=8, help="exhaustive search limit")
    p.add_argument("--move", choices=("col_perm", "row_perm", "col_negate", "row_negate"))
    p.add_argument("--arg", type=_int_list, help="permutation images, or the negated row/column")
    p.add_argument("--psi", action="store_true", help="check the psi map against the cyclic model")
    p.add_argument("--t", type=int, default=0)
    p.add_argument("--small-u", action="store_true", help="u^4 = 1 scalar identities for r = 1")
    p.add_argument("--r4", action="store_true", help="r = 4 tensor decomposition")
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--a-exp", type=int, default=1)
    p.add_argument("--b-exp", type=int, default=None)
    p.add_argument("--u-branch", type=int, default=0)
    p.add_argument("--hadamard", type=_hadamard)
    _common(p)

    p = sub.add_parser("report", help="invariant table rows, Gauss sums, obstruction traces")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--table1", action="store_true")
    mode.add_argument("--gauss", action="store_true")
    mode.add_argument("--obstructions", action="store_true")
    p.add_argument("--m", type=_int_list, default=[2, 4])
    p.add_argument("--r", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--a-exp", type=int, default=1)
    p.add_argument("--budget", type=int, default=256, help="largest matrix size n allowed")
    p.add_argument("--json", action="store_true", help="JSON instead of the text table")
    _common(p)

    p = sub.add_parser("export", help="convert a matrix file")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "csv-complex"), default="json")
    p.add_argument("-o", "--output")
    _common(p)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    if threads < 1:
        raise BudgetExceeded("--threads must be positive")
    prec = args.precision_bits or int(os.environ.get("SMLAB_PRECISION_BITS", "256"))
    if prec < 64:
        raise BudgetExceeded("--precision-bits must be at least 64")
    os.environ["SMLAB_PRECISION_BITS"] = str(prec)
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "threads", "precision_bits", "jsonl")}
    return RunConfig(args.command, getattr(args, "output", None), prec, threads, args.jsonl, opts)


def _spec(o: dict) -> ModelSpec:
    return ModelSpec(
        family=o["family"],
        m=o.get("m"),
        r=o.get("r"),
        hadamard=o.get("hadamard"),
        a_exp=o.get("a_exp", 1),
        b_exp=o.get("b_exp", 1),
        eta_exp=o.get("eta_exp", 1),
        u_branch=o.get("u_branch"),
        group=o.get("group") or [],
        eta_exps=o.get("eta_exps"),
        chi_exps=o.get("chi_exps"),
        d_sign=o.get("d_sign", 1),
        t0_sign=o.get("t0_sign", 1),
    )


def _load(cfg: RunConfig):
    o = cfg.options
    if o.get("file"):
        return read_matrix(o["file"])
    if o.get("family"):
        return build_model(_spec(o))
    raise BudgetExceeded("give a matrix file or --family")


def _emit(cfg: RunConfig, obj, out=None) -> None:
    out = out or sys.stdout
    out.write(dumps_json(obj, jsonl=cfg.jsonl) + "\n")


def cmd_construct(cfg: RunConfig) -> int:
    W = build_model(_spec(cfg.options))
    text = write_matrix(W, cfg.output)
    if cfg.output is None:
        sys.stdout.write(text)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import check_type_ii, check_type_iii, compute_index

    o = cfg.options
    W = _load(cfg)
    if not (o["type2"] or o["type3"] or o["index"]):
        o["type2"] = True
    failed = False
    reports = []
    if o["type2"]:
        reports.append(check_type_ii(W, cfg.threads).to_json())
    if o["type3"]:
        mode = {"block": "blockwise"}.get(o["type3"], o["type3"])
        rep = check_type_iii(W, mode, cfg.threads).to_json()
        reports.append(rep)
    if o["index"]:
        try:
            reports.append(compute_index(W, cfg.threads).to_json())
        except NotPermutation as exc:
            reports.append({"check": "index", "verdict": FAIL, "witness": {"entry": list(exc.witness)}, "reason": str(exc)})
    for rep in reports:
        failed |= rep["verdict"] == FAIL
        _emit(cfg, rep)
    return EXIT_FAIL if failed else 0


def cmd_invariants(cfg: RunConfig) -> int:
    from .invariants import compute_E, compute_mu, decomposability_obstructions, invariant_signature

    W = _load(cfg)
    sig = invariant_signature(W)
    out = {
        "n": W.n,
        "family": W.family,
        "index": sig["index"],
        "E": compute_E(W).to_json(),
        "mu": compute_mu(W).to_json(),
    }
    if cfg.options.get("obstructions"):
        out["obstructions"] = decomposability_obstructions(W).to_json()
    _emit(cfg, out)
    return 0


def cmd_equiv(cfg: RunConfig) -> int:
    from .invariants import (
        equivalence_map,
        exhaustive_equivalence,
        hadamard_move,
        invariant_signature,
        psi_equivalence,
        r4_decomposition,
        small_u_equivalences,
    )
    from .models import hadamard_array
    from .models.hadamard_models import _default_hadamard

    o = cfg.options
    m = o.get("m")
    if o["files"]:
        if len(o["files"]) != 2:
            raise BudgetExceeded("equiv takes exactly two files")
        W1, W2 = (read_matrix(f) for f in o["files"])
        s1, s2 = invariant_signature(W1), invariant_signature(W2)
        differ = [k for k in s1 if s1[k] != s2[k]]
        out = {"invariants_agree": not differ, "differing": differ}
        if not differ and W1.n <= o["max_n"]:
            hit = exhaustive_equivalence(W1, W2, o["max_n"])
            out["equivalent"] = hit is not None
            if hit:
                out["c_exp_mod4"], out["sigma"] = hit[0], list(hit[1].images)
        elif differ:
            out["equivalent"] = False
        _emit(cfg, out)
        return 0 if out.get("equivalent", True) else EXIT_FAIL
    if m is None:
        raise BudgetExceeded("--m is required")
    if o["move"]:
        r = o.get("r") or 2
        src = o.get("hadamard")
        H1 = hadamard_array(src) if src else _default_hadamard(r)
        arg = o.get("arg")
        if o["move"] in ("col_negate", "row_negate"):
            arg = arg[0] if arg else 0
        H2 = hadamard_move(H1, o["move"], arg)
        perm = equivalence_map(o["move"], m, H1.shape[0], arg)
        W1 = build_index_m_model(m, H1.shape[0], o["a_exp"], H1, o.get("u_branch"))
        W2 = build_index_m_model(m, H1.shape[0], o["a_exp"], H2, o.get("u_branch"))
        ok = W2.permute(perm).equals(W1)
        _emit(cfg, {"move": o["move"], "arg": arg, "permutation": list(perm.images), "holds": ok})
        return 0 if ok else EXIT_FAIL
    if o["psi"]:
        rep = psi_equivalence(m, o["t"], o["a_exp"])
        out = {k: v for k, v in vars(rep).items()}
        out["passed"] = rep.passed
        _emit(cfg, out)
        return 0 if rep.passed else EXIT_FAIL
    if o["small_u"]:
        out = small_u_equivalences(m, o["u_branch"], o["a_exp"])
        _emit(cfg, out)
        return 0 if out.get("equivalent_via_psi", out["holds"]) else EXIT_FAIL
    if o["r4"]:
        out = r4_decomposition(m, o["a_exp"], o.get("b_exp"), o["u_branch"])
        out.pop("relabel")
        _emit(cfg, out)
        return 0 if out["tensor_equal"] and out["potts_is_u3_H"] else EXIT_FAIL
    raise BudgetExceeded("nothing to do: give two files or one of --move/--psi/--small-u/--r4")


def cmd_report(cfg: RunConfig) -> int:
    from .invariants import decomposability_obstructions, format_table1, table1

    o = cfg.options
    budget = o["budget"]
    if o["table1"]:
        for m in o["m"]:
            for r in o["r"]:
                if m * m * r > budget:
                    raise BudgetExceeded(f"n = {m * m * r} exceeds --budget {budget}")
        rows = table1(o["m"], o["r"], o["a_exp"], budget=budget)
        if o["json"] or cfg.jsonl:
            for row in rows:
                _emit(cfg, row)
        else:
            print(format_table1(rows))
        ok = all(all(v for k, v in row["expected"].items() if k.endswith("_ok")) for row in rows)
        return 0 if ok else EXIT_FAIL
    if o["gauss"]:
        ok = True
        for m in o["m"]:
            if m <= 0 or m % 2:
                raise BadParameters(f"m must be even, got {m}")
            order = 2 * m * m
            values = []
            for e in range(order):
                if gcd(e, order) == 1:
                    g = gauss_sum(m, root_of_unity(order, e))
                    if g not in values:
                        values.append(g)
            row = {
                "m": m,
                "primitive_roots": sum(gcd(e, order) == 1 for e in range(order)),
                "sums": [str(g.coeffs[0]) if g.is_rational() else repr(g) for g in values],
                "equals_m": values == [Cyclotomic.rational(m)],
            }
            ok &= row["equals_m"]
            if o["json"] or cfg.jsonl:
                _emit(cfg, row)
            else:
                print(f"m={m}: sum over x of xi^(-x(x-m)) = {', '.join(row['sums'])} for all {row['primitive_roots']} primitive xi")
        return 0 if ok else EXIT_FAIL
    ok = True
    for m in o["m"]:
        for r in o["r"]:
            if m * m * r > budget:
                raise BudgetExceeded(f"n = {m * m * r} exceeds --budget {budget}")
            rep = decomposability_obstructions(build_index_m_model(m, r, o["a_exp"]))
            ok &= rep.all_excluded
            if o["json"] or cfg.jsonl:
                _emit(cfg, rep.to_json())
            else:
                print(f"{rep.target}: E exponents {sorted(rep.E.exponents)}, mu = {rep.mu.value}")
                for shape in rep.candidate_shapes:
                    print(f"  [{shape['verdict']}] {shape['shape']}  ({shape['lemma']})")
                    for line in shape["trace"]:
                        print(f"      {line}")
    return 0 if ok else EXIT_FAIL


def cmd_export(cfg: RunConfig) -> int:
    W = read_matrix(cfg.options["file"])
    text = to_csv_complex(W) if cfg.options["format"] == "csv-complex" else write_matrix(W, None)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "invariants": cmd_invariants,
    "equiv": cmd_equiv,
    "report": cmd_report,
    "export": cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    from .invariants import NotApplicable
    from .verify import ModeUnavailable

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[cfg.command](cfg)
    except MalformedFile as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (BudgetExceeded, ModeUnavailable, NotApplicable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CONSTRUCTION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCT


if __name__ == "__main__":
    sys.exit(main())
