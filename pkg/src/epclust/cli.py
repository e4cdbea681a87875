"""Command-line front end.

Exit status: 0 on success, 2 for invalid input, 3 when a computation fails.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from . import linalg
from .exact import ExactScalar
from .errors import VALIDATION_ERRORS, DomainError, EPClustError, StructuralError
from .hamiltonians import (HamiltonianMatrix, ModelFamily, Toy7Family, build_from_decomposition,
                           build_pentadiagonal_special, build_toy7, pentadiagonal_ep_couplings)
from .metric import corridor_sweep, is_positive_definite, metric_from_left_eigenvectors, \
    sweep_to_csv
from .spectral import RANK_TOL, REALITY_TOL, eigen, find_ep, jordan_structure, transition_matrix
from .symbols import (Decomposition, classification_table, enumerate_decompositions,
                      sequence_report, table_to_csv, table_to_text)


def parse_decomposition_label(label: str, N: int | None = None) -> Decomposition:
    """Parse "n1xc1,n2xc2,..." into a validated Decomposition.

    N defaults to the sum of the component lengths.
    """
    if N is None:
        try:
            N = sum(int(tok.strip().partition("x")[0]) for tok in label.split(","))
        except ValueError:
            raise StructuralError(f"malformed decomposition label {label!r}") from None
    return Decomposition.from_label(label, N)


def _number(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list: {text!r}") from None


def _matrix_json(M, backend: str) -> dict:
    if backend == "exact":
        rows = [[ExactScalar.coerce(e).to_json() for e in row] for row in M]
    else:
        rows = [[float(e) for e in row] for row in linalg.to_float(M)]
    return {"n": len(rows), "backend": backend, "entries": rows}


# --- matrix sources -----------------------------------------------------------

def _add_source(p, family_only=False):
    g = p.add_argument_group("model")
    g.add_argument("--decomposition", metavar="LABEL",
                   help='direct-sum label "n1xc1,n2xc2,..."')
    g.add_argument("--n", type=int, help="total dimension (default: sum of lengths)")
    g.add_argument("--shift", type=_number, default=Fraction(0), help="EP energy eta")
    g.add_argument("--toy7", action="store_true", help="use the 7x7 pentadiagonal toy")
    if not family_only:
        g.add_argument("--t", type=_number, default=Fraction(1), help="coupling in [0, 1]")
        g.add_argument("--g", type=_number, help="toy coupling g (default 2)")
        g.add_argument("--pentadiagonal-ep", type=int, metavar="N",
                       help="pentadiagonal special model with both parity blocks at their EP")
        g.add_argument("--matrix", metavar="FILE", help="read a matrix JSON file")
    p.add_argument("--backend", choices=("auto", "exact", "float"), default="auto")


def _family(args) -> ModelFamily:
    if args.toy7:
        return Toy7Family()
    if args.decomposition:
        return ModelFamily(parse_decomposition_label(args.decomposition, args.n), args.shift)
    raise DomainError("choose a model with --decomposition or --toy7")


def _hamiltonian(args) -> tuple[HamiltonianMatrix, object]:
    """The selected matrix and its natural EP energy."""
    if args.matrix:
        with open(args.matrix, encoding="utf-8") as fh:
            H = HamiltonianMatrix.from_json(json.load(fh))
        if args.backend == "float":
            H = H.as_float()
        return H, args.shift
    if args.toy7:
        g = args.g if args.g is not None else Fraction(2)
        return build_toy7(g, args.backend), Fraction(7)
    if args.pentadiagonal_ep:
        N = args.pentadiagonal_ep
        H = build_pentadiagonal_special(N, pentadiagonal_ep_couplings(N), args.backend)
        return H, Fraction(0)
    if args.decomposition:
        dec = parse_decomposition_label(args.decomposition, args.n)
        return build_from_decomposition(dec, args.shift, args.t, args.backend), args.shift
    raise DomainError("choose a model with --decomposition, --toy7, --pentadiagonal-ep or --matrix")


# --- subcommands --------------------------------------------------------------

def cmd_sequence(args, out):
    if args.variant == "a":
        rep = sequence_report("a", args.max_n)
    else:
        rep = sequence_report(args.variant, args.max_j)
    head = "N" if rep.variant == "a" else "J"
    if args.format == "json":
        out.write(json.dumps({"variant": rep.variant,
                              "values": [list(v) for v in rep.values]}) + "\n")
    elif args.format == "csv":
        out.write(f"{head},{rep.variant}\n")
        out.writelines(f"{i},{c}\n" for i, c in rep.values)
    else:
        out.writelines(f"{i} {c}\n" for i, c in rep.values)


def cmd_decompose(args, out):
    decs = enumerate_decompositions(args.n, anomalous_only=args.anomalous)
    if args.format == "json":
        out.write(json.dumps([{"label": d.label, "K": d.K, "partition": list(d.partition)}
                              for d in decs]) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("label", "K", "partition"))
        w.writerows((d.label, d.K, d.partition_label) for d in decs)
    else:
        out.writelines(d.label + "\n" for d in decs)


def cmd_table(args, out):
    rows = classification_table(args.max_n)
    out.write(table_to_text(rows) if args.format == "text" else table_to_csv(rows))


def cmd_build(args, out):
    H, _ = _hamiltonian(args)
    out.write(H.dumps() + "\n")


def cmd_spectrum(args, out):
    H, _ = _hamiltonian(args)
    out.write(json.dumps(eigen(H, args.tol).to_json()) + "\n")


def _eta(args, default):
    return args.eta if args.eta is not None else default


def cmd_jordan(args, out):
    H, eta = _hamiltonian(args)
    js = jordan_structure(H, _eta(args, eta) if H.is_exact else float(_eta(args, eta)),
                          args.tol)
    out.write(js.dumps() + "\n")


def cmd_qmatrix(args, out):
    H, eta = _hamiltonian(args)
    eta = _eta(args, eta)
    js = jordan_structure(H, eta if H.is_exact else float(eta), args.tol)
    tm = transition_matrix(H, js, args.tol)
    backend = "exact" if linalg.is_exact_array(tm.Q) else "float"
    doc = {"jordan": js.to_json(), "Q": _matrix_json(tm.Q, backend),
           "residual": tm.residual, "det_abs": tm.det_abs}
    out.write(json.dumps(doc) + "\n")


def cmd_metric(args, out):
    H, _ = _hamiltonian(args)
    m = metric_from_left_eigenvectors(H, args.kappa)
    ok, lowest = is_positive_definite(m.Theta)
    doc = {"Theta": _matrix_json(m.Theta, "float"), "residual": m.residual,
           "positive_definite": ok, "min_eigenvalue": lowest, "condition": m.condition}
    out.write(json.dumps(doc) + "\n")


def cmd_ep(args, out):
    fam = _family(args)
    lo = args.lo if args.lo is not None else (1.5 if args.toy7 else 0.5)
    hi = args.hi if args.hi is not None else (2.5 if args.toy7 else 1.2)
    x = find_ep(fam, (lo, hi), args.tol)
    out.write(json.dumps({fam.native_name: x}) + "\n")


def cmd_sweep(args, out):
    fam = _family(args)
    if args.grid:
        grid = args.grid
    else:
        grid = list(np.linspace(args.start, args.stop, args.num))
    out.write(sweep_to_csv(corridor_sweep(fam, grid, args.kappa)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epclust",
        description="Clustered exceptional-point Hamiltonians: build, analyse, enumerate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sequence", help="scenario counts a(N), b(J) or c(J)")
    p.add_argument("--variant", choices=("a", "b", "c"), default="a")
    p.add_argument("--max-n", type=int, default=17)
    p.add_argument("--max-j", type=int, default=8)
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_sequence)

    p = sub.add_parser("decompose", help="list direct-sum decompositions of D(N)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--anomalous", action="store_true", help="drop the K=1 case")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("table", help="classification table of anomalous splits")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--format", choices=("text", "csv"), default="csv")
    p.set_defaults(func=cmd_table)

    for name, func, helptext in (("build", cmd_build, "emit a Hamiltonian as JSON"),
                                 ("spectrum", cmd_spectrum, "eigenvalues as JSON"),
                                 ("jordan", cmd_jordan, "Jordan structure at eta"),
                                 ("qmatrix", cmd_qmatrix, "transition matrix Q with HQ = QJ"),
                                 ("metric", cmd_metric, "metric Theta from left eigenvectors")):
        p = sub.add_parser(name, help=helptext)
        _add_source(p)
        p.add_argument("--format", choices=("json",), default="json")
        if name in ("spectrum",):
            p.add_argument("--tol", type=float, default=REALITY_TOL)
        if name in ("jordan", "qmatrix"):
            p.add_argument("--eta", type=_number, help="EP energy (default: model's own)")
            p.add_argument("--tol", type=float, default=RANK_TOL)
        if name == "metric":
            p.add_argument("--kappa", type=_float_list, help="positive weights, comma-separated")
        p.set_defaults(func=func)

    p = sub.add_parser("ep", help="locate the exceptional point by bisection")
    _add_source(p, family_only=True)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_ep)

    p = sub.add_parser("sweep", help="corridor sweep as CSV")
    _add_source(p, family_only=True)
    p.add_argument("--grid", type=_float_list, help="native couplings, comma-separated")
    p.add_argument("--start", type=float, default=0.0)
    p.add_argument("--stop", type=float, default=0.99)
    p.add_argument("--num", type=int, default=12)
    p.add_argument("--kappa", type=_float_list)
    p.set_defaults(func=cmd_sweep)

    for sp in sub.choices.values():
        sp.add_argument("--output", "-o", metavar="PATH", help="write to PATH instead of stdout")
    return parser


def run(args) -> int:
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                args.func(args, fh)
        else:
            args.func(args, sys.stdout)
    except VALIDATION_ERRORS as err:
        print(f"epclust: error: {err}", file=sys.stderr)
        return 2
    except EPClustError as err:
        print(f"epclust: computation failed: {err}", file=sys.stderr)
        return 3
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
