"""
Command-line front end.

    unidisc pair U1.json U2.json [--n-max N] [--grid SAMPLES]
    unidisc uir (--weyl D | FILE...) (--maxent | --probe FILE)
    unidisc probe E.json

Reports are JSON on stdout (or ``--out``); diagnostics go to stderr.
Exit codes: 0 success, 2 parse error, 3 domain precondition, 4 internal
inconsistency.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, covariant, matcore, pairdisc, probe
from .errors import DimensionMismatch, Inconsistent, NoConvergence, NotIrreducible, UnidiscError

EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_INTERNAL = 4


class MatrixParseError(ValueError):
    pass


def write_matrix(path, M) -> None:
    M = np.asarray(M, dtype=complex)
    doc = {
        "dim": int(M.shape[0]),
        "matrix": [[[float(f"{z.real:.17g}"), float(f"{z.imag:.17g}")] for z in row] for row in M],
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def parse_matrix(text: str, source: str = "<input>") -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(f"{source}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "dim" not in doc or "matrix" not in doc:
        raise MatrixParseError(f"{source}: expected an object with 'dim' and 'matrix'")
    d = doc["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise MatrixParseError(f"{source}: 'dim' must be a positive integer")
    try:
        arr = np.array(doc["matrix"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise MatrixParseError(f"{source}: 'matrix' is not a numeric array ({exc})") from exc
    if arr.shape != (d, d, 2):
        raise MatrixParseError(f"{source}: 'matrix' has shape {arr.shape}, expected {(d, d, 2)}")
    if not np.all(np.isfinite(arr)):
        raise MatrixParseError(f"{source}: non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def read_matrix(path) -> tuple[np.ndarray, str]:
    """Load a matrix file; returns the matrix and the SHA-256 of the file bytes."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise MatrixParseError(f"{path}: {exc.strerror}") from exc
    return parse_matrix(raw.decode("utf-8", errors="replace"), str(path)), hashlib.sha256(raw).hexdigest()


def _num(x):
    """Round to 12 significant digits; complex values become [re, im]."""
    if x is None:
        return None
    if isinstance(x, (complex, np.complexfloating)):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    v = float(f"{float(x):.12g}")
    return 0.0 if v == 0 else v


def _nums(xs):
    return [_num(x) for x in xs]


def _header(name: str, args, inputs: dict) -> dict:
    return {
        "tool": "unidisc",
        "version": __version__,
        "subcommand": name,
        "inputs": inputs,
        "tolerances": {
            "tol_alg": args.tol_alg,
            "tol_rank": args.tol_rank,
            "merge": pairdisc.MERGE_TOL,
            "angle": pairdisc.ANGLE_TOL,
        },
    }


def _load(path, args, need_unitary: bool):
    M, digest = read_matrix(path)
    if need_unitary:
        matcore.require_unitary(M, args.tol_alg, str(path))
    return M, {"path": str(path), "sha256": digest}


def cmd_pair(args) -> dict:
    U1, in1 = _load(args.u1, args, True)
    U2, in2 = _load(args.u2, args, True)
    if U1.shape != U2.shape:
        raise DimensionMismatch(
            f"{args.u1} is {U1.shape[0]}-dimensional but {args.u2} is {U2.shape[0]}-dimensional"
        )
    psi, rep = pairdisc.optimal_probe(U1, U2, tol=args.tol_alg)
    n_bar, rows = pairdisc.n_copies_analysis(U1, U2, args.n_max, tol=args.tol_alg)
    doc = _header("pair", args, {"u1": in1, "u2": in2})
    doc.update(
        dim=int(U1.shape[0]),
        phases=_nums(rep.phases.phases),
        multiplicities=list(rep.phases.multiplicities),
        delta=_num(rep.delta),
        r=_num(rep.r),
        p_error=_num(rep.p_error),
        exact=rep.exact,
        closest_point=_num(rep.closest_point),
        weights=_nums(rep.weights),
        optimal_probe=_nums(complex(z) for z in psi),
        helstrom_at_probe=_num(pairdisc.helstrom_oracle(U1 @ psi, U2 @ psi)),
        n_bar=n_bar,
        n_max=args.n_max,
        sweep_csv=pairdisc.sweep_csv(rows),
    )
    if args.grid > 0:
        p_grid, _ = pairdisc.grid_search_oracle(U1, U2, n_samples=args.grid, seed=0)
        doc["grid_oracle"] = {"samples": args.grid, "seed": 0, "p_error_min": _num(p_grid)}
    if args.csv:
        Path(args.csv).write_text(pairdisc.sweep_csv(rows))
    return doc


def _probe_arg(args, d: int):
    if args.maxent:
        return probe.maximally_entangled(np.eye(d)), {"probe": "maxent"}
    E, digest = read_matrix(args.probe)
    if E.shape[0] != d:
        raise DimensionMismatch(
            f"{args.probe} is {E.shape[0]}-dimensional but the representation is {d}-dimensional"
        )
    return probe.make_probe(E), {"probe": {"path": str(args.probe), "sha256": digest}}


def cmd_uir(args) -> dict:
    inputs: dict = {}
    if args.weyl is not None:
        if args.files:
            raise MatrixParseError("give either --weyl or element files, not both")
        rep = covariant.weyl_heisenberg(args.weyl)
        inputs["rep"] = f"weyl:{args.weyl}"
    else:
        if not args.files:
            raise MatrixParseError("no representation given (use --weyl D or element files)")
        elements, files = [], []
        for f in args.files:
            U, info = _load(f, args, True)
            elements.append(U)
            files.append(info)
        rep = covariant.validate_rep(elements, unitary_tol=args.tol_alg)
        inputs["rep"] = files
    if not covariant.is_irreducible(rep):
        raise NotIrreducible("representation is not irreducible (twirl test failed)")
    pr, probe_info = _probe_arg(args, rep.dim)
    inputs.update(probe_info)
    maxent = probe.is_maximally_entangled(pr)
    P = covariant.saturating_seed(np.sqrt(rep.dim) * pr.E) if maxent else None
    rpt = covariant.analyze(rep, pr, P, rel_tol=args.tol_rank)
    sd = probe.schmidt(pr, args.tol_rank)
    doc = _header("uir", args, inputs)
    doc.update(
        dim=rep.dim,
        group_order=rep.order,
        mu_g=_num(rep.mu_g),
        mu_G=_num(rep.mu_G),
        cocycle_residuals={k: _num(v) for k, v in rep.residuals.items()},
        schmidt_number=sd.schmidt_number,
        entanglement_entropy_bits=_num(sd.entanglement_entropy),
        maximally_entangled=maxent,
        dim_out=rpt.dim_out,
        chi_bits=_num(rpt.chi_bits),
        chi_closed_form_bits=_num(rpt.chi_closed_form_bits),
        omega_avg=_num(rpt.omega_avg),
        likelihood_seed="saturating" if maxent else None,
        likelihood=_num(rpt.likelihood),
        likelihood_bound=rep.dim,
    )
    return doc


def cmd_probe(args) -> dict:
    E, digest = read_matrix(args.e)
    pr = probe.make_probe(E)
    norm = float(np.linalg.norm(E))
    sd = probe.schmidt(pr, args.tol_rank)
    doc = _header("probe", args, {"e": {"path": str(args.e), "sha256": digest}})
    doc.update(
        dim=pr.dim,
        input_norm=_num(norm),
        normalization_factor=_num(1 / norm),
        schmidt_coefficients=_nums(sd.coefficients),
        schmidt_number=sd.schmidt_number,
        entanglement_entropy_bits=_num(sd.entanglement_entropy),
        maximally_entangled=probe.is_maximally_entangled(pr),
    )
    return doc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-alg", type=float, default=matcore.TOL_DECOMP,
                        help="unitarity tolerance for input matrices (default %(default)g)")
    common.add_argument("--tol-rank", type=float, default=matcore.TOL_DECOMP,
                        help="relative singular-value cutoff for ranks (default %(default)g)")
    common.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(prog="unidisc", description=__doc__.splitlines()[1].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pair", parents=[common], help="discriminate two unitaries")
    p.add_argument("u1")
    p.add_argument("u2")
    p.add_argument("--n-max", type=int, default=8, help="largest number of parallel uses to tabulate")
    p.add_argument("--grid", type=int, default=0, help="probe samples for the brute-force oracle (0: skip)")
    p.add_argument("--csv", metavar="PATH", help="also write the sweep table to this CSV file")
    p.set_defaults(func=cmd_pair)

    u = sub.add_parser("uir", parents=[common], help="figures of merit for a projective irrep")
    u.add_argument("files", nargs="*", help="one unitary per file")
    u.add_argument("--weyl", type=int, metavar="D", help="use the d-dimensional clock-and-shift group")
    g = u.add_mutually_exclusive_group(required=True)
    g.add_argument("--maxent", action="store_true", help="maximally entangled probe I/sqrt(d)")
    g.add_argument("--probe", metavar="FILE", help="probe operator E")
    u.set_defaults(func=cmd_uir)

    q = sub.add_parser("probe", parents=[common], help="Schmidt data of a probe operator")
    q.add_argument("e")
    q.set_defaults(func=cmd_probe)
    return parser


def render(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "n_max", 1) < 1:
        print("error: --n-max must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        doc = args.func(args)
    except MatrixParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (Inconsistent, NoConvergence) as exc:
        print(f"internal inconsistency: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except UnidiscError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = render(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
