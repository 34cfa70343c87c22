"""Command-line entry point: spectra, state construction, verification, scans.

Exit codes: 0 success, 2 domain errors (bad input, off-manifold points,
out-of-region tetrads), 1 numerical failures.  Data goes to stdout or the
--out file; diagnostics go to stderr.  Identical inputs produce
byte-identical output.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .closed_form import beta_roots, construct_phi, state_residual
from .errors import DomainError, NchoError, ParseError
from .matrix_core import CanonicalParams, canonicalize, from_tetrad, validate_pair
from .operator_assembly import CoeffVector, Parity
from .regions import export_grid, scan_grid
from .spectral import convergence_study, full_spectrum

_PAIR_SCHEMA = ('{"A": [[entry, entry], [entry, entry]], "B": [[...]]} '
                'where entry is a number or an [re, im] pair')


def _entry(v, where: str) -> complex:
    if isinstance(v, bool):
        raise ParseError(f"{where}: booleans are not matrix entries")
    if isinstance(v, (int, float)):
        return complex(v)
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                    for x in v)):
        return complex(v[0], v[1])
    raise ParseError(f"{where}: entries are numbers or [re, im] pairs, "
                     f"got {v!r}")


def _matrix(obj, key: str) -> np.ndarray:
    if (not isinstance(obj, list) or len(obj) != 2
            or any(not isinstance(row, list) or len(row) != 2
                   for row in obj)):
        raise ParseError(f'"{key}" must be a 2x2 nested list')
    m = np.array([[_entry(obj[i][j], f'"{key}"[{i}][{j}]')
                   for j in range(2)] for i in range(2)])
    if np.all(m.imag == 0.0):
        return m.real
    return m


def parse_pair_file(path):
    """Validated matrix pair from a JSON file; raises ParseError with the
    offending location on malformed input."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict) or "A" not in obj or "B" not in obj:
        raise ParseError(f"{path}: expected {_PAIR_SCHEMA}")
    return validate_pair(_matrix(obj["A"], "A"), _matrix(obj["B"], "B"))


def parse_coeffs_file(path) -> CoeffVector:
    """Coefficient blocks from JSON: {"parity": "even"|"odd",
    "blocks": [[entry, entry], ...]}."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}, "
                         f"column {exc.colno}: {exc.msg}") from exc
    if (not isinstance(obj, dict) or "parity" not in obj
            or "blocks" not in obj):
        raise ParseError(f'{path}: expected keys "parity" and "blocks"')
    try:
        parity = Parity(str(obj["parity"]).lower())
    except ValueError:
        raise ParseError(f'{path}: parity must be "even" or "odd", '
                         f'got {obj["parity"]!r}')
    rows = obj["blocks"]
    if (not isinstance(rows, list) or not rows
            or any(not isinstance(r, list) or len(r) != 2 for r in rows)):
        raise ParseError(f'{path}: "blocks" must be a nonempty list of '
                         f"2-entry rows")
    blocks = np.array([[_entry(r[j], f'blocks[{i}][{j}]') for j in range(2)]
                       for i, r in enumerate(rows)])
    if np.all(blocks.imag == 0.0):
        blocks = blocks.real
    return CoeffVector(parity, blocks)


def _parse_tetrad(text: str) -> CanonicalParams:
    parts = text.split(",")
    if len(parts) != 4:
        raise ParseError(f"tetrad needs 4 comma-separated numbers "
                         f"(b,a,c,xi), got {text!r}")
    try:
        b, a, c, xi = (float(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"tetrad {text!r}: {exc}") from exc
    if xi < 0.0:
        raise ParseError(f"tetrad coupling is a magnitude, needs xi >= 0, "
                         f"got {xi}")
    return from_tetrad(b, a, c, xi)


def _resolve_params(args) -> CanonicalParams:
    if args.pair is not None:
        return canonicalize(parse_pair_file(args.pair))
    return _parse_tetrad(args.tetrad)


def _parse_range(text: str, name: str):
    parts = str(text).split(":")
    if len(parts) not in (2, 3):
        raise ParseError(f"{name} must look like lo:hi or lo:hi:n, "
                         f"got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ParseError(f"{name} {text!r}: {exc}") from exc
    if len(parts) == 2:
        return (lo, hi)
    try:
        n = int(parts[2])
    except ValueError as exc:
        raise ParseError(f"{name} {text!r}: {exc}") from exc
    return (lo, hi, n)


def _jsonify(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return [_jsonify(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonify(v) for v in x]
    if isinstance(x, np.generic):
        return _jsonify(x.item())
    return x


def _canonical_echo(params: CanonicalParams) -> dict:
    return {
        "b": params.b,
        "a": params.a,
        "c": params.c,
        "xi": _jsonify(complex(params.xi)),
        "scale_b1": params.b1,
        "u": _jsonify(params.u.astype(complex)),
    }


def _emit(args, data) -> None:
    raw = data if isinstance(data, bytes) else data.encode()
    if getattr(args, "out", None):
        Path(args.out).write_bytes(raw)
    else:
        sys.stdout.write(raw.decode())


def _emit_json(args, payload: dict) -> None:
    _emit(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def cmd_spectrum(args) -> int:
    params = _resolve_params(args)
    result = full_spectrum(params, n_blocks=args.blocks, k=args.k,
                           alpha=args.alpha)
    s = params.b1
    if args.format == "csv":
        lines = ["index,eigenvalue,parity,convergence"]
        for i in range(len(result)):
            lines.append(f"{i + 1},{result.eigenvalues[i] * s:.17g},"
                         f"{result.parities[i].value},"
                         f"{result.convergence_estimate[i] * s:.17g}")
        _emit(args, "\n".join(lines) + "\n")
        return 0
    _emit_json(args, {
        "eigenvalues": _jsonify(result.eigenvalues * s),
        "parities": [p.value for p in result.parities],
        "convergence": _jsonify(result.convergence_estimate * s),
        "n_blocks": result.n_blocks_used,
        "alpha": result.alpha_used,
        "canonical": _canonical_echo(params),
    })
    return 0


def cmd_closed_form(args) -> int:
    params = _resolve_params(args)
    sol = construct_phi(params, args.sign, args.parity,
                        tol_membership=args.tol)
    root = sol.beta_root
    _emit_json(args, {
        "parity": sol.parity.value,
        "sign": root.sign.value,
        "beta": root.beta,
        "beta_sq": root.beta_sq,
        "defect": root.defect,
        "kernel_u2": _jsonify(root.kernel_u2.astype(complex)),
        "cokernel_u2t": _jsonify(root.cokernel_u2t.astype(complex)),
        "lambda": sol.lam,
        "lambda_original_units": sol.lam * params.b1,
        "gamma": _jsonify(sol.gamma),
        "gamma_tilde": _jsonify(sol.gamma_tilde),
        "coeff_blocks": _jsonify(sol.coeff_blocks.blocks.astype(complex)),
        "residual_membership": sol.residual_membership,
        "residual_scale": sol.residual_scale,
        "residual_eigen": sol.residual_eigen,
        "canonical": _canonical_echo(params),
    })
    return 0


def cmd_verify(args) -> int:
    params = _resolve_params(args)
    coeffs = parse_coeffs_file(args.coeffs)
    lam = args.lam / params.b1
    alpha = args.alpha if args.alpha is not None else beta_roots(params)[1].beta
    residual = state_residual(params, alpha, coeffs, lam)
    _emit_json(args, {
        "residual": residual,
        "lambda_canonical": lam,
        "alpha": alpha,
        "parity": coeffs.parity.value,
        "n_blocks": coeffs.n_blocks,
        "canonical": _canonical_echo(params),
    })
    return 0


def cmd_region_scan(args) -> int:
    grid = scan_grid(_parse_range(args.b_range, "--b-range"),
                     _parse_range(args.a_range, "--a-range"),
                     _parse_range(args.c_range, "--c-range"),
                     resolution=args.resolution, tol=args.tol,
                     xi_abs=args.xi)
    _emit(args, export_grid(grid, args.format))
    counts = grid.flag_counts()
    print(f"scanned {grid.shape[0]}x{grid.shape[1]}x{grid.shape[2]} cells: "
          + ", ".join(f"{k}={v}" for k, v in counts.items()),
          file=sys.stderr)
    return 0


def cmd_convergence(args) -> int:
    params = _resolve_params(args)
    sizes = []
    for part in str(args.blocks_list).split(","):
        try:
            sizes.append(int(part))
        except ValueError as exc:
            raise ParseError(f"--blocks-list {args.blocks_list!r}: "
                             f"{exc}") from exc
    alpha = args.alpha if args.alpha is not None else beta_roots(params)[1].beta
    study = convergence_study(params, alpha, args.parity, sizes, args.k)
    if args.format == "csv":
        lines = ["n_blocks," + ",".join(f"lam_{j + 1}"
                                        for j in range(args.k))]
        for i, nb in enumerate(study.n_blocks):
            row = ",".join(f"{v:.17g}" for v in study.eigenvalues[i])
            lines.append(f"{nb},{row}")
        _emit(args, "\n".join(lines) + "\n")
        return 0
    _emit_json(args, {
        "n_blocks": list(study.n_blocks),
        "eigenvalues": _jsonify(study.eigenvalues * params.b1),
        "violations": _jsonify(study.violations),
        "alpha": alpha,
        "parity": str(Parity(args.parity).value),
        "canonical": _canonical_echo(params),
    })
    return 0


def cmd_report(args) -> int:
    from .plotting import render_report  # deferred: pulls in matplotlib

    summary = render_report(args.out_dir,
                            b_range=_parse_range(args.b_range, "--b-range"),
                            a_range=_parse_range(args.a_range, "--a-range"),
                            resolution=args.resolution, xi_abs=args.xi,
                            tol=args.tol)
    _emit_json(args, summary)
    return 0


def _add_input_group(sub) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--pair", metavar="FILE",
                       help=f"JSON matrix pair: {_PAIR_SCHEMA}")
    group.add_argument("--tetrad", metavar="B,A,C,XI",
                       help="canonical parameters b,a,c,|xi|")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncho",
        description="Spectra and finite-support eigenpairs of two-channel "
                    "oscillators with matrix coefficients.",
        epilog="NCHO_THREADS caps the scan thread pool.")
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="lowest merged eigenvalues")
    _add_input_group(sp)
    sp.add_argument("-k", type=int, default=6, help="eigenvalue count")
    sp.add_argument("-N", "--blocks", type=int, default=None,
                    help="blocks per sector (default: adaptive 150..600)")
    sp.add_argument("--alpha", type=float, default=None,
                    help="basis scale (default: minus frequency root)")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--out", metavar="PATH")
    sp.set_defaults(func=cmd_spectrum)

    cf = subs.add_parser("closed-form",
                         help="construct a finite-support eigenpair")
    _add_input_group(cf)
    cf.add_argument("--sign", choices=("plus", "minus"), required=True)
    cf.add_argument("--parity", choices=("even", "odd"), default="even")
    cf.add_argument("--tol", type=float, default=1e-8,
                    help="membership tolerance relative to the scale")
    cf.add_argument("--out", metavar="PATH")
    cf.set_defaults(func=cmd_closed_form)

    vf = subs.add_parser("verify", help="eigen-residual of given "
                                        "coefficients and eigenvalue")
    _add_input_group(vf)
    vf.add_argument("--lambda", dest="lam", type=float, required=True,
                    help="candidate eigenvalue (input units)")
    vf.add_argument("--coeffs", metavar="FILE", required=True,
                    help='JSON {"parity": ..., "blocks": [[..], ..]}')
    vf.add_argument("--alpha", type=float, default=None,
                    help="basis scale (default: minus frequency root)")
    vf.add_argument("--out", metavar="PATH")
    vf.set_defaults(func=cmd_verify)

    rs = subs.add_parser("region-scan", help="classify a dense grid")
    rs.add_argument("--b-range", required=True, metavar="LO:HI[:N]")
    rs.add_argument("--a-range", required=True, metavar="LO:HI[:N]")
    rs.add_argument("--c-range", required=True, metavar="LO:HI[:N]")
    rs.add_argument("--xi", type=float, default=1.0)
    rs.add_argument("--tol", type=float, default=1e-3)
    rs.add_argument("--resolution", type=int, default=64,
                    help="points per axis when a range omits :N")
    rs.add_argument("--format", choices=("csv", "json"), default="csv")
    rs.add_argument("--out", metavar="PATH")
    rs.set_defaults(func=cmd_region_scan)

    cv = subs.add_parser("convergence", help="eigenvalues vs truncation size")
    _add_input_group(cv)
    cv.add_argument("--parity", choices=("even", "odd"), default="even")
    cv.add_argument("--blocks-list", default="25,50,100,200",
                    metavar="N1,N2,...")
    cv.add_argument("-k", type=int, default=4)
    cv.add_argument("--alpha", type=float, default=None)
    cv.add_argument("--format", choices=("json", "csv"), default="json")
    cv.add_argument("--out", metavar="PATH")
    cv.set_defaults(func=cmd_convergence)

    rp = subs.add_parser("report", help="render heatmap panels + CSV")
    rp.add_argument("--out-dir", default="reports", metavar="DIR")
    rp.add_argument("--b-range", default="1.05:14", metavar="LO:HI")
    rp.add_argument("--a-range", default="0.05:4", metavar="LO:HI")
    rp.add_argument("--resolution", type=int, default=128)
    rp.add_argument("--xi", type=float, default=1.0)
    rp.add_argument("--tol", type=float, default=1e-3)
    rp.add_argument("--out", metavar="PATH",
                    help="where to write the JSON summary")
    rp.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NchoError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
