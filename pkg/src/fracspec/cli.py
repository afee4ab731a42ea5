"""Command-line runner: ``fracspec {run,verify,table,dump-matrix,dump-rule}``.

Exit status is 0 on success, 1 on a numerical failure and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import reference
from .birkhoff import birkhoff_basis, birkhoff_matrix
from .errors import DomainError, NumericError
from .fracmat import CAPUTO, FLAVORS, RL, FracOrder, fpsdm, frac_monomial_oracle, matrix_to_csv
from .manufactured import PRESET_NAMES
from .orthopoly import JacobiParam
from .quadrature import jacobi_gauss, jacobi_gauss_lobatto, rule_to_csv
from .solver import SCHEMES, DEFAULT_TOL, from_preset, solve
from .spectra import full_spectrum

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2

RUN_COLUMNS = (
    "N", "scheme", "error_l2", "iterations", "residual", "cond_estimate",
    "sigma2", "sigmaNm2", "wall_ms", "preset", "mu", "nu", "method",
)
DEFAULT_N = {"sec61": [64, 256, 1024], "rl-table1": [8, 16, 32, 64, 128]}
SLOW_N = [256, 512, 1024]


class UsageError(Exception):
    pass


def _threads() -> int:
    raw = os.environ.get("FRACSPEC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"FRACSPEC_THREADS must be an integer, got {raw!r}") from None
    return max(n, 1)


def _int_list(text: str) -> list[int]:
    try:
        out = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")
    if not out or out != sorted(out):
        raise argparse.ArgumentTypeError("the N list must be nonempty and ascending")
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6e}"
    return str(v)


# {{{ run


def _run_one(args, N: int, scheme: str, spectra: bool) -> dict:
    params = None
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise UsageError("--alpha and --beta go together")
        params = (args.alpha, args.beta)
    problem = from_preset(args.preset, N, scheme, params, args.mu, args.nu)
    rep = solve(
        problem, args.tol, fallback=args.fallback, condition=args.cond,
        keep_matrix=spectra, seed=args.seed,
    )
    row = {
        "N": N, "scheme": scheme, "error_l2": rep.error_l2, "iterations": rep.iterations,
        "residual": rep.residual, "cond_estimate": rep.condition_estimate,
        "sigma2": None, "sigmaNm2": None, "wall_ms": f"{rep.wall_ms:.1f}",
        "preset": args.preset, "mu": problem.mu.mu, "nu": problem.nu, "method": rep.method,
    }
    if spectra:
        s = full_spectrum(rep.matrix)
        row["sigma2"], row["sigmaNm2"] = s.sigma2, s.sigmaNm2
    return row


def _check_row(row: dict) -> dict | None:
    if row["preset"] == "rl-table1" and row["scheme"] == "B-COL":
        return reference.compare_table1(
            row["mu"], row["nu"], row["N"], row["sigma2"], row["sigmaNm2"],
            row["iterations"], row["error_l2"],
        )
    if row["preset"] == "sec61" and row["scheme"] != "L-COL":
        out = {"iterations": row["iterations"] <= reference.SEC61_MAX_ITER}
        if row["cond_estimate"] is not None:
            out["cond_estimate"] = row["cond_estimate"] <= reference.SEC61_MAX_COND
        return out
    return None


def cmd_run(args) -> int:
    if args.preset not in PRESET_NAMES:
        raise UsageError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESET_NAMES)}")
    schemes = args.scheme.split(",")
    for s in schemes:
        if s not in SCHEMES:
            raise UsageError(f"unknown scheme {s!r}; choose from {', '.join(SCHEMES)}")
    Ns = args.N or DEFAULT_N.get(args.preset, [8, 16, 32, 64])
    if args.slow:
        Ns = sorted(set(Ns) | set(SLOW_N))

    spectra = args.spectra or args.preset == "rl-table1"
    jobs = [(N, s) for N in Ns for s in schemes]
    status = EXIT_OK
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = [pool.submit(_run_one, args, N, s, spectra and s == "B-COL") for N, s in jobs]
        rows = []
        for (N, s), fut in zip(jobs, futures):
            try:
                rows.append(fut.result())
            except NumericError as exc:
                print(f"N={N} {s}: {exc}", file=sys.stderr)
                rows.append({"N": N, "scheme": s, "preset": args.preset, "method": "failed"})
                status = EXIT_NUMERIC

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RUN_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(c)) for c in RUN_COLUMNS])
    text = buf.getvalue()

    checks = []
    for row in rows:
        flags = _check_row(row) if row.get("method") != "failed" else None
        if flags is not None:
            checks.append({"N": row["N"], "scheme": row["scheme"], **flags,
                           "pass": all(flags.values())})
    summary = {"preset": args.preset, "rows": len(rows), "checks": checks,
               "pass": all(c["pass"] for c in checks)}

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        with open(args.out + ".summary.json", "w") as fh:
            json.dump(summary, fh, indent=2)
    else:
        sys.stdout.write(text)
    if args.table:
        sys.stdout.write(emit_table(text))
    return status


# }}}


# {{{ verify


def _verify_checks(N: int):
    """Yield ``(label, value, bound)`` for the quick invariant suite."""
    for flavor in FLAVORS:
        for mu in (0.3, 0.8, 1.5, 1.9):
            k = 1 if mu < 1 else 2
            if flavor == CAPUTO:
                special = (mu - k, k - mu)
            else:
                special = (mu, -mu) if k == 1 else (mu, 1.0 - mu)
            for ab in ((0.0, 0.0), special, (-0.2, 0.2)):
                rule = jacobi_gauss_lobatto(N, JacobiParam(*ab))
                order = FracOrder(mu, flavor)
                D = fpsdm(rule, order).interior
                Q = birkhoff_matrix(birkhoff_basis(rule, order)).Q
                err = float(np.max(np.abs(Q @ D - np.eye(D.shape[0]))))
                yield f"inverse {flavor} mu={mu} ab={ab}", err, 1e-8 * N

    rule = jacobi_gauss_lobatto(N, JacobiParam(0.0, 0.0))
    x = rule.nodes
    for flavor in FLAVORS:
        for mu in (0.3, 1.5):
            D = fpsdm(rule, FracOrder(mu, flavor)).full
            for eta in (1.0, 2.0, 3.0):
                ref = frac_monomial_oracle(flavor, mu, eta, x[1:], modified=flavor == RL)
                got = (D @ (1.0 + x) ** eta)[1:]
                err = float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1.0)))
                yield f"monomial {flavor} mu={mu} eta={eta}", err, 1e-8


def cmd_verify(args) -> int:
    N = args.N[0] if args.N else 16
    ok = True
    for label, err, bound in _verify_checks(N):
        good = err <= bound
        ok &= good
        print(f"{'PASS' if good else 'FAIL'}  {label}: {err:.2e} (bound {bound:.0e})")
    return EXIT_OK if ok else EXIT_NUMERIC


# }}}


# {{{ table


TABLE_COLUMNS = ("mu", "nu", "N", "sigma2", "sigmaNm2", "iterations", "error_l2")


def emit_table(text: str) -> str:
    """Aligned text table of a run CSV, one line per row."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        rows = []
    else:
        missing = {"N", "error_l2", "iterations"} - set(reader.fieldnames)
        if missing:
            raise UsageError(f"CSV lacks column(s): {', '.join(sorted(missing))}")
        rows = list(reader)

    widths = [6, 6, 6, 8, 9, 11, 12]
    head = "".join(f"{c:>{w}}" for c, w in zip(TABLE_COLUMNS, widths))
    lines = [head, "-" * len(head)]
    for row in rows:
        cells = []
        for c, w in zip(TABLE_COLUMNS, widths):
            v = row.get(c, "") or ""
            if c in ("sigma2", "sigmaNm2") and v:
                v = f"{float(v):.1f}"
            elif c == "error_l2" and v:
                v = f"{float(v):.2e}"
            elif c in ("mu", "nu") and v:
                v = f"{float(v):g}"
            cells.append(f"{v:>{w}}")
        lines.append("".join(cells))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> list[dict]:
    """Inverse of :func:`emit_table` for the columns it prints."""
    lines = [l for l in text.splitlines() if l.strip()]
    out = []
    for line in lines[2:]:
        fields = line.split()
        if len(fields) != len(TABLE_COLUMNS):
            raise UsageError(f"malformed table row: {line!r}")
        out.append(dict(zip(TABLE_COLUMNS, fields)))
    return out


def cmd_table(args) -> int:
    try:
        with open(args.csv) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(emit_table(text))
    return EXIT_OK


# }}}


# {{{ dumps


def _params(args) -> JacobiParam:
    return JacobiParam(args.alpha or 0.0, args.beta or 0.0)


def cmd_dump_matrix(args) -> int:
    N = args.N[0] if args.N else 8
    if args.mu is None:
        raise UsageError("dump-matrix needs --mu")
    rule = jacobi_gauss_lobatto(N, _params(args))
    order = FracOrder(args.mu, args.flavor)
    if args.which == "fpsdm":
        A = fpsdm(rule, order).full
    else:
        A = birkhoff_matrix(birkhoff_basis(rule, order)).Q
    text = matrix_to_csv(
        A, which=args.which, flavor=args.flavor, mu=args.mu, N=N,
        alpha=rule.params.alpha, beta=rule.params.beta,
    )
    _write(args.out, text)
    return EXIT_OK


def cmd_dump_rule(args) -> int:
    N = args.N[0] if args.N else 8
    p = _params(args)
    rule = jacobi_gauss(N, p) if args.gauss else jacobi_gauss_lobatto(N, p)
    _write(args.out, rule_to_csv(rule))
    return EXIT_OK


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# }}}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=_int_list, help="comma-separated, ascending")
    common.add_argument("--alpha", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--mu", type=float)
    common.add_argument("--nu", type=float)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="seed of the condition estimator")

    parser = argparse.ArgumentParser(prog="fracspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="solve a preset over an N list")
    run.add_argument("--preset", required=True, help=", ".join(PRESET_NAMES))
    run.add_argument("--scheme", default="B-COL", help="comma-separated: " + ", ".join(SCHEMES))
    run.add_argument("--tol", type=float, default=DEFAULT_TOL)
    run.add_argument("--slow", action="store_true", help="add N = 256, 512, 1024")
    run.add_argument("--cond", action="store_true", help="estimate condition numbers")
    run.add_argument("--spectra", action="store_true", help="eigenvalue columns for B-COL")
    run.add_argument("--fallback", action="store_true", help="LU solve if BiCGSTAB fails")
    run.add_argument("--table", action="store_true", help="also print an aligned table")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", parents=[common], help="quick invariant suite")
    ver.set_defaults(func=cmd_verify)

    tab = sub.add_parser("table", help="format a run CSV")
    tab.add_argument("csv")
    tab.set_defaults(func=cmd_table)

    dm = sub.add_parser("dump-matrix", parents=[common], help="print a matrix as CSV")
    dm.add_argument("--which", choices=("fpsdm", "birkhoff"), default="fpsdm")
    dm.add_argument("--flavor", choices=FLAVORS, default=CAPUTO)
    dm.set_defaults(func=cmd_dump_matrix)

    dr = sub.add_parser("dump-rule", parents=[common], help="print nodes and weights")
    dr.add_argument("--gauss", action="store_true", help="Gauss instead of Gauss-Lobatto")
    dr.set_defaults(func=cmd_dump_rule)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"fracspec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"fracspec: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
