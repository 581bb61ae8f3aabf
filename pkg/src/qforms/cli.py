"""Command-line entry point: ``qforms <subcommand> ...``.

Every subcommand writes one JSON document to stdout (or CSV with
``--format csv`` where the output is tabular); diagnostics go to stderr.
Exit codes: 0 success, 1 check failure, 2 usage error, 3 precision error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .errors import CrossCheckFailed, InsufficientPrecision, QFormsError
from .forms import (EtaQuotientSpec, delta, eisenstein, eta_quotient, hauptmodul, jay, theta,
                    theta_alt, weight2_F, zagier_trace_form)
from .operators import theta_op, u_iterate, v_op
from .series import QSeries

log = logging.getLogger("qforms")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(args, text: str):
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path) -> QSeries:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return QSeries.from_dict(data)


def _series_doc(s: QSeries, **meta) -> dict:
    d = s.to_dict()
    if meta:
        d["meta"] = meta
    return d


def build_form(spec: str, prec: int, modulus=None):
    name, _, arg = spec.partition(":")
    if name == "theta":
        return theta(prec, modulus)
    if name == "theta_alt":
        from .forms import HalfWeight, NamedForm
        return NamedForm(theta_alt(prec, modulus), HalfWeight(1), "theta_alt")
    if name == "F":
        return weight2_F(prec, modulus)
    if name == "eisenstein":
        if not arg:
            raise UsageError("eisenstein needs a weight, e.g. eisenstein:4")
        return eisenstein(int(arg), prec, modulus)
    if name == "eta":
        if not arg:
            raise UsageError("eta needs a spec, e.g. eta:1^8,4^16,2^-24")
        return eta_quotient(EtaQuotientSpec.parse(arg), prec, modulus)
    if name == "j":
        return jay(prec, modulus)
    if name == "delta":
        return delta(prec, modulus)
    if name == "hauptmodul":
        return hauptmodul(prec, modulus)
    if name == "zagier":
        return zagier_trace_form(prec, modulus)
    raise UsageError(f"unknown form {spec!r}")


# -- subcommands -------------------------------------------------------------

def cmd_series(args):
    if args.action != "build":
        raise UsageError("usage: series build --form NAME --prec N [--mod M]")
    if args.form is None or args.prec is None:
        raise UsageError("series build needs --form and --prec")
    nf = build_form(args.form, args.prec, args.mod)
    _emit(args, _dump(_series_doc(nf.series, label=nf.label, k2=nf.weight.k2, scale=nf.scale)))
    return EXIT_OK


def _parse_op(text):
    name, _, arg = text.partition(":")
    if name == "Theta" and not arg:
        return "Theta", None
    if name in ("U", "V") and arg.isdigit() and int(arg) >= 1:
        return name, int(arg)
    raise UsageError(f"bad --apply {text!r}; use U:p, V:p or Theta")


def cmd_op(args):
    f = _load(args.input)
    name, p = _parse_op(args.apply)
    m = args.iterate
    if m < 0:
        raise UsageError("--iterate must be >= 0")
    if name == "U":
        # U_p^m = U_{p^m}, read in a single pass from the source coefficients
        g = u_iterate(f, p, m)
    elif name == "V":
        g = _repeat(f, m, lambda s: v_op(s, p))
    else:
        g = _repeat(f, m, theta_op)
    _emit(args, _dump(_series_doc(g)))
    return EXIT_OK


def _repeat(f, m, fn):
    for _ in range(m):
        f = fn(f)
    return f


def cmd_filtration(args):
    from .filtration import filtration, verify_filtration_props

    if args.action == "verify":
        if args.ell is None:
            raise UsageError("filtration verify needs --ell")
        rep = verify_filtration_props(args.ell, sample_count=args.samples, seed=args.seed)
        _emit(args, _dump(rep))
        return EXIT_OK if rep["pass"] else EXIT_FAIL
    if args.action is not None:
        raise UsageError(f"unknown filtration action {args.action!r}")
    if args.input is None or args.ell is None or args.k2 is None:
        raise UsageError("filtration needs --input, --ell and --k2")
    res = filtration(_load(args.input), args.k2, args.ell)
    _emit(args, _dump(res.to_dict()))
    return EXIT_OK


def cmd_theta_cycle(args):
    from .theta_cycle import detect_theta_limit, square_class_support

    if args.input is None or args.ell is None:
        raise UsageError("theta-cycle needs --input and --ell")
    f = _load(args.input)
    if args.action == "support":
        rep = square_class_support(f, args.ell)
        _emit(args, _dump(rep.to_dict()))
        return EXIT_OK
    if args.action is not None:
        raise UsageError(f"unknown theta-cycle action {args.action!r}")
    rep = detect_theta_limit(f, args.ell, max_m=args.max_m, min_window=args.window, k2=args.k2)
    _emit(args, _dump(rep.to_dict()))
    return EXIT_OK


def cmd_traces(args):
    from .singular_moduli import trace_table

    if args.max_d is None:
        raise UsageError("traces needs --max-d")
    try:
        table = trace_table(args.max_d, args.mod, check_all=args.check_all, jobs=args.jobs)
    except CrossCheckFailed as exc:
        log.error("cross-check failed at d=%s", exc.d)
        sys.stdout.write(_dump({"error": "CrossCheckFailed", "d": exc.d, "message": str(exc)}))
        return EXIT_FAIL
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "t" if args.mod is None else f"t mod {args.mod}"])
    for d in sorted(table):
        w.writerow([d, table[d]])
    text = buf.getvalue()
    if args.format == "csv" and not args.out:
        sys.stdout.write(text)
        return EXIT_OK
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(_dump({"max_d": args.max_d, "modulus": args.mod, "rows": len(table),
                            "check_all": args.check_all, "out": args.out}))
    return EXIT_OK


def cmd_distribution(args):
    from .stats import DEFAULT_CHECKPOINTS, residue_counts, trace_stream

    if args.ell is None or args.max_x is None:
        raise UsageError("distribution needs --ell and --max-x")
    mod = args.ell ** args.j
    x = args.max_x
    cps = [c for c in DEFAULT_CHECKPOINTS if c < x] + [x]
    if args.source == "zagier":
        stream = trace_stream(zagier_trace_form(x + 1, mod).series, x)
    else:
        f = _load(args.source)
        if f.modulus is not None and f.modulus % mod:
            raise UsageError(f"input modulus {f.modulus} is not a multiple of {mod}")
        stream = f.coefficients(0, min(x + 1, f.precision))
    rep = residue_counts(stream, mod, cps)
    if args.format == "csv":
        _emit(args, rep.to_csv())
        return EXIT_OK
    doc = rep.to_dict()
    doc["source"] = "zagier-traces" if args.source == "zagier" else "file"
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    _emit(args, _dump(doc))
    return EXIT_OK


def cmd_verify(args):
    from .verify import dumps, verify_all

    try:
        ells = [int(s) for s in args.ells.split(",") if s]
    except ValueError:
        raise UsageError(f"bad --ells {args.ells!r}") from None
    rep = verify_all(ells, budget=args.budget, seed=args.seed, inject_fault=args.inject_fault)
    for w in rep["warnings"]:
        log.warning(w)
    _emit(args, dumps(rep))
    return EXIT_OK if rep["pass"] else EXIT_FAIL


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qforms", description="q-series, filtrations and traces")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the document to FILE instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--jobs", type=int, default=1)
        return sp

    s = common(sub.add_parser("series", help="build a named q-series"))
    s.add_argument("action", nargs="?")
    s.add_argument("--form")
    s.add_argument("--prec", type=int)
    s.add_argument("--mod", type=int)
    s.set_defaults(func=cmd_series)

    s = common(sub.add_parser("op", help="apply U_p, V_p or Theta"))
    s.add_argument("--apply", required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--iterate", type=int, default=1)
    s.set_defaults(func=cmd_op)

    s = common(sub.add_parser("filtration", help="mod-ell filtration, or law checks with 'verify'"))
    s.add_argument("action", nargs="?")
    s.add_argument("--input")
    s.add_argument("--ell", type=int)
    s.add_argument("--k2", type=int)
    s.add_argument("--samples", type=int, default=100)
    s.set_defaults(func=cmd_filtration)

    s = common(sub.add_parser("theta-cycle", help="U_ell cycle detection, or square classes with 'support'"))
    s.add_argument("action", nargs="?")
    s.add_argument("--input")
    s.add_argument("--ell", type=int)
    s.add_argument("--max-m", type=int, default=4)
    s.add_argument("--window", type=int, default=20)
    s.add_argument("--k2", type=int)
    s.set_defaults(func=cmd_theta_cycle)

    s = common(sub.add_parser("traces", help="table of traces of singular moduli"))
    s.add_argument("--max-d", type=int)
    s.add_argument("--mod", type=int)
    s.add_argument("--check-all", action="store_true")
    s.set_defaults(func=cmd_traces)

    s = common(sub.add_parser("distribution", help="residue-class counts of a coefficient stream"))
    s.add_argument("--source", default="zagier")
    s.add_argument("--ell", type=int)
    s.add_argument("--j", type=int, default=1)
    s.add_argument("--max-x", type=int)
    s.add_argument("--csv", help="also write the (X, r, count, normalized) CSV here")
    s.set_defaults(func=cmd_distribution)

    s = common(sub.add_parser("verify", help="run the full check suite"))
    s.add_argument("--ells", default="5,7,11,13")
    s.add_argument("--budget", type=int)
    s.add_argument("--inject-fault", choices=("theta",))
    s.set_defaults(func=cmd_verify)
    return p


def _configure_logging(verbose: bool):
    # a fresh handler bound to the current stderr on every call
    for h in list(log.handlers):
        log.removeHandler(h)
    h = logging.StreamHandler(sys.stderr)
    h.setFormatter(logging.Formatter("qforms: %(levelname)s: %(message)s"))
    log.addHandler(h)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except CrossCheckFailed as exc:
        log.error("%s (d=%s)", exc, exc.d)
        return EXIT_FAIL
    except InsufficientPrecision as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_PRECISION
    except (QFormsError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
