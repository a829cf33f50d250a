"""Command line interface: ``dfmorder {simulate,estimate,rmt,predict}``.

Exit status: 0 success (warnings included), 1 usage error, 2 input/parse
error, 3 AspectRatioOne, 4 InsideSupport, 5 EmptyWindow, 6 ConvergenceFailure,
7 CEqualsOne, 8 NonPositiveLambda, 9 any other library error. Failures print
one line ``dfmorder: error[<Kind>]: <message>`` on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from ._version import __version__
from .estimator import estimate_orders
from .exceptions import (
    AspectRatioOne,
    CEqualsOne,
    ConvergenceFailure,
    DfmOrderError,
    EmptyWindow,
    InsideSupport,
    NonPositiveLambda,
    PanelError,
)
from .io import read_panel_csv, report_dict, write_panel_csv
from .rmt import RmtContext, lsd_cdf, lsd_density, lsd_stieltjes, lsd_support, mp_edges
from .simulate import GENERATOR, ModelConfig, generate_panel
from .spikes import predict_outlier_counts

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_CODES = [
    (AspectRatioOne, 3),
    (InsideSupport, 4),
    (EmptyWindow, 5),
    (ConvergenceFailure, 6),
    (CEqualsOne, 7),
    (NonPositiveLambda, 8),
    (PanelError, EXIT_IO),
    (DfmOrderError, 9),
]


class UsageError(Exception):
    kind = "Usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return v

    return conv


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text!r}")
    return v


def _lambda(text):
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    return _positive(float)(text)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dfmorder", description="Factor and lag order estimation from lag-covariance spectra.")
    p.add_argument("--version", action="version", version=f"dfmorder {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate a dynamic factor panel as CSV")
    s.add_argument("--n", type=_positive(int), default=450)
    s.add_argument("--t", type=_positive(int), default=500)
    s.add_argument("--k", type=_positive(int), default=2)
    s.add_argument("--q", type=_nonneg_int, default=2)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--sigma-f2", type=_positive(float), default=4.0)
    s.add_argument("--sigma2", type=_positive(float), default=1.0)
    s.add_argument("--sigma-eps2", type=_positive(float), default=0.25)
    s.add_argument("--seed", type=_nonneg_int, default=0)
    s.add_argument("--tau-max", type=_nonneg_int, default=5)
    s.add_argument("--out", help="output file (default: stdout)")

    e = sub.add_parser("estimate", help="estimate (k, q) from a CSV panel")
    e.add_argument("--input", required=True, help="CSV file, one series per row ('-' for stdin)")
    e.add_argument("--tau-max", type=_positive(int), default=5)
    e.add_argument("--sigma2", type=_positive(float))
    e.add_argument("--report-eigs", type=_nonneg_int, default=13)
    e.add_argument("--header", action="store_true", help="skip the first non-comment line")

    r = sub.add_parser("rmt", help="tabulate limiting spectral laws")
    r.add_argument("--c", type=_positive(float), required=True)
    r.add_argument("--sigma2", type=_positive(float), default=1.0)
    r.add_argument("--what", choices=["density", "cdf", "stieltjes", "support", "edges"], required=True)
    r.add_argument("--grid", type=_positive(int), default=201)
    r.add_argument("--at", type=float, nargs="+", help="evaluate at these points instead of a grid")

    d = sub.add_parser("predict", help="predicted outlier counts per lag")
    d.add_argument("--k", type=_positive(int), required=True)
    d.add_argument("--q", type=_nonneg_int, required=True)
    d.add_argument("--c", type=_positive(float), required=True)
    d.add_argument("--tau-max", type=_nonneg_int, default=5)
    d.add_argument("--lambda", dest="lam", type=_lambda, default=math.inf,
                   help="eigenvalue of Q in units of sigma2, or 'inf' (default)")
    return p


def _fmt(x: float) -> str:
    return "%.17g" % x


def cmd_simulate(args) -> str:
    cfg = ModelConfig(
        n=args.n, T=args.t, k=args.k, q=args.q, beta=args.beta, sigma_f2=args.sigma_f2,
        sigma2=args.sigma2, sigma_eps2=args.sigma_eps2, seed=args.seed, tau_max=args.tau_max,
    )
    echo = [
        f"dfmorder {__version__} simulate generator={GENERATOR}",
        "n={n} T={T} k={k} q={q} beta={beta!r} sigma_f2={sigma_f2!r} sigma2={sigma2!r} "
        "sigma_eps2={sigma_eps2!r} seed={seed} tau_max={tau_max}".format(**cfg.__dict__),
    ]
    text = write_panel_csv(generate_panel(cfg), comments=echo)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return ""
    return text


def cmd_estimate(args) -> str:
    if args.input == "-":
        panel = read_panel_csv(sys.stdin, header=args.header)
    else:
        panel = read_panel_csv(args.input, header=args.header)
    est = estimate_orders(panel, args.tau_max, args.sigma2)
    return json.dumps(report_dict(est, args.report_eigs), indent=2) + "\n"


def _grid(lo, hi, size):
    return np.linspace(lo, hi, size) if size > 1 else np.array([lo])


def cmd_rmt(args) -> str:
    ctx = RmtContext(args.c, args.sigma2)
    if args.what == "support":
        return _fmt(lsd_support(ctx)) + "\n"
    if args.what == "edges":
        lo, hi = mp_edges(ctx)
        return f"{_fmt(lo)}\t{_fmt(hi)}\n"
    a = lsd_support(ctx)
    if args.what == "stieltjes":
        xs = args.at if args.at else _grid(1.05 * a, 5.0 * a, args.grid)
        fn = lsd_stieltjes
    else:
        xs = args.at if args.at else _grid(-1.1 * a, 1.1 * a, args.grid)
        fn = lsd_density if args.what == "density" else lsd_cdf
    return "".join(f"{_fmt(float(x))}\t{_fmt(fn(float(x), ctx))}\n" for x in xs)


def cmd_predict(args) -> str:
    preds = predict_outlier_counts(args.k, args.q, args.tau_max, RmtContext(args.c), args.lam)
    return json.dumps([p.as_dict() for p in preds], indent=2) + "\n"


COMMANDS = {"simulate": cmd_simulate, "estimate": cmd_estimate, "rmt": cmd_rmt, "predict": cmd_predict}


def _exit_code(exc) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(exc, cls):
            return code
    return 9


def _diag(kind, exc) -> str:
    msg = " ".join(str(exc).split())
    return f"dfmorder: error[{kind}]: {msg}\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(_diag("Usage", exc))
        return EXIT_USAGE
    except DfmOrderError as exc:
        sys.stderr.write(_diag(exc.kind, exc))
        return _exit_code(exc)
    except OSError as exc:
        sys.stderr.write(_diag("IOError", exc))
        return EXIT_IO
    except ValueError as exc:
        # invalid combinations that passed argparse (e.g. tau_max too large)
        sys.stderr.write(_diag("Usage", exc))
        return EXIT_USAGE
    sys.stdout.write(out)
    sys.stdout.flush()
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
