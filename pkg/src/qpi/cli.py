"""Command-line interface.

Subcommands wire the library into reproducible runs emitting CSV (and SVG
figures where geometry is involved): branches, singularities, coeffs,
singulant, lambda, stokes-map, iterate, shoot, compare, truncate-demo.

Complex numbers on the command line use the literal form ``a+bi`` with no
internal whitespace (e.g. ``1+0.2i``, ``-0.5-0.65i``, ``3i``).  Relative
output paths land in the directory given by the ``QPI_OUT_DIR`` environment
variable (default: current directory).

Exit codes: 0 success, 2 validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import re
import sys

import numpy as np

from . import branches as br
from . import figures, io, iteration, recurrence, singulants, stokes

_COMPLEX_RE = re.compile(
    r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?"
    r"(?P<im>[+-](?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)?(?P<i>i)?$"
)


def parse_complex(text: str) -> complex:
    """Parse the a+bi literal form; rejects embedded whitespace."""
    s = text.strip()
    if not s or any(c.isspace() for c in s):
        raise argparse.ArgumentTypeError(f"bad complex literal {text!r}")
    if s.endswith("i"):
        body, has_i = s[:-1], True
    else:
        body, has_i = s, False
    if not has_i:
        try:
            return complex(float(body), 0.0)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad complex literal {text!r}") from None
    # pure imaginary or full form: split the imaginary tail
    m = re.match(
        r"^(?P<re>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?P<im>[+-]?(?:\d+\.?\d*|\.\d+)?(?:[eE][+-]?\d+)?)$",
        body,
    )
    if not m or (m.group("re") is None and m.group("im") is None):
        raise argparse.ArgumentTypeError(f"bad complex literal {text!r}")
    re_part = m.group("re")
    im_part = m.group("im")
    if im_part in (None, ""):
        # form like '3i': the single group is the imaginary part
        re_part, im_part = None, re_part
    if im_part in ("+", "-"):
        im_part += "1"
    try:
        return complex(float(re_part) if re_part else 0.0, float(im_part))
    except (TypeError, ValueError):
        raise argparse.ArgumentTypeError(f"bad complex literal {text!r}") from None


def _parse_range(text: str) -> tuple[int, int]:
    m = re.match(r"^(-?\d+)\.\.(-?\d+)$", text)
    if not m:
        raise argparse.ArgumentTypeError("range must look like -1..1")
    return int(m.group(1)), int(m.group(2))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpi", description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", default=None, help="output directory (overrides QPI_OUT_DIR)")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("branches", help="leading-order branch values")
    b.add_argument("--s", type=parse_complex, default=2.0 + 0j)
    b.add_argument("--out", default="branches.csv")

    s = sub.add_parser("singularities", help="singular points of the leading order")
    s.add_argument("--k", type=_parse_range, default=(-1, 1), metavar="KMIN..KMAX")
    s.add_argument("--out", default="singularities.csv")

    c = sub.add_parser("coeffs", help="coefficient table as JSON")
    c.add_argument("--base", type=parse_complex, default=2.0 + 0j)
    c.add_argument("--branch", type=int, default=3, choices=(1, 2, 3, 4))
    c.add_argument("--terms", type=int, default=40, metavar="R")
    c.add_argument("--order", type=int, default=96)
    c.add_argument("--out", default="coeffs.json")

    g = sub.add_parser("singulant", help="singulant values along a ray or at a point")
    g.add_argument("--s", type=parse_complex, action="append", required=True,
                   help="target point (repeatable)")
    g.add_argument("--branch", type=int, default=3, choices=(1, 2, 3, 4))
    g.add_argument("--anchor", default=None, choices=("s01", "s02", "s03"),
                   help="anchor label (required for branch 4)")
    g.add_argument("--out", default="singulant.csv")

    l = sub.add_parser("lambda", help="late-order constant and its convergence curve")
    l.add_argument("--terms", type=int, default=1000)
    l.add_argument("--out", default="lambda.csv")
    l.add_argument("--figure", default=None, help="optional SVG of the convergence curve")

    m = sub.add_parser("stokes-map", help="trace Stokes/anti-Stokes curves; CSV + figures")
    m.add_argument("--family", default="A", choices=("A", "B"))
    m.add_argument("--branch", type=int, default=3, choices=(1, 2, 3))
    m.add_argument("--max-arclength", type=float, default=12.0)
    m.add_argument("--out", default="stokes_curves.csv")
    m.add_argument("--figure-s", default="stokes_s.svg")
    m.add_argument("--figure-x", default="stokes_x.svg")

    it = sub.add_parser("iterate", help="iterate the discrete equation")
    it.add_argument("--q", type=parse_complex, default=1 + 0.2j)
    it.add_argument("--w0", type=parse_complex, required=True)
    it.add_argument("--w1", type=parse_complex, required=True)
    it.add_argument("--n", type=int, default=200)
    it.add_argument("--x0", type=parse_complex, default=1.0 + 0j)
    it.add_argument("--out", default="trajectory.csv")

    sh = sub.add_parser("shoot", help="find seeds landing on an asymptotic family")
    sh.add_argument("--target", choices=("nonzero", "vanishing"), required=True)
    sh.add_argument("--omega", type=parse_complex, default=1.0 + 0j)
    sh.add_argument("--q", type=parse_complex, required=True)
    sh.add_argument("--n-check", type=int, default=120)
    sh.add_argument("--seed-w0", type=parse_complex, default=None)
    sh.add_argument("--seed-w1", type=parse_complex, default=None)
    sh.add_argument("--out", default="shoot.json")

    cp = sub.add_parser("compare", help="trajectory vs asymptotic evaluation (real q)")
    cp.add_argument("--q", type=parse_complex, required=True)
    cp.add_argument("--branch", type=int, default=3, choices=(1, 2, 3, 4))
    cp.add_argument("--window", default="1.5,3.0")
    cp.add_argument("--n-terms", type=int, default=2)
    cp.add_argument("--out", default="compare.csv")

    td = sub.add_parser("truncate-demo", help="optimal truncation and residual decay")
    td.add_argument("--s", type=parse_complex, default=2.0 + 0j)
    td.add_argument("--branch", type=int, default=3, choices=(1, 2, 3))
    td.add_argument("--eps", default="0.1,0.05")
    td.add_argument("--bits", type=int, default=200, help="working precision (bits)")
    td.add_argument("--out", default="residuals.csv")
    return p


def _fold_negative_values(argv: list[str]) -> list[str]:
    """Join '--flag -0.5-0.6i' into '--flag=-0.5-0.6i' so argparse accepts it."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (
            tok.startswith("--")
            and "=" not in tok
            and nxt is not None
            and nxt.startswith("-")
            and not nxt.startswith("--")
        ):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = build_parser().parse_args(_fold_negative_values(list(argv)))
    try:
        return _dispatch(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def _dispatch(args) -> int:
    out_dir = args.out_dir
    cfg = {k: v for k, v in vars(args).items() if k not in ("command", "out_dir")}
    cfg["command"] = args.command

    if args.command == "branches":
        rows = []
        vals = br.branch_values(args.s)
        for j in (1, 2, 3, 4):
            w = vals[j - 1]
            resid = abs(w**4 - w + np.exp(-args.s))
            rows.append((j, w.real, w.imag, float(resid)))
        path = io.write_csv(args.out, ["j", "w_re", "w_im", "quartic_residual"], rows, cfg, out_dir)
        print(path)
        return 0

    if args.command == "singularities":
        kmin, kmax = args.k
        rows = [
            (p.k, p.label, p.location.real, p.location.imag)
            for p in br.singular_points(kmin, kmax)
        ]
        path = io.write_csv(args.out, ["k", "label", "s_re", "s_im"], rows, cfg, out_dir)
        print(path)
        return 0

    if args.command == "coeffs":
        table = recurrence.compute_coefficients(args.base, args.branch, args.terms, args.order)
        path = io.resolve_out(args.out, out_dir)
        path.write_text(table.to_json(), encoding="utf-8")
        print(path)
        return 0

    if args.command == "singulant":
        anchor = None
        if args.anchor is not None:
            anchor = next(p for p in br.ANCHORS.values() if p.label == args.anchor)
        rows = []
        for s in args.s:
            sv = singulants.singulant(s, anchor, args.branch)
            rows.append(
                (s.real, s.imag, sv.value.real, sv.value.imag, sv.derivative.real, sv.derivative.imag)
            )
        path = io.write_csv(
            args.out,
            ["s_re", "s_im", "chi_re", "chi_im", "dchi_re", "dchi_im"],
            rows,
            cfg,
            out_dir,
        )
        print(path)
        return 0

    if args.command == "lambda":
        partials = singulants.lambda_partial_estimates(args.terms)
        value = singulants.lambda_constant(args.terms)
        rows = [(r + 1, float(v)) for r, v in enumerate(partials)]
        path = io.write_csv(args.out, ["r", "estimate"], rows, cfg, out_dir)
        if args.figure:
            figures.save_convergence_figure(partials, value.real, args.figure, out_dir)
        print(f"{path}\nlate-order constant: {value.real:.6f}")
        return 0

    if args.command == "stokes-map":
        j = 4 if args.family == "B" else args.branch
        curves = stokes.standard_curves(j, max_arclength=args.max_arclength)
        rows = []
        for c in curves:
            for sp, xp in zip(c.s_points, c.x_points):
                rows.append((c.kind, c.anchor.label, sp.real, sp.imag, xp.real, xp.imag))
        path = io.write_csv(
            args.out, ["kind", "anchor", "s_re", "s_im", "x_re", "x_im"], rows, cfg, out_dir
        )
        figures.save_curve_figure(curves, "s", args.figure_s, out_dir=out_dir)
        figures.save_curve_figure(curves, "x", args.figure_x, out_dir=out_dir)
        print(path)
        return 0

    if args.command == "iterate":
        traj = iteration.iterate(iteration.IterationConfig(args.q, args.w0, args.w1, args.n, args.x0))
        resid = iteration.discrete_residuals(traj)
        rows = [(0, traj.values[0].real, traj.values[0].imag, 0.0)]
        for n in range(1, len(traj.values)):
            r = float(resid[n - 1]) if n - 1 < len(resid) else 0.0
            rows.append((n, traj.values[n].real, traj.values[n].imag, r))
        path = io.write_csv(args.out, ["n", "w_re", "w_im", "residual"], rows, cfg, out_dir)
        print(path)
        return 0

    if args.command == "shoot":
        target = iteration.ShootTarget(args.target, args.omega)
        if args.seed_w0 is not None and args.seed_w1 is not None:
            seed = (args.seed_w0, args.seed_w1)
        else:
            seed = iteration.family_seed(target, args.q, args.n_check)
        w0, w1 = iteration.shoot_initial_conditions(target, args.q, args.n_check, seed)
        payload = {
            "w0": [w0.real, w0.imag],
            "w1": [w1.real, w1.imag],
            "config": cfg,
        }
        path = io.write_json(args.out, payload, out_dir)
        print(path)
        return 0

    if args.command == "compare":
        lo, hi = (float(x) for x in args.window.split(","))
        eps = (args.q - 1.0).real
        target = (
            iteration.ShootTarget("vanishing")
            if args.branch == 4
            else iteration.ShootTarget("nonzero", br.far_field_class(args.branch).omega)
        )
        n_check = max(int(hi / eps) + 10, 40)
        seed = iteration.family_seed(target, args.q, n_check)
        w0, w1 = iteration.shoot_initial_conditions(target, args.q, n_check, seed)
        traj = iteration.iterate(iteration.IterationConfig(args.q, w0, w1, n_check + 5))
        base = 0.5 * (lo + hi)
        table = recurrence.compute_coefficients(base, args.branch, max(args.n_terms, 4), 32)

        def evaluate(s):
            return stokes.truncated_sum(table, s, eps, args.n_terms)

        rows = [
            (r.n, r.s, r.w.real, r.w.imag, r.w_asym.real, r.w_asym.imag, r.error)
            for r in iteration.compare_trajectory(traj, evaluate, (lo, hi))
        ]
        path = io.write_csv(
            args.out,
            ["n", "s", "w_re", "w_im", "asym_re", "asym_im", "error"],
            rows,
            cfg,
            out_dir,
        )
        print(path)
        return 0

    if args.command == "truncate-demo":
        eps_list = [float(x) for x in args.eps.split(",")]
        sv = singulants.singulant(args.s, None, args.branch)
        rho = abs(sv.value)
        rows = []
        for eps in eps_list:
            n_opt, kappa = stokes.optimal_truncation(rho, eps)
            n_terms = 2 * n_opt
            table = recurrence.compute_coefficients(
                args.s, args.branch, n_terms - 1, 26, mp=True, precision_bits=args.bits
            )
            import gmpy2

            with __import__("qpi.precision", fromlist=["bits"]).bits(args.bits):
                e = gmpy2.mpfr(eps)
                sc = gmpy2.mpc(complex(args.s))
                triple = tuple(
                    stokes.truncated_sum(table, sc + d, e, n_terms) for d in (-e, 0, e)
                )
                res = iteration.rescaled_residual(triple, sc, e)
            rows.append((eps, n_opt, kappa, float(abs(res))))
        path = io.write_csv(
            args.out, ["eps", "N_opt", "kappa", "abs_residual"], rows, cfg, out_dir
        )
        if len(rows) >= 2:
            xs = np.array([-1.0 / r[0] for r in rows])
            ys = np.log(np.array([r[3] for r in rows]))
            slope = np.polyfit(xs, ys, 1)[0]
            print(f"{path}\nslope of ln|residual| vs -1/eps: {slope:.4f} (|chi| = {rho:.4f})")
        else:
            print(path)
        return 0

    raise ValueError(f"unknown command {args.command}")
