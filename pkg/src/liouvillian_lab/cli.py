"""Command-line frontend: spectrum computation and classification,
figure-style parameter sweeps, time evolution and EP searches.

An optional JSON config file supplies defaults; flags override.  Exit
codes: 0 success, 1 usage error, 2 numeric failure.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .densec import ConvergenceError
from .dynamics import evolve, observables, steady_limit
from .spectra import analyze, detect_ep
from .sweep import SweepSpec, emit, find_steady_gamma2, run_sweep
from .twolevel import (DegenerateTheta, TwoLevelParams, analytic_eigenvalues,
                       ep_locus_gamma0, liouvillian, nlep_coherent_locus,
                       nlep_coherent_pair, nlep_incoherent)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2

# sweep presets matching the published parameter choices (gamma1 = 1)
FIGURE_PRESETS = {
    "fig2a": dict(omega=2.0, dissipation=1.0, start=0.0, stop=6.0, steps=200),
    "fig2c": dict(omega=0.0, dissipation=2.0, start=0.0, stop=6.0, steps=200),
    "fig3": dict(omega=2.0, dissipation=0.0, start=0.0, stop=6.0, steps=200),
    "fig4ab": dict(omega=2.0, dissipation=2.0, start=0.0, stop=8.0, steps=200),
    "fig4ef": dict(omega=2.0, dissipation=2.0, start=0.0, stop=8.0, steps=200),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")


class UsageError(Exception):
    pass


def _param_flags(sub):
    for name in ("gamma1", "gamma2", "omega", "dissipation"):
        sub.add_argument(f"--{name}", type=float, default=None)
    sub.add_argument("--config", default=None, help="JSON config file")
    sub.add_argument("--normalized", action="store_true",
                     help="interpret all rates in units of gamma1")


def _resolve_params(args, config):
    vals = {}
    cfg = {k: config[k] for k in ("gamma1", "gamma2", "omega", "dissipation")
           if k in config}
    defaults = dict(gamma1=1.0, gamma2=1.0, omega=0.0, dissipation=0.0)
    for name in defaults:
        flag = getattr(args, name, None)
        vals[name] = flag if flag is not None else cfg.get(name, defaults[name])
    if getattr(args, "normalized", False):
        g1 = vals["gamma1"]
        if g1 <= 0:
            raise UsageError("--normalized requires gamma1 > 0")
        vals = {k: v / g1 for k, v in vals.items()}
        vals["gamma1"] = 1.0
    try:
        return TwoLevelParams(**vals)
    except ValueError as exc:
        raise UsageError(str(exc))


def _fmt_c(z):
    return f"{z.real:+.10g}{z.imag:+.10g}i"


def cmd_spectrum(args):
    config = _load_config(args.config)
    p = _resolve_params(args, config)
    L = liouvillian(p)
    report = analyze(L, p)
    print(f"# liouvillian-lab {__version__} spectrum "
          f"gamma1={p.gamma1} gamma2={p.gamma2} omega={p.omega} "
          f"dissipation={p.dissipation}")
    deviation = None
    fallback = False
    if args.analytic:
        try:
            ana = analytic_eigenvalues(p)
            from scipy.optimize import linear_sum_assignment
            cost = np.abs(ana[:, None] - report.eigenvalues[None, :])
            r, c = linear_sum_assignment(cost)
            deviation = float(cost[r, c].max())
        except DegenerateTheta:
            fallback = True
    for j, lam in enumerate(report.eigenvalues):
        phase = report.phase_verdicts[j] if report.phase_verdicts else "-"
        steady = " steady" if j in report.steady_indices else ""
        print(f"lambda[{j}] = {_fmt_c(lam)}  phase={phase}{steady}")
    print(f"verdict: {report.verdict}")
    if deviation is not None:
        print(f"analytic cross-check: max multiset deviation {deviation:.3e}")
    if fallback:
        print("analytic cross-check: Theta degenerate, numeric fallback used")
    if report.ep_clusters:
        for cl in report.ep_clusters:
            kind = "EP" if cl.is_ep else "degeneracy"
            print(f"{kind} cluster at {_fmt_c(cl.mean)}: "
                  f"algebraic {cl.algebraic}, geometric {cl.geometric}")
    else:
        print("no eigenvalue clusters")
    return EXIT_OK


def cmd_sweep(args):
    config = _load_config(args.config)
    p = _resolve_params(args, config)
    if args.figure is not None:
        if args.figure not in FIGURE_PRESETS:
            raise UsageError(f"unknown figure preset {args.figure!r}; "
                             f"choose from {sorted(FIGURE_PRESETS)}")
        pre = FIGURE_PRESETS[args.figure]
        p = TwoLevelParams(gamma1=1.0, gamma2=p.gamma2, omega=pre["omega"],
                           dissipation=pre["dissipation"])
        spec = SweepSpec(varied="gamma2", start=pre["start"], stop=pre["stop"],
                         steps=pre["steps"], fixed=p)
        if args.figure in ("fig2c",):
            print("note: the published panel does not state gamma2 for the "
                  "time-evolution companion; gamma2 = 2*gamma1 is assumed there",
                  file=sys.stderr)
    else:
        if args.param is None:
            raise UsageError("either --figure or --param is required")
        spec = SweepSpec(varied=args.param, start=args.start, stop=args.stop,
                         steps=args.steps, fixed=p)
    result = run_sweep(spec)
    fmt = args.format
    if args.out is None:
        emit(result, fmt, sys.stdout)
    else:
        emit(result, fmt, args.out)
        print(f"wrote {args.out} ({spec.steps} rows, format {fmt})",
              file=sys.stderr)
    if result.errors:
        print(f"{len(result.errors)} rows failed numerically", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _parse_initial(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise UsageError("--initial needs 4 comma-separated complex values")
    try:
        return np.array([complex(s.strip().replace("i", "j")) for s in parts])
    except ValueError as exc:
        raise UsageError(f"malformed initial vector: {exc}")


def cmd_evolve(args):
    config = _load_config(args.config)
    p = _resolve_params(args, config)
    rho0 = _parse_initial(args.initial)
    times = np.linspace(0.0, args.t_max, args.steps + 1)
    L = liouvillian(p)
    traj = evolve(L, rho0, times)
    table = observables(traj, mode=args.normalize)
    cols = ["t", "rho00", "rho11", "re_rho10", "im_rho10", "re_trace", "im_trace"]
    lines = [", ".join(cols)]
    for i in range(times.size):
        lines.append(", ".join(repr(float(table[c][i])) for c in cols))
    text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({times.size} rows)", file=sys.stderr)
    return EXIT_OK


def cmd_find_eps(args):
    config = _load_config(args.config)
    p = _resolve_params(args, config)
    print(f"# liouvillian-lab {__version__} find-eps "
          f"gamma1={p.gamma1} omega={p.omega} dissipation={p.dissipation}")
    if p.omega == 0.0:
        G, lam_published, lam_derived, state = nlep_incoherent(p.gamma1, p.gamma2)
        print(f"incoherent degeneracy at dissipation = gamma1 + gamma2 = {G}")
        print(f"lambda (published) = {_fmt_c(lam_published)}")
        print(f"lambda (derived)   = {_fmt_c(lam_derived)}  "
              "<- published value disagrees with the spectrum; derived value "
              "confirmed numerically")
        pt = TwoLevelParams(p.gamma1, p.gamma2, 0.0, G)
        clusters = detect_ep(liouvillian(pt))
        for cl in clusters:
            print(f"numeric cluster at {_fmt_c(cl.mean)}: "
                  f"algebraic {cl.algebraic}, geometric {cl.geometric}")
    elif p.dissipation == 0.0:
        g2p, g2m = ep_locus_gamma0(p.gamma1, p.omega)
        print(f"dissipation-free EPs at gamma2 = {g2p} and gamma2 = {g2m}")
        for g2 in (g2p, g2m):
            if g2 < 0:
                print(f"gamma2 = {g2}: outside the physical range, skipped")
                continue
            pt = TwoLevelParams(p.gamma1, g2, p.omega, 0.0)
            for cl in detect_ep(liouvillian(pt)):
                kind = "EP" if cl.is_ep else "degeneracy"
                print(f"gamma2 = {g2}: {kind} at {_fmt_c(cl.mean)}: "
                      f"algebraic {cl.algebraic}, geometric {cl.geometric}")
    else:
        eta_p, eta_m = nlep_coherent_locus(p.omega, p.dissipation)
        for eta in (eta_p, eta_m):
            g2 = eta - p.gamma1 + p.dissipation
            tag = f"eta_plus = {eta:.6g} -> gamma2 = {g2:.6g}"
            if g2 < 0:
                print(f"{tag}: outside the physical range, skipped")
                continue
            pt = TwoLevelParams(p.gamma1, g2, p.omega, p.dissipation)
            lam, _ = nlep_coherent_pair(pt)
            print(f"{tag}: predicted lambda = {_fmt_c(lam)}")
            for cl in detect_ep(liouvillian(pt)):
                kind = "EP" if cl.is_ep else "degeneracy"
                print(f"  numeric {kind} at {_fmt_c(cl.mean)}: "
                      f"algebraic {cl.algebraic}, geometric {cl.geometric}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="liouvillian-lab",
                     description="Vectorized non-Hermitian Lindblad toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    sp = subs.add_parser("spectrum", help="spectrum and classification")
    _param_flags(sp)
    sp.add_argument("--analytic", action="store_true",
                    help="cross-check against the closed-form eigenvalues")
    sp.set_defaults(func=cmd_spectrum)

    sw = subs.add_parser("sweep", help="one-parameter spectral sweep")
    _param_flags(sw)
    sw.add_argument("--figure", default=None,
                    help=f"preset, one of {sorted(FIGURE_PRESETS)}")
    sw.add_argument("--param", choices=("gamma1", "gamma2", "omega", "dissipation"),
                    default=None)
    sw.add_argument("--from", dest="start", type=float, default=0.0)
    sw.add_argument("--to", dest="stop", type=float, default=6.0)
    sw.add_argument("--steps", type=int, default=200)
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--out", default=None)
    sw.set_defaults(func=cmd_sweep)

    ev = subs.add_parser("evolve", help="time evolution of an initial state")
    _param_flags(ev)
    ev.add_argument("--initial", required=True,
                    help="4 comma-separated complex values (a+bi)")
    ev.add_argument("--t-max", type=float, default=10.0)
    ev.add_argument("--steps", type=int, default=1000)
    ev.add_argument("--normalize", choices=("raw", "trace"), default="trace")
    ev.add_argument("--out", default=None)
    ev.set_defaults(func=cmd_evolve)

    fe = subs.add_parser("find-eps", help="exceptional-point loci")
    _param_flags(fe)
    fe.set_defaults(func=cmd_find_eps)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
