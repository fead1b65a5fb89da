"""Deterministic command-line front end.

Subcommands: propagate, kernel, moments, mehler, eigen, verify.
All numeric CSV output uses 17 significant digits (round-trip safe for
doubles); JSON artifacts are schema-stable and byte-identical across
runs with the same config and seed.

Exit codes: 0 success, 1 verification failure, 2 usage/config error.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dynamics, eigenstates, kernel, moments, verify
from .config import (RunConfig, load_config, require_underdamped, with_overrides)
from .errors import QuadOscError
from .models import ModelKind, builtin_model, operator_form


def _fmt(value):
    return f"{value:.17g}"


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell)
                              for cell in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _base_config(args):
    config = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if getattr(args, "model", None) is not None:
        overrides["model"] = args.model
    if getattr(args, "omega0", None) is not None:
        overrides["omega0"] = args.omega0
    if getattr(args, "lam", None) is not None:
        overrides["lam"] = args.lam
    if getattr(args, "initial", None) is not None:
        overrides["initial"] = args.initial
    if getattr(args, "times", None) is not None:
        overrides["times"] = tuple(float(v) for v in args.times.split(","))
    if args.out is not None:
        overrides["outputs"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    return with_overrides(config, **overrides)


def _outdir(config):
    path = Path(config.outputs)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_propagate(args):
    config = _base_config(args)
    coeffs = config.coefficient_set()
    source = "numeric" if config.model.startswith("custom:") else "closed"
    if source == "closed":
        require_underdamped(config)
    chi = config.initial_wave()
    out = _outdir(config)
    delta = 1e-4
    for i, t in enumerate(config.times):
        w = dynamics.evolve(coeffs, chi, t, source=source)
        if t == 0.0:
            residual = 0.0
        else:
            snaps = [dynamics.evolve(coeffs, chi, ti, source=source)
                     for ti in (t - delta, t, t + delta)]
            residual = dynamics.pde_residual(coeffs, snaps)
        x = w.x
        _write_csv(out / f"wave_{i:03d}.csv", ["x", "re", "im", "abs2"],
                   zip(x, w.values.real, w.values.imag, np.abs(w.values) ** 2))
        _write_json(out / f"wave_{i:03d}.json", {
            "model": config.model,
            "params": {"omega0": config.omega0, "lambda": config.lam,
                       "initial": config.initial},
            "t": t,
            "norm2": dynamics.squared_norm(w),
            "residual": residual,
        })
    print(f"wrote {len(config.times)} snapshot(s) to {out}")
    return 0


def cmd_kernel(args):
    config = _base_config(args)
    require_underdamped(config)
    coeffs = config.coefficient_set()
    rows = []
    for t in config.times:
        if t <= 0.0:
            raise QuadOscError(f"kernel undefined at t={t}; times must be > 0")
        if not config.model.startswith("custom:"):
            kp = kernel.kernel_closed_form(coeffs, t)
            rows.append((t, kp.alpha, kp.beta, kp.gamma,
                         kp.prefactor.real, kp.prefactor.imag, "closed"))
        mu = kernel.solve_mu_numeric(coeffs, t, args.steps)
        kp = kernel.kernel_params_numeric(coeffs, mu, t)
        rows.append((t, kp.alpha, kp.beta, kp.gamma,
                     kp.prefactor.real, kp.prefactor.imag, "numeric"))
    out = _outdir(config)
    _write_csv(out / "kernel.csv",
               ["t", "alpha", "beta", "gamma", "pref_re", "pref_im", "source"],
               rows)
    print(f"wrote {out / 'kernel.csv'}")
    return 0


def cmd_moments(args):
    config = _base_config(args)
    coeffs = config.coefficient_set()
    opc = operator_form(coeffs)
    init = config.initial_params()
    path = args.path
    if path == "closed":
        require_underdamped(config)
        if ModelKind(config.model) is not ModelKind.MODEL1:
            raise QuadOscError("closed-form moment path exists only for model1")
    rows = []
    if path == "wave":
        source = "numeric" if config.model.startswith("custom:") else "closed"
        chi = config.initial_wave()
        states = [moments.moments_from_wave(dynamics.evolve(coeffs, chi, t,
                                                            source=source))
                  for t in config.times]
    elif path == "closed":
        s0 = _initial_moments(init)
        states = [moments.closed_form_model1(config.omega0, config.lam, s0, t)
                  for t in config.times]
    else:
        s0 = _initial_moments(init)
        states = []
        for t in config.times:
            if t == 0.0:
                states.append(s0)
                continue
            steps = max(100, int(2000 * t))
            states.append(moments.integrate_moments(opc, s0, t, steps)[-1])
    for t, s in zip(config.times, states):
        energy = moments.mechanical_energy(s, config.omega0, config.lam)
        rows.append((t, s.p2, s.x2, s.sym, s.x1, s.p1, s.one, energy))
    out = _outdir(config)
    _write_csv(out / "moments.csv",
               ["t", "p2", "x2", "sym", "x1", "p1", "one", "E"], rows)
    label = {"closed": "closed-form", "rk4": "rk4", "wave": "wave"}[path]
    _write_json(out / "moments.json", {
        "path": label,
        "columns": {k: label for k in ("p2", "x2", "sym", "x1", "p1", "one")}
        | {"E": "energy-combination"},
    })
    print(f"wrote {out / 'moments.csv'}")
    return 0


def _initial_moments(init):
    """Exact moments of the Gaussian packet (x0, p0, s)."""
    x0, p0, s = init["x0"], init["p0"], init["s"]
    return moments.MomentState(
        p2=p0 * p0 + 1.0 / (2.0 * s * s),
        x2=x0 * x0 + 0.5 * s * s,
        sym=2.0 * x0 * p0,
        x1=x0,
        p1=p0,
        one=1.0,
    )


def cmd_mehler(args):
    # The resummed eigenfunction expansion belongs to the norm-conserving
    # shifted oscillator; only omega0/lambda are taken from the config.
    config = _base_config(args)
    require_underdamped(config)
    t = args.t
    coeffs = builtin_model(ModelKind.SHIFTED, config.omega0, config.lam)
    kp = kernel.kernel_closed_form(coeffs, t)
    points = ((0.0, 0.0), (1.0, 2.0), (-1.5, 0.7), (0.5, -0.5))
    targets = {pt: kernel.green_function(kp, *pt) for pt in points}
    rows = []
    for n_terms in (int(v) for v in args.n_list.split(",")):
        for eps in (float(v) for v in args.eps_list.split(",")):
            sup = max(
                abs(eigenstates.expansion_kernel(
                    x, y, t, n_terms, eps,
                    omega0=config.omega0, lam=config.lam) - targets[(x, y)])
                for x, y in points
            )
            rows.append((float(n_terms), eps, sup))
    out = _outdir(config)
    _write_csv(out / "mehler.csv", ["N", "eps", "sup_error"], rows)
    print(f"wrote {out / 'mehler.csv'}")
    return 0


def cmd_eigen(args):
    config = _base_config(args)
    require_underdamped(config)
    table = eigenstates.eigen_table(config.omega0, config.lam, args.nmax,
                                    config.grid)
    out = _outdir(config)
    _write_csv(out / "eigen.csv",
               ["n", "E_n", "norm_defect", "rayleigh_defect"],
               ((float(n), e, nd, rd) for n, e, nd, rd in table))
    print(f"wrote {out / 'eigen.csv'}")
    return 0


def cmd_verify(args):
    config = _base_config(args)
    report = verify.run_all(config)
    out = _outdir(config)
    (out / "report.json").write_text(report.to_json())
    for c in report.sorted_checks():
        status = "PASS" if c.passed else "FAIL"
        line = (f"{status} {c.name}: measured={c.measured:.6g} "
                f"expected={c.expected:.6g} tol={c.tolerance:.6g} "
                f"[{c.runtime_ms:.0f} ms]")
        if c.detail:
            line += f"  ({c.detail})"
        print(line)
    print(f"overall: {'PASS' if report.overall else 'FAIL'} "
          f"({sum(c.passed for c in report.checks)}/{len(report.checks)} checks)")
    print(f"wrote {out / 'report.json'}")
    return 0 if report.overall else 1


def _add_common(parser):
    parser.add_argument("--config", help="path to a run configuration file")
    parser.add_argument("--out", help="output directory (default from config)")
    parser.add_argument("--seed", type=int, help="seed for randomized sweeps")


def _add_model_args(parser):
    parser.add_argument("--model", help="model1|model2|shifted|model3|harmonic|custom:<path>")
    parser.add_argument("--omega0", type=float, help="bare frequency")
    parser.add_argument("--lambda", dest="lam", type=float, help="damping rate")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quadosc",
        description="Damped quantum oscillator propagators, dynamics and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="propagate an initial wave packet")
    _add_common(p)
    _add_model_args(p)
    p.add_argument("--initial", help="gaussian:x0=..,p0=..,s=..")
    p.add_argument("--times", help="comma-separated times")
    p.set_defaults(fn=cmd_propagate)

    p = sub.add_parser("kernel", help="emit kernel parameters, both pipelines")
    _add_common(p)
    _add_model_args(p)
    p.add_argument("--times", help="comma-separated times")
    p.add_argument("--steps", type=int, default=2048,
                   help="RK4 steps for the numeric pipeline")
    p.set_defaults(fn=cmd_kernel)

    p = sub.add_parser("moments", help="expectation-value trajectories")
    _add_common(p)
    _add_model_args(p)
    p.add_argument("--initial", help="gaussian:x0=..,p0=..,s=..")
    p.add_argument("--times", help="comma-separated times")
    p.add_argument("--path", choices=("closed", "rk4", "wave"), default="rk4")
    p.set_defaults(fn=cmd_moments)

    p = sub.add_parser("mehler", help="resummation convergence tables")
    _add_common(p)
    _add_model_args(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--n-list", default="100,400,2000,12000")
    p.add_argument("--eps-list", default="0.004,0.002,0.001")
    p.set_defaults(fn=cmd_mehler)

    p = sub.add_parser("eigen", help="eigenstate diagnostics")
    _add_common(p)
    _add_model_args(p)
    p.add_argument("--nmax", type=int, default=8)
    p.set_defaults(fn=cmd_eigen)

    p = sub.add_parser("verify", help="run the verification suite")
    _add_common(p)
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except QuadOscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
