"""Command-line front end.

Subcommands: manifold, limit, simulate, compare, convergence, fluct.
A shared plain-text config file supplies network parameters (defaulting to
the packaged preset); explicit flags override file values.  Exit codes:
0 success, 1 I/O failure, 2 off-manifold initial data, 64 usage error.

Note: subcommands reserve ``-h`` for the integrator step (use ``--help``).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import csvio, svg
from .empirics import convergence_study, sup_error
from .errors import BalancedNetError, NoRootError
from .fluctuations import check_moc_concentration, check_tail_bound
from .limit_ode import detect_eta, integrate_limit
from .manifold import classify, solve_balance
from .model import MacroState, init_micro
from .simulate import SimConfig, empirical_trajectory, simulate

EXIT_OK = 0
EXIT_IO = 1
EXIT_OFF_MANIFOLD = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(sp, *, step=False, sim=False):
    sp.add_argument("--help", action="help", help="show this help message and exit")
    sp.add_argument("--config", type=Path, default=None,
                    help="parameter file (default: packaged preset)")
    sp.add_argument("--preset", choices=sorted(cfgmod.EXPERIMENTS),
                    default=None, help="named experiment preset for (ke, ki)")
    sp.add_argument("--ke", type=float, default=None, help="initial variance K_e(0)")
    sp.add_argument("--ki", type=float, default=None, help="initial variance K_i(0)")
    sp.add_argument("-T", type=float, default=10.0, help="time horizon")
    if step:
        sp.add_argument("-h", dest="step", type=float, default=1e-3,
                        help="limit integrator step")
    if sim:
        sp.add_argument("--method", choices=("exact", "fixed"), default="fixed")
        sp.add_argument("--dt", type=float, default=1e-3, help="fixed-step dt")
        sp.add_argument("-n", type=int, default=None, help="per-population size override")
        sp.add_argument("--seed", type=int, default=42)
        sp.add_argument("--stride", type=float, default=0.01, help="record stride")


def _load_params(args):
    if args.config is not None:
        params = cfgmod.load_params(args.config)
    else:
        params = cfgmod.paper_params()
    if getattr(args, "n", None):
        params = params.replace(n=args.n)
    return params


def _initial_variances(args):
    k_e, k_i = cfgmod.EXPERIMENTS[args.preset] if args.preset else (1.0, 1.0)
    if args.ke is not None:
        k_e = args.ke
    if args.ki is not None:
        k_i = args.ki
    if k_e < 0 or k_i < 0:
        raise ValueError("initial variances must be non-negative")
    return k_e, k_i


def _cmd_manifold(args) -> int:
    params = _load_params(args)
    k_e, k_i = _initial_variances(args)
    if args.ve is not None and args.vi is not None:
        state = MacroState(args.ve, args.vi, k_e, k_i)
    else:
        try:
            m_e, m_i = solve_balance(k_e, k_i, params)
        except NoRootError as exc:
            print(f"balance solve failed: {exc}", file=sys.stderr)
            return EXIT_OFF_MANIFOLD
        state = MacroState(m_e, m_i, k_e, k_i)
    rep = classify(state, params)
    print(rep.format_record() if args.format == "record" else rep.format_text())
    return EXIT_OK


def _cmd_limit(args) -> int:
    params = _load_params(args)
    k_e, k_i = _initial_variances(args)
    m_e, m_i = solve_balance(k_e, k_i, params)
    traj = integrate_limit(MacroState(m_e, m_i, k_e, k_i), params, args.T, args.step)
    if args.out:
        csvio.write_csv(args.out,
                        ["t", "v_e", "v_i", "K_e", "K_i", "F_e", "F_i", "zeta", "det_Jv"],
                        [traj.times, traj.v_e, traj.v_i, traj.K_e, traj.K_i,
                         traj.F_e, traj.F_i, traj.zetas, traj.det_Jvs])
    eta = detect_eta(traj)
    print(f"integrated {len(traj)} points to t={traj.times[-1]:g}; "
          f"min zeta={traj.zetas.min():.6g}; "
          f"eta={'none' if eta is None else f'{eta:g}'}"
          + (f" (stopped: {traj.eta_reason})" if traj.eta_hit is not None else ""))
    return EXIT_OK


def _solved_initial(params, k_e, k_i):
    m_e, m_i = solve_balance(k_e, k_i, params)
    state = MacroState(m_e, m_i, k_e, k_i)
    report = classify(state, params)
    return state, report


def _cmd_simulate(args) -> int:
    params = _load_params(args)
    k_e, k_i = _initial_variances(args)
    if args.me is not None and args.mi is not None:
        m_e, m_i = args.me, args.mi
    else:
        m_e, m_i = solve_balance(k_e, k_i, params)
    init = init_micro(m_e, m_i, k_e, k_i, params, args.seed)
    sim_cfg = SimConfig(method=args.method, T=args.T, seed=args.seed,
                        dt=args.dt, record_stride=args.stride)
    traj = simulate(init, params, sim_cfg)
    if args.out:
        csvio.write_csv(args.out, ["t", "v_e", "v_i", "K_e", "K_i"],
                        [traj.times, traj.v_e, traj.v_i, traj.K_e, traj.K_i])
    if args.dump_micro:
        csvio.dump_micro(args.dump_micro, traj.final_micro)
    print(f"simulated n={params.n} with method={args.method} to T={args.T:g} "
          f"({len(traj.times)} records)")
    return EXIT_OK


def _cmd_compare(args) -> int:
    params = _load_params(args)
    k_e, k_i = _initial_variances(args)
    state, report = _solved_initial(params, k_e, k_i)
    if not report.in_U:
        print("initial condition is off the balanced manifold:", file=sys.stderr)
        print(report.format_text(), file=sys.stderr)
        return EXIT_OFF_MANIFOLD
    lim = integrate_limit(state, params, args.T, args.step)
    init = init_micro(state.v_e, state.v_i, k_e, k_i, params, args.seed)
    sim_cfg = SimConfig(method=args.method, T=args.T, seed=args.seed,
                        dt=args.dt, record_stride=args.stride)
    traj = simulate(init, params, sim_cfg)
    emp = empirical_trajectory(traj)
    errs = sup_error(emp, lim)

    t = emp.times
    lim_i = {name: np.interp(t, lim.times, getattr(lim, name))
             for name in ("v_e", "v_i", "K_e", "K_i")}
    if args.out:
        csvio.write_csv(args.out,
                        ["t", "v_e_emp", "v_e_lim", "v_i_emp", "v_i_lim",
                         "K_e_emp", "K_e_lim", "K_i_emp", "K_i_lim"],
                        [t, emp.v_e, lim_i["v_e"], emp.v_i, lim_i["v_i"],
                         emp.K_e, lim_i["K_e"], emp.K_i, lim_i["K_i"]])
    if args.svg_prefix:
        emp_label = f"simulation (n={params.n})"
        for name in ("K_i", "K_e", "v_i", "v_e"):
            svg.emit_svg(
                [(emp_label, t, getattr(emp, name)), ("limit", t, lim_i[name])],
                f"{args.svg_prefix}_{name}.svg",
                title=f"{name}: simulation vs limit", xlabel="t", ylabel=name)
    print(f"sup errors over [0, {args.T:g}]: "
          f"v_e={errs.v_e:.6g} v_i={errs.v_i:.6g} K_e={errs.K_e:.6g} K_i={errs.K_i:.6g}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    params = _load_params(args)
    k_e, k_i = _initial_variances(args)
    ns = [int(v) for v in args.ns.split(",") if v]
    seeds = [args.seed + i for i in range(args.seeds)]
    study = convergence_study(ns, seeds, params, k_e, k_i, T=args.T,
                              dt=args.dt, record_stride=args.stride, h=args.step,
                              method=args.method)
    rows = study.rows
    if args.out:
        csvio.write_csv(args.out,
                        ["n", "seed", "sup_err_v_e", "sup_err_v_i",
                         "sup_err_K_e", "sup_err_K_i", "w1_e_final", "w1_i_final"],
                        [np.array([r.n for r in rows]),
                         np.array([r.seed for r in rows]),
                         np.array([r.sup_err_v_e for r in rows]),
                         np.array([r.sup_err_v_i for r in rows]),
                         np.array([r.sup_err_K_e for r in rows]),
                         np.array([r.sup_err_K_i for r in rows]),
                         np.array([r.w1_e_final for r in rows]),
                         np.array([r.w1_i_final for r in rows])])
    for n in study.ns:
        if n in study.medians:
            print(f"n={n}: median combined sup error {study.medians[n]:.6g}")
    print(f"monotone={study.monotone} ratio_first_last={study.ratio_first_last:.3g}")
    return EXIT_OK


def _cmd_fluct(args) -> int:
    if args.fluct_cmd == "tail":
        xs = [float(v) for v in args.xs.split(",") if v]
        res = check_tail_bound(args.n, args.T, xs, args.trials, seed=args.seed)
        if args.out:
            csvio.write_csv(args.out, ["x", "empirical_tail", "bound", "holds"],
                            [res.x_grid, res.empirical_tail, res.bound,
                             res.holds.astype(int)])
        for x, e, b, h in zip(res.x_grid, res.empirical_tail, res.bound, res.holds):
            print(f"x={x:g}: empirical={e:.6g} bound={b:.6g} holds={bool(h)}")
        return EXIT_OK
    eps = [float(v) for v in args.eps.split(",") if v]
    rep = check_moc_concentration(args.n, eps, args.delta, args.trials,
                                  seed=args.seed, horizon=args.S)
    if args.out:
        csvio.write_csv(args.out, ["eps", "frequency"],
                        [rep.eps_grid, rep.frequencies])
    for e, f in zip(rep.eps_grid, rep.frequencies):
        print(f"eps={e:g}: frequency={f:.6g}")
    print(f"non_increasing={rep.non_increasing}")
    return EXIT_OK


def build_parser() -> _Parser:
    top = _Parser(prog="balanced-net",
                  description="Balanced-network simulators and hydrodynamic-limit tools")
    sub = top.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("manifold", add_help=False,
                       help="solve / classify a balance point")
    _add_common(p)
    p.add_argument("--ve", type=float, default=None, help="classify at explicit v_e")
    p.add_argument("--vi", type=float, default=None, help="classify at explicit v_i")
    p.add_argument("--format", choices=("text", "record"), default="text")
    p.set_defaults(func=_cmd_manifold)

    p = sub.add_parser("limit", add_help=False, help="integrate the limit system")
    _add_common(p, step=True)
    p.add_argument("--out", type=Path, default=None, help="trajectory CSV")
    p.set_defaults(func=_cmd_limit)

    p = sub.add_parser("simulate", add_help=False, help="run a finite-n simulation")
    _add_common(p, sim=True)
    p.add_argument("--me", type=float, default=None, help="initial mean override")
    p.add_argument("--mi", type=float, default=None, help="initial mean override")
    p.add_argument("--out", type=Path, default=None, help="trajectory CSV")
    p.add_argument("--dump-micro", type=Path, default=None,
                   help="write the final micro state (binary)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("compare", add_help=False,
                       help="simulation vs limit: CSV, SVG panels, sup errors")
    _add_common(p, step=True, sim=True)
    p.add_argument("--out", type=Path, default=None, help="combined CSV")
    p.add_argument("--svg-prefix", type=str, default=None,
                   help="write <prefix>_{K_i,K_e,v_i,v_e}.svg")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("convergence", add_help=False,
                       help="sup-error sweep across population sizes")
    _add_common(p, step=True, sim=True)
    p.add_argument("--ns", type=str, default="250,1000,4000",
                   help="comma-separated population sizes")
    p.add_argument("--seeds", type=int, default=10, help="seeds per size")
    p.set_defaults(func=_cmd_convergence, T=5.0)

    p = sub.add_parser("fluct", add_help=False,
                       help="compensated-Poisson fluctuation checks")
    p.add_argument("--help", action="help")
    fsub = p.add_subparsers(dest="fluct_cmd", required=True, parser_class=_Parser)
    pt = fsub.add_parser("tail", add_help=False, help="sup-deviation tail bound")
    pt.add_argument("--help", action="help")
    pt.add_argument("--n", type=int, default=100)
    pt.add_argument("-T", type=float, default=1.0)
    pt.add_argument("--xs", type=str, default="0.5,1,2,3")
    pt.add_argument("--trials", type=int, default=10000)
    pt.add_argument("--seed", type=int, default=0)
    pt.add_argument("--out", type=Path, default=None)
    pt.set_defaults(func=_cmd_fluct)
    pm = fsub.add_parser("moc", add_help=False, help="modulus-of-continuity concentration")
    pm.add_argument("--help", action="help")
    pm.add_argument("--n", type=int, default=100)
    pm.add_argument("-S", type=float, default=1.0, help="path horizon")
    pm.add_argument("--eps", type=str, default="0.1,0.01,0.001")
    pm.add_argument("--delta", type=float, default=0.5)
    pm.add_argument("--trials", type=int, default=1000)
    pm.add_argument("--seed", type=int, default=0)
    pm.add_argument("--out", type=Path, default=None)
    pm.set_defaults(func=_cmd_fluct)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BalancedNetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OFF_MANIFOLD if isinstance(exc, NoRootError) else EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
