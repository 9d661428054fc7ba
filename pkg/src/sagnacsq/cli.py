"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 validation failure,
3 numeric instability.  Every error path prints one line starting with
``error:`` to stderr.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__, _core, params, phasespace as ps, sagnac
from .config import load_config
from .errors import NumericInstabilityError, SagnacError
from .nlse import make_sech_envelope

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _power_grid(args):
    if args.points < 10:
        raise SagnacError("--points must be >= 10")
    if not args.p_max > args.p_min >= 0:
        raise SagnacError("need 0 <= --p-min < --p-max")
    return np.linspace(args.p_min, args.p_max, args.points)


def _curve(cfg, args):
    loop = cfg.loop_config()
    grid = _power_grid(args)
    if args.energy:
        return sagnac.transfer_curve_energy(loop, grid)
    return sagnac.transfer_curve(loop, grid)


def cmd_derive(cfg, args):
    fiber, pulse = cfg.fiber, cfg.pulse
    metrics = params.soliton_metrics(fiber, pulse)
    e1 = params.fundamental_soliton_energy(fiber, pulse.t_fwhm_fs)
    print(f"fiber            {fiber.name}: beta2 = {fiber.beta2_ps2_per_km:g} ps^2/km, "
          f"gamma = {fiber.gamma_per_w_km:g} /(W km), L = {fiber.length_m:g} m")
    if pulse.mean_power_mw is not None:
        print(f"pulse energy     {pulse.energy:.4f} pJ  ({pulse.mean_power_mw:g} mW at {pulse.rep_rate_mhz:g} MHz)")
    else:
        print(f"pulse energy     {pulse.energy:.4f} pJ")
    print(f"T0               {metrics.t0_fs:.4f} fs  (FWHM {pulse.t_fwhm_fs:g} fs)")
    print(f"peak power       {metrics.peak_power_w:.4f} W")
    print(f"soliton energy   {e1.soliton_energy_pj:.4f} pJ  (N = 1, P0 = {e1.peak_power_w:.4f} W; "
          f"lab quotes agree within +-15 %)")
    print(f"soliton order    N = {metrics.soliton_order:.4f}")
    print(f"dispersion len.  {params.dispersion_length_m(fiber, pulse.t_fwhm_fs):.4f} m")
    print(f"coupler          {cfg.coupler.ratio} (coefficient {cfg.coupler.coefficient:g})")
    for label, db in cfg.budget.element_db():
        print(f"loss element     {label:<14} {10 ** (-db / 10):.4f}  ({db:.3f} dB)")
    print(f"total transmission {cfg.budget.transmission:.4f} (loss {cfg.budget.loss:.4f})")
    print(f"noise loss used  {cfg.noise_loss:.4f}")
    return EXIT_OK


def cmd_ratio_sweep(cfg, args):
    loss = cfg.noise_loss if args.loss is None else args.loss
    pairs = ps.ratio_sweep(args.eta_min, args.eta_max, args.steps, loss)
    _write(sagnac.ratio_sweep_csv(pairs), args.out)
    best = min(pairs, key=lambda p: p[0].variance)
    print(f"optimum coefficient {100 * best[0].x:.3f}: {best[0].variance_db:.3f} dB lossless, "
          f"{best[1].variance_db:.3f} dB with loss {loss:g}", file=sys.stderr)
    return EXIT_OK


def cmd_power_sweep(cfg, args):
    eta = cfg.coupler.eta
    kappa = args.kappa if args.kappa is not None else cfg.kappa
    if kappa is None:
        # calibrate against the simulated loop
        curve = _curve(cfg, args)
        kappa = sagnac.calibrate_kappa(curve)
    loss = cfg.noise_loss if args.loss is None else args.loss
    grid = _power_grid(args)
    pts = sagnac.power_noise_sweep(eta, grid, kappa, loss)
    _write(sagnac.noise_sweep_csv(pts), args.out)
    print(f"kappa = {kappa:.6g} rad per input unit", file=sys.stderr)
    return EXIT_OK


def cmd_transfer(cfg, args):
    curve = _curve(cfg, args)
    _write(curve.to_csv(), args.out)
    if args.envelope_out:
        loop = cfg.loop_config()
        env = sagnac.loop_output(make_sech_envelope(loop.grid, cfg.pulse), loop)
        with open(args.envelope_out, "w", newline="") as fh:
            env.to_csv(fh)
    return EXIT_OK


def cmd_plateau(cfg, args):
    curve = _curve(cfg, args)
    plateaus = sagnac.find_plateau(curve)
    print(f"classification: {sagnac.slope_classification(curve).value}")
    if not plateaus:
        print("no plateau")
    for p in plateaus:
        print(f"plateau {p.start:.6g} .. {p.stop:.6g} {curve.unit}, midpoint {p.midpoint:.6g}, "
              f"flattest {p.flattest:.6g}")
    return EXIT_OK


def cmd_validate(cfg, args):
    from .validation import run_checks

    wanted = set(args.only.split(",")) if args.only else None
    t0 = time.perf_counter()
    results = run_checks(lambda cid: wanted is None or cid in wanted)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed "
          f"in {time.perf_counter() - t0:.1f} s (kernels: {_core.BACKEND})")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser():
    parser = _Parser(prog="sagnacsq", description="Asymmetric fiber Sagnac squeezer simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-c", "--config", help="flat key = value configuration file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("derive", help="pulse, soliton and loss figures")

    p = sub.add_parser("ratio-sweep", help="plateau noise vs splitting ratio (CSV)")
    p.add_argument("--eta-min", type=float, default=0.01)
    p.add_argument("--eta-max", type=float, default=0.30)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--loss", type=float, help="lumped loss (default from config)")
    p.add_argument("-o", "--out")

    def add_sweep(p):
        p.add_argument("--p-min", type=float, default=0.0, help="first input power (mW, or pJ with --energy)")
        p.add_argument("--p-max", type=float, default=30.0)
        p.add_argument("--points", type=int, default=121)
        p.add_argument("--energy", action="store_true", help="sweep pulse energy in pJ instead of mean power")

    p = sub.add_parser("power-sweep", help="noise vs input power (CSV)")
    add_sweep(p)
    p.add_argument("--kappa", type=float, help="phase coefficient in rad per mW (rad per pJ with --energy); calibrated if omitted")
    p.add_argument("--loss", type=float)
    p.add_argument("-o", "--out")

    p = sub.add_parser("transfer", help="loop transfer characteristic (CSV)")
    add_sweep(p)
    p.add_argument("-o", "--out")
    p.add_argument("--envelope-out", help="also dump the output envelope at the configured pulse energy")

    p = sub.add_parser("plateau", help="detect plateaus in the transfer characteristic")
    add_sweep(p)

    p = sub.add_parser("validate", help="run the built-in oracle and invariant checks")
    p.add_argument("--only", help="comma-separated check IDs")
    return parser


COMMANDS = {
    "derive": cmd_derive,
    "ratio-sweep": cmd_ratio_sweep,
    "power-sweep": cmd_power_sweep,
    "transfer": cmd_transfer,
    "plateau": cmd_plateau,
    "validate": cmd_validate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except NumericInstabilityError as exc:
        print(f"error: numeric instability: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SagnacError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
