"""Built-in oracle and invariant checks run by ``sagnacsq validate``.

Every check has a stable ID prefixed by its module: ``P`` params, ``PS``
phasespace, ``N`` nlse, ``S`` sagnac.  NLSE checks use small grids so the
whole suite stays in the tens of seconds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import oracles, params, phasespace as ps, sagnac
from .nlse import Envelope, TimeGrid, make_sech_envelope, split_step, ssfm_propagate
from .params import CouplerSpec, FiberSpec, LossBudget, PulseSpec


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    description: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.check_id:<5} {self.description}: {self.detail}"


_REGISTRY = []


def check(check_id: str, description: str):
    def wrap(fn):
        _REGISTRY.append((check_id, description, fn))
        return fn
    return wrap


# --- params ---------------------------------------------------------------

@check("P1", "T0 conversion constant equals 2 ln(1 + sqrt 2)")
def _p1():
    err = abs(params.SECH_FWHM_FACTOR - 2.0 * math.asinh(1.0))
    return err < 1e-15, f"|diff| = {err:.1e}"


@check("P2", "soliton energy linear in |beta2|, inverse in gamma and T0")
def _p2():
    base = params.fundamental_soliton_energy(params.HB1500, 100.0).soliton_energy_pj
    b2 = params.fundamental_soliton_energy(
        FiberSpec(-27.4, 2.9, 9.5), 100.0).soliton_energy_pj
    g2 = params.fundamental_soliton_energy(FiberSpec(-13.7, 5.8, 9.5), 100.0).soliton_energy_pj
    t2 = params.fundamental_soliton_energy(params.HB1500, 200.0).soliton_energy_pj
    ok = (math.isclose(b2, 2 * base, rel_tol=1e-12) and math.isclose(g2, base / 2, rel_tol=1e-12)
          and math.isclose(t2, base / 2, rel_tol=1e-12))
    return ok, f"E1 = {base:.4g} pJ, x2 beta2 -> {b2:.4g}, x2 gamma -> {g2:.4g}, x2 T -> {t2:.4g}"


@check("P3", "soliton order of an E1 pulse is 1")
def _p3():
    worst = 0.0
    for fiber, fwhm in ((params.HB1500, 100.0), (params.SSMF, 130.0), (FiberSpec(-3.0, 11.0, 1.0), 45.0)):
        e1 = params.fundamental_soliton_energy(fiber, fwhm).soliton_energy_pj
        n = params.soliton_order(fiber, PulseSpec(fwhm, energy_pj=e1))
        worst = max(worst, abs(n - 1.0))
    return worst < 1e-9, f"max |N - 1| = {worst:.1e}"


@check("P4", "loss budget is order-independent and multiplicative")
def _p4():
    a = LossBudget((("a", 0.9), ("b", 0.8)))
    b = LossBudget((("c", 0.95), ("d", 0.5)))
    ab = (a + b).transmission
    ba = LossBudget(tuple(reversed((a + b).elements))).transmission
    ok = math.isclose(ab, ba, rel_tol=1e-15) and math.isclose(ab, a.transmission * b.transmission,
                                                              rel_tol=1e-15)
    ok = ok and LossBudget().transmission == 1.0
    return ok, f"T(a+b) = {ab:.6g}"


@check("P5", "derived experimental quantities")
def _p5():
    e = params.pulse_energy_from_mean_power(12.0, 82.0)
    hb = params.fundamental_soliton_energy(params.HB1500, 100.0).soliton_energy_pj
    ss = params.fundamental_soliton_energy(params.SSMF, 130.0).soliton_energy_pj
    pair = params.CONNECTOR_PAIR.transmission
    ok = (abs(e / 146.3 - 1) <= 0.01 and abs(hb / 150 - 1) <= 0.15 and abs(ss / 560 - 1) <= 0.15
          and abs(pair / 0.856 - 1) <= 0.003)
    return ok, f"E(12 mW) = {e:.4g} pJ, E1 hb1500 = {hb:.4g} pJ, E1 ssmf = {ss:.4g} pJ, T(2 conn) = {pair:.4f}"


# --- phasespace -----------------------------------------------------------

@check("PS1", "Kerr shear and rotations preserve det = 1; recombination det >= 1")
def _ps1():
    rng = np.random.default_rng(11)
    worst = 0.0
    min_rec = math.inf
    for _ in range(200):
        m = ps.kerr_mode(1.0, rng.uniform(0, 10)).rotated(rng.uniform(-np.pi, np.pi))
        worst = max(worst, abs(m.det - 1.0))
        eta = rng.uniform(0, 0.5)
        rec = ps.recombine(ps.kerr_mode(1.0, rng.uniform(0, 10)), ps.kerr_mode(1.0, rng.uniform(0, 2)),
                           eta, rng.uniform(0, 2 * np.pi))
        min_rec = min(min_rec, rec.det)
    return worst < 1e-9 and min_rec >= 1 - 1e-9, f"max |det - 1| = {worst:.1e}, min det(out) = {min_rec:.6g}"


@check("PS2", "quadratic form u^T M u equals the closed-form variance")
def _ps2():
    worst = 0.0
    for phi in (0.0, 0.5, 1.0, 5.0, 10.0):
        m = ps.kerr_covariance(phi)
        for th in np.linspace(-np.pi, np.pi, 100):
            u = np.array([math.cos(th), math.sin(th)])
            worst = max(worst, abs(u @ m @ u - ps.kerr_variance(th, phi)))
    return worst < 1e-12, f"max |diff| = {worst:.1e}"


@check("PS3", "min x max quadrature variance = 1")
def _ps3():
    worst = 0.0
    for phi in (0.1, 0.5, 1.0, 5.0, 10.0):
        ev = np.linalg.eigvalsh(ps.kerr_covariance(phi))
        worst = max(worst, abs(ev[0] * ev[-1] - 1.0))
    return worst < 1e-9, f"max |min*max - 1| = {worst:.1e}"


@check("PS4", "shot noise at relative phase 0, pi, 2 pi")
def _ps4():
    rng = np.random.default_rng(4)
    worst = 0.0
    for eta in rng.uniform(0.005, 0.45, 10):
        for phase in (0.0, math.pi, 2 * math.pi):
            worst = max(worst, abs(ps.noise_vs_phase(eta, phase).variance - 1.0))
    return worst < 1e-9, f"max |V - 1| = {worst:.1e}"


@check("PS5", "excess noise for relative phase below pi")
def _ps5():
    v = max(ps.noise_vs_phase(0.075, p).variance for p in np.linspace(0.01, math.pi - 0.01, 200))
    return v > 1.0, f"max V = {v:.4g}"


@check("PS6", "loss channel is affine, monotone, fixes shot noise, keeps the argmin")
def _ps6():
    vs = np.linspace(0.05, 5, 50)
    out = np.array([ps.apply_loss(v, 0.3) for v in vs])
    affine = np.allclose(np.diff(out) / np.diff(vs), 0.7, atol=1e-12)
    fixed = abs(ps.apply_loss(1.0, 0.3) - 1.0) < 1e-15
    pairs = ps.ratio_sweep(0.01, 0.30, 200, 0.3)
    same = int(np.argmin([a.variance for a, _ in pairs])) == int(np.argmin([b.variance for _, b in pairs]))
    return affine and fixed and same and bool(np.all(np.diff(out) > 0)), "affine slope 0.7, V=1 fixed, argmin shared"


@check("PS7", "analytic amplitude variance vs 10^6-sample Monte-Carlo (20 pairs, 3 sigma)")
def _ps7():
    rng = np.random.default_rng(20260)
    worst = 0.0
    for k in range(20):
        eta = float(rng.uniform(0.02, 0.3))
        phase = float(rng.uniform(0.2, 2.2 * math.pi))
        mc = oracles.mc_loop_variance(eta, phase, samples=1_000_000, rng=1000 + k)
        z = abs(mc.variance - ps.noise_vs_phase(eta, phase).variance) / mc.stderr
        worst = max(worst, z)
    return worst < 3.0, f"max deviation = {worst:.2f} standard errors"


@check("PS8", "ratio sweep optimum, depth and shot-noise crossing")
def _ps8():
    pairs = ps.ratio_sweep(0.01, 0.30, 200, 0.30)
    i = int(np.argmin([a.variance for a, _ in pairs]))
    coeff = 100 * pairs[i][0].x
    depth = pairs[i][0].variance_db
    lossy = pairs[i][1].variance_db
    cross = 100 * ps.qnl_crossing()
    ok = 7.0 <= coeff <= 8.2 and abs(depth + 7.7) <= 0.2 and abs(lossy + 3.8) <= 0.3 and 11 <= cross <= 14.5
    return ok, f"optimum at {coeff:.2f}, {depth:.2f} dB ({lossy:.2f} dB with 30 % loss), V = 1 at {cross:.2f}"


# --- nlse -----------------------------------------------------------------

def _soliton_case(n=1024, window_ps=8.0):
    grid = TimeGrid(n, window_ps)
    e1 = params.fundamental_soliton_energy(params.HB1500, 100.0).soliton_energy_pj
    return grid, make_sech_envelope(grid, PulseSpec(100.0, energy_pj=e1))


@check("N1", "energy conserved by split-step propagation")
def _n1():
    grid, env = _soliton_case()
    env = Envelope(grid, env.samples * 1.7)
    out = ssfm_propagate(env, params.HB1500, 500)
    err = abs(out.energy_pj - env.energy_pj) / env.energy_pj
    return err < 1e-9, f"relative change = {err:.1e}"


def convergence_exponent(grid, env, fiber, steps=(100, 200), refine=4):
    """log2 of the error ratio when dz is halved; error against a refine x finer solution."""
    ref = split_step(env.samples, grid.dt, fiber.beta2, fiber.gamma, fiber.length_m, steps[-1] * refine)
    errs = []
    for n in steps:
        out = split_step(env.samples, grid.dt, fiber.beta2, fiber.gamma, fiber.length_m, n)
        errs.append(np.linalg.norm(out - ref) / np.linalg.norm(ref))
    return math.log(errs[0] / errs[1], steps[1] / steps[0]), errs


@check("N2", "second-order convergence of the split-step scheme")
def _n2():
    grid, env = _soliton_case()
    p, errs = convergence_exponent(grid, env, params.HB1500)
    return 1.7 <= p <= 2.3, f"exponent = {p:.3f} (errors {errs[0]:.2e}, {errs[1]:.2e})"


@check("N3", "propagation is linear when gamma = 0")
def _n3():
    grid = TimeGrid(512, 8.0)
    rng = np.random.default_rng(5)
    a, b = (rng.standard_normal(grid.n) + 1j * rng.standard_normal(grid.n) for _ in range(2))
    fiber = FiberSpec(-13.7, 0.0, 9.5)
    go = lambda x: split_step(x, grid.dt, fiber.beta2, 0.0, fiber.length_m, 50)
    lhs = go(2.0 * a - 3.0j * b)
    rhs = 2.0 * go(a) - 3.0j * go(b)
    err = np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs)
    return err < 1e-10, f"relative L2 = {err:.1e}"


@check("N4", "time reversal with (-beta2, -gamma) recovers the input")
def _n4():
    grid, env = _soliton_case()
    f = params.HB1500
    fwd = split_step(env.samples * 1.3, grid.dt, f.beta2, f.gamma, f.length_m, 400)
    back = split_step(fwd, grid.dt, -f.beta2, -f.gamma, f.length_m, 400)
    err = np.linalg.norm(back - env.samples * 1.3) / np.linalg.norm(env.samples * 1.3)
    return err < 1e-6, f"relative L2 = {err:.1e}"


@check("N5", "fundamental soliton keeps peak power and width over 9.5 m")
def _n5():
    grid, env = _soliton_case(2048, 16.0)
    out = ssfm_propagate(env, params.HB1500, 2000)
    dp = abs(out.peak_power_w / env.peak_power_w - 1)
    dw = abs(out.fwhm_fs() / env.fwhm_fs() - 1)
    return dp < 0.01 and dw < 0.01, f"peak drift {dp:.2e}, FWHM drift {dw:.2e}"


# --- sagnac ---------------------------------------------------------------

def _loop(fiber, eta=0.07, n=512, window=16.0, steps=200):
    return sagnac.LoopConfig(fiber, CouplerSpec(eta), PulseSpec(100.0, energy_pj=100.0, rep_rate_mhz=82.0),
                             TimeGrid(n, window), steps)


@check("S1", "output + reflected port energy equals input energy")
def _s1():
    cfg = _loop(params.HB1500, n=1024)
    energies = np.linspace(5, 400, 12)
    out, refl = sagnac.loop_energies(cfg, energies)
    err = float(np.max(np.abs(out + refl - energies) / energies))
    return err < 1e-9, f"max relative imbalance = {err:.1e}"


@check("S2", "gamma = 0 transfer equals (1 - 2 eta)^2 P")
def _s2():
    cfg = _loop(FiberSpec(-13.7, 0.0, 9.5), eta=0.12, n=2048)
    p = np.linspace(0.5, 30, 20)
    curve = sagnac.transfer_curve(cfg, p)
    err = float(np.max(np.abs(curve.p_out / p - (1 - 0.24) ** 2)))
    return err < 1e-9, f"max |T - (1-2 eta)^2| = {err:.1e}"


@check("S3", "dispersionless loop matches the closed-form CW loop mirror")
def _s3():
    cfg = _loop(FiberSpec(0.0, 2.9, 9.5), eta=0.07, n=64, window=20.0, steps=50)
    grid = cfg.grid
    powers = np.linspace(1.0, 1500.0, 100)
    env = Envelope(grid, np.ones(grid.n))
    worst = 0.0
    for p in powers:
        out = sagnac.loop_output(Envelope(grid, env.samples * math.sqrt(p)), cfg)
        sim = out.power.mean() / p
        exact = oracles.cw_loop_transmission(0.07, cfg.fiber.gamma, cfg.fiber.length_m, p)
        worst = max(worst, abs(sim - exact) / exact)
    return worst < 1e-6, f"max relative deviation = {worst:.1e}"


@check("S4", "noise sweep touches V = 1 at integer multiples of pi")
def _s4():
    eta, kappa = 0.1, 0.5
    powers = [k * math.pi / (kappa * (1 - 2 * eta)) for k in range(0, 4)]
    pts = sagnac.power_noise_sweep(eta, powers, kappa)
    worst = max(abs(p.lossless.variance - 1.0) for p in pts)
    return worst < 1e-9, f"max |V - 1| = {worst:.1e}"


@check("S5", "identical runs produce identical CSV")
def _s5():
    cfg = _loop(params.HB1500, n=256, window=16.0, steps=50)
    p = np.linspace(1, 20, 10)
    a = sagnac.transfer_curve(cfg, p).to_csv()
    b = sagnac.transfer_curve(cfg, p).to_csv()
    c = sagnac.ratio_sweep_csv(ps.ratio_sweep(0.01, 0.3, 50, 0.3))
    d = sagnac.ratio_sweep_csv(ps.ratio_sweep(0.01, 0.3, 50, 0.3))
    return a == b and c == d, "byte-identical"


@check("S6", "double dip at eta = 0.13, single dip at eta = 0.07")
def _s6():
    counts = {}
    for eta in (0.07, 0.13):
        kappa = 1.0
        phases = np.linspace(0.5 * math.pi, 2.5 * math.pi, 801)
        pts = sagnac.power_noise_sweep(eta, phases / (kappa * (1 - 2 * eta)), kappa)
        v = [p.lossless.variance for p in pts]
        counts[eta] = (len(sagnac.local_minima(v)), len(sagnac.local_maxima(v)))
    ok = counts[0.13][0] == 2 and counts[0.07][0] == 1
    return ok, f"minima at 0.07: {counts[0.07][0]}, at 0.13: {counts[0.13][0]}"


def run_checks(selected: Callable[[str], bool] = lambda _: True) -> List[CheckResult]:
    results = []
    for cid, desc, fn in _REGISTRY:
        if not selected(cid):
            continue
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(cid, desc, bool(ok), detail))
    return results
