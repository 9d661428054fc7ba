"""The fiber loop: coupler, two counter-propagating pulses, recombination.

Coupler convention (lossless, symmetric)::

    bar = sqrt(1 - eta),  cross = i sqrt(eta)

The input is split into ``strong = bar * A`` and ``weak = cross * A``.  After
one pass through the fiber each pulse meets the coupler again; the output port
collects ``bar * strong' + cross * weak'`` and the reflected port
``cross * strong' + bar * weak'``.  In the linear limit the output port carries
(1 - 2 eta)^2 of the input power.  Both pulses are propagated independently,
without cross-phase modulation between them.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import CalibrationError, InsufficientDataError, InvalidParameterError, WindowingError
from .nlse import MIN_WINDOW_T0, PS, Envelope, TimeGrid, make_sech_envelope, split_step
from .params import (FS, PJ, CouplerSpec, FiberSpec, PulseSpec, mean_power_from_pulse_energy,
                     pulse_energy_from_mean_power, t0_from_fwhm)
from .phasespace import NoisePoint, apply_loss, noise_vs_phase, PLATEAU_PHASE

PLATEAU_SLOPE = 0.2
NEGATIVE_SLOPE = 0.05
DEFAULT_REP_RATE_MHZ = 82.0


def required_window_ps(fiber: FiberSpec, t_fwhm_fs: float) -> float:
    """20 T0 plus a margin of 4 |beta2| L / T0 for dispersive spreading."""
    t0 = t0_from_fwhm(t_fwhm_fs) * FS
    return (MIN_WINDOW_T0 * t0 + 4.0 * abs(fiber.beta2) * fiber.length_m / t0) / PS


@dataclass(frozen=True)
class LoopConfig:
    fiber: FiberSpec
    coupler: CouplerSpec
    pulse: PulseSpec
    grid: TimeGrid
    n_steps: int = 2000

    def __post_init__(self):
        if int(self.n_steps) < 1:
            raise InvalidParameterError(f"solver.n_steps must be >= 1, got {self.n_steps}")
        need = required_window_ps(self.fiber, self.pulse.t_fwhm_fs)
        if self.grid.window_ps < need:
            raise WindowingError(
                f"grid.window_ps = {self.grid.window_ps:g} is too small for "
                f"{self.fiber.length_m:g} m of fiber; need >= {need:.4g} ps")

    @property
    def eta(self) -> float:
        return self.coupler.eta

    @property
    def linear_slope(self) -> float:
        return (1.0 - 2.0 * self.eta) ** 2

    @property
    def rep_rate_mhz(self) -> float:
        return self.pulse.rep_rate_mhz or DEFAULT_REP_RATE_MHZ


def _split(samples, eta):
    bar, cross = math.sqrt(1.0 - eta), 1j * math.sqrt(eta)
    return bar * samples, cross * samples


def _ports(strong, weak, eta):
    bar, cross = math.sqrt(1.0 - eta), 1j * math.sqrt(eta)
    return bar * strong + cross * weak, cross * strong + bar * weak


def _propagate(config, samples):
    fiber = config.fiber
    return split_step(samples, config.grid.dt, fiber.beta2, fiber.gamma, fiber.length_m,
                      config.n_steps)


def loop_ports(env_in: Envelope, config: LoopConfig):
    """(output port, reflected port) envelopes for one input envelope."""
    strong, weak = _split(env_in.samples, config.eta)
    both = _propagate(config, np.stack([strong, weak]))
    out, refl = _ports(both[0], both[1], config.eta)
    return Envelope(env_in.grid, out), Envelope(env_in.grid, refl)


def loop_output(env_in: Envelope, config: LoopConfig) -> Envelope:
    return loop_ports(env_in, config)[0]


def loop_energies(config: LoopConfig, energies_pj: Sequence[float], chunk: int = 64):
    """Output- and reflected-port energies (pJ) for sech inputs of the given energies.

    All pulses of a chunk are propagated together as one 2-D array.
    """
    energies = np.asarray(energies_pj, dtype=float)
    unit = make_sech_envelope(config.grid, config.pulse.with_energy(1.0)).samples
    dt = config.grid.dt
    out_e = np.empty_like(energies)
    refl_e = np.empty_like(energies)
    for lo in range(0, len(energies), chunk):
        batch = np.sqrt(energies[lo:lo + chunk])[:, None] * unit[None, :]
        strong, weak = _split(batch, config.eta)
        m = len(batch)
        both = _propagate(config, np.concatenate([strong, weak]))
        out, refl = _ports(both[:m], both[m:], config.eta)
        out_e[lo:lo + m] = np.sum(out.real ** 2 + out.imag ** 2, axis=1) * dt / PJ
        refl_e[lo:lo + m] = np.sum(refl.real ** 2 + refl.imag ** 2, axis=1) * dt / PJ
    return out_e, refl_e


@dataclass(frozen=True)
class TransferCurve:
    p_in: np.ndarray
    p_out: np.ndarray
    eta: float
    unit: str = "mW"
    config: Optional[LoopConfig] = field(default=None, compare=False)

    def __post_init__(self):
        p_in = np.asarray(self.p_in, dtype=float)
        p_out = np.asarray(self.p_out, dtype=float)
        if p_in.shape != p_out.shape or p_in.ndim != 1:
            raise InvalidParameterError("p_in and p_out must be 1-D arrays of equal length")
        if np.any(np.diff(p_in) <= 0):
            raise InvalidParameterError("p_in must be strictly increasing")
        object.__setattr__(self, "p_in", p_in)
        object.__setattr__(self, "p_out", p_out)

    @property
    def linear_slope(self) -> float:
        return (1.0 - 2.0 * self.eta) ** 2

    def slopes(self) -> np.ndarray:
        """Centered finite-difference dP_out/dP_in (one-sided at the ends)."""
        return np.gradient(self.p_out, self.p_in)

    def to_csv(self) -> str:
        head = "p_in_mw,p_out_mw" if self.unit == "mW" else "p_in_pj,p_out_pj"
        return format_csv([head.split(",")] + [[a, b] for a, b in zip(self.p_in, self.p_out)])


def transfer_curve(config: LoopConfig, p_in_grid: Sequence[float],
                   rep_rate: Optional[float] = None) -> TransferCurve:
    """Mean output power vs mean input power (mW) at the given repetition rate (MHz)."""
    p_in = np.asarray(p_in_grid, dtype=float)
    if p_in.size == 0:
        raise InvalidParameterError("power grid is empty")
    rep = config.rep_rate_mhz if rep_rate is None else rep_rate
    energies = [pulse_energy_from_mean_power(p, rep) for p in p_in]
    out_e, _ = loop_energies(config, energies)
    p_out = np.array([mean_power_from_pulse_energy(e, rep) for e in out_e])
    return TransferCurve(p_in, p_out, config.eta, "mW", config)


def transfer_curve_energy(config: LoopConfig, energies_pj: Sequence[float]) -> TransferCurve:
    """Same as :func:`transfer_curve` with pulse energies (pJ) on both axes."""
    e_in = np.asarray(energies_pj, dtype=float)
    if e_in.size == 0:
        raise InvalidParameterError("energy grid is empty")
    out_e, _ = loop_energies(config, e_in)
    return TransferCurve(e_in, out_e, config.eta, "pJ", config)


@dataclass(frozen=True)
class Plateau:
    start: float
    stop: float
    flattest: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.start + self.stop)


def find_plateau(curve: TransferCurve, threshold: float = PLATEAU_SLOPE) -> List[Plateau]:
    """Maximal runs of points whose |slope| is at most ``threshold`` x the linear slope."""
    if len(curve.p_in) < 10:
        raise InsufficientDataError(f"plateau search needs >= 10 points, got {len(curve.p_in)}")
    slopes = curve.slopes()
    flat = np.abs(slopes) <= threshold * curve.linear_slope
    plateaus = []
    i = 0
    n = len(flat)
    while i < n:
        if not flat[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and flat[j + 1]:
            j += 1
        k = i + int(np.argmin(np.abs(slopes[i:j + 1])))
        plateaus.append(Plateau(float(curve.p_in[i]), float(curve.p_in[j]), float(curve.p_in[k])))
        i = j + 1
    return plateaus


class SlopeClass(str, enum.Enum):
    MONOTONE = "monotone"
    FLAT_PLATEAU = "flat_plateau"
    NEGATIVE_SLOPE = "negative_slope"


def slope_classification(curve: TransferCurve, plateau_threshold: float = PLATEAU_SLOPE,
                         negative_threshold: float = NEGATIVE_SLOPE) -> SlopeClass:
    plateaus = find_plateau(curve, plateau_threshold)
    if np.any(curve.slopes() < -negative_threshold * curve.linear_slope):
        return SlopeClass.NEGATIVE_SLOPE
    if plateaus:
        return SlopeClass.FLAT_PLATEAU
    return SlopeClass.MONOTONE


def calibrate_kappa(curve: TransferCurve) -> float:
    """Phase coefficient (rad/mW) that puts 1.5 pi at the first plateau midpoint."""
    plateaus = find_plateau(curve)
    if not plateaus:
        raise CalibrationError(
            "no plateau found in the transfer curve; pass kappa explicitly (--kappa)")
    mid = plateaus[0].midpoint
    return PLATEAU_PHASE / ((1.0 - 2.0 * curve.eta) * mid)


@dataclass(frozen=True)
class PowerNoisePoint:
    p_in_mw: float
    phase_rad: float
    lossless: NoisePoint
    lossy: NoisePoint


def power_noise_sweep(eta: float, p_in_grid: Sequence[float], kappa: float,
                      loss: float = 0.0) -> List[PowerNoisePoint]:
    """Amplitude noise vs input power with relative phase kappa (1 - 2 eta) P."""
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be > 0 rad/mW, got {kappa}")
    out = []
    for p in p_in_grid:
        phase = kappa * (1.0 - 2.0 * eta) * float(p)
        clean = noise_vs_phase(eta, phase)
        clean = NoisePoint(float(p), clean.variance)
        out.append(PowerNoisePoint(float(p), phase, clean,
                                   NoisePoint(float(p), apply_loss(clean.variance, loss))))
    return out


def local_minima(values: Sequence[float]) -> List[int]:
    v = np.asarray(values)
    return [i for i in range(1, len(v) - 1) if v[i] < v[i - 1] and v[i] <= v[i + 1]]


def local_maxima(values: Sequence[float]) -> List[int]:
    v = np.asarray(values)
    return [i for i in range(1, len(v) - 1) if v[i] > v[i - 1] and v[i] >= v[i + 1]]


def format_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([v if isinstance(v, str) else f"{v:.9g}" for v in row])
    return buf.getvalue()


def noise_sweep_csv(points: Sequence[PowerNoisePoint]) -> str:
    rows = [["p_in_mw", "phase_rad", "variance_lossless", "variance_lossy",
             "db_lossless", "db_lossy"]]
    for p in points:
        rows.append([p.p_in_mw, p.phase_rad, p.lossless.variance, p.lossy.variance,
                     p.lossless.variance_db, p.lossy.variance_db])
    return format_csv(rows)


def ratio_sweep_csv(pairs) -> str:
    rows = [["eta", "coefficient", "variance_lossless", "db_lossless",
             "variance_lossy", "db_lossy"]]
    for clean, lossy in pairs:
        rows.append([clean.x, 100.0 * clean.x, clean.variance, clean.variance_db,
                     lossy.variance, lossy.variance_db])
    return format_csv(rows)
