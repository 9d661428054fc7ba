"""Classical pulse propagation with the symmetrised split-step Fourier method.

Evolution equation (the single place where the sign convention lives)::

    dA/dz = -i (beta2/2) d^2A/dt^2 + i gamma |A|^2 A

With numpy's FFT convention d^2/dt^2 -> -omega^2, so the linear operator over
a length h is ``exp(i (beta2/2) omega^2 h)`` in FFT ordering.  For
beta2 < 0 and gamma > 0 the equation supports bright solitons.

Fields are in sqrt(W), time in seconds, z in metres.  Energies are reported in
pJ.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from . import _core
from .errors import InvalidParameterError, NumericInstabilityError, WindowingError
from .params import FS, PJ, FiberSpec, PulseSpec, sech_peak_power, t0_from_fwhm

PS = 1e-12

#: Minimum window, in units of T0, for a sech envelope.
MIN_WINDOW_T0 = 20.0


@dataclass(frozen=True)
class TimeGrid:
    n: int
    window_ps: float

    def __post_init__(self):
        n = int(self.n)
        if n < 64 or n & (n - 1):
            raise InvalidParameterError(f"grid.n must be a power of two >= 64, got {self.n}")
        if not self.window_ps > 0:
            raise InvalidParameterError(f"grid.window_ps must be > 0, got {self.window_ps}")
        object.__setattr__(self, "n", n)

    @property
    def window(self) -> float:
        return self.window_ps * PS

    @property
    def dt(self) -> float:
        return self.window / self.n

    @property
    def t(self) -> np.ndarray:
        """Sample times in s, with t = 0 at index n // 2."""
        return (np.arange(self.n) - self.n // 2) * self.dt

    @property
    def omega(self) -> np.ndarray:
        """Angular frequencies in rad/s, FFT ordering."""
        return 2.0 * np.pi * sfft.fftfreq(self.n, self.dt)

    @property
    def d_omega(self) -> float:
        return 2.0 * np.pi / self.window


@dataclass
class Envelope:
    grid: TimeGrid
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if self.samples.shape != (self.grid.n,):
            raise InvalidParameterError(
                f"envelope has {self.samples.shape} samples, grid expects ({self.grid.n},)")

    @property
    def power(self) -> np.ndarray:
        return self.samples.real ** 2 + self.samples.imag ** 2

    @property
    def energy_pj(self) -> float:
        return energy(self)

    @property
    def peak_power_w(self) -> float:
        return float(self.power.max())

    def fwhm_fs(self) -> float:
        """Intensity FWHM from linear interpolation of the half-maximum crossings."""
        return _fwhm(self.grid.t, self.power) / FS

    def copy(self) -> "Envelope":
        return Envelope(self.grid, self.samples.copy())

    def to_csv(self, fh=None) -> str:
        """Dump as ``t_ps,re_sqrtW,im_sqrtW,power_W``; returns the text when no handle given."""
        own = fh is None
        if own:
            fh = io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_ps", "re_sqrtW", "im_sqrtW", "power_W"])
        for t, a, p in zip(self.grid.t / PS, self.samples, self.power):
            w.writerow([f"{t:.9g}", f"{a.real:.9g}", f"{a.imag:.9g}", f"{p:.9g}"])
        if own:
            return fh.getvalue()
        return ""


def _fwhm(t, power):
    peak = int(np.argmax(power))
    half = power[peak] / 2.0
    if half <= 0:
        return 0.0
    left = peak
    while left > 0 and power[left] > half:
        left -= 1
    right = peak
    while right < len(power) - 1 and power[right] > half:
        right += 1

    def cross(i, j):
        # interpolate between samples i (below half) and j (above half)
        return t[i] + (half - power[i]) * (t[j] - t[i]) / (power[j] - power[i])

    return cross(right, right - 1) - cross(left, left + 1)


def energy(env: Envelope) -> float:
    """Pulse energy sum(|A|^2) dt, in pJ."""
    return float(np.sum(env.power) * env.grid.dt / PJ)


def make_sech_envelope(grid: TimeGrid, pulse: PulseSpec) -> Envelope:
    """Centered ``sqrt(P0) sech(t/T0)`` envelope carrying ``pulse.energy``."""
    t0 = t0_from_fwhm(pulse.t_fwhm_fs) * FS
    if grid.window < MIN_WINDOW_T0 * t0:
        raise WindowingError(
            f"grid window {grid.window_ps:g} ps is below the required "
            f"{MIN_WINDOW_T0 * t0 / PS:.4g} ps (20 T0)")
    p0 = sech_peak_power(pulse.energy, pulse.t_fwhm_fs)
    return Envelope(grid, np.sqrt(p0) * sech(grid.t / t0))


def sech(x):
    """Overflow-free sech for large |x|."""
    e = np.exp(-np.abs(x))
    return 2.0 * e / (1.0 + e * e)


def split_step(samples: np.ndarray, dt: float, beta2: float, gamma: float,
               length: float, n_steps: int) -> np.ndarray:
    """Propagate one or many envelopes (last axis = time) over ``length`` metres.

    Works on raw SI numbers so that negative ``gamma`` (time-reversed runs) is
    allowed.  Each step is half dispersion, full SPM, half dispersion; adjacent
    half steps are fused into one spectral multiply.
    """
    if int(n_steps) < 1:
        raise InvalidParameterError(f"n_steps must be >= 1, got {n_steps}")
    n_steps = int(n_steps)
    a = np.array(samples, dtype=np.complex128, order="C", copy=True)
    n = a.shape[-1]
    dz = length / n_steps
    gdz = gamma * dz

    if beta2 == 0.0:
        if gamma == 0.0:
            return a
        for step in range(n_steps):
            if not _core.spm_phase(a, gdz):
                raise NumericInstabilityError(step)
        return a

    omega = 2.0 * np.pi * sfft.fftfreq(n, dt)
    half = np.exp(1j * (beta2 / 2.0) * omega ** 2 * (dz / 2.0))
    if gamma == 0.0:
        whole = np.exp(1j * (beta2 / 2.0) * omega ** 2 * length)
        spec = sfft.fft(a, axis=-1, overwrite_x=True)
        _core.apply_spectral(spec, whole)
        out = sfft.ifft(spec, axis=-1, overwrite_x=True)
        if not np.isfinite(out).all():
            raise NumericInstabilityError(n_steps - 1)
        return out

    full = half * half
    spec = sfft.fft(a, axis=-1, overwrite_x=True)
    _core.apply_spectral(spec, half)
    for step in range(n_steps):
        a = sfft.ifft(spec, axis=-1, overwrite_x=True)
        if not _core.spm_phase(a, gdz):
            raise NumericInstabilityError(step)
        spec = sfft.fft(a, axis=-1, overwrite_x=True)
        _core.apply_spectral(spec, full if step < n_steps - 1 else half)
    return sfft.ifft(spec, axis=-1, overwrite_x=True)


def ssfm_propagate(env: Envelope, fiber: FiberSpec, n_steps: int = 2000) -> Envelope:
    """Propagate an envelope through a lossless fiber."""
    out = split_step(env.samples, env.grid.dt, fiber.beta2, fiber.gamma, fiber.length_m, n_steps)
    return Envelope(env.grid, out)


def default_steps(fiber: FiberSpec) -> int:
    return 2000 if fiber.length_m <= 10.0 else 8000
