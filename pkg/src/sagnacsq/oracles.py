"""Independent reference computations used by the test-suite and ``validate``.

Nothing here calls into the covariance algebra of :mod:`phasespace` or the
split-step solver; each function recomputes its quantity by a different route.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Mean photon amplitude used for the sampled fields: large enough that the
# exact Kerr map is linear in the fluctuations to ~1e-6.
_MC_AMPLITUDE = 1.0e6


@dataclass(frozen=True)
class MonteCarloEstimate:
    variance: float
    stderr: float
    samples: int


def mc_loop_variance(eta, relative_phase, samples=1_000_000, rng=None, orientation=-1,
                     chunk=250_000):
    """Amplitude-noise variance of the loop output by direct sampling.

    Each beam is a coherent field ``A + (x + i y) / 2`` with unit-variance
    quadrature noise.  It goes through the exact Kerr map
    ``alpha -> alpha exp(i phi |alpha|^2 / A^2)``, the mean Kerr phase is
    removed (own frame), the weak beam is rotated by
    ``orientation * (relative_phase + pi)`` and the fields are superposed with
    amplitude weights sqrt(1 - eta), sqrt(eta).  The plateau phase pair is
    recomputed here from scratch.
    """
    rng = np.random.default_rng(rng)
    scale = (relative_phase / (1.5 * math.pi)) * 3.0 * math.pi / (2.0 * (1.0 - 2.0 * eta))
    phi_s = (1.0 - eta) * scale
    phi_w = eta * scale
    a_s = math.sqrt(1.0 - eta) * _MC_AMPLITUDE
    a_w = math.sqrt(eta) * _MC_AMPLITUDE
    turn = np.exp(1j * orientation * (relative_phase + math.pi))
    carrier = math.sqrt(1.0 - eta) * a_s + math.sqrt(eta) * a_w * turn
    u = carrier / abs(carrier)

    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        noise = rng.standard_normal((4, m))
        fs = a_s + 0.5 * (noise[0] + 1j * noise[1])
        fw = a_w + 0.5 * (noise[2] + 1j * noise[3])
        fs = fs * np.exp(1j * phi_s * ((np.abs(fs) / a_s) ** 2 - 1.0))
        fw = fw * np.exp(1j * phi_w * ((np.abs(fw) / a_w) ** 2 - 1.0))
        out = math.sqrt(1.0 - eta) * fs + math.sqrt(eta) * fw * turn
        # amplitude quadrature fluctuation, shot-noise units
        x = 2.0 * ((out - carrier) * np.conj(u)).real
        total += float(np.sum(x))
        total_sq += float(np.sum(x * x))
        done += m
    mean = total / samples
    var = total_sq / samples - mean * mean
    # Gaussian fourth moment: Var(s^2) = 2 sigma^4
    stderr = var * math.sqrt(2.0 / (samples - 1))
    return MonteCarloEstimate(var, stderr, samples)


def cw_loop_transmission(eta, gamma, length, power):
    """Closed-form power transmission of the loop for a CW (dispersionless) input."""
    return 1.0 - 2.0 * eta * (1.0 - eta) * (1.0 + np.cos((1.0 - 2.0 * eta) * gamma * length * power))


def cw_loop_slope(eta, gamma, length, power):
    """d(P_out)/d(P_in) of the closed-form CW transfer."""
    k = (1.0 - 2.0 * eta) * gamma * length
    return cw_loop_transmission(eta, gamma, length, power) + 2.0 * eta * (1.0 - eta) * k * power * np.sin(k * power)


def sech_energy_trapezoid(peak_power, t0, t):
    """Energy of |sqrt(P0) sech(t/T0)|^2 by the trapezoidal rule on the given samples."""
    return float(np.trapezoid(peak_power / np.cosh(t / t0) ** 2, t))
