"""Single-mode Kerr squeezing model for the asymmetric loop.

Quadratures are normalized to shot noise: a coherent state has covariance
identity.  Each counter-propagating beam is a coherent state sheared by its
own nonlinear phase ``phi`` (linearized Kerr effect), which in the beam's
(amplitude, phase) frame gives the covariance ``[[1, 2 phi], [2 phi, 1 + 4 phi^2]]``.
At the coupler the weak beam is rotated into the strong beam's frame and the
two covariances are added with weights (1 - eta) and eta.  The measured
quantity is the variance along the resultant mean field.

The weak carrier is rotated by ``orientation * (relative_phase + pi)``; the
default ``AGAINST_SHEAR`` tilts the resultant against the Kerr shear, which
is the branch that yields amplitude squeezing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import DivergenceError, InvalidParameterError, UndefinedDirectionError

AGAINST_SHEAR = -1
WITH_SHEAR = 1

#: relative phase between the beams in the middle of the transfer plateau
PLATEAU_PHASE = 1.5 * math.pi


@dataclass(frozen=True)
class KerrPhases:
    phi_strong: float
    phi_weak: float

    @property
    def difference(self) -> float:
        return self.phi_strong - self.phi_weak


@dataclass(frozen=True)
class GaussianMode:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(2)
        cov = np.asarray(self.cov, dtype=float).reshape(2, 2)
        if not np.allclose(cov, cov.T, atol=1e-12, rtol=0):
            raise InvalidParameterError("covariance must be symmetric")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @classmethod
    def coherent(cls, amplitude: float = 1.0) -> "GaussianMode":
        return cls(np.array([amplitude, 0.0]), np.eye(2))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.cov))

    def rotated(self, angle: float) -> "GaussianMode":
        r = rotation(angle)
        return GaussianMode(r @ self.mean, r @ self.cov @ r.T)


@dataclass(frozen=True)
class NoisePoint:
    """Relative noise power (shot noise = 1) at one sweep coordinate."""

    x: float
    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise InvalidParameterError(f"noise variance must be > 0, got {self.variance}")

    @property
    def variance_db(self) -> float:
        return to_db(self.variance)


def to_db(variance: float) -> float:
    return 10.0 * math.log10(variance)


def from_db(db: float) -> float:
    return 10.0 ** (db / 10.0)


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _check_eta_open(eta):
    if eta == 0.5:
        raise DivergenceError("eta = 0.5 makes the plateau phase pair diverge (balanced loop)")
    if not 0.0 < eta < 0.5:
        raise InvalidParameterError(f"eta must lie in (0, 0.5), got {eta}")


def kerr_phase_pair(eta: float) -> KerrPhases:
    """Nonlinear phases of strong and weak beam at a relative phase of 1.5 pi.

    The phases are proportional to the beam powers, (1 - eta) and eta, and
    their difference is fixed to 3 pi / 2.
    """
    _check_eta_open(eta)
    scale = 3.0 * math.pi / (2.0 * abs(1.0 - 2.0 * eta))
    return KerrPhases((1.0 - eta) * scale, eta * scale)


def kerr_variance(theta: float, phi: float) -> float:
    """Variance of the quadrature at angle ``theta`` after a Kerr phase ``phi``.

    Evaluated as (cos + 2 phi sin)^2 + sin^2, the continuous form of
    sin^2 ((cot + 2 phi)^2 + 1) that stays finite at theta = 0.
    """
    s, c = math.sin(theta), math.cos(theta)
    return (c + 2.0 * phi * s) ** 2 + s * s


def kerr_covariance(phi: float) -> np.ndarray:
    return np.array([[1.0, 2.0 * phi], [2.0 * phi, 1.0 + 4.0 * phi * phi]])


def kerr_mode(amplitude: float, phi: float) -> GaussianMode:
    """Coherent state of the given amplitude after a Kerr phase ``phi``, in its own frame."""
    return GaussianMode(np.array([amplitude, 0.0]), kerr_covariance(phi))


def projection_angle(eta: float) -> float:
    if not 0.0 <= eta <= 0.5:
        raise InvalidParameterError(f"eta must lie in [0, 0.5], got {eta}")
    return math.atan(eta / (1.0 - eta))


def recombine(strong: GaussianMode, weak: GaussianMode, eta: float,
              relative_phase: float, orientation: int = AGAINST_SHEAR) -> GaussianMode:
    if not 0.0 <= eta <= 0.5:
        raise InvalidParameterError(f"eta must lie in [0, 0.5], got {eta}")
    r = rotation(orientation * (relative_phase + math.pi))
    mean = math.sqrt(1.0 - eta) * strong.mean + math.sqrt(eta) * (r @ weak.mean)
    cov = (1.0 - eta) * strong.cov + eta * (r @ weak.cov @ r.T)
    return GaussianMode(mean, cov)


def amplitude_variance(mode: GaussianMode) -> float:
    """Variance along the direction of the mean field."""
    norm = float(np.hypot(*mode.mean))
    if norm == 0.0:
        raise UndefinedDirectionError("amplitude quadrature undefined for a zero mean field")
    u = mode.mean / norm
    return float(u @ mode.cov @ u)


def _loop_variance(eta, phases, relative_phase, orientation):
    strong = kerr_mode(math.sqrt(1.0 - eta), phases.phi_strong)
    weak = kerr_mode(math.sqrt(eta), phases.phi_weak)
    return amplitude_variance(recombine(strong, weak, eta, relative_phase, orientation))


def plateau_noise(eta: float, orientation: int = AGAINST_SHEAR) -> NoisePoint:
    """Relative amplitude noise in the middle of the plateau (relative phase 1.5 pi)."""
    phases = kerr_phase_pair(eta)
    return NoisePoint(eta, _loop_variance(eta, phases, PLATEAU_PHASE, orientation))


def noise_vs_phase(eta: float, relative_phase: float,
                   orientation: int = AGAINST_SHEAR) -> NoisePoint:
    """Amplitude noise for an arbitrary relative phase.

    Both Kerr phases scale with the relative phase (both are proportional to
    the launched power).
    """
    base = kerr_phase_pair(eta)
    k = relative_phase / PLATEAU_PHASE
    phases = KerrPhases(base.phi_strong * k, base.phi_weak * k)
    return NoisePoint(relative_phase, _loop_variance(eta, phases, relative_phase, orientation))


def apply_loss(variance: float, loss: float) -> float:
    """Admix vacuum through a beamsplitter of transmission 1 - loss."""
    if not 0.0 <= loss <= 1.0:
        raise InvalidParameterError(f"loss must lie in [0, 1], got {loss}")
    if not variance > 0:
        raise InvalidParameterError(f"variance must be > 0, got {variance}")
    return loss + (1.0 - loss) * variance


def ratio_sweep(eta_min: float, eta_max: float, steps: int, loss: float = 0.0,
                orientation: int = AGAINST_SHEAR) -> List[Tuple[NoisePoint, NoisePoint]]:
    """(lossless, lossy) plateau noise on a uniform eta grid."""
    if not 0.0 < eta_min < eta_max < 0.5:
        raise InvalidParameterError(
            f"need 0 < eta_min < eta_max < 0.5, got [{eta_min}, {eta_max}]")
    if steps < 2:
        raise InvalidParameterError(f"steps must be >= 2, got {steps}")
    out = []
    for eta in np.linspace(eta_min, eta_max, int(steps)):
        eta = float(eta)
        clean = plateau_noise(eta, orientation)
        out.append((clean, NoisePoint(eta, apply_loss(clean.variance, loss))))
    return out


def optimum_eta(eta_min: float = 0.01, eta_max: float = 0.3) -> float:
    """Continuous minimizer of the lossless plateau noise."""
    from scipy.optimize import minimize_scalar

    res = minimize_scalar(lambda e: plateau_noise(e).variance,
                          bounds=(eta_min, eta_max), method="bounded",
                          options={"xatol": 1e-10})
    return float(res.x)


def qnl_crossing(eta_lo: float = None, eta_hi: float = 0.3) -> float:
    """Eta above the optimum where the plateau noise climbs back to shot noise."""
    if eta_lo is None:
        eta_lo = optimum_eta()
    return float(brentq(lambda e: plateau_noise(e).variance - 1.0, eta_lo, eta_hi, xtol=1e-12))
