"""Physical parameter records and closed-form pulse/soliton quantities.

Public records carry their units in the field names (``beta2_ps2_per_km``,
``t_fwhm_fs`` ...).  Every computation converts once to SI and back, so the
helper functions below are the only place where unit factors appear.

Sech convention: P(t) = P0 sech^2(t/T0), E = 2 P0 T0, N^2 = gamma P0 T0^2 / |beta2|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Tuple

from .errors import InvalidParameterError, NoSolitonError

#: T_FWHM / T0 for a sech^2 intensity profile.
SECH_FWHM_FACTOR = 2.0 * math.log(1.0 + math.sqrt(2.0))

# unit conversions to SI
PS2_PER_KM = 1e-24 / 1e3
PER_W_KM = 1e-3
FS = 1e-15
PJ = 1e-12
MW = 1e-3
MHZ = 1e6


@dataclass(frozen=True)
class FiberSpec:
    beta2_ps2_per_km: float
    gamma_per_w_km: float
    length_m: float
    name: str = "custom"

    def __post_init__(self):
        if not math.isfinite(self.beta2_ps2_per_km):
            raise InvalidParameterError("fiber.beta2_ps2_per_km must be finite")
        if not self.gamma_per_w_km >= 0:
            raise InvalidParameterError(
                f"fiber.gamma_per_w_km must be >= 0, got {self.gamma_per_w_km}")
        if not self.length_m > 0:
            raise InvalidParameterError(f"fiber.length_m must be > 0, got {self.length_m}")

    @property
    def beta2(self) -> float:
        """Group-velocity dispersion in s^2/m."""
        return self.beta2_ps2_per_km * PS2_PER_KM

    @property
    def gamma(self) -> float:
        """Nonlinear coefficient in 1/(W m)."""
        return self.gamma_per_w_km * PER_W_KM

    def with_length(self, length_m: float) -> "FiberSpec":
        return replace(self, length_m=length_m)


HB1500 = FiberSpec(beta2_ps2_per_km=-13.7, gamma_per_w_km=2.9, length_m=9.5, name="hb1500")
SSMF = FiberSpec(beta2_ps2_per_km=-20.3, gamma_per_w_km=1.05, length_m=50.0, name="ssmf")
FIBER_PRESETS = {"hb1500": HB1500, "ssmf": SSMF}


def pulse_energy_from_mean_power(mean_power_mw: float, rep_rate_mhz: float) -> float:
    """Energy per pulse in pJ for a train of the given mean power and repetition rate."""
    if not rep_rate_mhz > 0:
        raise InvalidParameterError(f"rep_rate must be > 0 MHz, got {rep_rate_mhz}")
    if mean_power_mw < 0:
        raise InvalidParameterError(f"mean_power must be >= 0 mW, got {mean_power_mw}")
    return (mean_power_mw * MW) / (rep_rate_mhz * MHZ) / PJ


def mean_power_from_pulse_energy(energy_pj: float, rep_rate_mhz: float) -> float:
    if not rep_rate_mhz > 0:
        raise InvalidParameterError(f"rep_rate must be > 0 MHz, got {rep_rate_mhz}")
    return energy_pj * PJ * rep_rate_mhz * MHZ / MW


@dataclass(frozen=True)
class PulseSpec:
    """A sech pulse.

    Give either ``energy_pj`` or both ``mean_power_mw`` and ``rep_rate_mhz``.
    ``rep_rate_mhz`` may accompany an explicit energy; if all three are set the
    two energy routes must agree within 0.1 %.
    """

    t_fwhm_fs: float
    energy_pj: Optional[float] = None
    wavelength_nm: float = 1530.0
    rep_rate_mhz: Optional[float] = None
    mean_power_mw: Optional[float] = None
    shape: str = "sech"

    def __post_init__(self):
        if self.shape != "sech":
            raise InvalidParameterError(f"unsupported pulse shape {self.shape!r}; only 'sech'")
        if not self.t_fwhm_fs > 0:
            raise InvalidParameterError(f"pulse.t_fwhm_fs must be > 0, got {self.t_fwhm_fs}")
        if self.rep_rate_mhz is not None and not self.rep_rate_mhz > 0:
            raise InvalidParameterError(f"pulse.rep_rate_mhz must be > 0, got {self.rep_rate_mhz}")
        by_power = self.mean_power_mw is not None and self.rep_rate_mhz is not None
        if self.energy_pj is None and not by_power:
            raise InvalidParameterError(
                "pulse needs energy_pj, or mean_power_mw together with rep_rate_mhz")
        if self.mean_power_mw is not None and self.rep_rate_mhz is None:
            raise InvalidParameterError("pulse.mean_power_mw requires pulse.rep_rate_mhz")
        if self.energy_pj is not None and self.energy_pj < 0:
            raise InvalidParameterError(f"pulse.energy_pj must be >= 0, got {self.energy_pj}")
        if self.energy_pj is not None and by_power:
            derived = pulse_energy_from_mean_power(self.mean_power_mw, self.rep_rate_mhz)
            scale = max(abs(derived), abs(self.energy_pj))
            if scale > 0 and abs(derived - self.energy_pj) > 1e-3 * scale:
                raise InvalidParameterError(
                    f"pulse.energy_pj={self.energy_pj} disagrees with mean power route "
                    f"({derived:.6g} pJ) by more than 0.1%")

    @property
    def energy(self) -> float:
        """Resolved pulse energy in pJ."""
        if self.energy_pj is not None:
            return self.energy_pj
        return pulse_energy_from_mean_power(self.mean_power_mw, self.rep_rate_mhz)

    @property
    def t0_fs(self) -> float:
        return self.t_fwhm_fs / SECH_FWHM_FACTOR

    def with_energy(self, energy_pj: float) -> "PulseSpec":
        return replace(self, energy_pj=energy_pj, mean_power_mw=None)


@dataclass(frozen=True)
class CouplerSpec:
    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 0.5:
            raise InvalidParameterError(f"coupler.eta must lie in [0, 0.5], got {self.eta}")

    @property
    def coefficient(self) -> float:
        """Splitting coefficient as reported in the lab: 100 * eta (93:7 -> 7)."""
        return 100.0 * self.eta

    @property
    def ratio(self) -> str:
        return f"{100.0 - 100.0 * self.eta:g}:{100.0 * self.eta:g}"


def db_to_transmission(loss_db: float) -> float:
    return 10.0 ** (-loss_db / 10.0)


def transmission_to_db(fraction: float) -> float:
    # + 0.0 turns -0.0 (lossless element) into 0.0
    return -10.0 * math.log10(fraction) + 0.0


@dataclass(frozen=True)
class LossBudget:
    """Ordered (label, transmission) elements; composition is a plain product."""

    elements: Tuple[Tuple[str, float], ...] = ()

    def __post_init__(self):
        elements = tuple((str(label), float(frac)) for label, frac in self.elements)
        for label, frac in elements:
            if not 0.0 < frac <= 1.0:
                raise InvalidParameterError(
                    f"loss element {label!r} transmission must lie in (0, 1], got {frac}")
        object.__setattr__(self, "elements", elements)

    @classmethod
    def from_db(cls, items: Iterable[Tuple[str, float]]) -> "LossBudget":
        return cls(tuple((label, db_to_transmission(db)) for label, db in items))

    def __add__(self, other: "LossBudget") -> "LossBudget":
        return LossBudget(self.elements + other.elements)

    def __len__(self):
        return len(self.elements)

    @property
    def transmission(self) -> float:
        return total_transmission(self)

    @property
    def loss(self) -> float:
        return 1.0 - self.transmission

    def element_db(self) -> list:
        return [(label, transmission_to_db(frac)) for label, frac in self.elements]


def total_transmission(budget: LossBudget) -> float:
    """Product of all element transmissions; 1.0 for an empty budget."""
    return math.prod(frac for _, frac in budget.elements)


CONNECTOR_DB = 0.34
CONNECTOR_PAIR = LossBudget.from_db([("connector_a", CONNECTOR_DB), ("connector_b", CONNECTOR_DB)])
# Roughly 30 % total loss; only the total is anchored to the experiment.
DEFAULT_NOISE_BUDGET = CONNECTOR_PAIR + LossBudget(
    (("fiber", 1.0), ("detector_qe", 0.90), ("coupler_misc", 0.91)))


@dataclass(frozen=True)
class SolitonMetrics:
    t0_fs: float
    peak_power_w: float
    soliton_energy_pj: float
    soliton_order: float


def t0_from_fwhm(t_fwhm_fs: float) -> float:
    if not t_fwhm_fs > 0:
        raise InvalidParameterError(f"t_fwhm must be > 0 fs, got {t_fwhm_fs}")
    return t_fwhm_fs / SECH_FWHM_FACTOR


def sech_peak_power(energy_pj: float, t_fwhm_fs: float) -> float:
    """Peak power in W of a sech^2 pulse, P0 = E / (2 T0)."""
    t0 = t0_from_fwhm(t_fwhm_fs)
    if energy_pj < 0:
        raise InvalidParameterError(f"energy must be >= 0 pJ, got {energy_pj}")
    return energy_pj * PJ / (2.0 * t0 * FS)


def _require_soliton(fiber: FiberSpec):
    if fiber.beta2 == 0.0 or fiber.gamma == 0.0:
        raise NoSolitonError(
            f"fiber {fiber.name!r} supports no soliton (beta2={fiber.beta2_ps2_per_km}, "
            f"gamma={fiber.gamma_per_w_km})")


def fundamental_soliton_energy(fiber: FiberSpec, t_fwhm_fs: float) -> SolitonMetrics:
    """N = 1 soliton for the given duration: E1 = 2|beta2|/(gamma T0), P0 = |beta2|/(gamma T0^2)."""
    _require_soliton(fiber)
    t0 = t0_from_fwhm(t_fwhm_fs) * FS
    p0 = abs(fiber.beta2) / (fiber.gamma * t0 ** 2)
    e1 = 2.0 * abs(fiber.beta2) / (fiber.gamma * t0)
    return SolitonMetrics(t0_fs=t0 / FS, peak_power_w=p0, soliton_energy_pj=e1 / PJ,
                          soliton_order=1.0)


def soliton_metrics(fiber: FiberSpec, pulse: PulseSpec) -> SolitonMetrics:
    _require_soliton(fiber)
    t0 = t0_from_fwhm(pulse.t_fwhm_fs) * FS
    p0 = sech_peak_power(pulse.energy, pulse.t_fwhm_fs)
    order = math.sqrt(fiber.gamma * p0 * t0 ** 2 / abs(fiber.beta2))
    e1 = 2.0 * abs(fiber.beta2) / (fiber.gamma * t0)
    return SolitonMetrics(t0_fs=t0 / FS, peak_power_w=p0, soliton_energy_pj=e1 / PJ,
                          soliton_order=order)


def soliton_order(fiber: FiberSpec, pulse: PulseSpec) -> float:
    return soliton_metrics(fiber, pulse).soliton_order


def dispersion_length_m(fiber: FiberSpec, t_fwhm_fs: float) -> float:
    if fiber.beta2 == 0.0:
        return math.inf
    t0 = t0_from_fwhm(t_fwhm_fs) * FS
    return t0 ** 2 / abs(fiber.beta2)
