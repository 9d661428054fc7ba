"""Simulator of an asymmetric fiber Sagnac loop used as an amplitude-squeezing source.

Two engines share the parameter records in :mod:`sagnacsq.params`:

* :mod:`sagnacsq.phasespace` - single-mode linearized Kerr noise model
* :mod:`sagnacsq.nlse` / :mod:`sagnacsq.sagnac` - classical split-step loop simulation
"""
__version__ = "0.1.0"

from ._core import BACKEND as KERNEL_BACKEND
from .errors import SagnacError
from .params import CouplerSpec, FiberSpec, LossBudget, PulseSpec, HB1500, SSMF

__all__ = ["KERNEL_BACKEND", "SagnacError", "CouplerSpec", "FiberSpec", "LossBudget",
           "PulseSpec", "HB1500", "SSMF", "__version__"]
