"""Pure-numpy implementations of the solver kernels."""
import numpy as np


def spm_phase(arr, gamma_dz):
    power = arr.real ** 2 + arr.imag ** 2
    phase = gamma_dz * power
    finite = bool(np.isfinite(phase).all())
    with np.errstate(invalid="ignore"):
        arr *= np.cos(phase) + 1j * np.sin(phase)
    return finite


def apply_spectral(arr, factor):
    arr *= factor
