"""Hot kernels for the split-step solver.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported.  Set ``SAGNACSQ_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
if os.environ.get("SAGNACSQ_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

spm_phase = _impl.spm_phase
apply_spectral = _impl.apply_spectral

__all__ = ["BACKEND", "spm_phase", "apply_spectral"]
