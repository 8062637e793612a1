"""Backend selection for the hot kernels.

The compiled extension is used when it was built and importable; setting
``FQAPPROX_PURE=1`` forces the pure-Python fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("FQAPPROX_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
else:
    _impl = _pykernels

conv_mod = _impl.conv_mod
divmod_mod = _impl.divmod_mod
inv_series_mod = _impl.inv_series_mod
lead_positions = _impl.lead_positions

__all__ = ["BACKEND", "conv_mod", "divmod_mod", "inv_series_mod", "lead_positions"]
