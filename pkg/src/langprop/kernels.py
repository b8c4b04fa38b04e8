"""Kernel dispatch: compiled Cython core when available, numpy otherwise.

Set ``LANGPROP_PURE_PYTHON=1`` before import to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if not os.environ.get("LANGPROP_PURE_PYTHON"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

topk_cosine = _impl.topk_cosine
mad_sweep = _impl.mad_sweep

__all__ = ["BACKEND", "mad_sweep", "topk_cosine"]
