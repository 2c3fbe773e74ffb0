"""Kernel backend selection.

The compiled extension is preferred when present; set FAIREMBED_PURE=1 to
force the numpy fallback. Both backends expose the same four functions and
produce identical results.
"""
import os

from . import _numpy_backend

if os.environ.get("FAIREMBED_PURE"):
    _impl = _numpy_backend
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = _numpy_backend

BACKEND = _impl.NAME

leaky_relu = _impl.leaky_relu
leaky_relu_grad = _impl.leaky_relu_grad
adam_update = _impl.adam_update
scatter_add = _impl.scatter_add
