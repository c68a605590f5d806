"""Hot-loop kernels with a compiled implementation and a numpy fallback.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``CONFORMAL_CURVES_PURE_PYTHON`` is set to a non-empty
value, the numpy version is used. ``BACKEND`` names the active choice.
"""

import os

from . import _kernels_py

if os.environ.get("CONFORMAL_CURVES_PURE_PYTHON"):
    _impl = None
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = None

if _impl is None:
    BACKEND = "python"
    winding_and_distance = _kernels_py.winding_and_distance
else:
    BACKEND = "cython"
    winding_and_distance = _impl.winding_and_distance

python_winding_and_distance = _kernels_py.winding_and_distance
