"""Select the kernel implementation at import time.

The compiled ``_kernels`` extension is used when it imports; otherwise, or when
``QNDSIM_PURE_PYTHON`` is set to a non-empty value other than ``0``, the numpy
fallback is used.
"""

import os

from . import _kernels_py

_forced = os.environ.get("QNDSIM_PURE_PYTHON", "") not in ("", "0")

if _forced:
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"
