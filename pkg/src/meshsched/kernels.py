"""Backend selection for the edge-reversal kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module is. Setting ``MESHSCHED_PURE_PYTHON=1``
forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

OK = _pykernels.OK
OVERFLOW = _pykernels.OVERFLOW
NO_PERIOD = _pykernels.NO_PERIOD
NOT_CONVERGED = _pykernels.NOT_CONVERGED
ZERO_WINDOW = _pykernels.ZERO_WINDOW

BACKENDS = {"python": _pykernels}
try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if os.environ.get("MESHSCHED_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def get(name: str | None = None):
    """Kernel module by name; ``None`` means the active backend."""
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available (have {sorted(BACKENDS)})") from None
