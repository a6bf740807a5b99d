"""Backend selection for the radiation-dyad hot kernel.

The compiled Cython extension is preferred when importable; the numpy
implementation is the always-available fallback.  Set FIBERQED_KERNEL to
"python" or "cython" to force a backend (useful for the parity tests and
the benchmark).
"""

import os

from . import _radiation_py

_FORCED = os.environ.get("FIBERQED_KERNEL", "").strip().lower()

if _FORCED == "python":
    _impl = _radiation_py
elif _FORCED == "cython":
    from . import _radiation_cy as _impl  # raises if not built
else:
    try:
        from . import _radiation_cy as _impl
    except ImportError:
        _impl = _radiation_py

BACKEND = _impl.BACKEND
radiation_dyad = _impl.radiation_dyad
radiation_theta_kernel = _impl.radiation_theta_kernel

# the contraction stage is cheap numpy in either backend
from ._radiation_py import contract_theta_kernel  # noqa: E402


def available_backends():
    backends = ["python"]
    try:
        from . import _radiation_cy  # noqa: F401
        backends.append("cython")
    except ImportError:
        pass
    return backends


def get_kernel(name):
    """Return the radiation_dyad callable of a specific backend."""
    if name == "python":
        return _radiation_py.radiation_dyad
    if name == "cython":
        from . import _radiation_cy
        return _radiation_cy.radiation_dyad
    raise ValueError(f"unknown kernel backend {name!r}")
