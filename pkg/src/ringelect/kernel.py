"""Backend selection for the transition kernel.

The compiled extension is used when importable.  Setting the environment
variable ``RINGELECT_PURE=1`` forces the pure-Python fallback, which is how
the test suite and the benchmark exercise both backends.
"""

import os

from . import _kernel_py

if os.environ.get("RINGELECT_PURE"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl
    except ImportError:
        _impl = _kernel_py

BACKEND = "pure" if _impl is _kernel_py else "compiled"

step = _impl.step
explore = _impl.explore


def backend(name):
    """Return the kernel module for ``name`` ("pure" or "compiled")."""
    if name == "pure":
        return _kernel_py
    if name == "compiled":
        from . import _kernel

        return _kernel
    raise ValueError(f"unknown kernel backend {name!r}")
