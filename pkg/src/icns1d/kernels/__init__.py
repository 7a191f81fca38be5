"""Kernel backend selection.

The compiled Cython core is preferred when importable; otherwise the pure
NumPy implementations are used.  Override with the environment variable
ICNS1D_KERNELS = "compiled" | "numpy" (anything else, or unset, means auto).

Both backends expose: thomas, interface_flux, advect_biased, NAME.
"""

from __future__ import annotations

import os

from . import numpy_backend

_choice = os.environ.get("ICNS1D_KERNELS", "auto").lower()

if _choice == "numpy":
    _impl = numpy_backend
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "ICNS1D_KERNELS=compiled but the compiled core is not built; "
                "run `python setup.py build_ext --inplace` or reinstall"
            )
        _impl = numpy_backend

thomas = _impl.thomas
interface_flux = _impl.interface_flux
advect_biased = _impl.advect_biased
BACKEND = _impl.NAME


def available_backends():
    """Names of importable backends (for benchmarks and tests)."""
    out = {"numpy": numpy_backend}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out
