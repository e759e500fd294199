"""Kernel dispatch: compiled extension when importable, NumPy fallback otherwise.

Set ``LATINMAC_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py as python_impl

BACKEND = "python"
compiled_impl = None

if os.environ.get("LATINMAC_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled_impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        compiled_impl = None

_impl = compiled_impl if compiled_impl is not None else python_impl

collided_flags = _impl.collided_flags
dail_oracle_successes = _impl.dail_oracle_successes

__all__ = ["BACKEND", "collided_flags", "dail_oracle_successes", "python_impl", "compiled_impl"]
