"""Backend selection for the hot kernels.

The compiled Cython extension is used when available; the pure-NumPy
implementation is the fallback. Override with RIS_EE_FAIR_BACKEND=numpy or
=cython (the latter raises if the extension is missing).
"""

import os

from . import _numpy as _np_backend

LN2 = _np_backend.LN2

_choice = os.environ.get("RIS_EE_FAIR_BACKEND", "auto").lower()
_cy_backend = None
if _choice in ("auto", "cython"):
    try:
        from . import _cykern as _cy_backend  # type: ignore[no-redef]
    except ImportError:
        if _choice == "cython":
            raise ImportError(
                "RIS_EE_FAIR_BACKEND=cython but the compiled extension is not "
                "available; reinstall with a C compiler or use =numpy"
            )

_active = _cy_backend if _cy_backend is not None else _np_backend

stream_rates = _active.stream_rates
grad_d = _active.grad_d
grad_vec = _active.grad_vec
grad_c = _active.grad_c


def backend_name() -> str:
    return "cython" if _active is _cy_backend and _cy_backend is not None else "numpy"


def get_backend(name: str):
    """Return the named backend module ("numpy" or "cython"); for tests and
    the kernel benchmark."""
    if name == "numpy":
        return _np_backend
    if name == "cython":
        if _cy_backend is None:
            raise ImportError("cython backend not built")
        return _cy_backend
    raise ValueError(f"unknown backend {name!r}")
