"""Selects the kernel implementation at import time.

The compiled ``_kernels`` extension is used when it was built; otherwise the
numpy fallback in ``_pykernels``.  Set ``DISSOC_BACKEND=python`` to force
the fallback, or ``DISSOC_BACKEND=native`` to fail loudly when the extension
is missing.
"""

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

_native = None
try:
    from . import _kernels as _native
except ImportError:  # extension not built
    _native = None


def available() -> dict:
    out = {"python": _pykernels}
    if _native is not None:
        out["native"] = _native
    return out


def _select():
    choice = os.environ.get("DISSOC_BACKEND", "").strip().lower()
    if choice == "python":
        return _pykernels
    if choice == "native":
        if _native is None:
            raise ImportError("DISSOC_BACKEND=native but dissoc._kernels is not built")
        return _native
    if choice not in ("", "auto"):
        raise ValueError(f"unknown DISSOC_BACKEND {choice!r}")
    if _native is None:
        log.debug("compiled kernels unavailable, using numpy fallback")
        return _pykernels
    return _native


kernels = _select()
NAME = kernels.NAME
