"""Kernel backend dispatch.

The package ships two implementations of its inner loops: a Cython
extension (``scenex._kernels._core``) and a NumPy fallback
(``scenex._kernels.pure``). The compiled backend is used when it imported
cleanly; set ``SCENEX_KERNELS=pure`` or ``SCENEX_KERNELS=compiled`` to force
one explicitly (forcing ``compiled`` raises if the extension is missing).
"""
from __future__ import annotations

import os

from scenex._kernels import pure
from scenex._kernels.pure import (
    METHOD_AVERAGE,
    METHOD_COMPLETE,
    METHOD_SINGLE,
    METHOD_WARD,
)

try:
    from scenex._kernels import _core
except ImportError:
    _core = None

_requested = os.environ.get("SCENEX_KERNELS", "").strip().lower()
if _requested == "pure":
    _impl = pure
elif _requested == "compiled":
    if _core is None:
        raise ImportError(
            "SCENEX_KERNELS=compiled but the scenex._kernels._core extension "
            "is not built; reinstall with Cython and a C compiler available"
        )
    _impl = _core
elif _requested:
    raise ValueError(f"SCENEX_KERNELS must be 'pure' or 'compiled', got {_requested!r}")
else:
    _impl = _core if _core is not None else pure


def backend_name() -> str:
    """Name of the active backend: 'compiled' or 'pure'."""
    return "compiled" if _impl is not None and _impl is not pure else "pure"


closest_pair = _impl.closest_pair
jacobi_eigh = _impl.jacobi_eigh
lloyd = _impl.lloyd
lance_williams = _impl.lance_williams

__all__ = [
    "METHOD_AVERAGE",
    "METHOD_COMPLETE",
    "METHOD_SINGLE",
    "METHOD_WARD",
    "backend_name",
    "closest_pair",
    "jacobi_eigh",
    "lance_williams",
    "lloyd",
    "pure",
]
