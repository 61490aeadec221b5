"""Kernel backend selection.

The compiled extension (``irrsel._kernels``) is preferred when it was
built; otherwise the NumPy implementation is used. Set the environment
variable ``IRRSEL_BACKEND`` to ``c`` or ``python`` to force one side
(forcing ``c`` fails loudly when the extension is missing).
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("IRRSEL_BACKEND", "").strip().lower()

if _requested == "python":
    kernels = _kernels_py
elif _requested == "c":
    from . import _kernels as kernels  # type: ignore[no-redef]
elif _requested == "":
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _kernels_py
else:
    raise ImportError(
        f"IRRSEL_BACKEND={_requested!r} not recognized; use 'c' or 'python'"
    )


def backend_name() -> str:
    """Name of the active kernel backend: 'c' or 'python'."""
    return kernels.NAME


def available_backends() -> tuple[str, ...]:
    """Names of all importable kernel backends."""
    names = []
    try:
        from . import _kernels  # noqa: F401

        names.append("c")
    except ImportError:
        pass
    names.append("python")
    return tuple(names)
