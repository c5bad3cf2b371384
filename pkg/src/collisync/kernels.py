"""Backend selection for the hot evolution kernel.

The compiled extension is preferred when it was built; otherwise the numpy
fallback is used.  Set COLLISYNC_KERNELS=python or =compiled to force one
side (the latter raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("COLLISYNC_KERNELS", "auto").strip().lower()
if _choice not in {"auto", "compiled", "python"}:
    raise ValueError(
        f"COLLISYNC_KERNELS must be auto, compiled or python, got {_choice!r}"
    )

if _choice == "python":
    iterate_channel = _kernels_py.iterate_channel
    BACKEND = "python"
else:
    try:
        from . import _kernels

        iterate_channel = _kernels.iterate_channel
        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "COLLISYNC_KERNELS=compiled but the collisync._kernels "
                "extension is not built; reinstall with a C compiler available"
            ) from None
        iterate_channel = _kernels_py.iterate_channel
        BACKEND = "python"

__all__ = ["iterate_channel", "BACKEND"]
