"""Kernel backend selection: compiled extension when available, numpy fallback.

Set SPATIAL_BENCH_BACKEND=python (or =c) to force a choice; the default
("auto") prefers the compiled extension.  Both backends produce identical
integer outputs.
"""

import os

from . import _py

_choice = os.environ.get("SPATIAL_BENCH_BACKEND", "auto").lower()

if _choice in ("auto", "c"):
    try:
        from . import _fast as _impl
        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise
        _impl = _py
        BACKEND = "python"
else:
    _impl = _py
    BACKEND = "python"

template_match = _impl.template_match
disk_count = _impl.disk_count

__all__ = ["template_match", "disk_count", "BACKEND"]
