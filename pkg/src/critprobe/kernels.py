"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``CRITPROBE_PURE=1`` to
force the numpy fallback.
"""
import os

from . import _fallback

if os.environ.get("CRITPROBE_PURE", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "compiled" if _impl is not _fallback else "python"

echo_factor = _impl.echo_factor
mixed_evolution = _impl.mixed_evolution
