"""Kernel backend selection.

The compiled extension is preferred when present; set ``GEONORM_PURE_PYTHON=1``
to force the pure-Python kernel (used by the benchmark and parity tests).
"""

import os

if os.environ.get("GEONORM_PURE_PYTHON"):
    from . import _iou_py as _impl
else:
    try:
        from . import _iou_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _iou_py as _impl

rbox_iou = _impl.rbox_iou
BACKEND = _impl.BACKEND
