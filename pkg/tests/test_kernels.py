import math

import numpy as np
import pytest

from geonorm import _iou_py
from geonorm import _kernels

try:
    from geonorm import _iou_cy
except ImportError:
    _iou_cy = None


def test_backend_selected():
    assert _kernels.BACKEND in ("cython", "python")
    assert callable(_kernels.rbox_iou)


@pytest.mark.skipif(_iou_cy is None, reason="compiled kernel not built")
def test_backends_agree():
    rng = np.random.default_rng(123)
    for _ in range(2000):
        args = []
        for _ in range(2):
            h = rng.uniform(0.5, 30.0)
            args += [
                rng.uniform(-40, 40),
                rng.uniform(-40, 40),
                h,
                h * rng.uniform(1.0, 6.0),
                rng.uniform(-math.pi / 2, math.pi / 2),
            ]
        py = _iou_py.rbox_iou(*args)
        cy = _iou_cy.rbox_iou(*args)
        assert abs(py - cy) <= 1e-9
        assert 0.0 <= cy <= 1.0


def test_pure_python_kernel_basics():
    # identical boxes and fully disjoint boxes, no geometry module involved
    assert _iou_py.rbox_iou(0, 0, 2, 4, 0.3, 0, 0, 2, 4, 0.3) == pytest.approx(1.0, abs=1e-12)
    assert _iou_py.rbox_iou(0, 0, 2, 4, 0.0, 50, 50, 2, 4, 1.0) == 0.0
    assert _iou_py.rbox_iou(0, 0, 2, 4, 0.0, 1, 0, 2, 4, 0.0) == pytest.approx(0.6, abs=1e-12)
