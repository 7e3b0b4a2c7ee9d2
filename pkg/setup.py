# Builds the compiled IoU kernel. The extension is optional: if Cython or a
# C compiler is missing the install still succeeds and geonorm falls back to
# the pure-Python kernel at import time.
#
# In-place build for development:
#
#   python3 setup.py build_ext --inplace
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("geonorm._iou_cy", ["src/geonorm/_iou_cy.pyx"])],
        language_level="3",
    )
    for ext in ext_modules:
        ext.optional = True
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
