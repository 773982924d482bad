"""Build script: compiles the grid-scan kernel when Cython is available.

The package works without the extension; eqforge._kernels falls back to
the pure-Python backend at import time.
"""

from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "eqforge._kernels._grid_fast",
                ["src/eqforge/_kernels/_grid_fast.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
