"""Build script: compiles the optional Cython kernel core.

Set ICNS1D_PURE=1 to skip the extension entirely; the package then runs on
the pure NumPy backend selected at import time.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ICNS1D_PURE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "icns1d.kernels._core",
                    ["src/icns1d/kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
