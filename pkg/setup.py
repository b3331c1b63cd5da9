"""Builds the optional compiled core.

The package works without it: kpls.backend falls back to the numpy
implementations of the hot kernels. Set KPLS_SKIP_EXT=1 to force a
pure-python build even when Cython is available.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("KPLS_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "kpls._core",
                    ["src/kpls/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
