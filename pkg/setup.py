"""Build the optional Cython kernels; the package falls back to numpy when they are absent."""
import os
import sys

from setuptools import setup

ext_modules = []
if os.environ.get("GMULT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "gmult._ckernels",
                    ["src/gmult/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    # inline complex products instead of calling the NaN-checking __muldc3
                    extra_compile_args=[] if sys.platform == "win32" else ["-O3", "-fcx-limited-range"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
