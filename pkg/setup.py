"""Build the optional Cython eigensolver kernel.

The package works without it; ``chanent.linalg`` falls back to numpy when the
extension is missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("CHANENT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "chanent._jacobi",
                    ["src/chanent/_jacobi.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-fcx-limited-range"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
