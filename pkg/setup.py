"""Build the optional Cython core.

The package is fully functional without the extension: ``friable.kernels``
falls back to numpy implementations when ``friable._ckernels`` cannot be
imported.  Set ``FRIABLE_NO_EXT=1`` to skip compilation entirely.
"""
import os
import sys

from setuptools import setup

ext_modules = []
if not os.environ.get("FRIABLE_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "friable._ckernels",
                    ["src/friable/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"friable: building without compiled kernels ({exc})", file=sys.stderr)
        ext_modules = []

setup(ext_modules=ext_modules)
