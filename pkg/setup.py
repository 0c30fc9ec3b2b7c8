import os

from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or with TWINSUM_NO_EXT=1)
# the package installs in pure-Python mode and selects the fallback at import.
ext_modules = []
if not os.environ.get("TWINSUM_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "twinsum._kernel",
                    ["src/twinsum/_kernel.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
