#!/usr/bin/env python
from setuptools import Extension, setup

# The DP backward sweep is available both as a Cython extension and as a
# pure-numpy fallback. Build the extension when Cython is present; the
# package works (more slowly) without it.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    import numpy

    ext_modules = cythonize(
        [
            Extension(
                "phevopt.dpopt._dpcore",
                ["src/phevopt/dpopt/_dpcore.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
