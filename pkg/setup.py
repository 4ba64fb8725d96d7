"""Build script: compiles the optional grid-evaluation extension.

The package works without the extension (a NumPy fallback is selected at
import); building it just makes the quadrature inner loop faster.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "todawhit._gridcore",
                ["src/todawhit/_gridcore.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
