"""Build script: compiles the Cython propagation kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), but Monte Carlo sweeps are ~2 orders of magnitude slower.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "rydress._kernels._rk_cy",
                ["src/rydress/_kernels/_rk_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
