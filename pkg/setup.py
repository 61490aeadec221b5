"""Build script for the optional compiled kernel extension.

The package works without the extension (a NumPy fallback is selected at
import time); building it just makes the hot numerical loops faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext = Extension(
        "irrsel._kernels",
        ["src/irrsel/_kernels.pyx"],
        extra_compile_args=["-O2", "-ffp-contract=off"],
        optional=True,
    )
    ext_modules = cythonize(ext, compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
