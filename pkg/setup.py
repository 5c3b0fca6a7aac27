"""Build the optional compiled line-search kernel.

The package works without it: ``proxdescent.backend`` falls back to the
pure-Python kernel when the extension is missing. Set
``PROXDESCENT_NO_EXT=1`` to skip compilation entirely.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PROXDESCENT_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "proxdescent._kernels",
                    ["src/proxdescent/_kernels.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
