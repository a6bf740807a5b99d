import numpy as np
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

import os

if cythonize is not None and os.path.exists("src/fiberqed/_radiation_cy.pyx"):
    ext_modules = cythonize(
        [
            Extension(
                "fiberqed._radiation_cy",
                ["src/fiberqed/_radiation_cy.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
