"""Build the optional Cython kernel; the package falls back to numpy without it."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CSD_NO_EXTENSION"):
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
                    "csd._kernels",
                    ["src/csd/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # no -ffast-math: the kernel must round exactly like the numpy path
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
