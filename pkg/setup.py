import os

import numpy as np
from setuptools import Extension, setup

# KPLIST_NO_EXT=1 installs the pure-Python kernels only.
ext_modules = []
if not os.environ.get("KPLIST_NO_EXT"):
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "kplist.kernels._ckernels",
            ["src/kplist/kernels/_ckernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            language="c++",
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
