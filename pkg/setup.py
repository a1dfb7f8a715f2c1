import os

from setuptools import Extension, setup

PYX = "src/membooth/_kernels/_speed.pyx"
C = "src/membooth/_kernels/_speed.c"

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [Extension("membooth._kernels._speed", [PYX])],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
elif os.path.exists(C):  # sdist carries the generated C
    ext_modules = [Extension("membooth._kernels._speed", [C])]
else:
    # Pure-Python install; membooth._kernels falls back to the numpy path.
    ext_modules = []

setup(ext_modules=ext_modules)
