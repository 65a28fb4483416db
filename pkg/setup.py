import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; ccasched.kernels falls back
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("CCASCHED_NO_EXT"):
    ext_modules = cythonize(
        [
            Extension(
                "ccasched._kernels",
                ["src/ccasched/_kernels.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
