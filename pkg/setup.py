"""Build script: compiles the optional _kernels extension, falling back to pure Python.

The package is fully functional without the compiled extension; mixsynth._backend
selects the implementation at import time.
"""
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class BuildFailed(Exception):
    pass


class optional_build_ext(build_ext):
    def run(self):
        try:
            build_ext.run(self)
        except (PlatformError, FileNotFoundError):
            raise BuildFailed()

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except (CCompilerError, ExecError, PlatformError, ValueError):
            raise BuildFailed()


def get_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "mixsynth._kernels",
        sources=["src/mixsynth/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={
        "language_level": "3",
        "boundscheck": False,
        "wraparound": False,
        "cdivision": True,
    })


def run_setup(with_ext):
    kwargs = {}
    if with_ext:
        kwargs = {"ext_modules": get_extensions(),
                  "cmdclass": {"build_ext": optional_build_ext}}
    setup(**kwargs)


try:
    run_setup(True)
except BuildFailed:
    print("*" * 70, file=sys.stderr)
    print("Compiled kernels unavailable; installing pure-Python fallback.",
          file=sys.stderr)
    print("*" * 70, file=sys.stderr)
    run_setup(False)
