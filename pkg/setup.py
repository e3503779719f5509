# Builds the optional compiled state-vector kernels.  If no C compiler (or
# Cython) is available the build falls back to a pure-Python install; the
# package selects the numpy fallback kernels at import time in that case.
#
# Compile in place for development with:
#   python setup.py build_ext --inplace

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to a pure-Python install on compile failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            warnings.warn(f"compiled kernels skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernels skipped ({exc}); using pure-Python fallback")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "pilotqec._kernels._statevec",
                ["src/pilotqec/_kernels/_statevec.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(
    ext_modules=extensions,
    cmdclass={"build_ext": optional_build_ext},
)
