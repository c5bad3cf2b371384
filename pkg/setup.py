import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class OptionalBuildExt(build_ext):
    """Build the compiled kernels if possible; the package falls back to the
    pure-Python kernels at import time when the extension is missing."""

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # compiler or BLAS headers unavailable
            print(
                f"warning: building {ext.name} failed ({exc}); "
                "pure-Python kernels will be used instead",
                file=sys.stderr,
            )


extensions = [
    Extension(
        "collisync._kernels",
        ["src/collisync/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
]

if cythonize is not None:
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
else:
    print("warning: Cython not found; pure-Python kernels will be used", file=sys.stderr)
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
