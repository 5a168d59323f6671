"""Build script: compiles the optional _speedups extension when possible.

The package is fully functional without the extension (pure-Python kernels);
a missing compiler or Cython simply produces a slower install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build extensions, but degrade to a pure-Python install on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            warnings.warn(f"skipping compiled kernels: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"skipping {ext.name}: {exc}")


def _extensions():
    import os

    pyx = "src/wachkit/_speedups.pyx"
    csrc = "src/wachkit/_speedups.c"
    if os.path.exists(pyx):
        try:
            from Cython.Build import cythonize

            return cythonize(
                [Extension("wachkit._speedups", [pyx])], language_level=3
            )
        except ImportError:
            pass
    # sdists ship the generated C file; build from it without Cython
    if os.path.exists(csrc):
        return [Extension("wachkit._speedups", [csrc])]
    return []


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
