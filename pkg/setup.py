"""Build hook: compiles the optional int64 elimination kernels.

Metadata lives in pyproject.toml.  Without Cython or a C++ compiler the
package installs without the extension and uses the pure-Python kernels.
Set AHSSLAB_NO_EXT=1 to skip the extension on purpose.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or failing
            self.warn(f"skipping compiled kernels: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self.warn(f"skipping {ext.name}: {exc}")


def extensions():
    if os.environ.get("AHSSLAB_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "ahsslab._kernels._ckernels",
        ["src/ahsslab/_kernels/_ckernels.pyx"],
        language="c++",
        extra_compile_args=["-O2", "-std=c++17"],
    )
    return cythonize([ext], language_level=3, quiet=True)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
