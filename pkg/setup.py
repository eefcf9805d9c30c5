"""Build script: compiles the optional accelerator extension.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); compilation failures therefore
downgrade to a warning instead of aborting the install.  Without Cython
the pregenerated C file is compiled directly.
"""
import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

PYX = "src/hashmine/kernels/_ckernels.pyx"
PREGENERATED = "src/hashmine/kernels/_ckernels.c"


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing entirely
            warnings.warn(f"skipping compiled kernels, using pure-Python fallback: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"could not build {ext.name}, using pure-Python fallback: {exc}")


def extensions():
    try:
        from Cython.Build import cythonize

        return cythonize(
            [Extension("hashmine.kernels._ckernels", [PYX], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass
    if os.path.exists(PREGENERATED):
        return [
            Extension("hashmine.kernels._ckernels", [PREGENERATED], extra_compile_args=["-O3"])
        ]
    return []


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
