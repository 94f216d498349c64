"""Build hook for the optional compiled kernels.

Without Cython (or a C compiler) the package still installs and runs on the
pure-Python fallback in ``dynmwm._pykernels``.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("dynmwm._ckernels", ["src/dynmwm/_ckernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
