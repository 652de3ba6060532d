import warnings

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    warnings.warn("Cython not available; building without the compiled kernels")
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "positres._kernels._cykernels",
                ["src/positres/_kernels/_cykernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
