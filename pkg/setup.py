import os

from setuptools import setup

ext_modules = []
if os.environ.get("SAGNACSQ_NO_EXT", "") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension(
                "sagnacsq._core._kernels",
                ["src/sagnacsq/_core/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-fno-math-errno"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # no Cython: the numpy fallback in sagnacsq._core is used
        ext_modules = []

setup(ext_modules=ext_modules)
