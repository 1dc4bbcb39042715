"""Optional build of the compiled kernel core.

The package is fully functional without the extension (a numpy fallback is
selected at import time).  When Cython and numpy are available at build time,
`python setup.py build_ext --inplace` compiles the fast kernels.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "macwtap._core._ckernels",
                ["src/macwtap/_core/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
