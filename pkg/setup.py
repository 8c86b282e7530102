# Cython extension build for the hot rate/gradient kernels. The package works
# without the extension (pure-NumPy fallback selected at import), so a missing
# compiler only costs speed, not functionality.
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "ris_ee_fair._kernels._cykern",
                ["src/ris_ee_fair/_kernels/_cykern.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level="3",
    )

setup(ext_modules=ext_modules)
