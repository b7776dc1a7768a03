import os

import numpy as np
from setuptools import Extension, setup


def _extensions():
    if os.environ.get("LEVY_ORTHANT_NO_EXT"):
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    lib_dir = os.path.join(os.path.dirname(np.__file__), "random", "lib")
    ext = Extension(
        "levy_orthant.sim._kernel",
        ["src/levy_orthant/sim/_kernel.pyx"],
        include_dirs=[np.get_include()],
        library_dirs=[lib_dir],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # bit-identical results with the pure-Python kernel
        extra_compile_args=["-O2", "-ffp-contract=off", "-fno-fast-math"],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(ext_modules=_extensions())
