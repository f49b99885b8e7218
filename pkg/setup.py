import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Source distribution without Cython: install the pure-NumPy kernels only.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "scenex._kernels._core",
                ["src/scenex/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # -ffp-contract=off keeps multiply-add sequences as separate
                # IEEE operations so results match the NumPy backend bit for
                # bit on the kernels that promise exact agreement.
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
